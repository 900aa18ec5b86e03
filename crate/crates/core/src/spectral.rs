//! Weighted Sturm–Liouville problems on the upper half-sphere.
//!
//! In the polar angle `θ` from the north pole, a separated eigenfunction
//! `g(θ) Y_m(η)` of the weighted Laplacian with density `ζ_N^alpha` solves
//!
//! ```text
//! -(w g')' / w + m(m+N-3) g / sin²θ = μ g,   w = sin^{N-2}θ cos^α θ,
//! ```
//!
//! on `(0, π/2)` with the natural (no-flux) condition at the equator, or on
//! `(0, θ̃)` with `g(θ̃) = 0`. Everything is discretized in `u = cos θ` by a
//! Galerkin method whose trial functions are
//! `z(u) (1-u²)^{m/2} p_j(u)`, with `p_j` orthonormal Jacobi polynomials and
//! `z` carrying the boundary behaviour:
//!
//! * natural condition: `z = 1`;
//! * Dirichlet at the equator: `z = u^{1-α}`, the exact ground state;
//! * Dirichlet at `θ̃ < π/2`: `z = u - cos θ̃` on `(cos θ̃, 1)`.
//!
//! The endpoint powers of every mass, stiffness and potential integrand are
//! absorbed into a Gauss–Jacobi weight, so assembly only samples smooth
//! remainders.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::params::{AdmissibilityError, WeightParams};
use crate::quadrature::{gauss_legendre, jacobi_on, OrthonormalJacobi, QuadratureError};
use crate::sphere::integrate_hemisphere;

/// Mass row, stiffness row, test-function masses and self-mass of a trial function.
type TrialForms = (Vec<f64>, Vec<f64>, Vec<f64>, f64);
/// Integrand of one moment of a sphere function, given point and gradient buffer.
type Moment<'a> = dyn Fn(&[f64], &mut [f64]) -> f64 + 'a;

/// Default relative tolerance for eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest basis tried before giving up.
pub const MAX_BASIS: usize = 256;
/// Largest admissible weak-form residual of a returned eigenpair.
pub const RESIDUAL_LIMIT: f64 = 1e-6;
/// Extra test functions used to measure the weak-form defect.
const ENRICH: usize = 8;
/// Number of eigenfunction samples stored in an [`EigenPair`].
const SAMPLES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundaryCondition {
    /// Natural condition at the equator `θ = π/2`.
    NaturalNeumann,
    /// `g(θ̃) = 0`, `θ̃ ∈ (0, π/2]`.
    Dirichlet { theta_tilde: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SLProblem {
    pub dim: usize,
    pub alpha: f64,
    /// Angular branch: the potential is `m(m+N-3)/sin²θ`.
    pub m: usize,
    pub bc: BoundaryCondition,
}

impl SLProblem {
    pub fn neumann(dim: usize, alpha: f64, m: usize) -> Self {
        Self {
            dim,
            alpha,
            m,
            bc: BoundaryCondition::NaturalNeumann,
        }
    }

    pub fn dirichlet(dim: usize, alpha: f64, theta_tilde: f64) -> Self {
        Self {
            dim,
            alpha,
            m: 0,
            bc: BoundaryCondition::Dirichlet { theta_tilde },
        }
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let bad = |msg: String| Err(SpectralError::InvalidProblem(msg));
        if self.dim < 2 {
            return bad(format!("N must be at least 2, got {}", self.dim));
        }
        if !(self.alpha > -1.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must exceed -1, got {}", self.alpha));
        }
        if self.dim == 2 && self.m > 1 {
            return bad(format!(
                "for N = 2 only branches m = 0, 1 exist, got m = {}",
                self.m
            ));
        }
        if let BoundaryCondition::Dirichlet { theta_tilde } = self.bc {
            if !(theta_tilde > 0.0 && theta_tilde <= FRAC_PI_2) {
                return bad(format!(
                    "theta_tilde must lie in (0, π/2], got {theta_tilde}"
                ));
            }
        }
        Ok(())
    }

    /// Upper end of the angular interval.
    pub fn theta_max(&self) -> f64 {
        match self.bc {
            BoundaryCondition::NaturalNeumann => FRAC_PI_2,
            BoundaryCondition::Dirichlet { theta_tilde } => theta_tilde,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectralError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("eigenvalues not converged to {tol} with {max_basis} basis functions (last change {last_change})")]
    NoConvergence {
        tol: f64,
        max_basis: usize,
        last_change: f64,
    },
    #[error("spurious mode: eigenpair {index} has weak-form residual {residual}")]
    Spurious { index: usize, residual: f64 },
    #[error("mass matrix is not positive definite")]
    Indefinite,
    #[error("nodal point not found: {0}")]
    NodalPointNotFound(String),
    #[error("perimeter degree k+N+alpha-1 = {0} must be positive")]
    DegeneratePerimeterDegree(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Neumann,
    /// Dirichlet at the equator, `z = u^{1-α}`.
    DirichletEquator,
    /// Dirichlet at `u = u0 > 0`, `z = u - u0`.
    DirichletAt(f64),
}

/// Trial space description. Cheap to clone; polynomial recurrences are
/// rebuilt on demand.
#[derive(Debug, Clone, PartialEq)]
struct Basis {
    dim: usize,
    alpha: f64,
    m: usize,
    kind: Kind,
    size: usize,
}

/// Reduced values of one trial function at a point: `v` multiplies the
/// mass and potential weights, `d` the stiffness weight.
#[derive(Debug, Clone, Copy)]
struct Reduced {
    v: f64,
    d: f64,
}

impl Basis {
    fn new(p: &SLProblem, size: usize) -> Self {
        let kind = match p.bc {
            BoundaryCondition::NaturalNeumann => Kind::Neumann,
            BoundaryCondition::Dirichlet { theta_tilde } if theta_tilde >= FRAC_PI_2 - 1e-12 => {
                Kind::DirichletEquator
            }
            BoundaryCondition::Dirichlet { theta_tilde } => Kind::DirichletAt(theta_tilde.cos()),
        };
        Basis {
            dim: p.dim,
            alpha: p.alpha,
            m: p.m,
            kind,
            size,
        }
    }

    fn lower(&self) -> f64 {
        match self.kind {
            Kind::DirichletAt(u0) => u0,
            _ => 0.0,
        }
    }

    fn nf(&self) -> f64 {
        self.dim as f64
    }

    /// Total `(1-u²)` exponents of the mass, stiffness and potential integrands.
    fn exponents(&self) -> (f64, f64, f64) {
        let m = self.m as f64;
        let n = self.nf();
        let e_mass = m + (n - 3.0) / 2.0;
        let e_pot = m + (n - 5.0) / 2.0;
        let e_stiff = if self.m == 0 { (n - 1.0) / 2.0 } else { e_pot };
        (e_mass, e_stiff, e_pot)
    }

    /// Exponent of `(1-u)` placed in the quadrature weight.
    fn upper_weight_exponent(&self) -> f64 {
        let (e_mass, e_stiff, e_pot) = self.exponents();
        if self.m == 0 {
            e_mass.min(e_stiff)
        } else {
            e_mass.min(e_stiff).min(e_pot)
        }
    }

    /// Exponent of `(u - lower)` placed in the quadrature weight.
    fn lower_weight_exponent(&self) -> f64 {
        match self.kind {
            Kind::Neumann => self.alpha,
            Kind::DirichletEquator => -self.alpha,
            Kind::DirichletAt(_) => 0.0,
        }
    }

    /// Smooth `u` factors left over after the lower weight is removed:
    /// (mass and potential, stiffness).
    fn u_factors(&self, u: f64) -> (f64, f64) {
        match self.kind {
            Kind::Neumann => (1.0, 1.0),
            Kind::DirichletEquator => (u * u, 1.0),
            Kind::DirichletAt(_) => {
                let ua = u.powf(self.alpha);
                (ua, ua)
            }
        }
    }

    /// Orthonormal family tuned to the mass weight, which keeps the mass
    /// matrix close to diagonal.
    fn polys(&self, count: usize) -> OrthonormalJacobi {
        let (e_mass, _, _) = self.exponents();
        let pb = match self.kind {
            Kind::Neumann => self.alpha,
            Kind::DirichletEquator => 2.0 - self.alpha,
            Kind::DirichletAt(_) => 2.0,
        };
        OrthonormalJacobi::new(count, e_mass, pb)
    }

    fn to_x(&self, u: f64) -> (f64, f64) {
        let lo = self.lower();
        (2.0 * (u - lo) / (1.0 - lo) - 1.0, 2.0 / (1.0 - lo))
    }

    /// Reduced values of a trial function `z (1-u²)^{m/2} f(u)`.
    fn reduce(&self, u: f64, f: f64, df: f64) -> Reduced {
        let m = self.m as f64;
        let one_m_u2 = 1.0 - u * u;
        match self.kind {
            Kind::Neumann => {
                let d = if self.m == 0 {
                    df
                } else {
                    one_m_u2 * df - m * u * f
                };
                Reduced { v: f, d }
            }
            Kind::DirichletEquator => {
                let s = 1.0 - self.alpha;
                let core = s * f + u * df;
                let d = if self.m == 0 {
                    core
                } else {
                    one_m_u2 * core - m * u * u * f
                };
                Reduced { v: f, d }
            }
            Kind::DirichletAt(u0) => {
                let q = u - u0;
                let core = f + q * df;
                let d = if self.m == 0 {
                    core
                } else {
                    one_m_u2 * core - m * u * q * f
                };
                Reduced { v: q * f, d }
            }
        }
    }

    /// Value of `z (1-u²)^{m/2} f(u)` and its `u`-derivative.
    fn full_value(&self, u: f64, f: f64, df: f64) -> (f64, f64) {
        let m = self.m as f64;
        let one_m_u2 = (1.0 - u * u).max(0.0);
        let (z, dz) = match self.kind {
            Kind::Neumann => (1.0, 0.0),
            Kind::DirichletEquator => {
                let s = 1.0 - self.alpha;
                if u > 0.0 {
                    (u.powf(s), s * u.powf(s - 1.0))
                } else {
                    (0.0, 0.0)
                }
            }
            Kind::DirichletAt(u0) => (u - u0, 1.0),
        };
        let h = one_m_u2.powf(m / 2.0);
        let dh = if self.m == 0 {
            0.0
        } else {
            -m * u * one_m_u2.powf(m / 2.0 - 1.0)
        };
        (z * h * f, (dz * f + z * df) * h + z * f * dh)
    }

    /// Quadrature rule on `(lower, 1)` and per-node weights for
    /// (mass, stiffness, potential).
    fn weighted_nodes(&self, count: usize) -> Result<Vec<(f64, f64, f64, f64)>, QuadratureError> {
        let nq = 2 * count + 48;
        let e1 = self.upper_weight_exponent();
        let a0 = self.lower_weight_exponent();
        let rule = jacobi_on(nq, self.lower(), 1.0, a0, e1)?;
        let (e_mass, e_stiff, e_pot) = self.exponents();
        let pot_coef = (self.m as f64) * (self.m as f64 + self.nf() - 3.0);
        Ok(rule
            .iter()
            .map(|(u, w)| {
                let (fm, fk) = self.u_factors(u);
                let rem = |e: f64| (1.0 + u).powf(e) * (1.0 - u).powi((e - e1).round() as i32);
                let wm = w * fm * rem(e_mass);
                let wk = w * fk * rem(e_stiff);
                let wp = if pot_coef == 0.0 {
                    0.0
                } else {
                    pot_coef * w * fm * rem(e_pot)
                };
                (u, wm, wk, wp)
            })
            .collect())
    }

    /// Mass and stiffness (including potential) for the first `count` trial functions.
    fn assemble(&self, count: usize) -> Result<(DMatrix<f64>, DMatrix<f64>), QuadratureError> {
        let nodes = self.weighted_nodes(count)?;
        let polys = self.polys(count);
        let mut mass = DMatrix::<f64>::zeros(count, count);
        let mut stiff = DMatrix::<f64>::zeros(count, count);
        let mut vals = vec![0.0; count];
        let mut ders = vec![0.0; count];
        let mut red_v = vec![0.0; count];
        let mut red_d = vec![0.0; count];
        for &(u, wm, wk, wp) in &nodes {
            let (x, dxdu) = self.to_x(u);
            polys.eval_all(x, &mut vals, &mut ders);
            for j in 0..count {
                let r = self.reduce(u, vals[j], ders[j] * dxdu);
                red_v[j] = r.v;
                red_d[j] = r.d;
            }
            for i in 0..count {
                let (vi, di) = (red_v[i], red_d[i]);
                for j in 0..=i {
                    mass[(i, j)] += wm * vi * red_v[j];
                    stiff[(i, j)] += wk * di * red_d[j] + wp * vi * red_v[j];
                }
            }
        }
        for i in 0..count {
            for j in 0..i {
                mass[(j, i)] = mass[(i, j)];
                stiff[(j, i)] = stiff[(i, j)];
            }
        }
        Ok((mass, stiff))
    }

    /// Bilinear forms of one trial function (given by `f`, `f'`) against the
    /// first `count` basis functions.
    fn forms_against<F>(&self, count: usize, f: F) -> Result<TrialForms, QuadratureError>
    where
        F: Fn(f64) -> (f64, f64),
    {
        let nodes = self.weighted_nodes(count + 8)?;
        let polys = self.polys(count);
        let mut vals = vec![0.0; count];
        let mut ders = vec![0.0; count];
        let mut m_row = vec![0.0; count];
        let mut k_row = vec![0.0; count];
        let mut test_mass = vec![0.0; count];
        let mut self_mass = 0.0;
        for &(u, wm, wk, wp) in &nodes {
            let (x, dxdu) = self.to_x(u);
            polys.eval_all(x, &mut vals, &mut ders);
            let (fv, fd) = f(u);
            let g = self.reduce(u, fv, fd);
            self_mass += wm * g.v * g.v;
            for j in 0..count {
                let t = self.reduce(u, vals[j], ders[j] * dxdu);
                m_row[j] += wm * g.v * t.v;
                k_row[j] += wk * g.d * t.d + wp * g.v * t.v;
                test_mass[j] += wm * t.v * t.v;
            }
        }
        Ok((m_row, k_row, test_mass, self_mass))
    }
}

/// One eigenpair of a branch problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub mu: f64,
    /// Sample angles in `(0, θ_max)`.
    pub theta: Vec<f64>,
    /// `g` at `theta`, normalized to `∫ g² sin^{N-2}θ cos^α θ dθ = 1`.
    pub g: Vec<f64>,
    /// Weak-form defect against an enriched test space, relative to `max(|μ|, 1)`.
    pub residual: f64,
    pub basis_size: usize,
    coeffs: Vec<f64>,
    basis: Basis,
}

impl EigenPair {
    /// `g` and `dg/du` at `u = cos θ`.
    pub fn eval_u(&self, u: f64) -> (f64, f64) {
        let n = self.coeffs.len();
        let polys = self.basis.polys(n);
        let mut vals = vec![0.0; n];
        let mut ders = vec![0.0; n];
        let (x, dxdu) = self.basis.to_x(u);
        polys.eval_all(x, &mut vals, &mut ders);
        let f: f64 = vals.iter().zip(&self.coeffs).map(|(v, c)| v * c).sum();
        let df: f64 = ders
            .iter()
            .zip(&self.coeffs)
            .map(|(v, c)| v * c)
            .sum::<f64>()
            * dxdu;
        self.basis.full_value(u, f, df)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_u(theta.cos()).0
    }

    /// The polynomial-times-boundary factor `g / sin^m θ` and its `u`-derivative.
    fn profile(&self, u: f64) -> (f64, f64) {
        let n = self.coeffs.len();
        let polys = self.basis.polys(n);
        let mut vals = vec![0.0; n];
        let mut ders = vec![0.0; n];
        let (x, dxdu) = self.basis.to_x(u);
        polys.eval_all(x, &mut vals, &mut ders);
        let f: f64 = vals.iter().zip(&self.coeffs).map(|(v, c)| v * c).sum();
        let df: f64 = ders
            .iter()
            .zip(&self.coeffs)
            .map(|(v, c)| v * c)
            .sum::<f64>()
            * dxdu;
        Basis {
            m: 0,
            ..self.basis.clone()
        }
        .full_value(u, f, df)
    }

    /// Interior sign changes on a fine uniform grid, ignoring values below
    /// `1e-8` of the maximum.
    pub fn sign_changes(&self) -> usize {
        let tmax = self.basis_theta_max();
        let grid: Vec<f64> = (1..2000)
            .map(|i| self.eval(tmax * i as f64 / 2000.0))
            .collect();
        count_sign_changes(&grid)
    }

    fn basis_theta_max(&self) -> f64 {
        match self.basis.kind {
            Kind::DirichletAt(u0) => u0.acos(),
            _ => FRAC_PI_2,
        }
    }

    /// The eigenfunction lifted to the half-sphere: `g(θ)` for `m = 0` and
    /// `g(θ) ζ_1 / sin θ` for `m = 1`.
    pub fn sphere_function(&self) -> Result<EigenSphereFunction<'_>, SpectralError> {
        if self.basis.m > 1 {
            return Err(SpectralError::InvalidProblem(
                "only branches m = 0, 1 can be lifted".into(),
            ));
        }
        Ok(EigenSphereFunction { pair: self })
    }
}

fn count_sign_changes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= 1e-8 * max {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Lowest `count` eigenvalues and eigenvectors for one basis size.
fn solve_fixed(basis: &Basis, count: usize) -> Result<Vec<(f64, Vec<f64>, f64)>, SpectralError> {
    let n = basis.size;
    let (mass_ext, stiff_ext) = basis.assemble(n + ENRICH)?;
    let mass = mass_ext.view((0, 0), (n, n)).into_owned();
    let stiff = stiff_ext.view((0, 0), (n, n)).into_owned();
    let chol = mass.cholesky().ok_or(SpectralError::Indefinite)?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or(SpectralError::Indefinite)?;
    let c = &linv * &stiff * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("NaN eigenvalue")
    });
    let mut out = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        let mu = eig.eigenvalues[idx];
        let y = eig.eigenvectors.column(idx).into_owned();
        let coeffs: DVector<f64> = linv.transpose() * y;
        let mut ext = DVector::<f64>::zeros(n + ENRICH);
        ext.rows_mut(0, n).copy_from(&coeffs);
        let r = &stiff_ext * &ext - &mass_ext * &ext * mu;
        let mut defect = 0.0f64;
        for i in 0..n + ENRICH {
            defect = defect.max(r[i].abs() / mass_ext[(i, i)].sqrt());
        }
        out.push((
            mu,
            coeffs.iter().copied().collect(),
            defect / mu.abs().max(1.0),
        ));
    }
    Ok(out)
}

fn make_pair(
    basis: &Basis,
    mu: f64,
    mut coeffs: Vec<f64>,
    residual: f64,
) -> Result<EigenPair, SpectralError> {
    let mut pair = EigenPair {
        mu,
        theta: Vec::new(),
        g: Vec::new(),
        residual,
        basis_size: basis.size,
        coeffs: coeffs.clone(),
        basis: basis.clone(),
    };
    let tmax = pair.basis_theta_max();
    let rule = gauss_legendre(SAMPLES)?.mapped(0.0, tmax);
    let theta = rule.nodes.clone();
    let mut g: Vec<f64> = theta.iter().map(|&t| pair.eval(t)).collect();
    let max = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let first = g
        .iter()
        .copied()
        .find(|v| v.abs() > 1e-6 * max)
        .unwrap_or(1.0);
    if first < 0.0 {
        coeffs.iter_mut().for_each(|c| *c = -*c);
        g.iter_mut().for_each(|v| *v = -*v);
    }
    pair.coeffs = coeffs;
    pair.theta = theta;
    pair.g = g;
    Ok(pair)
}

/// Lowest `count` eigenpairs of the branch problem, converged to `tol`
/// (relative, absolute below 1) under doubling of the basis.
pub fn solve_branch(
    problem: &SLProblem,
    count: usize,
    tol: f64,
) -> Result<Vec<EigenPair>, SpectralError> {
    problem.validate()?;
    if count == 0 {
        return Ok(Vec::new());
    }
    if !(tol > 0.0) {
        return Err(SpectralError::InvalidProblem(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut size = 8usize;
    while size < count + 4 {
        size *= 2;
    }
    let mut prev: Option<Vec<(f64, Vec<f64>, f64)>> = None;
    let mut last_change = f64::INFINITY;
    while size <= MAX_BASIS {
        let basis = Basis::new(problem, size);
        let cur = solve_fixed(&basis, count)?;
        if let Some(p) = &prev {
            last_change = p
                .iter()
                .zip(&cur)
                .map(|(a, b)| (a.0 - b.0).abs() / b.0.abs().max(1.0))
                .fold(0.0, f64::max);
            if last_change <= tol {
                let mut out = Vec::with_capacity(count);
                for (i, (mu, coeffs, residual)) in cur.into_iter().enumerate() {
                    if residual > RESIDUAL_LIMIT {
                        return Err(SpectralError::Spurious { index: i, residual });
                    }
                    out.push(make_pair(&basis, mu, coeffs, residual)?);
                }
                return Ok(out);
            }
        }
        prev = Some(cur);
        size *= 2;
    }
    Err(SpectralError::NoConvergence {
        tol,
        max_basis: MAX_BASIS,
        last_change,
    })
}

/// The two candidates for the first nontrivial Neumann eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mu1Report {
    /// Lowest zero-mean eigenvalue of the radial branch `m = 0`.
    pub mu0: f64,
    /// Lowest eigenvalue of the branch `m = 1`.
    pub mu_m1: f64,
    pub mu1: f64,
}

pub fn mu1_report(dim: usize, alpha: f64, tol: f64) -> Result<Mu1Report, SpectralError> {
    let radial = solve_branch(&SLProblem::neumann(dim, alpha, 0), 2, tol)?;
    let first = solve_branch(&SLProblem::neumann(dim, alpha, 1), 1, tol)?;
    let mu0 = radial[1].mu;
    let mu_m1 = first[0].mu;
    Ok(Mu1Report {
        mu0,
        mu_m1,
        mu1: mu0.min(mu_m1),
    })
}

/// First nontrivial eigenvalue of the weighted Laplacian on the half-sphere
/// with the natural boundary condition.
pub fn mu1_alpha(dim: usize, alpha: f64, tol: f64) -> Result<f64, SpectralError> {
    mu1_report(dim, alpha, tol).map(|r| r.mu1)
}

/// Lowest radial Dirichlet eigenvalue on the cap `{θ < θ̃}`.
pub fn lambda1_dirichlet(
    dim: usize,
    alpha: f64,
    theta_tilde: f64,
    tol: f64,
) -> Result<f64, SpectralError> {
    Ok(solve_branch(&SLProblem::dirichlet(dim, alpha, theta_tilde), 1, tol)?[0].mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodalCheck {
    pub theta_hat: f64,
    pub mu0: f64,
    pub lambda1_at_theta_hat: f64,
}

impl NodalCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.mu0 - self.lambda1_at_theta_hat).abs() / self.mu0
    }
}

/// Locates the nodal angle of the first nonconstant radial eigenfunction
/// and solves the Dirichlet problem on the cap it bounds.
pub fn nodal_angle_crosscheck(
    dim: usize,
    alpha: f64,
    tol: f64,
) -> Result<NodalCheck, SpectralError> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(SpectralError::InvalidProblem(format!(
            "nodal check needs alpha in (-1, 1), got {alpha}"
        )));
    }
    let radial = solve_branch(&SLProblem::neumann(dim, alpha, 0), 2, tol)?;
    let g0 = &radial[1];
    let grid = 4000;
    let vals: Vec<f64> = (0..=grid)
        .map(|i| g0.eval(FRAC_PI_2 * i as f64 / grid as f64))
        .collect();
    let changes = count_sign_changes(&vals[1..grid]);
    if changes != 1 {
        return Err(SpectralError::NodalPointNotFound(format!(
            "expected one interior zero, found {changes}"
        )));
    }
    let i = (0..grid)
        .find(|&i| vals[i] * vals[i + 1] < 0.0 || vals[i + 1] == 0.0)
        .ok_or_else(|| SpectralError::NodalPointNotFound("no sign change on the grid".into()))?;
    let (mut a, mut b) = (
        FRAC_PI_2 * i as f64 / grid as f64,
        FRAC_PI_2 * (i + 1) as f64 / grid as f64,
    );
    let ga = g0.eval(a);
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        if g0.eval(c) * ga > 0.0 {
            a = c;
        } else {
            b = c;
        }
    }
    let theta_hat = 0.5 * (a + b);
    let lambda = lambda1_dirichlet(dim, alpha, theta_hat, tol)?;
    Ok(NodalCheck {
        theta_hat,
        mu0: g0.mu,
        lambda1_at_theta_hat: lambda,
    })
}

/// Weak-form defect of the trial function `z (1-u²)^{m/2} f(u)` with the
/// claimed eigenvalue `mu`: the largest `|a(g, φ) - μ (g, φ)|` over the first
/// `tests` normalized basis functions `φ`, relative to `‖g‖` and `max(|μ|, 1)`.
pub fn weak_defect<F>(
    problem: &SLProblem,
    f: F,
    mu: f64,
    tests: usize,
) -> Result<f64, SpectralError>
where
    F: Fn(f64) -> (f64, f64),
{
    problem.validate()?;
    let basis = Basis::new(problem, tests);
    let (m_row, k_row, test_mass, self_mass) = basis.forms_against(tests, f)?;
    let norm = self_mass.sqrt();
    let worst = (0..tests)
        .map(|j| (k_row[j] - mu * m_row[j]).abs() / test_mass[j].sqrt())
        .fold(0.0, f64::max);
    Ok(worst / (norm * mu.abs().max(1.0)))
}

/// Defect of `g_1 = sin θ` on the branch `m = 1` with eigenvalue `N+α-1`.
pub fn sin_theta_defect(dim: usize, alpha: f64) -> Result<f64, SpectralError> {
    let p = SLProblem::neumann(dim, alpha, 1);
    weak_defect(&p, |_| (1.0, 0.0), dim as f64 + alpha - 1.0, 32)
}

/// Defect of `ψ_0 = cos^{1-α} θ` for the equator Dirichlet problem with
/// eigenvalue `(N-1)(1-α)`.
pub fn psi0_defect(dim: usize, alpha: f64) -> Result<f64, SpectralError> {
    let p = SLProblem::dirichlet(dim, alpha, FRAC_PI_2);
    weak_defect(&p, |_| (1.0, 0.0), (dim as f64 - 1.0) * (1.0 - alpha), 32)
}

/// Sup-norm distance between the computed equator Dirichlet ground state and
/// `cos^{1-α} θ`, both normalized in `L²(dσ_α)` over `(0, π/2)`.
pub fn psi0_sup_error(pair: &EigenPair, dim: usize, alpha: f64) -> f64 {
    // ∫_0^1 u^{2-2α} u^α (1-u²)^{(N-3)/2} du = B(3/2 - α/2, (N-1)/2) / 2
    let nf = dim as f64;
    let norm2 =
        0.5 * crate::quadrature::beta(1.5 - 0.5 * alpha, 0.5 * (nf - 1.0)).unwrap_or(f64::NAN);
    let scale = 1.0 / norm2.sqrt();
    pair.theta
        .iter()
        .zip(&pair.g)
        .map(|(t, g)| (g - scale * t.cos().powf(1.0 - alpha)).abs())
        .fold(0.0, f64::max)
}

/// `k + μ_1/(k+N+α-1) - (l+1)`; nonnegative exactly when half-balls pass the
/// eigenvalue stability test.
pub fn stability_margin(params: &WeightParams, tol: f64) -> Result<f64, SpectralError> {
    params.validate()?;
    let pd = params.perimeter_degree();
    if !(pd > 0.0) {
        return Err(SpectralError::DegeneratePerimeterDegree(pd));
    }
    let mu1 = mu1_alpha(params.dim, params.alpha, tol)?;
    Ok(params.k + mu1 / pd - (params.l + 1.0))
}

/// A function on the closed upper half-sphere with its ambient gradient.
pub trait SphereFunction {
    fn value(&self, zeta: &[f64]) -> f64;
    /// Gradient of any smooth extension; only its tangential part is used.
    fn gradient(&self, zeta: &[f64], out: &mut [f64]);
}

/// Adapter for a pair of closures.
pub struct FnSphereFunction<V, G> {
    pub value: V,
    pub gradient: G,
}

impl<V, G> SphereFunction for FnSphereFunction<V, G>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    fn value(&self, zeta: &[f64]) -> f64 {
        (self.value)(zeta)
    }

    fn gradient(&self, zeta: &[f64], out: &mut [f64]) {
        (self.gradient)(zeta, out)
    }
}

/// An [`EigenPair`] of branch 0 or 1 viewed as a function on the half-sphere.
pub struct EigenSphereFunction<'a> {
    pair: &'a EigenPair,
}

impl SphereFunction for EigenSphereFunction<'_> {
    fn value(&self, zeta: &[f64]) -> f64 {
        let u = zeta[zeta.len() - 1];
        if self.pair.basis.m == 0 {
            self.pair.eval_u(u).0
        } else {
            zeta[0] * self.pair.profile(u).0
        }
    }

    fn gradient(&self, zeta: &[f64], out: &mut [f64]) {
        let last = zeta.len() - 1;
        out.iter_mut().for_each(|v| *v = 0.0);
        let u = zeta[last];
        if self.pair.basis.m == 0 {
            out[last] = self.pair.eval_u(u).1;
        } else {
            let (h, dh) = self.pair.profile(u);
            out[0] += h;
            out[last] += zeta[0] * dh;
        }
    }
}

/// Nodes per sphere dimension used by [`rayleigh_quotient`].
fn rayleigh_nodes(dim: usize) -> usize {
    match dim {
        2 => 64,
        3 => 48,
        4 => 24,
        5 => 14,
        _ => 8,
    }
}

/// `∫|∇_S u|² dσ_α / ∫ (u - ū)² dσ_α`, where `ū` is the `dσ_α`-mean of `u`.
pub fn rayleigh_quotient(
    dim: usize,
    alpha: f64,
    u: &dyn SphereFunction,
) -> Result<f64, SpectralError> {
    rayleigh_quotient_with_nodes(dim, alpha, u, rayleigh_nodes(dim))
}

pub fn rayleigh_quotient_with_nodes(
    dim: usize,
    alpha: f64,
    u: &dyn SphereFunction,
    nodes: usize,
) -> Result<f64, SpectralError> {
    if dim < 2 || !(alpha > -1.0) {
        return Err(SpectralError::InvalidProblem(format!(
            "need N >= 2 and alpha > -1, got {dim}, {alpha}"
        )));
    }
    let mut grad = vec![0.0; dim];
    let mut sums = [0.0f64; 4];
    // one pass per moment keeps the closure simple
    let moments: [&Moment; 4] = [
        &|_, _| 1.0,
        &|z, _| u.value(z),
        &|z, _| u.value(z).powi(2),
        &|z, g| {
            u.gradient(z, g);
            let radial: f64 = g.iter().zip(z).map(|(a, b)| a * b).sum();
            g.iter().zip(z).map(|(a, b)| (a - radial * b).powi(2)).sum()
        },
    ];
    for (s, f) in sums.iter_mut().zip(moments) {
        *s = integrate_hemisphere(dim - 1, alpha, nodes, |z| f(z, &mut grad))?;
    }
    let [area, first, second, energy] = sums;
    let variance = second - first * first / area;
    if !(variance > 1e-300) {
        return Err(SpectralError::InvalidProblem(
            "function is constant on the half-sphere".into(),
        ));
    }
    Ok(energy / variance)
}
