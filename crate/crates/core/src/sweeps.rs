//! Trial-family experiments.
//!
//! * Decay of the isoperimetric ratio along unit balls moving up the
//!   `x_N`-axis or along the wall, with a log-log fit of the tail.
//! * Radial densities `h(|x|)` on `R^N`: a centred ball beaten by an
//!   off-centre ball of equal measure when `h` is log-convex but decreasing
//!   near the origin, and balls escaping to infinity with vanishing
//!   perimeter for power-law densities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    axial_ball_integral, axial_sphere_integral, ratio, GeometryError, TrialDomain,
};
use crate::params::{AdmissibilityError, WeightParams};
use crate::quadrature::{
    jacobi_on, mc_integrate, refine_until, BoxDomain, McEstimate, QuadratureError,
};
use crate::sphere::{ball_volume, sphere_area};

/// Relative tolerance of the radial and axial quadratures in this module.
const REL_TOL: f64 = 1e-12;
/// Relative bisection tolerance on radii.
const RADIUS_TOL: f64 = 1e-12;
/// Largest off-centre radius tried, as a fraction of `R0`. Smallness needs
/// `ρ < R0/2` anyway.
const RHO_CAP: f64 = 0.45;
/// Default share of the grid used for the tail fit.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.4;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SweepError {
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("fit needs at least 4 valid tail rows, got {0}")]
    TooFewRows(usize),
    #[error("invalid weight: {0}")]
    Weight(String),
    #[error("measure {d} too large: {reason}")]
    MeasureTooLarge { d: f64, reason: String },
    #[error("root not bracketed: {0}")]
    NotBracketed(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("no admissible d: {0}")]
    NoAdmissibleD(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `B_1(t e_N)`.
    UpAxis,
    /// `B_1(t e_1) ∩ R^N_+`.
    OnWall,
}

impl Family {
    pub fn domain(self, t: f64) -> TrialDomain {
        match self {
            Family::UpAxis => TrialDomain::up_axis(t),
            Family::OnWall => TrialDomain::on_wall(t),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "up-axis" | "upaxis" | "up" => Ok(Family::UpAxis),
            "on-wall" | "onwall" | "wall" => Ok(Family::OnWall),
            other => Err(format!(
                "unknown family '{other}', expected up-axis or on-wall"
            )),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::UpAxis => "up-axis",
            Family::OnWall => "on-wall",
        })
    }
}

/// Leading-order exponent of `t ↦ ratio(family(t))`.
///
/// Far up the axis `|x| ≈ x_N ≈ t`, so measure `≈ t^{l+α}` and perimeter
/// `≈ t^{k+α}`. Along the wall `|x| ≈ t` while `x_N` stays of order one.
pub fn predicted_exponent(params: &WeightParams, family: Family) -> Result<f64, SweepError> {
    params.validate()?;
    let e = params.ratio_exponent();
    let WeightParams { k, l, alpha, .. } = *params;
    Ok(match family {
        Family::UpAxis => alpha + k - e * (alpha + l),
        Family::OnWall => k - l * e,
    })
}

/// `n` points from `a` to `b`, equally spaced in `log t`.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub ratio: f64,
    pub measure: f64,
    pub perimeter: f64,
    /// Set when the row's quadrature failed; numeric fields are then NaN.
    pub error: Option<String>,
}

/// Ordinary least squares fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit, SweepError> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(SweepError::TooFewRows(n));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(SweepError::Grid("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr: (ssr / (nf - 2.0) / sxx).sqrt(),
        points: n,
    })
}

/// Log-log fit over the last `ceil(tail_fraction · n)` of the `(t, value)`
/// pairs, skipping non-finite or nonpositive values.
pub fn tail_fit(ts: &[f64], values: &[f64], tail_fraction: f64) -> Result<LineFit, SweepError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(SweepError::Grid(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let n = ts.len();
    let take = ((n as f64) * tail_fraction).ceil() as usize;
    let start = n - take.min(n);
    let (xs, ys): (Vec<f64>, Vec<f64>) = ts[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .unzip();
    if xs.len() < 4 {
        return Err(SweepError::TooFewRows(xs.len()));
    }
    fit_line(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub params: WeightParams,
    pub family: Family,
    pub rows: Vec<SweepRow>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub predicted_slope: f64,
    pub tail_fraction: f64,
}

impl SweepResult {
    pub fn valid_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_none())
    }
}

fn check_grid(t_grid: &[f64], min: f64) -> Result<(), SweepError> {
    if t_grid.is_empty() {
        return Err(SweepError::Grid("empty grid".into()));
    }
    if t_grid.iter().any(|t| !(*t > min) || !t.is_finite()) {
        return Err(SweepError::Grid(format!(
            "grid values must be finite and exceed {min}"
        )));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SweepError::Grid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Ratios along a trial family and a tail fit of their decay. Rows are
/// evaluated in parallel; their order follows `t_grid`.
pub fn run_sweep(
    params: &WeightParams,
    family: Family,
    t_grid: &[f64],
    tail_fraction: f64,
) -> Result<SweepResult, SweepError> {
    params.validate()?;
    check_grid(t_grid, 2.0)?;
    let rows: Vec<SweepRow> = t_grid
        .par_iter()
        .map(
            |&t| match crate::geometry::evaluate(params, &family.domain(t)) {
                Ok(r) => SweepRow {
                    t,
                    ratio: r.ratio,
                    measure: r.measure.value,
                    perimeter: r.perimeter.value,
                    error: None,
                },
                Err(e) => SweepRow {
                    t,
                    ratio: f64::NAN,
                    measure: f64::NAN,
                    perimeter: f64::NAN,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let rs: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let fit = tail_fit(&ts, &rs, tail_fraction)?;
    Ok(SweepResult {
        params: *params,
        family,
        rows,
        fitted_slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        predicted_slope: predicted_exponent(params, family)?,
        tail_fraction,
    })
}

/// Ratio of the first member of a family, convenient for comparisons with `c_rad`.
pub fn family_ratio(params: &WeightParams, family: Family, t: f64) -> Result<f64, SweepError> {
    Ok(ratio(params, &family.domain(t))?)
}

/// A radial density `h(|x|)` on `R^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialWeight {
    /// `h(r) = r^p`.
    Power { p: f64 },
    /// `h(r) = exp(q(r))`, `q(r) = Σ coeffs[i] r^i`.
    LogconvexPoly { coeffs: Vec<f64> },
}

impl RadialWeight {
    /// `exp((r - 1)²)`: log-convex and decreasing on `(0, 1)`.
    pub fn shifted_gaussian() -> Self {
        RadialWeight::LogconvexPoly {
            coeffs: vec![1.0, -2.0, 1.0],
        }
    }

    fn poly(coeffs: &[f64], r: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    fn poly_derivative(coeffs: &[f64], order: usize) -> Vec<f64> {
        let mut c = coeffs.to_vec();
        for _ in 0..order {
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| i as f64 * v)
                .collect();
        }
        c
    }

    pub fn h(&self, r: f64) -> f64 {
        match self {
            RadialWeight::Power { p } => r.powf(*p),
            RadialWeight::LogconvexPoly { coeffs } => Self::poly(coeffs, r).exp(),
        }
    }

    pub fn dh(&self, r: f64) -> f64 {
        match self {
            RadialWeight::Power { p } => p * r.powf(p - 1.0),
            RadialWeight::LogconvexPoly { coeffs } => {
                Self::poly(&Self::poly_derivative(coeffs, 1), r) * self.h(r)
            }
        }
    }

    /// `(log h)''` at `r`.
    pub fn log_second_derivative(&self, r: f64) -> f64 {
        match self {
            RadialWeight::Power { p } => -p / (r * r),
            RadialWeight::LogconvexPoly { coeffs } => {
                Self::poly(&Self::poly_derivative(coeffs, 2), r)
            }
        }
    }

    /// Power of `r` split off at the origin, so that `h = r^s · smooth`.
    fn origin_power(&self) -> f64 {
        match self {
            RadialWeight::Power { p } => *p,
            RadialWeight::LogconvexPoly { .. } => 0.0,
        }
    }

    fn smooth_part(&self, r: f64) -> f64 {
        match self {
            RadialWeight::Power { .. } => 1.0,
            RadialWeight::LogconvexPoly { .. } => self.h(r),
        }
    }

    /// `(log h)'' ≥ 0` on a grid of `(0, r_max]`.
    pub fn check_log_convex(&self, r_max: f64) -> Result<(), SweepError> {
        for i in 1..=1000 {
            let r = r_max * i as f64 / 1000.0;
            let v = self.log_second_derivative(r);
            if v < -1e-12 {
                return Err(SweepError::Weight(format!(
                    "log h is not convex at r = {r} ((log h)'' = {v})"
                )));
            }
        }
        Ok(())
    }

    /// `h' < 0` on a grid of `(0, r0)`.
    pub fn check_decreasing(&self, r0: f64) -> Result<(), SweepError> {
        for i in 1..1000 {
            let r = r0 * i as f64 / 1000.0;
            if !(self.dh(r) < 0.0) {
                return Err(SweepError::Weight(format!(
                    "h is not strictly decreasing at r = {r}"
                )));
            }
        }
        Ok(())
    }

    /// `|B_R|_h = |S^{N-1}| ∫_0^R h(r) r^{N-1} dr`.
    pub fn centered_measure(&self, dim: usize, radius: f64) -> Result<f64, SweepError> {
        let s = self.origin_power() + dim as f64 - 1.0;
        if !(s > -1.0) {
            return Err(SweepError::Weight(format!(
                "h(|x|) is not integrable at the origin in dimension {dim}"
            )));
        }
        let est = refine_until(8, REL_TOL, |n| {
            let rule = jacobi_on(n, 0.0, radius, s, 0.0)?;
            Ok((rule.integrate(|r| self.smooth_part(r)), n))
        })?;
        Ok(sphere_area(dim - 1) * est.value)
    }

    /// `P_h(B_R) = |S^{N-1}| h(R) R^{N-1}`.
    pub fn centered_perimeter(&self, dim: usize, radius: f64) -> f64 {
        sphere_area(dim - 1) * self.h(radius) * radius.powi(dim as i32 - 1)
    }

    /// `|B_ρ(c e_1)|_h`.
    pub fn offcenter_measure(&self, dim: usize, c: f64, rho: f64) -> Result<f64, SweepError> {
        Ok(axial_ball_integral(dim, c, rho, REL_TOL, |norm, _| self.h(norm))?.value)
    }

    /// `P_h(B_ρ(c e_1))`.
    pub fn offcenter_perimeter(&self, dim: usize, c: f64, rho: f64) -> Result<f64, SweepError> {
        Ok(axial_sphere_integral(dim, c, rho, REL_TOL, |norm, _| self.h(norm))?.value)
    }
}

/// Bisection for an increasing function `f` with `f(lo) < target ≤ f(hi)`.
fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, target: f64) -> Result<f64, SweepError>
where
    F: FnMut(f64) -> Result<f64, SweepError>,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= RADIUS_TOL * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One step of the perimeter comparison chain, `lhs < rhs` expected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
}

impl ChainStep {
    fn new(label: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            label,
            lhs,
            rhs,
            strict: lhs < rhs,
        }
    }

    pub fn relative_margin(&self) -> f64 {
        (self.rhs - self.lhs) / self.rhs.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffcenterRecord {
    pub dim: usize,
    pub r0: f64,
    pub d: f64,
    /// Radius of the centred ball of measure `d`.
    pub r_d: f64,
    /// Radius of the off-centre ball of measure `d`.
    pub rho_d: f64,
    /// First coordinate of the off-centre ball's centre, `R_0 - ρ(d)`.
    pub y_d: f64,
    pub p_centered: f64,
    pub p_offcenter: f64,
    /// `ρ(d) < (h(R(d))/h(R_0))^{1/N} R(d)` as (lhs, rhs).
    pub radius_bound: (f64, f64),
    /// The upper bounds from `P_offcenter` to `P_centered`, in order.
    pub chain: Vec<ChainStep>,
}

impl OffcenterRecord {
    pub fn relative_margin(&self) -> f64 {
        (self.p_centered - self.p_offcenter) / self.p_centered
    }

    pub fn radius_bound_holds(&self) -> bool {
        self.radius_bound.0 < self.radius_bound.1
    }
}

/// Centred ball and the off-centre ball `B_ρ((R_0-ρ) e_1)` of weighted measure
/// `d`, their perimeters, and every intermediate bound between them.
pub fn lemma51_construct(
    h: &RadialWeight,
    dim: usize,
    r0: f64,
    d: f64,
) -> Result<OffcenterRecord, SweepError> {
    if dim < 2 || !(r0 > 0.0) || !(d > 0.0) {
        return Err(SweepError::Weight(format!(
            "need N >= 2, R0 > 0, d > 0, got {dim}, {r0}, {d}"
        )));
    }
    let nf = dim as f64;
    let full = h.centered_measure(dim, r0)?;
    if d >= full {
        return Err(SweepError::MeasureTooLarge {
            d,
            reason: format!("centred ball of radius R0 has measure {full}"),
        });
    }
    let r_d = bisect(|r| h.centered_measure(dim, r), 0.0, r0, d)?;
    // the balls B_ρ((R0-ρ)e_1) are nested and increase with ρ; keep the
    // origin well outside so the integrand stays smooth
    let rho_max = RHO_CAP * r0;
    let m_max = h.offcenter_measure(dim, r0 - rho_max, rho_max)?;
    if d >= m_max {
        return Err(SweepError::MeasureTooLarge {
            d,
            reason: format!("off-centre ball with ρ = {RHO_CAP} R0 has measure {m_max}"),
        });
    }
    let rho_d = bisect(
        |rho| h.offcenter_measure(dim, r0 - rho, rho),
        0.0,
        rho_max,
        d,
    )?;
    let y_d = r0 - rho_d;
    let p_centered = h.centered_perimeter(dim, r_d);
    let p_offcenter = h.offcenter_perimeter(dim, y_d, rho_d)?;

    let area = sphere_area(dim - 1);
    let h_near = h.h(r0 - 2.0 * rho_d);
    let q = h.h(r_d) / h.h(r0);
    let b1 = area * h_near * rho_d.powi(dim as i32 - 1);
    let b2 = area * h_near * q.powf((nf - 1.0) / nf) * r_d.powi(dim as i32 - 1);
    let b3 = area * h.h(r_d) * r_d.powi(dim as i32 - 1);
    let chain = vec![
        ChainStep::new("P_offcenter < |S| h(R0-2ρ) ρ^(N-1)", p_offcenter, b1),
        ChainStep::new("ρ^(N-1) < (h(R)/h(R0))^((N-1)/N) R^(N-1)", b1, b2),
        ChainStep::new("h(R0-2ρ) (h(R)/h(R0))^((N-1)/N) < h(R)", b2, b3),
        ChainStep {
            label: "|S| h(R) R^(N-1) = P_centered",
            lhs: b3,
            rhs: p_centered,
            strict: false,
        },
    ];
    Ok(OffcenterRecord {
        dim,
        r0,
        d,
        r_d,
        rho_d,
        y_d,
        p_centered,
        p_offcenter,
        radius_bound: (rho_d, q.powf(1.0 / nf) * r_d),
        chain,
    })
}

/// The conditions that make `d` small enough, evaluated at one `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallnessCertificate {
    pub d: f64,
    /// `R(d) ≤ R0 - 2ρ(d)` as (lhs, rhs).
    pub radii_fit: (f64, f64),
    /// `h(R0 - 2d)^N < h(R(d)) h(R0)^{N-1}` as (lhs, rhs).
    pub density_bound: (f64, f64),
    /// The same inequality with `ρ(d)` in place of `d`, which is the form
    /// the perimeter chain uses.
    pub density_bound_rho: (f64, f64),
}

impl SmallnessCertificate {
    pub fn holds(&self) -> bool {
        self.radii_fit.0 <= self.radii_fit.1
            && self.density_bound.0 < self.density_bound.1
            && self.density_bound_rho.0 < self.density_bound_rho.1
    }
}

pub fn smallness_certificate(
    h: &RadialWeight,
    dim: usize,
    r0: f64,
    d: f64,
) -> Result<SmallnessCertificate, SweepError> {
    let rec = lemma51_construct(h, dim, r0, d)?;
    let nf = dim as i32;
    let rhs = h.h(rec.r_d) * h.h(r0).powi(nf - 1);
    Ok(SmallnessCertificate {
        d,
        radii_fit: (rec.r_d, r0 - 2.0 * rec.rho_d),
        density_bound: (h.h(r0 - 2.0 * d).powi(nf), rhs),
        density_bound_rho: (h.h(r0 - 2.0 * rec.rho_d).powi(nf), rhs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct D0Result {
    pub d0: f64,
    pub certificate: SmallnessCertificate,
    /// Certificate at `2 d0`, or `None` when `2 d0` has no admissible radii.
    pub at_double: Option<SmallnessCertificate>,
}

/// Dyadic descent from `|B_{R0}|_h`: the first `d = |B_{R0}|_h / 2^j` at which
/// the smallness conditions hold. The conditions fail (or radii do not
/// exist) at `2 d0` by construction.
pub fn find_d0(h: &RadialWeight, r0: f64, dim: usize) -> Result<D0Result, SweepError> {
    h.check_log_convex(r0)?;
    h.check_decreasing(r0)?;
    let top = h.centered_measure(dim, r0)?;
    let mut prev: Option<SmallnessCertificate> = None;
    let mut d = top;
    for _ in 0..200 {
        match smallness_certificate(h, dim, r0, d) {
            Ok(cert) if cert.holds() => {
                return Ok(D0Result {
                    d0: d,
                    certificate: cert,
                    at_double: prev,
                });
            }
            Ok(cert) => prev = Some(cert),
            Err(SweepError::MeasureTooLarge { .. }) => prev = None,
            Err(e) => return Err(e),
        }
        d *= 0.5;
    }
    Err(SweepError::NoAdmissibleD(format!(
        "conditions fail for all d down to {d}"
    )))
}

/// Monte Carlo estimates of the off-centre ball's measure and perimeter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffcenterMc {
    pub measure: McEstimate,
    pub perimeter: McEstimate,
}

/// Box sampling of `|B_ρ(c e_1)|_h`, and of its perimeter through
/// `∫_{∂B_ρ} φ = N ρ^{N-1} ∫_{B_1} φ(c e_1 + ρ v/|v|) dv`.
pub fn offcenter_monte_carlo(
    h: &RadialWeight,
    dim: usize,
    c: f64,
    rho: f64,
    samples: u64,
    seed: u64,
) -> Result<OffcenterMc, SweepError> {
    let mut lower = vec![-rho; dim];
    let mut upper = vec![rho; dim];
    lower[0] += c;
    upper[0] += c;
    let bx = BoxDomain::new(lower, upper);
    let measure = mc_integrate(
        |x| {
            let d2: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| if i == 0 { (v - c).powi(2) } else { v * v })
                .sum();
            d2 < rho * rho
        },
        |x| h.h(x.iter().map(|v| v * v).sum::<f64>().sqrt()),
        &bx,
        samples,
        seed,
    )?;
    let unit = BoxDomain::new(vec![-1.0; dim], vec![1.0; dim]);
    let scale = dim as f64 * rho.powi(dim as i32 - 1);
    let perimeter = mc_integrate(
        |v| {
            let r2: f64 = v.iter().map(|a| a * a).sum();
            r2 < 1.0 && r2 > 0.0
        },
        |v| {
            let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let n2: f64 = v
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let x = rho * a / len + if i == 0 { c } else { 0.0 };
                    x * x
                })
                .sum();
            scale * h.h(n2.sqrt())
        },
        &unit,
        samples,
        seed.wrapping_add(1),
    )?;
    Ok(OffcenterMc { measure, perimeter })
}

/// Exact power-law densities `f = c1 |x|^{-α'}`, `g = c2 |x|^{-β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawPair {
    /// Decay exponent of the perimeter density.
    pub f_exp: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "N")]
    pub dim: usize,
}

impl PowerLawPair {
    pub fn check_hypotheses(&self) -> Result<(), SweepError> {
        let PowerLawPair {
            f_exp,
            beta,
            c1,
            c2,
            dim,
        } = *self;
        let n = dim as f64;
        if dim < 2 {
            return Err(SweepError::Hypothesis(format!(
                "N must be at least 2, got {dim}"
            )));
        }
        if !(f_exp > 0.0 && beta > 0.0 && c1 > 0.0 && c2 > 0.0) {
            return Err(SweepError::Hypothesis(format!(
                "exponents and constants must be positive, got α' = {f_exp}, β = {beta}, c1 = {c1}, c2 = {c2}"
            )));
        }
        if beta > n {
            return Err(SweepError::Hypothesis(format!(
                "β = {beta} exceeds N = {dim}"
            )));
        }
        if !(f_exp > (n - 1.0) / n * beta) {
            return Err(SweepError::Hypothesis(format!(
                "α' = {f_exp} must exceed (N-1)β/N = {}",
                (n - 1.0) / n * beta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingRow {
    pub t: f64,
    pub r_t: f64,
    pub p_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingTable {
    pub weights: PowerLawPair,
    pub d: f64,
    pub rows: Vec<VanishingRow>,
    pub tail_slope: f64,
    pub tail_slope_stderr: f64,
    /// `P_f` strictly decreasing over the last five rows.
    pub tail_decreasing: bool,
    /// `t - R_t` strictly increasing over the whole grid.
    pub gap_increasing: bool,
    /// `1 - max R_t/t` over the grid.
    pub delta_observed: f64,
}

impl VanishingTable {
    /// `P_f` at the last grid point over its value at the first.
    pub fn decay_factor(&self) -> f64 {
        let first = self.rows.first().map(|r| r.p_f).unwrap_or(f64::NAN);
        let last = self.rows.last().map(|r| r.p_f).unwrap_or(f64::NAN);
        last / first
    }
}

/// For each `t`, the ball `B_{R_t}(t e_1)` with `|B|_g = d`, and its perimeter
/// `P_f`.
pub fn vanishing_family(
    weights: &PowerLawPair,
    d: f64,
    t_grid: &[f64],
) -> Result<VanishingTable, SweepError> {
    weights.check_hypotheses()?;
    if !(d > 0.0) {
        return Err(SweepError::Hypothesis(format!(
            "d must be positive, got {d}"
        )));
    }
    check_grid(t_grid, 0.0)?;
    let PowerLawPair {
        f_exp,
        beta,
        c1,
        c2,
        dim,
    } = *weights;
    let measure = |t: f64, r: f64| -> Result<f64, SweepError> {
        Ok(axial_ball_integral(dim, t, r, REL_TOL, |norm, _| c2 * norm.powf(-beta))?.value)
    };
    let rows: Vec<VanishingRow> = t_grid
        .par_iter()
        .map(|&t| -> Result<VanishingRow, SweepError> {
            // leading order: c2 ω_N R^N t^{-β} = d
            let guess = (d * t.powf(beta) / (c2 * ball_volume(dim)))
                .powf(1.0 / dim as f64)
                .min(0.5 * t);
            let mut hi = guess;
            while measure(t, hi)? < d {
                hi *= 2.0;
                if hi >= t {
                    hi = 0.5 * (hi / 2.0 + t);
                    if t - hi < 1e-9 * t || measure(t, hi)? < d {
                        return Err(SweepError::NotBracketed(format!(
                            "no ball around t = {t} avoiding the origin has measure {d}"
                        )));
                    }
                    break;
                }
            }
            let mut lo = 0.5 * guess.min(hi);
            while measure(t, lo)? >= d {
                lo *= 0.5;
            }
            let r_t = bisect(|r| measure(t, r), lo, hi, d)?;
            let p_f =
                axial_sphere_integral(dim, t, r_t, REL_TOL, |norm, _| c1 * norm.powf(-f_exp))?
                    .value;
            Ok(VanishingRow { t, r_t, p_f })
        })
        .collect::<Result<_, _>>()?;
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r.p_f).collect();
    let fit = tail_fit(&ts, &ps, DEFAULT_TAIL_FRACTION)?;
    let last5 = &rows[rows.len().saturating_sub(5)..];
    Ok(VanishingTable {
        weights: *weights,
        d,
        tail_decreasing: last5.windows(2).all(|w| w[1].p_f < w[0].p_f),
        gap_increasing: rows
            .windows(2)
            .all(|w| w[1].t - w[1].r_t > w[0].t - w[0].r_t),
        delta_observed: 1.0 - rows.iter().map(|r| r.r_t / r.t).fold(0.0, f64::max),
        tail_slope: fit.slope,
        tail_slope_stderr: fit.slope_stderr,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn exponent_examples() {
        let p = WeightParams::new(2, 0.0, 0.0, -0.5);
        assert_relative_eq!(
            predicted_exponent(&p, Family::UpAxis).unwrap(),
            -1.0 / 3.0,
            max_relative = 1e-14
        );
        let p = WeightParams::new(2, 0.0, 1.0, -0.5);
        assert_relative_eq!(
            predicted_exponent(&p, Family::OnWall).unwrap(),
            -0.2,
            max_relative = 1e-14
        );
        let p = WeightParams::new(3, 0.0, 0.0, 0.0);
        assert_eq!(predicted_exponent(&p, Family::UpAxis).unwrap(), 0.0);
    }

    #[test]
    fn fit_recovers_power_law() {
        let ts = log_spaced(10.0, 1000.0, 10);
        let vs: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(-0.7)).collect();
        let fit = tail_fit(&ts, &vs, 1.0).unwrap();
        assert_relative_eq!(fit.slope, -0.7, max_relative = 1e-12);
        assert!(fit.slope_stderr < 1e-12);
        assert!(tail_fit(&ts, &vs, 0.2).is_err());
    }

    #[test]
    fn model_case_up_axis_sweep() {
        let p = WeightParams::new(2, 0.0, 0.0, -0.5);
        let res = run_sweep(&p, Family::UpAxis, &log_spaced(10.0, 1000.0, 12), 0.4).unwrap();
        assert!(
            (res.fitted_slope + 1.0 / 3.0).abs() < 0.01,
            "{}",
            res.fitted_slope
        );
        assert!(res.rows.last().unwrap().ratio < res.rows[0].ratio);
    }

    #[test]
    fn unweighted_sweep_is_flat() {
        let p = WeightParams::new(2, 0.0, 0.0, 0.0);
        let res = run_sweep(&p, Family::UpAxis, &log_spaced(10.0, 1000.0, 8), 0.5).unwrap();
        assert!(res.fitted_slope.abs() < 0.005);
        for r in &res.rows {
            assert_relative_eq!(r.ratio, res.rows[0].ratio, max_relative = 1e-9);
        }
    }

    #[test]
    fn on_wall_sweep_matches_exponent() {
        let p = WeightParams::new(2, 0.0, 1.0, -0.5);
        let res = run_sweep(&p, Family::OnWall, &log_spaced(10.0, 1000.0, 10), 0.4).unwrap();
        assert!(
            (res.fitted_slope - res.predicted_slope).abs() < 0.01,
            "{res:?}"
        );
    }

    #[test]
    fn weight_checks() {
        let h = RadialWeight::shifted_gaussian();
        h.check_log_convex(1.0).unwrap();
        h.check_decreasing(1.0).unwrap();
        assert!(RadialWeight::Power { p: 0.0 }
            .check_decreasing(1.0)
            .is_err());
        assert!(RadialWeight::LogconvexPoly {
            coeffs: vec![0.0, 0.0, -1.0]
        }
        .check_log_convex(1.0)
        .is_err());
        assert_relative_eq!(h.dh(0.5), -(0.25f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn centered_measure_closed_forms() {
        let c = RadialWeight::Power { p: 0.0 };
        assert_relative_eq!(
            c.centered_measure(3, 2.0).unwrap(),
            4.0 * PI / 3.0 * 8.0,
            max_relative = 1e-13
        );
        let p = RadialWeight::Power { p: -1.0 };
        assert_relative_eq!(
            p.centered_measure(2, 3.0).unwrap(),
            2.0 * PI * 3.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn offcenter_beats_centred_for_shifted_gaussian() {
        let h = RadialWeight::shifted_gaussian();
        let rec = lemma51_construct(&h, 2, 1.0, 1e-3).unwrap();
        assert!(rec.p_offcenter < rec.p_centered);
        assert!(rec.relative_margin() > 0.3);
        // the radius comparison misses by about R/3 for small d, while the
        // perimeter comparison keeps a wide margin
        assert!(!rec.radius_bound_holds());
        assert!(
            (rec.radius_bound.0 / rec.radius_bound.1 - 1.0 - rec.r_d / 3.0).abs() < 0.1 * rec.r_d
        );
        assert!(rec.chain[0].strict && rec.chain[2].strict, "{rec:?}");
        assert_relative_eq!(rec.chain[3].lhs, rec.p_centered, max_relative = 1e-12);
        assert_relative_eq!(
            h.centered_measure(2, rec.r_d).unwrap(),
            1e-3,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            h.offcenter_measure(2, rec.y_d, rec.rho_d).unwrap(),
            1e-3,
            max_relative = 1e-10
        );
    }

    #[test]
    fn constant_weight_is_neutral() {
        let h = RadialWeight::Power { p: 0.0 };
        let rec = lemma51_construct(&h, 3, 1.0, 0.05).unwrap();
        assert_relative_eq!(rec.r_d, rec.rho_d, max_relative = 1e-10);
        assert_relative_eq!(rec.p_offcenter, rec.p_centered, max_relative = 1e-10);
    }

    #[test]
    fn d0_certificate() {
        for h in [
            RadialWeight::shifted_gaussian(),
            RadialWeight::LogconvexPoly {
                coeffs: vec![4.0, -8.0, 4.0],
            },
        ] {
            let res = find_d0(&h, 1.0, 2).unwrap();
            assert!(res.d0 > 0.0);
            assert!(res.certificate.holds());
            if let Some(c) = &res.at_double {
                assert!(!c.holds());
            }
        }
        assert!(find_d0(&RadialWeight::Power { p: 0.0 }, 1.0, 2).is_err());
    }

    #[test]
    fn offcenter_mc_agrees() {
        let h = RadialWeight::shifted_gaussian();
        let q = h.offcenter_measure(2, 0.8, 0.2).unwrap();
        let p = h.offcenter_perimeter(2, 0.8, 0.2).unwrap();
        let mc = offcenter_monte_carlo(&h, 2, 0.8, 0.2, 400_000, 17).unwrap();
        assert!(mc.measure.sigmas_from(q) < 3.0, "{mc:?} {q}");
        assert!(mc.perimeter.sigmas_from(p) < 3.0, "{mc:?} {p}");
    }

    #[test]
    fn vanishing_family_slope() {
        let w = PowerLawPair {
            f_exp: 1.0,
            beta: 1.0,
            c1: 1.0,
            c2: 1.0,
            dim: 2,
        };
        let table = vanishing_family(&w, 1.0, &log_spaced(100.0, 1e4, 10)).unwrap();
        assert!((table.tail_slope + 0.5).abs() < 0.02);
        assert!(table.tail_decreasing && table.gap_increasing);
        assert!(table.decay_factor() < 0.1);
        // leading order R ≈ sqrt(t/π)
        let r = &table.rows[0];
        assert!((r.r_t / (r.t / PI).sqrt() - 1.0).abs() < 0.01);
    }

    #[test]
    fn vanishing_family_hypotheses() {
        let bad = PowerLawPair {
            f_exp: 0.0,
            beta: 0.0,
            c1: 1.0,
            c2: 1.0,
            dim: 2,
        };
        assert!(matches!(
            vanishing_family(&bad, 1.0, &[10.0, 20.0]),
            Err(SweepError::Hypothesis(_))
        ));
        let bad = PowerLawPair {
            f_exp: 0.4,
            beta: 1.0,
            c1: 1.0,
            c2: 1.0,
            dim: 2,
        };
        assert!(bad.check_hypotheses().is_err());
        let edge = PowerLawPair {
            f_exp: 1.5,
            beta: 2.0,
            c1: 1.0,
            c2: 1.0,
            dim: 2,
        };
        let table = vanishing_family(&edge, 1.0, &log_spaced(10.0, 1e3, 8)).unwrap();
        assert!(table.delta_observed > 0.0 && table.delta_observed < 1.0);
    }
}
