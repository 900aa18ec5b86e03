//! Weighted measure, relative perimeter and isoperimetric ratio of trial
//! domains in the half-space, plus the divergence identity used for the
//! radial-minimizer case `k = l + 1`.
//!
//! Half-ball quantities come from Beta-function closed forms. Off-centre
//! balls are reduced by axial symmetry to two- or three-dimensional tensor
//! rules; every algebraic factor that vanishes or blows up at an endpoint is
//! absorbed into a Gauss–Jacobi weight, so `x_N^alpha` is never sampled at
//! `x_N = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{AdmissibilityError, WeightParams};
use crate::quadrature::{
    beta, cached_jacobi, jacobi_on, mc_integrate, refine_until, BoxDomain, IntegralEstimate,
    McEstimate, QuadratureError,
};
use crate::sphere::{integrate_hemisphere, integrate_sphere_by_first, sphere_area};

/// Relative tolerance used for off-centre domains unless stated otherwise.
pub const DEFAULT_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TrialDomain {
    /// `B_R ∩ {x_N > 0}`.
    HalfBall { radius: f64 },
    /// Ball of the given radius centred at `t e_N`, `t > radius`.
    UpAxisBall { t: f64, radius: f64 },
    /// Ball centred at `t e_1` on the wall `{x_N = 0}`, intersected with the half-space.
    OnWallBall { t: f64, radius: f64 },
    /// Full ball `B_R`, symmetric about the wall.
    DoubledHalfBall { radius: f64 },
    /// Full ellipsoid `Σ (x_i / a_i)² < 1`, one semiaxis per coordinate.
    DoubledHalfEllipsoid { semiaxes: Vec<f64> },
}

impl TrialDomain {
    pub fn up_axis(t: f64) -> Self {
        TrialDomain::UpAxisBall { t, radius: 1.0 }
    }

    pub fn on_wall(t: f64) -> Self {
        TrialDomain::OnWallBall { t, radius: 1.0 }
    }

    fn check(&self, dim: usize) -> Result<(), GeometryError> {
        let bad = |msg: String| Err(GeometryError::Domain(msg));
        match self {
            TrialDomain::HalfBall { radius } | TrialDomain::DoubledHalfBall { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad(format!("radius must be positive, got {radius}"));
                }
            }
            TrialDomain::UpAxisBall { t, radius } => {
                if !(*radius > 0.0) || !(t - radius > 0.0) || !t.is_finite() {
                    return bad(format!(
                        "up-axis ball needs 0 < radius < t, got t = {t}, radius = {radius}"
                    ));
                }
            }
            TrialDomain::OnWallBall { t, radius } => {
                if !(*radius > 0.0) || !(*t > *radius) || !t.is_finite() {
                    return bad(format!(
                        "on-wall ball needs 0 < radius < t, got t = {t}, radius = {radius}"
                    ));
                }
            }
            TrialDomain::DoubledHalfEllipsoid { semiaxes } => {
                if semiaxes.len() != dim {
                    return bad(format!(
                        "ellipsoid needs {dim} semiaxes, got {}",
                        semiaxes.len()
                    ));
                }
                if semiaxes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                    return bad("semiaxes must be positive".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("domain has zero weighted measure")]
    ZeroMeasure,
    #[error("divergence identity requires k = l + 1, got k = {k}, l = {l}")]
    NotRadialCase { k: f64, l: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedGeometryResult {
    pub measure: IntegralEstimate,
    pub perimeter: IntegralEstimate,
    pub ratio: f64,
}

/// `∫_0^1 u^alpha (1-u²)^{(N-3)/2} du`, the one-dimensional integral behind
/// `σ_α`, with the singular factors in the Jacobi weight.
fn hemisphere_profile_integral(dim: usize, alpha: f64, n: usize) -> Result<f64, QuadratureError> {
    let e = (dim as f64 - 3.0) / 2.0;
    let rule = jacobi_on(n, 0.0, 1.0, alpha, e)?;
    Ok(rule.integrate(|u| (1.0 + u).powf(e)))
}

/// Weighted area `σ_α(S_+^{N-1}) = ∫ ζ_N^alpha dσ` by Gauss–Jacobi quadrature.
pub fn sigma_alpha(dim: usize, alpha: f64) -> Result<f64, GeometryError> {
    if dim < 2 || !(alpha > -1.0) {
        return Err(GeometryError::Domain(format!(
            "sigma_alpha needs N >= 2 and alpha > -1, got N = {dim}, alpha = {alpha}"
        )));
    }
    Ok(sphere_area(dim - 2) * hemisphere_profile_integral(dim, alpha, 64)?)
}

/// `|S^{N-2}| · B((N-1)/2, (alpha+1)/2) / 2`.
pub fn sigma_alpha_closed_form(dim: usize, alpha: f64) -> Result<f64, GeometryError> {
    if dim < 2 || !(alpha > -1.0) {
        return Err(GeometryError::Domain(format!(
            "sigma_alpha needs N >= 2 and alpha > -1, got N = {dim}, alpha = {alpha}"
        )));
    }
    Ok(sphere_area(dim - 2) * 0.5 * beta((dim as f64 - 1.0) / 2.0, (alpha + 1.0) / 2.0)?)
}

pub fn measure_half_ball(params: &WeightParams, radius: f64) -> Result<f64, GeometryError> {
    params.validate()?;
    TrialDomain::HalfBall { radius }.check(params.dim)?;
    let md = params.measure_degree();
    Ok(radius.powf(md) * sigma_alpha_closed_form(params.dim, params.alpha)? / md)
}

/// Spherical part only; the flat face on the wall carries no relative perimeter.
pub fn perimeter_half_ball(params: &WeightParams, radius: f64) -> Result<f64, GeometryError> {
    params.validate()?;
    TrialDomain::HalfBall { radius }.check(params.dim)?;
    Ok(radius.powf(params.perimeter_degree()) * sigma_alpha_closed_form(params.dim, params.alpha)?)
}

/// `∫_{B_ρ(c e)} f(|x|, x·e) dx` for a ball whose centre lies at distance
/// `c` along a unit axis `e`; `f` sees the norm and the axial coordinate.
pub(crate) fn axial_ball_integral<F>(
    dim: usize,
    c: f64,
    rho: f64,
    rel_tol: f64,
    f: F,
) -> Result<IntegralEstimate, QuadratureError>
where
    F: Fn(f64, f64) -> f64,
{
    let e = (dim as f64 - 3.0) / 2.0;
    let area = sphere_area(dim - 2);
    refine_until(16, rel_tol, |n| {
        let rr = jacobi_on(n, 0.0, rho, dim as f64 - 1.0, 0.0)?;
        let rv = cached_jacobi(n, e, e)?;
        let mut total = 0.0;
        for (r, wr) in rr.iter() {
            let mut inner = 0.0;
            for (v, wv) in rv.iter() {
                let axial = c + r * v;
                let norm = (c * c + 2.0 * c * r * v + r * r).max(0.0).sqrt();
                inner += wv * f(norm, axial);
            }
            total += wr * inner;
        }
        Ok((area * total, n * n))
    })
}

/// `∫_{∂B_ρ(c e)} f(|x|, x·e) dH`.
pub(crate) fn axial_sphere_integral<F>(
    dim: usize,
    c: f64,
    rho: f64,
    rel_tol: f64,
    f: F,
) -> Result<IntegralEstimate, QuadratureError>
where
    F: Fn(f64, f64) -> f64,
{
    let e = (dim as f64 - 3.0) / 2.0;
    let scale = sphere_area(dim - 2) * rho.powi(dim as i32 - 1);
    refine_until(16, rel_tol, |n| {
        let rv = cached_jacobi(n, e, e)?;
        let val = rv.integrate(|v| {
            let norm = (c * c + 2.0 * c * rho * v + rho * rho).max(0.0).sqrt();
            f(norm, c + rho * v)
        });
        Ok((scale * val, n))
    })
}

/// Integral over the upper half of the sphere of radius `r` about `t e_1`
/// (the part with `x_N > 0`) of `|x|^p x_N^alpha`, without the `r^{N-1}`
/// area factor and without `r^alpha`.
fn on_wall_angular(
    dim: usize,
    t: f64,
    r: f64,
    p: f64,
    alpha: f64,
    n: usize,
) -> Result<f64, QuadratureError> {
    let e = (dim as f64 - 3.0) / 2.0;
    let rv = jacobi_on(n, 0.0, 1.0, alpha, e)?;
    let mut total = 0.0;
    for (v, wv) in rv.iter() {
        let s = (1.0 - v * v).max(0.0).sqrt();
        let inner = integrate_sphere_by_first(dim - 2, n, |w| {
            let sq = t * t + 2.0 * t * r * s * w + r * r;
            sq.powf(0.5 * p)
        })?;
        total += wv * (1.0 + v).powf(e) * inner;
    }
    Ok(total)
}

fn on_wall_measure(
    params: &WeightParams,
    t: f64,
    rho: f64,
    rel_tol: f64,
) -> Result<IntegralEstimate, QuadratureError> {
    let dim = params.dim;
    let alpha = params.alpha;
    refine_until(16, rel_tol, |n| {
        let rr = jacobi_on(n, 0.0, rho, dim as f64 - 1.0 + alpha, 0.0)?;
        let mut total = 0.0;
        for (r, wr) in rr.iter() {
            total += wr * on_wall_angular(dim, t, r, params.l, alpha, n)?;
        }
        let evals = if dim == 2 { 2 * n * n } else { n * n * n };
        Ok((total, evals))
    })
}

fn on_wall_perimeter(
    params: &WeightParams,
    t: f64,
    rho: f64,
    rel_tol: f64,
) -> Result<IntegralEstimate, QuadratureError> {
    let dim = params.dim;
    refine_until(16, rel_tol, |n| {
        let val = on_wall_angular(dim, t, rho, params.k, params.alpha, n)?;
        Ok((rho.powf(dim as f64 - 1.0 + params.alpha) * val, n * n))
    })
}

/// `∫_Ω |x|^l x_N^alpha dx` for a ball domain. Half-balls use the closed form.
pub fn measure_ball(
    params: &WeightParams,
    domain: &TrialDomain,
) -> Result<IntegralEstimate, GeometryError> {
    measure_ball_tol(params, domain, DEFAULT_REL_TOL)
}

pub fn measure_ball_tol(
    params: &WeightParams,
    domain: &TrialDomain,
    rel_tol: f64,
) -> Result<IntegralEstimate, GeometryError> {
    params.validate()?;
    domain.check(params.dim)?;
    let WeightParams { dim, l, alpha, .. } = *params;
    match *domain {
        TrialDomain::HalfBall { radius } => {
            Ok(IntegralEstimate::exact(measure_half_ball(params, radius)?))
        }
        TrialDomain::UpAxisBall { t, radius } => {
            Ok(axial_ball_integral(dim, t, radius, rel_tol, |norm, xn| {
                norm.powf(l) * xn.powf(alpha)
            })?)
        }
        TrialDomain::OnWallBall { t, radius } => Ok(on_wall_measure(params, t, radius, rel_tol)?),
        _ => Err(GeometryError::Domain(
            "measure_ball accepts half-ball, up-axis and on-wall domains".into(),
        )),
    }
}

/// `∫_{∂Ω ∩ {x_N > 0}} |x|^k x_N^alpha dH`; faces lying in the wall are excluded.
pub fn perimeter_ball(
    params: &WeightParams,
    domain: &TrialDomain,
) -> Result<IntegralEstimate, GeometryError> {
    perimeter_ball_tol(params, domain, DEFAULT_REL_TOL)
}

pub fn perimeter_ball_tol(
    params: &WeightParams,
    domain: &TrialDomain,
    rel_tol: f64,
) -> Result<IntegralEstimate, GeometryError> {
    params.validate()?;
    domain.check(params.dim)?;
    let WeightParams { dim, k, alpha, .. } = *params;
    match *domain {
        TrialDomain::HalfBall { radius } => Ok(IntegralEstimate::exact(perimeter_half_ball(
            params, radius,
        )?)),
        TrialDomain::UpAxisBall { t, radius } => Ok(axial_sphere_integral(
            dim,
            t,
            radius,
            rel_tol,
            |norm, xn| norm.powf(k) * xn.powf(alpha),
        )?),
        TrialDomain::OnWallBall { t, radius } => Ok(on_wall_perimeter(params, t, radius, rel_tol)?),
        _ => Err(GeometryError::Domain(
            "perimeter_ball accepts half-ball, up-axis and on-wall domains".into(),
        )),
    }
}

/// Isoperimetric ratio `P / μ^{(k+N+α-1)/(l+N+α)}` together with its parts.
pub fn evaluate(
    params: &WeightParams,
    domain: &TrialDomain,
) -> Result<WeightedGeometryResult, GeometryError> {
    let measure = measure_ball(params, domain)?;
    let perimeter = perimeter_ball(params, domain)?;
    if !(measure.value > 0.0) {
        return Err(GeometryError::ZeroMeasure);
    }
    Ok(WeightedGeometryResult {
        measure,
        perimeter,
        ratio: perimeter.value / measure.value.powf(params.ratio_exponent()),
    })
}

pub fn ratio(params: &WeightParams, domain: &TrialDomain) -> Result<f64, GeometryError> {
    evaluate(params, domain).map(|r| r.ratio)
}

/// Ratio of the unit half-ball from the closed forms:
/// `σ_α^{1-e} (l+N+α)^e` with `e = (k+N+α-1)/(l+N+α)`.
pub fn c_rad(params: &WeightParams) -> Result<f64, GeometryError> {
    params.validate()?;
    let sigma = sigma_alpha_closed_form(params.dim, params.alpha)?;
    let e = params.ratio_exponent();
    Ok(sigma.powf(1.0 - e) * params.measure_degree().powf(e))
}

/// Radius of the centred half-ball with weighted measure `m`.
pub fn radius_for_measure(params: &WeightParams, m: f64) -> Result<f64, GeometryError> {
    params.validate()?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(GeometryError::Domain(format!(
            "measure must be positive, got {m}"
        )));
    }
    let md = params.measure_degree();
    let sigma = sigma_alpha_closed_form(params.dim, params.alpha)?;
    Ok((m * md / sigma).powf(1.0 / md))
}

/// The three members of the divergence-theorem chain for a domain symmetric
/// about the wall, all with the weight `|x|^l |x_N|^alpha`:
/// `lhs = (l+N+α) ∫_Ω w`, `mid = ∫_∂Ω w (x·ν)`, `rhs = ∫_∂Ω |x| w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceCheck {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
}

impl DivergenceCheck {
    pub fn lhs_mid_rel(&self) -> f64 {
        (self.lhs - self.mid).abs() / self.mid.abs()
    }

    pub fn mid_rhs_rel(&self) -> f64 {
        (self.mid - self.rhs).abs() / self.rhs.abs()
    }

    /// `(rhs - mid) / rhs`; positive when the inequality is strict.
    pub fn strict_margin(&self) -> f64 {
        (self.rhs - self.mid) / self.rhs
    }
}

/// Nodes per sphere dimension for [`divergence_check`].
const DIVERGENCE_NODES: usize = 48;

/// Volume integral in polar coordinates about the origin (radial part by a
/// Jacobi rule, boundary `ρ(θ) = 1/|A^{-1}θ|`); the two surface integrals via
/// the ellipsoid parametrization `x = Aξ`, where `(x·ν) dH = det A dξ` and
/// `dH = det A |A^{-1}ξ| dξ`.
pub fn divergence_check(
    params: &WeightParams,
    domain: &TrialDomain,
) -> Result<DivergenceCheck, GeometryError> {
    params.validate()?;
    domain.check(params.dim)?;
    if params.k != params.l + 1.0 {
        return Err(GeometryError::NotRadialCase {
            k: params.k,
            l: params.l,
        });
    }
    let dim = params.dim;
    let semiaxes = match domain {
        TrialDomain::DoubledHalfBall { radius } => vec![*radius; dim],
        TrialDomain::DoubledHalfEllipsoid { semiaxes } => semiaxes.clone(),
        _ => {
            return Err(GeometryError::Domain(
                "divergence_check needs a domain symmetric about the wall".into(),
            ))
        }
    };
    let WeightParams { l, alpha, .. } = *params;
    let md = params.measure_degree();
    let det: f64 = semiaxes.iter().product();
    let a_n = semiaxes[dim - 1];
    let n = DIVERGENCE_NODES;

    let norm_a = |xi: &[f64]| {
        xi.iter()
            .zip(&semiaxes)
            .map(|(x, a)| (a * x).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let norm_ainv = |xi: &[f64]| {
        xi.iter()
            .zip(&semiaxes)
            .map(|(x, a)| (x / a).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    // both halves of the boundary contribute equally
    let upper = |f: &mut dyn FnMut(&[f64]) -> f64| -> Result<f64, QuadratureError> {
        Ok(2.0 * integrate_hemisphere(dim - 1, alpha, n, |xi| f(xi))?)
    };

    let lhs = {
        let mut f = |theta: &[f64]| {
            let rho = 1.0 / norm_ainv(theta);
            jacobi_on(n, 0.0, rho, l + alpha + dim as f64 - 1.0, 0.0)
                .map(|r| r.integrate(|_| 1.0))
                .unwrap_or(f64::NAN)
        };
        md * upper(&mut f)?
    };
    let mid = {
        let mut f = |xi: &[f64]| norm_a(xi).powf(l) * a_n.powf(alpha) * det;
        upper(&mut f)?
    };
    let rhs = {
        let mut f = |xi: &[f64]| norm_a(xi).powf(l + 1.0) * a_n.powf(alpha) * det * norm_ainv(xi);
        upper(&mut f)?
    };
    if !(lhs.is_finite() && mid.is_finite() && rhs.is_finite()) {
        return Err(QuadratureError::NonFiniteSample { x: f64::NAN }.into());
    }
    Ok(DivergenceCheck { lhs, mid, rhs })
}

/// Monte Carlo estimate of `∫_Ω |x|^l x_N^alpha dx` for a ball domain.
///
/// Samples in the variables `(x_1, …, x_{N-1}, s)` with `s = x_N^{1+α}`, so
/// that `x_N^α dx_N = ds / (1+α)` and the estimator has finite variance even
/// when the domain touches the wall. Shares no code path with the
/// quadrature routines above.
pub fn mc_measure(
    params: &WeightParams,
    domain: &TrialDomain,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, GeometryError> {
    params.validate()?;
    domain.check(params.dim)?;
    let dim = params.dim;
    let (center_axis, center_n, radius) = match *domain {
        TrialDomain::HalfBall { radius } => (0.0, 0.0, radius),
        TrialDomain::UpAxisBall { t, radius } => (0.0, t, radius),
        TrialDomain::OnWallBall { t, radius } => (t, 0.0, radius),
        _ => {
            return Err(GeometryError::Domain(
                "mc_measure accepts ball domains in the half-space".into(),
            ))
        }
    };
    let a1 = 1.0 + params.alpha;
    let xn_lo = (center_n - radius).max(0.0);
    let xn_hi = center_n + radius;
    let mut lower = vec![-radius; dim];
    let mut upper = vec![radius; dim];
    lower[0] += center_axis;
    upper[0] += center_axis;
    lower[dim - 1] = xn_lo.powf(a1);
    upper[dim - 1] = xn_hi.powf(a1);
    let bx = BoxDomain::new(lower, upper);
    let to_x = |s: &[f64], x: &mut [f64]| {
        x.copy_from_slice(s);
        x[dim - 1] = s[dim - 1].max(0.0).powf(1.0 / a1);
    };
    let l = params.l;
    let inside = move |s: &[f64]| {
        let mut x = [0.0f64; 16];
        let x = &mut x[..dim];
        to_x(s, x);
        let mut d2 = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let c = if i == 0 {
                center_axis
            } else if i == dim - 1 {
                center_n
            } else {
                0.0
            };
            d2 += (xi - c).powi(2);
        }
        d2 < radius * radius && x[dim - 1] > 0.0
    };
    let weight = move |s: &[f64]| {
        let mut x = [0.0f64; 16];
        let x = &mut x[..dim];
        to_x(s, x);
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        norm2.powf(0.5 * l) / a1
    };
    if dim > 16 {
        return Err(GeometryError::Domain("mc_measure supports N <= 16".into()));
    }
    Ok(mc_integrate(inside, weight, &bx, samples, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn p(dim: usize, k: f64, l: f64, alpha: f64) -> WeightParams {
        WeightParams::new(dim, k, l, alpha)
    }

    #[test]
    fn sigma_alpha_values() {
        assert_relative_eq!(sigma_alpha(3, 0.0).unwrap(), 2.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(
            sigma_alpha(3, -0.5).unwrap(),
            4.0 * PI,
            max_relative = 1e-13
        );
        let s = sigma_alpha(2, -0.5).unwrap();
        assert_relative_eq!(s, beta(0.5, 0.25).unwrap(), max_relative = 1e-12);
        assert!((s - 5.244_115_1).abs() < 1e-6);
        for dim in 2..8 {
            for &a in &[-0.95, -0.5, -0.1, 0.0, 0.7, 2.5] {
                assert_relative_eq!(
                    sigma_alpha(dim, a).unwrap(),
                    sigma_alpha_closed_form(dim, a).unwrap(),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn half_ball_closed_forms() {
        assert_relative_eq!(
            measure_half_ball(&p(3, 0.0, 0.0, 0.0), 1.0).unwrap(),
            2.0 * PI / 3.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            measure_half_ball(&p(3, 0.0, 0.0, -0.5), 1.0).unwrap(),
            4.0 * PI / 2.5,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            measure_half_ball(&p(3, 0.0, 0.0, -0.5), 2.0).unwrap(),
            2f64.powf(2.5) * 4.0 * PI / 2.5,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            perimeter_half_ball(&p(3, 0.0, 0.0, 0.0), 1.0).unwrap(),
            2.0 * PI,
            max_relative = 1e-13
        );
        let s = sigma_alpha_closed_form(2, -0.5).unwrap();
        assert_relative_eq!(
            perimeter_half_ball(&p(2, 0.0, 0.0, -0.5), 1.0).unwrap(),
            s,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            perimeter_half_ball(&p(2, 0.0, 0.0, -0.5), 4.0).unwrap(),
            2.0 * s,
            max_relative = 1e-13
        );
    }

    #[test]
    fn ratio_and_c_rad() {
        let q = p(3, 0.0, 0.0, 0.0);
        let expect = 2.0 * PI / (2.0 * PI / 3.0f64).powf(2.0 / 3.0);
        assert_relative_eq!(
            ratio(&q, &TrialDomain::HalfBall { radius: 1.0 }).unwrap(),
            expect,
            max_relative = 1e-12
        );
        assert!((expect - 3.838_316_585).abs() < 1e-8);
        assert_relative_eq!(c_rad(&q).unwrap(), expect, max_relative = 1e-12);
        // exponent 1 when k = l + 1
        let q = p(3, 1.0, 0.0, -0.5);
        assert_relative_eq!(c_rad(&q).unwrap(), q.measure_degree(), max_relative = 1e-13);
    }

    #[test]
    fn radius_inversion() {
        let q = p(3, 0.0, 0.0, 0.0);
        assert_relative_eq!(
            radius_for_measure(&q, 2.0 * PI / 3.0).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        let q = p(4, 0.3, -0.7, -0.4);
        let m = measure_half_ball(&q, 1.0).unwrap();
        assert_relative_eq!(
            radius_for_measure(&q, m).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        let r2 = radius_for_measure(&q, 2.0 * m).unwrap();
        assert_relative_eq!(
            r2,
            2f64.powf(1.0 / q.measure_degree()),
            max_relative = 1e-13
        );
        assert!(radius_for_measure(&q, 0.0).is_err());
    }

    #[test]
    fn unweighted_balls() {
        for dim in 2..=4 {
            let q = p(dim, 0.0, 0.0, 0.0);
            for &t in &[1.5, 3.0, 40.0] {
                let m = measure_ball(&q, &TrialDomain::up_axis(t)).unwrap();
                assert_relative_eq!(
                    m.value,
                    crate::sphere::ball_volume(dim),
                    max_relative = 1e-10
                );
                let per = perimeter_ball(&q, &TrialDomain::up_axis(t)).unwrap();
                assert_relative_eq!(
                    per.value,
                    dim as f64 * crate::sphere::ball_volume(dim),
                    max_relative = 1e-10
                );
                let per = perimeter_ball(&q, &TrialDomain::on_wall(t)).unwrap();
                assert_relative_eq!(
                    per.value,
                    0.5 * dim as f64 * crate::sphere::ball_volume(dim),
                    max_relative = 1e-10
                );
            }
        }
        let per = perimeter_ball(&p(2, 0.0, 0.0, 0.0), &TrialDomain::on_wall(7.0)).unwrap();
        assert_relative_eq!(per.value, PI, max_relative = 1e-12);
    }

    #[test]
    fn far_up_axis_asymptotics() {
        let q = p(2, 0.0, 0.0, -0.5);
        let t: f64 = 1e3;
        let m = measure_ball(&q, &TrialDomain::up_axis(t)).unwrap();
        assert!((m.value / (PI * t.powf(-0.5)) - 1.0).abs() < 2e-3);
        let per = perimeter_ball(&q, &TrialDomain::up_axis(t)).unwrap();
        assert!((per.value / (2.0 * PI * t.powf(-0.5)) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn half_ball_homogeneity_via_measure_ball() {
        let q = p(3, 0.4, -0.3, -0.6);
        let base = ratio(&q, &TrialDomain::HalfBall { radius: 1.0 }).unwrap();
        for &r in &[0.5, 2.0, 10.0] {
            let v = ratio(&q, &TrialDomain::HalfBall { radius: r }).unwrap();
            assert!(((v - base) / base).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_ball_equalities() {
        for &(dim, l, alpha, r) in &[
            (2, 0.0, -0.5, 1.0),
            (3, -0.4, -0.3, 2.0),
            (2, 1.0, 0.0, 0.7),
            (4, 0.5, -0.8, 1.3),
        ] {
            let q = p(dim, l + 1.0, l, alpha);
            let c = divergence_check(&q, &TrialDomain::DoubledHalfBall { radius: r }).unwrap();
            assert!(c.lhs_mid_rel() < 1e-10, "{c:?}");
            assert!(c.mid_rhs_rel() < 1e-10, "{c:?}");
            // closed form: 2 R^{l+N+α} σ_α
            let expect =
                2.0 * r.powf(q.measure_degree()) * sigma_alpha_closed_form(dim, alpha).unwrap();
            assert_relative_eq!(c.mid, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn divergence_ellipse_strict() {
        let q = p(2, 1.0, 0.0, -0.5);
        let c = divergence_check(
            &q,
            &TrialDomain::DoubledHalfEllipsoid {
                semiaxes: vec![1.0, 2.0],
            },
        )
        .unwrap();
        assert!(c.lhs_mid_rel() < 1e-8, "{c:?}");
        assert!(c.strict_margin() > 1e-3, "{c:?}");
        let q3 = p(3, 0.5, -0.5, -0.3);
        let c = divergence_check(
            &q3,
            &TrialDomain::DoubledHalfEllipsoid {
                semiaxes: vec![1.0, 1.5, 0.8],
            },
        )
        .unwrap();
        assert!(c.lhs_mid_rel() < 1e-8, "{c:?}");
        assert!(c.strict_margin() > 0.0);
    }

    #[test]
    fn divergence_rejects_non_radial_case() {
        let q = p(2, 0.0, 0.0, -0.5);
        assert!(matches!(
            divergence_check(&q, &TrialDomain::DoubledHalfBall { radius: 1.0 }),
            Err(GeometryError::NotRadialCase { .. })
        ));
    }

    #[test]
    fn half_disk_monte_carlo() {
        let q = p(2, 0.0, 0.0, -0.5);
        let exact = measure_half_ball(&q, 1.0).unwrap();
        let mc = mc_measure(&q, &TrialDomain::HalfBall { radius: 1.0 }, 2_000_000, 11).unwrap();
        assert!(mc.sigmas_from(exact) < 3.0, "{mc:?} vs {exact}");
    }

    #[test]
    fn on_wall_monte_carlo() {
        let q = p(2, 0.0, 0.0, -0.5);
        let d = TrialDomain::on_wall(10.0);
        let quad = measure_ball(&q, &d).unwrap();
        let mc = mc_measure(&q, &d, 2_000_000, 5).unwrap();
        assert!(mc.sigmas_from(quad.value) < 3.0, "{mc:?} vs {quad:?}");
    }

    #[test]
    fn rejects_bad_domains() {
        let q = p(2, 0.0, 0.0, -0.5);
        assert!(measure_ball(&q, &TrialDomain::up_axis(0.5)).is_err());
        assert!(measure_ball(&q, &TrialDomain::on_wall(1.0)).is_err());
        assert!(ratio(&q, &TrialDomain::DoubledHalfBall { radius: 1.0 }).is_err());
        assert!(measure_ball(&p(2, 0.0, 0.0, -1.0), &TrialDomain::up_axis(2.0)).is_err());
    }
}
