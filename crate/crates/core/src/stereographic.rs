//! Stereographic coordinates on the upper half-sphere.
//!
//! Projection from the south pole maps `S_+^{N-1}` onto the closed unit ball
//! `B_1 ⊂ R^{N-1}`; the north pole goes to the origin and the equator to the
//! unit sphere. The round metric pulls back to `(2/(1+|y|²))² δ_ij`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::{jacobi_on, refine_until, QuadratureError};
use crate::sphere::sphere_area;

/// Tolerance for the unit-norm and membership invariants.
const NORM_TOL: f64 = 1e-12;
/// Finite-difference step used by [`gradient_pullback_check`].
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StereoError {
    #[error("not a point of the closed upper half-sphere: {0}")]
    NotOnHemisphere(String),
    #[error("not a point of the closed unit ball: |y| = {0}")]
    OutsideBall(f64),
    #[error("density is infinite on the boundary for alpha = {0} < 0")]
    InfiniteDensity(f64),
    #[error("point too close to the boundary for finite differences: |y| = {0}")]
    StepUnderflow(f64),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePoint {
    pub zeta: Vec<f64>,
}

impl SpherePoint {
    pub fn new(zeta: Vec<f64>) -> Result<Self, StereoError> {
        let norm = zeta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let last = *zeta
            .last()
            .ok_or_else(|| StereoError::NotOnHemisphere("empty point".into()))?;
        if zeta.len() < 2 || (norm - 1.0).abs() > NORM_TOL || last < -NORM_TOL {
            return Err(StereoError::NotOnHemisphere(format!(
                "|ζ| = {norm}, ζ_N = {last}"
            )));
        }
        Ok(Self { zeta })
    }

    pub fn north_pole(dim: usize) -> Self {
        let mut zeta = vec![0.0; dim];
        zeta[dim - 1] = 1.0;
        Self { zeta }
    }

    pub fn dim(&self) -> usize {
        self.zeta.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskPoint {
    pub y: Vec<f64>,
}

impl DiskPoint {
    pub fn new(y: Vec<f64>) -> Result<Self, StereoError> {
        let r = norm(&y);
        if y.is_empty() || r > 1.0 + NORM_TOL {
            return Err(StereoError::OutsideBall(r));
        }
        Ok(Self { y })
    }

    pub fn radius(&self) -> f64 {
        norm(&self.y)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `y_i = ζ_i / (1 + ζ_N)`.
pub fn to_disk(p: &SpherePoint) -> DiskPoint {
    let n = p.dim();
    let denom = 1.0 + p.zeta[n - 1];
    DiskPoint {
        y: p.zeta[..n - 1].iter().map(|z| z / denom).collect(),
    }
}

/// `ζ_i = 2 y_i / (|y|² + 1)`, `ζ_N = (1 - |y|²) / (|y|² + 1)`.
pub fn from_disk(p: &DiskPoint) -> SpherePoint {
    let r2: f64 = p.y.iter().map(|v| v * v).sum();
    let denom = r2 + 1.0;
    let mut zeta: Vec<f64> = p.y.iter().map(|v| 2.0 * v / denom).collect();
    zeta.push((1.0 - r2) / denom);
    SpherePoint { zeta }
}

fn density_radial(r: f64, dim: usize, alpha: f64) -> f64 {
    let r2 = r * r;
    ((1.0 - r2) / (r2 + 1.0)).powf(alpha) * (2.0 / (r2 + 1.0)).powi(dim as i32 - 1)
}

/// Density of `dσ_α` with respect to Lebesgue measure on `B_1`.
pub fn sigma_alpha_density(y: &DiskPoint, dim: usize, alpha: f64) -> Result<f64, StereoError> {
    check_params(dim, alpha)?;
    if y.y.len() != dim - 1 {
        return Err(StereoError::Parameters(format!(
            "point has {} coordinates, expected {}",
            y.y.len(),
            dim - 1
        )));
    }
    let r = y.radius();
    if r >= 1.0 && alpha < 0.0 {
        return Err(StereoError::InfiniteDensity(alpha));
    }
    Ok(density_radial(r.min(1.0), dim, alpha))
}

fn check_params(dim: usize, alpha: f64) -> Result<(), StereoError> {
    if dim < 2 || !(alpha > -1.0) || !alpha.is_finite() {
        return Err(StereoError::Parameters(format!(
            "need N >= 2 and alpha > -1, got N = {dim}, alpha = {alpha}"
        )));
    }
    Ok(())
}

/// `∫_{B_1} density dy` in polar coordinates; `(1-r)^α` and `r^{N-2}` sit in
/// the Jacobi weight of the radial rule.
pub fn sigma_alpha_stereographic(dim: usize, alpha: f64) -> Result<f64, StereoError> {
    check_params(dim, alpha)?;
    let est = refine_until(16, 1e-13, |n| {
        let rule = jacobi_on(n, 0.0, 1.0, dim as f64 - 2.0, alpha)?;
        let v = rule.integrate(|r| {
            let r2 = r * r;
            ((1.0 + r) / (r2 + 1.0)).powf(alpha) * (2.0 / (r2 + 1.0)).powi(dim as i32 - 1)
        });
        Ok((v, n))
    })?;
    Ok(sphere_area(dim - 2) * est.value)
}

/// Both sides of the gradient pullback identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PullbackCheck {
    /// `|∇_S u(ζ)|` by central differences along great circles.
    pub lhs: f64,
    /// `|∇û(y)| (|y|² + 1) / 2`.
    pub rhs: f64,
}

impl PullbackCheck {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Orthonormal basis of the tangent plane at `zeta`: coordinate directions
/// projected onto the plane, Gram–Schmidt in index order, near-dependent
/// directions skipped.
pub fn tangent_frame(zeta: &[f64]) -> Vec<Vec<f64>> {
    let n = zeta.len();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        if frame.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for b in std::iter::once(zeta).chain(frame.iter().map(|f| f.as_slice())) {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            v.iter_mut().zip(b).for_each(|(a, c)| *a -= dot * c);
        }
        let len = norm(&v);
        if len > 1e-6 {
            v.iter_mut().for_each(|a| *a /= len);
            frame.push(v);
        }
    }
    frame
}

/// Compares the spherical gradient of `u = û ∘ S` at `ζ = S^{-1}(y)` with
/// the Euclidean gradient of `û`. Both are central differences with step
/// [`FD_STEP`].
///
/// Tangent vectors of length one on the sphere have length `(1+|y|²)/2` in
/// `y`, so `|∇_S u| = |∇û| (|y|²+1)/2`.
pub fn gradient_pullback_check<F>(u_hat: F, y: &DiskPoint) -> Result<PullbackCheck, StereoError>
where
    F: Fn(&[f64]) -> f64,
{
    let r = y.radius();
    if r >= 1.0 - 1e-3 {
        return Err(StereoError::StepUnderflow(r));
    }
    let h = FD_STEP;
    let zeta = from_disk(y).zeta;
    let n = zeta.len();
    let on_sphere = |z: &[f64]| {
        let d = 1.0 + z[n - 1];
        let yy: Vec<f64> = z[..n - 1].iter().map(|v| v / d).collect();
        u_hat(&yy)
    };
    let mut sq = 0.0;
    let mut moved = vec![0.0; n];
    for tau in tangent_frame(&zeta) {
        let mut step = |s: f64| {
            for i in 0..n {
                moved[i] = s.cos() * zeta[i] + s.sin() * tau[i];
            }
            on_sphere(&moved)
        };
        let d = (step(h) - step(-h)) / (2.0 * h);
        sq += d * d;
    }
    let lhs = sq.sqrt();

    let mut gsq = 0.0;
    let mut yy = y.y.clone();
    for i in 0..yy.len() {
        let y0 = yy[i];
        yy[i] = y0 + h;
        let plus = u_hat(&yy);
        yy[i] = y0 - h;
        let minus = u_hat(&yy);
        yy[i] = y0;
        gsq += ((plus - minus) / (2.0 * h)).powi(2);
    }
    let rhs = gsq.sqrt() * (r * r + 1.0) / 2.0;
    Ok(PullbackCheck { lhs, rhs })
}

/// `2^{N-3} (r+1)^α / (r²+1)^{N-3+α}`: the gradient-term factor.
pub fn c1_expression(r: f64, dim: usize, alpha: f64) -> f64 {
    let n = dim as f64;
    2f64.powf(n - 3.0) * (r + 1.0).powf(alpha) / (r * r + 1.0).powf(n - 3.0 + alpha)
}

/// `2^{N-1} (r+1)^α / (r²+1)^{N-1+α}`: the mass-term factor.
pub fn c2_expression(r: f64, dim: usize, alpha: f64) -> f64 {
    let n = dim as f64;
    2f64.powf(n - 1.0) * (r + 1.0).powf(alpha) / (r * r + 1.0).powf(n - 1.0 + alpha)
}

/// Sampled extrema of the two factors over `B_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEnvelope {
    pub c1_low: f64,
    pub c1_high: f64,
    pub c2_low: f64,
    pub c2_high: f64,
}

impl BoundEnvelope {
    pub fn low(&self) -> f64 {
        self.c1_low.min(self.c2_low)
    }

    pub fn high(&self) -> f64 {
        self.c1_high.max(self.c2_high)
    }

    /// Every value lies in `[C, 1/C]` for this `C ∈ (0, 1]`.
    pub fn constant(&self) -> f64 {
        self.low().min(1.0 / self.high())
    }
}

/// Seed used by [`bound_constants_probe`].
pub const PROBE_SEED: u64 = 0x5eed_c1c2;

/// Extrema of both factors over `samples` uniform points of `B_1 ⊂ R^{N-1}`
/// plus the centre and the boundary.
pub fn bound_constants_probe(
    dim: usize,
    alpha: f64,
    samples: usize,
) -> Result<BoundEnvelope, StereoError> {
    bound_constants_probe_seeded(dim, alpha, samples, PROBE_SEED)
}

pub fn bound_constants_probe_seeded(
    dim: usize,
    alpha: f64,
    samples: usize,
    seed: u64,
) -> Result<BoundEnvelope, StereoError> {
    check_params(dim, alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // both factors depend on |y| only; uniform points in the ball have
    // radius U^{1/(N-1)}
    let radii = [0.0, 1.0].into_iter().chain((0..samples).map(|_| {
        let u: f64 = rng.gen();
        u.powf(1.0 / (dim as f64 - 1.0))
    }));
    let mut env = BoundEnvelope {
        c1_low: f64::INFINITY,
        c1_high: f64::NEG_INFINITY,
        c2_low: f64::INFINITY,
        c2_high: f64::NEG_INFINITY,
    };
    for r in radii {
        let a = c1_expression(r, dim, alpha);
        let b = c2_expression(r, dim, alpha);
        env.c1_low = env.c1_low.min(a);
        env.c1_high = env.c1_high.max(a);
        env.c2_low = env.c2_low.min(b);
        env.c2_high = env.c2_high.max(b);
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sigma_alpha_closed_form;
    use approx::assert_relative_eq;

    #[test]
    fn projection_examples() {
        let y = to_disk(&SpherePoint::north_pole(3));
        assert_eq!(y.y, vec![0.0, 0.0]);
        let y = to_disk(&SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap());
        assert_eq!(y.y, vec![1.0, 0.0]);
        let z = from_disk(&DiskPoint::new(vec![0.5, 0.0]).unwrap());
        assert_relative_eq!(z.zeta[0], 0.8, max_relative = 1e-15);
        assert_relative_eq!(z.zeta[2], 0.6, max_relative = 1e-15);
        let z = from_disk(&DiskPoint::new(vec![0.6, 0.8]).unwrap());
        assert!(z.zeta[2].abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.57..0.57)).collect();
            let p = DiskPoint::new(y.clone()).unwrap();
            let back = to_disk(&from_disk(&p));
            for (a, b) in back.y.iter().zip(&y) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn density_values() {
        let y0 = DiskPoint::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(sigma_alpha_density(&y0, 3, -0.3).unwrap(), 4.0);
        let y = DiskPoint::new(vec![0.5]).unwrap();
        assert_relative_eq!(
            sigma_alpha_density(&y, 2, 0.0).unwrap(),
            1.6,
            max_relative = 1e-15
        );
        let edge = DiskPoint::new(vec![1.0]).unwrap();
        assert!(matches!(
            sigma_alpha_density(&edge, 2, -0.5),
            Err(StereoError::InfiniteDensity(_))
        ));
        assert_eq!(sigma_alpha_density(&edge, 2, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn sigma_matches_spherical_coordinates() {
        for dim in 2..=4 {
            for &a in &[-0.9, -0.5, 0.0, 1.0] {
                let s = sigma_alpha_stereographic(dim, a).unwrap();
                assert_relative_eq!(
                    s,
                    sigma_alpha_closed_form(dim, a).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn pullback_examples() {
        let origin = DiskPoint::new(vec![0.0, 0.0]).unwrap();
        let c = gradient_pullback_check(|_| 3.0, &origin).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        let c = gradient_pullback_check(|y| y[0], &origin).unwrap();
        assert!(c.gap() < 1e-8 && (c.rhs - 0.5).abs() < 1e-12, "{c:?}");
        let c = gradient_pullback_check(|y| y[0] * y[0] + y[1] * y[1], &origin).unwrap();
        assert!(c.lhs < 1e-12 && c.rhs < 1e-12);
        let p = DiskPoint::new(vec![0.3, -0.55]).unwrap();
        let c = gradient_pullback_check(|y| (y[0] * 2.0).sin() + y[1] * y[0].exp(), &p).unwrap();
        assert!(c.gap() < 1e-7, "{c:?}");
        let near = DiskPoint::new(vec![0.9995, 0.0]).unwrap();
        assert!(gradient_pullback_check(|y| y[0], &near).is_err());
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        let z = from_disk(&DiskPoint::new(vec![0.2, 0.1, -0.4]).unwrap()).zeta;
        let f = tangent_frame(&z);
        assert_eq!(f.len(), 3);
        for (i, a) in f.iter().enumerate() {
            assert!(a.iter().zip(&z).map(|(p, q)| p * q).sum::<f64>().abs() < 1e-14);
            for (j, b) in f.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn envelopes() {
        let e = bound_constants_probe(3, 0.0, 1000).unwrap();
        assert_eq!((e.c1_low, e.c1_high), (1.0, 1.0));
        let e = bound_constants_probe(2, -0.5, 100_000).unwrap();
        assert!(e.low() > 0.0 && e.high().is_finite());
        let e2 = bound_constants_probe_seeded(2, -0.5, 400_000, 9).unwrap();
        assert!((e.low() / e2.low() - 1.0).abs() < 0.01);
        assert!((e.high() / e2.high() - 1.0).abs() < 0.01);
        assert!(e.constant() > 0.0 && e.constant() <= 1.0);
    }
}
