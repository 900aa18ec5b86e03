//! Sphere areas, ball volumes and tensor quadrature over spheres.

use std::f64::consts::PI;

use crate::quadrature::{cached_jacobi, jacobi_on, log_gamma, QuadratureError};

/// `|S^d|`, the area of the unit d-sphere in R^{d+1}.
pub fn sphere_area(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * (h * PI.ln() - log_gamma(h).expect("positive argument")).exp()
}

/// `ω_n`, the volume of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    (h * PI.ln() - log_gamma(h + 1.0).expect("positive argument")).exp()
}

/// `∫_{S^d} g(η_1) dη` with an `n`-point rule in `η_1`.
pub fn integrate_sphere_by_first<G: FnMut(f64) -> f64>(
    d: usize,
    n: usize,
    mut g: G,
) -> Result<f64, QuadratureError> {
    if d == 0 {
        return Ok(g(1.0) + g(-1.0));
    }
    let e = (d as f64 - 2.0) / 2.0;
    let rule = cached_jacobi(n, e, e)?;
    Ok(sphere_area(d - 1) * rule.integrate(g))
}

/// `∫_{S^d} f(η) dη` for general `f`, by recursion on the last coordinate.
/// Cost is `2 n^d` evaluations.
pub fn integrate_sphere<F: FnMut(&[f64]) -> f64>(
    d: usize,
    n: usize,
    mut f: F,
) -> Result<f64, QuadratureError> {
    let mut point = vec![0.0; d + 1];
    sphere_rec(d, n, 1.0, &mut point, &mut f)
}

fn sphere_rec<F: FnMut(&[f64]) -> f64>(
    d: usize,
    n: usize,
    scale: f64,
    point: &mut Vec<f64>,
    f: &mut F,
) -> Result<f64, QuadratureError> {
    // point[0..=d] is filled for the current sub-sphere, scaled by `scale`
    if d == 0 {
        point[0] = scale;
        let a = f(point);
        point[0] = -scale;
        let b = f(point);
        return Ok(a + b);
    }
    let e = (d as f64 - 2.0) / 2.0;
    let rule = cached_jacobi(n, e, e)?;
    let mut total = 0.0;
    for (v, w) in rule.iter() {
        point[d] = scale * v;
        let inner = sphere_rec(d - 1, n, scale * (1.0 - v * v).sqrt(), point, f)?;
        total += w * inner;
    }
    Ok(total)
}

/// `∫_{S_+^{d}} f(ζ) ζ_{d+1}^alpha dσ` over the upper half of `S^d ⊂ R^{d+1}`.
/// The last coordinate carries a Jacobi weight, so `alpha > -1` is exact at
/// the equator.
pub fn integrate_hemisphere<F: FnMut(&[f64]) -> f64>(
    d: usize,
    alpha: f64,
    n: usize,
    mut f: F,
) -> Result<f64, QuadratureError> {
    let e = (d as f64 - 2.0) / 2.0;
    let rule = jacobi_on(n, 0.0, 1.0, alpha, e)?;
    let mut point = vec![0.0; d + 1];
    let mut total = 0.0;
    for (v, w) in rule.iter() {
        let s = (1.0 - v * v).max(0.0).sqrt();
        let inner = integrate_sphere(d - 1, n, |eta| {
            for (p, x) in point.iter_mut().zip(eta) {
                *p = s * x;
            }
            point[d] = v;
            f(&point)
        })?;
        total += w * (1.0 + v).powf(e) * inner;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn areas_and_volumes() {
        assert_relative_eq!(sphere_area(0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(1), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(2), PI, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        for n in 2..8 {
            assert_relative_eq!(
                sphere_area(n - 1),
                n as f64 * ball_volume(n),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn sphere_moments() {
        // ∫_{S^2} x² = 4π/3, ∫_{S^3} x_1² x_4² = |S^3| / (4·6) = 2π²/24
        let v = integrate_sphere(2, 12, |p| p[0] * p[0]).unwrap();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-13);
        let v = integrate_sphere(3, 12, |p| p[0] * p[0] * p[3] * p[3]).unwrap();
        assert_relative_eq!(v, 2.0 * PI * PI / 24.0, max_relative = 1e-13);
        let v = integrate_sphere_by_first(2, 12, |w| w * w).unwrap();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-13);
        let v = integrate_sphere(1, 16, |p| p[0].powi(4)).unwrap();
        assert_relative_eq!(v, 3.0 * PI / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn hemisphere_weights() {
        // half of S^2 with ζ_3^{-1/2}: 2π ∫_0^1 v^{-1/2} dv = 4π
        let v = integrate_hemisphere(2, -0.5, 16, |_| 1.0).unwrap();
        assert_relative_eq!(v, 4.0 * PI, max_relative = 1e-13);
        let v = integrate_hemisphere(1, 0.0, 16, |p| p[0] * p[0]).unwrap();
        assert_relative_eq!(v, PI / 2.0, max_relative = 1e-13);
        let v = integrate_hemisphere(3, 0.0, 16, |_| 1.0).unwrap();
        assert_relative_eq!(v, PI * PI, max_relative = 1e-13);
    }
}
