//! Log-gamma and the derived Beta function.
//!
//! Lanczos approximation with g = 7 and nine coefficients, reflected below
//! x = 1/2. Absolute error of `ln Γ` is a few ulps of `ln Γ` plus ~1e-15.

use std::f64::consts::PI;

use super::QuadratureError;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64, QuadratureError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(QuadratureError::Domain(format!(
            "log_gamma requires a finite x > 0, got {x}"
        )));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    // Γ(1) = Γ(2) = 1 exactly; keep those bit-exact.
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64, QuadratureError> {
    log_gamma(x).map(f64::exp)
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64, QuadratureError> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta(a: f64, b: f64) -> Result<f64, QuadratureError> {
    log_beta(a, b).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorials() {
        let mut fact = 1.0_f64;
        for n in 1..=20u32 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let g = gamma(n as f64).unwrap();
            assert_relative_eq!(g, fact, max_relative = 1e-13);
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(
            log_gamma(0.5).unwrap(),
            0.572_364_942_924_700_1,
            max_relative = 1e-13
        );
        assert_relative_eq!(beta(1.0, 0.25).unwrap(), 4.0, max_relative = 1e-13);
        // Γ(1/4) = 3.625609908221908...
        assert_relative_eq!(
            gamma(0.25).unwrap(),
            3.625_609_908_221_908,
            max_relative = 1e-13
        );
    }

    #[test]
    fn range_relative_accuracy() {
        // ln Γ(x+1) = ln Γ(x) + ln x over the working range, away from the roots at 1 and 2
        let mut x = 1e-3;
        while x < 1e3 {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            let scale = lhs.abs().max(1.0);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * scale,
                "x = {x}: {lhs} vs {rhs}"
            );
            x *= 1.37;
        }
        // Stirling at large argument
        let x = 1000.0_f64;
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        assert_relative_eq!(log_gamma(x).unwrap(), stirling, max_relative = 1e-14);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }
}
