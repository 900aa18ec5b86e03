//! Globally adaptive Gauss–Kronrod (7/15) integration with an evaluation budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{IntegralEstimate, QuadratureError};

// published tables, kept at full length
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default evaluation budget for [`adaptive_integrate`].
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFiniteSample { x: c });
    }
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let (x1, x2) = (c - dx, c + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFiniteSample { x: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFiniteSample { x: x2 });
        }
        k += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    Ok(Segment {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    })
}

/// `∫_a^b f` to absolute tolerance `tol`, with the default budget.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(
    f: F,
    interval: (f64, f64),
    tol: f64,
) -> Result<IntegralEstimate, QuadratureError> {
    adaptive_integrate_with_budget(f, interval, tol, DEFAULT_BUDGET)
}

/// Global bisection: always split the segment with the largest Kronrod–Gauss
/// difference until the summed difference is below `tol`. Integrable endpoint
/// singularities are fine since no node sits on an endpoint.
pub fn adaptive_integrate_with_budget<F: FnMut(f64) -> f64>(
    mut f: F,
    interval: (f64, f64),
    tol: f64,
    budget: usize,
) -> Result<IntegralEstimate, QuadratureError> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite()) || !(b > a) {
        return Err(QuadratureError::Domain(format!(
            "adaptive_integrate needs a finite interval a < b, got ({a}, {b})"
        )));
    }
    if !(tol > 0.0) {
        return Err(QuadratureError::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > tol {
        if evaluations + 30 > budget {
            return Err(QuadratureError::BudgetExceeded {
                best: IntegralEstimate {
                    value,
                    error_estimate: error,
                    evaluations,
                },
            });
        }
        let worst = heap.pop().expect("segment heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine resolution
            heap.push(worst);
            break;
        }
        let left = kronrod(&mut f, worst.a, mid)?;
        let right = kronrod(&mut f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // resum occasionally to keep drift out of the running totals
        if evaluations % 3000 == 15 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(IntegralEstimate {
        value,
        error_estimate: error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inverse_sqrt_singularity() {
        let est = adaptive_integrate(|x| x.powf(-0.5), (0.0, 1.0), 1e-8).unwrap();
        assert!((est.value - 2.0).abs() <= 1e-8, "{est:?}");
    }

    #[test]
    fn sine_over_half_period() {
        let est = adaptive_integrate(f64::sin, (0.0, PI), 1e-12).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_singularity() {
        let est = adaptive_integrate(|x| (1.0 / x).ln(), (0.0, 1.0), 1e-10).unwrap();
        assert!((est.value - 1.0).abs() <= 1e-10, "{est:?}");
    }

    #[test]
    fn budget_exceeded_carries_estimate() {
        let err =
            adaptive_integrate_with_budget(|x| x.powf(-0.9), (0.0, 1.0), 1e-14, 200).unwrap_err();
        match err {
            QuadratureError::BudgetExceeded { best } => {
                assert!(best.value > 0.0);
                assert!(best.error_estimate > 0.0);
                assert!(best.evaluations <= 200);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonfinite_sample_reported() {
        let err = adaptive_integrate(|x| if x > 0.5 { f64::NAN } else { x }, (0.0, 1.0), 1e-8)
            .unwrap_err();
        assert!(matches!(err, QuadratureError::NonFiniteSample { .. }));
    }

    #[test]
    fn doubling_budget_does_not_increase_error() {
        let smooth: [fn(f64) -> f64; 3] = [
            |x| (3.0 * x).sin() * (-x).exp(),
            |x| 1.0 / (1.0 + 25.0 * x * x),
            |x| (x * x).cos() + x.powi(5),
        ];
        for f in smooth {
            let mut last = f64::INFINITY;
            let mut budget = 45;
            while budget < 20_000 && last > 1e-13 {
                let est = match adaptive_integrate_with_budget(f, (-1.0, 2.0), 1e-300, budget) {
                    Ok(e) => e,
                    Err(QuadratureError::BudgetExceeded { best }) => best,
                    Err(e) => panic!("{e}"),
                };
                assert!(est.error_estimate <= last * (1.0 + 1e-12) + 1e-300);
                last = est.error_estimate;
                budget *= 2;
            }
        }
    }
}
