//! Seeded Monte Carlo integration over an axis-aligned box.
//!
//! The sample index space is cut into fixed blocks; block `j` draws from a
//! ChaCha8 stream keyed by `(seed, j)`. Block statistics are merged in block
//! order, so the result is bit-identical for any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{IntegralEstimate, QuadratureError};

const BLOCK: u64 = 1 << 16;

/// Minimum number of samples accepted by [`mc_integrate`].
pub const MIN_SAMPLES: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(
            lower.len(),
            upper.len(),
            "box corners must share a dimension"
        );
        Self { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .product()
    }
}

/// Result of [`mc_integrate`]. `estimate.error_estimate` is one standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: IntegralEstimate,
    pub hits: u64,
    /// Set when no sample landed inside the region; value and error are 0.
    pub empty_region: bool,
}

impl McEstimate {
    pub fn value(&self) -> f64 {
        self.estimate.value
    }

    pub fn std_error(&self) -> f64 {
        self.estimate.error_estimate
    }

    /// |value - reference| measured in standard errors.
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        let se = self.std_error();
        if se == 0.0 {
            if self.value() == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value() - reference).abs() / se
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    hits: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        Moments {
            n,
            mean,
            m2,
            hits: self.hits + other.hits,
        }
    }
}

/// Estimate `∫_{box ∩ region} weight(x) dx` with `samples` uniform draws.
pub fn mc_integrate<I, W>(
    indicator: I,
    weight: W,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, QuadratureError>
where
    I: Fn(&[f64]) -> bool + Sync,
    W: Fn(&[f64]) -> f64 + Sync,
{
    if samples < MIN_SAMPLES {
        return Err(QuadratureError::Domain(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if domain.dim() == 0 || !(domain.volume() > 0.0) {
        return Err(QuadratureError::Domain(
            "Monte Carlo box must have positive volume".into(),
        ));
    }
    let blocks = samples.div_ceil(BLOCK);
    let dim = domain.dim();
    let per_block: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|j| {
            let count = if j + 1 == blocks {
                samples - j * BLOCK
            } else {
                BLOCK
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            let mut x = vec![0.0; dim];
            let mut m = Moments::default();
            for _ in 0..count {
                for (d, xi) in x.iter_mut().enumerate() {
                    let u: f64 = rng.gen();
                    *xi = domain.lower[d] + u * (domain.upper[d] - domain.lower[d]);
                }
                let v = if indicator(&x) {
                    m.hits += 1;
                    weight(&x)
                } else {
                    0.0
                };
                m.push(v);
            }
            m
        })
        .collect();
    let total = per_block
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let vol = domain.volume();
    if total.hits == 0 {
        return Ok(McEstimate {
            estimate: IntegralEstimate {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: samples as usize,
            },
            hits: 0,
            empty_region: true,
        });
    }
    let var = total.m2 / (total.n as f64 - 1.0);
    Ok(McEstimate {
        estimate: IntegralEstimate {
            value: vol * total.mean,
            error_estimate: vol * (var / total.n as f64).sqrt(),
            evaluations: samples as usize,
        },
        hits: total.hits,
        empty_region: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quarter_disk() {
        let b = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let est =
            mc_integrate(|x| x[0] * x[0] + x[1] * x[1] < 1.0, |_| 1.0, &b, 200_000, 7).unwrap();
        assert!(est.sigmas_from(PI / 4.0) < 3.0, "{est:?}");
        assert!(est.std_error() > 0.0);
    }

    #[test]
    fn empty_region_flagged() {
        let b = BoxDomain::new(vec![0.0], vec![1.0]);
        let est = mc_integrate(|x| x[0] > 2.0, |_| 1.0, &b, 1000, 1).unwrap();
        assert!(est.empty_region);
        assert_eq!(est.value(), 0.0);
        assert_eq!(est.std_error(), 0.0);
    }

    #[test]
    fn too_few_samples() {
        let b = BoxDomain::new(vec![0.0], vec![1.0]);
        assert!(mc_integrate(|_| true, |_| 1.0, &b, 99, 1).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let b = BoxDomain::new(vec![-1.0, -1.0, 0.0], vec![1.0, 1.0, 2.0]);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    mc_integrate(
                        |x| x.iter().map(|v| v * v).sum::<f64>() < 1.5,
                        |x| (1.0 + x[2]).ln(),
                        &b,
                        300_001,
                        42,
                    )
                    .unwrap()
                })
        };
        let a = run(1);
        let c = run(4);
        assert_eq!(a.value().to_bits(), c.value().to_bits());
        assert_eq!(a.std_error().to_bits(), c.std_error().to_bits());
        assert_eq!(a.hits, c.hits);
    }
}
