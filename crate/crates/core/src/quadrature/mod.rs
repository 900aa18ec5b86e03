//! One-dimensional quadrature: Gauss rules for algebraic endpoint weights,
//! a budgeted adaptive integrator, log-gamma, and a seeded Monte Carlo
//! integrator used as an independent oracle.

mod adaptive;
mod gamma;
mod gauss;
mod monte_carlo;

pub use adaptive::{adaptive_integrate, adaptive_integrate_with_budget, DEFAULT_BUDGET};
pub use gamma::{beta, gamma, log_beta, log_gamma};
pub(crate) use gauss::OrthonormalJacobi;
pub use gauss::{cached_jacobi, gauss_jacobi, gauss_legendre, jacobi_on, QuadRule, RuleKind};
pub use monte_carlo::{mc_integrate, BoxDomain, McEstimate, MIN_SAMPLES};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Heuristic bound on |value - exact|; always reported.
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl IntegralEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error_estimate
        } else {
            self.error_estimate / self.value.abs()
        }
    }

    /// Scale value and error by a constant factor.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadratureError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation budget exceeded (best value {} ± {})", best.value, best.error_estimate)]
    BudgetExceeded { best: IntegralEstimate },
    #[error("integrand not finite at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

/// Largest rule size tried by [`refine_until`].
pub const MAX_RULE_SIZE: usize = 1024;

/// Evaluate `quad(n)` for n = `start`, 2·start, … until two consecutive
/// levels agree to `rel_tol` (relative, with an absolute floor of
/// `rel_tol · 1e-300`). The error estimate is the difference of the last
/// two levels.
pub fn refine_until<F>(
    start: usize,
    rel_tol: f64,
    mut quad: F,
) -> Result<IntegralEstimate, QuadratureError>
where
    F: FnMut(usize) -> Result<(f64, usize), QuadratureError>,
{
    let mut n = start.max(2);
    let (mut prev, mut evals) = quad(n)?;
    loop {
        let next_n = 2 * n;
        let (val, e) = quad(next_n)?;
        evals += e;
        let diff = (val - prev).abs();
        if !val.is_finite() {
            return Err(QuadratureError::NonFiniteSample { x: f64::NAN });
        }
        if diff <= rel_tol * val.abs() || diff == 0.0 {
            return Ok(IntegralEstimate {
                value: val,
                error_estimate: diff,
                evaluations: evals,
            });
        }
        if next_n >= MAX_RULE_SIZE {
            return Err(QuadratureError::BudgetExceeded {
                best: IntegralEstimate {
                    value: val,
                    error_estimate: diff,
                    evaluations: evals,
                },
            });
        }
        prev = val;
        n = next_n;
    }
}
