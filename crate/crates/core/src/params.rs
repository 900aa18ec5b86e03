//! Weight parameters `(N, k, l, alpha)` and the classification of parameter
//! space against the existence, stability and radiality conditions.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Densities `|x|^k x_N^alpha` (perimeter) and `|x|^l x_N^alpha` (volume) on
/// the half-space `{x_N > 0}` of `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    #[serde(rename = "N")]
    pub dim: usize,
    pub k: f64,
    pub l: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AdmissibilityError {
    #[error("admissibility violated: {violated} (requires {requirement}, got {value})")]
    Violated {
        violated: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

impl AdmissibilityError {
    /// Short name of the violated inequality: `"N"`, `"alpha"`,
    /// `"l+N+alpha"` or `"k+N+alpha"`.
    pub fn violated(&self) -> &'static str {
        match self {
            AdmissibilityError::Violated { violated, .. } => violated,
        }
    }
}

impl WeightParams {
    pub fn new(dim: usize, k: f64, l: f64, alpha: f64) -> Self {
        Self { dim, k, l, alpha }
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn validate(&self) -> Result<(), AdmissibilityError> {
        let fail = |violated, requirement, value| {
            Err(AdmissibilityError::Violated {
                violated,
                requirement,
                value,
            })
        };
        if self.dim < 2 {
            return fail("N", "N >= 2", self.n());
        }
        if !(self.k.is_finite() && self.l.is_finite() && self.alpha.is_finite()) {
            return fail("finite", "finite k, l, alpha", f64::NAN);
        }
        if !(self.alpha > -1.0) {
            return fail("alpha", "alpha > -1", self.alpha);
        }
        if !(self.measure_degree() > 0.0) {
            return fail("l+N+alpha", "l + N + alpha > 0", self.measure_degree());
        }
        if !(self.k + self.n() + self.alpha > 0.0) {
            return fail(
                "k+N+alpha",
                "k + N + alpha > 0",
                self.k + self.n() + self.alpha,
            );
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self, AdmissibilityError> {
        self.validate().map(|_| self)
    }

    /// Homogeneity degree of the weighted volume, `l + N + alpha`.
    pub fn measure_degree(&self) -> f64 {
        self.l + self.n() + self.alpha
    }

    /// Homogeneity degree of the weighted perimeter, `k + N + alpha - 1`.
    pub fn perimeter_degree(&self) -> f64 {
        self.k + self.n() + self.alpha - 1.0
    }

    /// Exponent applied to the measure in the isoperimetric ratio.
    pub fn ratio_exponent(&self) -> f64 {
        self.perimeter_degree() / self.measure_degree()
    }
}

/// One inequality with both evaluated sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Comparison {
    fn strict_less(lhs: f64, rhs: f64) -> Self {
        Self {
            holds: lhs < rhs,
            lhs,
            rhs,
        }
    }

    fn less_eq(lhs: f64, rhs: f64) -> Self {
        Self {
            holds: lhs <= rhs,
            lhs,
            rhs,
        }
    }

    fn greater_eq(lhs: f64, rhs: f64) -> Self {
        Self {
            holds: lhs >= rhs,
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `k+N+α-1 < sqrt((N-1)(N+α-1))`
    pub cond_1_1: Comparison,
    /// `N(k+N+α-1) < (l+N+α)(N-1)`
    pub cond_1_2: Comparison,
    /// `l+1 <= k + (N+α-1)/(k+N+α-1)`
    pub cond_1_3: Comparison,
    /// `kN >= l(N-1) - α`: up-axis family does not force nonexistence.
    pub nec1: Comparison,
    /// `k(N+α) >= l(N+α-1)`: on-wall family does not force nonexistence.
    pub nec2: Comparison,
    pub k_ge_l_plus_1: bool,
}

impl ConditionReport {
    /// `nec1` in the equivalent form `N(k+N+α-1) >= (N-1)(l+N+α)`.
    pub fn nec1_equivalent(params: &WeightParams) -> Comparison {
        let n = params.n();
        Comparison::greater_eq(
            n * params.perimeter_degree(),
            (n - 1.0) * params.measure_degree(),
        )
    }
}

pub fn evaluate_conditions(params: &WeightParams) -> Result<ConditionReport, AdmissibilityError> {
    params.validate()?;
    let WeightParams { k, l, alpha, .. } = *params;
    let n = params.n();
    let pd = params.perimeter_degree();
    let md = params.measure_degree();

    let cond_1_1 = Comparison::strict_less(pd, ((n - 1.0) * (n + alpha - 1.0)).sqrt());
    let cond_1_2 = Comparison::strict_less(n * pd, md * (n - 1.0));
    // The stability bound is undefined when the perimeter degree vanishes.
    let cond_1_3 = if pd == 0.0 {
        Comparison {
            holds: false,
            lhs: l + 1.0,
            rhs: f64::NAN,
        }
    } else {
        Comparison::less_eq(l + 1.0, k + (n + alpha - 1.0) / pd)
    };
    let nec1 = Comparison::greater_eq(k * n, l * (n - 1.0) - alpha);
    let nec2 = Comparison::greater_eq(k * (n + alpha), l * (n + alpha - 1.0));
    Ok(ConditionReport {
        cond_1_1,
        cond_1_2,
        cond_1_3,
        nec1,
        nec2,
        k_ge_l_plus_1: k >= l + 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    Invalid,
    NoSolutionStableHalfBalls,
    RadialMinimizer,
    NonexistenceByUpAxisFamily,
    NonexistenceByOnWallFamily,
    Undetermined,
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionTag::Invalid => "Invalid",
            RegionTag::NoSolutionStableHalfBalls => "NoSolutionStableHalfBalls",
            RegionTag::RadialMinimizer => "RadialMinimizer",
            RegionTag::NonexistenceByUpAxisFamily => "NonexistenceByUpAxisFamily",
            RegionTag::NonexistenceByOnWallFamily => "NonexistenceByOnWallFamily",
            RegionTag::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionClass {
    pub tag: RegionTag,
    /// `None` exactly when `tag == Invalid`.
    pub witness: Option<ConditionReport>,
    /// Admissibility failure for invalid points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid_reason: Option<String>,
}

/// Precedence: Invalid, then the no-solution-with-stable-half-balls region
/// (all three conditions and `alpha` in (-1, 0)), then `k >= l+1`, then the
/// two trial-family nonexistence criteria, else Undetermined.
pub fn classify(params: &WeightParams) -> RegionClass {
    let report = match evaluate_conditions(params) {
        Ok(r) => r,
        Err(e) => {
            return RegionClass {
                tag: RegionTag::Invalid,
                witness: None,
                invalid_reason: Some(e.to_string()),
            }
        }
    };
    let negative_alpha = params.alpha < 0.0;
    let tag = if negative_alpha
        && report.cond_1_1.holds
        && report.cond_1_2.holds
        && report.cond_1_3.holds
    {
        RegionTag::NoSolutionStableHalfBalls
    } else if report.k_ge_l_plus_1 {
        RegionTag::RadialMinimizer
    } else if !report.nec1.holds {
        RegionTag::NonexistenceByUpAxisFamily
    } else if !report.nec2.holds {
        RegionTag::NonexistenceByOnWallFamily
    } else {
        RegionTag::Undetermined
    };
    RegionClass {
        tag,
        witness: Some(report),
        invalid_reason: None,
    }
}

/// Per-parameter value lists for [`sweep_grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub dims: Vec<usize>,
    pub k: Vec<f64>,
    pub l: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.dims.len() * self.k.len() * self.l.len() * self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in lexicographic order of (N, k, l, alpha) indices.
    pub fn points(&self) -> Vec<WeightParams> {
        let mut out = Vec::with_capacity(self.len());
        for &dim in &self.dims {
            for &k in &self.k {
                for &l in &self.l {
                    for &alpha in &self.alpha {
                        out.push(WeightParams::new(dim, k, l, alpha));
                    }
                }
            }
        }
        out
    }
}

/// Classify every grid point. Rows keep lexicographic order whether or not
/// the evaluation runs in parallel.
pub fn sweep_grid(grid: &GridSpec) -> Vec<(WeightParams, RegionClass)> {
    grid.points()
        .into_par_iter()
        .map(|p| (p, classify(&p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(WeightParams::new(2, 0.0, 0.0, -0.5).validate().is_ok());
        let e = WeightParams::new(2, 0.0, 0.0, -1.0).validate().unwrap_err();
        assert_eq!(e.violated(), "alpha");
        let e = WeightParams::new(2, 0.0, -2.0, -0.5)
            .validate()
            .unwrap_err();
        assert_eq!(e.violated(), "l+N+alpha");
        let e = WeightParams::new(2, -2.0, 0.0, -0.5)
            .validate()
            .unwrap_err();
        assert_eq!(e.violated(), "k+N+alpha");
        let e = WeightParams::new(1, 0.0, 0.0, 0.0).validate().unwrap_err();
        assert_eq!(e.violated(), "N");
    }

    #[test]
    fn model_case_conditions() {
        let r = evaluate_conditions(&WeightParams::new(2, 0.0, 0.0, -0.5)).unwrap();
        assert!(r.cond_1_1.holds);
        assert_eq!(r.cond_1_1.lhs, 0.5);
        assert!((r.cond_1_1.rhs - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(r.cond_1_2.holds);
        assert_eq!((r.cond_1_2.lhs, r.cond_1_2.rhs), (1.0, 1.5));
        assert!(r.cond_1_3.holds);
        assert_eq!((r.cond_1_3.lhs, r.cond_1_3.rhs), (1.0, 1.0));
        assert!(!r.nec1.holds);
    }

    #[test]
    fn radial_case_conditions() {
        let r = evaluate_conditions(&WeightParams::new(3, 1.0, 0.0, -0.5)).unwrap();
        assert!(!r.cond_1_1.holds);
        assert_eq!(r.cond_1_1.lhs, 2.5);
        assert!((r.cond_1_1.rhs - 3f64.sqrt()).abs() < 1e-15);
        assert!(r.k_ge_l_plus_1);
    }

    #[test]
    fn unweighted_equality_is_exact() {
        let r = evaluate_conditions(&WeightParams::new(2, 0.0, 0.0, 0.0)).unwrap();
        assert!(r.cond_1_3.holds);
        assert_eq!(r.cond_1_3.lhs, r.cond_1_3.rhs);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&WeightParams::new(2, 0.0, 0.0, -0.5)).tag,
            RegionTag::NoSolutionStableHalfBalls
        );
        assert_eq!(
            classify(&WeightParams::new(3, 1.0, 0.0, -0.5)).tag,
            RegionTag::RadialMinimizer
        );
        let inv = classify(&WeightParams::new(2, 0.0, 0.0, -1.5));
        assert_eq!(inv.tag, RegionTag::Invalid);
        assert!(inv.witness.is_none());
    }

    #[test]
    fn nonexistence_tags() {
        // nec1 fails, Theorem conditions not all met (k large makes cond_1_1 fail)
        let p = WeightParams::new(3, 0.5, 2.0, -0.5);
        let c = classify(&p);
        let w = c.witness.unwrap();
        assert!(!w.nec1.holds);
        assert_eq!(c.tag, RegionTag::NonexistenceByUpAxisFamily);
        // nec2 fails with nec1 holding needs alpha > 0
        let p = WeightParams::new(2, 0.5, 1.0, 0.5);
        let w = evaluate_conditions(&p).unwrap();
        assert!(w.nec1.holds && !w.nec2.holds);
        assert_eq!(classify(&p).tag, RegionTag::NonexistenceByOnWallFamily);
    }

    #[test]
    fn grid_order_and_invalid_rows() {
        let g = GridSpec {
            dims: vec![2],
            k: vec![0.0, 0.5, 1.0],
            l: vec![0.0],
            alpha: vec![-1.0, -0.5, 0.0],
        };
        let rows = sweep_grid(&g);
        assert_eq!(rows.len(), 9);
        assert_eq!(
            rows,
            g.points()
                .iter()
                .map(|p| (*p, classify(p)))
                .collect::<Vec<_>>()
        );
        assert_eq!(rows[0].1.tag, RegionTag::Invalid);
        assert_eq!(rows[1].1.tag, RegionTag::NoSolutionStableHalfBalls);
        assert_eq!(rows[1].0, WeightParams::new(2, 0.0, 0.0, -0.5));
        assert_eq!(rows[3].0, WeightParams::new(2, 0.5, 0.0, -1.0));

        let single = GridSpec {
            dims: vec![2],
            k: vec![0.0],
            l: vec![0.0],
            alpha: vec![-0.5],
        };
        let rows = sweep_grid(&single);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].1.tag, RegionTag::NoSolutionStableHalfBalls);
    }
}
