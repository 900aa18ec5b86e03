//! Gauss–Legendre and Gauss–Jacobi rules.
//!
//! Nodes are the eigenvalues of the Jacobi matrix of the orthonormal
//! Jacobi polynomials (Golub–Welsch), computed by implicit QL and then
//! polished with Newton steps on the three-term recurrence. Weights are
//! the Christoffel numbers `1 / Σ_{j<n} p_j(x_i)²`, which stay accurate
//! near the endpoints where the eigenvector route loses relative precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::gamma::ln_gamma_unchecked;
use super::QuadratureError;

/// Which weight a rule is exact for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    Legendre,
    /// Weight `(b - x)^exp_b · (x - a)^exp_a` on `(a, b)`.
    Jacobi {
        exp_b: f64,
        exp_a: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
    pub kind: RuleKind,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine image of this rule on `(a, b)`. Weights pick up the factor
    /// `((b-a)/L)^(1 + exp_a + exp_b)` so the mapped rule integrates the
    /// mapped weight.
    pub fn mapped(&self, a: f64, b: f64) -> QuadRule {
        let (a0, b0) = self.interval;
        let scale = (b - a) / (b0 - a0);
        let total_exp = match self.kind {
            RuleKind::Legendre => 0.0,
            RuleKind::Jacobi { exp_b, exp_a } => exp_a + exp_b,
        };
        let wscale = scale.powf(1.0 + total_exp);
        QuadRule {
            nodes: self.nodes.iter().map(|x| a + (x - a0) * scale).collect(),
            weights: self.weights.iter().map(|w| w * wscale).collect(),
            interval: (a, b),
            kind: self.kind,
        }
    }

    /// `Σ w_i f(x_i)`: approximates `∫ weight(x) f(x) dx` over the interval.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// n-point Gauss–Legendre rule on (-1, 1).
pub fn gauss_legendre(n: usize) -> Result<QuadRule, QuadratureError> {
    let mut rule = (*cached_jacobi(n, 0.0, 0.0)?).clone();
    rule.kind = RuleKind::Legendre;
    Ok(rule)
}

/// n-point Gauss–Jacobi rule on (-1, 1) for the weight `(1-x)^p (1+x)^q`.
pub fn gauss_jacobi(n: usize, p: f64, q: f64) -> Result<QuadRule, QuadratureError> {
    Ok((*cached_jacobi(n, p, q)?).clone())
}

/// Shared, memoized rule. Rules are immutable, so callers that only read
/// nodes and weights should prefer this over [`gauss_jacobi`].
pub fn cached_jacobi(n: usize, p: f64, q: f64) -> Result<Arc<QuadRule>, QuadratureError> {
    if n < 1 {
        return Err(QuadratureError::Domain(
            "quadrature rule needs n >= 1".into(),
        ));
    }
    if !(p > -1.0) || !(q > -1.0) || !p.is_finite() || !q.is_finite() {
        return Err(QuadratureError::Domain(format!(
            "Jacobi exponents must exceed -1, got p = {p}, q = {q}"
        )));
    }
    type Cache = Mutex<HashMap<(usize, u64, u64), Arc<QuadRule>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, p.to_bits(), q.to_bits());
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_jacobi(n, p, q)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Jacobi rule for `(b-x)^exp_b (x-a)^exp_a` directly on `(a, b)`.
pub fn jacobi_on(
    n: usize,
    a: f64,
    b: f64,
    exp_a: f64,
    exp_b: f64,
) -> Result<QuadRule, QuadratureError> {
    Ok(cached_jacobi(n, exp_b, exp_a)?.mapped(a, b))
}

struct Recurrence {
    /// diagonal entries a_j
    diag: Vec<f64>,
    /// sqrt(beta_j) for j = 1..n (index j-1)
    off: Vec<f64>,
    /// p_0 = 1/sqrt(mu0)
    p0: f64,
}

fn recurrence(n: usize, p: f64, q: f64) -> Recurrence {
    // weight (1-x)^p (1+x)^q; standard monic Jacobi recurrence
    let (a, b) = (p, q);
    let ab = a + b;
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let d = if j == 0 {
            (b - a) / (ab + 2.0)
        } else {
            let s = 2.0 * j as f64 + ab;
            (b * b - a * a) / (s * (s + 2.0))
        };
        diag.push(d);
    }
    let mut off = Vec::with_capacity(n);
    for j in 1..=n {
        let jf = j as f64;
        let beta = if j == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let s = 2.0 * jf + ab;
            4.0 * jf * (jf + a) * (jf + b) * (jf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off.push(beta.sqrt());
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2
        + ln_gamma_unchecked(a + 1.0)
        + ln_gamma_unchecked(b + 1.0)
        - ln_gamma_unchecked(ab + 2.0);
    Recurrence {
        diag,
        off,
        p0: (-0.5 * ln_mu0).exp(),
    }
}

impl Recurrence {
    /// Orthonormal p_n(x) and p_n'(x), plus Σ_{j<n} p_j(x)².
    fn eval(&self, n: usize, x: f64) -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut dp_prev = 0.0;
        let mut p = self.p0;
        let mut dp = 0.0;
        let mut sumsq = 0.0;
        for j in 0..n {
            sumsq += p * p;
            let b_next = self.off[j];
            let b_cur = if j == 0 { 0.0 } else { self.off[j - 1] };
            let p_next = ((x - self.diag[j]) * p - b_cur * p_prev) / b_next;
            let dp_next = ((x - self.diag[j]) * dp + p - b_cur * dp_prev) / b_next;
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
        }
        (p, dp, sumsq)
    }
}

/// Orthonormal Jacobi polynomials for `(1-x)^p (1+x)^q` on (-1, 1), used as
/// a well-conditioned Galerkin basis.
pub(crate) struct OrthonormalJacobi {
    rec: Recurrence,
}

impl OrthonormalJacobi {
    pub(crate) fn new(n: usize, p: f64, q: f64) -> Self {
        Self {
            rec: recurrence(n.max(1), p, q),
        }
    }

    /// Fill `vals[j] = p_j(x)` and `ders[j] = p_j'(x)` for `j < vals.len()`.
    pub(crate) fn eval_all(&self, x: f64, vals: &mut [f64], ders: &mut [f64]) {
        let n = vals.len();
        debug_assert!(n <= self.rec.off.len() + 1);
        let (mut p_prev, mut dp_prev) = (0.0, 0.0);
        let (mut p, mut dp) = (self.rec.p0, 0.0);
        for j in 0..n {
            vals[j] = p;
            ders[j] = dp;
            if j + 1 == n {
                break;
            }
            let b_next = self.rec.off[j];
            let b_cur = if j == 0 { 0.0 } else { self.rec.off[j - 1] };
            let p_next = ((x - self.rec.diag[j]) * p - b_cur * p_prev) / b_next;
            let dp_next = ((x - self.rec.diag[j]) * dp + p - b_cur * dp_prev) / b_next;
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
        }
    }
}

fn build_jacobi(n: usize, p: f64, q: f64) -> Result<QuadRule, QuadratureError> {
    let rec = recurrence(n, p, q);
    let mut d = rec.diag.clone();
    let mut e: Vec<f64> = rec.off[..n - 1].to_vec();
    e.push(0.0);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("NaN node"));

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &d {
        let mut x = x0;
        for _ in 0..3 {
            let (pn, dpn, _) = rec.eval(n, x);
            if dpn == 0.0 || !dpn.is_finite() {
                break;
            }
            let step = pn / dpn;
            if !(step.abs() < 1e-6) {
                break;
            }
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let x = x.clamp(-1.0, 1.0);
        let (_, _, sumsq) = rec.eval(n, x);
        nodes.push(x);
        weights.push(1.0 / sumsq);
    }
    Ok(QuadRule {
        nodes,
        weights,
        interval: (-1.0, 1.0),
        kind: RuleKind::Jacobi { exp_b: p, exp_a: q },
    })
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i+1`; `e[n-1]` is scratch).
/// Implicit QL with Wilkinson-type shifts; results overwrite `d`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<(), QuadratureError> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(QuadratureError::NoConvergence(
                    "tridiagonal QL did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gamma::beta;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_small_cases() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert_relative_eq!(r1.weights[0], 2.0, max_relative = 1e-15);

        let r2 = gauss_legendre(2).unwrap();
        assert!((r2.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-14);

        let r5 = gauss_legendre(5).unwrap().mapped(0.0, 1.0);
        assert!((r5.integrate(|x| x.powi(9)) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let r = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert!(r.nodes[0].abs() < 1e-15);
        assert_relative_eq!(r.weights[0], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn jacobi_inverse_sqrt_endpoint() {
        let r = gauss_jacobi(4, -0.5, 0.0).unwrap();
        assert_relative_eq!(
            r.integrate(|_| 1.0),
            2.0 * 2f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn jacobi_cos_power_integral() {
        // ∫_0^{π/2} cos^{-1/2} θ dθ with u = sin θ: ∫_0^1 (1-u²)^{-3/4}... use u = cos θ:
        // ∫_0^1 u^{-1/2} (1-u^2)^{-1/2} du = (1/2) B(1/4, 1/2)
        let rule = jacobi_on(40, 0.0, 1.0, -0.5, -0.5).unwrap();
        let val = rule.integrate(|u| (1.0 + u).powf(-0.5));
        let expect = 0.5 * beta(0.5, 0.25).unwrap();
        assert_relative_eq!(val, expect, max_relative = 1e-13);
        assert!((expect - 2.622_057_554).abs() < 1e-8);
    }

    #[test]
    fn weighted_monomial_exactness_up_to_20() {
        // ∫_{-1}^1 (1-x)^p (1+x)^q (1+x)^j dx = 2^{p+q+j+1} B(p+1, q+j+1)
        for &(p, q) in &[
            (0.0, 0.0),
            (-0.5, 0.0),
            (-0.9, 0.7),
            (0.5, -0.5),
            (2.0, 1.0),
        ] {
            for n in 1..=20usize {
                let rule = gauss_jacobi(n, p, q).unwrap();
                for j in 0..(2 * n) {
                    let val = rule.integrate(|x| (1.0 + x).powi(j as i32));
                    let exact = 2f64.powf(p + q + j as f64 + 1.0)
                        * beta(p + 1.0, q + j as f64 + 1.0).unwrap();
                    assert!(
                        ((val - exact) / exact).abs() < 1e-12,
                        "p={p} q={q} n={n} j={j}: {val} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn symmetric_rules_have_symmetric_nodes() {
        for &p in &[-0.7, 0.0, 1.5] {
            let r = gauss_jacobi(17, p, p).unwrap();
            for i in 0..r.len() {
                let j = r.len() - 1 - i;
                assert!((r.nodes[i] + r.nodes[j]).abs() < 1e-14);
                assert_relative_eq!(r.weights[i], r.weights[j], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn nodes_interior_increasing_weights_positive() {
        let r = gauss_jacobi(300, -0.9, 0.5).unwrap();
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes.iter().all(|&x| x > -1.0 && x < 1.0));
        assert!(r.weights.iter().all(|&w| w > 0.0));
        let total: f64 = r.weights.iter().sum();
        let mu0 = 2f64.powf(0.6) * beta(0.1, 1.5).unwrap();
        assert_relative_eq!(total, mu0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi(3, -1.0, 0.0).is_err());
        assert!(gauss_legendre(0).is_err());
    }
}
