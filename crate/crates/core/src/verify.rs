//! The acceptance battery: thirteen numbered criteria, each a list of checks
//! with measured values. Shared by the `verify` subcommand and the
//! acceptance test target.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::format::sig;
use crate::geometry::{
    divergence_check, mc_measure, measure_ball, measure_half_ball, perimeter_half_ball, ratio,
    sigma_alpha, sigma_alpha_closed_form, TrialDomain,
};
use crate::params::{classify, RegionTag, WeightParams};
use crate::quadrature::beta;
use crate::spectral::{
    lambda1_dirichlet, mu1_alpha, mu1_report, nodal_angle_crosscheck, psi0_defect, psi0_sup_error,
    sin_theta_defect, solve_branch, stability_margin, SLProblem, DEFAULT_TOL,
};
use crate::stereographic::{
    from_disk, gradient_pullback_check, sigma_alpha_stereographic, to_disk, DiskPoint,
};
use crate::sweeps::{
    find_d0, lemma51_construct, log_spaced, offcenter_monte_carlo, run_sweep, vanishing_family,
    Family, PowerLawPair, RadialWeight, DEFAULT_TAIL_FRACTION,
};

/// Default sample count for the Monte Carlo cross-checks.
pub const DEFAULT_MC_SAMPLES: u64 = 10_000_000;
/// Default seed for random parameter draws and Monte Carlo.
pub const DEFAULT_SEED: u64 = 20_240_601;

const DIMS: [usize; 4] = [2, 3, 4, 7];
const ALPHAS: [f64; 4] = [-0.9, -0.5, -0.1, 0.0];

/// `σ_α` of the upper half of `S^{N-1}`, frozen from an independent
/// evaluation of `π^{(N-1)/2} Γ((α+1)/2) / Γ((N+α)/2)`.
#[allow(clippy::approx_constant)]
const SIGMA_TABLE: [(usize, f64, f64); 12] = [
    (2, -0.9, 21.353449332480047),
    (2, -0.5, 5.244115108584238),
    (2, 0.0, 3.1415926535897927),
    (2, 1.0, 2.0),
    (3, -0.9, 62.83185307179588),
    (3, -0.5, 12.56637061435917),
    (3, 0.0, 6.283185307179585),
    (3, 1.0, 3.141592653589793),
    (4, -0.9, 121.97061736676585),
    (4, -0.5, 21.966497999609985),
    (4, 0.0, 9.869604401089358),
    (4, 1.0, 4.1887902047863905),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Eigen,
    Geometry,
    Sweep,
    Classify,
    Counterexample,
    Vanish,
    Stereo,
    Mc,
}

impl Group {
    pub const ALL: [Group; 8] = [
        Group::Eigen,
        Group::Geometry,
        Group::Sweep,
        Group::Classify,
        Group::Counterexample,
        Group::Vanish,
        Group::Stereo,
        Group::Mc,
    ];

    pub fn of(criterion: u8) -> Group {
        match criterion {
            1..=4 => Group::Eigen,
            5 | 6 | 9 => Group::Geometry,
            7 => Group::Sweep,
            8 => Group::Classify,
            10 => Group::Counterexample,
            11 => Group::Vanish,
            12 => Group::Stereo,
            _ => Group::Mc,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Eigen => "eigen",
            Group::Geometry => "geometry",
            Group::Sweep => "sweep",
            Group::Classify => "classify",
            Group::Counterexample => "counterexample",
            Group::Vanish => "vanish",
            Group::Stereo => "stereo",
            Group::Mc => "mc",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A selector for `--only`: a group name or a criterion number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Group(Group),
    Criterion(u8),
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        if let Ok(n) = s.parse::<u8>() {
            return if (1..=13).contains(&n) {
                Ok(Selector::Criterion(n))
            } else {
                Err(format!("criterion {n} out of range 1..=13"))
            };
        }
        Group::ALL
            .iter()
            .find(|g| g.name() == s)
            .map(|g| Selector::Group(*g))
            .ok_or_else(|| {
                let names: Vec<_> = Group::ALL.iter().map(|g| g.name()).collect();
                format!(
                    "unknown selector '{s}', expected 1..=13 or one of {}",
                    names.join(", ")
                )
            })
    }
}

impl Selector {
    fn matches(self, criterion: u8) -> bool {
        match self {
            Selector::Group(g) => Group::of(criterion) == g,
            Selector::Criterion(n) => n == criterion,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Empty means every criterion.
    pub only: Vec<Selector>,
    pub mc_samples: u64,
    pub seed: u64,
    /// Multiplies every computed `σ_α` before it is compared. Any value
    /// other than 1 is a fault injection.
    pub sigma_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            only: Vec::new(),
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
            sigma_scale: 1.0,
        }
    }
}

impl VerifyOptions {
    fn selected(&self, criterion: u8) -> bool {
        self.only.is_empty() || self.only.iter().any(|s| s.matches(criterion))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub group: Group,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} [{:>2}] {}", self.id, self.title)?;
        for c in &self.checks {
            write!(
                f,
                "\n    {} {}: {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.label,
                c.detail
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed())
    }

    pub fn get(&self, id: u8) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

/// Collects checks for one criterion; errors become failed checks.
struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn push(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Worst value of `measure` over `cases`, compared against `limit`.
    fn worst<T, E: fmt::Display>(
        &mut self,
        label: &str,
        limit: f64,
        cases: impl IntoIterator<Item = T>,
        mut measure: impl FnMut(&T) -> Result<f64, E>,
        describe: impl Fn(&T) -> String,
    ) {
        let mut worst = 0.0f64;
        let mut at = String::new();
        for case in cases {
            match measure(&case) {
                Ok(v) if v.is_finite() => {
                    if v >= worst {
                        worst = v;
                        at = describe(&case);
                    }
                }
                Ok(v) => {
                    return self.push(
                        label,
                        false,
                        format!("non-finite value {v} at {}", describe(&case)),
                    )
                }
                Err(e) => {
                    return self.push(label, false, format!("error at {}: {e}", describe(&case)))
                }
            }
        }
        self.push(
            label,
            worst <= limit,
            format!("worst {} at {at} (limit {})", sig(worst), sig(limit)),
        );
    }
}

fn grid() -> Vec<(usize, f64)> {
    DIMS.iter()
        .flat_map(|&n| ALPHAS.iter().map(move |&a| (n, a)))
        .collect()
}

fn na(c: &(usize, f64)) -> String {
    format!("N={} alpha={}", c.0, c.1)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    c.worst(
        "mu1 = N+alpha-1, relative error",
        1e-6,
        grid(),
        |&(n, a)| mu1_alpha(n, a, DEFAULT_TOL).map(|mu| rel(mu, n as f64 + a - 1.0)),
        na,
    );
    c.0
}

fn criterion_2(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    c.worst(
        "lambda1(pi/2) = (N-1)(1-alpha), absolute error",
        1e-6,
        grid(),
        |&(n, a)| {
            lambda1_dirichlet(n, a, FRAC_PI_2, DEFAULT_TOL)
                .map(|l| (l - (n as f64 - 1.0) * (1.0 - a)).abs())
        },
        na,
    );
    c.worst(
        "eigenfunction vs cos^(1-alpha), sup norm",
        1e-5,
        grid(),
        |&(n, a)| {
            solve_branch(&SLProblem::dirichlet(n, a, FRAC_PI_2), 1, DEFAULT_TOL)
                .map(|p| psi0_sup_error(&p[0], n, a))
        },
        na,
    );
    c.0
}

fn criterion_3(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    c.worst(
        "weak defect of sin(theta)",
        1e-8,
        grid(),
        |&(n, a)| sin_theta_defect(n, a),
        na,
    );
    c.worst(
        "weak defect of cos^(1-alpha)(theta)",
        1e-8,
        grid(),
        |&(n, a)| psi0_defect(n, a),
        na,
    );
    c.0
}

fn criterion_4(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let cases: Vec<(usize, f64)> = grid().into_iter().filter(|(_, a)| *a < 0.0).collect();
    let mut min_gap = f64::INFINITY;
    let mut min_second = f64::INFINITY;
    let mut failure = None;
    for &(n, a) in &cases {
        match mu1_report(n, a, DEFAULT_TOL) {
            Ok(r) => {
                let mid = (n as f64 - 1.0) * (1.0 - a);
                min_gap = min_gap.min(r.mu0 - mid);
                min_second = min_second.min(mid - (n as f64 + a - 1.0));
            }
            Err(e) => {
                failure = Some(format!("error at {}: {e}", na(&(n, a))));
                break;
            }
        }
    }
    match failure {
        Some(msg) => c.push("mu0 - (N-1)(1-alpha) > 1e-4", false, msg),
        None => {
            c.push(
                "mu0 - (N-1)(1-alpha) > 1e-4",
                min_gap > 1e-4,
                format!("smallest gap {}", sig(min_gap)),
            );
            c.push(
                "(N-1)(1-alpha) > N+alpha-1",
                min_second > 0.0,
                format!("smallest gap {}", sig(min_second)),
            );
        }
    }
    c.worst(
        "|mu0 - lambda1(theta_hat)| / mu0",
        1e-5,
        cases,
        |&(n, a)| nodal_angle_crosscheck(n, a, DEFAULT_TOL).map(|r| r.relative_gap()),
        na,
    );
    c.0
}

fn criterion_5(o: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let s = o.sigma_scale;
    c.worst(
        "sigma_alpha vs independent oracle table",
        1e-10,
        SIGMA_TABLE,
        |&(n, a, v)| sigma_alpha(n, a).map(|x| rel(s * x, v)),
        |&(n, a, _)| format!("N={n} alpha={a}"),
    );
    c.worst(
        "sigma_alpha vs Gamma closed form",
        1e-10,
        grid(),
        |&(n, a)| {
            let q = sigma_alpha(n, a)?;
            sigma_alpha_closed_form(n, a).map(|x| rel(s * q, x))
        },
        na,
    );
    c.worst(
        "sigma(N=2, alpha=-0.5) = B(1/2, 1/4)",
        1e-10,
        [(2usize, -0.5f64)],
        |&(n, a)| {
            let b = beta(0.5, 0.25).map_err(|e| e.to_string())?;
            sigma_alpha(n, a)
                .map(|x| rel(s * x, b))
                .map_err(|e| e.to_string())
        },
        na,
    );
    c.worst(
        "sigma(N=3, alpha=-0.5) = 4 pi",
        1e-10,
        [(3usize, -0.5f64)],
        |&(n, a)| sigma_alpha(n, a).map(|x| rel(s * x, 4.0 * PI)),
        na,
    );
    let params: Vec<WeightParams> = [
        (2, 0.0, 0.0, -0.5),
        (3, 1.0, 0.5, 0.3),
        (4, -0.5, 1.5, -0.9),
        (7, 2.0, 0.0, 0.0),
    ]
    .iter()
    .map(|&(n, k, l, a)| WeightParams::new(n, k, l, a))
    .collect();
    c.worst(
        "half-ball measure and perimeter vs closed forms",
        1e-10,
        params,
        |p| {
            let sig_c = sigma_alpha_closed_form(p.dim, p.alpha)?;
            let r: f64 = 1.7;
            let (md, pd) = (p.measure_degree(), p.perimeter_degree());
            let m = measure_half_ball(p, r)?;
            let q = perimeter_half_ball(p, r)?;
            Ok::<f64, crate::geometry::GeometryError>(
                rel(s * m, sig_c * r.powf(md) / md).max(rel(s * q, sig_c * r.powf(pd))),
            )
        },
        |p| format!("{p:?}"),
    );
    c.0
}

fn random_params(rng: &mut ChaCha8Rng) -> WeightParams {
    loop {
        let p = WeightParams::new(
            rng.gen_range(2..=5),
            rng.gen_range(-0.5..2.0),
            rng.gen_range(-0.5..2.0),
            rng.gen_range(-0.9..1.0),
        );
        if p.validate().is_ok() {
            return p;
        }
    }
}

fn criterion_6(o: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let draws: Vec<WeightParams> = (0..5).map(|_| random_params(&mut rng)).collect();
    let cases: Vec<(WeightParams, f64)> = draws
        .iter()
        .flat_map(|p| [0.5, 2.0, 10.0].map(|r| (*p, r)))
        .collect();
    c.worst(
        "scale invariance of the half-ball ratio",
        1e-8,
        cases,
        |(p, r)| {
            let base = ratio(p, &TrialDomain::HalfBall { radius: 1.0 })?;
            ratio(p, &TrialDomain::HalfBall { radius: *r }).map(|v| rel(v, base))
        },
        |(p, r)| format!("R={r} {p:?}"),
    );
    c.0
}

fn criterion_7(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let p = WeightParams::new(2, 0.0, 0.0, -0.5);
    match run_sweep(
        &p,
        Family::UpAxis,
        &log_spaced(10.0, 1e3, 12),
        DEFAULT_TAIL_FRACTION,
    ) {
        Ok(res) => {
            c.push(
                "fitted slope = -1/3 +- 0.01",
                (res.fitted_slope + 1.0 / 3.0).abs() <= 0.01,
                format!(
                    "slope {} (stderr {})",
                    sig(res.fitted_slope),
                    sig(res.slope_stderr)
                ),
            );
            c.push(
                "fitted slope matches predicted exponent",
                (res.fitted_slope - res.predicted_slope).abs() <= 0.01,
                format!("predicted {}", sig(res.predicted_slope)),
            );
            let first = &res.rows[0];
            let last = &res.rows[res.rows.len() - 1];
            let observed = last.ratio / first.ratio;
            let implied = (last.t / first.t).powf(res.predicted_slope);
            c.push(
                "ratio(1e3)/ratio(10) within 5% of the implied factor",
                rel(observed, implied) <= 0.05,
                format!("observed {} implied {}", sig(observed), sig(implied)),
            );
        }
        Err(e) => c.push("sweep", false, e.to_string()),
    }
    c.0
}

fn criterion_8(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    for n in [2usize, 3] {
        for a in [-0.9, -0.5, -0.1] {
            let p = WeightParams::new(n, 0.0, 0.0, a);
            let cls = classify(&p);
            let cond13 = cls.witness.map(|w| w.cond_1_3);
            let label = format!("N={n} alpha={a}");
            let tag_ok = cls.tag == RegionTag::NoSolutionStableHalfBalls;
            let cond_ok = cond13.is_some_and(|k| k.holds && (k.lhs - k.rhs).abs() <= 1e-12);
            match stability_margin(&p, DEFAULT_TOL) {
                Ok(m) => c.push(
                    label,
                    tag_ok && cond_ok && m >= -1e-9,
                    format!(
                        "tag {}, cond_1_3 {} <= {}, stability margin {}",
                        cls.tag,
                        cond13.map(|k| sig(k.lhs)).unwrap_or_default(),
                        cond13.map(|k| sig(k.rhs)).unwrap_or_default(),
                        sig(m)
                    ),
                ),
                Err(e) => c.push(label, false, e.to_string()),
            }
        }
    }
    c.0
}

fn criterion_9(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    for p in [
        WeightParams::new(2, 1.0, 0.0, -0.5),
        WeightParams::new(3, 1.5, 0.5, 0.3),
    ] {
        let ball = divergence_check(&p, &TrialDomain::DoubledHalfBall { radius: 1.0 });
        match ball {
            Ok(d) => c.push(
                format!("ball N={}: lhs = mid = rhs", p.dim),
                d.lhs_mid_rel() <= 1e-8 && d.mid_rhs_rel() <= 1e-8,
                format!(
                    "|lhs-mid| {} |mid-rhs| {}",
                    sig(d.lhs_mid_rel()),
                    sig(d.mid_rhs_rel())
                ),
            ),
            Err(e) => c.push(format!("ball N={}", p.dim), false, e.to_string()),
        }
        let mut semiaxes = vec![1.0; p.dim];
        semiaxes[p.dim - 1] = 2.0;
        match divergence_check(&p, &TrialDomain::DoubledHalfEllipsoid { semiaxes }) {
            Ok(d) => c.push(
                format!("ellipsoid N={}: lhs = mid < rhs", p.dim),
                d.lhs_mid_rel() <= 1e-8 && d.strict_margin() > 1e-6,
                format!(
                    "|lhs-mid| {} strict margin {}",
                    sig(d.lhs_mid_rel()),
                    sig(d.strict_margin())
                ),
            ),
            Err(e) => c.push(format!("ellipsoid N={}", p.dim), false, e.to_string()),
        }
    }
    c.0
}

fn criterion_10(o: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let h = RadialWeight::shifted_gaussian();
    let d0 = match find_d0(&h, 1.0, 2) {
        Ok(r) => {
            let cert = &r.certificate;
            c.push(
                "d0 > 0 with both conditions certified",
                r.d0 > 0.0 && cert.holds(),
                format!(
                    "d0 {}; R <= R0-2rho: {} <= {}; h(R0-2d)^N < h(R)h(R0)^(N-1): {} < {}",
                    sig(r.d0),
                    sig(cert.radii_fit.0),
                    sig(cert.radii_fit.1),
                    sig(cert.density_bound.0),
                    sig(cert.density_bound.1)
                ),
            );
            r.d0
        }
        Err(e) => {
            c.push("find d0", false, e.to_string());
            return c.0;
        }
    };
    let rec = match lemma51_construct(&h, 2, 1.0, 0.5 * d0) {
        Ok(r) => r,
        Err(e) => {
            c.push("construction at d0/2", false, e.to_string());
            return c.0;
        }
    };
    c.push(
        "P_offcenter < P_centered with relative margin > 1e-3",
        rec.relative_margin() > 1e-3,
        format!(
            "{} < {}, margin {}",
            sig(rec.p_offcenter),
            sig(rec.p_centered),
            sig(rec.relative_margin())
        ),
    );
    c.push(
        "rho(d) < (h(R)/h(R0))^(1/N) R(d)",
        rec.radius_bound_holds(),
        format!("{} vs {}", sig(rec.radius_bound.0), sig(rec.radius_bound.1)),
    );
    match offcenter_monte_carlo(&h, 2, rec.y_d, rec.rho_d, o.mc_samples, o.seed) {
        Ok(mc) => {
            let zm = mc.measure.sigmas_from(rec.d);
            let zp = mc.perimeter.sigmas_from(rec.p_offcenter);
            c.push(
                "Monte Carlo agrees within 3 sigma",
                zm <= 3.0 && zp <= 3.0,
                format!(
                    "measure {} sigma, perimeter {} sigma, {} samples",
                    sig(zm),
                    sig(zp),
                    o.mc_samples
                ),
            );
        }
        Err(e) => c.push("Monte Carlo", false, e.to_string()),
    }
    c.0
}

fn criterion_11(_: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let w = PowerLawPair {
        f_exp: 1.0,
        beta: 1.0,
        c1: 1.0,
        c2: 1.0,
        dim: 2,
    };
    match vanishing_family(&w, 1.0, &log_spaced(1e2, 1e4, 12)) {
        Ok(t) => {
            c.push(
                "tail slope -0.5 +- 0.02",
                (t.tail_slope + 0.5).abs() <= 0.02,
                format!(
                    "slope {} (stderr {})",
                    sig(t.tail_slope),
                    sig(t.tail_slope_stderr)
                ),
            );
            c.push(
                "P_f(1e4) < 0.1 P_f(1e2)",
                t.decay_factor() < 0.1,
                format!("factor {}", sig(t.decay_factor())),
            );
            let first = &t.rows[0];
            let last = &t.rows[t.rows.len() - 1];
            let (g0, g1) = (first.t - first.r_t, last.t - last.r_t);
            c.push(
                "t - R_t increasing and unbounded",
                t.gap_increasing && g1 > 10.0 * g0,
                format!("t - R_t from {} to {}", sig(g0), sig(g1)),
            );
        }
        Err(e) => c.push("vanishing family", false, e.to_string()),
    }
    match vanishing_family(&w, 1.0, &log_spaced(1e1, 1e8, 15)) {
        Ok(t) => c.push(
            "extended grid: tail decreasing, P_f(1e8) < 1e-3 P_f(1e1)",
            t.tail_decreasing && t.decay_factor() < 1e-3,
            format!("factor {}", sig(t.decay_factor())),
        ),
        Err(e) => c.push("extended grid", false, e.to_string()),
    }
    c.0
}

fn criterion_12(o: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x5754);
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let dim = 2 + i % 3;
        // a uniform direction with radius up to 0.999
        let v: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let r: f64 = rng.gen_range(0.0..0.999);
        let y = DiskPoint::new(v.iter().map(|x| x / len * r).collect()).expect("inside the disk");
        let back = to_disk(&from_disk(&y));
        let e1 =
            y.y.iter()
                .zip(&back.y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        let p = from_disk(&y);
        let again = from_disk(&to_disk(&p));
        let e2 = p
            .zeta
            .iter()
            .zip(&again.zeta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(e1).max(e2);
    }
    c.push(
        "round trip on 1e4 random points",
        worst <= 1e-12,
        format!("max error {}", sig(worst)),
    );
    let s = o.sigma_scale;
    c.worst(
        "stereographic sigma vs spherical sigma",
        1e-8,
        SIGMA_TABLE,
        |&(n, a, _)| {
            let sph = sigma_alpha(n, a).map_err(|e| e.to_string())?;
            sigma_alpha_stereographic(n, a)
                .map(|x| rel(x, s * sph))
                .map_err(|e| e.to_string())
        },
        |&(n, a, _)| format!("N={n} alpha={a}"),
    );
    type Field = fn(&[f64]) -> f64;
    let fields: [(&str, Field); 3] = [
        ("y1", |y| y[0]),
        ("|y|^2", |y| y.iter().map(|v| v * v).sum()),
        ("sin(y1) exp(y2)", |y| {
            y[0].sin() * y.get(1).copied().unwrap_or(0.0).exp()
        }),
    ];
    let points = [
        vec![0.0, 0.0],
        vec![0.3, -0.2],
        vec![-0.5, 0.6],
        vec![0.1, 0.2, -0.4],
    ];
    for (name, f) in fields {
        c.worst(
            &format!("gradient pullback for {name}"),
            1e-5,
            points.iter(),
            |y| gradient_pullback_check(f, &DiskPoint::new((*y).clone())?).map(|p| p.gap()),
            |y| format!("y={y:?}"),
        );
    }
    c.0
}

fn criterion_13(o: &VerifyOptions) -> Vec<Check> {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed.wrapping_add(13));
    for i in 0..5u64 {
        let p = random_params(&mut rng);
        let radius = rng.gen_range(0.4..1.0);
        let domain = TrialDomain::OnWallBall {
            t: radius + rng.gen_range(0.3..2.0),
            radius,
        };
        let label = format!("case {}: {p:?} {domain:?}", i + 1);
        let q = measure_ball(&p, &domain);
        let mc = mc_measure(&p, &domain, o.mc_samples, o.seed.wrapping_add(100 + i));
        match (q, mc) {
            (Ok(q), Ok(mc)) => {
                let z = mc.sigmas_from(q.value);
                c.push(
                    label,
                    z <= 3.0,
                    format!(
                        "quadrature {} MC {} ({} sigma)",
                        sig(q.value),
                        sig(mc.value()),
                        sig(z)
                    ),
                );
            }
            (Err(e), _) => c.push(label, false, e.to_string()),
            (_, Err(e)) => c.push(label, false, e.to_string()),
        }
    }
    c.0
}

type Runner = fn(&VerifyOptions) -> Vec<Check>;

const CRITERIA: [(u8, &str, Runner); 13] = [
    (1, "first Neumann eigenvalue equals N+alpha-1", criterion_1),
    (
        2,
        "Dirichlet eigenvalue and eigenfunction on the half-sphere",
        criterion_2,
    ),
    (
        3,
        "weak-form defects of the exact eigenfunctions",
        criterion_3,
    ),
    (
        4,
        "strict eigenvalue chain and nodal-angle cross-check",
        criterion_4,
    ),
    (5, "closed-form measure oracles", criterion_5),
    (6, "homogeneity of the half-ball ratio", criterion_6),
    (7, "ratio decay along the up-axis family", criterion_7),
    (8, "classification of the model case", criterion_8),
    (9, "divergence identity for k = l+1", criterion_9),
    (
        10,
        "off-centre balls beat centred balls for a decreasing log-convex density",
        criterion_10,
    ),
    (
        11,
        "balls escaping to infinity with vanishing perimeter",
        criterion_11,
    ),
    (12, "stereographic consistency", criterion_12),
    (13, "quadrature agrees with Monte Carlo", criterion_13),
];

/// Runs the selected criteria in order.
pub fn run(options: &VerifyOptions) -> VerifyReport {
    let criteria = CRITERIA
        .iter()
        .filter(|(id, _, _)| options.selected(*id))
        .map(|&(id, title, runner)| CriterionResult {
            id,
            group: Group::of(id),
            title,
            checks: runner(options),
        })
        .collect();
    VerifyReport { criteria }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_parse() {
        assert_eq!(
            "eigen".parse::<Selector>().unwrap(),
            Selector::Group(Group::Eigen)
        );
        assert_eq!("7".parse::<Selector>().unwrap(), Selector::Criterion(7));
        assert!("14".parse::<Selector>().is_err());
        assert!("plots".parse::<Selector>().is_err());
    }

    #[test]
    fn only_filter_selects_groups() {
        let o = VerifyOptions {
            only: vec![Selector::Group(Group::Classify)],
            ..Default::default()
        };
        let report = run(&o);
        assert_eq!(report.criteria.len(), 1);
        assert_eq!(report.criteria[0].id, 8);
        assert!(report.all_passed(), "{}", report.criteria[0]);
    }

    #[test]
    fn sigma_fault_is_caught() {
        let o = VerifyOptions {
            only: vec![Selector::Criterion(5)],
            sigma_scale: 1.001,
            ..Default::default()
        };
        assert!(!run(&o).all_passed());
        let o = VerifyOptions {
            only: vec![Selector::Criterion(5)],
            ..Default::default()
        };
        assert!(run(&o).all_passed());
    }
}
