//! Command-line front end.
//!
//! Every run is described by a [`RunConfig`]. It can come from a TOML or JSON
//! file (`--config`), and command-line flags override the file. Results go to
//! `--output`, to `$WISOLAB_OUTPUT_DIR/<command>.<ext>`, or to stdout. A run
//! manifest (merged config, library version, seed) is written next to the
//! results, or to stderr when results go to stdout.
//!
//! Exit codes: 0 success, 1 failed acceptance items or I/O failure, 2 invalid
//! configuration, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::format::sig;
use crate::geometry::{c_rad, evaluate, GeometryError, TrialDomain};
use crate::params::{classify, sweep_grid, GridSpec, RegionClass, WeightParams};
use crate::spectral::{lambda1_dirichlet, mu1_report, SpectralError, DEFAULT_TOL};
use crate::sweeps::{
    find_d0, lemma51_construct, log_spaced, offcenter_monte_carlo, run_sweep, vanishing_family,
    Family, PowerLawPair, RadialWeight, SweepError, DEFAULT_TAIL_FRACTION,
};
use crate::verify::{self, Selector, VerifyOptions};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "WISOLAB_OUTPUT_DIR";
/// Version of the JSON documents written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Classify,
    Eigen,
    Ratio,
    Sweep,
    Counterexample,
    Vanish,
    Verify,
}

impl CommandName {
    fn name(self) -> &'static str {
        match self {
            CommandName::Classify => "classify",
            CommandName::Eigen => "eigen",
            CommandName::Ratio => "ratio",
            CommandName::Sweep => "sweep",
            CommandName::Counterexample => "counterexample",
            CommandName::Vanish => "vanish",
            CommandName::Verify => "verify",
        }
    }

    fn default_format(self) -> Format {
        match self {
            CommandName::Classify | CommandName::Sweep | CommandName::Vanish => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Weight parameters; missing `k` and `l` default to 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

/// Parameter grid; missing `k` and `l` lists default to `[0]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(flatten)]
    pub grid: TGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<RadialWeight>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VanishConfig {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(flatten)]
    pub grid: TGrid,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
}

/// Full description of one run. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<TrialDomain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanish: Option<VanishConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl RunConfig {
    /// Reads a config file; `.json` is parsed as JSON, anything else as TOML.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("{0} acceptance item(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::VerifyFailed(_) => 1,
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::InvalidProblem(_) | SpectralError::Admissibility(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Admissibility(_)
            | GeometryError::Domain(_)
            | GeometryError::NotRadialCase { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Admissibility(_)
            | SweepError::Grid(_)
            | SweepError::Weight(_)
            | SweepError::Hypothesis(_)
            | SweepError::MeasureTooLarge { .. } => CliError::Config(e.to_string()),
            SweepError::Geometry(g) => g.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<crate::params::AdmissibilityError> for CliError {
    fn from(e: crate::params::AdmissibilityError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "wisolab",
    version,
    about = "Weighted isoperimetric laboratory on the half-space"
)]
pub struct Cli {
    /// TOML or JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default: $WISOLAB_OUTPUT_DIR/<command>.<ext>, else stdout).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 1 gives the reference baseline.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify one parameter point or a grid.
    Classify(ClassifyArgs),
    /// Weighted eigenvalues on the upper half-sphere.
    Eigen(EigenArgs),
    /// Weighted measure, perimeter and ratio of a trial domain.
    Ratio(RatioArgs),
    /// Ratio decay along a family of translated balls.
    Sweep(SweepArgs),
    /// Off-centre balls against centred balls for a radial density.
    Counterexample(CounterexampleArgs),
    /// Balls escaping to infinity under power-law densities.
    Vanish(VanishArgs),
    /// Run the acceptance battery.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
pub struct ParamArgs {
    #[arg(long = "N")]
    pub dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct TGridArgs {
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Grid values of N, comma separated.
    #[arg(long = "grid-N", value_delimiter = ',')]
    pub grid_dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid_k: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid_l: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid_alpha: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also solve the Dirichlet problem on the cap `{θ < θ̃}`.
    #[arg(long)]
    pub theta_tilde: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    HalfBall,
    UpAxis,
    OnWall,
    DoubledBall,
    Ellipsoid,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    /// Distance of the centre from the origin (up-axis, on-wall).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub semiaxes: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub family: Option<Family>,
    #[command(flatten)]
    pub grid: TGridArgs,
    #[arg(long)]
    pub tail_fraction: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long = "N")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub r0: Option<f64>,
    /// Coefficients of `q` in `h = exp(q(r))`, lowest degree first.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "power"
    )]
    pub coeffs: Option<Vec<f64>>,
    /// Exponent `p` in `h = r^p`.
    #[arg(long, allow_negative_numbers = true)]
    pub power: Option<f64>,
    /// Measure of the compared balls (default: half the certified d0).
    #[arg(long)]
    pub d: Option<f64>,
    /// Monte Carlo samples for the cross-check; 0 skips it.
    #[arg(long)]
    pub mc_samples: Option<u64>,
}

#[derive(Args, Debug)]
pub struct VanishArgs {
    #[arg(long = "N")]
    pub dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub f_exp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[command(flatten)]
    pub grid: TGridArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Criterion numbers or groups (eigen, geometry, sweep, classify,
    /// counterexample, vanish, stereo, mc), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    #[arg(long)]
    pub mc_samples: Option<u64>,
    /// Scale applied to computed σ_α values; a fault-injection hook.
    #[arg(long, hide = true)]
    pub sigma_scale: Option<f64>,
}

fn or<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn merge_params(file: Option<ParamsConfig>, a: ParamArgs) -> Option<ParamsConfig> {
    let f = file.unwrap_or_default();
    let p = ParamsConfig {
        dim: or(a.dim, f.dim),
        k: or(a.k, f.k),
        l: or(a.l, f.l),
        alpha: or(a.alpha, f.alpha),
    };
    (p != ParamsConfig::default()).then_some(p)
}

fn merge_tgrid(file: TGrid, a: TGridArgs) -> TGrid {
    TGrid {
        t_min: or(a.t_min, file.t_min),
        t_max: or(a.t_max, file.t_max),
        points: or(a.points, file.points),
    }
}

/// Applies command-line flags on top of a file config.
pub fn merge(mut cfg: RunConfig, cli: Cli) -> Result<(RunConfig, Option<f64>), CliError> {
    cfg.output_path = or(cli.output, cfg.output_path);
    cfg.format = or(cli.format, cfg.format);
    cfg.jobs = or(cli.jobs, cfg.jobs);
    cfg.seed = or(cli.seed, cfg.seed);
    cfg.tol = or(cli.tol, cfg.tol);
    let mut sigma_scale = None;
    let Some(command) = cli.command else {
        return if cfg.command.is_some() {
            Ok((cfg, None))
        } else {
            Err(CliError::Config(
                "no command given on the command line or in the config file".into(),
            ))
        };
    };
    let name = match command {
        Command::Classify(a) => {
            cfg.params = merge_params(cfg.params.take(), a.params);
            if a.grid_dims.is_some()
                || a.grid_k.is_some()
                || a.grid_l.is_some()
                || a.grid_alpha.is_some()
            {
                let g = cfg.grid.take().unwrap_or_default();
                cfg.grid = Some(GridConfig {
                    dims: or(a.grid_dims, g.dims),
                    k: or(a.grid_k, g.k),
                    l: or(a.grid_l, g.l),
                    alpha: or(a.grid_alpha, g.alpha),
                });
            }
            CommandName::Classify
        }
        Command::Eigen(a) => {
            cfg.params = merge_params(cfg.params.take(), a.params);
            cfg.theta_tilde = or(a.theta_tilde, cfg.theta_tilde);
            CommandName::Eigen
        }
        Command::Ratio(a) => {
            cfg.params = merge_params(cfg.params.take(), a.params);
            if let Some(kind) = a.domain {
                let radius = a.radius.unwrap_or(1.0);
                let need_t = || {
                    a.t.ok_or_else(|| CliError::Config("--t is required for this domain".into()))
                };
                cfg.domain = Some(match kind {
                    DomainKind::HalfBall => TrialDomain::HalfBall { radius },
                    DomainKind::DoubledBall => TrialDomain::DoubledHalfBall { radius },
                    DomainKind::UpAxis => TrialDomain::UpAxisBall {
                        t: need_t()?,
                        radius,
                    },
                    DomainKind::OnWall => TrialDomain::OnWallBall {
                        t: need_t()?,
                        radius,
                    },
                    DomainKind::Ellipsoid => TrialDomain::DoubledHalfEllipsoid {
                        semiaxes: a.semiaxes.clone().ok_or_else(|| {
                            CliError::Config("--semiaxes is required for an ellipsoid".into())
                        })?,
                    },
                });
            } else if a.t.is_some() || a.radius.is_some() || a.semiaxes.is_some() {
                return Err(CliError::Config(
                    "--t, --radius and --semiaxes need --domain".into(),
                ));
            }
            CommandName::Ratio
        }
        Command::Sweep(a) => {
            cfg.params = merge_params(cfg.params.take(), a.params);
            let s = cfg.sweep.take().unwrap_or_default();
            cfg.sweep = Some(SweepConfig {
                family: or(a.family, s.family),
                grid: merge_tgrid(s.grid, a.grid),
                tail_fraction: or(a.tail_fraction, s.tail_fraction),
            });
            CommandName::Sweep
        }
        Command::Counterexample(a) => {
            let c = cfg.counterexample.take().unwrap_or_default();
            let weight = match (a.coeffs, a.power) {
                (Some(coeffs), _) => Some(RadialWeight::LogconvexPoly { coeffs }),
                (None, Some(p)) => Some(RadialWeight::Power { p }),
                (None, None) => c.weight,
            };
            cfg.counterexample = Some(CounterexampleConfig {
                dim: or(a.dim, c.dim),
                weight,
                r0: or(a.r0, c.r0),
                d: or(a.d, c.d),
                mc_samples: or(a.mc_samples, c.mc_samples),
            });
            CommandName::Counterexample
        }
        Command::Vanish(a) => {
            let v = cfg.vanish.take().unwrap_or_default();
            cfg.vanish = Some(VanishConfig {
                dim: or(a.dim, v.dim),
                f_exp: or(a.f_exp, v.f_exp),
                beta: or(a.beta, v.beta),
                c1: or(a.c1, v.c1),
                c2: or(a.c2, v.c2),
                d: or(a.d, v.d),
                grid: merge_tgrid(v.grid, a.grid),
            });
            CommandName::Vanish
        }
        Command::Verify(a) => {
            let v = cfg.verify.take().unwrap_or_default();
            cfg.verify = Some(VerifyConfig {
                only: or(a.only, v.only),
                mc_samples: or(a.mc_samples, v.mc_samples),
            });
            sigma_scale = a.sigma_scale;
            CommandName::Verify
        }
    };
    cfg.command = Some(name);
    Ok((cfg, sigma_scale))
}

/// A number rounded to the emitted precision, `null` when not finite.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(sig(x).parse::<f64>().expect("formatted float parses"))
    } else {
        Value::Null
    }
}

fn params_json(p: &WeightParams) -> Value {
    json!({"N": p.dim, "k": num(p.k), "l": num(p.l), "alpha": num(p.alpha)})
}

fn pair_json(pair: (f64, f64), holds: bool) -> Value {
    json!({"lhs": num(pair.0), "rhs": num(pair.1), "holds": holds})
}

fn document(command: CommandName, body: Value) -> Value {
    json!({"schema_version": SCHEMA_VERSION, "command": command.name(), "result": body})
}

/// Rendered output of one command.
struct Rendered {
    body: String,
    ext: &'static str,
    /// Extra JSON written next to CSV results.
    summary: Option<Value>,
    /// Failed acceptance items, for the exit code.
    failures: usize,
}

fn json_output(command: CommandName, body: Value) -> Rendered {
    let text = serde_json::to_string_pretty(&document(command, body)).expect("serializable") + "\n";
    Rendered {
        body: text,
        ext: "json",
        summary: None,
        failures: 0,
    }
}

fn require<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing {what}")))
}

fn weight_params(p: &Option<ParamsConfig>) -> Result<WeightParams, CliError> {
    let p = require(p.clone(), "params (--N, --alpha)")?;
    let wp = WeightParams::new(
        require(p.dim, "N (--N)")?,
        p.k.unwrap_or(0.0),
        p.l.unwrap_or(0.0),
        require(p.alpha, "alpha (--alpha)")?,
    );
    wp.validate()?;
    Ok(wp)
}

fn tol(cfg: &RunConfig) -> Result<f64, CliError> {
    let t = cfg.tol.unwrap_or(DEFAULT_TOL);
    if !(t > 0.0 && t < 1.0) {
        return Err(CliError::Config(format!("tol must lie in (0, 1), got {t}")));
    }
    Ok(t)
}

fn t_grid(g: &TGrid, default: (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
    let (a, b, n) = (
        g.t_min.unwrap_or(default.0),
        g.t_max.unwrap_or(default.1),
        g.points.unwrap_or(default.2),
    );
    if !(a > 0.0 && b > a) || n < 2 {
        return Err(CliError::Config(format!(
            "need 0 < t_min < t_max and points >= 2, got {a}, {b}, {n}"
        )));
    }
    Ok(log_spaced(a, b, n))
}

fn classify_row(out: &mut String, p: &WeightParams, c: &RegionClass) {
    let flag = |b: bool| if b { "true" } else { "false" };
    let _ = write!(
        out,
        "{},{},{},{},{}",
        p.dim,
        sig(p.k),
        sig(p.l),
        sig(p.alpha),
        c.tag
    );
    match &c.witness {
        Some(w) => {
            let _ = writeln!(
                out,
                ",{},{},{},{},{}",
                flag(w.cond_1_1.holds),
                flag(w.cond_1_2.holds),
                flag(w.cond_1_3.holds),
                flag(w.nec1.holds),
                flag(w.nec2.holds)
            );
        }
        None => out.push_str(",,,,,\n"),
    }
}

fn classify_json(p: &WeightParams, c: &RegionClass) -> Value {
    let cmp = |x: &crate::params::Comparison| pair_json((x.lhs, x.rhs), x.holds);
    json!({
        "params": params_json(p),
        "tag": c.tag.to_string(),
        "conditions": c.witness.as_ref().map(|w| json!({
            "cond_1_1": cmp(&w.cond_1_1),
            "cond_1_2": cmp(&w.cond_1_2),
            "cond_1_3": cmp(&w.cond_1_3),
            "nec1": cmp(&w.nec1),
            "nec2": cmp(&w.nec2),
            "k_ge_l_plus_1": w.k_ge_l_plus_1,
        })),
        "invalid_reason": c.invalid_reason,
    })
}

fn run_classify(cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let rows: Vec<(WeightParams, RegionClass)> = match &cfg.grid {
        Some(g) => {
            let spec = GridSpec {
                dims: require(g.dims.clone(), "grid N")?,
                k: g.k.clone().unwrap_or_else(|| vec![0.0]),
                l: g.l.clone().unwrap_or_else(|| vec![0.0]),
                alpha: require(g.alpha.clone(), "grid alpha")?,
            };
            if spec.is_empty() {
                return Err(CliError::Config("empty grid".into()));
            }
            sweep_grid(&spec)
        }
        None => {
            let p = weight_params(&cfg.params)?;
            vec![(p, classify(&p))]
        }
    };
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("N,k,l,alpha,tag,cond_1_1,cond_1_2,cond_1_3,nec1,nec2\n");
            for (p, c) in &rows {
                classify_row(&mut out, p, c);
            }
            Rendered {
                body: out,
                ext: "csv",
                summary: None,
                failures: 0,
            }
        }
        Format::Json => json_output(
            CommandName::Classify,
            Value::Array(rows.iter().map(|(p, c)| classify_json(p, c)).collect()),
        ),
    })
}

fn run_eigen(cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let p = require(cfg.params.clone(), "params (--N, --alpha)")?;
    let dim = require(p.dim, "N (--N)")?;
    let alpha = require(p.alpha, "alpha (--alpha)")?;
    WeightParams::new(dim, p.k.unwrap_or(0.0), p.l.unwrap_or(0.0), alpha).validate()?;
    let tol = tol(cfg)?;
    let r = mu1_report(dim, alpha, tol)?;
    let equator = lambda1_dirichlet(dim, alpha, std::f64::consts::FRAC_PI_2, tol)?;
    let cap = cfg
        .theta_tilde
        .map(|t| lambda1_dirichlet(dim, alpha, t, tol))
        .transpose()?;
    let n = dim as f64;
    let fields = [
        ("mu1", r.mu1),
        ("mu0", r.mu0),
        ("mu_m1", r.mu_m1),
        ("mu1_expected", n + alpha - 1.0),
        ("lambda1_equator", equator),
        ("lambda1_equator_expected", (n - 1.0) * (1.0 - alpha)),
    ];
    Ok(match format {
        Format::Csv => {
            let mut head = String::from("N,alpha");
            let mut row = format!("{dim},{}", sig(alpha));
            for (k, v) in fields {
                let _ = write!(head, ",{k}");
                let _ = write!(row, ",{}", sig(v));
            }
            if let (Some(t), Some(v)) = (cfg.theta_tilde, cap) {
                let _ = write!(head, ",theta_tilde,lambda1_cap");
                let _ = write!(row, ",{},{}", sig(t), sig(v));
            }
            Rendered {
                body: format!("{head}\n{row}\n"),
                ext: "csv",
                summary: None,
                failures: 0,
            }
        }
        Format::Json => {
            let mut body = json!({"N": dim, "alpha": num(alpha), "tol": num(tol)});
            for (k, v) in fields {
                body[k] = num(v);
            }
            if let (Some(t), Some(v)) = (cfg.theta_tilde, cap) {
                body["theta_tilde"] = num(t);
                body["lambda1_cap"] = num(v);
            }
            json_output(CommandName::Eigen, body)
        }
    })
}

fn run_ratio(cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let p = weight_params(&cfg.params)?;
    let domain = cfg
        .domain
        .clone()
        .unwrap_or(TrialDomain::HalfBall { radius: 1.0 });
    let r = evaluate(&p, &domain)?;
    let crad = c_rad(&p)?;
    Ok(match format {
        Format::Csv => {
            Rendered {
                body: format!(
                "N,k,l,alpha,domain,measure,perimeter,ratio,c_rad\n{},{},{},{},{},{},{},{},{}\n",
                p.dim,
                sig(p.k),
                sig(p.l),
                sig(p.alpha),
                serde_json::to_string(&domain).expect("serializable").replace(',', ";"),
                sig(r.measure.value),
                sig(r.perimeter.value),
                sig(r.ratio),
                sig(crad)
            ),
                ext: "csv",
                summary: None,
                failures: 0,
            }
        }
        Format::Json => json_output(
            CommandName::Ratio,
            json!({
                "params": params_json(&p),
                "domain": domain,
                "measure": num(r.measure.value),
                "measure_error_estimate": num(r.measure.error_estimate),
                "perimeter": num(r.perimeter.value),
                "perimeter_error_estimate": num(r.perimeter.error_estimate),
                "ratio": num(r.ratio),
                "c_rad": num(crad),
            }),
        ),
    })
}

fn run_sweep_cmd(cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let p = weight_params(&cfg.params)?;
    let s = cfg.sweep.clone().unwrap_or_default();
    let family = s.family.unwrap_or(Family::UpAxis);
    let grid = t_grid(&s.grid, (10.0, 1e3, 12))?;
    let res = run_sweep(
        &p,
        family,
        &grid,
        s.tail_fraction.unwrap_or(DEFAULT_TAIL_FRACTION),
    )?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "params": params_json(&p),
        "family": family.to_string(),
        "fitted_slope": num(res.fitted_slope),
        "slope_stderr": num(res.slope_stderr),
        "predicted_slope": num(res.predicted_slope),
        "tail_fraction": num(res.tail_fraction),
    });
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("t,ratio,measure,perimeter,error\n");
            for r in &res.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    sig(r.t),
                    sig(r.ratio),
                    sig(r.measure),
                    sig(r.perimeter),
                    r.error.as_deref().unwrap_or("").replace(',', ";")
                );
            }
            Rendered {
                body: out,
                ext: "csv",
                summary: Some(summary),
                failures: 0,
            }
        }
        Format::Json => {
            let rows: Vec<Value> = res
                .rows
                .iter()
                .map(|r| {
                    json!({"t": num(r.t), "ratio": num(r.ratio), "measure": num(r.measure),
                           "perimeter": num(r.perimeter), "error": r.error})
                })
                .collect();
            let mut body = summary;
            body["rows"] = Value::Array(rows);
            json_output(CommandName::Sweep, body)
        }
    })
}

fn run_counterexample(cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let c = cfg.counterexample.clone().unwrap_or_default();
    let dim = c.dim.unwrap_or(2);
    let r0 = c.r0.unwrap_or(1.0);
    let h = c
        .weight
        .clone()
        .unwrap_or_else(RadialWeight::shifted_gaussian);
    let certified = if c.d.is_none() {
        Some(find_d0(&h, r0, dim)?)
    } else {
        None
    };
    let d =
        c.d.unwrap_or_else(|| 0.5 * certified.as_ref().expect("computed above").d0);
    let rec = lemma51_construct(&h, dim, r0, d)?;
    let mc = match c.mc_samples.unwrap_or(0) {
        0 => None,
        n => Some(offcenter_monte_carlo(
            &h,
            dim,
            rec.y_d,
            rec.rho_d,
            n,
            cfg.seed.unwrap_or(verify::DEFAULT_SEED),
        )?),
    };
    let chain: Vec<Value> = rec
        .chain
        .iter()
        .map(|s| json!({"step": s.label, "lhs": num(s.lhs), "rhs": num(s.rhs), "strict": s.strict}))
        .collect();
    let body = json!({
        "N": dim,
        "r0": num(r0),
        "weight": h,
        "d0": certified.as_ref().map(|c| num(c.d0)),
        "certificate": certified.as_ref().map(|c| {
            let k = &c.certificate;
            json!({
                "radii_fit": pair_json(k.radii_fit, k.radii_fit.0 <= k.radii_fit.1),
                "density_bound": pair_json(k.density_bound, k.density_bound.0 < k.density_bound.1),
                "density_bound_rho": pair_json(k.density_bound_rho, k.density_bound_rho.0 < k.density_bound_rho.1),
            })
        }),
        "d": num(d),
        "r_d": num(rec.r_d),
        "rho_d": num(rec.rho_d),
        "y_d": num(rec.y_d),
        "p_centered": num(rec.p_centered),
        "p_offcenter": num(rec.p_offcenter),
        "relative_margin": num(rec.relative_margin()),
        "radius_bound": pair_json(rec.radius_bound, rec.radius_bound_holds()),
        "chain": chain,
        "monte_carlo": mc.map(|m| json!({
            "measure": num(m.measure.value()),
            "measure_std_error": num(m.measure.std_error()),
            "measure_sigmas": num(m.measure.sigmas_from(d)),
            "perimeter": num(m.perimeter.value()),
            "perimeter_std_error": num(m.perimeter.std_error()),
            "perimeter_sigmas": num(m.perimeter.sigmas_from(rec.p_offcenter)),
        })),
    });
    Ok(match format {
        Format::Json => json_output(CommandName::Counterexample, body),
        Format::Csv => Rendered {
            body: format!(
                "d,r_d,rho_d,y_d,p_centered,p_offcenter,relative_margin\n{},{},{},{},{},{},{}\n",
                sig(d),
                sig(rec.r_d),
                sig(rec.rho_d),
                sig(rec.y_d),
                sig(rec.p_centered),
                sig(rec.p_offcenter),
                sig(rec.relative_margin())
            ),
            ext: "csv",
            summary: Some(document(CommandName::Counterexample, body)),
            failures: 0,
        },
    })
}

fn run_vanish(cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let v = cfg.vanish.clone().unwrap_or_default();
    let w = PowerLawPair {
        f_exp: v.f_exp.unwrap_or(1.0),
        beta: v.beta.unwrap_or(1.0),
        c1: v.c1.unwrap_or(1.0),
        c2: v.c2.unwrap_or(1.0),
        dim: v.dim.unwrap_or(2),
    };
    let d = v.d.unwrap_or(1.0);
    let table = vanishing_family(&w, d, &t_grid(&v.grid, (1e2, 1e4, 12))?)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "weights": {"N": w.dim, "f_exp": num(w.f_exp), "beta": num(w.beta), "c1": num(w.c1), "c2": num(w.c2)},
        "d": num(d),
        "tail_slope": num(table.tail_slope),
        "tail_slope_stderr": num(table.tail_slope_stderr),
        "decay_factor": num(table.decay_factor()),
        "tail_decreasing": table.tail_decreasing,
        "gap_increasing": table.gap_increasing,
        "delta_observed": num(table.delta_observed),
    });
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("t,R_t,P_f,t_minus_R_t\n");
            for r in &table.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    sig(r.t),
                    sig(r.r_t),
                    sig(r.p_f),
                    sig(r.t - r.r_t)
                );
            }
            Rendered {
                body: out,
                ext: "csv",
                summary: Some(summary),
                failures: 0,
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| json!({"t": num(r.t), "R_t": num(r.r_t), "P_f": num(r.p_f)}))
                .collect();
            let mut body = summary;
            body["rows"] = Value::Array(rows);
            json_output(CommandName::Vanish, body)
        }
    })
}

fn run_verify(
    cfg: &RunConfig,
    format: Option<Format>,
    sigma_scale: Option<f64>,
) -> Result<Rendered, CliError> {
    let v = cfg.verify.clone().unwrap_or_default();
    let only = v
        .only
        .unwrap_or_default()
        .iter()
        .map(|s| s.parse::<Selector>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::Config)?;
    let options = VerifyOptions {
        only,
        mc_samples: v.mc_samples.unwrap_or(verify::DEFAULT_MC_SAMPLES),
        seed: cfg.seed.unwrap_or(verify::DEFAULT_SEED),
        sigma_scale: sigma_scale.unwrap_or(1.0),
    };
    if options.mc_samples < crate::quadrature::MIN_SAMPLES {
        return Err(CliError::Config(format!(
            "mc_samples must be at least {}",
            crate::quadrature::MIN_SAMPLES
        )));
    }
    let report = verify::run(&options);
    let failures = report.criteria.iter().filter(|c| !c.passed()).count();
    let mut r = match format {
        Some(Format::Json) => json_output(
            CommandName::Verify,
            serde_json::to_value(&report).expect("serializable"),
        ),
        Some(Format::Csv) => {
            let mut out = String::from("criterion,group,status,check,passed,detail\n");
            for c in &report.criteria {
                for k in &c.checks {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        c.id,
                        c.group,
                        if c.passed() { "PASS" } else { "FAIL" },
                        k.label.replace(',', ";"),
                        k.passed,
                        k.detail.replace(',', ";")
                    );
                }
            }
            Rendered {
                body: out,
                ext: "csv",
                summary: None,
                failures: 0,
            }
        }
        None => {
            let mut out = String::new();
            for c in &report.criteria {
                let _ = writeln!(out, "{c}");
            }
            let _ = writeln!(
                out,
                "{} of {} criteria passed",
                report.criteria.len() - failures,
                report.criteria.len()
            );
            Rendered {
                body: out,
                ext: "txt",
                summary: None,
                failures: 0,
            }
        }
    };
    r.failures = failures;
    Ok(r)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs a merged configuration and writes its outputs.
pub fn execute(cfg: &RunConfig, sigma_scale: Option<f64>) -> Result<(), CliError> {
    let command = require(cfg.command, "command")?;
    let jobs = cfg.jobs.unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }
    let format = cfg.format.unwrap_or(command.default_format());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start {jobs} worker threads: {e}")))?;
    let rendered = pool.install(|| match command {
        CommandName::Classify => run_classify(cfg, format),
        CommandName::Eigen => run_eigen(cfg, format),
        CommandName::Ratio => run_ratio(cfg, format),
        CommandName::Sweep => run_sweep_cmd(cfg, format),
        CommandName::Counterexample => run_counterexample(cfg, format),
        CommandName::Vanish => run_vanish(cfg, format),
        CommandName::Verify => run_verify(cfg, cfg.format, sigma_scale),
    })?;

    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "seed": cfg.seed.unwrap_or(verify::DEFAULT_SEED),
        "jobs": jobs,
        "config": cfg,
    });
    let target = cfg.output_path.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{}.{}", command.name(), rendered.ext)))
    });
    match target {
        Some(path) => {
            write_file(&path, &rendered.body)?;
            if let Some(s) = &rendered.summary {
                write_file(
                    &sibling(&path, ".summary.json"),
                    &(serde_json::to_string_pretty(s).expect("serializable") + "\n"),
                )?;
            }
            let text = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
            write_file(&sibling(&path, ".manifest.json"), &text)?;
        }
        None => {
            print!("{}", rendered.body);
            if let Some(s) = &rendered.summary {
                eprintln!(
                    "summary: {}",
                    serde_json::to_string(s).expect("serializable")
                );
            }
            eprintln!(
                "manifest: {}",
                serde_json::to_string(&manifest).expect("serializable")
            );
        }
    }
    if rendered.failures > 0 {
        return Err(CliError::VerifyFailed(rendered.failures));
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| {
        let file = match &cli.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let (cfg, sigma_scale) = merge(file, cli)?;
        execute(&cfg, sigma_scale)
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
