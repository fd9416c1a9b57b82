//! Command-line grammar, the optional JSON config file, and the validated
//! [`RunConfig`] they resolve to.
//!
//! Precedence is: command-line flags, then the `--config` file, then the
//! `TSW_WORKERS` environment variable (workers only), then built-in
//! defaults.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tsw_core::channels::ChannelSpec;
use tsw_core::measures::DEFAULT_SLOPE_THRESHOLD;
use tsw_core::sdp::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use tsw_core::steering::{check_state, parse_pauli_labels, pauli_measurement_set, MeasurementSet};
use tsw_core::{Complex64, ComplexMatrix};

use crate::error::{CliError, Result};
use crate::io::read_matrix_file;
use crate::verify::GROUPS;

pub const WORKERS_ENV: &str = "TSW_WORKERS";
pub const DEFAULT_STEPS: usize = 201;
pub const DEFAULT_SWEEP_POINTS: usize = 11;
pub const DEFAULT_SEEDS: usize = 20;
pub const DEFAULT_RESTARTS: usize = 20;
/// Trace tolerance for an initial state read from a file.
pub const RHO0_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "tsw",
    version,
    about = "Temporal steerable weight of qubit channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write TSW(t) on a uniform time grid as CSV and report N_TSW
    Trace(Options),
    /// Write N_TSW as a function of one model parameter as CSV
    Sweep(Options),
    /// Evaluate the TSW of an assemblage stored as JSON
    Steer {
        /// Assemblage JSON file
        file: PathBuf,
        #[command(flatten)]
        opts: Options,
    },
    /// Run the invariant suites and report each group
    Verify(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Driven qubit with Markovian decay
    Rabi,
    /// Qubit exchanging excitations with an environment qubit
    Exchange,
    /// Amplitude damping by a Lorentzian reservoir
    Lorentzian,
}

/// Flags shared by every command. The same keys, in kebab case, are
/// accepted in the `--config` file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// JSON file supplying defaults for any of these flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Channel model [default: rabi]
    #[arg(long, value_enum, help_heading = "Model")]
    pub model: Option<ModelKind>,
    /// Rabi coupling g1 [default: 1]
    #[arg(long, help_heading = "Model")]
    pub g1: Option<f64>,
    /// Decay rate gamma1 of the rabi model [default: 0]
    #[arg(long, help_heading = "Model")]
    pub gamma1: Option<f64>,
    /// Exchange coupling J [default: 1]
    #[arg(long, help_heading = "Model")]
    pub j: Option<f64>,
    /// Decay rate gamma2 of the exchange model [default: 0]
    #[arg(long, help_heading = "Model")]
    pub gamma2: Option<f64>,
    /// Reservoir coupling g of the lorentzian model [default: 1]
    #[arg(long, help_heading = "Model")]
    pub g: Option<f64>,
    /// Reservoir spectral width [default: 1]
    #[arg(long, help_heading = "Model")]
    pub omega_w: Option<f64>,
    /// Measurement settings as Pauli labels, e.g. xyz or xz [default: xyz]
    #[arg(long, help_heading = "Model")]
    pub meas: Option<String>,
    /// Initial state: mixed, pure-z or file:<path> [default: mixed]
    #[arg(long, help_heading = "Model")]
    pub rho0: Option<String>,

    /// Final time [default: 10/g1, 2π/J or 60/omega-w]
    #[arg(long, help_heading = "Grid")]
    pub tmax: Option<f64>,
    /// Number of grid points including both ends [default: 201]
    #[arg(long, help_heading = "Grid")]
    pub steps: Option<usize>,
    /// Also compute the ancilla concurrence and N_C
    #[arg(long, help_heading = "Grid")]
    pub with_nc: bool,

    /// Swept parameter [default: gamma1, gamma2 or g]
    #[arg(long, help_heading = "Sweep")]
    pub param: Option<String>,
    /// First sweep value
    #[arg(long, help_heading = "Sweep")]
    pub from: Option<f64>,
    /// Last sweep value
    #[arg(long, help_heading = "Sweep")]
    pub to: Option<f64>,
    /// Number of sweep values [default: 11]
    #[arg(long, help_heading = "Sweep")]
    pub points: Option<usize>,

    /// Solver tolerance on the certified duality gap [default: 1e-8]
    #[arg(long, help_heading = "Solver")]
    pub tol: Option<f64>,
    /// Interior-point iteration cap [default: 500]
    #[arg(long, help_heading = "Solver")]
    pub max_iter: Option<usize>,
    /// Positive TSW increments up to this size count as noise [default: 1e-6]
    #[arg(long, help_heading = "Solver")]
    pub slope_threshold: Option<f64>,
    /// Worker threads [default: $TSW_WORKERS, else all cores]
    #[arg(long, help_heading = "Solver")]
    pub workers: Option<usize>,

    /// Seed of the random fixtures used by verify [default: 0]
    #[arg(long, help_heading = "Verify")]
    pub seed: Option<u64>,
    /// Random channels in the monotonicity battery [default: 20]
    #[arg(long, help_heading = "Verify")]
    pub seeds: Option<usize>,
    /// Restarts of the bracketing oracle per assemblage [default: 20]
    #[arg(long, help_heading = "Verify")]
    pub restarts: Option<usize>,
    /// Run only these groups (comma separated)
    #[arg(long, value_delimiter = ',', help_heading = "Verify")]
    pub group: Option<Vec<String>>,

    /// Write CSV here instead of standard output
    #[arg(long, help_heading = "Output")]
    pub out: Option<PathBuf>,
    /// Emit reports as JSON
    #[arg(long, help_heading = "Output")]
    pub json: bool,
}

impl Options {
    /// Fills every unset field of `self` from `file`.
    pub fn merged(self, file: Options) -> Options {
        Options {
            config: self.config,
            model: self.model.or(file.model),
            g1: self.g1.or(file.g1),
            gamma1: self.gamma1.or(file.gamma1),
            j: self.j.or(file.j),
            gamma2: self.gamma2.or(file.gamma2),
            g: self.g.or(file.g),
            omega_w: self.omega_w.or(file.omega_w),
            meas: self.meas.or(file.meas),
            rho0: self.rho0.or(file.rho0),
            tmax: self.tmax.or(file.tmax),
            steps: self.steps.or(file.steps),
            with_nc: self.with_nc || file.with_nc,
            param: self.param.or(file.param),
            from: self.from.or(file.from),
            to: self.to.or(file.to),
            points: self.points.or(file.points),
            tol: self.tol.or(file.tol),
            max_iter: self.max_iter.or(file.max_iter),
            slope_threshold: self.slope_threshold.or(file.slope_threshold),
            workers: self.workers.or(file.workers),
            seed: self.seed.or(file.seed),
            seeds: self.seeds.or(file.seeds),
            restarts: self.restarts.or(file.restarts),
            group: self.group.or(file.group),
            out: self.out.or(file.out),
            json: self.json || file.json,
        }
    }
}

pub fn read_config_file(path: &Path) -> Result<Options> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Trace,
    Sweep,
    Steer,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rho0 {
    /// `I/2`.
    Mixed,
    /// `|0⟩⟨0|`.
    PureZ,
    File(PathBuf),
}

impl Rho0 {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mixed" => Ok(Rho0::Mixed),
            "pure-z" => Ok(Rho0::PureZ),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Rho0::File(PathBuf::from(p))),
                _ => Err(CliError::Config(format!(
                    "--rho0 must be mixed, pure-z or file:<path>, got {s:?}"
                ))),
            },
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let rho = match self {
            Rho0::Mixed => ComplexMatrix::identity(2).scale_real(0.5),
            Rho0::PureZ => {
                ComplexMatrix::projector(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            }
            Rho0::File(path) => read_matrix_file(path)?,
        };
        if rho.dim() != 2 {
            return Err(CliError::Config(format!(
                "initial state must be 2x2, got {0}x{0}",
                rho.dim()
            )));
        }
        check_state(&rho, RHO0_TOL).map_err(|e| CliError::Config(format!("--rho0: {e}")))?;
        Ok(rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    G1,
    Gamma1,
    J,
    Gamma2,
    G,
    OmegaW,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "g1" => SweepParam::G1,
            "gamma1" => SweepParam::Gamma1,
            "j" => SweepParam::J,
            "gamma2" => SweepParam::Gamma2,
            "g" => SweepParam::G,
            "omega-w" => SweepParam::OmegaW,
            _ => return Err(CliError::Config(format!("unknown sweep parameter {s:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::G1 => "g1",
            SweepParam::Gamma1 => "gamma1",
            SweepParam::J => "j",
            SweepParam::Gamma2 => "gamma2",
            SweepParam::G => "g",
            SweepParam::OmegaW => "omega-w",
        }
    }

    fn model(self) -> ModelKind {
        match self {
            SweepParam::G1 | SweepParam::Gamma1 => ModelKind::Rabi,
            SweepParam::J | SweepParam::Gamma2 => ModelKind::Exchange,
            SweepParam::G | SweepParam::OmegaW => ModelKind::Lorentzian,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub g1: f64,
    pub gamma1: f64,
    pub j: f64,
    pub gamma2: f64,
    pub g: f64,
    pub omega_w: f64,
}

impl ModelParams {
    pub fn channel(&self) -> ChannelSpec {
        match self.kind {
            ModelKind::Rabi => ChannelSpec::RabiDecay {
                g1: self.g1,
                gamma1: self.gamma1,
            },
            ModelKind::Exchange => ChannelSpec::Exchange {
                j: self.j,
                gamma2: self.gamma2,
            },
            ModelKind::Lorentzian => ChannelSpec::LorentzianAD {
                g: self.g,
                omega_w: self.omega_w,
            },
        }
    }

    pub fn with_param(mut self, p: SweepParam, v: f64) -> Self {
        *match p {
            SweepParam::G1 => &mut self.g1,
            SweepParam::Gamma1 => &mut self.gamma1,
            SweepParam::J => &mut self.j,
            SweepParam::Gamma2 => &mut self.gamma2,
            SweepParam::G => &mut self.g,
            SweepParam::OmegaW => &mut self.omega_w,
        } = v;
        self
    }

    /// Ten Rabi periods, two exchange periods, or sixty reservoir times.
    pub fn default_t_max(&self) -> f64 {
        let per = |scale: f64, unit: f64| if unit > 0.0 { scale / unit } else { scale };
        match self.kind {
            ModelKind::Rabi => per(10.0, self.g1),
            ModelKind::Exchange => per(2.0 * PI, self.j),
            ModelKind::Lorentzian => per(60.0, self.omega_w),
        }
    }

    fn default_sweep_param(&self) -> SweepParam {
        match self.kind {
            ModelKind::Rabi => SweepParam::Gamma1,
            ModelKind::Exchange => SweepParam::Gamma2,
            ModelKind::Lorentzian => SweepParam::G,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepRange {
    /// `from + i·(to − from)/(points − 1)`, ascending.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect()
    }
}

/// A fully resolved and validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: ModelParams,
    pub meas: MeasurementSet,
    pub rho0_source: Rho0,
    pub rho0: ComplexMatrix,
    pub t_max: f64,
    pub n_steps: usize,
    pub with_nc: bool,
    /// Set for sweeps only.
    pub sweep: Option<SweepRange>,
    pub tol: f64,
    pub max_iter: usize,
    pub slope_threshold: f64,
    pub workers: usize,
    pub seed: u64,
    pub seeds: usize,
    pub restarts: usize,
    /// Verify groups to run, in suite order.
    pub groups: Vec<&'static str>,
    pub out: Option<PathBuf>,
    pub json: bool,
    /// Assemblage file for `steer`.
    pub file: Option<PathBuf>,
}

fn config_err(what: &str, e: impl fmt::Display) -> CliError {
    CliError::Config(format!("{what}: {e}"))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl RunConfig {
    /// Resolves parsed arguments, reading the config file and the
    /// environment.
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let env_workers = std::env::var(WORKERS_ENV).ok();
        let (kind, opts, file) = match cli.command {
            Command::Trace(o) => (CommandKind::Trace, o, None),
            Command::Sweep(o) => (CommandKind::Sweep, o, None),
            Command::Steer { file, opts } => (CommandKind::Steer, opts, Some(file)),
            Command::Verify(o) => (CommandKind::Verify, o, None),
        };
        let opts = match &opts.config {
            Some(path) => {
                let from_file = read_config_file(path)?;
                opts.merged(from_file)
            }
            None => opts,
        };
        Self::resolve(kind, opts, file, env_workers.as_deref())
    }

    pub fn resolve(
        command: CommandKind,
        o: Options,
        file: Option<PathBuf>,
        env_workers: Option<&str>,
    ) -> Result<Self> {
        let model = ModelParams {
            kind: o.model.unwrap_or(ModelKind::Rabi),
            g1: o.g1.unwrap_or(1.0),
            gamma1: o.gamma1.unwrap_or(0.0),
            j: o.j.unwrap_or(1.0),
            gamma2: o.gamma2.unwrap_or(0.0),
            g: o.g.unwrap_or(1.0),
            omega_w: o.omega_w.unwrap_or(1.0),
        };
        model
            .channel()
            .validate()
            .map_err(|e| config_err("model", e))?;

        let labels = parse_pauli_labels(o.meas.as_deref().unwrap_or("xyz"))
            .map_err(|e| config_err("--meas", e))?;
        let meas = pauli_measurement_set(&labels).map_err(|e| config_err("--meas", e))?;

        let rho0_source = Rho0::parse(o.rho0.as_deref().unwrap_or("mixed"))?;
        let rho0 = rho0_source.matrix()?;

        let t_max = positive("--tmax", o.tmax.unwrap_or_else(|| model.default_t_max()))?;
        let n_steps = o.steps.unwrap_or(DEFAULT_STEPS);
        if n_steps < 2 {
            return Err(CliError::Config(format!(
                "--steps must be at least 2, got {n_steps}"
            )));
        }

        let sweep = if command == CommandKind::Sweep {
            let param = match &o.param {
                Some(s) => SweepParam::parse(s)?,
                None => model.default_sweep_param(),
            };
            if param.model() != model.kind {
                return Err(CliError::Config(format!(
                    "parameter {param} does not belong to the {:?} model",
                    model.kind
                )));
            }
            let from = o
                .from
                .ok_or_else(|| CliError::Config("sweep needs --from".into()))?;
            let to =
                o.to.ok_or_else(|| CliError::Config("sweep needs --to".into()))?;
            if !(to > from) || !from.is_finite() || !to.is_finite() {
                return Err(CliError::Config(format!(
                    "sweep range [{from}, {to}] is empty"
                )));
            }
            let points = o.points.unwrap_or(DEFAULT_SWEEP_POINTS);
            if points < 2 {
                return Err(CliError::Config(format!(
                    "--points must be at least 2, got {points}"
                )));
            }
            for v in [from, to] {
                model
                    .with_param(param, v)
                    .channel()
                    .validate()
                    .map_err(|e| config_err("sweep range", e))?;
            }
            Some(SweepRange {
                param,
                from,
                to,
                points,
            })
        } else {
            None
        };

        let tol = positive("--tol", o.tol.unwrap_or(DEFAULT_TOL))?;
        let max_iter = o.max_iter.unwrap_or(DEFAULT_MAX_ITER);
        if max_iter == 0 {
            return Err(CliError::Config("--max-iter must be positive".into()));
        }
        let slope_threshold = o.slope_threshold.unwrap_or(DEFAULT_SLOPE_THRESHOLD);
        if !(slope_threshold >= 0.0) || !slope_threshold.is_finite() {
            return Err(CliError::Config(format!(
                "--slope-threshold must be non-negative, got {slope_threshold}"
            )));
        }

        let workers = match (o.workers, env_workers) {
            (Some(w), _) => w,
            (None, Some(s)) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{WORKERS_ENV}={s:?} is not a count")))?,
            (None, None) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if workers == 0 {
            return Err(CliError::Config("worker count must be positive".into()));
        }

        let groups = match &o.group {
            None => GROUPS.to_vec(),
            Some(wanted) => {
                if let Some(bad) = wanted.iter().find(|g| !GROUPS.contains(&g.as_str())) {
                    return Err(CliError::Config(format!(
                        "unknown group {bad:?}; groups are {}",
                        GROUPS.join(", ")
                    )));
                }
                GROUPS
                    .iter()
                    .copied()
                    .filter(|g| wanted.iter().any(|w| w == g))
                    .collect()
            }
        };

        Ok(RunConfig {
            command,
            model,
            meas,
            rho0_source,
            rho0,
            t_max,
            n_steps,
            with_nc: o.with_nc,
            sweep,
            tol,
            max_iter,
            slope_threshold,
            workers,
            seed: o.seed.unwrap_or(0),
            seeds: o.seeds.unwrap_or(DEFAULT_SEEDS),
            restarts: o.restarts.unwrap_or(DEFAULT_RESTARTS),
            groups,
            out: o.out,
            json: o.json,
            file,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(kind: CommandKind, o: Options) -> Result<RunConfig> {
        RunConfig::resolve(kind, o, None, None)
    }

    #[test]
    fn defaults() {
        let c = resolve(CommandKind::Trace, Options::default()).unwrap();
        assert_eq!(c.model.kind, ModelKind::Rabi);
        assert_eq!(
            c.model.channel(),
            ChannelSpec::RabiDecay {
                g1: 1.0,
                gamma1: 0.0
            }
        );
        assert_eq!(c.meas.labels(), vec!["X", "Y", "Z"]);
        assert_eq!(c.rho0_source, Rho0::Mixed);
        assert_eq!(c.t_max, 10.0);
        assert_eq!(c.n_steps, DEFAULT_STEPS);
        assert_eq!(c.tol, DEFAULT_TOL);
        assert_eq!(c.slope_threshold, DEFAULT_SLOPE_THRESHOLD);
        assert!(c.sweep.is_none());
        assert_eq!(c.groups, GROUPS.to_vec());
    }

    #[test]
    fn model_dependent_horizons() {
        let mut o = Options {
            model: Some(ModelKind::Exchange),
            j: Some(2.0),
            ..Options::default()
        };
        assert!((resolve(CommandKind::Trace, o.clone()).unwrap().t_max - PI).abs() < 1e-15);
        o.model = Some(ModelKind::Lorentzian);
        o.omega_w = Some(2.0);
        assert_eq!(resolve(CommandKind::Trace, o).unwrap().t_max, 30.0);
    }

    #[test]
    fn flags_override_file_values() {
        let file: Options = serde_json::from_str(
            r#"{"model": "exchange", "gamma2": 0.1, "tmax": 3.0, "with-nc": true}"#,
        )
        .unwrap();
        let cli = Options {
            tmax: Some(5.0),
            ..Options::default()
        };
        let c = resolve(CommandKind::Trace, cli.merged(file)).unwrap();
        assert_eq!(c.model.kind, ModelKind::Exchange);
        assert_eq!(c.model.gamma2, 0.1);
        assert_eq!(c.t_max, 5.0);
        assert!(c.with_nc);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        assert!(serde_json::from_str::<Options>(r#"{"gama1": 0.5}"#).is_err());
    }

    #[test]
    fn worker_precedence() {
        let c =
            RunConfig::resolve(CommandKind::Trace, Options::default(), None, Some("3")).unwrap();
        assert_eq!(c.workers, 3);
        let o = Options {
            workers: Some(2),
            ..Options::default()
        };
        let c = RunConfig::resolve(CommandKind::Trace, o, None, Some("3")).unwrap();
        assert_eq!(c.workers, 2);
        assert!(
            RunConfig::resolve(CommandKind::Trace, Options::default(), None, Some("x")).is_err()
        );
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = [
            Options {
                tol: Some(0.0),
                ..Options::default()
            },
            Options {
                steps: Some(1),
                ..Options::default()
            },
            Options {
                tmax: Some(-1.0),
                ..Options::default()
            },
            Options {
                gamma1: Some(-0.5),
                ..Options::default()
            },
            Options {
                meas: Some("xq".into()),
                ..Options::default()
            },
            Options {
                meas: Some("xx".into()),
                ..Options::default()
            },
            Options {
                rho0: Some("pure-q".into()),
                ..Options::default()
            },
            Options {
                workers: Some(0),
                ..Options::default()
            },
            Options {
                group: Some(vec!["nope".into()]),
                ..Options::default()
            },
        ];
        for o in bad {
            let e = resolve(CommandKind::Trace, o.clone()).unwrap_err();
            assert!(matches!(e, CliError::Config(_)), "{o:?}: {e}");
        }
    }

    #[test]
    fn sweep_resolution() {
        let o = Options {
            model: Some(ModelKind::Lorentzian),
            from: Some(0.0),
            to: Some(1.2),
            points: Some(25),
            ..Options::default()
        };
        let c = resolve(CommandKind::Sweep, o.clone()).unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.param, SweepParam::G);
        let v = s.values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[24], 1.2);
        assert!((v[12] - 0.6).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[1] > w[0]));

        for bad in [
            Options {
                param: Some("gamma1".into()),
                ..o.clone()
            },
            Options {
                to: Some(0.0),
                ..o.clone()
            },
            Options {
                points: Some(1),
                ..o.clone()
            },
            Options {
                from: None,
                ..o.clone()
            },
            Options {
                from: Some(-1.0),
                ..o.clone()
            },
        ] {
            assert!(matches!(
                resolve(CommandKind::Sweep, bad),
                Err(CliError::Config(_))
            ));
        }
    }

    #[test]
    fn rho0_selectors() {
        assert_eq!(Rho0::parse("pure-z").unwrap(), Rho0::PureZ);
        assert_eq!(
            Rho0::parse("file:a.json").unwrap(),
            Rho0::File(PathBuf::from("a.json"))
        );
        assert!(Rho0::parse("file:").is_err());
        let z = Rho0::PureZ.matrix().unwrap();
        assert_eq!(z[(0, 0)].re, 1.0);
        assert_eq!(z[(1, 1)].re, 0.0);
    }
}
