//! Command-line parsing into a validated [`RunConfig`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prismbell_core::montecarlo::Workers;
use prismbell_core::{validate_params, ModelError, ModelParams, Preparation, Regime, SweepMode, SweepSpec};
use thiserror::Error;

use crate::emit::OutputFormat;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "prismbell",
    version,
    about = "CHSH values of the rod-connected double-prism model"
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Debug, Subcommand)]
enum Commands {
    /// Exact CHSH value at one parameter point.
    Exact {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate at one parameter point.
    Simulate {
        #[command(flatten)]
        point: PointArgs,
        /// Trials per coincidence experiment.
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a grid of parameter points.
    Sweep {
        /// Face counts, e.g. `4,10` or `4:20:2`.
        #[arg(long = "n")]
        n: String,
        /// Epsilon grid, e.g. `0,0.5,1` or `0:1:0.05`.
        #[arg(long)]
        epsilon: String,
        /// Rho grid, same syntax as `--epsilon`.
        #[arg(long)]
        rho: String,
        #[arg(long, default_value = "A,B")]
        regime: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write a gnuplot script that plots the CSV output.
        #[arg(long)]
        plot_script: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate local deterministic strategies and certify the local bound.
    Lhv {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Faces per prism (even, at least 4).
    #[arg(long = "n", allow_negative_numbers = true)]
    n: i64,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: f64,
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long)]
    regime: Regime,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write to this path instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Montecarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Exact {
        params: ModelParams,
        prep: Preparation,
    },
    Simulate {
        params: ModelParams,
        prep: Preparation,
        trials: u64,
        workers: Workers,
    },
    Sweep {
        spec: SweepSpec,
        workers: Workers,
        plot_script: Option<PathBuf>,
    },
    Lhv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub format: OutputFormat,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected by the argument parser; also covers `--help` and `--version`.
    #[error(transparent)]
    Parse(#[from] clap::Error),
    #[error("invalid value for {flag}: {message}")]
    Invalid { flag: &'static str, message: String },
}

impl CliError {
    fn invalid(flag: &'static str, message: impl ToString) -> Self {
        Self::Invalid {
            flag,
            message: message.to_string(),
        }
    }

    fn from_model(err: ModelError) -> Self {
        let flag = match err {
            ModelError::OddFaceCount(_) | ModelError::TooFewFaces(_) => "--n",
            ModelError::EpsilonOutOfRange(_) => "--epsilon",
            ModelError::RhoOutOfRange(_) => "--rho",
            ModelError::ZeroTrials => "--trials",
            ModelError::WorkerPool(_) => "--workers",
            _ => "arguments",
        };
        Self::invalid(flag, err)
    }

    /// Process exit code: help and version exit 0, every usage error exits 2.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(e) if !e.use_stderr() => 0,
            _ => 2,
        }
    }
}

pub fn parse_cli<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        Commands::Exact { point, output } => {
            let (params, prep) = point.validate()?;
            Ok(RunConfig {
                command: Command::Exact { params, prep },
                seed: DEFAULT_SEED,
                format: output.format,
                out: output.out,
            })
        }
        Commands::Simulate {
            point,
            trials,
            seed,
            workers,
            output,
        } => {
            let (params, prep) = point.validate()?;
            if trials == 0 {
                return Err(CliError::from_model(ModelError::ZeroTrials));
            }
            Ok(RunConfig {
                command: Command::Simulate {
                    params,
                    prep,
                    trials,
                    workers: workers_from(workers)?,
                },
                seed,
                format: output.format,
                out: output.out,
            })
        }
        Commands::Sweep {
            n,
            epsilon,
            rho,
            regime,
            mode,
            trials,
            seed,
            workers,
            plot_script,
            output,
        } => {
            let ns = parse_grid(&n)
                .map_err(|m| CliError::invalid("--n", m))?
                .into_iter()
                .map(|x| face_count(x).map_err(CliError::from_model))
                .collect::<Result<Vec<u32>, _>>()?;
            let epsilons = parse_grid(&epsilon).map_err(|m| CliError::invalid("--epsilon", m))?;
            let rhos = parse_grid(&rho).map_err(|m| CliError::invalid("--rho", m))?;
            let regimes = regime
                .split(',')
                .map(|r| r.parse::<Regime>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|m| CliError::invalid("--regime", m))?;
            for &eps in &epsilons {
                validate_params(4, eps, 0.0).map_err(CliError::from_model)?;
            }
            for &r in &rhos {
                validate_params(4, 0.0, r).map_err(CliError::from_model)?;
            }
            let mode = match (mode, trials) {
                (ModeArg::Exact, _) => SweepMode::Exact,
                (ModeArg::Montecarlo, Some(0)) => return Err(CliError::from_model(ModelError::ZeroTrials)),
                (ModeArg::Montecarlo, Some(trials)) => SweepMode::MonteCarlo { trials, seed },
                (ModeArg::Montecarlo, None) => {
                    return Err(CliError::invalid("--trials", "required when --mode montecarlo"))
                }
            };
            if plot_script.is_some() && output.format != OutputFormat::Csv {
                return Err(CliError::invalid(
                    "--plot-script",
                    "plot scripts read CSV output; use --format csv",
                ));
            }
            let spec = SweepSpec {
                ns,
                epsilons,
                rhos,
                regimes,
                mode,
            };
            spec.validate().map_err(CliError::from_model)?;
            Ok(RunConfig {
                command: Command::Sweep {
                    spec,
                    workers: workers_from(workers)?,
                    plot_script,
                },
                seed,
                format: output.format,
                out: output.out,
            })
        }
        Commands::Lhv { output } => Ok(RunConfig {
            command: Command::Lhv,
            seed: DEFAULT_SEED,
            format: output.format,
            out: output.out,
        }),
    }
}

impl PointArgs {
    fn validate(&self) -> Result<(ModelParams, Preparation), CliError> {
        let params = validate_params(self.n, self.epsilon, self.rho).map_err(CliError::from_model)?;
        Ok((params, Preparation::of(self.regime)))
    }
}

fn workers_from(workers: Option<usize>) -> Result<Workers, CliError> {
    match workers {
        None => Ok(Workers::Global),
        Some(0) => Err(CliError::invalid("--workers", "must be at least 1")),
        Some(1) => Ok(Workers::Sequential),
        Some(k) => Ok(Workers::Pool(k)),
    }
}

fn face_count(x: f64) -> Result<u32, ModelError> {
    if x.fract() != 0.0 || !x.is_finite() {
        // Odd in the sense of not being an even integer.
        return Err(ModelError::OddFaceCount(x.trunc() as i64));
    }
    let n = x as i64;
    validate_params(n, 0.0, 0.0).map(|p| p.n())
}

/// Parses `a,b,c` or the inclusive range `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{}' is not a number", s.trim()))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if !(step.is_finite() && step > 0.0) {
                return Err(format!("range step must be positive (got {step})"));
            }
            if stop < start {
                return Err(format!("range stop {stop} is below start {start}"));
            }
            let intervals = ((stop - start) / step + 1e-9).floor() as usize;
            let mut grid: Vec<f64> = (0..=intervals).map(|i| start + i as f64 * step).collect();
            if let Some(last) = grid.last_mut() {
                if (*last - stop).abs() <= 1e-9 * step.max(1.0) {
                    *last = stop;
                }
            }
            Ok(grid)
        }
        [_] => {
            let values = text.split(',').map(parse).collect::<Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err("empty list".into());
            }
            Ok(values)
        }
        _ => Err(format!("'{text}' is neither a list nor start:stop:step")),
    }
}
