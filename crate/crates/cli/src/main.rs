//! `cloneforge`: bounds, simulations, trade-off sweeps, gate decompositions
//! and the verification suite for two-state cloning machines.
//!
//! Exit status: 0 success, 1 verification failure, 2 configuration error,
//! 3 deviation above tolerance under `simulate --strict`.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::GateName;
use config::{Format, ModeName, RunConfig, Sweep};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl From<cloneforge::Error> for CliError {
    fn from(e: cloneforge::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

const AFTER_HELP: &str = "\
Angles are in radians unless --degrees is given. CLONEFORGE_SEED is reserved \
and has no effect: every probability is computed exactly, nothing is sampled.";

#[derive(Parser, Debug)]
#[command(name = "cloneforge", version, about = "Two-state quantum cloning: bounds, networks, decompositions", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form fidelity and probability limits for one problem.
    Bounds(ProblemArgs),
    /// Simulate a cloning network on both inputs.
    Simulate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Exit with status 3 if any deviation from the bound exceeds 1e-8.
        #[arg(long)]
        strict: bool,
        /// Expand every composite gate into CNOTs and single-qubit gates first.
        #[arg(long)]
        decomposed: bool,
        /// Deviation allowed under --strict.
        #[arg(long, default_value_t = commands::STRICT_TOL, hide = true)]
        strict_tolerance: f64,
    },
    /// Hybrid cloning sweep over the success probability (CSV by default).
    Tradeoff {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// CNOT + single-qubit circuit for the transfer (D) or separation (S) gate.
    Decompose {
        #[arg(long, value_enum)]
        gate: GateName,
        /// Two angles: theta1 theta2 for D, theta_in theta_out for S.
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        angles: Vec<f64>,
        #[arg(long)]
        degrees: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every verification suite.
    Verify {
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Multiplies every tolerance.
        #[arg(long, default_value_t = 1.0, hide = true)]
        tolerance_scale: f64,
    },
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Half the angle between the two states.
    #[arg(long, conflicts_with = "overlap", allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Overlap cos(2 theta) of the two states.
    #[arg(long)]
    overlap: Option<f64>,
    /// Read --theta in degrees.
    #[arg(long)]
    degrees: bool,
    /// Number of input copies (default 1).
    #[arg(long)]
    m: Option<usize>,
    /// Number of output copies (default 2).
    #[arg(long)]
    n: Option<usize>,
    /// Prior of the + state (default 0.5).
    #[arg(long)]
    eta_plus: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeName>,
    /// Success probability for hybrid cloning.
    #[arg(long)]
    p_s: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// First success probability (default P_MN).
    #[arg(long)]
    start: Option<f64>,
    /// Last success probability (default 1).
    #[arg(long)]
    stop: Option<f64>,
    /// Number of rows (default 11).
    #[arg(long)]
    steps: Option<usize>,
}

impl ProblemArgs {
    fn resolve(&self, sweep: Option<&SweepArgs>) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let theta = self
            .theta
            .map(|t| if self.degrees { t.to_radians() } else { t });
        let sweep = sweep
            .filter(|s| s.start.is_some() || s.stop.is_some() || s.steps.is_some())
            .map(|s| Sweep {
                param: "p_s".into(),
                start: s.start,
                stop: s.stop,
                steps: s.steps,
            });
        let flags = RunConfig {
            theta,
            overlap: self.overlap,
            m: self.m,
            n: self.n,
            eta_plus: self.eta_plus,
            mode: self.mode,
            p_s: self.p_s,
            sweep,
            format: self.format,
            output: self.output.clone(),
        };
        Ok(file.overridden_by(flags))
    }
}

fn run(cli: Cli) -> Result<(commands::Rendered, Option<PathBuf>), CliError> {
    match cli.command {
        Command::Bounds(p) => {
            let c = p.resolve(None)?;
            Ok((commands::cmd_bounds(&c)?, c.output))
        }
        Command::Simulate {
            problem,
            strict,
            decomposed,
            strict_tolerance,
        } => {
            let c = problem.resolve(None)?;
            let strict = strict.then_some(strict_tolerance);
            Ok((commands::cmd_simulate(&c, strict, decomposed)?, c.output))
        }
        Command::Tradeoff { problem, sweep } => {
            let c = problem.resolve(Some(&sweep))?;
            Ok((commands::cmd_tradeoff(&c)?, c.output))
        }
        Command::Decompose {
            gate,
            angles,
            degrees,
            output,
        } => {
            let conv = |a: f64| if degrees { a.to_radians() } else { a };
            let angles = [0, 1].map(|i| config::snap_quarter_pi(conv(angles[i])));
            Ok((commands::cmd_decompose(gate, angles)?, output))
        }
        Command::Verify {
            format,
            output,
            tolerance_scale,
        } => Ok((commands::cmd_verify(tolerance_scale, format)?, output)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(rendered, path)| {
        output::emit(&rendered.text, path.as_deref())?;
        Ok(rendered.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
