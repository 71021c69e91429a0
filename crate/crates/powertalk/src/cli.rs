//! Command-line front end.
//!
//! Settings are resolved in three layers: built-in experiment defaults,
//! then the `--config` file, then `--seed` / `--trials` flags.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::config::Config;
use crate::error::AppError;
use crate::experiments::{design_quantizer, Experiment};
use crate::report::{write_codebook, write_rows};

#[derive(Debug, Parser)]
#[command(name = "powertalk", version, about = "CSI acquisition by power modulation: Monte-Carlo experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct RunArgs {
    /// Key/value configuration file applied over the experiment defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed, overrides `experiment.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per sweep point, overrides `experiment.trials`.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase I ESNR of each estimator against the SIR.
    #[command(name = "phase1-esnr")]
    Phase1Esnr(RunArgs),
    /// Utility loss caused by Phase I estimation.
    #[command(name = "phase1-loss")]
    Phase1Loss(RunArgs),
    /// ESNR after the exchange, per quantizer, against the SIR.
    #[command(name = "phase2-esnr")]
    Phase2Esnr(RunArgs),
    /// Utility loss caused by the exchange.
    #[command(name = "phase2-loss")]
    Phase2Loss(RunArgs),
    /// ESNR against bits per label.
    #[command(name = "phase2-sweep-bits")]
    Phase2SweepBits(RunArgs),
    /// ESNR against exchange slots.
    #[command(name = "phase2-sweep-slots")]
    Phase2SweepSlots(RunArgs),
    /// Average sum-rate of IWFA and team BRD against the inter-site distance.
    #[command(name = "global-sumrate")]
    GlobalSumrate(RunArgs),
    /// Design one codebook and write it as CSV.
    #[command(name = "design-quantizer")]
    DesignQuantizer(RunArgs),
    /// Run the built-in example checks.
    Selftest,
}

impl Command {
    fn experiment(&self) -> Option<(Experiment, &RunArgs)> {
        Some(match self {
            Command::Phase1Esnr(a) => (Experiment::Phase1Esnr, a),
            Command::Phase1Loss(a) => (Experiment::Phase1Loss, a),
            Command::Phase2Esnr(a) => (Experiment::Phase2Esnr, a),
            Command::Phase2Loss(a) => (Experiment::Phase2Loss, a),
            Command::Phase2SweepBits(a) => (Experiment::Phase2SweepBits, a),
            Command::Phase2SweepSlots(a) => (Experiment::Phase2SweepSlots, a),
            Command::GlobalSumrate(a) => (Experiment::GlobalSumrate, a),
            _ => return None,
        })
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve(mut base: Config, args: &RunArgs) -> Result<Config, AppError> {
    if let Some(path) = &args.config {
        base.apply_file(path)?;
    }
    if let Some(seed) = args.seed {
        base.seed = seed;
    }
    if let Some(trials) = args.trials {
        base.trials = trials;
    }
    base.validate()?;
    Ok(base)
}

fn output(args: &RunArgs) -> Result<Box<dyn Write>, AppError> {
    Ok(match &args.out {
        Some(path) => Box::new(File::create(path).map_err(|e| {
            AppError::Io(io::Error::new(e.kind(), format!("cannot create {}: {e}", path.display())))
        })?),
        None => Box::new(io::stdout().lock()),
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, AppError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(AppError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| AppError::Runtime(e.to_string())),
    }
}

pub fn execute(command: &Command) -> Result<(), AppError> {
    if let Some((experiment, args)) = command.experiment() {
        let cfg = resolve(experiment.defaults(), args)?;
        let rows = with_threads(args.threads, || experiment.run(&cfg))??;
        write_rows(output(args)?, &rows)?;
        info!("{}: wrote {} rows", experiment.name(), rows.len());
        return Ok(());
    }
    match command {
        Command::DesignQuantizer(args) => {
            let cfg = resolve(Config::default(), args)?;
            let q = with_threads(args.threads, || design_quantizer(&cfg))??;
            write_codebook(output(args)?, &q)
        }
        Command::Selftest => {
            let checks = crate::selftest::run();
            let mut out = io::stdout().lock();
            for c in &checks {
                writeln!(out, "{} {} ({})", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(AppError::Runtime(format!("{failed} selftest checks failed")));
            }
            Ok(())
        }
        _ => unreachable!("experiment commands handled above"),
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("POWERTALK_LOG", "error");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("powertalk: {e}");
            e.exit_code()
        }
    }
}
