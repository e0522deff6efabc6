//! `nsk`: run one experiment and write its result bundle.
//!
//! Exit codes: 0 success, 1 validation error (bad config, flags or
//! parameters), 2 runtime abort (CFL, invertibility, vacuum, blow-up,
//! failed self-test, unwritable output).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use nsk_core::experiments::run_experiment;
use nsk_core::io::{emit_error, emit_results, parse_config, write_timing, ExperimentConfig, ExperimentKind};
use nsk_core::NskError;

#[derive(Parser, Debug)]
#[command(name = "nsk", version, about = "Navier-Stokes-Korteweg simulator and verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for the result bundle.
    #[arg(long, global = true, default_value = "nsk-out")]
    out_dir: PathBuf,

    /// Overrides `[init] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Single run with diagnostics.
    Simulate,
    /// Runs over a kappa list and limit-rate fits.
    SweepKappa,
    /// Long-time decay fits.
    Decay,
    /// Dispersive kernel decay of one dyadic block.
    Kernel,
    /// Strichartz gain in kappa.
    Strichartz,
    /// Littlewood-Paley self-test (runs without a config).
    BesovSelftest,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Simulate => ExperimentKind::Simulate,
            Command::SweepKappa => ExperimentKind::SweepKappa,
            Command::Decay => ExperimentKind::Decay,
            Command::Kernel => ExperimentKind::Kernel,
            Command::Strichartz => ExperimentKind::Strichartz,
            Command::BesovSelftest => ExperimentKind::BesovSelftest,
        }
    }
}

const SELFTEST_DEFAULT: &str = "[grid]\nd = 2\nn = 64\n[physics]\nkappa = 1\n[time]\ndt = 1\ntmax = 1\n";

const VALIDATION: u8 = 1;
const RUNTIME: u8 = 2;

fn exit_code(e: &NskError) -> u8 {
    if e.is_runtime_abort() || matches!(e, NskError::Io(_)) {
        RUNTIME
    } else {
        VALIDATION
    }
}

fn load(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig, NskError> {
    let text = match (&cli.config, kind) {
        (Some(p), _) => std::fs::read_to_string(p)
            .map_err(|e| NskError::InvalidParameter(format!("cannot read config {}: {e}", p.display())))?,
        (None, ExperimentKind::BesovSelftest) => SELFTEST_DEFAULT.to_string(),
        (None, _) => return Err(NskError::InvalidParameter(format!("{} needs --config", kind.as_str()))),
    };
    let mut cfg = parse_config(&text)?;
    cfg.experiment.kind = kind;
    if let Some(s) = cli.seed {
        cfg.init.seed = s;
    }
    Ok(cfg)
}

fn fail(kind: ExperimentKind, cfg: Option<&ExperimentConfig>, e: &NskError, dir: &Path) -> ExitCode {
    eprintln!("nsk {}: {} ({})", kind.as_str(), e, e.reason());
    if let Err(w) = emit_error(kind, cfg, e, dir) {
        eprintln!("nsk: could not write summary: {w}");
    }
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let cfg = match load(&cli, kind) {
        Ok(c) => c,
        Err(e) => return fail(kind, None, &e, &cli.out_dir),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(kind, Some(&cfg), &NskError::InvalidParameter("--threads must be >= 1".into()), &cli.out_dir);
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return fail(kind, Some(&cfg), &NskError::InvalidParameter(e.to_string()), &cli.out_dir),
    };
    let start = Instant::now();
    let report = match pool.install(|| run_experiment(&cfg)) {
        Ok(r) => r,
        Err(e) => return fail(kind, Some(&cfg), &e, &cli.out_dir),
    };
    let bundle = match emit_results(&report, Some(&cfg), &cli.out_dir) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("nsk {}: cannot write results: {e}", kind.as_str());
            return ExitCode::from(RUNTIME);
        }
    };
    let _ = write_timing(&cli.out_dir, start.elapsed().as_secs_f64(), pool.current_num_threads());
    let status = report.status();
    println!(
        "nsk {}: {}{} -> {}",
        kind.as_str(),
        status.status,
        status.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default(),
        bundle.summary.display()
    );
    if status.is_completed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(RUNTIME)
    }
}
