//! Dispatch from a configuration to its experiment.

use super::dispersive::{kernel_study, strichartz_study};
use super::runs::{decay_study, kappa_sweep, run_nsk};
use super::selftest::besov_selftest;
use crate::error::Result;
use crate::io::config::{ExperimentConfig, ExperimentKind};
use crate::io::output::Report;

/// Random fields drawn by the self-test.
pub const SELFTEST_FIELDS: usize = 10;

/// Run the experiment selected by `cfg.experiment.kind`.
///
/// The kernel study reads its window from `[time.dt, time.tmax]` and samples
/// it at `time.cadence` log-spaced points; the Strichartz study samples
/// `[0, time.tmax]` every `time.dt`. Both take their exponents and block
/// from `[experiment]`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let kappa = &cfg.physics.kappa;
    Ok(match cfg.experiment.kind {
        ExperimentKind::Simulate => Report::Simulate(run_nsk(cfg, kappa[0])?),
        ExperimentKind::SweepKappa => Report::Sweep(kappa_sweep(cfg)?),
        ExperimentKind::Decay => Report::Decay(decay_study(cfg)?),
        ExperimentKind::Kernel => Report::Kernel(kernel_study(
            &cfg.grid()?,
            kappa,
            cfg.experiment.block,
            cfg.experiment.lp,
            (cfg.time.dt, cfg.time.tmax),
            cfg.time.cadence,
        )?),
        ExperimentKind::Strichartz => Report::Strichartz(strichartz_study(
            &cfg.grid()?,
            kappa,
            cfg.experiment.r,
            cfg.experiment.lp,
            cfg.experiment.k,
            cfg.experiment.block,
            cfg.time.tmax,
            cfg.steps() + 1,
        )?),
        ExperimentKind::BesovSelftest => Report::Selftest(besov_selftest(&cfg.grid()?, SELFTEST_FIELDS, cfg.init.seed)?),
    })
}
