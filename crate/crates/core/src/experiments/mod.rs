//! Verification experiments: diagnostic series, kappa sweeps, decay
//! studies, dispersive estimates and the Littlewood-Paley self-test.

pub mod dispersive;
pub mod driver;
pub mod fit;
pub mod functionals;
pub mod recipes;
pub mod runs;
pub mod selftest;
pub mod series;

pub use driver::run_experiment;
pub use dispersive::{admissible, kernel_study, strichartz_study, Exponent, KernelResult, StrichartzResult};
pub use fit::{power_fit, FitResult};
pub use functionals::{FunctionalTotals, Recorder};
pub use recipes::initial_state;
pub use runs::{decay_study, heat_surrogate, kappa_sweep, run_nsk, DecayResult, RunOutcome, RunStatus, SweepResult};
pub use selftest::{besov_selftest, SelfCheck};
pub use series::DiagnosticSeries;
