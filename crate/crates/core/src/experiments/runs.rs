//! Time-stepping experiments: single runs, kappa sweeps and decay studies.

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{power_fit, FitResult};
use super::functionals::{l2_block_norms, lambda_l2, solution_vector, FunctionalTotals, Recorder};
use super::recipes::initial_state;
use super::series::DiagnosticSeries;
use crate::error::{NskError, Result};
use crate::ins::{InsIntegrator, InsState};
use crate::io::config::ExperimentConfig;
use crate::littlewood_paley::{fmt_exp, BesovParams, DyadicCutoff};
use crate::model::State;
use crate::propagators::Integrator;
use crate::spectral::SpectralField;

/// Growth of the monitored norm that counts as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Aborted { reason: String, t: f64, message: String },
}

impl RunStatus {
    fn aborted(e: &NskError, t: f64) -> Self {
        RunStatus::Aborted {
            reason: e.reason().to_string(),
            t,
            message: e.to_string(),
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// A run that either reached `tmax` or stopped on a runtime abort.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub kappa: f64,
    pub status: RunStatus,
    pub totals: FunctionalTotals,
    #[serde(skip)]
    pub series: DiagnosticSeries,
    #[serde(skip)]
    pub final_state: Option<State>,
}

fn monitored(s: &State) -> Result<f64> {
    Ok(solution_vector(s)?.l2_norm())
}

/// Advance the compressible system and the incompressible reference from the
/// data of `cfg`, recording every `cadence` steps. Runtime aborts (CFL,
/// invertibility, vacuum, blow-up) end the run with an `Aborted` status;
/// anything else is an error.
pub fn run_nsk(cfg: &ExperimentConfig, kappa: f64) -> Result<RunOutcome> {
    let s0 = initial_state(cfg, kappa)?;
    run_from(cfg, s0)
}

/// [`run_nsk`] from explicit initial data.
pub fn run_from(cfg: &ExperimentConfig, s0: State) -> Result<RunOutcome> {
    let kappa = s0.kappa;
    let grid = s0.grid().clone();
    let laws = cfg.physics.laws(kappa)?;
    let mut rec = Recorder::new(
        DyadicCutoff::new(&grid),
        kappa,
        cfg.delta_p(),
        cfg.diagnostics.besov.clone(),
        cfg.diagnostics.alpha.clone(),
        cfg.diagnostics.sigma,
    )?;
    let mut series = DiagnosticSeries::new(rec.columns());
    let dt = cfg.time.dt;
    let steps = cfg.steps();
    let cadence = cfg.time.cadence.max(1);

    let abort = |e: &NskError, t: f64, series: DiagnosticSeries, rec: &Recorder| RunOutcome {
        kappa,
        status: RunStatus::aborted(e, t),
        totals: rec.totals(),
        series,
        final_state: None,
    };

    // initial data outside the invertibility range aborts at t = 0
    if let Err(e) = s0.scaled_density(&laws) {
        return if e.is_runtime_abort() { Ok(abort(&e, 0.0, series, &rec)) } else { Err(e) };
    }
    let nsk = Integrator::new(&s0, &laws, dt)?;
    let ins_step = InsIntegrator::new(&grid, dt)?;
    let mut s = s0;
    let mut ins = InsState::from_velocity(&s.u, 0.0)?;
    let m0 = monitored(&s)?;
    series.push(0.0, rec.record(&s, &ins)?)?;

    for step in 1..=steps {
        let next = nsk.step(&s).and_then(|n| Ok((n, ins_step.step(&ins)?)));
        let (n, i) = match next {
            Ok(v) => v,
            Err(e) if e.is_runtime_abort() => return Ok(abort(&e, s.t, series, &rec)),
            Err(e) => return Err(e),
        };
        s = n;
        ins = i;
        let m = monitored(&s)?;
        if !s.is_finite() || !m.is_finite() || (m0 > 0.0 && m > BLOWUP_FACTOR * m0) {
            let e = NskError::BlowUp {
                t: s.t,
                growth: if m0 > 0.0 { m / m0 } else { f64::INFINITY },
            };
            return Ok(abort(&e, s.t, series, &rec));
        }
        if step % cadence == 0 || step == steps {
            series.push(s.t, rec.record(&s, &ins)?)?;
        }
    }
    Ok(RunOutcome {
        kappa,
        status: RunStatus::Completed,
        totals: rec.totals(),
        series,
        final_state: Some(s),
    })
}

/// Result of a kappa sweep: one run per kappa (in input order) and the two
/// log-log fits, present only when every member completed.
#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub kappas: Vec<f64>,
    pub delta: f64,
    pub members: Vec<RunOutcome>,
    /// `||(U^{-1} grad a, Qu)||` in `L~^2_T(B^{d/p}_{p,1})` against kappa.
    pub compressible: Option<FitResult>,
    /// `||Pu - v||` in `L^inf_T(B^{d/2-1}_{2,1})` against kappa.
    pub incompressible: Option<FitResult>,
    /// Same error in `L^inf_T(B^{d/2-1}_{2,1}) cap L^1_T(B^{d/2+1}_{2,1})`.
    pub incompressible_full: Option<FitResult>,
    pub expected: (f64, f64),
}

impl SweepResult {
    pub fn completed(&self) -> bool {
        self.members.iter().all(|m| m.status.is_completed())
    }

    pub fn compressible_norms(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.totals.d_raw).collect()
    }

    pub fn incompressible_norms(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.totals.w_sup).collect()
    }
}

/// Run every kappa of `cfg` on the same data (members in parallel, each
/// sequential internally) and fit both limit norms against kappa.
pub fn kappa_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let kappas = cfg.physics.kappa.clone();
    if kappas.len() < 3 {
        return Err(NskError::InvalidParameter(format!("a sweep needs at least 3 kappa values, got {}", kappas.len())));
    }
    let members: Vec<RunOutcome> = kappas
        .par_iter()
        .map(|&k| run_nsk(cfg, k))
        .collect::<Result<_>>()?;
    let (delta, _) = cfg.delta_p();
    let mut out = SweepResult {
        kappas: kappas.clone(),
        delta,
        members,
        compressible: None,
        incompressible: None,
        incompressible_full: None,
        expected: (-delta, -delta / 2.0),
    };
    if out.completed() {
        let all = (0.0, f64::INFINITY);
        let full: Vec<f64> = out.members.iter().map(|m| m.totals.w_sup + m.totals.w_int).collect();
        out.compressible = power_fit(&kappas, &out.compressible_norms(), all).ok();
        out.incompressible = power_fit(&kappas, &out.incompressible_norms(), all).ok();
        out.incompressible_full = power_fit(&kappas, &full, all).ok();
    }
    Ok(out)
}

/// One decay fit: `||Lambda^alpha (kappa^{-1/2} a, grad a, u)||_{L^2}` against t.
#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub alpha: f64,
    pub expected: f64,
    pub fit: FitResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayResult {
    pub run: RunOutcome,
    pub window: (f64, f64),
    pub fits: Vec<DecayFit>,
    /// `max_t ||U(t)||_{B^{-sigma}_{2,inf}} / ||U(0)||_{B^{-sigma}_{2,inf}}`.
    pub bneg_ratio: Option<f64>,
}

/// `-|alpha|/2 - sigma/2`.
pub fn expected_decay(alpha: f64, sigma: f64) -> f64 {
    -alpha.abs() / 2.0 - sigma / 2.0
}

/// Fit window `[1, tmax]`, which must span a decade.
pub fn decay_window(cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let w = (1.0, cfg.time.tmax);
    if w.1 < 10.0 * w.0 {
        return Err(NskError::Fit(format!("decay window [1, {}] is shorter than one decade", w.1)));
    }
    Ok(w)
}

pub fn decay_fits(series: &DiagnosticSeries, alpha: &[f64], sigma: f64, window: (f64, f64)) -> Result<Vec<DecayFit>> {
    alpha
        .iter()
        .map(|&a| {
            let col = series
                .column(&format!("L2_Lam[{}]", fmt_exp(a)))
                .ok_or_else(|| NskError::Fit(format!("no L2_Lam column for alpha = {a}")))?;
            Ok(DecayFit {
                alpha: a,
                expected: expected_decay(a, sigma),
                fit: power_fit(&series.times, &col, window)?,
            })
        })
        .collect()
}

/// Run at the first kappa of `cfg` and fit the decay of each `L2_Lam[alpha]`
/// column on `[1, tmax]`. An aborted run yields no fits.
pub fn decay_study(cfg: &ExperimentConfig) -> Result<DecayResult> {
    let window = decay_window(cfg)?;
    if cfg.diagnostics.alpha.is_empty() {
        return Err(NskError::InvalidParameter("decay study needs at least one alpha".into()));
    }
    let run = run_nsk(cfg, cfg.physics.kappa[0])?;
    let (fits, bneg_ratio) = if run.status.is_completed() {
        let col = run
            .series
            .column(&format!("Bneg[{}]", fmt_exp(cfg.diagnostics.sigma)))
            .expect("recorder always writes Bneg");
        let ratio = col.iter().cloned().fold(0.0, f64::max) / col[0];
        (decay_fits(&run.series, &cfg.diagnostics.alpha, cfg.diagnostics.sigma, window)?, Some(ratio))
    } else {
        (Vec::new(), None)
    };
    Ok(DecayResult {
        run,
        window,
        fits,
        bneg_ratio,
    })
}

/// Exact heat flow `e^{t Delta}` of the initial solution vector of `cfg`,
/// recorded on the stamps of a run: the decay study with nonlinearity and
/// capillary coupling switched off.
pub fn heat_surrogate(cfg: &ExperimentConfig) -> Result<DiagnosticSeries> {
    let s0 = initial_state(cfg, cfg.physics.kappa[0])?;
    heat_series(&solution_vector(&s0)?, cfg)
}

/// `L2_Lam[alpha]` and `Bneg[sigma]` of `e^{t Delta} u0` on the stamps of `cfg`.
pub fn heat_series(u0: &SpectralField, cfg: &ExperimentConfig) -> Result<DiagnosticSeries> {
    let lp = DyadicCutoff::new(u0.grid());
    let sigma = cfg.diagnostics.sigma;
    let neg = BesovParams::new(-sigma, 2.0, f64::INFINITY)?;
    let mut cols: Vec<String> = cfg.diagnostics.alpha.iter().map(|a| format!("L2_Lam[{}]", fmt_exp(*a))).collect();
    cols.push(format!("Bneg[{}]", fmt_exp(sigma)));
    let mut series = DiagnosticSeries::new(cols);
    let steps = cfg.steps();
    let cadence = cfg.time.cadence.max(1);
    for step in (0..=steps).filter(|s| s % cadence == 0 || *s == steps) {
        let t = step as f64 * cfg.time.dt;
        let ut = heat(u0, t);
        let mut row: Vec<f64> = cfg.diagnostics.alpha.iter().map(|a| lambda_l2(&ut, *a)).collect();
        row.push(neg.combine(lp.j_min(), &l2_block_norms(&lp, &ut)));
        series.push(t, row)?;
    }
    Ok(series)
}

fn heat(f: &SpectralField, t: f64) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for c in 0..f.comps() {
        for (k, v) in out.component_mut(c).iter_mut().enumerate() {
            let r = grid.kmag(k);
            *v *= (-r * r * t).exp();
        }
    }
    out
}

/// Decay fits of the heat surrogate, for comparison with [`decay_study`].
pub fn heat_surrogate_fits(cfg: &ExperimentConfig) -> Result<Vec<DecayFit>> {
    let window = decay_window(cfg)?;
    let series = heat_surrogate(cfg)?;
    decay_fits(&series, &cfg.diagnostics.alpha, cfg.diagnostics.sigma, window)
}
