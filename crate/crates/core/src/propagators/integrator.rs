use super::LinearPropagator;
use crate::error::{NskError, Result};
use crate::model::{nonlinear_remainder, CoefficientFns, MaterialLaws, State};
use crate::spectral::{gradient, lp_norm};

/// Safety factor `C_cfl` in the step-size bound of [`cfl_limit`].
pub const CFL_SAFETY: f64 = 0.5;

/// Largest admissible step for the explicit nonlinear stage:
/// `C_cfl / (|u|_inf k + sqrt(kappa) |psi~|_inf k^2 + |grad a|_inf k)` with
/// `k` the largest resolvable wavenumber. The linear part is exact and does
/// not enter.
pub fn cfl_limit(s: &State, laws: &MaterialLaws) -> Result<f64> {
    let k = s.grid().max_resolvable_k();
    let u_inf = lp_norm(&s.u, f64::INFINITY)?;
    let ga_inf = lp_norm(&gradient(&s.a), f64::INFINITY)?;
    let x = s.scaled_density(laws)?;
    let (xmin, xmax) = x
        .iter()
        .fold((0.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let psi = CoefficientFns::at_scaled(laws, xmin)?
        .psi
        .abs()
        .max(CoefficientFns::at_scaled(laws, xmax)?.psi.abs());
    let rate = u_inf * k + s.kappa.sqrt() * psi * k * k + ga_inf * k;
    Ok(if rate == 0.0 { f64::INFINITY } else { CFL_SAFETY / rate })
}

/// Strang-split exponential integrator with a fixed step: half an exact
/// linear step, one Heun (RK2) step on the nonlinear terms, half an exact
/// linear step.
#[derive(Clone, Debug)]
pub struct Integrator {
    laws: MaterialLaws,
    dt: f64,
    half: LinearPropagator,
    check_cfl: bool,
}

impl Integrator {
    pub fn new(s: &State, laws: &MaterialLaws, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NskError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if (laws.kappa - s.kappa).abs() > 1e-12 * s.kappa {
            return Err(NskError::Incompatible(format!(
                "state kappa {} differs from material kappa {}",
                s.kappa, laws.kappa
            )));
        }
        Ok(Self {
            laws: laws.clone(),
            dt,
            half: LinearPropagator::new(s.grid(), s.kappa, 0.5 * dt),
            check_cfl: true,
        })
    }

    /// Skip the CFL check (used by convergence studies that deliberately run
    /// at large steps on tiny amplitudes).
    pub fn without_cfl(mut self) -> Self {
        self.check_cfl = false;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn laws(&self) -> &MaterialLaws {
        &self.laws
    }

    pub fn step(&self, s: &State) -> Result<State> {
        if self.check_cfl {
            let limit = cfl_limit(s, &self.laws)?;
            if self.dt > limit {
                return Err(NskError::Cfl {
                    t: s.t,
                    dt: self.dt,
                    limit,
                });
            }
        }
        let dt = self.dt;
        let s0 = self.half.step(s);
        let (fa1, fu1) = nonlinear_remainder(&s0, &self.laws)?;
        let mut s1 = s0.clone();
        s1.a.axpy(dt, &fa1);
        s1.u.axpy(dt, &fu1);
        let (fa2, fu2) = nonlinear_remainder(&s1, &self.laws)?;
        let mut s2 = s0;
        s2.a.axpy(0.5 * dt, &(&fa1 + &fa2));
        s2.u.axpy(0.5 * dt, &(&fu1 + &fu2));
        let mut out = self.half.step(&s2);
        out.t = s.t + dt;
        out.a.symmetrize();
        out.u.symmetrize();
        out.scaled_density(&self.laws)?;
        Ok(out)
    }

    /// Advance `steps` times.
    pub fn run(&self, s: &State, steps: usize) -> Result<State> {
        let mut cur = s.clone();
        for _ in 0..steps {
            cur = self.step(&cur)?;
        }
        Ok(cur)
    }
}

/// One Strang step of size `dt`.
pub fn advance(s: &State, dt: f64, laws: &MaterialLaws) -> Result<State> {
    Integrator::new(s, laws, dt)?.step(s)
}
