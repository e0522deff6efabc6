//! Incompressible Navier-Stokes reference solver
//! `d_t v - Delta v + P(v.grad v) = 0`, `div v = 0`, and the error field `Pu - v`.

use crate::error::{NskError, Result};
use crate::model::State;
use crate::propagators::CFL_SAFETY;
use crate::spectral::{leray_project, lp_norm, partial, Grid, SpectralField};

#[derive(Clone, Debug)]
pub struct InsState {
    pub v: SpectralField,
    pub t: f64,
}

impl InsState {
    /// Leray-projected, dealiased copy of `u` at time `t`.
    pub fn from_velocity(u: &SpectralField, t: f64) -> Result<Self> {
        if u.comps() != u.grid().dim() {
            return Err(NskError::Incompatible(format!(
                "velocity needs {} components, got {}",
                u.grid().dim(),
                u.comps()
            )));
        }
        Ok(Self {
            v: leray_project(&u.clone().dealiased()),
            t,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    pub fn energy(&self) -> f64 {
        self.v.l2_norm()
    }
}

/// `-P(v.grad v)`, dealiased.
pub fn ins_nonlinearity(v: &SpectralField) -> SpectralField {
    let grid = v.grid();
    let d = grid.dim();
    let len = grid.len();
    let vn = v.to_physical();
    let mut adv = vec![vec![0.0; len]; d];
    for (i, out) in adv.iter_mut().enumerate() {
        let vi = v.extract(i);
        for (j, vj) in vn.iter().enumerate() {
            let dj = partial(&vi, j).to_physical().swap_remove(0);
            for k in 0..len {
                out[k] += vj[k] * dj[k];
            }
        }
    }
    let mut n = leray_project(&SpectralField::from_physical(grid, &adv).dealiased());
    n.scale(-1.0);
    n
}

/// `C_cfl / (|v|_inf k_max)`.
pub fn ins_cfl_limit(s: &InsState) -> Result<f64> {
    let rate = lp_norm(&s.v, f64::INFINITY)? * s.grid().max_resolvable_k();
    Ok(if rate == 0.0 { f64::INFINITY } else { CFL_SAFETY / rate })
}

/// Fixed-step Strang scheme: exact heat half-steps around a Heun step on
/// `-P(v.grad v)`, then re-projection.
#[derive(Clone, Debug)]
pub struct InsIntegrator {
    dt: f64,
    half_heat: Vec<f64>,
}

impl InsIntegrator {
    pub fn new(grid: &Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NskError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let half_heat = grid.kmags().iter().map(|r| (-0.5 * r * r * dt).exp()).collect();
        Ok(Self { dt, half_heat })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn heat(&self, v: &mut SpectralField) {
        for c in 0..v.comps() {
            for (x, h) in v.component_mut(c).iter_mut().zip(&self.half_heat) {
                *x *= h;
            }
        }
    }

    pub fn step(&self, s: &InsState) -> Result<InsState> {
        let limit = ins_cfl_limit(s)?;
        if self.dt > limit {
            return Err(NskError::Cfl {
                t: s.t,
                dt: self.dt,
                limit,
            });
        }
        let dt = self.dt;
        let mut v0 = s.v.clone();
        self.heat(&mut v0);
        let n1 = ins_nonlinearity(&v0);
        let mut v1 = v0.clone();
        v1.axpy(dt, &n1);
        let n2 = ins_nonlinearity(&v1);
        v0.axpy(0.5 * dt, &n1);
        v0.axpy(0.5 * dt, &n2);
        self.heat(&mut v0);
        let mut v = leray_project(&v0.dealiased());
        v.symmetrize();
        Ok(InsState { v, t: s.t + dt })
    }
}

pub fn ins_advance(s: &InsState, dt: f64) -> Result<InsState> {
    InsIntegrator::new(s.grid(), dt)?.step(s)
}

/// `Pu - v`, provided the two states agree in time to within `tol`.
pub fn error_field(s: &State, ins: &InsState, tol: f64) -> Result<SpectralField> {
    if (s.t - ins.t).abs() > tol {
        return Err(NskError::TimeMismatch {
            left: s.t,
            right: ins.t,
            tol,
        });
    }
    if s.grid() != ins.grid() {
        return Err(NskError::Incompatible("compressible and incompressible grids differ".into()));
    }
    Ok(&leray_project(&s.u) - &ins.v)
}
