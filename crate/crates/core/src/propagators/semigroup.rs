use num_complex::Complex64;

use crate::error::{NskError, Result};
use crate::model::State;
use crate::spectral::{gradient, h_symbol, leray_split, u_inv_symbol, u_symbol, SpectralField};

/// Parameters of `e^{i sqrt(kappa) H t} e^{t Delta}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemigroupParams {
    pub kappa: f64,
    pub t: f64,
}

impl SemigroupParams {
    pub fn new(kappa: f64, t: f64) -> Result<Self> {
        if !(kappa > 0.0) || !(t >= 0.0) {
            return Err(NskError::InvalidParameter(format!(
                "semigroup needs kappa > 0 and t >= 0, got kappa = {kappa}, t = {t}"
            )));
        }
        Ok(Self { kappa, t })
    }
}

fn apply_symbol(f: &SpectralField, sym: impl Fn(f64) -> Complex64) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for c in 0..f.comps() {
        for (k, v) in out.component_mut(c).iter_mut().enumerate() {
            if grid.resolvable(k) {
                *v *= sym(grid.kmag(k));
            } else {
                *v = Complex64::default();
            }
        }
    }
    out
}

/// Dissipative-dispersive semigroup `e^{i sqrt(kappa) H t} e^{t Delta}`, symbol
/// `exp((-|xi|^2 + i sqrt(kappa) H(xi)) t)`. The output is complex-valued in
/// physical space.
pub fn dd_semigroup(f: &SpectralField, p: SemigroupParams) -> SpectralField {
    let sk = p.kappa.sqrt();
    apply_symbol(f, |r| {
        Complex64::new(-r * r * p.t, sk * h_symbol(r, p.kappa) * p.t).exp()
    })
}

/// Propagator of the linear z-equation `d_t z = (2 Delta - i sqrt(kappa) H) z + F`,
/// symbol `exp((-2|xi|^2 - i sqrt(kappa) H(xi)) t)`.
pub fn z_generator(f: &SpectralField, kappa: f64, t: f64) -> SpectralField {
    let sk = kappa.sqrt();
    apply_symbol(f, |r| {
        Complex64::new(-2.0 * r * r * t, -sk * h_symbol(r, kappa) * t).exp()
    })
}

/// `z = U^{-1} grad a + i Qu` as a complex d-vector field.
#[derive(Clone, Debug)]
pub struct ZField {
    pub z: SpectralField,
    pub kappa: f64,
}

/// Coefficients of the real part of the physical field.
fn real_part(f: &SpectralField) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for c in 0..f.comps() {
        let src = f.component(c);
        for (k, v) in out.component_mut(c).iter_mut().enumerate() {
            *v = 0.5 * (src[k] + src[grid.conjugate_index(k)].conj());
        }
    }
    out
}

/// Coefficients of the imaginary part of the physical field.
fn imag_part(f: &SpectralField) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    let half_i = Complex64::new(0.0, -0.5);
    for c in 0..f.comps() {
        let src = f.component(c);
        for (k, v) in out.component_mut(c).iter_mut().enumerate() {
            *v = half_i * (src[k] - src[grid.conjugate_index(k)].conj());
        }
    }
    out
}

fn radial(f: &SpectralField, sym: impl Fn(f64) -> f64) -> SpectralField {
    apply_symbol(f, |r| Complex64::new(sym(r), 0.0))
}

impl ZField {
    pub fn from_parts(grad_a: &SpectralField, qu: &SpectralField, kappa: f64) -> Self {
        let mut z = radial(grad_a, |r| u_inv_symbol(r, kappa));
        let mut iq = qu.clone();
        iq.scale_complex(Complex64::new(0.0, 1.0));
        z += &iq;
        Self { z, kappa }
    }

    pub fn from_state(s: &State) -> Self {
        let (_, qu) = leray_split(&s.u);
        Self::from_parts(&gradient(&s.a), &qu, s.kappa)
    }

    /// `(grad a, Qu)` from `U Re z` and `Im z`.
    pub fn parts(&self) -> (SpectralField, SpectralField) {
        let re = real_part(&self.z);
        let grad_a = radial(&re, |r| u_symbol(r, self.kappa));
        (grad_a, imag_part(&self.z))
    }

    pub fn rel_diff(&self, other: &ZField) -> f64 {
        self.z.rel_l2_diff(&other.z)
    }
}

/// Snapshot of the solution and its nonlinear terms `(f, g)` for the Duhamel
/// reconstruction.
#[derive(Clone, Debug)]
pub struct DuhamelSnapshot {
    pub t: f64,
    pub a: SpectralField,
    pub u: SpectralField,
    pub f: SpectralField,
    pub g: SpectralField,
}

/// Forcing `2 H grad a + U^{-1} grad f + i Q g` of the z-equation.
fn z_forcing(s: &DuhamelSnapshot, kappa: f64) -> SpectralField {
    let mut out = radial(&gradient(&s.a), |r| 2.0 * h_symbol(r, kappa));
    out += &radial(&gradient(&s.f), |r| u_inv_symbol(r, kappa));
    let (_, mut qg) = leray_split(&s.g);
    qg.scale_complex(Complex64::new(0.0, 1.0));
    out += &qg;
    out
}

/// Duhamel reconstruction of `z` at the last snapshot time:
///
/// ```text
/// z(T) = S(T - t0) z(t0) + int_{t0}^T S(T - s) (2 H grad a + U^{-1} grad f + i Q g)(s) ds
/// ```
///
/// with `S(t) = exp((2 Delta - i sqrt(kappa) H) t)` and the trapezoid rule on
/// the snapshot times.
pub fn duhamel_z_solve(history: &[DuhamelSnapshot], kappa: f64) -> Result<ZField> {
    let first = history
        .first()
        .ok_or_else(|| NskError::InvalidParameter("Duhamel reconstruction needs at least one snapshot".into()))?;
    let t_end = history.last().map(|s| s.t).unwrap_or(first.t);
    let (_, qu0) = leray_split(&first.u);
    let z0 = ZField::from_parts(&gradient(&first.a), &qu0, kappa);
    let mut z = z_generator(&z0.z, kappa, t_end - first.t);
    let propagated: Vec<SpectralField> = history
        .iter()
        .map(|s| z_generator(&z_forcing(s, kappa), kappa, t_end - s.t))
        .collect();
    for (w, pair) in history.windows(2).zip(propagated.windows(2)) {
        let h = w[1].t - w[0].t;
        if !(h > 0.0) {
            return Err(NskError::InvalidParameter("snapshot times must increase".into()));
        }
        z.axpy(0.5 * h, &pair[0]);
        z.axpy(0.5 * h, &pair[1]);
    }
    Ok(ZField { z, kappa })
}
