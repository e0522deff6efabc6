//! Constitutive laws, the change of variables `a = sqrt(kappa) L(rho)` and the
//! right-hand side of the perturbation system
//!
//! ```text
//! d_t a + sqrt(kappa) div u = f
//! d_t u - (Delta u + grad div u) + kappa^{-1/2} grad a - sqrt(kappa) grad Delta a = g
//! ```

mod laws;
mod rhs;

pub use laws::{CoefficientFns, MaterialLaws, Poly, RANGE_FRACTION, RHO_FLOOR};
pub use rhs::{
    linear_rhs, nonlinear_remainder, nonlinearity_f, nonlinearity_g, primitive_rates, rhs_defect,
    GTerms,
};

use crate::error::{NskError, Result};
use crate::spectral::{Grid, SpectralField};

/// Perturbation state `(a, u)` at time `t`.
#[derive(Clone, Debug)]
pub struct State {
    pub a: SpectralField,
    pub u: SpectralField,
    pub kappa: f64,
    pub t: f64,
}

impl State {
    pub fn equilibrium(grid: &Grid, kappa: f64) -> Self {
        Self {
            a: SpectralField::scalar_zeros(grid),
            u: SpectralField::vector_zeros(grid),
            kappa,
            t: 0.0,
        }
    }

    pub fn new(a: SpectralField, u: SpectralField, kappa: f64, t: f64) -> Result<Self> {
        if a.comps() != 1 || u.comps() != a.grid().dim() || a.grid() != u.grid() {
            return Err(NskError::Incompatible("state needs a scalar a and a d-vector u on one grid".into()));
        }
        Ok(Self { a, u, kappa, t })
    }

    pub fn grid(&self) -> &Grid {
        self.a.grid()
    }

    /// Nodal values of `x = kappa^{-1/2} a`, checked against the admissible range.
    pub fn scaled_density(&self, laws: &MaterialLaws) -> Result<Vec<f64>> {
        let s = self.kappa.sqrt().recip();
        let x: Vec<f64> = self.a.to_physical().swap_remove(0).into_iter().map(|v| v * s).collect();
        let (lo, hi) = laws.scaled_range();
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &x {
            xmin = xmin.min(v);
            xmax = xmax.max(v);
        }
        if !(xmin >= lo && xmax <= hi) {
            let value = if xmin < lo || xmin.is_nan() { xmin } else { xmax };
            return Err(NskError::Invertibility {
                t: self.t,
                value,
                lower: lo,
                upper: hi,
            });
        }
        Ok(x)
    }

    /// Nodal density `rho = L^{-1}(kappa^{-1/2} a)`.
    pub fn density(&self, laws: &MaterialLaws) -> Result<Vec<f64>> {
        self.scaled_density(laws)?
            .into_iter()
            .map(|x| laws.ell_inverse(x))
            .collect()
    }

    /// Nodal `rho - 1`, free of the cancellation in `rho - 1.0`.
    pub fn density_excess(&self, laws: &MaterialLaws) -> Result<Vec<f64>> {
        self.scaled_density(laws)?
            .into_iter()
            .map(|x| laws.density_excess(x))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.a.coeffs().iter().chain(self.u.coeffs()).all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `a = sqrt(kappa) L(rho)` at every node. The result interpolates the nodal
/// values exactly (no dealiasing), so the round trip is exact up to rounding.
pub fn to_perturbation(
    rho: &SpectralField,
    u: &SpectralField,
    laws: &MaterialLaws,
) -> Result<State> {
    let grid = rho.grid();
    let nodes = rho.to_physical().swap_remove(0);
    let sk = laws.kappa.sqrt();
    let (lo, hi) = laws.scaled_range();
    let mut a = Vec::with_capacity(nodes.len());
    for &r in &nodes {
        if !(r > 0.0) {
            return Err(NskError::InvalidParameter(format!("density must be positive, got {r}")));
        }
        let x = laws.ell(r)?;
        if x < lo || x > hi {
            return Err(NskError::Invertibility {
                t: 0.0,
                value: x,
                lower: lo,
                upper: hi,
            });
        }
        a.push(sk * x);
    }
    State::new(SpectralField::from_physical(grid, &[a]), u.clone(), laws.kappa, 0.0)
}

/// Primitive pair `(rho, u)` with `rho = L^{-1}(kappa^{-1/2} a)` nodewise.
pub fn to_primitive(s: &State, laws: &MaterialLaws) -> Result<(SpectralField, SpectralField)> {
    let rho = s.density(laws)?;
    Ok((SpectralField::from_physical(s.grid(), &[rho]), s.u.clone()))
}
