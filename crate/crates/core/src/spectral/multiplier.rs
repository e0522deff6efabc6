use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::SpectralField;
use crate::error::{NskError, Result};

type ScalarSymbol = dyn Fn(&[f64]) -> Option<Complex64> + Send + Sync;
type MatrixSymbol = dyn Fn(&[f64]) -> Option<Vec<Complex64>> + Send + Sync;

#[derive(Clone)]
enum Symbol {
    Scalar(Arc<ScalarSymbol>),
    /// Row-major `size x size` matrix acting on the component index.
    Matrix { size: usize, eval: Arc<MatrixSymbol> },
}

/// Fourier multiplier `m(D)`: a scalar- or matrix-valued function of the
/// wavevector. A symbol returning `None` is undefined at that wavevector;
/// applying it to a field with a resolvable mode there is an error.
#[derive(Clone)]
pub struct FourierMultiplier {
    label: String,
    degree: Option<f64>,
    symbol: Symbol,
}

impl fmt::Debug for FourierMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierMultiplier")
            .field("label", &self.label)
            .field("degree", &self.degree)
            .finish()
    }
}

impl FourierMultiplier {
    pub fn scalar(
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> Option<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            degree: None,
            symbol: Symbol::Scalar(Arc::new(f)),
        }
    }

    /// Real radial multiplier `m(|xi|)`.
    pub fn radial(
        label: impl Into<String>,
        f: impl Fn(f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        Self::scalar(label, move |xi: &[f64]| {
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            f(r).map(|v| Complex64::new(v, 0.0))
        })
    }

    pub fn matrix(
        label: impl Into<String>,
        size: usize,
        f: impl Fn(&[f64]) -> Option<Vec<Complex64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            degree: None,
            symbol: Symbol::Matrix {
                size,
                eval: Arc::new(f),
            },
        }
    }

    pub fn with_degree(mut self, m: f64) -> Self {
        self.degree = Some(m);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Homogeneity degree, when the symbol is homogeneous.
    pub fn degree(&self) -> Option<f64> {
        self.degree
    }

    pub fn identity() -> Self {
        Self::radial("1", |_| Some(1.0)).with_degree(0.0)
    }

    /// `Lambda^alpha = |D|^alpha`. At `xi = 0` the symbol is `0` for
    /// `alpha > 0`, `1` for `alpha = 0` and undefined for `alpha < 0`.
    pub fn lambda(alpha: f64) -> Self {
        Self::radial(format!("Lambda^{alpha}"), move |r| {
            if r == 0.0 {
                match alpha.partial_cmp(&0.0) {
                    Some(std::cmp::Ordering::Greater) => Some(0.0),
                    Some(std::cmp::Ordering::Equal) => Some(1.0),
                    _ => None,
                }
            } else {
                Some(r.powf(alpha))
            }
        })
        .with_degree(alpha)
    }

    /// `Lambda^alpha` with the zero mode set to zero (the homogeneous
    /// convention; defined for every real `alpha`).
    pub fn lambda_mean_free(alpha: f64) -> Self {
        Self::radial(format!("Lambda^{alpha}_0"), move |r| {
            Some(if r == 0.0 { 0.0 } else { r.powf(alpha) })
        })
        .with_degree(alpha)
    }

    /// Heat semigroup `e^{t Delta}`.
    pub fn heat(t: f64) -> Self {
        Self::radial(format!("exp({t} Delta)"), move |r| Some((-r * r * t).exp()))
    }

    /// `(-Delta)^{-1}`, defined as zero on the mean mode.
    pub fn inverse_laplacian() -> Self {
        Self::radial("(-Delta)^-1", |r| Some(if r == 0.0 { 0.0 } else { 1.0 / (r * r) }))
            .with_degree(-2.0)
    }

    /// Evaluate a scalar symbol (panics for matrix symbols).
    pub fn eval_scalar(&self, xi: &[f64]) -> Option<Complex64> {
        match &self.symbol {
            Symbol::Scalar(f) => f(xi),
            Symbol::Matrix { .. } => panic!("eval_scalar on matrix multiplier `{}`", self.label),
        }
    }

    /// Pointwise product of two scalar symbols.
    pub fn compose(&self, other: &FourierMultiplier) -> FourierMultiplier {
        let (a, b) = match (&self.symbol, &other.symbol) {
            (Symbol::Scalar(a), Symbol::Scalar(b)) => (a.clone(), b.clone()),
            _ => panic!("composition is only implemented for scalar symbols"),
        };
        let degree = match (self.degree, other.degree) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        FourierMultiplier {
            label: format!("{} o {}", self.label, other.label),
            degree,
            symbol: Symbol::Scalar(Arc::new(move |xi: &[f64]| Some(a(xi)? * b(xi)?))),
        }
    }

    /// Coefficient-wise application followed by the dealiasing mask.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        let grid = f.grid();
        let len = grid.len();
        let mut out = f.clone();
        match &self.symbol {
            Symbol::Scalar(sym) => {
                for k in 0..len {
                    if !grid.resolvable(k) {
                        for c in 0..f.comps() {
                            out.component_mut(c)[k] = Complex64::default();
                        }
                        continue;
                    }
                    let m = sym(grid.xi(k)).ok_or_else(|| self.undefined(grid.xi(k)))?;
                    for c in 0..f.comps() {
                        out.component_mut(c)[k] *= m;
                    }
                }
            }
            Symbol::Matrix { size, eval } => {
                if *size != f.comps() {
                    return Err(NskError::Incompatible(format!(
                        "multiplier `{}` is {size}x{size}, field has {} components",
                        self.label,
                        f.comps()
                    )));
                }
                let mut v = vec![Complex64::default(); *size];
                for k in 0..len {
                    if !grid.resolvable(k) {
                        for c in 0..*size {
                            out.component_mut(c)[k] = Complex64::default();
                        }
                        continue;
                    }
                    let m = eval(grid.xi(k)).ok_or_else(|| self.undefined(grid.xi(k)))?;
                    for (c, slot) in v.iter_mut().enumerate() {
                        *slot = f.component(c)[k];
                    }
                    for row in 0..*size {
                        let mut acc = Complex64::default();
                        for col in 0..*size {
                            acc += m[row * size + col] * v[col];
                        }
                        out.component_mut(row)[k] = acc;
                    }
                }
            }
        }
        Ok(out)
    }

    fn undefined(&self, xi: &[f64]) -> NskError {
        NskError::UndefinedMultiplier {
            label: self.label.clone(),
            xi: xi.to_vec(),
        }
    }
}

/// `H = sqrt(-Delta (1/kappa - Delta))`, symbol `|xi| sqrt(1/kappa + |xi|^2)`.
pub fn op_h(kappa: f64) -> Result<FourierMultiplier> {
    check_kappa(kappa)?;
    Ok(FourierMultiplier::radial(format!("H(kappa={kappa})"), move |r| {
        Some(h_symbol(r, kappa))
    }))
}

/// `U = sqrt(-Delta / (1/kappa - Delta))`, symbol `|xi| / sqrt(1/kappa + |xi|^2)`.
pub fn op_u(kappa: f64) -> Result<FourierMultiplier> {
    check_kappa(kappa)?;
    Ok(FourierMultiplier::radial(format!("U(kappa={kappa})"), move |r| {
        Some(u_symbol(r, kappa))
    }))
}

/// `U^{-1}`, with `U^{-1}(0) := 0` (only ever applied to mean-free gradients).
pub fn op_u_inv(kappa: f64) -> Result<FourierMultiplier> {
    check_kappa(kappa)?;
    Ok(FourierMultiplier::radial(format!("U^-1(kappa={kappa})"), move |r| {
        Some(u_inv_symbol(r, kappa))
    }))
}

pub fn h_symbol(r: f64, kappa: f64) -> f64 {
    r * (1.0 / kappa + r * r).sqrt()
}

pub fn u_symbol(r: f64, kappa: f64) -> f64 {
    r / (1.0 / kappa + r * r).sqrt()
}

pub fn u_inv_symbol(r: f64, kappa: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        (1.0 / kappa + r * r).sqrt() / r
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(NskError::InvalidParameter(format!("kappa must be positive, got {kappa}")))
    }
}
