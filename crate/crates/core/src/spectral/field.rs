use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::Grid;
use crate::error::{NskError, Result};

/// Band-limited scalar or vector field stored as Fourier-series coefficients.
///
/// Coefficients are laid out component-major: `coeffs[c * grid.len() + k]`.
/// The normalization is `f(x) = sum_k c_k e^{i k.x}`, so a real mode
/// `A cos(k.x)` carries `A/2` at `k` and at `-k`, and Parseval reads
/// `||f||_{L^2}^2 = |T^d| sum_k |c_k|^2`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    comps: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid, comps: usize) -> Self {
        Self {
            grid: grid.clone(),
            comps,
            coeffs: vec![Complex64::default(); comps * grid.len()],
        }
    }

    pub fn scalar_zeros(grid: &Grid) -> Self {
        Self::zeros(grid, 1)
    }

    pub fn vector_zeros(grid: &Grid) -> Self {
        Self::zeros(grid, grid.dim())
    }

    pub fn from_coeffs(grid: &Grid, comps: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != comps * grid.len() {
            return Err(NskError::Incompatible(format!(
                "expected {} coefficients, got {}",
                comps * grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
            coeffs,
        })
    }

    /// Forward-transform real physical-space samples, one slice per component.
    pub fn from_physical(grid: &Grid, values: &[Vec<f64>]) -> Self {
        let len = grid.len();
        let mut coeffs = Vec::with_capacity(values.len() * len);
        for comp in values {
            assert_eq!(comp.len(), len, "physical component has wrong length");
            let start = coeffs.len();
            coeffs.extend(comp.iter().map(|&v| Complex64::new(v, 0.0)));
            grid.forward(&mut coeffs[start..]);
        }
        Self {
            grid: grid.clone(),
            comps: values.len(),
            coeffs,
        }
    }

    pub fn from_physical_complex(grid: &Grid, values: &[Vec<Complex64>]) -> Self {
        let len = grid.len();
        let mut coeffs = Vec::with_capacity(values.len() * len);
        for comp in values {
            assert_eq!(comp.len(), len, "physical component has wrong length");
            let start = coeffs.len();
            coeffs.extend_from_slice(comp);
            grid.forward(&mut coeffs[start..]);
        }
        Self {
            grid: grid.clone(),
            comps: values.len(),
            coeffs,
        }
    }

    /// Scalar field sampled from a function of position.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let vals: Vec<f64> = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                f(&x[..grid.dim()])
            })
            .collect();
        Self::from_physical(grid, &[vals])
    }

    /// Stack scalar fields into one multi-component field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| NskError::Incompatible("cannot stack zero fields".into()))?;
        let mut coeffs = Vec::with_capacity(parts.len() * first.grid.len());
        let mut comps = 0;
        for p in parts {
            if p.grid != first.grid {
                return Err(NskError::Incompatible("stacked fields live on different grids".into()));
            }
            coeffs.extend_from_slice(&p.coeffs);
            comps += p.comps;
        }
        Ok(Self {
            grid: first.grid.clone(),
            comps,
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Copy of one component as a scalar field.
    pub fn extract(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            comps: 1,
            coeffs: self.component(c).to_vec(),
        }
    }

    /// Real part of the physical-space samples, one vector per component.
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        self.to_physical_complex()
            .into_iter()
            .map(|c| c.into_iter().map(|z| z.re).collect())
            .collect()
    }

    pub fn to_physical_complex(&self) -> Vec<Vec<Complex64>> {
        (0..self.comps)
            .map(|c| {
                let mut buf = self.component(c).to_vec();
                self.grid.inverse(&mut buf);
                buf
            })
            .collect()
    }

    /// Zero every coefficient outside the 2/3-rule mask.
    pub fn dealias(&mut self) {
        let len = self.grid.len();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !self.grid.resolvable(i % len) {
                *c = Complex64::default();
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    /// Zero-mode coefficient of component `c` (the spatial mean).
    pub fn mean(&self, c: usize) -> Complex64 {
        self.component(c)[0]
    }

    /// The field with its spatial mean removed.
    pub fn mean_free(&self) -> Self {
        let mut out = self.clone();
        for c in 0..self.comps {
            out.component_mut(c)[0] = Complex64::default();
        }
        out
    }

    /// `L^2` norm by Parseval; vector fields use the pointwise Euclidean norm.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Largest deviation from conjugate symmetry `c(-k) = conj c(k)`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let len = self.grid.len();
        let mut worst: f64 = 0.0;
        for c in 0..self.comps {
            let comp = self.component(c);
            for (k, v) in comp.iter().enumerate().take(len) {
                if self.grid.is_nyquist(k) {
                    continue;
                }
                let m = self.grid.conjugate_index(k);
                worst = worst.max((v - comp[m].conj()).norm());
            }
        }
        worst
    }

    /// Force exact conjugate symmetry (and drop Nyquist modes).
    pub fn symmetrize(&mut self) {
        let grid = self.grid.clone();
        let len = grid.len();
        for c in 0..self.comps {
            let comp = self.component_mut(c);
            for k in 0..len {
                if grid.is_nyquist(k) {
                    comp[k] = Complex64::default();
                    continue;
                }
                let m = grid.conjugate_index(k);
                if m < k {
                    continue;
                }
                let avg = 0.5 * (comp[k] + comp[m].conj());
                comp[k] = avg;
                comp[m] = avg.conj();
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    pub fn scale_complex(&mut self, s: Complex64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        self.check_same(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.check_same(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `||self - other||_{L^2} / ||other||_{L^2}` (absolute when `other` vanishes).
    pub fn rel_l2_diff(&self, other: &SpectralField) -> f64 {
        self.check_same(other);
        let diff: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let base: f64 = other.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if base == 0.0 {
            diff.sqrt() * self.grid.volume().sqrt()
        } else {
            (diff / base).sqrt()
        }
    }

    fn check_same(&self, other: &SpectralField) {
        assert!(
            self.grid == other.grid && self.comps == other.comps,
            "field shapes differ: {} vs {} components",
            self.comps,
            other.comps
        );
    }
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.check_same(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.check_same(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self * -1.0
    }
}
