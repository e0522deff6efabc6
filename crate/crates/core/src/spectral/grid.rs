use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{NskError, Result};

/// Uniform periodic grid on the torus `[0, ldom)^d`.
///
/// Wavevectors, magnitudes and the 2/3-rule dealiasing mask are tabulated once
/// per grid; clones share the tables and the FFT plans.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    n: usize,
    ldom: f64,
    k0: f64,
    len: usize,
    xi: Vec<[f64; 3]>,
    kmag: Vec<f64>,
    mask: Vec<bool>,
    nyquist: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(dim: usize, n: usize, ldom: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(NskError::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(NskError::InvalidGrid(format!(
                "points per axis must be a power of two >= 16, got {n}"
            )));
        }
        if !(ldom.is_finite() && ldom > 0.0) {
            return Err(NskError::InvalidGrid(format!("domain length must be positive, got {ldom}")));
        }
        let len = n.pow(dim as u32);
        let k0 = 2.0 * std::f64::consts::PI / ldom;
        let cutoff = n as f64 / 3.0;
        let half = (n / 2) as i64;

        let mut xi = Vec::with_capacity(len);
        let mut kmag = Vec::with_capacity(len);
        let mut mask = Vec::with_capacity(len);
        let mut nyquist = Vec::with_capacity(len);
        let mut idx = [0usize; 3];
        for flat in 0..len {
            unflatten(flat, n, dim, &mut idx);
            let mut v = [0.0; 3];
            let mut m2 = 0.0;
            let mut nyq = false;
            for a in 0..dim {
                let s = signed(idx[a], n);
                nyq |= s == -half;
                let s = s as f64;
                v[a] = k0 * s;
                m2 += s * s;
            }
            xi.push(v);
            kmag.push(k0 * m2.sqrt());
            mask.push(m2.sqrt() <= cutoff);
            nyquist.push(nyq);
        }

        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                n,
                ldom,
                k0,
                len,
                xi,
                kmag,
                mask,
                nyquist,
                fwd,
                inv,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn ldom(&self) -> f64 {
        self.inner.ldom
    }

    /// Lowest nonzero wavenumber `2 pi / ldom`.
    pub fn k0(&self) -> f64 {
        self.inner.k0
    }

    /// Number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    pub fn volume(&self) -> f64 {
        self.inner.ldom.powi(self.inner.dim as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.inner.len as f64
    }

    pub fn spacing(&self) -> f64 {
        self.inner.ldom / self.inner.n as f64
    }

    /// Radius of the spherical 2/3-rule mask.
    pub fn dealias_radius(&self) -> f64 {
        self.inner.k0 * self.inner.n as f64 / 3.0
    }

    /// Largest `|xi|` kept by the dealiasing mask.
    pub fn max_resolvable_k(&self) -> f64 {
        self.inner
            .kmag
            .iter()
            .zip(&self.inner.mask)
            .filter(|(_, &m)| m)
            .map(|(&k, _)| k)
            .fold(0.0, f64::max)
    }

    /// Wavevector of a lattice index given per axis. Indices are taken modulo
    /// `n`, so negative indices address the upper half of the FFT ordering.
    pub fn wavevector(&self, index: &[i64]) -> Result<Vec<f64>> {
        if index.len() != self.dim() {
            return Err(NskError::InvalidParameter(format!(
                "index has {} entries, grid dimension is {}",
                index.len(),
                self.dim()
            )));
        }
        let n = self.n() as i64;
        Ok(index
            .iter()
            .map(|&i| self.k0() * signed(i.rem_euclid(n) as usize, self.n()) as f64)
            .collect())
    }

    /// Flat storage offset of a (possibly negative) lattice index.
    pub fn flat_index(&self, index: &[i64]) -> usize {
        let n = self.n() as i64;
        index
            .iter()
            .fold(0usize, |acc, &i| acc * self.n() + i.rem_euclid(n) as usize)
    }

    /// Flat offset of the mode `-xi` for the mode stored at `flat`.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.n();
        let mut idx = [0usize; 3];
        unflatten(flat, n, self.dim(), &mut idx);
        let mut out = 0;
        for &i in idx.iter().take(self.dim()) {
            out = out * n + (n - i) % n;
        }
        out
    }

    pub fn xi(&self, flat: usize) -> &[f64] {
        &self.inner.xi[flat][..self.inner.dim]
    }

    pub fn kmag(&self, flat: usize) -> f64 {
        self.inner.kmag[flat]
    }

    pub fn kmags(&self) -> &[f64] {
        &self.inner.kmag
    }

    /// True when the mode survives the 2/3-rule mask.
    pub fn resolvable(&self, flat: usize) -> bool {
        self.inner.mask[flat]
    }

    /// True for modes carrying a Nyquist index on some axis.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        self.inner.nyquist[flat]
    }

    /// Physical coordinates of grid node `flat`.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let mut idx = [0usize; 3];
        unflatten(flat, self.n(), self.dim(), &mut idx);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = idx[a] as f64 * h;
        }
        x
    }

    /// In-place forward transform to Fourier-series coefficients
    /// `c_k = N^{-d} sum_x f(x) e^{-i k.x}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.fwd);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// In-place inverse transform `f(x) = sum_k c_k e^{i k.x}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.inv);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.len());
        let n = self.n();
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // Last axis is contiguous.
        fft.process_with_scratch(data, &mut scratch);
        if self.dim() == 1 {
            return;
        }
        let mut slab: Vec<Complex64> = Vec::new();
        for axis in (0..self.dim() - 1).rev() {
            let stride = n.pow((self.dim() - 1 - axis) as u32);
            let outer = self.len() / (n * stride);
            slab.resize(n * stride, Complex64::default());
            for o in 0..outer {
                let base = o * n * stride;
                let block = &mut data[base..base + n * stride];
                // transpose (n x stride) -> (stride x n)
                for k in 0..n {
                    let row = &block[k * stride..(k + 1) * stride];
                    for (s, v) in row.iter().enumerate() {
                        slab[s * n + k] = *v;
                    }
                }
                fft.process_with_scratch(&mut slab, &mut scratch);
                for k in 0..n {
                    let row = &mut block[k * stride..(k + 1) * stride];
                    for (s, v) in row.iter_mut().enumerate() {
                        *v = slab[s * n + k];
                    }
                }
            }
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim() && self.n() == other.n() && self.ldom() == other.ldom())
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim())
            .field("n", &self.n())
            .field("ldom", &self.ldom())
            .finish()
    }
}

/// Signed FFT frequency index in `[-n/2, n/2)`.
pub fn signed(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn unflatten(mut flat: usize, n: usize, dim: usize, out: &mut [usize; 3]) {
    for a in (0..dim).rev() {
        out[a] = flat % n;
        flat /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wavevector_examples() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        assert_eq!(g.wavevector(&[1, 0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(g.wavevector(&[0, 0]).unwrap(), vec![0.0, 0.0]);
        let g = Grid::new(2, 16, 4.0 * PI).unwrap();
        let xi = g.wavevector(&[-2, 3]).unwrap();
        assert!((xi[0] + 1.0).abs() < 1e-15 && (xi[1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn signed_range() {
        let n = 16;
        let all: Vec<i64> = (0..n).map(|i| signed(i, n)).collect();
        assert_eq!(*all.iter().min().unwrap(), -8);
        assert_eq!(*all.iter().max().unwrap(), 7);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1, 16, 1.0).is_err());
        assert!(Grid::new(2, 8, 1.0).is_err());
        assert!(Grid::new(2, 24, 1.0).is_err());
        assert!(Grid::new(3, 16, 0.0).is_err());
    }

    #[test]
    fn conjugate_index_maps_to_negated_wavevector() {
        let g = Grid::new(3, 16, 3.0).unwrap();
        for flat in [1usize, 17, 300, 4000] {
            let c = g.conjugate_index(flat);
            let a = g.xi(flat);
            let b = g.xi(c);
            for (x, y) in a.iter().zip(b) {
                // Nyquist maps onto itself
                assert!(x + y == 0.0 || (x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_transform() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let mut data: Vec<Complex64> = (0..g.len())
            .map(|f| {
                let x = g.position(f);
                Complex64::new((2.0 * x[0] + 3.0 * x[1]).cos(), 0.0)
            })
            .collect();
        g.forward(&mut data);
        let hit = g.flat_index(&[2, 3]);
        let conj = g.flat_index(&[-2, -3]);
        assert!((data[hit].re - 0.5).abs() < 1e-14);
        assert!((data[conj].re - 0.5).abs() < 1e-14);
        let rest: f64 = data
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != hit && *i != conj)
            .map(|(_, c)| c.norm())
            .sum();
        assert!(rest < 1e-12);
    }
}
