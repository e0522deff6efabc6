//! Homogeneous Littlewood-Paley decomposition, Besov and Chemin-Lerner norms,
//! Bony paraproducts and Bernstein ratios.
//!
//! `chi` is a radial C-infinity bump equal to 1 on `|xi| <= 1` and 0 on
//! `|xi| >= 4/3`; `phi(xi) = chi(xi/2) - chi(xi)` lives on `1 < |xi| < 8/3`
//! and equals 1 on `4/3 <= |xi| <= 2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NskError, Result};
use crate::spectral::{lp_norm, product, Grid, SpectralField};

/// `exp(-1/x)` for `x > 0`, else 0.
fn mollifier(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 (at `t <= 0`) to 1 (at `t >= 1`).
fn smooth_step(t: f64) -> f64 {
    let a = mollifier(t);
    let b = mollifier(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Low-frequency profile `chi(r)`.
pub fn chi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 4.0 / 3.0 {
        0.0
    } else {
        1.0 - smooth_step(3.0 * (r - 1.0))
    }
}

/// Annulus profile `phi(r) = chi(r/2) - chi(r)`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Dyadic cutoff family attached to a grid, with its resolvable block range.
#[derive(Clone, Debug)]
pub struct DyadicCutoff {
    grid: Grid,
    j_min: i32,
    j_max: i32,
}

impl DyadicCutoff {
    /// `j_min` is the first block whose annulus reaches the lowest lattice
    /// wavenumber; `j_max` is the first block after which `chi(2^{-j-1} xi) = 1`
    /// on every resolvable mode, so the blocks `j_min..=j_max` sum to the
    /// identity on mean-free band-limited fields.
    pub fn new(grid: &Grid) -> Self {
        let k0 = grid.k0();
        let kmax = grid.max_resolvable_k();
        let j_min = (3.0 * k0 / 8.0).log2().ceil() as i32;
        let j_max = (kmax.log2().ceil() as i32 - 1).max(j_min);
        Self {
            grid: grid.clone(),
            j_min,
            j_max,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    fn check(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            Err(NskError::BlockOutOfRange {
                j,
                min: self.j_min,
                max: self.j_max,
            })
        } else {
            Ok(())
        }
    }

    /// `Delta_j f = phi(2^{-j} D) f`.
    pub fn dyadic_block(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check(j)?;
        Ok(self.radial_filter(f, |r| phi(r * 2f64.powi(-j))))
    }

    /// `S_j f = chi(2^{-j} D) f`. Any integer `j` is accepted: far below the
    /// range only the mean survives, far above it the field is unchanged.
    pub fn low_cutoff(&self, f: &SpectralField, j: i32) -> SpectralField {
        self.radial_filter(f, |r| chi(r * 2f64.powi(-j)))
    }

    fn radial_filter(&self, f: &SpectralField, w: impl Fn(f64) -> f64) -> SpectralField {
        assert!(f.grid() == &self.grid, "field lives on a different grid");
        let grid = &self.grid;
        let mut out = f.clone();
        for c in 0..f.comps() {
            for (k, v) in out.component_mut(c).iter_mut().enumerate() {
                if !grid.resolvable(k) {
                    *v = Complex64::default();
                    continue;
                }
                let r = grid.kmag(k);
                *v *= if r == 0.0 { w(0.0) } else { w(r) };
            }
        }
        out
    }

    /// `||Delta_j f||_{L^p}` for every block in range, in order.
    pub fn block_norms(&self, f: &SpectralField, p: f64) -> Result<Vec<f64>> {
        self.blocks()
            .map(|j| lp_norm(&self.dyadic_block(f, j)?, p))
            .collect()
    }

    /// Homogeneous Besov norm truncated to the resolvable block range.
    pub fn besov_norm(&self, f: &SpectralField, params: BesovParams) -> Result<f64> {
        params.validate()?;
        let norms = self.block_norms(f, params.p)?;
        Ok(params.combine(self.j_min, &norms))
    }

    /// Bony decomposition `uv = T_u v + T_v u + R(u, v)` of two scalar fields,
    /// with `T_u v = sum_j S_{j-1} u Delta_j v` and
    /// `R(u, v) = sum_{|j - j'| <= 1} Delta_j u Delta_{j'} v + mean(u) mean(v)`.
    /// Each piece is dealiased, so the three add up to the dealiased product.
    pub fn bony_decompose(&self, u: &SpectralField, v: &SpectralField) -> Result<BonyParts> {
        if u.comps() != 1 || v.comps() != 1 {
            return Err(NskError::Incompatible("Bony decomposition takes scalar fields".into()));
        }
        let bu: Vec<SpectralField> = self
            .blocks()
            .map(|j| self.dyadic_block(u, j))
            .collect::<Result<_>>()?;
        let bv: Vec<SpectralField> = self
            .blocks()
            .map(|j| self.dyadic_block(v, j))
            .collect::<Result<_>>()?;
        let grid = &self.grid;
        let mut t_uv = SpectralField::scalar_zeros(grid);
        let mut t_vu = SpectralField::scalar_zeros(grid);
        let mut r_uv = SpectralField::scalar_zeros(grid);
        for (i, j) in self.blocks().enumerate() {
            let su = self.low_cutoff(u, j - 1);
            let sv = self.low_cutoff(v, j - 1);
            t_uv += &product(&su, &bv[i]);
            t_vu += &product(&sv, &bu[i]);
            for di in -1i32..=1 {
                let k = i as i32 + di;
                if k < 0 || k as usize >= bv.len() {
                    continue;
                }
                r_uv += &product(&bu[i], &bv[k as usize]);
            }
        }
        r_uv.coeffs_mut()[0] += u.mean(0) * v.mean(0);
        Ok(BonyParts { t_uv, t_vu, r_uv })
    }

    /// Bernstein ratio `||Lambda^k f_j||_{L^b} / (2^{j(k + d(1/a - 1/b))} ||f_j||_{L^a})`
    /// for a field localized in block `j`.
    pub fn bernstein_ratio(&self, f_j: &SpectralField, j: i32, k: u32, a: f64, b: f64) -> Result<f64> {
        self.check(j)?;
        let den_norm = lp_norm(f_j, a)?;
        if den_norm == 0.0 {
            return Err(NskError::InvalidParameter("Bernstein ratio of a zero field".into()));
        }
        let grid = &self.grid;
        let mut g = f_j.clone();
        for c in 0..g.comps() {
            for (m, v) in g.component_mut(c).iter_mut().enumerate() {
                *v *= grid.kmag(m).powi(k as i32);
            }
        }
        let d = grid.dim() as f64;
        let scale = 2f64.powf(j as f64 * (k as f64 + d * (1.0 / a - 1.0 / b)));
        Ok(lp_norm(&g, b)? / (scale * den_norm))
    }

    /// `sum_j phi(2^{-j} r)^2` over the block range (the almost-orthogonality
    /// weight relating the `B^0_{2,2}` norm to the `L^2` norm).
    pub fn square_weight(&self, r: f64) -> f64 {
        self.blocks().map(|j| phi(r * 2f64.powi(-j)).powi(2)).sum()
    }
}

#[derive(Clone, Debug)]
pub struct BonyParts {
    pub t_uv: SpectralField,
    pub t_vu: SpectralField,
    pub r_uv: SpectralField,
}

impl BonyParts {
    pub fn sum(&self) -> SpectralField {
        &(&self.t_uv + &self.t_vu) + &self.r_uv
    }
}

/// Besov exponents `(s, p, r)`; `f64::INFINITY` encodes `p` or `r = inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        let out = Self { s, p, r };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(NskError::InvalidParameter(format!("Besov smoothness must be finite, got {}", self.s)));
        }
        for (name, v) in [("p", self.p), ("r", self.r)] {
            if v.is_nan() || v < 1.0 {
                return Err(NskError::InvalidParameter(format!("Besov {name} must lie in [1, inf], got {v}")));
            }
        }
        Ok(())
    }

    /// `l^r` sum of `2^{js} n_j` with `n_j` indexed from `j_min`.
    pub fn combine(&self, j_min: i32, block_norms: &[f64]) -> f64 {
        let weighted = block_norms
            .iter()
            .enumerate()
            .map(|(i, n)| 2f64.powf((j_min + i as i32) as f64 * self.s) * n);
        lr_sum(weighted, self.r)
    }

    /// Column label `B[s,p,r]`.
    pub fn label(&self) -> String {
        format!("B[{},{},{}]", fmt_exp(self.s), fmt_exp(self.p), fmt_exp(self.r))
    }
}

pub(crate) fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn lr_sum(values: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.fold(0.0, f64::max)
    } else if r == 1.0 {
        values.sum()
    } else {
        values.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Running blockwise time integrals for the Chemin-Lerner norm
/// `L~^theta_T(B^s_{p,r})`: per block, the trapezoid integral of
/// `||Delta_j f(t)||_{L^p}^theta` over the pushed snapshots (or the running
/// maximum when `theta = inf`).
#[derive(Clone, Debug)]
pub struct CheminLernerAccumulator {
    theta: f64,
    params: BesovParams,
    j_min: i32,
    last: Option<(f64, Vec<f64>)>,
    acc: Vec<f64>,
}

impl CheminLernerAccumulator {
    pub fn new(cutoff: &DyadicCutoff, theta: f64, params: BesovParams) -> Result<Self> {
        params.validate()?;
        if theta.is_nan() || theta < 1.0 {
            return Err(NskError::InvalidParameter(format!("time exponent must lie in [1, inf], got {theta}")));
        }
        let nblocks = cutoff.blocks().count();
        Ok(Self {
            theta,
            params,
            j_min: cutoff.j_min(),
            last: None,
            acc: vec![0.0; nblocks],
        })
    }

    /// Record a snapshot from its block norms (see [`DyadicCutoff::block_norms`]).
    pub fn push_norms(&mut self, t: f64, norms: Vec<f64>) -> Result<()> {
        assert_eq!(norms.len(), self.acc.len(), "block count mismatch");
        if self.theta.is_infinite() {
            for (a, n) in self.acc.iter_mut().zip(&norms) {
                *a = a.max(*n);
            }
        } else if let Some((t0, prev)) = &self.last {
            if t <= *t0 {
                return Err(NskError::InvalidParameter(format!(
                    "snapshot times must increase ({t} after {t0})"
                )));
            }
            let h = t - t0;
            for ((a, n0), n1) in self.acc.iter_mut().zip(prev).zip(&norms) {
                *a += 0.5 * h * (n0.powf(self.theta) + n1.powf(self.theta));
            }
        }
        self.last = Some((t, norms));
        Ok(())
    }

    pub fn push(&mut self, cutoff: &DyadicCutoff, t: f64, f: &SpectralField) -> Result<()> {
        let norms = cutoff.block_norms(f, self.params.p)?;
        self.push_norms(t, norms)
    }

    pub fn finalize(&self) -> f64 {
        let per_block: Vec<f64> = if self.theta.is_infinite() {
            self.acc.clone()
        } else {
            self.acc.iter().map(|a| a.powf(1.0 / self.theta)).collect()
        };
        self.params.combine(self.j_min, &per_block)
    }
}
