//! Littlewood-Paley self-test run by `besov-selftest`.

use serde::Serialize;

use super::recipes::{seeded_rng, Stream};
use crate::error::Result;
use crate::littlewood_paley::{chi, phi, DyadicCutoff};
use crate::spectral::{product, random_field, Grid, SpectralField};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub value: f64,
    /// Accepted range `[lo, hi]`.
    pub bounds: (f64, f64),
    pub passed: bool,
}

impl SelfCheck {
    fn new(name: &str, value: f64, bounds: (f64, f64)) -> Self {
        Self {
            name: name.into(),
            value,
            bounds,
            passed: value >= bounds.0 && value <= bounds.1,
        }
    }
}

/// Partition of unity, almost-orthogonality, telescoping, Bony reconstruction
/// and Bernstein ratios on `fields` random fields of `grid`.
pub fn besov_selftest(grid: &Grid, fields: usize, seed: u64) -> Result<Vec<SelfCheck>> {
    let lp = DyadicCutoff::new(grid);
    let mut rng = seeded_rng(seed, Stream::Density);

    // partition of unity over the resolvable band, on every grid wavenumber
    let mut pu: f64 = 0.0;
    for k in (1..grid.len()).filter(|&k| grid.resolvable(k)) {
        let r = grid.kmag(k);
        let low = chi(r * 2f64.powi(-lp.j_min()));
        let s: f64 = low + lp.blocks().map(|j| phi(r * 2f64.powi(-j))).sum::<f64>();
        pu = pu.max((s - 1.0).abs());
    }

    let (mut orth, mut tele, mut bony): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut bmin, mut bmax) = (f64::INFINITY, 0.0f64);
    for _ in 0..fields {
        let f = random_field(grid, 1, 0.0, f64::INFINITY, &mut rng);
        let g = random_field(grid, 1, 0.0, f64::INFINITY, &mut rng);
        let scale = f.l2_norm();
        let blocks: Vec<SpectralField> = lp.blocks().map(|j| lp.dyadic_block(&f, j)).collect::<Result<_>>()?;
        for (i, bi) in blocks.iter().enumerate() {
            for j in lp.blocks().skip(i + 2) {
                orth = orth.max(lp.dyadic_block(bi, j)?.l2_norm() / scale);
            }
        }
        let mut sum = lp.low_cutoff(&f, lp.j_min());
        for b in &blocks {
            sum += b;
        }
        tele = tele.max(sum.rel_l2_diff(&f));
        bony = bony.max(lp.bony_decompose(&f, &g)?.sum().rel_l2_diff(&product(&f, &g)));
        for (b, j) in blocks.iter().zip(lp.blocks()) {
            if b.l2_norm() > 1e-12 * scale {
                let r = lp.bernstein_ratio(b, j, 1, 2.0, 2.0)?;
                bmin = bmin.min(r);
                bmax = bmax.max(r);
            }
        }
    }
    Ok(vec![
        SelfCheck::new("partition-of-unity", pu, (0.0, 1e-12)),
        SelfCheck::new("block-orthogonality", orth, (0.0, 1e-12)),
        SelfCheck::new("telescoping", tele, (0.0, 1e-12)),
        SelfCheck::new("bony-reconstruction", bony, (0.0, 1e-12)),
        SelfCheck::new("bernstein-min", bmin, (0.7, 2.7)),
        SelfCheck::new("bernstein-max", bmax, (0.7, 2.7)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn selftest_passes_on_the_unit_torus() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let checks = besov_selftest(&g, 3, 1).unwrap();
        assert_eq!(checks.len(), 6);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
