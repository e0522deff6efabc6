//! Seeded initial data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rand::Rng;

use crate::error::{NskError, Result};
use crate::io::config::{ExperimentConfig, Recipe};
use crate::model::State;
use crate::spectral::{gradient, leray_project, lp_norm, random_field, Grid, SpectralField};

/// Independent random streams derived from one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Density = 1,
    Velocity = 2,
    Offsets = 3,
}

/// ChaCha8 generator keyed by `seed`, positioned on stream `stream`.
pub fn seeded_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Wavenumber range `[2^{j_a}, 2^{j_b} 8/3]` covered by the blocks `j_a..=j_b`.
pub fn band_range(band: (i32, i32)) -> (f64, f64) {
    (2f64.powi(band.0), 2f64.powi(band.1) * 8.0 / 3.0)
}

fn band_field(grid: &Grid, comps: usize, band: (i32, i32), rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let (lo, hi) = band_range(band);
    let f = random_field(grid, comps, lo, hi, rng);
    if f.l2_norm() == 0.0 {
        return Err(NskError::InvalidParameter(format!(
            "band [{}, {}] holds no resolvable mode (wavenumbers {lo}..{hi})",
            band.0, band.1
        )));
    }
    Ok(f)
}

fn rescale(f: &mut SpectralField, current: f64, target: f64) {
    if current > 0.0 {
        f.scale(target / current);
    }
}

/// Scale `a` so that `sup |grad a| = amp`.
fn normalize_density(a: &mut SpectralField, amp: f64) -> Result<()> {
    let g = lp_norm(&gradient(a), f64::INFINITY)?;
    rescale(a, g, amp);
    Ok(())
}

fn normalize_velocity(u: &mut SpectralField, amp: f64) -> Result<()> {
    let s = lp_norm(u, f64::INFINITY)?;
    rescale(u, s, amp);
    Ok(())
}

/// Width of the narrowest Gaussian the grid resolves: its spectrum
/// `exp(-|xi|^2 w^2 / 2)` drops to `e^{-14}` at the dealiasing radius.
pub fn envelope_width(grid: &Grid) -> f64 {
    28f64.sqrt() / grid.dealias_radius()
}

/// Isotropic Gaussian `exp(-|x - c|^2 / (2 w^2))` centred in the box, `w` from [`envelope_width`].
pub fn envelope(grid: &Grid) -> Vec<f64> {
    let w = envelope_width(grid);
    let c = 0.5 * grid.ldom();
    (0..grid.len())
        .map(|k| {
            let x = grid.position(k);
            let r2: f64 = x[..grid.dim()].iter().map(|v| (v - c).powi(2)).sum();
            (-r2 / (2.0 * w * w)).exp()
        })
        .collect()
}

/// `envelope * (offset + phases)` per component, with `sup |phases| = 1/2`
/// and a standard normal `offset` when `offsets` is given, mean removed.
fn enveloped(
    grid: &Grid,
    comps: usize,
    band: (i32, i32),
    rng: &mut ChaCha8Rng,
    mut offsets: Option<&mut ChaCha8Rng>,
) -> Result<SpectralField> {
    let env = envelope(grid);
    let mut phases = band_field(grid, comps, band, rng)?;
    let s = lp_norm(&phases, f64::INFINITY)?;
    phases.scale(0.5 / s);
    let phys: Vec<Vec<f64>> = phases
        .to_physical()
        .into_iter()
        .map(|c| {
            let offset: f64 = offsets.as_deref_mut().map_or(0.0, |r| r.sample(StandardNormal));
            c.iter().zip(&env).map(|(p, e)| e * (offset + p)).collect()
        })
        .collect();
    Ok(SpectralField::from_physical(grid, &phys).dealiased().mean_free())
}

/// Initial perturbation `(a, u)` for `cfg`. Every recipe is localized by
/// [`envelope`]: dispersion only lowers `L^p` norms when the waves have room
/// to spread, which random phases filling the torus never give. The
/// Gaussian recipe adds a random offset under the envelope so that the data
/// carry low-frequency mass. The amplitude fixes
/// `sup |u| = sup |grad a| = amplitude`; `a` does not depend on `kappa`, so
/// sweep members share their data.
pub fn initial_state(cfg: &ExperimentConfig, kappa: f64) -> Result<State> {
    let grid = cfg.grid()?;
    let amp = cfg.init.amplitude;
    let band = cfg.init.band;
    let seed = cfg.init.seed;
    let mut ra = seeded_rng(seed, Stream::Density);
    let mut ru = seeded_rng(seed, Stream::Velocity);
    let (mut a, mut u) = match cfg.init.recipe {
        Recipe::WellPrepared => (
            SpectralField::scalar_zeros(&grid),
            leray_project(&enveloped(&grid, grid.dim(), band, &mut ru, None)?),
        ),
        Recipe::IllPrepared => (
            enveloped(&grid, 1, band, &mut ra, None)?,
            enveloped(&grid, grid.dim(), band, &mut ru, None)?,
        ),
        Recipe::Gaussian => {
            let mut ro = seeded_rng(seed, Stream::Offsets);
            let a = enveloped(&grid, 1, band, &mut ra, Some(&mut ro))?;
            let u = enveloped(&grid, grid.dim(), band, &mut ru, Some(&mut ro))?;
            (a, u)
        }
    };
    normalize_density(&mut a, amp)?;
    normalize_velocity(&mut u, amp)?;
    a.symmetrize();
    u.symmetrize();
    State::new(a, u, kappa, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;
    use crate::spectral::leray_split;

    fn cfg(recipe: &str) -> ExperimentConfig {
        parse_config(&format!(
            "[grid]\nd = 2\nn = 32\n[physics]\nkappa = 100\n[init]\nrecipe = {recipe}\namplitude = 0.3\nseed = 9\n[time]\ndt = 0.01\ntmax = 0.1\n"
        ))
        .unwrap()
    }

    #[test]
    fn recipes_hit_their_amplitude() {
        for r in ["gaussian", "ill-prepared"] {
            let s = initial_state(&cfg(r), 100.0).unwrap();
            let ga = lp_norm(&gradient(&s.a), f64::INFINITY).unwrap();
            let us = lp_norm(&s.u, f64::INFINITY).unwrap();
            assert!((ga - 0.3).abs() < 1e-12 && (us - 0.3).abs() < 1e-12, "{r}: {ga} {us}");
            assert!(s.a.conjugate_asymmetry() < 1e-14);
        }
    }

    #[test]
    fn well_prepared_is_solenoidal() {
        let s = initial_state(&cfg("well-prepared"), 100.0).unwrap();
        assert_eq!(s.a.l2_norm(), 0.0);
        let (_, q) = leray_split(&s.u);
        assert!(q.l2_norm() < 1e-14 * s.u.l2_norm());
    }

    #[test]
    fn data_depend_on_seed_only() {
        let c = cfg("ill-prepared");
        let s1 = initial_state(&c, 100.0).unwrap();
        let s2 = initial_state(&c, 1e4).unwrap();
        assert_eq!(s1.a.coeffs(), s2.a.coeffs());
        assert_eq!(s1.u.coeffs(), s2.u.coeffs());
        let mut c3 = c.clone();
        c3.init.seed = 10;
        assert_ne!(initial_state(&c3, 100.0).unwrap().u.coeffs(), s1.u.coeffs());
    }

    #[test]
    fn empty_band_is_rejected() {
        let mut c = cfg("ill-prepared");
        c.init.band = (8, 9);
        assert!(initial_state(&c, 100.0).is_err());
    }
}
