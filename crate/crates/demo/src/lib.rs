//! Browser bindings. Each export returns a JSON string; the plain functions
//! underneath are what the native tests exercise.

use std::f64::consts::PI;

use nsk_core::experiments::functionals::l2_block_norms;
use nsk_core::experiments::kernel_study;
use nsk_core::littlewood_paley::DyadicCutoff;
use nsk_core::propagators::{dd_semigroup, eigenvalues_closed_form, SemigroupParams};
use nsk_core::spectral::{random_field, Grid};
use nsk_core::{NskError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Decay rates `lambda_+-(r)` on `samples` points of `(0, r_max]`.
pub fn dispersion_json(kappa: f64, r_max: f64, samples: usize) -> Result<String> {
    if !(kappa > 0.0 && r_max > 0.0 && samples >= 2) {
        return Err(NskError::InvalidParameter("need kappa > 0, r_max > 0 and at least 2 samples".into()));
    }
    let r: Vec<f64> = (1..=samples).map(|i| r_max * i as f64 / samples as f64).collect();
    let lam: Vec<_> = r.iter().map(|&r| eigenvalues_closed_form(r, kappa)).collect();
    Ok(json!({
        "kappa": kappa,
        "r": r,
        "re_plus": lam.iter().map(|l| l.0.re).collect::<Vec<_>>(),
        "re_minus": lam.iter().map(|l| l.1.re).collect::<Vec<_>>(),
        "im": lam.iter().map(|l| l.0.im.abs()).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Weighted `L^p` norm of the semigroup acting on a single dyadic block,
/// sampled log-uniformly on `[t0, t1]`, with its power-law fit.
pub fn kernel_json(kappa: f64, block: i32, p: f64, t0: f64, t1: f64, samples: usize) -> Result<String> {
    let grid = Grid::new(2, 256, 128.0)?;
    let r = kernel_study(&grid, &[kappa], block, p, (t0, t1), samples)?;
    Ok(serde_json::to_value(&r).map_err(|e| NskError::InvalidParameter(e.to_string()))?.to_string())
}

/// `L^2` energy per dyadic block of a random field supported in
/// `lo <= |xi| <= hi`, before and after the semigroup runs for time `t`.
pub fn block_energies_json(seed: u64, lo: f64, hi: f64, kappa: f64, t: f64) -> Result<String> {
    let grid = Grid::new(2, 128, 16.0 * PI)?;
    let lp = DyadicCutoff::new(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_field(&grid, 1, lo, hi, &mut rng);
    if f.l2_norm() == 0.0 {
        return Err(NskError::InvalidParameter(format!("no grid wavenumbers in [{lo}, {hi}]")));
    }
    let g = dd_semigroup(&f, SemigroupParams::new(kappa, t)?);
    Ok(json!({
        "blocks": lp.blocks().collect::<Vec<_>>(),
        "initial": l2_block_norms(&lp, &f),
        "evolved": l2_block_norms(&lp, &g),
    })
    .to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn dispersion(kappa: f64, r_max: f64, samples: usize) -> std::result::Result<String, JsError> {
    js(dispersion_json(kappa, r_max, samples))
}

#[wasm_bindgen]
pub fn kernel(kappa: f64, block: i32, p: f64, t0: f64, t1: f64, samples: usize) -> std::result::Result<String, JsError> {
    js(kernel_json(kappa, block, p, t0, t1, samples))
}

#[wasm_bindgen]
pub fn block_energies(seed: u32, lo: f64, hi: f64, kappa: f64, t: f64) -> std::result::Result<String, JsError> {
    js(block_energies_json(seed as u64, lo, hi, kappa, t))
}
