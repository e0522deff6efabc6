//! Dispersive estimates for `e^{i sqrt(kappa) H t} e^{t Delta}`: kernel
//! decay of a single block and the Strichartz gain in kappa.

use num_rational::Ratio;
use serde::Serialize;

use super::fit::{power_fit, FitResult};
use crate::error::{NskError, Result};
use crate::littlewood_paley::{phi, BesovParams, CheminLernerAccumulator, DyadicCutoff};
use crate::propagators::{dd_semigroup, SemigroupParams};
use crate::spectral::{lp_norm, Grid, SpectralField};
use num_complex::Complex64;

type Q = Ratio<i64>;

/// A Lebesgue exponent in `[1, inf]`, kept as an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Q),
    Infinite,
}

impl Exponent {
    /// Exact form of a configured exponent (`inf` or a rational with a small denominator).
    pub fn from_f64(v: f64) -> Result<Self> {
        if v == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        let q = Q::approximate_float(v)
            .filter(|q| *q.denom() <= 1000 && (*q.numer() as f64 / *q.denom() as f64 - v).abs() <= 1e-9 * v.abs())
            .ok_or_else(|| NskError::InvalidParameter(format!("exponent {v} is not a simple rational")))?;
        if q < Q::from_integer(1) {
            return Err(NskError::InvalidParameter(format!("exponent must be >= 1, got {q}")));
        }
        Ok(Exponent::Finite(q))
    }

    pub fn reciprocal(&self) -> Q {
        match self {
            Exponent::Finite(q) => q.recip(),
            Exponent::Infinite => Q::from_integer(0),
        }
    }
}

/// Check the Strichartz admissibility window for `(r, p)` in dimension `d`
/// and return the derivative gain `k = 2/r + d/p - d/2`:
/// `d/2 - d/p <= 2/r <= d/p - d/2 + 2` for `d >= 3`,
/// `1 - 2/p <= 2/r < 2/p + 1` for `d = 2`. Also requires `p >= 2`.
pub fn admissible(d: usize, r: Exponent, p: Exponent) -> Result<Q> {
    let dq = Q::from_integer(d as i64);
    let two = Q::from_integer(2);
    let inv_p = p.reciprocal();
    let two_r = two * r.reciprocal();
    if inv_p > two.recip() {
        return Err(NskError::Inadmissible(format!("p >= 2 fails: 1/p = {inv_p}")));
    }
    let lower = dq / two - dq * inv_p;
    let upper = dq * inv_p - dq / two + two;
    if two_r < lower {
        return Err(NskError::Inadmissible(format!(
            "{} fails: 2/r = {two_r}, lower bound = {lower}",
            if d == 2 { "1 - 2/p <= 2/r" } else { "d/2 - d/p <= 2/r" }
        )));
    }
    if d == 2 && two_r >= upper {
        return Err(NskError::Inadmissible(format!(
            "2/r < 2/p + 1 fails: 2/r = {two_r}, 2/p + 1 = {upper}"
        )));
    }
    if d >= 3 && two_r > upper {
        return Err(NskError::Inadmissible(format!(
            "2/r <= d/p - d/2 + 2 fails: 2/r = {two_r}, upper bound = {upper}"
        )));
    }
    Ok(two_r + dq * inv_p - dq / two)
}

/// Block-`j` bump `Delta_j delta_{x0}` centred in the box.
pub fn block_bump(grid: &Grid, j: i32) -> SpectralField {
    let vol = grid.volume();
    let c = 0.5 * grid.ldom();
    let mut f = SpectralField::scalar_zeros(grid);
    for (k, v) in f.component_mut(0).iter_mut().enumerate() {
        if !grid.resolvable(k) {
            continue;
        }
        let w = phi(grid.kmag(k) * 2f64.powi(-j));
        if w != 0.0 {
            let phase: f64 = grid.xi(k).iter().map(|x| -x * c).sum();
            *v = Complex64::from_polar(w / vol, phase);
        }
    }
    f.symmetrize();
    f
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelSample {
    pub kappa: f64,
    pub t: f64,
    /// `||S(t) f_j||_{L^p} e^{2^{2j} t}`.
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelResult {
    pub block: i32,
    pub p: f64,
    pub window: (f64, f64),
    /// Expected slope in t: `d/p - d/2`.
    pub expected_t: f64,
    /// Expected slope in kappa: `(d/p - d/2) / 2`.
    pub expected_kappa: f64,
    pub t_samples: Vec<KernelSample>,
    pub kappa_samples: Vec<KernelSample>,
    pub t_fit: FitResult,
    pub kappa_fit: Option<FitResult>,
}

/// Validate a kernel window: `2^{2j} t_2 <= 0.1` and `t_2 >= 10 t_1 > 0`.
pub fn check_kernel_window(block: i32, window: (f64, f64)) -> Result<()> {
    let (t1, t2) = window;
    if !(t1 > 0.0) {
        return Err(NskError::InvalidParameter(format!("kernel window must start after 0, got t1 = {t1}")));
    }
    if 4f64.powi(block) * t2 > 0.1 {
        return Err(NskError::InvalidParameter(format!(
            "kernel window violates 2^(2j) t <= 0.1: 2^(2j) t2 = {}",
            4f64.powi(block) * t2
        )));
    }
    if t2 < 10.0 * t1 {
        return Err(NskError::InvalidParameter(format!(
            "kernel window [{t1}, {t2}] spans less than one decade"
        )));
    }
    Ok(())
}

fn kernel_norm(f: &SpectralField, kappa: f64, t: f64, p: f64, block: i32) -> Result<f64> {
    let g = dd_semigroup(f, SemigroupParams::new(kappa, t)?);
    Ok(lp_norm(&g, p)? * (4f64.powi(block) * t).exp())
}

/// Sup-type decay of `S(t) Delta_j delta` over a log-spaced t window at the
/// first kappa, and against kappa at the window's geometric midpoint.
pub fn kernel_study(grid: &Grid, kappas: &[f64], block: i32, p: f64, window: (f64, f64), samples: usize) -> Result<KernelResult> {
    check_kernel_window(block, window)?;
    let lp = DyadicCutoff::new(grid);
    if block < lp.j_min() || block > lp.j_max() {
        return Err(NskError::BlockOutOfRange {
            j: block,
            min: lp.j_min(),
            max: lp.j_max(),
        });
    }
    if samples < 3 || kappas.is_empty() {
        return Err(NskError::InvalidParameter("kernel study needs >= 3 samples and a kappa".into()));
    }
    let f = block_bump(grid, block);
    let (t1, t2) = window;
    let ratio = (t2 / t1).powf(1.0 / (samples - 1) as f64);
    let times: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { t2 } else { t1 * ratio.powi(i as i32) }).collect();
    let k0 = kappas[0];
    let t_samples: Vec<KernelSample> = times
        .iter()
        .map(|&t| Ok(KernelSample { kappa: k0, t, norm: kernel_norm(&f, k0, t, p, block)? }))
        .collect::<Result<_>>()?;
    let t_fit = power_fit(
        &times,
        &t_samples.iter().map(|s| s.norm).collect::<Vec<_>>(),
        window,
    )?;
    let tm = (t1 * t2).sqrt();
    let kappa_samples: Vec<KernelSample> = kappas
        .iter()
        .map(|&k| Ok(KernelSample { kappa: k, t: tm, norm: kernel_norm(&f, k, tm, p, block)? }))
        .collect::<Result<_>>()?;
    let kappa_fit = if kappas.len() >= 3 {
        Some(power_fit(
            kappas,
            &kappa_samples.iter().map(|s| s.norm).collect::<Vec<_>>(),
            (0.0, f64::INFINITY),
        )?)
    } else {
        None
    };
    let d = grid.dim() as f64;
    let e = d / p - d / 2.0;
    Ok(KernelResult {
        block,
        p,
        window,
        expected_t: e,
        expected_kappa: e / 2.0,
        t_samples,
        kappa_samples,
        t_fit,
        kappa_fit,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StrichartzResult {
    pub r: f64,
    pub p: f64,
    pub k: f64,
    pub block: i32,
    pub tmax: f64,
    pub kappas: Vec<f64>,
    /// `||S(t) u||_{L~^r_T(B^k_{p,1})} / ||u||_{B^0_{2,1}}` per kappa.
    pub norms: Vec<f64>,
    /// `(k - 2/r) / 4`.
    pub expected: f64,
    pub fit: FitResult,
}

/// Measure the left side of the Strichartz estimate for the block bump
/// `Delta_j delta` by trapezoid quadrature on `samples` uniform stamps in
/// `[0, tmax]`, for each kappa, and fit it against kappa. Localized data are
/// needed: random phases spread over the box keep their `L^p` norms.
#[allow(clippy::too_many_arguments)]
pub fn strichartz_study(
    grid: &Grid,
    kappas: &[f64],
    r: f64,
    p: f64,
    k: Option<f64>,
    block: i32,
    tmax: f64,
    samples: usize,
) -> Result<StrichartzResult> {
    let gain = admissible(grid.dim(), Exponent::from_f64(r)?, Exponent::from_f64(p)?)?;
    let kval = *gain.numer() as f64 / *gain.denom() as f64;
    if let Some(given) = k {
        if (given - kval).abs() > 1e-9 {
            return Err(NskError::Inadmissible(format!("k must equal 2/r + d/p - d/2 = {gain}, got {given}")));
        }
    }
    if kappas.len() < 3 {
        return Err(NskError::InvalidParameter(format!("Strichartz sweep needs >= 3 kappa values, got {}", kappas.len())));
    }
    if !(tmax > 0.0) || samples < 2 {
        return Err(NskError::InvalidParameter("Strichartz study needs tmax > 0 and >= 2 samples".into()));
    }
    let lp = DyadicCutoff::new(grid);
    let u = block_bump(grid, block);
    let base = lp.besov_norm(&u, BesovParams::new(0.0, 2.0, 1.0)?)?;
    let params = BesovParams::new(kval, p, 1.0)?;
    let norms: Vec<f64> = kappas
        .iter()
        .map(|&kappa| {
            let mut acc = CheminLernerAccumulator::new(&lp, r, params)?;
            for i in 0..samples {
                let t = tmax * i as f64 / (samples - 1) as f64;
                acc.push(&lp, t, &dd_semigroup(&u, SemigroupParams::new(kappa, t)?))?;
            }
            Ok(acc.finalize() / base)
        })
        .collect::<Result<_>>()?;
    let fit = power_fit(kappas, &norms, (0.0, f64::INFINITY))?;
    Ok(StrichartzResult {
        r,
        p,
        k: kval,
        block,
        tmax,
        kappas: kappas.to_vec(),
        norms,
        expected: (kval - 2.0 / r) / 4.0,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: f64) -> Exponent {
        Exponent::from_f64(v).unwrap()
    }

    #[test]
    fn d2_endpoint_is_rejected() {
        let e = admissible(2, ex(2.0), Exponent::Infinite).unwrap_err();
        assert!(e.to_string().contains("2/r < 2/p + 1"), "{e}");
        // r = 4/3, p = 4 sits on the same strict boundary
        assert!(admissible(2, ex(4.0 / 3.0), ex(4.0)).is_err());
    }

    #[test]
    fn interior_d2_triple() {
        assert_eq!(admissible(2, ex(2.0), ex(10.0)).unwrap(), Q::new(1, 5));
        assert_eq!(admissible(2, Exponent::Infinite, ex(2.0)).unwrap(), Q::from_integer(0));
    }

    #[test]
    fn d3_schroedinger_pair() {
        assert_eq!(admissible(3, ex(2.0), ex(6.0)).unwrap(), Q::from_integer(0));
        // lower bound violated
        let e = admissible(3, Exponent::Infinite, ex(6.0)).unwrap_err();
        assert!(e.to_string().contains("d/2 - d/p <= 2/r"), "{e}");
        assert!(admissible(3, ex(1.0), ex(2.0)).is_ok());
        assert!(admissible(3, ex(1.0), ex(3.0)).is_err());
    }

    #[test]
    fn exponents_parse_exactly() {
        assert_eq!(ex(4.0 / 3.0), Exponent::Finite(Q::new(4, 3)));
        assert!(Exponent::from_f64(0.5).is_err());
        assert!(Exponent::from_f64(std::f64::consts::PI).is_err());
        assert!(admissible(2, ex(1.0), ex(1.5)).is_err());
    }

    #[test]
    fn kernel_window_checks() {
        assert!(check_kernel_window(0, (0.01, 0.1)).is_ok());
        assert!(check_kernel_window(0, (0.02, 0.1)).is_err());
        assert!(check_kernel_window(1, (0.01, 0.1)).is_err());
        assert!(check_kernel_window(0, (0.0, 0.1)).is_err());
    }

    #[test]
    fn l2_kernel_only_dissipates() {
        let g = Grid::new(2, 64, 40.0).unwrap();
        let res = kernel_study(&g, &[10.0, 100.0, 1000.0], 0, 2.0, (0.01, 0.1), 5).unwrap();
        // Parseval: the phase is unimodular, only e^{t Delta} remains
        let f = block_bump(&g, 0);
        for s in &res.t_samples {
            let heat = crate::spectral::FourierMultiplier::heat(s.t).apply(&f).unwrap().l2_norm() * s.t.exp();
            assert!((s.norm - heat).abs() < 1e-12 * heat);
        }
        assert!(res.kappa_fit.unwrap().slope.abs() < 1e-10);
    }
}
