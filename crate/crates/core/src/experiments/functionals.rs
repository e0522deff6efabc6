//! Running values of the energy-type functionals and the per-stamp norms.

use serde::Serialize;

use crate::error::Result;
use crate::ins::{error_field, InsState};
use crate::littlewood_paley::{fmt_exp, phi, BesovParams, CheminLernerAccumulator, DyadicCutoff};
use crate::model::State;
use crate::spectral::{gradient, leray_split, op_u_inv, SpectralField};

/// `||Delta_j f||_{L^2}` for every block, straight from the coefficients.
pub fn l2_block_norms(lp: &DyadicCutoff, f: &SpectralField) -> Vec<f64> {
    let grid = lp.grid();
    let vol = grid.volume();
    lp.blocks()
        .map(|j| {
            let scale = 2f64.powi(-j);
            let mut sum = 0.0;
            for c in 0..f.comps() {
                for (k, v) in f.component(c).iter().enumerate() {
                    if grid.resolvable(k) {
                        let w = phi(grid.kmag(k) * scale);
                        if w != 0.0 {
                            sum += w * w * v.norm_sqr();
                        }
                    }
                }
            }
            (sum * vol).sqrt()
        })
        .collect()
}

/// `||Lambda^alpha f||_{L^2}` with the mean mode dropped.
pub fn lambda_l2(f: &SpectralField, alpha: f64) -> f64 {
    let grid = f.grid();
    let mut sum = 0.0;
    for c in 0..f.comps() {
        for (k, v) in f.component(c).iter().enumerate() {
            let r = grid.kmag(k);
            if r > 0.0 && grid.resolvable(k) {
                sum += r.powf(2.0 * alpha) * v.norm_sqr();
            }
        }
    }
    (sum * grid.volume()).sqrt()
}

/// `(kappa^{-1/2} a, grad a, w)` stacked.
fn triple(s: &State, w: &SpectralField) -> Result<SpectralField> {
    let mut a = s.a.clone();
    a.scale(s.kappa.sqrt().recip());
    SpectralField::stack(&[a, gradient(&s.a), w.clone()])
}

/// The solution vector `(kappa^{-1/2} a, grad a, u)`.
pub fn solution_vector(s: &State) -> Result<SpectralField> {
    triple(s, &s.u)
}

/// `sup_t ||f||_{B^{d/2-1}_{2,1}} + int_0^t ||f||_{B^{d/2+1}_{2,1}}`, integral by trapezoid.
#[derive(Clone, Debug, Default)]
struct SupPlusIntegral {
    sup: f64,
    integral: f64,
    last: Option<(f64, f64)>,
}

impl SupPlusIntegral {
    fn push(&mut self, t: f64, low: f64, high: f64) {
        self.sup = self.sup.max(low);
        if let Some((t0, h0)) = self.last {
            self.integral += 0.5 * (t - t0) * (h0 + high);
        }
        self.last = Some((t, high));
    }

    fn value(&self) -> f64 {
        self.sup + self.integral
    }
}

/// Final values of the time functionals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FunctionalTotals {
    pub e_sup: f64,
    pub e_int: f64,
    /// `kappa^delta`-weighted Strichartz norm.
    pub d: f64,
    /// The same norm without the weight.
    pub d_raw: f64,
    pub w_sup: f64,
    pub w_int: f64,
    pub v_sup: f64,
    pub v_int: f64,
}

/// Records one row per stamp. Column order: `E, D, W, V`, the requested
/// Besov norms, `L2_Lam[alpha]` per alpha, `Bneg[sigma]`.
#[derive(Clone, Debug)]
pub struct Recorder {
    lp: DyadicCutoff,
    kappa: f64,
    delta: f64,
    besov: Vec<BesovParams>,
    alpha: Vec<f64>,
    sigma: f64,
    low: BesovParams,
    high: BesovParams,
    e: SupPlusIntegral,
    w: SupPlusIntegral,
    v: SupPlusIntegral,
    d: CheminLernerAccumulator,
}

impl Recorder {
    pub fn new(
        lp: DyadicCutoff,
        kappa: f64,
        (delta, p): (f64, f64),
        besov: Vec<BesovParams>,
        alpha: Vec<f64>,
        sigma: f64,
    ) -> Result<Self> {
        let d = lp.grid().dim() as f64;
        let strichartz = BesovParams::new(d / p, p, 1.0)?;
        Ok(Self {
            d: CheminLernerAccumulator::new(&lp, 2.0, strichartz)?,
            low: BesovParams::new(d / 2.0 - 1.0, 2.0, 1.0)?,
            high: BesovParams::new(d / 2.0 + 1.0, 2.0, 1.0)?,
            lp,
            kappa,
            delta,
            besov,
            alpha,
            sigma,
            e: SupPlusIntegral::default(),
            w: SupPlusIntegral::default(),
            v: SupPlusIntegral::default(),
        })
    }

    pub fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = ["E", "D", "W", "V"].iter().map(|s| s.to_string()).collect();
        c.extend(self.besov.iter().map(|b| b.label()));
        c.extend(self.alpha.iter().map(|a| format!("L2_Lam[{}]", fmt_exp(*a))));
        c.push(format!("Bneg[{}]", fmt_exp(self.sigma)));
        c
    }

    fn low_high(&self, f: &SpectralField) -> (f64, f64) {
        let n = l2_block_norms(&self.lp, f);
        (self.low.combine(self.lp.j_min(), &n), self.high.combine(self.lp.j_min(), &n))
    }

    /// Fold the snapshot `(s, ins)` into the running functionals and return its row.
    pub fn record(&mut self, s: &State, ins: &InsState) -> Result<Vec<f64>> {
        let t = s.t;
        let (_, qu) = leray_split(&s.u);
        let (lo, hi) = self.low_high(&triple(s, &qu)?);
        self.e.push(t, lo, hi);

        let uinv_grad = op_u_inv(self.kappa)?.apply(&gradient(&s.a))?;
        let dvec = SpectralField::stack(&[uinv_grad, qu])?;
        self.d.push(&self.lp, t, &dvec)?;

        let err = error_field(s, ins, 1e-9 * (1.0 + t.abs()))?;
        let (lo, hi) = self.low_high(&err);
        self.w.push(t, lo, hi);
        let (lo, hi) = self.low_high(&ins.v);
        self.v.push(t, lo, hi);

        let totals = self.totals();
        let mut row = vec![self.e.value(), totals.d, self.w.value(), self.v.value()];
        let sol = solution_vector(s)?;
        let blocks2 = l2_block_norms(&self.lp, &sol);
        for b in &self.besov {
            row.push(if b.p == 2.0 {
                b.combine(self.lp.j_min(), &blocks2)
            } else {
                self.lp.besov_norm(&sol, *b)?
            });
        }
        row.extend(self.alpha.iter().map(|a| lambda_l2(&sol, *a)));
        let neg = BesovParams::new(-self.sigma, 2.0, f64::INFINITY)?;
        row.push(neg.combine(self.lp.j_min(), &blocks2));
        Ok(row)
    }

    pub fn totals(&self) -> FunctionalTotals {
        let d_raw = self.d.finalize();
        FunctionalTotals {
            e_sup: self.e.sup,
            e_int: self.e.integral,
            d: self.kappa.powf(self.delta) * d_raw,
            d_raw,
            w_sup: self.w.sup,
            w_int: self.w.integral,
            v_sup: self.v.sup,
            v_int: self.v.integral,
        }
    }
}
