use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{NskError, Result};

/// Density floor below which the state counts as vacuum.
pub const RHO_FLOOR: f64 = 0.05;

/// Fraction of `|L(0+)|` allowed for the scaled density variable.
pub const RANGE_FRACTION: f64 = 0.9;

/// Real polynomial `c[0] + c[1] rho + ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }

    fn is_one(&self) -> bool {
        self.0.first() == Some(&1.0) && self.0.iter().skip(1).all(|&c| c == 0.0)
    }
}

/// Constitutive laws `P, m, mu, lambda` and the capillarity `kappa`.
///
/// Normalization at equilibrium: `P'(1) = mu(1) = m(1) = 1` and `lambda(1) = 0`,
/// so that `nu(1) = 2` and the linear operator is `Delta u + grad div u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaterialLaws {
    pub name: String,
    pub pressure: Poly,
    pub capillarity: Poly,
    pub shear: Poly,
    pub bulk: Poly,
    pub kappa: f64,
    #[serde(skip)]
    cache: LawCache,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct LawCache {
    dp: Poly,
    dm: Poly,
    m_is_one: bool,
    ell_at_zero: f64,
    lower: f64,
    upper: f64,
}

impl Default for Poly {
    fn default() -> Self {
        Poly(vec![0.0])
    }
}

impl MaterialLaws {
    /// `P = rho^2/2 + 1/2`, `m = 1`, `mu = 1`, `lambda = 0`.
    pub fn simple(kappa: f64) -> Result<Self> {
        Self::polynomial(
            "simple",
            kappa,
            Poly(vec![0.5, 0.0, 0.5]),
            Poly::constant(1.0),
            Poly::constant(1.0),
            Poly::constant(0.0),
        )
    }

    /// As [`MaterialLaws::simple`] but with `m(rho) = rho`.
    pub fn variable_m(kappa: f64) -> Result<Self> {
        Self::polynomial(
            "variable-m",
            kappa,
            Poly(vec![0.5, 0.0, 0.5]),
            Poly(vec![0.0, 1.0]),
            Poly::constant(1.0),
            Poly::constant(0.0),
        )
    }

    pub fn polynomial(
        name: &str,
        kappa: f64,
        pressure: Poly,
        capillarity: Poly,
        shear: Poly,
        bulk: Poly,
    ) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(NskError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        let mut laws = Self {
            name: name.into(),
            pressure,
            capillarity,
            shear,
            bulk,
            kappa,
            cache: LawCache::default(),
        };
        laws.validate()?;
        laws.cache.dp = laws.pressure.derivative();
        laws.cache.dm = laws.capillarity.derivative();
        laws.cache.m_is_one = laws.capillarity.is_one();
        laws.cache.ell_at_zero = laws.ell_raw(0.0);
        let lo = -RANGE_FRACTION * laws.cache.ell_at_zero.abs();
        laws.cache.lower = laws.ell_raw(RHO_FLOOR).max(lo);
        laws.cache.upper = RANGE_FRACTION * laws.cache.ell_at_zero.abs();
        Ok(laws)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::polynomial(
            &self.name,
            kappa,
            self.pressure.clone(),
            self.capillarity.clone(),
            self.shear.clone(),
            self.bulk.clone(),
        )
    }

    fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        let checks = [
            ("P'(1)", self.pressure.derivative().eval(1.0), 1.0),
            ("m(1)", self.capillarity.eval(1.0), 1.0),
            ("mu(1)", self.shear.eval(1.0), 1.0),
            ("lambda(1)", self.bulk.eval(1.0), 0.0),
        ];
        for (what, got, want) in checks {
            if (got - want).abs() > tol {
                return Err(NskError::InvalidParameter(format!(
                    "material law normalization: {what} = {got}, expected {want}"
                )));
            }
        }
        // m > 0 and nu > 0 on the admissible density range
        for i in 0..=400 {
            let rho = RHO_FLOOR + i as f64 * (4.0 - RHO_FLOOR) / 400.0;
            let nu = self.bulk.eval(rho) + 2.0 * self.shear.eval(rho);
            if nu <= 0.0 {
                return Err(NskError::InvalidParameter(format!("nu = lambda + 2 mu = {nu} <= 0 at rho = {rho}")));
            }
            if self.capillarity.eval(rho) < 0.0 {
                return Err(NskError::InvalidParameter(format!("m(rho) < 0 at rho = {rho}")));
            }
        }
        if self.capillarity.eval(0.0) < 0.0 {
            return Err(NskError::InvalidParameter("m(0) < 0".into()));
        }
        Ok(())
    }

    pub fn p_prime(&self, rho: f64) -> f64 {
        self.cache.dp.eval(rho)
    }

    pub fn m(&self, rho: f64) -> f64 {
        self.capillarity.eval(rho)
    }

    pub fn m_prime(&self, rho: f64) -> f64 {
        self.cache.dm.eval(rho)
    }

    pub fn mu(&self, rho: f64) -> f64 {
        self.shear.eval(rho)
    }

    pub fn lambda(&self, rho: f64) -> f64 {
        self.bulk.eval(rho)
    }

    /// True when `m == 1`, in which case `L` has a closed form.
    pub fn has_closed_form(&self) -> bool {
        self.cache.m_is_one
    }

    /// `L(rho) = int_1^rho sqrt(m(s)/s) ds`.
    pub fn ell(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(NskError::InvalidParameter(format!("L(rho) needs rho > 0, got {rho}")));
        }
        Ok(if self.cache.m_is_one {
            2.0 * (rho.sqrt() - 1.0)
        } else {
            self.ell_raw(rho)
        })
    }

    /// Quadrature form, after `s = w^2`: `L = int_1^{sqrt rho} 2 sqrt(m(w^2)) dw`.
    /// Valid for `rho >= 0`.
    fn ell_raw(&self, rho: f64) -> f64 {
        let m = &self.capillarity;
        let f = |w: f64| 2.0 * m.eval(w * w).max(0.0).sqrt();
        integrate(&f, 1.0, rho.sqrt())
    }

    /// Inverse of [`MaterialLaws::ell`].
    pub fn ell_inverse(&self, y: f64) -> Result<f64> {
        Ok(1.0 + self.density_excess(y)?)
    }

    /// `L^{-1}(y) - 1`, accurate to relative rounding also for tiny `y`.
    pub fn density_excess(&self, y: f64) -> Result<f64> {
        if !y.is_finite() || y <= self.cache.ell_at_zero {
            return Err(NskError::InvalidParameter(format!(
                "{y} is outside the range of L (> {})",
                self.cache.ell_at_zero
            )));
        }
        if self.cache.m_is_one {
            return Ok(y + 0.25 * y * y);
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        // Newton in v = sqrt(rho) - 1, where G(v) = int_0^v 2 sqrt(m((1+s)^2)) ds is increasing.
        let m = &self.capillarity;
        let dg = |v: f64| 2.0 * m.eval((1.0 + v) * (1.0 + v)).max(0.0).sqrt();
        let g = |v: f64| integrate(&dg, 0.0, v) - y;
        let (mut lo, mut hi) = if y > 0.0 { (0.0f64, 1.0f64) } else { (-1.0f64, 0.0f64) };
        while y > 0.0 && g(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e8 {
                return Err(NskError::InvalidParameter(format!("L^-1({y}) not bracketed")));
            }
        }
        let mut v = 0.0f64;
        for _ in 0..200 {
            let r = g(v);
            if r.abs() <= 1e-15 * y.abs() {
                break;
            }
            if r > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let slope = dg(v);
            let next = v - r / slope;
            v = if slope > 0.0 && next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-16 * lo.abs().max(hi.abs()) {
                break;
            }
        }
        if v <= -1.0 {
            return Err(NskError::InvalidParameter(format!("L^-1({y}) left the positive half-line")));
        }
        Ok(v * (2.0 + v))
    }

    /// `L(0+)`, the infimum of the range of `L`.
    pub fn ell_at_zero(&self) -> f64 {
        self.cache.ell_at_zero
    }

    /// Admissible interval for `x = kappa^{-1/2} a`:
    /// `[max(L(rho_floor), -0.9 |L(0+)|), 0.9 |L(0+)|]`.
    pub fn scaled_range(&self) -> (f64, f64) {
        (self.cache.lower, self.cache.upper)
    }
}

/// Coefficient functions of the perturbation system, all vanishing at `rho = 1`:
/// `Q = 1/rho - 1`, `G = P'/sqrt(m rho) - 1`, `mu_bar = mu - 1`,
/// `lambda_bar = lambda - lambda(1) = lambda`, `psi = sqrt(m rho) - 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientFns {
    pub q: f64,
    pub g: f64,
    pub mu_bar: f64,
    pub lambda_bar: f64,
    pub psi: f64,
}

impl CoefficientFns {
    pub fn at_rho(laws: &MaterialLaws, rho: f64) -> Self {
        let smr = (laws.m(rho) * rho).sqrt();
        Self {
            q: 1.0 / rho - 1.0,
            g: laws.p_prime(rho) / smr - 1.0,
            mu_bar: laws.mu(rho) - 1.0,
            lambda_bar: laws.lambda(rho),
            psi: smr - 1.0,
        }
    }

    /// Tilde forms: the same functions composed with `L^{-1}`, at `x = kappa^{-1/2} a`.
    pub fn at_scaled(laws: &MaterialLaws, x: f64) -> Result<Self> {
        Ok(Self::at_rho(laws, laws.ell_inverse(x)?))
    }
}

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 16;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (mut q0, mut q1) = (1.0, z);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                    break;
                }
            }
        }
        (x, w)
    })
}

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}

/// Adaptive Gauss-Legendre quadrature (signed: `b < a` is allowed).
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gl_panel(f, a, m);
        let right = gl_panel(f, m, b);
        let both = left + right;
        if depth == 0 || (both - whole).abs() <= 1e-15 * both.abs().max(1e-300) {
            both
        } else {
            rec(f, a, m, left, depth - 1) + rec(f, m, b, right, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, gl_panel(f, a, b), 30)
}
