//! Exact linear evolution, the dissipative-dispersive semigroup, the Duhamel
//! z-formulation and the Strang-split nonlinear integrator.

mod integrator;
mod semigroup;

pub use integrator::{advance, cfl_limit, Integrator, CFL_SAFETY};
pub use semigroup::{dd_semigroup, duhamel_z_solve, z_generator, DuhamelSnapshot, SemigroupParams, ZField};

use num_complex::Complex64;

use crate::model::State;
use crate::spectral::{Grid, SpectralField};

/// Per-mode acoustic block acting on `(a_hat, V_hat)` with `V = Lambda^{-1} div u`:
///
/// ```text
/// A = [ 0                          -sqrt(kappa) r ]
///     [ r/sqrt(kappa) + sqrt(kappa) r^3   -2 r^2  ]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcousticBlock {
    pub r: f64,
    pub kappa: f64,
}

/// Relative discriminant size below which the Jordan-form exponential is used.
pub const DEGENERATE_TOL: f64 = 1e-10;

impl AcousticBlock {
    pub fn new(r: f64, kappa: f64) -> Self {
        Self { r, kappa }
    }

    /// Row-major entries.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let sk = self.kappa.sqrt();
        let r = self.r;
        [[0.0, -sk * r], [r / sk + sk * r * r * r, -2.0 * r * r]]
    }

    pub fn trace(&self) -> f64 {
        -2.0 * self.r * self.r
    }

    pub fn det(&self) -> f64 {
        let r2 = self.r * self.r;
        r2 + self.kappa * r2 * r2
    }

    /// `(trace/2)^2 - det = (1 - kappa) r^4 - r^2`.
    pub fn discriminant(&self) -> f64 {
        let r2 = self.r * self.r;
        (1.0 - self.kappa) * r2 * r2 - r2
    }

    /// Eigenvalues of the matrix, `-r^2 +- sqrt(discriminant)`, i.e. `-lambda_-/+`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let (lp, lm) = eigenvalues_closed_form(self.r, self.kappa);
        (-lm, -lp)
    }

    /// Real `exp(dt A)` by the Putzer formula for a 2x2 matrix with
    /// eigenvalues `alpha +- sqrt(D)`, `alpha = -r^2`:
    /// `e^{alpha dt} [c(dt) I + s(dt) (A - alpha I)]` with `(c, s)` equal to
    /// `(cos, sin/beta)` for `D = -beta^2 < 0`, `(cosh, sinh/gamma)` for
    /// `D = gamma^2 > 0`, and `(1, dt)` at the degenerate point.
    pub fn exponential(&self, dt: f64) -> [[f64; 2]; 2] {
        let m = self.matrix();
        let alpha = -self.r * self.r;
        let disc = self.discriminant();
        let r4 = self.r.powi(4);
        let (c, s) = if disc.abs() <= DEGENERATE_TOL * r4 {
            (1.0, dt)
        } else if disc < 0.0 {
            let beta = (-disc).sqrt();
            ((beta * dt).cos(), (beta * dt).sin() / beta)
        } else {
            let gamma = disc.sqrt();
            ((gamma * dt).cosh(), (gamma * dt).sinh() / gamma)
        };
        let e = (alpha * dt).exp();
        [
            [e * (c + s * (m[0][0] - alpha)), e * s * m[0][1]],
            [e * s * m[1][0], e * (c + s * (m[1][1] - alpha))],
        ]
    }
}

/// `lambda_+- = r^2 +- sqrt((1 - kappa) r^4 - r^2)` (complex square root).
/// These are decay rates: the eigenvalues of `A` are `-lambda_-/+`.
pub fn eigenvalues_closed_form(r: f64, kappa: f64) -> (Complex64, Complex64) {
    let r2 = r * r;
    let root = Complex64::new((1.0 - kappa) * r2 * r2 - r2, 0.0).sqrt();
    let base = Complex64::new(r2, 0.0);
    (base + root, base - root)
}

/// Exact linear flow over `dt`, tabulated per mode: the acoustic exponential
/// for `(a, V)` and the heat factor for `Pu`.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    grid: Grid,
    kappa: f64,
    dt: f64,
    blocks: Vec<[[f64; 2]; 2]>,
    heat: Vec<f64>,
}

impl LinearPropagator {
    pub fn new(grid: &Grid, kappa: f64, dt: f64) -> Self {
        let len = grid.len();
        let mut blocks = Vec::with_capacity(len);
        let mut heat = Vec::with_capacity(len);
        for k in 0..len {
            let r = grid.kmag(k);
            blocks.push(AcousticBlock::new(r, kappa).exponential(dt));
            heat.push((-r * r * dt).exp());
        }
        Self {
            grid: grid.clone(),
            kappa,
            dt,
            blocks,
            heat,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Apply to `(a, u)` in place. Per mode: `V = i xi_hat.u`,
    /// `Qu = -i xi_hat V`, `Pu = u - Qu`; `(a, V)` goes through the acoustic
    /// exponential and `Pu` through the heat factor.
    pub fn apply(&self, a: &mut SpectralField, u: &mut SpectralField) {
        let grid = &self.grid;
        let d = grid.dim();
        let i = Complex64::new(0.0, 1.0);
        let mut uk = [Complex64::default(); 3];
        for k in 0..grid.len() {
            if !grid.resolvable(k) {
                a.component_mut(0)[k] = Complex64::default();
                for c in 0..d {
                    u.component_mut(c)[k] = Complex64::default();
                }
                continue;
            }
            let r = grid.kmag(k);
            if r == 0.0 {
                continue;
            }
            let xi = grid.xi(k);
            let mut dot = Complex64::default();
            for c in 0..d {
                uk[c] = u.component(c)[k];
                dot += uk[c] * (xi[c] / r);
            }
            let v = i * dot;
            let m = &self.blocks[k];
            let a0 = a.component(0)[k];
            let a1 = a0 * m[0][0] + v * m[0][1];
            let v1 = a0 * m[1][0] + v * m[1][1];
            a.component_mut(0)[k] = a1;
            let h = self.heat[k];
            for c in 0..d {
                let q0 = dot * (xi[c] / r);
                let p = uk[c] - q0;
                let q1 = -i * v1 * (xi[c] / r);
                u.component_mut(c)[k] = p * h + q1;
            }
        }
    }

    pub fn step(&self, s: &State) -> State {
        let mut a = s.a.clone();
        let mut u = s.u.clone();
        self.apply(&mut a, &mut u);
        State {
            a,
            u,
            kappa: s.kappa,
            t: s.t + self.dt,
        }
    }
}

/// Exact linear flow over `dt` (nonlinear terms off).
pub fn linear_step(s: &State, dt: f64) -> State {
    LinearPropagator::new(s.grid(), s.kappa, dt).step(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_and_determinant() {
        for &(r, kappa) in &[(0.3, 2.0), (1.0, 4.0), (5.0, 1e4)] {
            let b = AcousticBlock::new(r, kappa);
            let m = b.matrix();
            assert!((m[0][0] + m[1][1] - b.trace()).abs() <= 1e-13 * b.trace().abs());
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!((det - b.det()).abs() <= 1e-13 * b.det());
        }
    }

    #[test]
    fn closed_form_example() {
        let (lp, lm) = eigenvalues_closed_form(1.0, 4.0);
        assert!((lp - Complex64::new(1.0, 2.0)).norm() < 1e-15);
        assert!((lm - Complex64::new(1.0, -2.0)).norm() < 1e-15);
        let (e1, e2) = AcousticBlock::new(1.0, 4.0).eigenvalues();
        assert!((e1 - Complex64::new(-1.0, 2.0)).norm() < 1e-15);
        assert!((e2 - Complex64::new(-1.0, -2.0)).norm() < 1e-15);
        let (z1, z2) = eigenvalues_closed_form(0.0, 4.0);
        assert_eq!(z1.norm() + z2.norm(), 0.0);
    }

    #[test]
    fn zero_step_is_identity() {
        let e = AcousticBlock::new(2.0, 30.0).exponential(0.0);
        assert_eq!(e, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn degenerate_branch_is_continuous() {
        // kappa < 1 with (1 - kappa) r^2 = 1 makes the discriminant vanish
        let kappa = 0.75;
        let r = 2.0;
        let b = AcousticBlock::new(r, kappa);
        assert!(b.discriminant().abs() < 1e-12);
        let near = AcousticBlock::new(r * (1.0 + 1e-7), kappa);
        let (e0, e1) = (b.exponential(0.3), near.exponential(0.3));
        for i in 0..2 {
            for j in 0..2 {
                assert!((e0[i][j] - e1[i][j]).abs() < 1e-5 * (1.0 + e0[i][j].abs()));
            }
        }
    }
}
