use super::{CoefficientFns, MaterialLaws, State, RHO_FLOOR};
use crate::error::{NskError, Result};
use crate::spectral::{divergence, gradient, laplacian, partial, Grid, SpectralField};

fn nodal(f: &SpectralField) -> Vec<Vec<f64>> {
    f.to_physical()
}

fn assemble(grid: &Grid, comps: Vec<Vec<f64>>) -> SpectralField {
    SpectralField::from_physical(grid, &comps).dealiased()
}

fn scalar(grid: &Grid, v: Vec<f64>) -> SpectralField {
    SpectralField::from_physical(grid, &[v])
}

/// `(grad u)[i][j] = d_j u_i` at the nodes.
fn velocity_gradient(u: &SpectralField) -> Vec<Vec<Vec<f64>>> {
    let d = u.grid().dim();
    (0..d)
        .map(|i| {
            let ui = u.extract(i);
            (0..d).map(|j| nodal(&partial(&ui, j)).swap_remove(0)).collect()
        })
        .collect()
}

/// `(v . grad) w` at the nodes, for nodal `v` and nodal gradient `gw[i][j] = d_j w_i`.
fn transport(v: &[Vec<f64>], gw: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let len = v[0].len();
    gw.iter()
        .map(|gi| {
            (0..len)
                .map(|k| v.iter().zip(gi).map(|(vj, dj)| vj[k] * dj[k]).sum())
                .collect()
        })
        .collect()
}

/// `div(2 mu D(u)) + grad(lambda div u)` for nodal viscosities, where
/// `D(u)` is the symmetric gradient. Returns nodal values.
fn lame_operator(grid: &Grid, gu: &[Vec<Vec<f64>>], mu: &[f64], lambda: &[f64], div_u: &[f64]) -> Vec<Vec<f64>> {
    let d = grid.dim();
    let len = grid.len();
    let mut out = vec![vec![0.0; len]; d];
    for i in 0..d {
        let mut acc = SpectralField::scalar_zeros(grid);
        for j in 0..d {
            let tij: Vec<f64> = (0..len).map(|k| mu[k] * (gu[i][j][k] + gu[j][i][k])).collect();
            acc += &partial(&scalar(grid, tij), j);
        }
        let ldiv: Vec<f64> = (0..len).map(|k| lambda[k] * div_u[k]).collect();
        acc += &partial(&scalar(grid, ldiv), i);
        out[i] = nodal(&acc).swap_remove(0);
    }
    out
}

fn check_vacuum(t: f64, rho: &[f64]) -> Result<()> {
    let min_rho = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_rho > RHO_FLOOR) {
        return Err(NskError::Vacuum {
            t,
            min_rho,
            floor: RHO_FLOOR,
        });
    }
    Ok(())
}

/// Time derivatives of the primitive variables, `(d_t rho, d_t u)`, from
///
/// ```text
/// d_t rho = -div(rho u)
/// d_t u   = -u.grad u - grad P / rho + A(u) / rho + kappa grad(m Delta rho + m'|grad rho|^2 / 2)
/// ```
///
/// with `A(u) = div(2 mu D(u)) + grad(lambda div u)`.
pub fn primitive_rates(s: &State, laws: &MaterialLaws) -> Result<(SpectralField, SpectralField)> {
    let grid = s.grid();
    let d = grid.dim();
    let len = grid.len();
    // derivatives and the mass flux use rho - 1 so small perturbations keep full precision
    let excess = s.density_excess(laws)?;
    let rho: Vec<f64> = excess.iter().map(|e| 1.0 + e).collect();
    check_vacuum(s.t, &rho)?;
    let rho_hat = scalar(grid, excess.clone());
    let u = nodal(&s.u);

    let flux: Vec<Vec<f64>> = u
        .iter()
        .map(|ui| ui.iter().zip(&excess).map(|(a, e)| a + a * e).collect())
        .collect();
    let drho = -&divergence(&SpectralField::from_physical(grid, &flux));

    let grad_rho = nodal(&gradient(&rho_hat));
    let lap_rho = nodal(&laplacian(&rho_hat)).swap_remove(0);
    let gu = velocity_gradient(&s.u);
    let div_u: Vec<f64> = (0..len).map(|k| (0..d).map(|i| gu[i][i][k]).sum()).collect();
    let mu: Vec<f64> = rho.iter().map(|&r| laws.mu(r)).collect();
    let lambda: Vec<f64> = rho.iter().map(|&r| laws.lambda(r)).collect();
    let visc = lame_operator(grid, &gu, &mu, &lambda, &div_u);
    let adv = transport(&u, &gu);

    let korteweg_potential: Vec<f64> = (0..len)
        .map(|k| {
            let g2: f64 = grad_rho.iter().map(|g| g[k] * g[k]).sum();
            laws.m(rho[k]) * lap_rho[k] + 0.5 * laws.m_prime(rho[k]) * g2
        })
        .collect();
    let kort = nodal(&gradient(&scalar(grid, korteweg_potential)));

    let du: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..len)
                .map(|k| {
                    let r = rho[k];
                    -adv[i][k] - laws.p_prime(r) * grad_rho[i][k] / r
                        + visc[i][k] / r
                        + laws.kappa * kort[i][k]
                })
                .collect()
        })
        .collect();
    Ok((drho.dealiased(), assemble(grid, du)))
}

/// Full time derivative `(d_t a, d_t u)` obtained from the primitive system,
/// with `d_t a = sqrt(kappa) sqrt(m(rho)/rho) d_t rho`.
pub fn rhs_defect(s: &State, laws: &MaterialLaws) -> Result<(SpectralField, SpectralField)> {
    let grid = s.grid();
    let (drho, du) = primitive_rates(s, laws)?;
    let rho = s.density(laws)?;
    let sk = s.kappa.sqrt();
    let drho_n = nodal(&drho).swap_remove(0);
    let da: Vec<f64> = drho_n
        .iter()
        .zip(&rho)
        .map(|(dr, &r)| sk * (laws.m(r) / r).sqrt() * dr)
        .collect();
    Ok((assemble(grid, vec![da]), du))
}

/// Linear part `(-sqrt(kappa) div u, Delta u + grad div u - kappa^{-1/2} grad a + sqrt(kappa) grad Delta a)`.
pub fn linear_rhs(s: &State) -> (SpectralField, SpectralField) {
    let sk = s.kappa.sqrt();
    let div_u = divergence(&s.u);
    let da = &div_u * -sk;
    let mut du = laplacian(&s.u);
    du += &gradient(&div_u);
    let ga = gradient(&s.a);
    du.axpy(-1.0 / sk, &ga);
    du.axpy(sk, &laplacian(&ga));
    (da.dealiased(), du.dealiased())
}

/// `rhs_defect - linear_rhs`: the nonlinear terms `(f, g)`.
pub fn nonlinear_remainder(s: &State, laws: &MaterialLaws) -> Result<(SpectralField, SpectralField)> {
    let (da, du) = rhs_defect(s, laws)?;
    let (la, lu) = linear_rhs(s);
    Ok((&da - &la, &du - &lu))
}

/// `f = -u.grad a - sqrt(kappa) psi~(kappa^{-1/2} a) div u`.
pub fn nonlinearity_f(s: &State, laws: &MaterialLaws) -> Result<SpectralField> {
    let grid = s.grid();
    let x = s.scaled_density(laws)?;
    let sk = s.kappa.sqrt();
    let u = nodal(&s.u);
    let ga = nodal(&gradient(&s.a));
    let div_u = nodal(&divergence(&s.u)).swap_remove(0);
    let out: Vec<f64> = (0..grid.len())
        .map(|k| {
            let c = CoefficientFns::at_scaled(laws, x[k]).expect("range checked");
            let adv: f64 = u.iter().zip(&ga).map(|(ui, gi)| ui[k] * gi[k]).sum();
            -adv - sk * c.psi * div_u[k]
        })
        .collect();
    Ok(assemble(grid, vec![out]))
}

/// The five nonlinear momentum terms, with the signs fixed by the primitive
/// system:
///
/// ```text
/// g1 = -u.grad u
/// g2 = Q~ (Delta u + grad div u) + (1 + Q~)(div(2 mu~ D(u)) + grad(lambda~ div u))
/// g3 = -kappa^{-1/2} G~ grad a
/// g4 = sqrt(kappa) grad(psi~ Delta a)
/// g5 = grad(|grad a|^2) / 2
/// ```
#[derive(Clone, Debug)]
pub struct GTerms {
    pub g1: SpectralField,
    pub g2: SpectralField,
    pub g3: SpectralField,
    pub g4: SpectralField,
    pub g5: SpectralField,
}

impl GTerms {
    pub fn sum(&self) -> SpectralField {
        let mut s = self.g1.clone();
        for g in [&self.g2, &self.g3, &self.g4, &self.g5] {
            s += g;
        }
        s
    }

    pub fn terms(&self) -> [&SpectralField; 5] {
        [&self.g1, &self.g2, &self.g3, &self.g4, &self.g5]
    }
}

pub fn nonlinearity_g(s: &State, laws: &MaterialLaws) -> Result<GTerms> {
    let grid = s.grid();
    let d = grid.dim();
    let len = grid.len();
    let x = s.scaled_density(laws)?;
    let sk = s.kappa.sqrt();
    let coeffs: Vec<CoefficientFns> = x
        .iter()
        .map(|&v| CoefficientFns::at_scaled(laws, v))
        .collect::<Result<_>>()?;

    let u = nodal(&s.u);
    let gu = velocity_gradient(&s.u);
    let adv = transport(&u, &gu);
    let g1 = assemble(grid, adv.into_iter().map(|c| c.into_iter().map(|v| -v).collect()).collect());

    let div_u_hat = divergence(&s.u);
    let div_u = nodal(&div_u_hat).swap_remove(0);
    let mut abar_hat = laplacian(&s.u);
    abar_hat += &gradient(&div_u_hat);
    let abar = nodal(&abar_hat);
    let mu_t: Vec<f64> = coeffs.iter().map(|c| c.mu_bar).collect();
    let la_t: Vec<f64> = coeffs.iter().map(|c| c.lambda_bar).collect();
    let visc = lame_operator(grid, &gu, &mu_t, &la_t, &div_u);
    let g2 = assemble(
        grid,
        (0..d)
            .map(|i| {
                (0..len)
                    .map(|k| {
                        let q = coeffs[k].q;
                        q * abar[i][k] + (1.0 + q) * visc[i][k]
                    })
                    .collect()
            })
            .collect(),
    );

    let ga_hat = gradient(&s.a);
    let ga = nodal(&ga_hat);
    let g3 = assemble(
        grid,
        ga.iter()
            .map(|gi| (0..len).map(|k| -coeffs[k].g * gi[k] / sk).collect())
            .collect(),
    );

    let lap_a = nodal(&laplacian(&s.a)).swap_remove(0);
    let psi_lap: Vec<f64> = (0..len).map(|k| sk * coeffs[k].psi * lap_a[k]).collect();
    let g4 = gradient(&scalar(grid, psi_lap)).dealiased();

    let half_g2: Vec<f64> = (0..len)
        .map(|k| 0.5 * ga.iter().map(|g| g[k] * g[k]).sum::<f64>())
        .collect();
    let g5 = gradient(&scalar(grid, half_g2)).dealiased();

    Ok(GTerms { g1, g2, g3, g4, g5 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn smooth_state(grid: &Grid, kappa: f64, amp: f64, seed: u64) -> State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = random_field(grid, 1, 0.0, 3.0, &mut rng);
        let mut u = random_field(grid, grid.dim(), 0.0, 3.0, &mut rng);
        let na = crate::spectral::lp_norm(&a, f64::INFINITY).unwrap();
        let nu = crate::spectral::lp_norm(&u, f64::INFINITY).unwrap();
        a.scale(amp * kappa.sqrt() / na);
        u.scale(amp / nu);
        State::new(a, u, kappa, 0.0).unwrap()
    }

    #[test]
    fn equilibrium_is_stationary() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let laws = MaterialLaws::simple(10.0).unwrap();
        let s = State::equilibrium(&g, 10.0);
        let (da, du) = rhs_defect(&s, &laws).unwrap();
        assert_eq!(da.l2_norm(), 0.0);
        assert_eq!(du.l2_norm(), 0.0);
        let gt = nonlinearity_g(&s, &laws).unwrap();
        for t in gt.terms() {
            assert_eq!(t.l2_norm(), 0.0);
        }
        assert_eq!(nonlinearity_f(&s, &laws).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn mass_is_conserved() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let laws = MaterialLaws::variable_m(20.0).unwrap();
        let s = smooth_state(&g, 20.0, 0.2, 5);
        let (drho, _) = primitive_rates(&s, &laws).unwrap();
        assert!(drho.mean(0).norm() < 1e-13);
    }

    #[test]
    fn chain_rule_identity() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let laws = MaterialLaws::simple(50.0).unwrap();
        let s = smooth_state(&g, 50.0, 0.05, 7);
        let (da, _) = rhs_defect(&s, &laws).unwrap();
        // d_t a = -u.grad a - sqrt(kappa)(1 + psi~) div u
        let f = nonlinearity_f(&s, &laws).unwrap();
        let lin = &divergence(&s.u) * -s.kappa.sqrt();
        let expect = &f + &lin.dealiased();
        assert!(da.rel_l2_diff(&expect) < 1e-10, "{}", da.rel_l2_diff(&expect));
    }
}
