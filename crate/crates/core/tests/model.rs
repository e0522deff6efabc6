use std::f64::consts::PI;

use nsk_core::model::{
    linear_rhs, nonlinear_remainder, nonlinearity_f, nonlinearity_g, rhs_defect, MaterialLaws, State,
};
use nsk_core::spectral::{gradient, laplacian, lp_norm, random_field, Grid, SpectralField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Smooth low-mode state with `sup |kappa^{-1/2} a| = sup |u| = amp`.
fn state(grid: &Grid, kappa: f64, amp: f64, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = random_field(grid, 1, 0.0, 3.0, &mut rng);
    let mut u = random_field(grid, grid.dim(), 0.0, 3.0, &mut rng);
    let na = lp_norm(&a, f64::INFINITY).unwrap();
    let nu = lp_norm(&u, f64::INFINITY).unwrap();
    a.scale(amp * kappa.sqrt() / na);
    u.scale(amp / nu);
    State::new(a, u, kappa, 0.0).unwrap()
}

fn scaled(s: &State, eps: f64) -> State {
    State::new(&s.a * eps, &s.u * eps, s.kappa, s.t).unwrap()
}

fn stacked_norm(a: &SpectralField, u: &SpectralField) -> f64 {
    (a.l2_norm().powi(2) + u.l2_norm().powi(2)).sqrt()
}

#[test]
fn remainder_is_quadratic_in_amplitude() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    for laws in [MaterialLaws::simple(30.0).unwrap(), MaterialLaws::variable_m(30.0).unwrap()] {
        let base = state(&g, 30.0, 1.0, 11);
        let r1 = {
            let (f, g) = nonlinear_remainder(&scaled(&base, 2e-3), &laws).unwrap();
            stacked_norm(&f, &g)
        };
        let r2 = {
            let (f, g) = nonlinear_remainder(&scaled(&base, 1e-3), &laws).unwrap();
            stacked_norm(&f, &g)
        };
        let ratio = r1 / r2;
        assert!((3.6..=4.4).contains(&ratio), "{}: ratio {ratio}", laws.name);
    }
}

#[test]
fn term_list_matches_defect() {
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    for laws in [MaterialLaws::simple(20.0).unwrap(), MaterialLaws::variable_m(20.0).unwrap()] {
        let s = state(&g, 20.0, 1e-2, 3);
        let (rf, rg) = nonlinear_remainder(&s, &laws).unwrap();
        let f = nonlinearity_f(&s, &laws).unwrap();
        let gsum = nonlinearity_g(&s, &laws).unwrap().sum();
        let ef = f.rel_l2_diff(&rf);
        let eg = gsum.rel_l2_diff(&rg);
        assert!(ef <= 1e-8 && eg <= 1e-8, "{}: f {ef:e}, g {eg:e}", laws.name);
    }
}

#[test]
fn zero_density_leaves_only_transport() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let laws = MaterialLaws::simple(10.0).unwrap();
    let mut s = state(&g, 10.0, 0.1, 9);
    s.a = SpectralField::scalar_zeros(&g);
    let terms = nonlinearity_g(&s, &laws).unwrap();
    assert!(terms.g1.l2_norm() > 0.0);
    for t in &terms.terms()[1..] {
        assert!(t.l2_norm() < 1e-15);
    }
    assert!(nonlinearity_f(&s, &laws).unwrap().l2_norm() < 1e-15);
}

#[test]
fn zero_velocity_korteweg_terms() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let laws = MaterialLaws::simple(10.0).unwrap();
    let mut s = state(&g, 10.0, 0.1, 13);
    s.u = SpectralField::vector_zeros(&g);
    let terms = nonlinearity_g(&s, &laws).unwrap();
    assert!(terms.g1.l2_norm() < 1e-15 && terms.g2.l2_norm() < 1e-15);
    // g5 = grad(|grad a|^2)/2 evaluated term by term on the nodes
    let ga = gradient(&s.a).to_physical();
    let sq: Vec<f64> = (0..g.len()).map(|k| 0.5 * (ga[0][k].powi(2) + ga[1][k].powi(2))).collect();
    let expect = gradient(&SpectralField::from_physical(&g, &[sq])).dealiased();
    assert!(terms.g5.rel_l2_diff(&expect) < 1e-12);
}

#[test]
fn capillary_term_is_kappa_independent_for_unit_m() {
    // m = 1 gives psi~(x) = x/2, so g4 = grad(a Delta a)/2 for every kappa
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let a = SpectralField::from_fn(&g, |x| 0.3 * (2.0 * x[0] + x[1]).cos());
    let lap = laplacian(&a).to_physical().swap_remove(0);
    let av = a.to_physical().swap_remove(0);
    let prod: Vec<f64> = av.iter().zip(&lap).map(|(x, y)| 0.5 * x * y).collect();
    let expect = gradient(&SpectralField::from_physical(&g, &[prod])).dealiased();
    for kappa in [4.0, 400.0] {
        let laws = MaterialLaws::simple(kappa).unwrap();
        let s = State::new(a.clone(), SpectralField::vector_zeros(&g), kappa, 0.0).unwrap();
        let g4 = nonlinearity_g(&s, &laws).unwrap().g4;
        assert!(g4.rel_l2_diff(&expect) < 1e-12);
    }
}

#[test]
fn transport_f_for_unit_m() {
    // f = -u.grad a - (a/2) div u, assembled by hand on the nodes
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let laws = MaterialLaws::simple(16.0).unwrap();
    let s = state(&g, 16.0, 0.05, 21);
    let a = s.a.to_physical().swap_remove(0);
    let u = s.u.to_physical();
    let ga = gradient(&s.a).to_physical();
    let div = nsk_core::spectral::divergence(&s.u).to_physical().swap_remove(0);
    let vals: Vec<f64> = (0..g.len())
        .map(|k| -(u[0][k] * ga[0][k] + u[1][k] * ga[1][k]) - 0.5 * a[k] * div[k])
        .collect();
    let expect = SpectralField::from_physical(&g, &[vals]).dealiased();
    assert!(nonlinearity_f(&s, &laws).unwrap().rel_l2_diff(&expect) < 1e-12);
}

#[test]
fn linear_part_of_equilibrium_perturbation() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let s = State::equilibrium(&g, 5.0);
    let (la, lu) = linear_rhs(&s);
    assert_eq!(la.l2_norm() + lu.l2_norm(), 0.0);
    let laws = MaterialLaws::simple(5.0).unwrap();
    let (da, du) = rhs_defect(&s, &laws).unwrap();
    assert_eq!(da.l2_norm() + du.l2_norm(), 0.0);
}
