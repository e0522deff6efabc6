use std::f64::consts::PI;

use nalgebra::Matrix2;
use nsk_core::littlewood_paley::DyadicCutoff;
use nsk_core::model::{nonlinear_remainder, MaterialLaws, State};
use nsk_core::propagators::{
    dd_semigroup, duhamel_z_solve, eigenvalues_closed_form, linear_step, AcousticBlock, DuhamelSnapshot,
    Integrator, LinearPropagator, SemigroupParams, ZField,
};
use nsk_core::spectral::{lp_norm, random_field, Grid, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a real 2x2 matrix after diagonal balancing
/// (`D^{-1} A D` with equal off-diagonal magnitudes), via nalgebra.
fn numeric_eigenvalues(m: [[f64; 2]; 2]) -> Vec<num_complex::Complex64> {
    let s = (m[1][0].abs() / m[0][1].abs()).sqrt();
    let a = Matrix2::new(m[0][0], m[0][1] * s, m[1][0] / s, m[1][1]);
    a.complex_eigenvalues()
        .iter()
        .map(|z| num_complex::Complex64::new(z.re, z.im))
        .collect()
}

#[test]
fn closed_form_eigenvalues_match_numeric_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let r = 20.0 * (1.0 - rng.gen::<f64>());
        let kappa = 1.0 + (1e4 - 1.0) * (1.0 - rng.gen::<f64>());
        let block = AcousticBlock::new(r, kappa);
        let (lp, lm) = eigenvalues_closed_form(r, kappa);
        assert_eq!(lp.re, r * r);
        assert_eq!(lm.re, r * r);
        let mut num = numeric_eigenvalues(block.matrix());
        num.sort_by(|x, y| y.im.partial_cmp(&x.im).unwrap());
        // matrix eigenvalues are -lambda_-/+, ordered by imaginary part
        let mut expect = [-lm, -lp];
        expect.sort_by(|x, y| y.im.partial_cmp(&x.im).unwrap());
        for (a, b) in num.iter().zip(&expect) {
            worst = worst.max((a - b).norm());
        }
    }
    println!("max |closed form - numeric| = {worst:e}");
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn linear_flow_is_stable_on_a_lattice() {
    for &kappa in &[1.5, 10.0, 1e3, 1e4] {
        for i in 1..=40 {
            let r = 0.25 * i as f64;
            let b = AcousticBlock::new(r, kappa);
            let (e1, e2) = b.eigenvalues();
            assert_eq!(e1.re, -r * r);
            assert_eq!(e2.re, -r * r);
            let dt = 0.1 / (r * r);
            let e = b.exponential(dt);
            let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
            let expect = (-2.0 * r * r * dt).exp();
            assert!((det - expect).abs() <= 1e-12 * expect);
            // e^{r^2 t} |exp(tA)| <= 1 + |A + r^2 I| / beta uniformly in t (kappa > 1)
            let mat = b.matrix();
            let beta = (-b.discriminant()).sqrt();
            let shifted = Matrix2::new(mat[0][0] + r * r, mat[0][1], mat[1][0], mat[1][1] + r * r);
            let bound = 1.0 + shifted.norm() / beta;
            let mut m = Matrix2::identity();
            let step = Matrix2::new(e[0][0], e[0][1], e[1][0], e[1][1]);
            for n in 1..=200 {
                m = step * m;
                let w = m.norm() / 2f64.sqrt() * (r * r * dt * n as f64).exp();
                assert!(w <= bound * (1.0 + 1e-9), "r={r} kappa={kappa} n={n}");
            }
        }
    }
}

fn rk4_oracle(m: [[f64; 2]; 2], y0: [f64; 2], dt: f64) -> [f64; 2] {
    let scale = (m[0][0].abs() + m[0][1].abs()).max(m[1][0].abs() + m[1][1].abs());
    let rate = (m[0][1].abs() * m[1][0].abs()).sqrt() + m[1][1].abs();
    let n = ((dt * rate.max(scale.sqrt())) / 2e-3).ceil().max(1000.0) as usize;
    let h = dt / n as f64;
    let f = |y: [f64; 2]| [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]];
    let mut y = y0;
    for _ in 0..n {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

#[test]
fn exact_step_matches_ode_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = 0.05 + 4.95 * rng.gen::<f64>();
        let kappa = 10f64.powf(4.0 * rng.gen::<f64>()).max(1.0 + 1e-3);
        let dt = 2.0 * rng.gen::<f64>() / (r * r);
        let block = AcousticBlock::new(r, kappa);
        let e = block.exponential(dt);
        for y0 in [[1.0, 0.0], [0.0, 1.0]] {
            let exact = [e[0][0] * y0[0] + e[0][1] * y0[1], e[1][0] * y0[0] + e[1][1] * y0[1]];
            let ode = rk4_oracle(block.matrix(), y0, dt);
            let norm = (ode[0].powi(2) + ode[1].powi(2)).sqrt();
            let err = ((exact[0] - ode[0]).powi(2) + (exact[1] - ode[1]).powi(2)).sqrt() / norm;
            worst = worst.max(err);
        }
    }
    println!("max relative error vs RK4 oracle = {worst:e}");
    assert!(worst <= 1e-9, "{worst:e}");
}

fn random_state(grid: &Grid, kappa: f64, amp: f64, hi: f64, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = random_field(grid, 1, 0.0, hi, &mut rng);
    let mut u = random_field(grid, grid.dim(), 0.0, hi, &mut rng);
    let na = lp_norm(&a, f64::INFINITY).unwrap();
    let nu = lp_norm(&u, f64::INFINITY).unwrap();
    a.scale(amp * kappa.sqrt() / na);
    u.scale(amp / nu);
    State::new(a, u, kappa, 0.0).unwrap()
}

#[test]
fn zero_step_is_identity() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let s = random_state(&g, 30.0, 0.1, 8.0, 1);
    let out = LinearPropagator::new(&g, 30.0, 0.0).step(&s);
    assert!(out.a.max_abs_diff(&s.a) < 1e-15);
    assert!(out.u.max_abs_diff(&s.u) < 1e-15);
}

#[test]
fn blockwise_lyapunov_decay() {
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let lp = DyadicCutoff::new(&g);
    let kappa = 100.0;
    for j in [1, 2, 3] {
        let s = random_state(&g, kappa, 0.1, 20.0, 100 + j as u64);
        let a = lp.dyadic_block(&s.a, j).unwrap();
        let u = lp.dyadic_block(&s.u, j).unwrap();
        let mut cur = State::new(a, u, kappa, 0.0).unwrap();
        let energy = |st: &State| {
            let sa = st.a.l2_norm();
            ((sa / kappa.sqrt()).powi(2) + (2f64.powi(j) * sa).powi(2) + st.u.l2_norm().powi(2)).sqrt()
        };
        let e0 = energy(&cur);
        let dt = 0.02 / 4f64.powi(j);
        let prop = LinearPropagator::new(&g, kappa, dt);
        let mut ts = vec![];
        let mut logs = vec![];
        for n in 1..=200 {
            cur = prop.step(&cur);
            let e = energy(&cur);
            assert!(e <= 3.0 * e0);
            ts.push(n as f64 * dt);
            logs.push(e.ln());
        }
        let (tm, lm) = (ts.iter().sum::<f64>() / 200.0, logs.iter().sum::<f64>() / 200.0);
        let slope = ts.iter().zip(&logs).map(|(t, l)| (t - tm) * (l - lm)).sum::<f64>()
            / ts.iter().map(|t| (t - tm).powi(2)).sum::<f64>();
        let c = -slope / 4f64.powi(j);
        println!("block {j}: fitted c = {c:.4}");
        assert!(c > 0.3, "block {j}: c = {c}");
    }
}

#[test]
fn semigroup_property_and_unimodularity() {
    let g = Grid::new(2, 64, 4.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_field(&g, 1, 0.0, 6.0, &mut rng);
    let kappa = 300.0;
    let s1 = dd_semigroup(&f, SemigroupParams::new(kappa, 0.013).unwrap());
    let s12 = dd_semigroup(&s1, SemigroupParams::new(kappa, 0.021).unwrap());
    let direct = dd_semigroup(&f, SemigroupParams::new(kappa, 0.034).unwrap());
    assert!(s12.rel_l2_diff(&direct) < 1e-12);
    let heat = nsk_core::spectral::FourierMultiplier::heat(0.034).apply(&f).unwrap();
    assert!((direct.l2_norm() - heat.l2_norm()).abs() < 1e-12 * heat.l2_norm());
    let id = dd_semigroup(&f, SemigroupParams::new(kappa, 0.0).unwrap());
    assert!(id.rel_l2_diff(&f.dealiased()) < 1e-15);
    assert!(SemigroupParams::new(kappa, -1.0).is_err());
}

#[test]
fn z_field_round_trip() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    for seed in 0..10 {
        let s = random_state(&g, 50.0, 0.3, 10.0, seed);
        let z = ZField::from_state(&s);
        let (ga, qu) = z.parts();
        let ga_direct = nsk_core::spectral::gradient(&s.a);
        let qu_direct = nsk_core::spectral::leray_split(&s.u).1;
        assert!(ga.rel_l2_diff(&ga_direct) < 1e-12);
        assert!(qu.rel_l2_diff(&qu_direct) < 1e-12);
        let again = ZField::from_parts(&ga, &qu, 50.0);
        assert!(again.rel_diff(&z) < 1e-12);
    }
}

#[test]
fn equilibrium_is_fixed_by_the_integrator() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let laws = MaterialLaws::simple(100.0).unwrap();
    let s = State::equilibrium(&g, 100.0);
    let out = Integrator::new(&s, &laws, 0.01).unwrap().run(&s, 10).unwrap();
    assert_eq!(out.a.l2_norm() + out.u.l2_norm(), 0.0);
    assert!((out.t - 0.1).abs() < 1e-15);
}

#[test]
fn tiny_amplitude_follows_linear_flow() {
    // the nonlinear contribution is O(amplitude * dt) relative, so dt must be small too
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let laws = MaterialLaws::simple(10.0).unwrap();
    let s = random_state(&g, 10.0, 1e-8, 3.0, 9);
    let dt = 1e-6;
    let nl = Integrator::new(&s, &laws, dt).unwrap().step(&s).unwrap();
    let lin = linear_step(&s, dt);
    let err = ((&nl.a - &lin.a).l2_norm().powi(2) + (&nl.u - &lin.u).l2_norm().powi(2)).sqrt()
        / (lin.a.l2_norm().powi(2) + lin.u.l2_norm().powi(2)).sqrt();
    println!("advance vs linear_step at amplitude 1e-8: {err:e}");
    assert!(err <= 1e-12, "{err:e}");
}

#[test]
fn strang_integrator_is_second_order() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let kappa = 20.0;
    let laws = MaterialLaws::simple(kappa).unwrap();
    let s = random_state(&g, kappa, 0.1, 4.0, 17);
    let t_end = 0.2;
    let run = |n: usize| Integrator::new(&s, &laws, t_end / n as f64).unwrap().run(&s, n).unwrap();
    let r1 = run(20);
    let r2 = run(40);
    let r4 = run(80);
    let d12 = ((&r1.a - &r2.a).l2_norm().powi(2) + (&r1.u - &r2.u).l2_norm().powi(2)).sqrt();
    let d24 = ((&r2.a - &r4.a).l2_norm().powi(2) + (&r2.u - &r4.u).l2_norm().powi(2)).sqrt();
    let order = (d12 / d24).log2();
    println!("observed order {order:.3}");
    assert!((order - 2.0).abs() <= 0.3, "order {order}");
}

#[test]
fn cfl_violation_is_reported() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let laws = MaterialLaws::simple(100.0).unwrap();
    let s = random_state(&g, 100.0, 0.5, 10.0, 3);
    let err = Integrator::new(&s, &laws, 1.0).unwrap().step(&s).unwrap_err();
    assert_eq!(err.reason(), "cfl");
    assert!(err.is_runtime_abort());
}

fn snapshot(s: &State, laws: Option<&MaterialLaws>) -> DuhamelSnapshot {
    let (f, g) = match laws {
        Some(l) => nonlinear_remainder(s, l).unwrap(),
        None => (SpectralField::scalar_zeros(s.grid()), SpectralField::vector_zeros(s.grid())),
    };
    DuhamelSnapshot {
        t: s.t,
        a: s.a.clone(),
        u: s.u.clone(),
        f,
        g,
    }
}

#[test]
fn duhamel_of_zero_is_zero() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let s = State::equilibrium(&g, 10.0);
    let mut later = s.clone();
    later.t = 0.5;
    let z = duhamel_z_solve(&[snapshot(&s, None), snapshot(&later, None)], 10.0).unwrap();
    assert_eq!(z.z.l2_norm(), 0.0);
    assert!(duhamel_z_solve(&[], 10.0).is_err());
}

#[test]
fn duhamel_matches_linear_flow_under_refinement() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let kappa = 4.0;
    let s0 = random_state(&g, kappa, 0.1, 3.0, 23);
    let t_end = 0.25;
    let mut errs = vec![];
    for n in [400usize, 800, 1600] {
        let prop = LinearPropagator::new(&g, kappa, t_end / n as f64);
        let mut cur = s0.clone();
        let mut hist = vec![snapshot(&cur, None)];
        for _ in 0..n {
            cur = prop.step(&cur);
            hist.push(snapshot(&cur, None));
        }
        let z = duhamel_z_solve(&hist, kappa).unwrap();
        errs.push(z.rel_diff(&ZField::from_state(&cur)));
    }
    println!("linear Duhamel errors {errs:?}");
    assert!(errs[2] < errs[1] && errs[1] < errs[0]);
    assert!(errs[2] <= 1e-6, "{:e}", errs[2]);
}

#[test]
fn duhamel_matches_nonlinear_integrator() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let kappa = 4.0;
    let laws = MaterialLaws::simple(kappa).unwrap();
    let s0 = random_state(&g, kappa, 0.05, 3.0, 29);
    let dt = 0.01;
    let steps = 25;
    let fine = Integrator::new(&s0, &laws, dt / 8.0).unwrap();
    let mut cur = s0.clone();
    let mut hist = vec![snapshot(&cur, Some(&laws))];
    for _ in 0..steps * 8 {
        cur = fine.step(&cur).unwrap();
        hist.push(snapshot(&cur, Some(&laws)));
    }
    let z = duhamel_z_solve(&hist, kappa).unwrap();
    let err = z.rel_diff(&ZField::from_state(&cur));
    println!("nonlinear Duhamel vs integrator: {err:e}");
    assert!(err <= 1e-4, "{err:e}");
}

