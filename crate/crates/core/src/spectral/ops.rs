use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Grid, SpectralField};
use crate::error::{NskError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Spectral partial derivative of every component along `axis`.
/// Nyquist modes are dropped so real fields stay real.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for c in 0..f.comps() {
        let comp = out.component_mut(c);
        for (k, v) in comp.iter_mut().enumerate() {
            if grid.is_nyquist(k) {
                *v = Complex64::default();
            } else {
                *v *= I * grid.xi(k)[axis];
            }
        }
    }
    out
}

/// Gradient of a scalar field.
pub fn gradient(f: &SpectralField) -> SpectralField {
    assert_eq!(f.comps(), 1, "gradient expects a scalar field");
    let parts: Vec<SpectralField> = (0..f.grid().dim()).map(|a| partial(f, a)).collect();
    SpectralField::stack(&parts).expect("same grid")
}

/// Divergence of a vector field.
pub fn divergence(u: &SpectralField) -> SpectralField {
    let grid = u.grid();
    assert_eq!(u.comps(), grid.dim(), "divergence expects a vector field");
    let mut out = SpectralField::scalar_zeros(grid);
    let dst = out.component_mut(0);
    for a in 0..grid.dim() {
        let src = u.component(a);
        for (k, (d, s)) in dst.iter_mut().zip(src).enumerate() {
            if !grid.is_nyquist(k) {
                *d += I * grid.xi(k)[a] * s;
            }
        }
    }
    out
}

/// Componentwise Laplacian.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for c in 0..f.comps() {
        for (k, v) in out.component_mut(c).iter_mut().enumerate() {
            let r = grid.kmag(k);
            *v *= -r * r;
        }
    }
    out
}

/// Leray split `u = Pu + Qu` with `Qu = xi_hat (xi_hat . u_hat)` per mode.
/// The mean velocity belongs to `Pu`.
pub fn leray_split(u: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = u.grid();
    let d = grid.dim();
    assert_eq!(u.comps(), d, "leray_split expects a vector field");
    let len = grid.len();
    let mut q = SpectralField::vector_zeros(grid);
    for k in 1..len {
        let r = grid.kmag(k);
        if r == 0.0 {
            continue;
        }
        let xi = grid.xi(k);
        let mut dot = Complex64::default();
        for a in 0..d {
            dot += u.component(a)[k] * (xi[a] / r);
        }
        for a in 0..d {
            q.component_mut(a)[k] = dot * (xi[a] / r);
        }
    }
    let p = u - &q;
    (p, q)
}

/// Leray projector `P`.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    leray_split(u).0
}

/// `L^p` norm over the torus. `p = 2` uses Parseval; other finite exponents
/// use the rectangle rule on the grid nodes; `p = inf` is the grid maximum.
/// Vector fields use the pointwise Euclidean magnitude.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(NskError::InvalidParameter(format!("L^p exponent must be >= 1, got {p}")));
    }
    if p == 2.0 {
        return Ok(f.l2_norm());
    }
    let phys = f.to_physical_complex();
    Ok(lp_norm_physical(f.grid(), &phys, p))
}

/// `L^p` norm of physical samples (see [`lp_norm`]).
pub fn lp_norm_physical(grid: &Grid, phys: &[Vec<Complex64>], p: f64) -> f64 {
    let len = grid.len();
    let mag = |k: usize| -> f64 {
        if phys.len() == 1 {
            phys[0][k].norm()
        } else {
            phys.iter().map(|c| c[k].norm_sqr()).sum::<f64>().sqrt()
        }
    };
    if p.is_infinite() {
        (0..len).map(mag).fold(0.0, f64::max)
    } else {
        let sum: f64 = (0..len).map(|k| mag(k).powf(p)).sum();
        (sum * grid.cell_volume()).powf(1.0 / p)
    }
}

/// Dealiased pointwise product of two scalar fields.
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    assert_eq!(a.comps(), 1);
    assert_eq!(b.comps(), 1);
    let pa = a.to_physical_complex();
    let pb = b.to_physical_complex();
    let prod: Vec<Complex64> = pa[0].iter().zip(&pb[0]).map(|(x, y)| x * y).collect();
    SpectralField::from_physical_complex(a.grid(), &[prod]).dealiased()
}

/// Random real field with independent Gaussian coefficients on the modes
/// with `lo <= |xi| <= hi` (inside the dealiasing mask) and zero mean.
pub fn random_field<R: Rng>(grid: &Grid, comps: usize, lo: f64, hi: f64, rng: &mut R) -> SpectralField {
    let mut f = SpectralField::zeros(grid, comps);
    for c in 0..comps {
        let comp = f.component_mut(c);
        for (k, v) in comp.iter_mut().enumerate() {
            let r = grid.kmag(k);
            if k == 0 || !grid.resolvable(k) || r < lo || r > hi {
                continue;
            }
            *v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    f.symmetrize();
    f.dealias();
    f
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(2, 32, 2.0 * PI).unwrap()
    }

    #[test]
    fn gradient_fields_are_pure_q() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_field(&g, 1, 0.0, 8.0, &mut rng);
        let u = gradient(&h);
        let (p, q) = leray_split(&u);
        assert!(p.l2_norm() <= 1e-13 * u.l2_norm());
        assert!(q.rel_l2_diff(&u) < 1e-13);
    }

    #[test]
    fn divergence_free_fields_are_pure_p() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random_field(&g, 1, 0.0, 8.0, &mut rng);
        let grad = gradient(&psi);
        // u = perp grad psi
        let u = SpectralField::stack(&[grad.extract(1), -&grad.extract(0)]).unwrap();
        let (p, q) = leray_split(&u);
        assert!(q.l2_norm() <= 1e-13 * u.l2_norm());
        assert!(p.rel_l2_diff(&u) < 1e-13);
    }

    #[test]
    fn mean_velocity_goes_to_p() {
        let g = grid();
        let mut u = SpectralField::vector_zeros(&g);
        u.component_mut(0)[0] = Complex64::new(1.5, 0.0);
        let (p, q) = leray_split(&u);
        assert_eq!(p.component(0)[0].re, 1.5);
        assert_eq!(q.l2_norm(), 0.0);
    }

    #[test]
    fn constant_sup_norm() {
        let g = grid();
        let f = SpectralField::from_fn(&g, |_| -2.5);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn single_mode_l2_matches_quadrature() {
        let g = Grid::new(2, 32, 3.0).unwrap();
        let amp = 1.7;
        let k = 2.0 * PI / 3.0;
        let f = SpectralField::from_fn(&g, |x| amp * (2.0 * k * x[0] - k * x[1]).cos());
        let parseval = lp_norm(&f, 2.0).unwrap();
        let quad = lp_norm(&f, 2.0000000001).unwrap();
        let closed = amp * (g.volume() / 2.0).sqrt();
        assert!((parseval - closed).abs() < 1e-12 * closed);
        assert!((quad - closed).abs() < 1e-8 * closed);
    }

    #[test]
    fn rejects_sub_unit_exponent() {
        let g = grid();
        let f = SpectralField::scalar_zeros(&g);
        assert!(lp_norm(&f, 0.5).is_err());
    }
}
