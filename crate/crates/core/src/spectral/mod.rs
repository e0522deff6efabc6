//! Periodic-grid Fourier infrastructure.
//!
//! The whole crate works on the torus `[0, ldom)^d` (`d = 2, 3`) as a stand-in
//! for `R^d`; fields are stored as Fourier-series coefficients and every
//! nonlinear product is followed by the spherical 2/3-rule mask.

mod field;
mod grid;
mod multiplier;
mod ops;

pub use field::SpectralField;
pub use grid::{signed, Grid};
pub use multiplier::{h_symbol, op_h, op_u, op_u_inv, u_inv_symbol, u_symbol, FourierMultiplier};
pub use ops::{
    divergence, gradient, laplacian, leray_project, leray_split, lp_norm, lp_norm_physical,
    partial, product, random_field,
};
