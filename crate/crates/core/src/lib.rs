//! Pseudospectral solver for the Navier-Stokes-Korteweg perturbation system
//! on a periodic torus, with Littlewood-Paley / Besov diagnostics.

// `!(x > 0.0)` guards reject NaN; tensor loops index several arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiments;
pub mod ins;
pub mod io;
pub mod littlewood_paley;
pub mod model;
pub mod propagators;
pub mod spectral;

pub use error::{NskError, Result};
