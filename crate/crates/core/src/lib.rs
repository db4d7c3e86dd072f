//! Numerical construction of an entire function of exponential type whose
//! contour-Laplace representation `F(z) = (1/2πi) ∫_γ g(s) e^{zs} ds` does not
//! grow regularly.
//!
//! * [`lattice`]: the dyadic zero set and its counting function.
//! * [`product`]: the canonical product `f` and its growth profiles.
//! * [`borel`]: Taylor coefficients of `f` and its Borel transform `g`.
//! * [`contour`]: contours, quadrature, Borel inversion and the pieces `u`, `F`.
//! * [`diagnostics`]: relative measure, windowed statistics and the
//!   regular/irregular growth verdict.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel;
pub mod contour;
pub mod diagnostics;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod product;

pub use error::{Error, Result};
pub use num_complex::Complex64;
