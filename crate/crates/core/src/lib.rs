//! Numerical quaternionic and biquaternionic analysis.
//!
//! Biquaternion algebra, regularity operators, the singular kernels of the
//! Cauchy-like integral theorems, 3-form quadrature over closed surfaces in
//! R⁴ and the complex-contour machinery used to evaluate the Minkowskian
//! variants.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod contour;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod operators;
pub mod quad;
pub mod sum;
pub mod theorems;

pub use algebra::{BiQuat, Point, C64};
pub use error::{Error, Result};
