//! S-spectrum and S-functional calculus for full Clifford operators.
//!
//! A full Clifford operator is a matrix tuple `T̂ = Σ_A T_A e_A` with real
//! `d × d` components indexed by the blades of the Clifford algebra R_{0,n}.
//! The crate computes its S-spectrum, the left and right S-resolvents, and
//! functions `f(T̂)` defined by contour integrals over a complex slice, along
//! with Riesz projectors. It needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod calculus;
pub mod contour;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod slice;
pub mod spectrum;

#[cfg(test)]
mod test_util;

pub use algebra::{
    blade_product, cl_mul, paravector_inverse, sphere_of, CliffordElement, ImaginaryUnit, MultiIndex,
    Paravector, SlicePoint, Sphere,
};
pub use error::{Error, Result};
pub use matrix::{cm_mul, neumann_update_inverse, norm_op2, norm_paper, real_rep, CliffordMatrix, RealRep};
