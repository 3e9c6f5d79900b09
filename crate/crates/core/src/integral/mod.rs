//! Teodorescu transform, boundary Cauchy operator and fundamental solutions.

mod cache;
pub mod cell;
mod kernels;
mod operators;

pub use cache::KernelCache;
pub use kernels::{cauchy_kernel, cauchy_kernel_components, parabolic_kernel, schrodinger_kernel, unit_sphere_area};
pub use operators::{
    borel_pompeiu_residual, cauchy_boundary_apply, cauchy_boundary_field, im_q_residual, right_inverse_residual,
    teodorescu_apply, BoundaryTrace, CORE_LAYER,
};
