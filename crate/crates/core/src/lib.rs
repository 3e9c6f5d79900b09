//! Clifford operator calculus on rectangular grids: Dirac factorizations,
//! Teodorescu and Cauchy integral operators, a fixed-point Miura solver and
//! the stationary Gross-Pitaevskii reduction.

pub mod clifford;
pub mod diff;
pub mod error;
pub mod field;
pub mod gp;
pub mod grid;
pub mod integral;
pub mod linsolve;
pub mod miura;
pub mod study;

pub use clifford::{Algebra, BladeIndex, Involution, Multivector, WittWord};
pub use error::{Error, Result};
pub use field::CliffordField;
pub use grid::{build_grid, BoundaryFace, GridSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
