//! Clifford algebra Cl(0,n) with complex coefficients and an optional Witt pair.

mod blade;
mod json;
mod multivector;

pub use blade::{blade_product, BladeIndex, BladeProduct, WittWord, MAX_GENERATORS};
pub use multivector::{Algebra, Involution, Multivector};
pub(crate) use multivector::{multiplication_entries, ProductTable};
