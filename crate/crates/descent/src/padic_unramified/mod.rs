//! Arithmetic in unramified extensions of Q₂ at tracked precision.

mod embed;
mod field;
mod kummer;
mod limbs;
pub mod poly;
pub mod residue;
mod squares;

pub use embed::SubfieldEmbedding;
pub use field::{limbs_for, newton_root, same_field, UnramifiedElement, UnramifiedField};
pub use kummer::{KummerAlgebra, KummerElement};
pub use poly::{hensel_quadratic_factors, lift_residue_roots, QuadraticFactor, QuadraticFactorization};
pub use residue::ResidueField;
pub use squares::{is_square, linear_unit, sqrt, square_class_data, unit_class, xi_unit, UnitClass};
