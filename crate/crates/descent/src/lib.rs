pub mod certificate;
pub mod curve_model;
pub mod error;
pub mod f2_linalg;
pub mod padic_unramified;
pub mod splitting_field;
pub mod square_classes;
pub mod theta_dr;
pub mod verdict;

pub use error::{DescentError, ErrorCategory, Result};

/// Bits below working precision tolerated in zero tests.
pub const SLACK_BITS: u32 = 32;
