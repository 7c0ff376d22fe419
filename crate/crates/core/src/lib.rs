//! Exact construction and verification of Lie algebra realizations by vector fields.

pub mod algdef;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod liealg;
pub mod linalg;
pub mod matrix;
pub mod regular;
pub mod scalar;
pub mod transitive;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{Expr, RatExpr, Style};
pub use liealg::{AutMatrix, StructureConstants, SubalgebraFamily};
pub use matrix::Matrix;
pub use scalar::{Rational, Scalar};
pub use transitive::{Backend, Realization, VectorField};
