//! Graded bases, elements, algebra specifications and structural checks.

mod algebra;
mod basis;
mod builtin;
mod element;
mod parse;
mod structure;

pub use algebra::{AlgebraSpec, Naming};
pub use basis::{e, x, BasisIndex, E0, X0, X01, X02};
pub use builtin::{builtin_algebra, Builtin};
pub use element::Element;
pub use parse::{parse_algebra_file, write_algebra_file};
pub use structure::{annihilator, center, jacobi_check, JacobiReport, SubspaceReport};
