//! Exact-arithmetic toolkit for the three ℕ-graded Lie algebras of maximal
//! class with one-dimensional homogeneous components: `m0`, `L1` (the positive
//! part of the Witt algebra) and `m2`.
//!
//! Every computation happens at a finite truncation (the *horizon*) over ℚ.
//! Derivation, biderivation, commuting-map and local-derivation spaces are
//! cut out as nullspaces of exact rational linear systems and compared against
//! the closed forms known for these algebras.

pub mod bider;
pub mod commuting;
pub mod der;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod local;
pub mod maps;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use graded::{
    builtin_algebra, parse_algebra_file, AlgebraSpec, BasisIndex, Builtin, Element,
};
pub use maps::{BilinearForm, GradedMap};
pub use report::{ReportBasis, SolveKind, SolveReport};
pub use scalar::Scalar;
