use std::fmt;

use serde::{Deserialize, Serialize};

/// A basis vector: the `slot`-th vector of the homogeneous component of
/// degree `degree`. Ordering is lexicographic on `(degree, slot)`.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct BasisIndex {
    pub degree: i32,
    pub slot: u8,
}

impl BasisIndex {
    pub const fn new(degree: i32, slot: u8) -> Self {
        Self { degree, slot }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.degree, self.slot)
    }
}

/// `e_d`: slot 0 of degree `d`. In every built-in extension the embedded
/// copy of the base algebra occupies slot 0.
pub const fn e(degree: i32) -> BasisIndex {
    BasisIndex::new(degree, 0)
}

/// `x_d` of the extended algebras `m0ext` (d ≥ 1) and `m2ext` (d ≥ 2).
pub const fn x(degree: i32) -> BasisIndex {
    BasisIndex::new(degree, 1)
}

/// `x01` of `m0ext`.
pub const X01: BasisIndex = BasisIndex::new(0, 0);
/// `x02` of `m0ext`.
pub const X02: BasisIndex = BasisIndex::new(0, 1);
/// `x0` of `m2ext`.
pub const X0: BasisIndex = BasisIndex::new(0, 0);
/// `e0` of `l1ext`.
pub const E0: BasisIndex = BasisIndex::new(0, 0);
