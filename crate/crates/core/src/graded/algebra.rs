use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{BasisIndex, Element};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How basis vectors are printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// `e_d`, with `e_d.s` for higher slots.
    Plain,
    /// `x01`, `x02` in degree 0, `e_d`/`x_d` above.
    M0Ext,
    /// `x0` in degree 0, `e_d`/`x_d` above.
    M2Ext,
}

/// A non-negatively graded Lie algebra truncated at `horizon`, given by
/// sparse structure constants on ordered pairs of basis vectors.
///
/// Only the pair `(a, b)` with `a < b` is stored; `[b, a] = -[a, b]` and
/// `[a, a] = 0` are implied. Brackets whose degree would exceed the horizon
/// are an error, never silently zero.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    name: String,
    horizon: i32,
    dims: Vec<u8>,
    table: HashMap<(BasisIndex, BasisIndex), Element>,
    naming: Naming,
}

impl AlgebraSpec {
    /// An abelian algebra with the given component dimensions. Degrees not
    /// listed are empty; listed degrees must lie in `0..=horizon`.
    pub fn new(
        name: impl Into<String>,
        horizon: i32,
        dims: impl IntoIterator<Item = (i32, u8)>,
    ) -> Result<Self> {
        if horizon < 0 {
            return Err(Error::HorizonTooSmall {
                horizon,
                required: 0,
            });
        }
        let mut table_dims = vec![0u8; horizon as usize + 1];
        for (degree, count) in dims {
            if degree < 0 || degree > horizon {
                return Err(Error::Precondition(format!(
                    "component degree {degree} outside 0..={horizon}"
                )));
            }
            table_dims[degree as usize] = count;
        }
        Ok(Self {
            name: name.into(),
            horizon,
            dims: table_dims,
            table: HashMap::new(),
            naming: Naming::Plain,
        })
    }

    pub(crate) fn with_naming(mut self, naming: Naming) -> Self {
        self.naming = naming;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> i32 {
        self.horizon
    }

    pub fn naming(&self) -> Naming {
        self.naming
    }

    pub fn dim(&self, degree: i32) -> usize {
        if degree < 0 || degree > self.horizon {
            0
        } else {
            self.dims[degree as usize] as usize
        }
    }

    pub fn contains(&self, index: BasisIndex) -> bool {
        (index.slot as usize) < self.dim(index.degree)
    }

    fn check(&self, index: BasisIndex) -> Result<()> {
        if self.contains(index) {
            Ok(())
        } else {
            Err(Error::NoSuchBasis(index))
        }
    }

    /// Basis vectors of a single degree.
    pub fn component(&self, degree: i32) -> impl Iterator<Item = BasisIndex> {
        (0..self.dim(degree) as u8).map(move |slot| BasisIndex::new(degree, slot))
    }

    /// All basis vectors with degree in `lo..=hi`, in index order.
    pub fn basis_in(&self, lo: i32, hi: i32) -> Vec<BasisIndex> {
        (lo.max(0)..=hi.min(self.horizon))
            .flat_map(|d| self.component(d))
            .collect()
    }

    pub fn basis(&self) -> Vec<BasisIndex> {
        self.basis_in(0, self.horizon)
    }

    pub fn min_degree(&self) -> Option<i32> {
        (0..=self.horizon).find(|&d| self.dim(d) > 0)
    }

    /// Sets `[a, b] = value`. Either orientation may be given; a second
    /// entry for the same unordered pair is rejected.
    pub fn set_bracket(&mut self, a: BasisIndex, b: BasisIndex, value: Element) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            if value.is_zero() {
                return Ok(());
            }
            return Err(Error::ConflictingBracket {
                a,
                b,
                reason: "the bracket of a vector with itself must vanish".into(),
            });
        }
        let expected = a.degree + b.degree;
        if expected > self.horizon {
            return Err(Error::HorizonExceeded {
                a,
                b,
                degree: expected,
                horizon: self.horizon,
            });
        }
        for target in value.support() {
            if target.degree != expected {
                return Err(Error::GradingViolation {
                    a,
                    b,
                    target,
                    got: target.degree,
                    expected,
                });
            }
            self.check(target)?;
        }
        let (key, value) = if a < b { ((a, b), value) } else { ((b, a), -value) };
        if self.table.contains_key(&key) {
            return Err(Error::ConflictingBracket {
                a,
                b,
                reason: "pair already defined".into(),
            });
        }
        if !value.is_zero() {
            self.table.insert(key, value);
        }
        Ok(())
    }

    /// `out += coeff * [a, b]`.
    pub fn accumulate_bracket(
        &self,
        a: BasisIndex,
        b: BasisIndex,
        coeff: &Scalar,
        out: &mut Element,
    ) -> Result<()> {
        if a == b {
            return Ok(());
        }
        let degree = a.degree + b.degree;
        if degree > self.horizon {
            return Err(Error::HorizonExceeded {
                a,
                b,
                degree,
                horizon: self.horizon,
            });
        }
        if coeff.is_zero() {
            return Ok(());
        }
        if a < b {
            if let Some(v) = self.table.get(&(a, b)) {
                out.add_scaled(coeff, v);
            }
        } else if let Some(v) = self.table.get(&(b, a)) {
            out.add_scaled(&-coeff, v);
        }
        Ok(())
    }

    /// `[a, b]` on basis vectors.
    pub fn bracket_basis(&self, a: BasisIndex, b: BasisIndex) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let mut out = Element::zero();
        self.accumulate_bracket(a, b, &Scalar::one(), &mut out)?;
        Ok(out)
    }

    /// The bilinear extension of the table.
    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (a, ca) in x.iter() {
            self.check(*a)?;
            for (b, cb) in y.iter() {
                self.check(*b)?;
                self.accumulate_bracket(*a, *b, &(ca * cb), &mut out)?;
            }
        }
        Ok(out)
    }

    /// The same algebra cut down to degrees `<= horizon`.
    pub fn truncated(&self, horizon: i32) -> AlgebraSpec {
        let horizon = horizon.min(self.horizon);
        AlgebraSpec {
            name: self.name.clone(),
            horizon,
            dims: self.dims[..=horizon.max(0) as usize].to_vec(),
            table: self
                .table
                .iter()
                .filter(|((a, b), _)| a.degree + b.degree <= horizon)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            naming: self.naming,
        }
    }

    /// Stored entries `(a, b, [a, b])` with `a < b`, sorted.
    pub fn table_entries(&self) -> Vec<(BasisIndex, BasisIndex, &Element)> {
        let mut out: Vec<_> = self.table.iter().map(|((a, b), v)| (*a, *b, v)).collect();
        out.sort_by_key(|(a, b, _)| (*a, *b));
        out
    }

    /// Nonzero component dimensions as `(degree, count)`.
    pub fn dims(&self) -> Vec<(i32, u8)> {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(d, c)| (d as i32, *c))
            .collect()
    }

    /// Structural equality: same horizon, components and table.
    pub fn same_structure(&self, other: &AlgebraSpec) -> bool {
        self.horizon == other.horizon && self.dims == other.dims && self.table == other.table
    }

    pub fn label(&self, index: BasisIndex) -> String {
        let BasisIndex { degree, slot } = index;
        match (self.naming, degree, slot) {
            (Naming::M0Ext, 0, 0) => "x01".into(),
            (Naming::M0Ext, 0, 1) => "x02".into(),
            (Naming::M2Ext, 0, 0) => "x0".into(),
            (Naming::M0Ext | Naming::M2Ext, d, 1) => format!("x{d}"),
            (_, d, 0) => format!("e{d}"),
            (_, d, s) => format!("e{d}.{s}"),
        }
    }

    pub fn render(&self, x: &Element) -> String {
        x.render(|i| self.label(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::e;
    use crate::scalar::int;

    fn tiny() -> AlgebraSpec {
        let mut spec = AlgebraSpec::new("tiny", 6, (1..=6).map(|d| (d, 1))).unwrap();
        spec.set_bracket(e(1), e(2), Element::basis(e(3))).unwrap();
        spec
    }

    #[test]
    fn skew_completion() {
        let spec = tiny();
        assert_eq!(spec.bracket_basis(e(2), e(1)).unwrap(), -Element::basis(e(3)));
        assert!(spec.bracket_basis(e(2), e(2)).unwrap().is_zero());
    }

    #[test]
    fn horizon_is_enforced() {
        let spec = tiny();
        assert!(matches!(
            spec.bracket_basis(e(3), e(4)),
            Err(Error::HorizonExceeded { degree: 7, .. })
        ));
    }

    #[test]
    fn duplicate_and_grading_rejected() {
        let mut spec = tiny();
        assert!(matches!(
            spec.set_bracket(e(2), e(1), Element::basis(e(3))),
            Err(Error::ConflictingBracket { .. })
        ));
        assert!(matches!(
            spec.set_bracket(e(1), e(3), Element::term(e(5), int(1))),
            Err(Error::GradingViolation { .. })
        ));
        assert!(matches!(
            spec.set_bracket(e(1), BasisIndex::new(3, 1), Element::zero()),
            Err(Error::NoSuchBasis(_))
        ));
    }

    #[test]
    fn truncation_drops_high_entries() {
        let spec = tiny().truncated(2);
        assert_eq!(spec.horizon(), 2);
        assert!(spec.table_entries().is_empty());
    }
}
