use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{e, x, AlgebraSpec, BasisIndex, Element, Naming, X0, X01, X02};
use crate::error::{Error, Result};
use crate::scalar::{frac, int, Scalar};

/// The built-in algebras: the three base algebras and the extensions in
/// which their derivation algebras are realized as inner derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    M0,
    L1,
    M2,
    M0Ext,
    M2Ext,
    L1Ext,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::M0,
        Builtin::L1,
        Builtin::M2,
        Builtin::M0Ext,
        Builtin::M2Ext,
        Builtin::L1Ext,
    ];
    pub const BASE: [Builtin; 3] = [Builtin::M0, Builtin::L1, Builtin::M2];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::M0 => "m0",
            Builtin::L1 => "l1",
            Builtin::M2 => "m2",
            Builtin::M0Ext => "m0ext",
            Builtin::M2Ext => "m2ext",
            Builtin::L1Ext => "l1ext",
        }
    }

    pub fn is_base(self) -> bool {
        matches!(self, Builtin::M0 | Builtin::L1 | Builtin::M2)
    }

    /// The extension realizing the derivations of a base algebra.
    pub fn extension(self) -> Option<Builtin> {
        match self {
            Builtin::M0 => Some(Builtin::M0Ext),
            Builtin::L1 => Some(Builtin::L1Ext),
            Builtin::M2 => Some(Builtin::M2Ext),
            _ => None,
        }
    }

    pub fn base(self) -> Builtin {
        match self {
            Builtin::M0Ext => Builtin::M0,
            Builtin::L1Ext => Builtin::L1,
            Builtin::M2Ext => Builtin::M2,
            b => b,
        }
    }

    pub fn spec(self, horizon: i32) -> Result<AlgebraSpec> {
        if horizon < 4 {
            return Err(Error::HorizonTooSmall {
                horizon,
                required: 4,
            });
        }
        match self {
            Builtin::M0 => m0(horizon),
            Builtin::L1 => l1(horizon),
            Builtin::M2 => m2(horizon),
            Builtin::M0Ext => m0ext(horizon),
            Builtin::M2Ext => m2ext(horizon),
            Builtin::L1Ext => l1ext(horizon),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownAlgebra(s.to_string()))
    }
}

pub fn builtin_algebra(name: &str, horizon: i32) -> Result<AlgebraSpec> {
    name.parse::<Builtin>()?.spec(horizon)
}

/// Collects table entries, skipping anything past the horizon. Listed
/// brackets may overlap (the m2 extension states `[x2, e_j]` twice); a
/// repeat must agree with the first entry.
struct Table {
    horizon: i32,
    entries: BTreeMap<(BasisIndex, BasisIndex), Element>,
}

impl Table {
    fn new(horizon: i32) -> Self {
        Self {
            horizon,
            entries: BTreeMap::new(),
        }
    }

    fn put(&mut self, a: BasisIndex, b: BasisIndex, target: BasisIndex, coeff: Scalar) {
        if a.degree + b.degree > self.horizon {
            return;
        }
        let value = Element::term(target, coeff);
        let (key, value) = if a < b { ((a, b), value) } else { ((b, a), -value) };
        match self.entries.get(&key) {
            Some(existing) => assert_eq!(existing, &value, "inconsistent built-in table"),
            None => {
                self.entries.insert(key, value);
            }
        }
    }

    fn build(self, spec: &mut AlgebraSpec) -> Result<()> {
        for ((a, b), v) in self.entries {
            spec.set_bracket(a, b, v)?;
        }
        Ok(())
    }
}

fn ones(lo: i32, hi: i32) -> impl Iterator<Item = (i32, u8)> {
    (lo..=hi).map(|d| (d, 1))
}

fn m0(n: i32) -> Result<AlgebraSpec> {
    let mut spec = AlgebraSpec::new("m0", n, ones(1, n))?;
    let mut t = Table::new(n);
    for i in 2..n {
        t.put(e(1), e(i), e(i + 1), int(1));
    }
    t.build(&mut spec)?;
    Ok(spec)
}

fn witt(name: &str, n: i32, from: i32) -> Result<AlgebraSpec> {
    let mut spec = AlgebraSpec::new(name, n, ones(from, n))?;
    let mut t = Table::new(n);
    for i in from..=n {
        for j in (i + 1)..=(n - i) {
            t.put(e(i), e(j), e(i + j), int((j - i) as i64));
        }
    }
    t.build(&mut spec)?;
    Ok(spec)
}

fn l1(n: i32) -> Result<AlgebraSpec> {
    witt("l1", n, 1)
}

fn l1ext(n: i32) -> Result<AlgebraSpec> {
    witt("l1ext", n, 0)
}

fn m2(n: i32) -> Result<AlgebraSpec> {
    let mut spec = AlgebraSpec::new("m2", n, ones(1, n))?;
    let mut t = Table::new(n);
    for i in 2..n {
        t.put(e(1), e(i), e(i + 1), int(1));
    }
    for j in 3..n {
        t.put(e(2), e(j), e(j + 2), int(1));
    }
    t.build(&mut spec)?;
    Ok(spec)
}

fn m0ext(n: i32) -> Result<AlgebraSpec> {
    let mut spec = AlgebraSpec::new("m0ext", n, (0..=n).map(|d| (d, 2)))?.with_naming(Naming::M0Ext);
    let mut t = Table::new(n);
    t.put(X01, x(1), x(1), int(-1));
    t.put(X02, x(1), x(1), int(1));
    t.put(X01, e(1), e(1), int(1));
    t.put(x(1), e(1), e(2), int(-1));
    for k in 2..=n {
        t.put(e(1), e(k), e(k + 1), int(1));
        t.put(X01, x(k), x(k), int(k as i64));
        t.put(x(1), x(k), e(k + 1), int(-1));
        t.put(X01, e(k), e(k), int((k - 2) as i64));
        t.put(X02, e(k), e(k), int(1));
        for i in 2..=n {
            t.put(x(k), e(i), e(i + k), int(1));
        }
    }
    t.build(&mut spec)?;
    Ok(spec)
}

fn m2ext(n: i32) -> Result<AlgebraSpec> {
    let dims = [(0, 1), (1, 1)].into_iter().chain((2..=n).map(|d| (d, 2)));
    let mut spec = AlgebraSpec::new("m2ext", n, dims)?.with_naming(Naming::M2Ext);
    let mut t = Table::new(n);
    let half = frac(1, 2);
    for i in 2..=n {
        t.put(e(1), e(i), e(i + 1), int(1));
        t.put(X0, x(i), x(i), int(i as i64));
        t.put(X0, e(i - 1), e(i - 1), int((i - 1) as i64));
        t.put(x(2), e(i), e(i + 2), int(1));
    }
    t.put(X0, e(n), e(n), int(n as i64));
    for j in 3..=n {
        t.put(e(2), e(j), e(j + 2), int(1));
        t.put(x(2), x(j), e(j + 2), half.clone());
        t.put(x(j), e(1), e(j + 1), -half.clone());
        t.put(x(j), e(2), e(j + 2), half.clone());
    }
    for i in 2..=n {
        for j in 3..=n {
            t.put(x(i), e(j), e(i + j), int(1));
        }
    }
    t.build(&mut spec)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_examples() {
        let m0 = builtin_algebra("m0", 10).unwrap();
        assert_eq!(m0.bracket_basis(e(1), e(4)).unwrap(), Element::basis(e(5)));
        let l1 = builtin_algebra("l1", 10).unwrap();
        assert_eq!(l1.bracket_basis(e(2), e(5)).unwrap(), Element::term(e(7), int(3)));
        let m2 = builtin_algebra("m2", 10).unwrap();
        assert!(m2.bracket_basis(e(3), e(4)).unwrap().is_zero());
        let m0ext = builtin_algebra("m0ext", 10).unwrap();
        assert_eq!(m0ext.bracket_basis(X01, e(5)).unwrap(), Element::term(e(5), int(3)));
        let m2ext = builtin_algebra("m2ext", 10).unwrap();
        assert_eq!(m2ext.bracket_basis(x(2), x(5)).unwrap(), Element::term(e(7), frac(1, 2)));
    }

    #[test]
    fn m0_bracket_of_sum() {
        let m0 = builtin_algebra("m0", 10).unwrap();
        let lhs = Element::sum_of([e(1), e(2)]);
        assert_eq!(m0.bracket(&lhs, &e(3).into()).unwrap(), Element::basis(e(4)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(builtin_algebra("m7", 10), Err(Error::UnknownAlgebra(_))));
        assert!(matches!(builtin_algebra("m0", 3), Err(Error::HorizonTooSmall { .. })));
    }

    #[test]
    fn component_dimensions() {
        let m0ext = Builtin::M0Ext.spec(8).unwrap();
        assert_eq!((m0ext.dim(0), m0ext.dim(1), m0ext.dim(5)), (2, 2, 2));
        let m2ext = Builtin::M2Ext.spec(8).unwrap();
        assert_eq!((m2ext.dim(0), m2ext.dim(1), m2ext.dim(2)), (1, 1, 2));
        let l1ext = Builtin::L1Ext.spec(8).unwrap();
        assert_eq!((l1ext.dim(0), l1ext.dim(8)), (1, 1));
        assert_eq!(m2ext.label(x(4)), "x4");
        assert_eq!(m0ext.label(X02), "x02");
    }
}
