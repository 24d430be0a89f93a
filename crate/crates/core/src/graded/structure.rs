use std::collections::BTreeMap;

use super::{AlgebraSpec, BasisIndex, Element};
use crate::error::Result;
use crate::linalg::{Echelon, SparseVec};

#[derive(Clone, Debug, PartialEq)]
pub enum JacobiReport {
    Pass {
        triples: usize,
    },
    Fail {
        triple: (BasisIndex, BasisIndex, BasisIndex),
        defect: Element,
    },
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        matches!(self, JacobiReport::Pass { .. })
    }
}

/// Checks `[[a,b],c] + [[b,c],a] + [[c,a],b] = 0` on every triple of
/// distinct basis vectors `a < b < c` whose degrees sum to at most the
/// horizon, stopping at the first failure.
pub fn jacobi_check(spec: &AlgebraSpec) -> JacobiReport {
    let n = spec.horizon();
    let basis = spec.basis();
    let mut triples = 0;
    for (i, &a) in basis.iter().enumerate() {
        for (j, &b) in basis.iter().enumerate().skip(i + 1) {
            if a.degree + b.degree > n {
                break;
            }
            let ab = spec.bracket_basis(a, b).expect("in horizon");
            for &c in &basis[j + 1..] {
                if a.degree + b.degree + c.degree > n {
                    break;
                }
                triples += 1;
                let defect = jacobi_sum(spec, a, b, c, &ab).expect("in horizon");
                if !defect.is_zero() {
                    return JacobiReport::Fail {
                        triple: (a, b, c),
                        defect,
                    };
                }
            }
        }
    }
    JacobiReport::Pass { triples }
}

fn jacobi_sum(
    spec: &AlgebraSpec,
    a: BasisIndex,
    b: BasisIndex,
    c: BasisIndex,
    ab: &Element,
) -> Result<Element> {
    let mut sum = spec.bracket(ab, &c.into())?;
    sum = &sum + &spec.bracket(&spec.bracket_basis(b, c)?, &a.into())?;
    sum = &sum + &spec.bracket(&spec.bracket_basis(c, a)?, &b.into())?;
    Ok(sum)
}

/// A subspace computed on a degree window, with a reduced echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceReport {
    pub basis: Vec<Element>,
    /// Inclusive degree range on which the computation is reliable.
    pub window: (i32, i32),
    pub dimension: usize,
}

/// Elements `x` of `spec` supported on `window` with `[x, b] = 0` for every
/// `b` selected by `against` (brackets inside the horizon only).
fn commutant(
    spec: &AlgebraSpec,
    window: (i32, i32),
    against: impl Fn(BasisIndex) -> bool,
) -> SubspaceReport {
    let unknowns = spec.basis_in(window.0, window.1);
    let targets: Vec<BasisIndex> = spec.basis().into_iter().filter(|b| against(*b)).collect();
    let mut rows: BTreeMap<(BasisIndex, BasisIndex), SparseVec> = BTreeMap::new();
    for (col, &u) in unknowns.iter().enumerate() {
        for &b in &targets {
            if u.degree + b.degree > spec.horizon() {
                continue;
            }
            let value = spec.bracket_basis(u, b).expect("in horizon");
            for (t, c) in value.iter() {
                rows.entry((b, *t)).or_default().insert(col, c.clone());
            }
        }
    }
    let mut ech = Echelon::new(unknowns.len());
    for row in rows.into_values() {
        ech.insert(row);
    }
    let basis: Vec<Element> = ech
        .nullspace()
        .into_iter()
        .map(|v| Element::from_terms(v.into_iter().map(|(c, s)| (unknowns[c], s))))
        .collect();
    SubspaceReport {
        dimension: basis.len(),
        basis,
        window,
    }
}

/// The center, tested on degrees `d` with `d + 2 <= horizon` so that every
/// vector meets the degree-1 and degree-2 components inside the truncation.
pub fn center(spec: &AlgebraSpec) -> SubspaceReport {
    let lo = spec.min_degree().unwrap_or(0);
    commutant(spec, (lo, spec.horizon() - 2), |_| true)
}

/// `{x in ext : [x, g] = 0}` where `g` is spanned by the basis vectors
/// selected by `ideal`. Same window rule as [`center`].
pub fn annihilator(ext: &AlgebraSpec, ideal: impl Fn(BasisIndex) -> bool) -> SubspaceReport {
    let lo = ext.min_degree().unwrap_or(0);
    commutant(ext, (lo, ext.horizon() - 2), ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{builtin_algebra, e, Builtin};
    use crate::scalar::int;

    #[test]
    fn builtins_satisfy_jacobi() {
        for b in Builtin::ALL {
            let spec = b.spec(12).unwrap();
            assert!(jacobi_check(&spec).passed(), "{b}");
        }
    }

    #[test]
    fn corrupted_m2_fails_at_first_triple() {
        let m2 = builtin_algebra("m2", 12).unwrap();
        let mut broken = AlgebraSpec::new("broken", 12, (1..=12).map(|d| (d, 1))).unwrap();
        for (a, b, v) in m2.table_entries() {
            let v = if (a, b) == (e(2), e(3)) {
                Element::term(e(5), int(2))
            } else {
                v.clone()
            };
            broken.set_bracket(a, b, v).unwrap();
        }
        match jacobi_check(&broken) {
            JacobiReport::Fail { triple, defect } => {
                assert_eq!(triple, (e(1), e(2), e(3)));
                assert_eq!(defect, Element::term(e(6), int(-1)));
            }
            JacobiReport::Pass { .. } => panic!("corruption not detected"),
        }
    }

    #[test]
    fn centers_of_base_algebras() {
        for name in ["m0", "l1", "m2"] {
            let r = center(&builtin_algebra(name, 20).unwrap());
            assert_eq!(r.window, (1, 18));
            assert_eq!(r.dimension, 0, "{name}");
        }
    }

    #[test]
    fn abelian_center_is_everything() {
        let spec = AlgebraSpec::new("ab", 9, (1..=9).map(|d| (d, 1))).unwrap();
        let r = center(&spec);
        assert_eq!(r.dimension, 7);
    }

    #[test]
    fn extension_annihilators() {
        for name in ["m0ext", "m2ext", "l1ext"] {
            let ext = builtin_algebra(name, 16).unwrap();
            let r = annihilator(&ext, |i| i.degree >= 1 && i.slot == 0);
            assert_eq!(r.dimension, 0, "{name}");
        }
    }

    #[test]
    fn adjoined_central_generator_is_found() {
        let m0 = builtin_algebra("m0", 10).unwrap();
        let mut ext = AlgebraSpec::new("m0z", 10, [(0, 1)].into_iter().chain((1..=10).map(|d| (d, 1)))).unwrap();
        for (a, b, v) in m0.table_entries() {
            ext.set_bracket(a, b, v.clone()).unwrap();
        }
        let r = annihilator(&ext, |i| i.degree >= 1);
        assert_eq!(r.basis, vec![Element::basis(e(0))]);
    }
}
