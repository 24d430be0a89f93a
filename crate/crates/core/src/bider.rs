//! Skew biderivations: solver, closed forms, inner forms and the map `φ_f`
//! into the extension.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::der::{nullspace_of, realize_in_extension};
use crate::error::{Error, Result};
use crate::graded::{e, AlgebraSpec, BasisIndex, Builtin, Element};
use crate::linalg::{self, Vector};
use crate::maps::{BilinearForm, FormUnknowns, GradedMap, LinearElement};
use crate::report::{ReportBasis, SolveKind, SolveReport};
use crate::scalar::{int, one, Scalar};

/// Largest pair-degree sum carried by a weight-`k` form at the spec's horizon.
pub fn pair_limit(spec: &AlgebraSpec, k: i32) -> i32 {
    spec.horizon() - k.max(0)
}

fn pair_window(spec: &AlgebraSpec, k: i32) -> (i32, i32) {
    let basis = spec.basis();
    let lo = match (basis.first(), basis.get(1)) {
        (Some(a), Some(b)) => a.degree + b.degree,
        _ => 0,
    };
    (lo, pair_limit(spec, k))
}

/// Triples `(x; y, z)`, `y < z`, with `deg x + deg y + deg z <= limit`.
fn triples(spec: &AlgebraSpec, limit: i32) -> Vec<(BasisIndex, BasisIndex, BasisIndex)> {
    let basis = spec.basis();
    let mut out = Vec::new();
    for &x in &basis {
        for (i, &y) in basis.iter().enumerate() {
            for &z in &basis[i + 1..] {
                if x.degree + y.degree + z.degree > limit {
                    break;
                }
                out.push((x, y, z));
            }
        }
    }
    out
}

/// `f(x,[y,z]) - [f(x,y),z] - [y,f(x,z)]`
fn left_row(spec: &AlgebraSpec, u: &FormUnknowns, x: BasisIndex, y: BasisIndex, z: BasisIndex) -> Result<LinearElement> {
    let mut out = LinearElement::default();
    for (t, c) in spec.bracket_basis(y, z)?.iter() {
        u.add_value(&mut out, c, x, *t);
    }
    let mut fxy = LinearElement::default();
    u.add_value(&mut fxy, &one(), x, y);
    out.add_bracket_right(spec, &-one(), &fxy, z)?;
    let mut fxz = LinearElement::default();
    u.add_value(&mut fxz, &one(), x, z);
    out.add_bracket_right(spec, &one(), &fxz, y)?;
    Ok(out)
}

/// `f([y,z],x) - [y,f(z,x)] - [f(y,x),z]`
fn right_row(spec: &AlgebraSpec, u: &FormUnknowns, x: BasisIndex, y: BasisIndex, z: BasisIndex) -> Result<LinearElement> {
    let mut out = LinearElement::default();
    for (t, c) in spec.bracket_basis(y, z)?.iter() {
        u.add_value(&mut out, c, *t, x);
    }
    let mut fzx = LinearElement::default();
    u.add_value(&mut fzx, &one(), z, x);
    out.add_bracket_right(spec, &one(), &fzx, y)?;
    let mut fyx = LinearElement::default();
    u.add_value(&mut fyx, &one(), y, x);
    out.add_bracket_right(spec, &-one(), &fyx, z)?;
    Ok(out)
}

fn solve(spec: &AlgebraSpec, k: i32, with_right: bool) -> Result<SolveReport> {
    let required = 6 + k.abs();
    if spec.horizon() < required {
        return Err(Error::HorizonTooSmall {
            horizon: spec.horizon(),
            required,
        });
    }
    let window = pair_window(spec, k);
    let u = FormUnknowns::new(spec, k, window.1);
    let mut rows = Vec::new();
    for (x, y, z) in triples(spec, window.1) {
        rows.extend(left_row(spec, &u, x, y, z)?.into_rows());
        if with_right {
            rows.extend(right_row(spec, &u, x, y, z)?.into_rows());
        }
    }
    let null = nullspace_of(u.len(), rows);
    let basis: Vec<BilinearForm> = null.iter().map(|v| u.to_form(v)).collect();
    Ok(SolveReport {
        algebra: spec.name().to_string(),
        kind: SolveKind::Biderivation,
        weight: k,
        horizon: spec.horizon(),
        window,
        dimension: basis.len(),
        basis: ReportBasis::Forms(basis),
        closed_form_match: None,
        stability: None,
    })
}

/// `BDer_k` of the truncation from left-Leibniz constraints only (skewness
/// makes the right-hand ones redundant).
pub fn biderivation_space(spec: &AlgebraSpec, k: i32) -> Result<SolveReport> {
    solve(spec, k, false)
}

/// Same as [`biderivation_space`] with the right-Leibniz constraints
/// assembled as well.
pub fn biderivation_space_full(spec: &AlgebraSpec, k: i32) -> Result<SolveReport> {
    solve(spec, k, true)
}

/// The known spanning forms of `BDer_k` for the base algebras, on the pair
/// window at horizon `n`.
pub fn closed_form_biderivations(b: Builtin, k: i32, n: i32) -> Result<Vec<BilinearForm>> {
    if !b.is_base() {
        return Err(Error::UnknownAlgebra(format!("{b} has no closed form here")));
    }
    let hi = n - k.max(0);
    let mut f = BilinearForm::zero(k, hi);
    let mut put = |a: i32, b: i32, c: i64| {
        if a + b <= hi {
            f.set(e(a), e(b), Element::term(e(a + b + k), int(c))).expect("homogeneous");
        }
    };
    match b {
        Builtin::M0 if k >= -1 => (2..hi).for_each(|i| put(1, i, 1)),
        Builtin::L1 if k == 0 => {
            for i in 1..hi {
                for j in i + 1..=hi - i {
                    put(i, j, (j - i) as i64);
                }
            }
        }
        Builtin::M2 if k >= 0 => {
            (2..hi).for_each(|i| put(1, i, 1));
            (3..hi).for_each(|i| put(2, i, 1));
        }
        _ => {}
    }
    Ok(if f.is_zero() { vec![] } else { vec![f] })
}

fn form_coords(spec: &AlgebraSpec, report: &SolveReport, forms: &[BilinearForm]) -> Vec<Vector> {
    let u = FormUnknowns::new(spec, report.weight, report.window.1);
    forms.iter().map(|f| u.project(f)).collect()
}

/// Whether a biderivation report spans the closed forms on its window.
pub fn matches_closed_form(spec: &AlgebraSpec, report: &SolveReport, b: Builtin) -> Result<bool> {
    let closed = closed_form_biderivations(b, report.weight, report.horizon)?;
    let closed = form_coords(spec, report, &closed);
    let computed = form_coords(spec, report, report.basis.forms());
    Ok(computed.len() == closed.len() && linalg::subspace_equal(&computed, &closed)?)
}

/// Whether the report spans the same space as the given forms.
pub fn spans_same(spec: &AlgebraSpec, report: &SolveReport, forms: &[BilinearForm]) -> Result<bool> {
    let a = form_coords(spec, report, report.basis.forms());
    let b = form_coords(spec, report, forms);
    Ok(a.len() == b.len() && linalg::subspace_equal(&a, &b)?)
}

/// Whether every form lies in the span of the report, compared on the pairs
/// both sides carry.
pub fn span_contains(spec: &AlgebraSpec, report: &SolveReport, forms: &[BilinearForm]) -> Result<bool> {
    let max = forms
        .iter()
        .map(BilinearForm::max_pair_degree)
        .fold(report.window.1, i32::min);
    let u = FormUnknowns::new(spec, report.weight, max);
    let a: Vec<Vector> = report.basis.forms().iter().map(|f| u.project(f)).collect();
    let b: Vec<Vector> = forms.iter().map(|f| u.project(f)).collect();
    linalg::subspace_contains(&a, &b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiderCheck {
    Pass,
    /// The identity fails on `(x; y, z)`: `f(x,[y,z]) - [f(x,y),z] - [y,f(x,z)]`
    /// for [`Side::Left`], the mirrored identity for [`Side::Right`].
    Fail {
        side: Side,
        triple: (BasisIndex, BasisIndex, BasisIndex),
        defect: Element,
    },
}

impl BiderCheck {
    pub fn passed(&self) -> bool {
        matches!(self, BiderCheck::Pass)
    }
}

/// Checks both Leibniz identities on every triple whose values stay inside
/// the form's pair window and the horizon.
pub fn is_biderivation(spec: &AlgebraSpec, f: &BilinearForm) -> Result<BiderCheck> {
    let limit = f.max_pair_degree().min(spec.horizon() - f.weight());
    for (x, y, z) in triples(spec, limit) {
        let (xe, ye, ze) = (Element::basis(x), Element::basis(y), Element::basis(z));
        let yz = spec.bracket_basis(y, z)?;
        let left = f.eval(&xe, &yz)?
            - spec.bracket(&f.eval_basis(x, y)?, &ze)?
            - spec.bracket(&ye, &f.eval_basis(x, z)?)?;
        if !left.is_zero() {
            return Ok(BiderCheck::Fail {
                side: Side::Left,
                triple: (x, y, z),
                defect: left,
            });
        }
        let right = f.eval(&yz, &xe)?
            - spec.bracket(&ye, &f.eval_basis(z, x)?)?
            - spec.bracket(&f.eval_basis(y, x)?, &ze)?;
        if !right.is_zero() {
            return Ok(BiderCheck::Fail {
                side: Side::Right,
                triple: (x, y, z),
                defect: right,
            });
        }
    }
    Ok(BiderCheck::Pass)
}

/// `λ[x, y]` on the whole truncation.
pub fn inner_biderivation(spec: &AlgebraSpec, lambda: &Scalar) -> BilinearForm {
    let mut f = BilinearForm::zero(0, spec.horizon());
    if lambda.is_zero() {
        return f;
    }
    for (a, b, v) in spec.table_entries() {
        f.set(a, b, v.scaled(lambda)).expect("graded table");
    }
    f
}

/// `L_{f,x} : y ↦ f(x, y)` for homogeneous `x`, on the source degrees where
/// it is defined.
pub fn curry_left(spec: &AlgebraSpec, f: &BilinearForm, x: &Element) -> Result<GradedMap> {
    let d = x.degree()?.unwrap_or(0);
    let lo = spec.min_degree().unwrap_or(1);
    let window = (lo, f.max_pair_degree() - d);
    let mut m = GradedMap::zero(f.weight() + d, window);
    if x.is_zero() {
        return Ok(m);
    }
    for y in spec.basis_in(window.0, window.1) {
        m.set(y, f.eval(x, &Element::basis(y))?)?;
    }
    Ok(m)
}

/// `φ_f` on base basis vectors together with its uniqueness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiOfF {
    pub images: BTreeMap<BasisIndex, Element>,
    pub unique: bool,
}

/// Solves `ad(φ_f(x)) = L_{f,x}` in `ext` for each basis `x` of degree at
/// most `max_pair_degree - 2`, then checks `f(x,y) = [φ_f(x),y] = -[φ_f(y),x]`
/// on every pair of such vectors.
pub fn phi_of_f(base: &AlgebraSpec, ext: &AlgebraSpec, f: &BilinearForm) -> Result<PhiOfF> {
    let lo = base.min_degree().unwrap_or(1);
    let hi = f.max_pair_degree() - 2;
    let mut images = BTreeMap::new();
    let mut unique = true;
    for x in base.basis_in(lo, hi) {
        let l = curry_left(base, f, &Element::basis(x))?;
        let r = realize_in_extension(base, ext, &l)?;
        unique &= r.unique;
        images.insert(x, r.element);
    }
    for (&a, pa) in &images {
        for (&b, pb) in &images {
            if a >= b || a.degree + b.degree > f.max_pair_degree() {
                continue;
            }
            let fab = f.eval_basis(a, b)?;
            let left = ext.bracket(pa, &Element::basis(b))?;
            let right = -ext.bracket(pb, &Element::basis(a))?;
            if fab != left || fab != right {
                return Err(Error::Unrealizable(format!(
                    "φ_f fails to reproduce f({a}, {b})"
                )));
            }
        }
    }
    Ok(PhiOfF { images, unique })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::der::is_derivation;
    use crate::der::ad;
    use crate::graded::{builtin_algebra, x, X02};
    use crate::scalar::int;

    fn spec(name: &str, n: i32) -> AlgebraSpec {
        builtin_algebra(name, n).unwrap()
    }

    fn check(name: &str, k: i32, n: i32, dim: usize) {
        let s = spec(name, n);
        let r = biderivation_space(&s, k).unwrap();
        assert_eq!(r.dimension, dim, "{name} k={k}");
        assert!(matches_closed_form(&s, &r, name.parse().unwrap()).unwrap(), "{name} k={k}");
    }

    #[test]
    fn examples() {
        check("m0", -1, 40, 1);
        check("m0", -2, 40, 0);
        check("l1", 0, 40, 1);
        check("m2", 1, 40, 1);
        check("l1", 3, 40, 0);
    }

    #[test]
    fn closed_forms() {
        let f = &closed_form_biderivations(Builtin::M0, 4, 20).unwrap()[0];
        assert_eq!(f.eval_basis(e(1), e(2)).unwrap(), Element::basis(e(7)));
        assert_eq!(f.entries().count(), 14);
        let f = &closed_form_biderivations(Builtin::M2, 0, 20).unwrap()[0];
        assert_eq!(f.eval_basis(e(2), e(3)).unwrap(), Element::basis(e(5)));
        assert!(closed_form_biderivations(Builtin::L1, 1, 20).unwrap().is_empty());
    }

    #[test]
    fn inner_forms() {
        let m2 = spec("m2", 16);
        assert!(is_biderivation(&m2, &inner_biderivation(&m2, &int(2))).unwrap().passed());
        assert!(inner_biderivation(&m2, &int(0)).is_zero());
        let l1 = spec("l1", 16);
        let f = inner_biderivation(&l1, &int(1));
        assert_eq!(f.eval_basis(e(2), e(5)).unwrap(), Element::term(e(7), int(3)));
        let m0 = spec("m0", 16);
        assert!(inner_biderivation(&m0, &int(1)).eval_basis(e(3), e(4)).unwrap().is_zero());
    }

    #[test]
    fn single_pair_form_fails() {
        let m0 = spec("m0", 16);
        let f = BilinearForm::elementary(e(2), e(3), e(5), 16).unwrap();
        match is_biderivation(&m0, &f).unwrap() {
            BiderCheck::Fail { triple, side, .. } => {
                assert_eq!(side, Side::Left);
                assert_eq!(triple, (e(2), e(1), e(2)));
            }
            BiderCheck::Pass => panic!(),
        }
        assert!(is_biderivation(&m0, &BilinearForm::zero(0, 16)).unwrap().passed());
    }

    #[test]
    fn right_constraints_are_redundant() {
        for name in ["m0", "l1", "m2"] {
            let s = spec(name, 16);
            for k in -3..=4 {
                let a = biderivation_space(&s, k).unwrap();
                let b = biderivation_space_full(&s, k).unwrap();
                assert_eq!(a.basis, b.basis, "{name} k={k}");
            }
        }
    }

    #[test]
    fn currying() {
        let m0 = spec("m0", 20);
        let f = inner_biderivation(&m0, &int(1));
        let l = curry_left(&m0, &f, &Element::basis(e(1))).unwrap();
        let a = ad(&m0, &Element::basis(e(1))).unwrap();
        assert_eq!(l.entries().collect::<Vec<_>>(), a.entries().collect::<Vec<_>>());
        let g = &closed_form_biderivations(Builtin::M0, -1, 20).unwrap()[0];
        let l = curry_left(&m0, g, &Element::basis(e(1))).unwrap();
        for (s, v) in l.entries() {
            assert_eq!(*v, Element::basis(*s));
        }
        assert_eq!(l.entries().count(), 18);
        assert!(is_derivation(&m0, &l).unwrap().passed());
        assert!(curry_left(&m0, g, &Element::zero()).unwrap().is_zero());
    }

    #[test]
    fn phi_examples() {
        let m0 = spec("m0", 20);
        let ext = spec("m0ext", 20);
        let f = &closed_form_biderivations(Builtin::M0, -1, 20).unwrap()[0];
        let phi = phi_of_f(&m0, &ext, f).unwrap();
        assert!(phi.unique);
        assert_eq!(phi.images[&e(1)], Element::basis(X02));
        assert_eq!(phi.images[&e(2)], Element::basis(x(1)));
        for i in 3..=18 {
            assert_eq!(phi.images[&e(i)], Element::basis(e(i - 1)));
        }

        let l1 = spec("l1", 20);
        let ext = spec("l1ext", 20);
        let phi = phi_of_f(&l1, &ext, &inner_biderivation(&l1, &int(3))).unwrap();
        for (i, v) in &phi.images {
            assert_eq!(*v, Element::term(*i, int(3)));
        }
        let phi = phi_of_f(&l1, &ext, &BilinearForm::zero(0, 20)).unwrap();
        assert!(phi.unique && phi.images.values().all(Element::is_zero));
    }
}
