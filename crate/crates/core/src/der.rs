//! Graded derivations: the exact solver, closed forms, a propagation oracle
//! and realization as inner derivations of an extension.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded::{e, AlgebraSpec, BasisIndex, Builtin, Element};
use crate::linalg::{self, Echelon, RatMatrix, SparseVec, Vector};
use crate::maps::{GradedMap, LinearElement, MapUnknowns};
use crate::report::{ReportBasis, SolveKind, SolveReport};
use crate::scalar::{frac, int, one, Scalar};

/// Source-degree window of a weight-`k` solve at horizon `N`:
/// `lowest degree ..= N - max(k, 0)`.
pub fn derivation_window(spec: &AlgebraSpec, k: i32) -> (i32, i32) {
    let lo = spec.min_degree().unwrap_or(1);
    (lo, spec.horizon() - k.max(0))
}

pub(crate) fn check_horizon(spec: &AlgebraSpec, k: i32) -> Result<()> {
    let required = 4 + k.abs();
    if spec.horizon() < required {
        return Err(Error::HorizonTooSmall {
            horizon: spec.horizon(),
            required,
        });
    }
    Ok(())
}

/// Symbolic Leibniz defect `D([a,b]) - [D(a),b] - [a,D(b)]`.
fn leibniz_row(
    spec: &AlgebraSpec,
    u: &MapUnknowns,
    a: BasisIndex,
    b: BasisIndex,
) -> Result<LinearElement> {
    let mut out = u.image_of(&spec.bracket_basis(a, b)?);
    let minus = -one();
    out.add_bracket_right(spec, &minus, &u.image(a), b)?;
    out.add_bracket_right(spec, &one(), &u.image(b), a)?;
    Ok(out)
}

/// Ordered basis pairs `a < b` with `deg a + deg b + max(k,0) <= N`, both in
/// the window.
fn constraint_pairs(spec: &AlgebraSpec, window: (i32, i32), k: i32) -> Vec<(BasisIndex, BasisIndex)> {
    let limit = spec.horizon() - k.max(0);
    let basis = spec.basis_in(window.0, window.1);
    let mut out = Vec::new();
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i + 1..] {
            if a.degree + b.degree <= limit {
                out.push((a, b));
            }
        }
    }
    out
}

/// Nullspace in canonical echelon form. Elimination runs from the last
/// unknown (top of the window) down: the constraints express high-degree
/// values through lower ones, so this order keeps rows short.
pub(crate) fn nullspace_of(cols: usize, rows: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let order: Vec<usize> = (0..cols).rev().collect();
    linalg::nullspace_ordered(cols, rows, &order)
}

/// `Der_k` of the truncated algebra, as an echelonized nullspace.
pub fn derivation_space(spec: &AlgebraSpec, k: i32) -> Result<SolveReport> {
    check_horizon(spec, k)?;
    let window = derivation_window(spec, k);
    let u = MapUnknowns::new(spec, k, window);
    let mut rows = Vec::new();
    for (a, b) in constraint_pairs(spec, window, k) {
        rows.extend(leibniz_row(spec, &u, a, b)?.into_rows());
    }
    let null = nullspace_of(u.len(), rows);
    let basis: Vec<GradedMap> = null.iter().map(|v| u.to_map(v)).collect();
    Ok(SolveReport {
        algebra: spec.name().to_string(),
        kind: SolveKind::Derivation,
        weight: k,
        horizon: spec.horizon(),
        window,
        dimension: basis.len(),
        basis: ReportBasis::Maps(basis),
        closed_form_match: None,
        stability: None,
    })
}

fn require_base(b: Builtin) -> Result<()> {
    if b.is_base() {
        Ok(())
    } else {
        Err(Error::UnknownAlgebra(format!("{b} has no closed form here")))
    }
}

/// `Σ_{i ≥ from, i ∉ skip} c(i) e_i^{i+k}` on the window.
fn series(k: i32, window: (i32, i32), from: i32, c: impl Fn(i32) -> Scalar) -> GradedMap {
    let mut m = GradedMap::zero(k, window);
    for i in from.max(window.0)..=window.1 {
        let c = c(i);
        if !c.is_zero() {
            m.set(e(i), Element::term(e(i + k), c)).expect("homogeneous");
        }
    }
    m
}

/// The known bases of `Der_k` for the base algebras, truncated to the solver
/// window at horizon `n`.
pub fn closed_form_derivations(b: Builtin, k: i32, n: i32) -> Result<Vec<GradedMap>> {
    require_base(b)?;
    let window = (1, n - k.max(0));
    let ek = |src: i32, coeff: Scalar| (e(src), Element::term(e(src + k), coeff));
    let single = |terms: &[(BasisIndex, Element)], tail: Option<GradedMap>| {
        let mut m = tail.unwrap_or_else(|| GradedMap::zero(k, window));
        for (s, v) in terms {
            if m.in_window(s.degree) {
                m.add_to(*s, v).expect("homogeneous");
            }
        }
        m
    };
    let out = match (b, k) {
        (_, k) if k < 0 => vec![],
        (Builtin::M0, 0) => vec![
            series(0, window, 2, |_| one()),
            single(&[ek(1, one())], Some(series(0, window, 3, |i| int(i as i64 - 2)))),
        ],
        (Builtin::M0, _) => vec![single(&[ek(1, one())], None), series(k, window, 2, |_| one())],
        (Builtin::L1, _) => vec![series(k, window, 1, |i| int((i - k) as i64))],
        (Builtin::M2, 0) => vec![series(0, window, 1, |i| int(i as i64))],
        (Builtin::M2, 1) => vec![series(1, window, 2, |_| one())],
        (Builtin::M2, 2) => vec![
            series(2, window, 2, |_| one()),
            single(&[ek(1, one())], Some(series(2, window, 3, |_| int(-1)))),
        ],
        (Builtin::M2, _) => vec![
            single(&[ek(1, one()), ek(2, one())], None),
            single(
                &[ek(1, frac(-1, 2)), ek(2, frac(1, 2))],
                Some(series(k, window, 3, |_| one())),
            ),
        ],
        _ => unreachable!("base algebra"),
    };
    Ok(out.into_iter().filter(|m| !m.is_zero()).collect())
}

/// Whether a derivation report spans the same space as the closed forms on
/// the report's window.
pub fn matches_closed_form(spec: &AlgebraSpec, report: &SolveReport, b: Builtin) -> Result<bool> {
    let u = MapUnknowns::new(spec, report.weight, report.window);
    let closed: Vec<Vector> = closed_form_derivations(b, report.weight, report.horizon)?
        .iter()
        .map(|m| u.project(&m.restricted(report.window)))
        .collect();
    let computed: Vec<Vector> = report.basis.maps().iter().map(|m| u.project(m)).collect();
    Ok(computed.len() == closed.len() && linalg::subspace_equal(&computed, &closed)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeibnizCheck {
    Pass,
    /// `defect = D([a,b]) - [D(a),b] - [a,D(b)]`, nonzero.
    Fail {
        pair: (BasisIndex, BasisIndex),
        defect: Element,
    },
}

impl LeibnizCheck {
    pub fn passed(&self) -> bool {
        matches!(self, LeibnizCheck::Pass)
    }
}

/// Checks the Leibniz identity on every in-window pair whose bracket and
/// images stay inside the window and the horizon.
pub fn is_derivation(spec: &AlgebraSpec, d: &GradedMap) -> Result<LeibnizCheck> {
    let (lo, hi) = d.window();
    let k = d.weight();
    let limit = hi.min(spec.horizon() - k);
    let basis = spec.basis_in(lo, hi);
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i + 1..] {
            if a.degree + b.degree > limit {
                continue;
            }
            let da = d.image(a)?;
            let db = d.image(b)?;
            let mut defect = d.apply(&spec.bracket_basis(a, b)?)?;
            defect = defect - spec.bracket(&da, &Element::basis(b))? - spec.bracket(&Element::basis(a), &db)?;
            if !defect.is_zero() {
                return Ok(LeibnizCheck::Fail {
                    pair: (a, b),
                    defect,
                });
            }
        }
    }
    Ok(LeibnizCheck::Pass)
}

/// `ad x` on source degrees `lowest ..= N - max(k,0)`, `x` homogeneous of
/// degree `k` (`ad 0` has weight 0).
pub fn ad(spec: &AlgebraSpec, x: &Element) -> Result<GradedMap> {
    let k = x.degree()?.unwrap_or(0);
    let window = derivation_window(spec, k);
    let mut m = GradedMap::zero(k, window);
    for b in spec.basis_in(window.0, window.1) {
        let v = spec.bracket(x, &Element::basis(b))?;
        if !v.is_zero() {
            m.set(b, v)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Derivation(GradedMap),
    Inconsistent {
        pair: (BasisIndex, BasisIndex),
        defect: Element,
    },
}

fn check_generator_image(spec: &AlgebraSpec, v: &Element, degree: i32) -> Result<()> {
    if let Some(i) = v.support().find(|i| !spec.contains(*i)) {
        return Err(Error::NoSuchBasis(i));
    }
    match v.degree()? {
        None => Ok(()),
        Some(d) if d == degree => Ok(()),
        Some(d) => Err(Error::Precondition(format!(
            "generator image has degree {d}, expected {degree}"
        ))),
    }
}

/// Extends `D(e1) = v1`, `D(e2) = v2` along the defining recursion without
/// checking the remaining relations.
pub fn propagate_raw(b: Builtin, spec: &AlgebraSpec, k: i32, v1: &Element, v2: &Element) -> Result<GradedMap> {
    require_base(b)?;
    check_horizon(spec, k)?;
    check_generator_image(spec, v1, 1 + k)?;
    check_generator_image(spec, v2, 2 + k)?;
    let window = (1, spec.horizon() - k.max(0));
    let mut m = GradedMap::zero(k, window);
    m.set(e(1), v1.clone())?;
    m.set(e(2), v2.clone())?;
    let e1 = Element::basis(e(1));
    for i in 2..window.1 {
        let di = m.image(e(i))?;
        let mut next = spec.bracket(v1, &Element::basis(e(i)))? + spec.bracket(&e1, &di)?;
        if b == Builtin::L1 {
            next = next.scaled(&frac(1, (i - 1) as i64));
        }
        m.set(e(i + 1), next)?;
    }
    Ok(m)
}

/// Propagation from the generators followed by a full Leibniz check.
pub fn propagate_from_generators(
    b: Builtin,
    spec: &AlgebraSpec,
    k: i32,
    v1: &Element,
    v2: &Element,
) -> Result<Propagation> {
    let m = propagate_raw(b, spec, k, v1, v2)?;
    Ok(match is_derivation(spec, &m)? {
        LeibnizCheck::Pass => Propagation::Derivation(m),
        LeibnizCheck::Fail { pair, defect } => Propagation::Inconsistent { pair, defect },
    })
}

/// The derivations reachable by propagation: spans the propagated maps over
/// all generator images and keeps the combinations with vanishing Leibniz
/// defect. Independent of [`derivation_space`].
pub fn propagated_space(b: Builtin, spec: &AlgebraSpec, k: i32) -> Result<Vec<GradedMap>> {
    let mut raw = Vec::new();
    for g in spec.component(1 + k) {
        raw.push(propagate_raw(b, spec, k, &Element::basis(g), &Element::zero())?);
    }
    for g in spec.component(2 + k) {
        raw.push(propagate_raw(b, spec, k, &Element::zero(), &Element::basis(g))?);
    }
    if raw.is_empty() {
        return Ok(vec![]);
    }
    let window = raw[0].window();
    let limit = window.1.min(spec.horizon() - k);
    let basis = spec.basis_in(window.0, window.1);
    let mut ech = Echelon::new(raw.len());
    for (i, &a) in basis.iter().enumerate() {
        for &bb in &basis[i + 1..] {
            if a.degree + bb.degree > limit {
                continue;
            }
            let mut rows: std::collections::BTreeMap<BasisIndex, SparseVec> = Default::default();
            for (j, m) in raw.iter().enumerate() {
                let defect = m.apply(&spec.bracket_basis(a, bb)?)?
                    - spec.bracket(&m.image(a)?, &Element::basis(bb))?
                    - spec.bracket(&Element::basis(a), &m.image(bb)?)?;
                for (t, c) in defect.iter() {
                    rows.entry(*t).or_default().insert(j, c.clone());
                }
            }
            for r in rows.into_values() {
                ech.insert(r);
            }
        }
    }
    Ok(ech
        .nullspace()
        .into_iter()
        .map(|c| {
            let mut m = GradedMap::zero(k, window);
            for (j, x) in c {
                m.add_scaled(&x, &raw[j]);
            }
            m
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub element: Element,
    pub unique: bool,
}

/// Finds `y` in the degree-`k` component of `ext` with `ad(y) = D` on the
/// window of `D`, the base algebra sitting in `ext` under the same indices.
pub fn realize_in_extension(base: &AlgebraSpec, ext: &AlgebraSpec, d: &GradedMap) -> Result<Realization> {
    let k = d.weight();
    let unknowns: Vec<BasisIndex> = ext.component(k).collect();
    let (lo, hi) = d.window();
    let hi = hi.min(ext.horizon() - k).min(base.horizon());
    let mut rows: Vec<SparseVec> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for b in base.basis_in(lo, hi) {
        if !ext.contains(b) {
            return Err(Error::NoSuchBasis(b));
        }
        let target = d.image(b)?;
        let mut sym: std::collections::BTreeMap<BasisIndex, SparseVec> = Default::default();
        for (j, y) in unknowns.iter().enumerate() {
            for (t, c) in ext.bracket_basis(*y, b)?.iter() {
                sym.entry(*t).or_default().insert(j, c.clone());
            }
        }
        for t in target.support() {
            sym.entry(t).or_default();
        }
        for (t, row) in sym {
            rows.push(row);
            rhs.push(target.coeff(t));
        }
    }
    let m = RatMatrix::from_sparse(unknowns.len(), rows)?;
    match linalg::solve(&m, &rhs)? {
        None => Err(Error::Unrealizable(format!(
            "weight {k}, window {lo}..{hi} in {}",
            ext.name()
        ))),
        Some((x, null)) => Ok(Realization {
            element: Element::from_terms(unknowns.iter().copied().zip(x)),
            unique: null.is_empty(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{builtin_algebra, X0, X02};

    fn spec(name: &str, n: i32) -> AlgebraSpec {
        builtin_algebra(name, n).unwrap()
    }

    fn check(name: &str, k: i32, n: i32, dim: usize) {
        let s = spec(name, n);
        let r = derivation_space(&s, k).unwrap();
        assert_eq!(r.dimension, dim, "{name} k={k}");
        let b: Builtin = name.parse().unwrap();
        assert!(matches_closed_form(&s, &r, b).unwrap(), "{name} k={k}");
    }

    #[test]
    fn examples() {
        check("m0", 0, 40, 2);
        check("m0", -3, 40, 0);
        check("l1", 2, 40, 1);
        check("m2", 2, 40, 2);
    }

    #[test]
    fn horizon_too_small() {
        let s = spec("m0", 6);
        assert!(matches!(derivation_space(&s, 3), Err(Error::HorizonTooSmall { .. })));
    }

    #[test]
    fn closed_form_shapes() {
        let m = closed_form_derivations(Builtin::M0, 3, 20).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].entries().count(), 1);
        assert_eq!(m[1].entries().count(), 16);
        let m = closed_form_derivations(Builtin::M2, 5, 20).unwrap();
        assert_eq!(m[0].entries().count(), 2);
        assert_eq!(m[1].entries().count(), 2 + 13);
        assert_eq!(m[1].image(e(1)).unwrap(), Element::term(e(6), frac(-1, 2)));
        assert!(closed_form_derivations(Builtin::L1, -1, 20).unwrap().is_empty());
        assert!(closed_form_derivations(Builtin::M0Ext, 0, 20).is_err());
    }

    #[test]
    fn leibniz_checks() {
        let l1 = spec("l1", 20);
        assert!(is_derivation(&l1, &ad(&l1, &Element::basis(e(2))).unwrap()).unwrap().passed());
        let m0 = spec("m0", 20);
        let d = GradedMap::elementary(e(1), e(2), (1, 19)).unwrap();
        assert!(is_derivation(&m0, &d).unwrap().passed());
        let d = GradedMap::elementary(e(2), e(3), (1, 19)).unwrap();
        match is_derivation(&m0, &d).unwrap() {
            LeibnizCheck::Fail { pair, defect } => {
                assert_eq!(pair, (e(1), e(2)));
                assert_eq!(defect, Element::term(e(4), int(-1)));
            }
            LeibnizCheck::Pass => panic!(),
        }
    }

    #[test]
    fn ad_examples() {
        let ext = spec("l1ext", 20);
        let m = ad(&ext, &Element::basis(X0)).unwrap().restricted_to(|i| i.degree >= 1);
        assert_eq!(m, series(0, (0, 20), 1, |i| int(i as i64)).restricted_to(|i| i.degree >= 1));
        let ext = spec("m0ext", 20);
        let m = ad(&ext, &Element::basis(X02)).unwrap().restricted_to(|i| i.degree >= 1 && i.slot == 0);
        for (s, v) in m.entries() {
            assert!(s.degree >= 2);
            assert_eq!(*v, Element::basis(*s));
        }
        assert_eq!(m.entries().count(), 19);
        assert!(ad(&ext, &Element::zero()).unwrap().is_zero());
    }

    #[test]
    fn propagation_examples() {
        let m0 = spec("m0", 20);
        let p = propagate_from_generators(Builtin::M0, &m0, 0, &Element::basis(e(1)), &Element::zero()).unwrap();
        let want = closed_form_derivations(Builtin::M0, 0, 20).unwrap()[1].clone();
        assert_eq!(p, Propagation::Derivation(want));
        let p = propagate_from_generators(Builtin::M0, &m0, 1, &Element::basis(e(2)), &Element::zero()).unwrap();
        assert_eq!(p, Propagation::Derivation(GradedMap::elementary(e(1), e(2), (1, 19)).unwrap()));

        let m2 = spec("m2", 20);
        assert!(matches!(
            propagate_from_generators(Builtin::M2, &m2, -1, &Element::basis(e(1)), &Element::zero()),
            Err(Error::Precondition(_))
        ));
        let p = propagate_from_generators(Builtin::M2, &m2, -1, &Element::zero(), &Element::basis(e(1))).unwrap();
        assert!(matches!(p, Propagation::Inconsistent { .. }));
    }

    #[test]
    fn realization_examples() {
        let m0 = spec("m0", 20);
        let ext = spec("m0ext", 20);
        let d = closed_form_derivations(Builtin::M0, 0, 20).unwrap()[0].clone();
        let r = realize_in_extension(&m0, &ext, &d).unwrap();
        assert_eq!(r, Realization { element: Element::basis(X02), unique: true });

        let m2 = spec("m2", 20);
        let ext = spec("m2ext", 20);
        let d = closed_form_derivations(Builtin::M2, 0, 20).unwrap()[0].clone();
        let r = realize_in_extension(&m2, &ext, &d).unwrap();
        assert_eq!(r, Realization { element: Element::basis(X0), unique: true });

        let l1 = spec("l1", 20);
        let ext = spec("l1ext", 20);
        let d = ad(&l1, &Element::basis(e(3))).unwrap();
        let r = realize_in_extension(&l1, &ext, &d).unwrap();
        assert_eq!(r, Realization { element: Element::basis(e(3)), unique: true });
    }

    #[test]
    fn unrealizable_map_is_reported() {
        let m0 = spec("m0", 20);
        let ext = spec("m0ext", 20);
        let d = GradedMap::elementary(e(2), e(3), (1, 19)).unwrap();
        assert!(matches!(realize_in_extension(&m0, &ext, &d), Err(Error::Unrealizable(_))));
    }
}
