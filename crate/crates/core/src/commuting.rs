//! Weight-homogeneous commuting maps `[φ(x), x] = 0`.
//!
//! Over characteristic 0 the identity for all `x` is equivalent to its
//! polarization `[φ(a), b] + [φ(b), a] = 0` on basis pairs, diagonal
//! included, which is what the solver imposes.

use crate::bider::is_biderivation;
use crate::der::{check_horizon, nullspace_of};
use crate::error::{Error, Result};
use crate::graded::{AlgebraSpec, BasisIndex, Element};
use crate::maps::{BilinearForm, GradedMap, LinearElement, MapUnknowns};
use crate::report::{ReportBasis, SolveKind, SolveReport};
use crate::scalar::one;

/// Source window `lowest ..= N - max(k,0) - 2`: every source then meets the
/// degree-1 and degree-2 vectors inside the truncation, so no unknown is
/// left unconstrained at the top.
pub fn commuting_window(spec: &AlgebraSpec, k: i32) -> (i32, i32) {
    let lo = spec.min_degree().unwrap_or(1);
    (lo, spec.horizon() - k.max(0) - 2)
}

fn pairs(spec: &AlgebraSpec, window: (i32, i32), k: i32) -> Vec<(BasisIndex, BasisIndex)> {
    let basis = spec.basis_in(window.0, window.1);
    let mut out = Vec::new();
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i..] {
            if a.degree + b.degree + k <= spec.horizon() {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn commuting_space(spec: &AlgebraSpec, k: i32) -> Result<SolveReport> {
    check_horizon(spec, k)?;
    let window = commuting_window(spec, k);
    let u = MapUnknowns::new(spec, k, window);
    let mut rows = Vec::new();
    for (a, b) in pairs(spec, window, k) {
        let mut row = LinearElement::default();
        row.add_bracket_right(spec, &one(), &u.image(a), b)?;
        if a != b {
            row.add_bracket_right(spec, &one(), &u.image(b), a)?;
        }
        rows.extend(row.into_rows());
    }
    let null = nullspace_of(u.len(), rows);
    let basis: Vec<GradedMap> = null.iter().map(|v| u.to_map(v)).collect();
    Ok(SolveReport {
        algebra: spec.name().to_string(),
        kind: SolveKind::Commuting,
        weight: k,
        horizon: spec.horizon(),
        window,
        dimension: basis.len(),
        basis: ReportBasis::Maps(basis),
        closed_form_match: None,
        stability: None,
    })
}

/// The identity on the commuting window at weight 0, nothing otherwise.
pub fn closed_form_commuting(spec: &AlgebraSpec, k: i32) -> Vec<GradedMap> {
    if k != 0 {
        return vec![];
    }
    let window = commuting_window(spec, 0);
    let mut id = GradedMap::zero(0, window);
    for b in spec.basis_in(window.0, window.1) {
        id.set(b, Element::basis(b)).expect("weight 0");
    }
    vec![id]
}

/// Whether a commuting report spans exactly the identity (at k = 0) or is
/// zero (otherwise).
pub fn matches_closed_form(spec: &AlgebraSpec, report: &SolveReport) -> Result<bool> {
    let u = MapUnknowns::new(spec, report.weight, report.window);
    let closed: Vec<_> = closed_form_commuting(spec, report.weight)
        .iter()
        .map(|m| u.project(m))
        .collect();
    let computed: Vec<_> = report.basis.maps().iter().map(|m| u.project(m)).collect();
    Ok(closed.len() == computed.len() && crate::linalg::subspace_equal(&computed, &closed)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommutingCheck {
    Pass,
    /// For a diagonal witness `(a, a)` the defect is `[φ(a), a]`; otherwise
    /// `[φ(a), b] + [φ(b), a]`.
    Fail {
        pair: (BasisIndex, BasisIndex),
        defect: Element,
    },
}

impl CommutingCheck {
    pub fn passed(&self) -> bool {
        matches!(self, CommutingCheck::Pass)
    }
}

/// Diagonal pairs are checked first so a failure names the simplest witness.
pub fn is_commuting(spec: &AlgebraSpec, phi: &GradedMap) -> Result<CommutingCheck> {
    let k = phi.weight();
    let all = pairs(spec, phi.window(), k);
    let (diag, off): (Vec<_>, Vec<_>) = all.into_iter().partition(|(a, b)| a == b);
    for (a, b) in diag.into_iter().chain(off) {
        let (ea, eb) = (Element::basis(a), Element::basis(b));
        let mut defect = spec.bracket(&phi.image(a)?, &eb)?;
        if a != b {
            defect = defect + spec.bracket(&phi.image(b)?, &ea)?;
        }
        if !defect.is_zero() {
            return Ok(CommutingCheck::Fail {
                pair: (a, b),
                defect,
            });
        }
    }
    Ok(CommutingCheck::Pass)
}

/// `f(x, y) = [x, φ(y)]`, defined on pairs inside the window of `φ`.
pub fn biderivation_from_commuting(spec: &AlgebraSpec, phi: &GradedMap) -> Result<BilinearForm> {
    if let CommutingCheck::Fail { pair, .. } = is_commuting(spec, phi)? {
        return Err(Error::Precondition(format!(
            "map is not commuting at ({}, {})",
            pair.0, pair.1
        )));
    }
    let k = phi.weight();
    let (lo, hi) = phi.window();
    let max = (hi + lo).min(spec.horizon() - k.max(0));
    let mut f = BilinearForm::zero(k, max);
    let basis = spec.basis_in(lo, hi);
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i + 1..] {
            if a.degree + b.degree > max {
                continue;
            }
            let v = spec.bracket(&Element::basis(a), &phi.image(b)?)?;
            let mirrored = -spec.bracket(&Element::basis(b), &phi.image(a)?)?;
            if v != mirrored {
                return Err(Error::Precondition(format!("form is not skew at ({a}, {b})")));
            }
            f.set(a, b, v)?;
        }
    }
    if !is_biderivation(spec, &f)?.passed() {
        return Err(Error::Precondition("induced form is not a biderivation".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bider::inner_biderivation;
    use crate::der::ad;
    use crate::graded::{builtin_algebra, e};
    use crate::scalar::{frac, int};

    fn spec(name: &str, n: i32) -> AlgebraSpec {
        builtin_algebra(name, n).unwrap()
    }

    #[test]
    fn examples() {
        for (name, k, dim) in [("m0", 0, 1), ("m0", 2, 0), ("l1", 0, 1), ("m2", -1, 0)] {
            let s = spec(name, 40);
            let r = commuting_space(&s, k).unwrap();
            assert_eq!(r.dimension, dim, "{name} {k}");
            assert!(matches_closed_form(&s, &r).unwrap());
        }
    }

    #[test]
    fn checks() {
        let l1 = spec("l1", 20);
        let id = closed_form_commuting(&l1, 0).remove(0);
        assert!(is_commuting(&l1, &id).unwrap().passed());
        assert!(is_commuting(&l1, &GradedMap::zero(0, (1, 18))).unwrap().passed());
        let a = ad(&l1, &Element::basis(e(1))).unwrap();
        assert_eq!(
            is_commuting(&l1, &a).unwrap(),
            CommutingCheck::Fail {
                pair: (e(2), e(2)),
                defect: Element::term(e(5), int(-1)),
            }
        );
    }

    #[test]
    fn induced_forms() {
        let m2 = spec("m2", 20);
        let id = closed_form_commuting(&m2, 0).remove(0);
        let f = biderivation_from_commuting(&m2, &id).unwrap();
        let inner = inner_biderivation(&m2, &int(1));
        for ((a, b), v) in f.entries() {
            assert_eq!(*v, inner.eval_basis(*a, *b).unwrap());
        }
        let m0 = spec("m0", 20);
        let phi = closed_form_commuting(&m0, 0).remove(0).scaled(&frac(3, 2));
        let f = biderivation_from_commuting(&m0, &phi).unwrap();
        let inner = inner_biderivation(&m0, &frac(3, 2));
        for ((a, b), v) in f.entries() {
            assert_eq!(*v, inner.eval_basis(*a, *b).unwrap());
        }
        assert!(biderivation_from_commuting(&m0, &GradedMap::zero(0, (1, 18))).unwrap().is_zero());
        let a = ad(&m0, &Element::basis(e(1))).unwrap();
        assert!(biderivation_from_commuting(&m0, &a).is_err());
    }
}
