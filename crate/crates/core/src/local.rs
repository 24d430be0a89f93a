//! Local and 2-local derivations of a fixed weight.
//!
//! `LDer_k` is cut out by infinitely many membership conditions
//! `Δ(x) ∈ {D(x) : D ∈ Der_k}`. Imposing them for a finite test family gives
//! a linear over-approximation that always contains `Der_k`; when the two
//! coincide the family is a certificate that `LDer_k = Der_k` on the window.
//! (`LDer_k` is a subspace because `Der_k` is, so the system is linear.)

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::der::nullspace_of;
use crate::error::{Error, Result};
use crate::graded::{e, AlgebraSpec, BasisIndex, Element, SubspaceReport};
use crate::linalg::{self, annihilating_functionals, to_dense, SparseVec, Vector};
use crate::maps::{GradedMap, MapUnknowns};
use crate::report::{ReportBasis, SolveKind, SolveReport};
use crate::scalar::Scalar;

pub const DEFAULT_FAMILY_BOUND: i32 = 20;

/// Test points for the local solver and test pairs for the 2-local one.
/// Pairs may repeat a point: `(x, x)` imposes exactly the local condition
/// at `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TestFamily {
    pub points: Vec<Element>,
    pub pairs: Vec<(Element, Element)>,
}

impl TestFamily {
    pub fn points(points: Vec<Element>) -> Self {
        Self {
            points,
            pairs: vec![],
        }
    }

    pub fn pairs(pairs: Vec<(Element, Element)>) -> Self {
        Self {
            points: vec![],
            pairs,
        }
    }

    fn members(&self) -> impl Iterator<Item = &Element> {
        self.points
            .iter()
            .chain(self.pairs.iter().flat_map(|(x, y)| [x, y]))
    }

    fn validate(&self, window: (i32, i32)) -> Result<()> {
        for x in self.members() {
            if x.is_zero() {
                return Err(Error::Precondition("test vectors must be nonzero".into()));
            }
            if let Some(i) = x.support().find(|i| i.degree < window.0 || i.degree > window.1) {
                return Err(Error::OutsideWindow(i));
            }
        }
        Ok(())
    }

    fn top_degree(&self) -> Option<i32> {
        self.members().filter_map(Element::max_degree).max()
    }
}

/// The standard family: basis vectors, sums of two, and `e1 + e2 + e_i`,
/// over degrees up to `min(bound, window top)`. For pairs: `(e_a, e_b)`,
/// `(e_a + e_b, e_c)` with `c ∉ {a, b}`, and `(e1 + e2 + e_i, e1)` so that
/// every local test point also occurs in some pair.
pub fn default_family(spec: &AlgebraSpec, window: (i32, i32), bound: i32) -> TestFamily {
    let top = bound.min(window.1);
    let basis = spec.basis_in(window.0.max(1), top);
    let vec = |i: BasisIndex| Element::basis(i);
    let mut points: Vec<Element> = basis.iter().map(|&b| vec(b)).collect();
    let mut sums = Vec::new();
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i + 1..] {
            sums.push(((a, b), vec(a) + vec(b)));
        }
    }
    points.extend(sums.iter().map(|(_, s)| s.clone()));
    let mut triples = Vec::new();
    if spec.contains(e(1)) && spec.contains(e(2)) && window.0 <= 1 && top >= 3 {
        for i in 3..=top {
            if spec.contains(e(i)) {
                triples.push(Element::sum_of([e(1), e(2), e(i)]));
            }
        }
    }
    points.extend(triples.iter().cloned());

    let mut pairs = Vec::new();
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i + 1..] {
            pairs.push((vec(a), vec(b)));
        }
    }
    for ((a, b), s) in &sums {
        for &c in &basis {
            if c != *a && c != *b {
                pairs.push((s.clone(), vec(c)));
            }
        }
    }
    for t in triples {
        pairs.push((t, vec(e(1))));
    }
    TestFamily { points, pairs }
}

fn target_basis(spec: &AlgebraSpec, k: i32, x: &Element) -> Vec<BasisIndex> {
    let degrees: BTreeSet<i32> = x.support().map(|i| i.degree + k).collect();
    degrees.into_iter().flat_map(|d| spec.component(d)).collect()
}

fn coords(targets: &[BasisIndex], v: &Element, offset: usize, out: &mut Vector) {
    for (t, c) in v.iter() {
        let i = targets.binary_search(t).expect("target in layout");
        out[offset + i] = c.clone();
    }
}

/// Echelonized span of `{B(x) : B ∈ der_basis}`.
pub fn value_space(der_basis: &[GradedMap], x: &Element) -> Result<SubspaceReport> {
    let values: Vec<Element> = der_basis.iter().map(|b| b.apply(x)).collect::<Result<_>>()?;
    let mut targets: Vec<BasisIndex> = values.iter().flat_map(|v| v.support()).collect();
    targets.sort();
    targets.dedup();
    let vectors: Vec<SparseVec> = values
        .iter()
        .map(|v| {
            v.iter()
                .map(|(t, c)| (targets.binary_search(t).unwrap(), c.clone()))
                .collect()
        })
        .collect();
    let basis: Vec<Element> = linalg::echelonize_sparse(targets.len(), vectors)
        .into_iter()
        .map(|v| Element::from_terms(v.into_iter().map(|(i, c)| (targets[i], c))))
        .collect();
    let window = match (x.min_degree(), x.max_degree(), der_basis.first()) {
        (Some(lo), Some(hi), Some(b)) => (lo + b.weight(), hi + b.weight()),
        _ => (0, -1),
    };
    Ok(SubspaceReport {
        dimension: basis.len(),
        basis,
        window,
    })
}

/// Rows `ℓ(Δ(x_1), …, Δ(x_r)) = 0` for every functional `ℓ` vanishing on
/// `{(D(x_1), …, D(x_r)) : D ∈ Der_k}`.
fn membership_rows(
    spec: &AlgebraSpec,
    u: &MapUnknowns,
    der: &[GradedMap],
    xs: &[&Element],
) -> Result<Vec<SparseVec>> {
    let layouts: Vec<Vec<BasisIndex>> = xs.iter().map(|x| target_basis(spec, u.weight, x)).collect();
    let mut offsets = vec![0];
    for l in &layouts {
        offsets.push(offsets.last().unwrap() + l.len());
    }
    let n = *offsets.last().unwrap();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut values = Vec::with_capacity(der.len());
    for b in der {
        let mut v = vec![Scalar::zero(); n];
        for (j, x) in xs.iter().enumerate() {
            coords(&layouts[j], &b.apply(x)?, offsets[j], &mut v);
        }
        values.push(v);
    }
    let functionals = annihilating_functionals(&values, n)?;
    let symbolic: Vec<_> = xs.iter().map(|x| u.image_of(x).into_terms()).collect();
    let mut rows = Vec::with_capacity(functionals.len());
    for l in functionals {
        let mut row = SparseVec::new();
        for (j, terms) in symbolic.iter().enumerate() {
            for (t, form) in terms {
                let i = layouts[j].binary_search(t).expect("target in layout");
                let c = &l[offsets[j] + i];
                if c.is_zero() {
                    continue;
                }
                for (col, v) in form {
                    let entry = row.entry(*col).or_insert_with(Scalar::zero);
                    *entry += c * v;
                }
            }
        }
        row.retain(|_, v| !v.is_zero());
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn check_der(der: &SolveReport) -> Result<()> {
    if der.kind != SolveKind::Derivation {
        return Err(Error::Precondition("a derivation report is required".into()));
    }
    Ok(())
}

/// Unknown window: the derivation window cut at the family's top degree.
fn local_window(der: &SolveReport, family: &TestFamily) -> Result<(i32, i32)> {
    family.validate(der.window)?;
    let top = family.top_degree().ok_or(Error::EmptyFamily)?;
    Ok((der.window.0, der.window.1.min(top)))
}

fn finish(
    spec: &AlgebraSpec,
    kind: SolveKind,
    der: &SolveReport,
    u: &MapUnknowns,
    rows: Vec<SparseVec>,
) -> Result<SolveReport> {
    let null = nullspace_of(u.len(), rows);
    let basis: Vec<GradedMap> = null.iter().map(|v| u.to_map(v)).collect();
    let coords: Vec<Vector> = null.iter().map(|v| to_dense(v, u.len())).collect();
    let der_coords: Vec<Vector> = der.basis.maps().iter().map(|m| u.project(m)).collect();
    let equal = der_coords.len() == coords.len() && linalg::subspace_equal(&coords, &der_coords)?;
    Ok(SolveReport {
        algebra: spec.name().to_string(),
        kind,
        weight: der.weight,
        horizon: der.horizon,
        window: u.window,
        dimension: basis.len(),
        basis: ReportBasis::Maps(basis),
        closed_form_match: Some(equal),
        stability: None,
    })
}

/// Over-approximation of `LDer_k` from the family's points. The report's
/// `closed_form_match` records whether it equals `Der_k` on its window.
pub fn local_overapprox(spec: &AlgebraSpec, der: &SolveReport, family: &TestFamily) -> Result<SolveReport> {
    check_der(der)?;
    if family.points.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let window = local_window(der, &TestFamily::points(family.points.clone()))?;
    let u = MapUnknowns::new(spec, der.weight, window);
    let mut rows = Vec::new();
    for x in &family.points {
        rows.extend(membership_rows(spec, &u, der.basis.maps(), &[x])?);
    }
    finish(spec, SolveKind::LocalOverapprox, der, &u, rows)
}

/// Over-approximation of the linear 2-local derivations of weight `k`
/// from the family's pairs.
pub fn two_local_overapprox(spec: &AlgebraSpec, der: &SolveReport, family: &TestFamily) -> Result<SolveReport> {
    check_der(der)?;
    if family.pairs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let window = local_window(der, &TestFamily::pairs(family.pairs.clone()))?;
    let u = MapUnknowns::new(spec, der.weight, window);
    let mut rows = Vec::new();
    for (x, y) in &family.pairs {
        rows.extend(membership_rows(spec, &u, der.basis.maps(), &[x, y])?);
    }
    finish(spec, SolveKind::TwoLocalOverapprox, der, &u, rows)
}

/// Whether `inner`'s span lies in `outer`'s, on `outer`'s window and weight.
pub fn report_contains(spec: &AlgebraSpec, outer: &SolveReport, inner: &SolveReport) -> Result<bool> {
    let u = MapUnknowns::new(spec, outer.weight, outer.window);
    let a: Vec<Vector> = outer.basis.maps().iter().map(|m| u.project(m)).collect();
    let b: Vec<Vector> = inner.basis.maps().iter().map(|m| u.project(m)).collect();
    linalg::subspace_contains(&a, &b)
}

/// Parameters of the non-linear map `Ω^{(q,m)}_{θ,λ}` on `m0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaParams {
    q: i32,
    m: i32,
    theta: Vec<Scalar>,
    lambda: Scalar,
}

impl OmegaParams {
    /// `theta` holds `θ_2, …, θ_m`.
    pub fn new(q: i32, m: i32, theta: Vec<Scalar>, lambda: Scalar) -> Result<Self> {
        if q <= 2 {
            return Err(Error::Precondition(format!("q must exceed 2, got {q}")));
        }
        if m < 2 || theta.len() != (m - 1) as usize {
            return Err(Error::Precondition(format!(
                "θ must have m - 1 entries (m = {m}, got {})",
                theta.len()
            )));
        }
        Ok(Self { q, m, theta, lambda })
    }

    pub fn q(&self) -> i32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.theta.iter().all(Zero::is_zero)
    }
}

/// `Ω(Σ k_i e_i)`: `Σ_{i≥2} Σ_{j=2}^m k_i θ_j e_{i+j-2}` if `k_1 ≠ 0`;
/// `λ k_q e_q` if `x = k_q e_q`; zero otherwise.
pub fn omega_eval(p: &OmegaParams, x: &Element, horizon: i32) -> Result<Element> {
    let k1 = x.coeff(e(1));
    if !k1.is_zero() {
        let mut out = Element::zero();
        for (i, ki) in x.iter() {
            if i.degree < 2 {
                continue;
            }
            for (j, theta) in (2..=p.m).zip(&p.theta) {
                let degree = i.degree + j - 2;
                if degree > horizon {
                    return Err(Error::HorizonExceeded {
                        a: *i,
                        b: e(j),
                        degree,
                        horizon,
                    });
                }
                out.add_term(e(degree), ki * theta);
            }
        }
        return Ok(out);
    }
    if x.len() == 1 && !x.coeff(e(p.q)).is_zero() {
        if p.q > horizon {
            return Err(Error::OutsideWindow(e(p.q)));
        }
        return Ok(Element::term(e(p.q), &p.lambda * x.coeff(e(p.q))));
    }
    Ok(Element::zero())
}

/// `(Ω(e1+e2) − Ω(e1) − Ω(e2), Ω(e2+e_q) − Ω(e2) − Ω(e_q))`; both vanish
/// exactly when every parameter does.
pub fn omega_linearity_obstruction(p: &OmegaParams, horizon: i32) -> Result<(Element, Element)> {
    let (e1, e2, eq) = (Element::basis(e(1)), Element::basis(e(2)), Element::basis(e(p.q)));
    let om = |x: &Element| omega_eval(p, x, horizon);
    Ok((
        om(&(&e1 + &e2))? - om(&e1)? - om(&e2)?,
        om(&(&e2 + &eq))? - om(&e2)? - om(&eq)?,
    ))
}
