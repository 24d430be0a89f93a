//! Sweeps over weights with closed-form and stability annotations, and the
//! full verification suite behind `verify-paper`.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::bider::{self, biderivation_space, inner_biderivation, phi_of_f};
use crate::commuting::{self, biderivation_from_commuting, commuting_space};
use crate::der::{self, derivation_space, realize_in_extension};
use crate::error::{Error, Result};
use crate::graded::{annihilator, center, e, jacobi_check, AlgebraSpec, Builtin, Element, JacobiReport, X01, X02};
use crate::linalg::{self, Vector};
use crate::local::{
    default_family, local_overapprox, omega_linearity_obstruction, report_contains, two_local_overapprox,
    OmegaParams,
};
use crate::maps::{FormUnknowns, MapUnknowns};
use crate::report::{SolveKind, SolveReport};
use crate::scalar::{frac, int, Scalar};

/// Extra degrees used by the stability re-run.
pub const STABILITY_MARGIN: i32 = 8;

/// Where an algebra comes from: a built-in can be rebuilt at any horizon, a
/// parsed file only truncated.
#[derive(Clone, Debug)]
pub enum Source {
    Builtin(Builtin),
    Spec(AlgebraSpec),
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Builtin(b) => b.name().into(),
            Source::Spec(s) => s.name().into(),
        }
    }

    pub fn builtin(&self) -> Option<Builtin> {
        match self {
            Source::Builtin(b) => Some(*b),
            Source::Spec(_) => None,
        }
    }

    /// The algebra at horizon `n`, if available.
    pub fn at(&self, n: i32) -> Option<AlgebraSpec> {
        match self {
            Source::Builtin(b) => b.spec(n).ok(),
            Source::Spec(s) if n <= s.horizon() => Some(s.truncated(n)),
            Source::Spec(_) => None,
        }
    }

    /// A horizon pair `(small, large)` for the stability re-run around `n`.
    fn stability_pair(&self, n: i32) -> (i32, i32) {
        match self {
            Source::Builtin(_) => (n, n + STABILITY_MARGIN),
            Source::Spec(_) => (n - STABILITY_MARGIN, n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Der,
    Bider,
    Commuting,
    Local,
    TwoLocal,
}

impl Kind {
    pub fn solve_kind(self) -> SolveKind {
        match self {
            Kind::Der => SolveKind::Derivation,
            Kind::Bider => SolveKind::Biderivation,
            Kind::Commuting => SolveKind::Commuting,
            Kind::Local => SolveKind::LocalOverapprox,
            Kind::TwoLocal => SolveKind::TwoLocalOverapprox,
        }
    }
}

/// One raw solve, with the closed-form comparison where one is known. For
/// the local kinds `closed_form_match` means "equals `Der_k`".
pub fn solve(spec: &AlgebraSpec, builtin: Option<Builtin>, kind: Kind, k: i32, bound: i32) -> Result<SolveReport> {
    let base = builtin.filter(|b| b.is_base());
    Ok(match kind {
        Kind::Der => {
            let mut r = derivation_space(spec, k)?;
            if let Some(b) = base {
                r.closed_form_match = Some(der::matches_closed_form(spec, &r, b)?);
            }
            r
        }
        Kind::Bider => {
            let mut r = biderivation_space(spec, k)?;
            if let Some(b) = base {
                r.closed_form_match = Some(bider::matches_closed_form(spec, &r, b)?);
            }
            r
        }
        Kind::Commuting => {
            let mut r = commuting_space(spec, k)?;
            if base.is_some() {
                r.closed_form_match = Some(commuting::matches_closed_form(spec, &r)?);
            }
            r
        }
        Kind::Local | Kind::TwoLocal => {
            let d = derivation_space(spec, k)?;
            let fam = default_family(spec, d.window, bound);
            if kind == Kind::Local {
                local_overapprox(spec, &d, &fam)?
            } else {
                two_local_overapprox(spec, &d, &fam)?
            }
        }
    })
}

/// Whether two reports of the same kind and weight span the same space on
/// the window of `small` (and have the same dimension).
pub fn same_on_window(spec_small: &AlgebraSpec, small: &SolveReport, large: &SolveReport) -> Result<bool> {
    if small.dimension != large.dimension {
        return Ok(false);
    }
    let (a, b): (Vec<Vector>, Vec<Vector>) = if small.kind == SolveKind::Biderivation {
        let u = FormUnknowns::new(spec_small, small.weight, small.window.1);
        (
            small.basis.forms().iter().map(|f| u.project(f)).collect(),
            large.basis.forms().iter().map(|f| u.project(f)).collect(),
        )
    } else {
        let u = MapUnknowns::new(spec_small, small.weight, small.window);
        (
            small.basis.maps().iter().map(|m| u.project(m)).collect(),
            large.basis.maps().iter().map(|m| u.project(m)).collect(),
        )
    };
    linalg::subspace_equal(&a, &b)
}

/// A solve at horizon `n` annotated with closed-form match and stability.
pub fn annotated(source: &Source, kind: Kind, k: i32, n: i32, bound: i32) -> Result<SolveReport> {
    let spec = source.at(n).ok_or(Error::HorizonTooSmall {
        horizon: n,
        required: n,
    })?;
    let mut report = solve(&spec, source.builtin(), kind, k, bound)?;
    let (lo, hi) = source.stability_pair(n);
    let other = |h: i32| -> Option<(AlgebraSpec, SolveReport)> {
        let s = source.at(h)?;
        let r = solve(&s, source.builtin(), kind, k, bound).ok()?;
        Some((s, r))
    };
    report.stability = if lo == n {
        match other(hi) {
            Some((_, large)) => Some(same_on_window(&spec, &report, &large)?),
            None => None,
        }
    } else {
        match other(lo) {
            Some((small_spec, small)) => Some(same_on_window(&small_spec, &small, &report)?),
            None => None,
        }
    };
    Ok(report)
}

/// Annotated solves for every weight, in weight order, computed in parallel.
pub fn sweep(source: &Source, kind: Kind, weights: RangeInclusive<i32>, n: i32, bound: i32) -> Result<Vec<SolveReport>> {
    weights
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| annotated(source, kind, k, n, bound))
        .collect()
}

/// One named pass/fail line of the verification suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn dims_line(reports: &[SolveReport]) -> String {
    reports
        .iter()
        .map(|r| r.dimension.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn sweep_check(label: &str, b: Builtin, reports: &[SolveReport], expected: impl Fn(i32) -> usize) -> Check {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.dimension != expected(r.weight) || !r.ok() || r.closed_form_match.is_none())
        .map(|r| format!("k={} dim={}", r.weight, r.dimension))
        .collect();
    let (lo, hi) = match (reports.first(), reports.last()) {
        (Some(a), Some(z)) => (a.weight, z.weight),
        _ => (0, -1),
    };
    Check::new(
        format!("{label} {b} k={lo}..{hi}"),
        bad.is_empty(),
        if bad.is_empty() {
            format!("{label} dims: {}", dims_line(reports))
        } else {
            format!("{label} dims: {}; failing: {}", dims_line(reports), bad.join(" "))
        },
    )
}

/// Expected `dim Der_k`.
pub fn expected_der_dim(b: Builtin, k: i32) -> usize {
    match (b, k) {
        (_, k) if k < 0 => 0,
        (Builtin::M0, _) => 2,
        (Builtin::L1, _) => 1,
        (Builtin::M2, 0 | 1) => 1,
        (Builtin::M2, _) => 2,
        _ => 0,
    }
}

/// Expected `dim BDer_k`.
pub fn expected_bider_dim(b: Builtin, k: i32) -> usize {
    let one = match b {
        Builtin::M0 => k >= -1,
        Builtin::L1 => k == 0,
        Builtin::M2 => k >= 0,
        _ => false,
    };
    one as usize
}

pub fn expected_commuting_dim(k: i32) -> usize {
    (k == 0) as usize
}

/// Realizes each derivation basis vector in the extension and checks that
/// the images are unique and form a basis of the extension component.
pub fn realization_check(base: &AlgebraSpec, ext: &AlgebraSpec, der: &SolveReport) -> Result<bool> {
    let mut ys = Vec::new();
    for d in der.basis.maps() {
        let r = realize_in_extension(base, ext, d)?;
        if !r.unique {
            return Ok(false);
        }
        ys.push(r.element);
    }
    let component: Vec<_> = ext.component(der.weight).collect();
    let vecs: Vec<Vector> = ys
        .iter()
        .map(|y| component.iter().map(|c| y.coeff(*c)).collect())
        .collect();
    Ok(vecs.len() == component.len() && linalg::echelonize(&vecs)?.len() == component.len())
}

/// `φ_f` for every biderivation basis form: unique and reconstructing `f`.
pub fn phi_check(base: &AlgebraSpec, ext: &AlgebraSpec, bider: &SolveReport) -> Result<bool> {
    for f in bider.basis.forms() {
        if !phi_of_f(base, ext, f)?.unique {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `φ_f` for `BDer_{-1}(m0)` follows `e1 ↦ βx02, e2 ↦ βx1, e_i ↦ βe_{i-1}`.
pub fn m0_phi_shape(base: &AlgebraSpec, ext: &AlgebraSpec, bider: &SolveReport) -> Result<bool> {
    let [f] = bider.basis.forms() else {
        return Ok(false);
    };
    let phi = phi_of_f(base, ext, f)?;
    let beta = phi.images.get(&e(1)).map(|v| v.coeff(X02)).unwrap_or_default();
    if num_traits::Zero::is_zero(&beta) {
        return Ok(false);
    }
    Ok(phi.unique
        && phi.images.iter().all(|(i, v)| {
            let want = match i.degree {
                1 => Element::term(X02, beta.clone()),
                2 => Element::term(crate::graded::x(1), beta.clone()),
                d => Element::term(e(d - 1), beta.clone()),
            };
            *v == want
        })
        && !phi.images[&e(1)].support().any(|i| i == X01))
}

/// Whether the obstruction vanishes exactly on the zero parameter over the
/// grid `θ_j, λ ∈ {−1, 0, ½, 1}`, `m ∈ {2, 3}`, `q ∈ {3, 4}`.
pub fn omega_grid(horizon: i32) -> Result<(bool, usize)> {
    let values: Vec<Scalar> = vec![int(-1), int(0), frac(1, 2), int(1)];
    let mut cases = 0;
    for q in [3, 4] {
        for m in [2, 3] {
            let slots = m as usize; // m - 1 thetas and λ
            let total = values.len().pow(slots as u32);
            for code in 0..total {
                let mut c = code;
                let mut params = Vec::with_capacity(slots);
                for _ in 0..slots {
                    params.push(values[c % values.len()].clone());
                    c /= values.len();
                }
                let lambda = params.pop().unwrap();
                let p = OmegaParams::new(q, m, params, lambda)?;
                let (a, b) = omega_linearity_obstruction(&p, horizon)?;
                let vanishes = a.is_zero() && b.is_zero();
                if vanishes != p.is_zero() {
                    return Ok((false, cases));
                }
                cases += 1;
            }
        }
    }
    Ok((true, cases))
}

/// Everything the suite computes, for reuse by callers that also want the
/// reports.
pub struct Verification {
    pub checks: Vec<Check>,
    pub reports: Vec<SolveReport>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// The full suite for the given base algebras.
pub fn verify_paper(bases: &[Builtin], weights: RangeInclusive<i32>, n: i32, bound: i32) -> Result<Verification> {
    let mut checks = Vec::new();
    let mut reports = Vec::new();

    let mut structural: Vec<Builtin> = Vec::new();
    for b in bases {
        structural.push(*b);
        structural.extend(b.extension());
    }
    for b in &structural {
        let spec = b.spec(n)?;
        let (passed, detail) = match jacobi_check(&spec) {
            JacobiReport::Pass { triples } => (true, format!("{triples} triples")),
            JacobiReport::Fail { triple, defect } => (
                false,
                format!("fails at ({}, {}, {}): {}", triple.0, triple.1, triple.2, spec.render(&defect)),
            ),
        };
        checks.push(Check::new(format!("jacobi {b}"), passed, detail));
        let sub = if b.is_base() {
            center(&spec)
        } else {
            annihilator(&spec, |i| i.degree >= 1 && i.slot == 0)
        };
        checks.push(Check::new(
            format!("{} {b}", if b.is_base() { "center" } else { "annihilator" }),
            sub.dimension == 0,
            format!("dimension {} on degrees {}..{}", sub.dimension, sub.window.0, sub.window.1),
        ));
    }

    for &b in bases {
        let source = Source::Builtin(b);
        let base = b.spec(n)?;
        let ext = b.extension().expect("base algebra").spec(n)?;

        let ders = sweep(&source, Kind::Der, weights.clone(), n, bound)?;
        checks.push(sweep_check("Der", b, &ders, |k| expected_der_dim(b, k)));
        let biders = sweep(&source, Kind::Bider, weights.clone(), n, bound)?;
        checks.push(sweep_check("BDer", b, &biders, |k| expected_bider_dim(b, k)));
        let comms = sweep(&source, Kind::Commuting, weights.clone(), n, bound)?;
        checks.push(sweep_check("Commuting", b, &comms, expected_commuting_dim));

        if let Some(r) = biders.iter().find(|r| r.weight == 0) {
            let inner = inner_biderivation(&base, &int(1));
            let inner = inner.restricted_to(|x, y| x.degree + y.degree <= r.window.1);
            let ok = bider::spans_same(&base, r, &[inner])?;
            checks.push(Check::new(format!("BDer_0 = inner {b}"), ok, ""));
        }

        let mut induced_ok = true;
        for r in &comms {
            for phi in r.basis.maps() {
                let f = biderivation_from_commuting(&base, phi)?;
                let bd = biderivations_at(&biders, &base, r.weight)?;
                induced_ok &= bider::span_contains(&base, &bd, &[f])?;
            }
        }
        checks.push(Check::new(format!("commuting -> biderivation {b}"), induced_ok, ""));

        let realized: Vec<String> = ders
            .iter()
            .map(|d| realization_check(&base, &ext, d).map(|ok| (d.weight, ok)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(k, _)| k.to_string())
            .collect();
        checks.push(Check::new(
            format!("realization {b} in {}", ext.name()),
            realized.is_empty(),
            if realized.is_empty() { String::new() } else { format!("failing weights {}", realized.join(",")) },
        ));

        let mut phi_ok = true;
        for r in &biders {
            phi_ok &= phi_check(&base, &ext, r)?;
        }
        checks.push(Check::new(format!("phi_f {b}"), phi_ok, ""));
        if b == Builtin::M0 {
            if let Some(r) = biders.iter().find(|r| r.weight == -1) {
                checks.push(Check::new("phi_f shape m0 k=-1", m0_phi_shape(&base, &ext, r)?, ""));
            }
        }

        let live: Vec<&SolveReport> = ders.iter().filter(|d| d.dimension > 0).collect();
        let sandwich: Vec<(i32, bool)> = live
            .par_iter()
            .map(|d| -> Result<(i32, bool)> {
                let fam = default_family(&base, d.window, bound);
                let l = local_overapprox(&base, d, &fam)?;
                let t = two_local_overapprox(&base, d, &fam)?;
                let ok = l.closed_form_match == Some(true)
                    && t.closed_form_match == Some(true)
                    && report_contains(&base, &l, &t)?;
                Ok((d.weight, ok))
            })
            .collect::<Result<_>>()?;
        let bad: Vec<String> = sandwich.iter().filter(|(_, ok)| !ok).map(|(k, _)| k.to_string()).collect();
        checks.push(Check::new(
            format!("local/2-local sandwich {b}"),
            bad.is_empty(),
            format!("{} weights{}", sandwich.len(), if bad.is_empty() { String::new() } else { format!("; failing {}", bad.join(",")) }),
        ));

        reports.extend(ders);
        reports.extend(biders);
        reports.extend(comms);
    }

    let (ok, cases) = omega_grid(n)?;
    checks.push(Check::new("omega obstruction grid", ok, format!("{cases} parameter choices")));
    Ok(Verification { checks, reports })
}

fn biderivations_at(biders: &[SolveReport], base: &AlgebraSpec, k: i32) -> Result<SolveReport> {
    match biders.iter().find(|r| r.weight == k) {
        Some(r) => Ok(r.clone()),
        None => biderivation_space(base, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let v = verify_paper(&Builtin::BASE, -2..=3, 20, 12).unwrap();
        for c in &v.checks {
            assert!(c.passed, "{} {}", c.name, c.detail);
        }
    }

    #[test]
    fn file_source_stability_uses_truncation() {
        let spec = Builtin::M0.spec(24).unwrap();
        let r = annotated(&Source::Spec(spec), Kind::Der, 1, 24, 20).unwrap();
        assert_eq!(r.stability, Some(true));
        assert_eq!(r.closed_form_match, None);
    }

    #[test]
    fn omega_grid_holds() {
        let (ok, cases) = omega_grid(20).unwrap();
        assert!(ok);
        assert_eq!(cases, 2 * (16 + 64));
    }
}
