//! Cross-checks between independent routes to the same spaces.

use maxclass::bider::biderivation_space_full;
use maxclass::commuting::{biderivation_from_commuting, commuting_space};
use maxclass::der::{derivation_space, is_derivation, propagated_space};
use maxclass::graded::e;
use maxclass::linalg::{subspace_equal, Vector};
use maxclass::scalar::zero;
use maxclass::{bider, Builtin, GradedMap, SolveReport};
use rayon::prelude::*;

fn coords(m: &GradedMap, k: i32, window: (i32, i32)) -> Vector {
    (window.0..=window.1)
        .map(|i| m.image(e(i)).unwrap().coeff(e(i + k)))
        .collect()
}

fn span(r: &SolveReport) -> Vec<Vector> {
    r.basis.maps().iter().map(|m| coords(m, r.weight, r.window)).collect()
}

/// Expected `dim Der_k`, written out per algebra.
fn der_dims(b: Builtin) -> [usize; 13] {
    // k = -4 ..= 8
    match b {
        Builtin::M0 => [0, 0, 0, 0, 2, 2, 2, 2, 2, 2, 2, 2, 2],
        Builtin::L1 => [0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1],
        _ => [0, 0, 0, 0, 1, 1, 2, 2, 2, 2, 2, 2, 2],
    }
}

#[test]
fn nullspace_and_propagation_agree() {
    let jobs: Vec<(Builtin, i32, i32)> = [Builtin::M0, Builtin::L1, Builtin::M2]
        .into_iter()
        .flat_map(|b| [32, 48].into_iter().flat_map(move |n| (-4..=8).map(move |k| (b, n, k))))
        .collect();
    jobs.par_iter().for_each(|&(b, n, k)| {
        let spec = b.spec(n).unwrap();
        let solved = derivation_space(&spec, k).unwrap();
        assert_eq!(solved.dimension, der_dims(b)[(k + 4) as usize], "{b} N={n} k={k}");
        let propagated = propagated_space(b, &spec, k).unwrap();
        for d in &propagated {
            assert!(is_derivation(&spec, d).unwrap().passed(), "{b} N={n} k={k}");
        }
        let p: Vec<Vector> = propagated.iter().map(|m| coords(m, k, solved.window)).collect();
        let p: Vec<Vector> = p.into_iter().filter(|v| v.iter().any(|c| *c != zero())).collect();
        assert_eq!(p.len(), solved.dimension, "{b} N={n} k={k}");
        assert!(subspace_equal(&span(&solved), &p).unwrap(), "{b} N={n} k={k}");
    });
}

#[test]
fn right_leibniz_is_redundant_for_skew_solutions() {
    for b in [Builtin::M0, Builtin::L1, Builtin::M2] {
        let spec = b.spec(24).unwrap();
        for k in -2..=3 {
            let left = maxclass::bider::biderivation_space(&spec, k).unwrap();
            let full = biderivation_space_full(&spec, k).unwrap();
            assert_eq!(left.dimension, full.dimension, "{b} k={k}");
        }
    }
}

#[test]
fn commuting_maps_induce_biderivations() {
    for b in [Builtin::M0, Builtin::L1, Builtin::M2] {
        let spec = b.spec(32).unwrap();
        let r = commuting_space(&spec, 0).unwrap();
        let bd = maxclass::bider::biderivation_space(&spec, 0).unwrap();
        for phi in r.basis.maps() {
            let f = biderivation_from_commuting(&spec, phi).unwrap();
            assert!(bider::span_contains(&spec, &bd, &[f]).unwrap(), "{b}");
        }
    }
}
