use maxclass::bider::{biderivation_space, inner_biderivation};
use maxclass::commuting::commuting_space;
use maxclass::der::{ad, derivation_space, is_derivation};
use maxclass::graded::{e, write_algebra_file};
use maxclass::linalg::{self, annihilating_functionals, nullspace, RatMatrix, Vector};
use maxclass::local::{local_overapprox, TestFamily};
use maxclass::report::{parse_report, write_report, Format};
use maxclass::scalar::frac;
use maxclass::{
    builtin_algebra, parse_algebra_file, AlgebraSpec, BasisIndex, Builtin, Element, GradedMap, Scalar,
};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| frac(n, d))
}

fn builtin() -> impl Strategy<Value = Builtin> {
    prop::sample::select(Builtin::ALL.to_vec())
}

fn base() -> impl Strategy<Value = Builtin> {
    prop::sample::select(Builtin::BASE.to_vec())
}

/// A random element supported on the basis vectors of `spec` with degree in
/// `lo..=hi`.
fn element(spec: &AlgebraSpec, lo: i32, hi: i32) -> impl Strategy<Value = Element> {
    let basis = spec.basis_in(lo, hi);
    prop::collection::vec((prop::sample::select(basis), scalar()), 0..5)
        .prop_map(|terms| Element::from_terms(terms))
}

fn homogeneous(spec: &AlgebraSpec, degree: i32) -> impl Strategy<Value = Element> {
    element(spec, degree, degree)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(
        prop::collection::vec(prop_oneof![3 => Just(frac(0, 1)), 2 => scalar()], cols),
        rows,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_bilinear((spec, x, y, z) in builtin().prop_flat_map(|b| {
        let spec = b.spec(12).unwrap();
        let lo = spec.min_degree().unwrap();
        (Just(spec.clone()), element(&spec, lo, 4), element(&spec, lo, 4), element(&spec, lo, 4))
    }), c in scalar()) {
        let lhs = spec.bracket(&(&x + &(&c * &y)), &z).unwrap();
        let rhs = spec.bracket(&x, &z).unwrap() + &c * &spec.bracket(&y, &z).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(spec.bracket(&x, &y).unwrap(), -spec.bracket(&y, &x).unwrap());
        prop_assert!(spec.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn truncation_agrees_with_direct_construction(b in builtin(), n in 6i32..14, m in 4i32..6) {
        let small = n - m;
        prop_assume!(small >= 4);
        let big = b.spec(n).unwrap();
        let direct = b.spec(small).unwrap();
        prop_assert!(big.truncated(small).same_structure(&direct));
    }

    #[test]
    fn algebra_file_round_trip(b in builtin(), n in 4i32..12) {
        let spec = b.spec(n).unwrap();
        let back = parse_algebra_file(&write_algebra_file(&spec)).unwrap();
        prop_assert!(back.same_structure(&spec));
    }

    #[test]
    fn nullspace_round_trip(m in (1usize..6, 1usize..7).prop_flat_map(|(r, c)| matrix(r, c))) {
        let mat = RatMatrix::from_rows(&m).unwrap();
        let null = nullspace(&mat);
        prop_assert_eq!(linalg::rank(&mat) + null.len(), mat.ncols());
        for v in &null {
            prop_assert!(mat.apply(v).unwrap().iter().all(|x| *x == frac(0, 1)));
        }
    }

    #[test]
    fn annihilator_kills_span(m in (1usize..5, 1usize..7).prop_flat_map(|(r, c)| matrix(r, c))) {
        let n = m[0].len();
        let f = annihilating_functionals(&m, n).unwrap();
        prop_assert_eq!(f.len() + linalg::echelonize(&m).unwrap().len(), n);
        for l in &f {
            for v in &m {
                let dot: Scalar = l.iter().zip(v).map(|(a, b)| a * b).sum();
                prop_assert_eq!(dot, frac(0, 1));
            }
        }
    }

    #[test]
    fn subspace_equal_ignores_row_operations(
        m in (1usize..5, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c)),
        c in scalar(),
        perm in any::<bool>(),
    ) {
        let mut other = m.clone();
        if other.len() > 1 {
            let first = other[0].clone();
            for (a, b) in other[1].iter_mut().zip(&first) {
                *a += &c * b;
            }
            if perm {
                other.swap(0, 1);
            }
        }
        prop_assert!(linalg::subspace_equal(&m, &other).unwrap());
        prop_assert!(linalg::subspace_contains(&m, &other).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn inner_derivations_pass(b in base(), k in 1i32..5, seed in 0usize..1000) {
        let spec = b.spec(16).unwrap();
        let basis: Vec<BasisIndex> = spec.component(k).collect();
        let x = Element::term(basis[seed % basis.len()], frac(seed as i64 % 7 - 3, 1 + seed as i64 % 2));
        let d = ad(&spec, &x).unwrap();
        prop_assert!(is_derivation(&spec, &d).unwrap().passed());
    }

    #[test]
    fn random_sparse_inner_derivations_pass((spec, x) in builtin().prop_flat_map(|b| {
        let spec = b.spec(16).unwrap();
        let lo = spec.min_degree().unwrap();
        (lo..=5).prop_flat_map(move |k| (Just(spec.clone()), homogeneous(&spec, k)))
    })) {
        let d = ad(&spec, &x).unwrap();
        prop_assert!(is_derivation(&spec, &d).unwrap().passed());
    }

    /// `[φ(x), x] = 0` for a random `x` iff every polarized pair on the
    /// support vanishes.
    #[test]
    fn polarization_matches_definition(
        b in base(),
        images in prop::collection::vec((1i32..=6, scalar()), 1..6),
        x in prop::collection::vec((1i32..=6, scalar()), 1..4),
        k in 0i32..2,
    ) {
        let spec = b.spec(16).unwrap();
        let mut phi = GradedMap::zero(k, (1, 10));
        for (d, c) in images {
            phi.add_to(e(d), &Element::term(e(d + k), c)).unwrap();
        }
        let x = Element::from_terms(x.into_iter().map(|(d, c)| (e(d), c)));
        let direct = spec.bracket(&phi.apply(&x).unwrap(), &x).unwrap().is_zero();
        let support: Vec<BasisIndex> = x.support().collect();
        let mut polar = Element::zero();
        for &a in &support {
            for &bb in &support {
                let term = spec.bracket(&phi.image(a).unwrap(), &Element::basis(bb)).unwrap();
                polar.add_scaled(&(x.coeff(a) * x.coeff(bb)), &term);
            }
        }
        // the quadratic form equals the definitional bracket
        prop_assert_eq!(polar.is_zero(), direct);
    }

    #[test]
    fn machine_report_round_trip(b in base(), k in -2i32..4, kind in 0u8..3) {
        let spec = b.spec(14).unwrap();
        let mut r = match kind {
            0 => derivation_space(&spec, k).unwrap(),
            1 => biderivation_space(&spec, k).unwrap(),
            _ => commuting_space(&spec, k).unwrap(),
        };
        r.closed_form_match = Some(k % 2 == 0);
        let line = write_report(&r, Format::Machine);
        prop_assert!(!line.contains('\n'));
        let back = parse_report(&line).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(write_report(&back, Format::Machine), line);
    }

    /// Adding test points can only shrink the over-approximation.
    #[test]
    fn family_monotonicity(b in base(), k in 0i32..3, extra in prop::collection::vec((1i32..=12, 1i32..=12), 1..6)) {
        let spec = b.spec(24).unwrap();
        let der = derivation_space(&spec, k).unwrap();
        let mut small: Vec<Element> = (1..=12).map(|i| Element::basis(e(i))).collect();
        small.push(Element::sum_of([e(1), e(2), e(12)]));
        let mut large = small.clone();
        for (a, c) in extra {
            if a != c {
                large.push(Element::sum_of([e(a), e(c)]));
            }
        }
        let rs = local_overapprox(&spec, &der, &TestFamily::points(small)).unwrap();
        let rl = local_overapprox(&spec, &der, &TestFamily::points(large)).unwrap();
        prop_assert_eq!(rs.window, rl.window);
        prop_assert!(maxclass::local::report_contains(&spec, &rs, &rl).unwrap());
        prop_assert!(rl.dimension >= der.dimension);
    }
}

#[test]
fn zero_dimensional_report_has_empty_basis() {
    let spec = builtin_algebra("m0", 20).unwrap();
    let r = derivation_space(&spec, -3).unwrap();
    let line = write_report(&r, Format::Machine);
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["dimension"], 0);
    assert_eq!(v["basis"], serde_json::json!([]));
}

#[test]
fn der0_m0_record() {
    let spec = builtin_algebra("m0", 20).unwrap();
    let r = derivation_space(&spec, 0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&write_report(&r, Format::Machine)).unwrap();
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["basis"].as_array().unwrap().len(), 2);
    assert_eq!(v["basis"][0][0]["coeff"], "1/1");
    assert_eq!(v["kind"], "derivation");
}

#[test]
fn inner_form_is_biderivation_on_every_builtin() {
    for b in Builtin::ALL {
        let spec = b.spec(12).unwrap();
        let f = inner_biderivation(&spec, &frac(-3, 2));
        assert!(maxclass::bider::is_biderivation(&spec, &f).unwrap().passed(), "{b}");
    }
}
