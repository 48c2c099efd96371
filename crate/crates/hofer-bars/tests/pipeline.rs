mod common;

use common::s;
use hofer_bars::barcodes::{barcodes_to_svg, reduce_filtered_complex, Field, FilteredComplex, Generator};
use hofer_bars::embedding::{build_generators, f0_profile, phi_profile, EmbeddingPoint};
use hofer_bars::homotopy::{case_homotopies, CaseData, CaseTag};
use hofer_bars::tracker::{boundary_depth_lower_bound, dispatch_case, run_certificate, tracked_degree};
use hofer_bars::{make_profile, Error, ManifoldParams, PLProfile, Scalar};

#[test]
fn sphere_certificate_serializes() {
    let p = ManifoldParams::sphere(s("9/10")).unwrap();
    let fam = build_generators(&p, &s("1/20"), 2).unwrap();
    let (data, k) = CaseData::from_embedding(&fam, &[s("1/2"), s("3/4")], &p, 5).unwrap();
    assert_eq!(k, 1);
    assert_eq!(dispatch_case(&p), CaseTag::Case1);
    let cert = run_certificate(&p, &data).unwrap();
    assert_eq!(cert.tracked_degree, tracked_degree(CaseTag::Case1, 1));
    let js = cert.to_json();
    for key in ["case", "trackedDegree", "finalBar", "lowerBound", "eventLog"] {
        assert!(js.get(key).is_some(), "missing {key} in {js}");
    }
    assert!(!cert.events.is_empty());
}

#[test]
fn homotopy_legs_meet_at_g1() {
    let p = ManifoldParams::sphere(s("9/10")).unwrap();
    let fam = build_generators(&p, &s("1/20"), 1).unwrap();
    let (data, _) = CaseData::from_embedding(&fam, &[Scalar::one()], &p, 1).unwrap();
    let (h1, h2) = case_homotopies(CaseTag::Case1, &data).unwrap();
    let end = h1.profile_at(h1.t_end());
    let start = h2.profile_at(h2.t_start());
    let r = s("9/10");
    for i in 0..=90 {
        let x = Scalar::new(i, 100);
        assert_eq!(end.value_at(&x), start.value_at(&x));
        assert_eq!(end.value_at(&x), data.g1().value_at(&x));
    }
    assert!(h2.profile_at(h2.t_end()).value_at(&r) < Scalar::zero());
}

#[test]
fn zero_embedding_point_has_no_bound() {
    let p = ManifoldParams::sphere(s("9/10")).unwrap();
    let fam = build_generators(&p, &s("1/20"), 2).unwrap();
    let err = boundary_depth_lower_bound(&[Scalar::zero(), Scalar::zero()], &fam, &p, 0).unwrap_err();
    assert_eq!(err, Error::AllZero);
}

#[test]
fn generators_sum_to_phi() {
    let p = ManifoldParams::sphere(s("9/10")).unwrap();
    let fam = build_generators(&p, &s("1/20"), 3).unwrap();
    let a = EmbeddingPoint::new(None, vec![s("1/3"), Scalar::zero(), s("1")]).unwrap();
    let phi = phi_profile(&a, &fam).unwrap();
    assert!(!phi.is_zero());
    let peak = phi.max_value();
    assert_eq!(peak, s("9/10"));
}

#[test]
fn f0_needs_small_epsilon() {
    let p = ManifoldParams::sphere(s("9/10")).unwrap();
    assert!(matches!(f0_profile(&p, &s("1/4"), &s("1/100")), Err(Error::ParameterError(_))));
    let f = f0_profile(&p, &s("1/20"), &s("1/100")).unwrap();
    assert_eq!(f.value_at(&Scalar::zero()), s("9/10"));
    assert_eq!(f.value_at(&s("9/10")), Scalar::zero());
}

#[test]
fn slope_condition_is_enforced() {
    let r = s("1");
    let pts = [(Scalar::zero(), Scalar::zero()), (s("1/2"), s("1/4")), (r.clone(), s("5/4"))];
    let err = make_profile(&pts, &r).unwrap_err();
    assert!(matches!(err, Error::SlopeConditionViolation { .. }), "{err}");
    let text = "R=1\n0 0\n1/2 1/4\n1 3/8\n";
    let f = PLProfile::parse_text(text).unwrap();
    assert_eq!(PLProfile::parse_text(&f.to_text()).unwrap(), f);
}

#[test]
fn circle_complex_over_both_fields() {
    // A triangle boundary filled late: one H1 bar [3, 5).
    let g = |d, a: i64, l: &str| Generator { degree: d, action: Scalar::from_int(a), label: l.into() };
    let gens = vec![g(0, 0, "a"), g(0, 1, "b"), g(0, 1, "c"), g(1, 2, "ab"), g(1, 2, "bc"), g(1, 3, "ca"), g(2, 5, "t")];
    let one = Scalar::one;
    let bd = vec![
        vec![],
        vec![],
        vec![],
        vec![(1, one()), (0, -one())],
        vec![(2, one()), (1, -one())],
        vec![(0, one()), (2, -one())],
        vec![(3, one()), (4, one()), (5, one())],
    ];
    let k = FilteredComplex::new(gens, bd);
    for field in [Field::Rational, Field::Z2] {
        let codes = reduce_filtered_complex(&k, field).unwrap();
        let h1 = &codes[&1];
        assert_eq!(h1.len(), 1);
        assert_eq!(h1.bars()[0].length(), Some(Scalar::from_int(2)));
        assert_eq!(codes[&0].bars().iter().filter(|b| b.is_infinite()).count(), 1);
        let svg = barcodes_to_svg(&codes, Some("triangle"));
        assert!(svg.starts_with("<svg") && svg.contains("triangle"));
    }
}

#[test]
fn non_complex_is_rejected() {
    let g = |d: i64, l: &str| Generator { degree: d, action: Scalar::from_int(d), label: l.into() };
    let k = FilteredComplex::new(vec![g(0, "v"), g(1, "e"), g(2, "f")], vec![vec![], vec![(0, Scalar::one())], vec![(1, Scalar::one())]]);
    assert!(matches!(reduce_filtered_complex(&k, Field::Rational), Err(Error::NotAComplex(_))));
}
