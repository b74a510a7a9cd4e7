use hermitian_weyl::catalog::{builtin, builtin_manifolds, parse_manifold_config, Tag};
use hermitian_weyl::conditions::{
    classify_structure, evaluate_identity, gauss_legendre, integrate_density, prop21_equivalence, registry, run_suite,
    write_csv, write_json, write_text, FrameSeed, PointAnalysis, QuadratureSpec, RecordKind, StructureClass,
    SuiteSettings, Tolerances,
};
use hermitian_weyl::hermitian::q_j_integrand;
use hermitian_weyl::pointgeom::Vec4;
use hermitian_weyl::GeomError;

fn settings(points: usize, seed: u64, ids: &[&str]) -> SuiteSettings {
    SuiteSettings {
        points,
        seed,
        identities: ids.iter().map(|s| s.to_string()).collect(),
        ..SuiteSettings::default()
    }
}

#[test]
fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
    for n in [1, 2, 5, 16, 24] {
        let (x, w) = gauss_legendre(n);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        for deg in 0..2 * n {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-12, "n={n} deg={deg}: {got} vs {want}");
        }
    }
}

#[test]
fn volume_of_flat_torus() {
    let spec = builtin("flat_torus").unwrap();
    let r = integrate_density(&spec, |_| Ok(vec![1.0]), &QuadratureSpec::default()).unwrap();
    let want = (2.0 * std::f64::consts::PI).powi(4);
    assert!((r.value[0] - want).abs() / want < 1e-10);
    assert_eq!(r.method, "constant");
}

#[test]
fn tensor_rule_on_nonconstant_density() {
    let spec = builtin("flat_torus").unwrap();
    let r = integrate_density(
        &spec,
        |p| Ok(vec![p[0].sin().powi(2) * p[1].cos().powi(2)]),
        &QuadratureSpec::default(),
    )
    .unwrap();
    let pi = std::f64::consts::PI;
    let want = pi * pi * (2.0 * pi).powi(2);
    assert_eq!(r.method, "gauss-legendre");
    assert!((r.value[0] - want).abs() / want < 1e-10, "{} vs {want}", r.value[0]);
    assert!(r.error_estimate[0] < 1e-8 * want);
}

#[test]
fn q_vanishes_on_flat_torus_and_is_constant_on_nilmanifold() {
    let seed = Vec4::from(FrameSeed::default().seed);
    let q = |id: &str| {
        let spec = builtin(id).unwrap();
        let density = |p: &[f64; 4]| {
            let a = PointAnalysis::compute(&spec, p, &seed, 0.0)?;
            Ok(vec![q_j_integrand(a.bundle(), &a.frame.j, a.mp())?])
        };
        let r = integrate_density(&spec, density, &QuadratureSpec::default()).unwrap();
        let a = PointAnalysis::compute(&spec, &[0.3, 0.4, 0.5, 0.6], &seed, 0.0).unwrap();
        let point = q_j_integrand(a.bundle(), &a.frame.j, a.mp()).unwrap();
        (r.value[0], point * spec.coordinate_volume())
    };
    let (flat, _) = q("flat_torus");
    assert!(flat.abs() < 1e-10);
    let (kt, want) = q("kodaira_thurston");
    assert!((kt - want).abs() / want.abs() < 1e-8, "{kt} vs {want}");
}

#[test]
fn integration_needs_compactness() {
    let spec = builtin("fubini_study_cp2").unwrap();
    let r = integrate_density(&spec, |_| Ok(vec![1.0]), &QuadratureSpec::default());
    assert!(matches!(r, Err(GeomError::NonCompact(_))));
}

#[test]
fn evaluate_identity_errors() {
    let spec = builtin("flat_torus").unwrap();
    let f = FrameSeed::default();
    assert!(matches!(
        evaluate_identity("EQ999", &spec, &[1.0; 4], &f),
        Err(GeomError::UnknownIdentity(_))
    ));
    assert!(matches!(
        evaluate_identity("EQ42", &spec, &[-3.0, 1.0, 1.0, 1.0], &f),
        Err(GeomError::OutOfDomain(_))
    ));
}

#[test]
fn flat_torus_eq82_is_trivially_applicable() {
    let spec = builtin("flat_torus").unwrap();
    let r = evaluate_identity("eq82", &spec, &[1.0, 2.0, 3.0, 4.0], &FrameSeed::default()).unwrap();
    assert!(r.applicable);
    assert_eq!(r.lhs, Some(0.0));
    assert!(r.rhs.unwrap().abs() < 1e-30);
}

#[test]
fn kahler_records_skip_non_kahler_points() {
    let spec = builtin("kodaira_thurston").unwrap();
    let r = evaluate_identity("EQ82", &spec, &[0.5; 4], &FrameSeed::default()).unwrap();
    assert!(!r.applicable);
    assert!(r.rel_residual.is_none() && r.lhs.is_none());
}

#[test]
fn ricci_split_holds_everywhere() {
    for spec in builtin_manifolds() {
        for p in spec.sample_points(5, 21) {
            let r = evaluate_identity("EQ42", &spec, &p, &FrameSeed::default()).unwrap();
            assert!(r.rel_residual.unwrap() < 1e-9, "{}: {:?}", spec.id, r);
        }
    }
}

#[test]
fn eq116_on_nilmanifold() {
    let spec = builtin("kodaira_thurston").unwrap();
    for p in spec.sample_points(10, 5) {
        let r = evaluate_identity("EQ116", &spec, &p, &FrameSeed::default()).unwrap();
        assert!(r.rel_residual.unwrap() < 1e-7);
        // the right side is positive here
        assert!(r.rhs.unwrap() > 0.1);
    }
}

#[test]
fn flat_torus_suite_passes_at_1e_9() {
    let r = run_suite(&builtin("flat_torus").unwrap(), &settings(100, 1, &[])).unwrap();
    assert!(r.passed());
    for i in &r.identities {
        if let Some(x) = i.max_rel_residual {
            assert!(x < 1e-9, "{} {x}", i.id);
        }
    }
}

#[test]
fn fubini_study_kahler_identities() {
    let ids = ["EQ82", "EQ83", "EQ84", "EQ85", "EQ86", "EQ87", "EQ88", "EQ114"];
    let r = run_suite(&builtin("fubini_study_cp2").unwrap(), &settings(50, 2, &ids)).unwrap();
    for id in ids {
        let s = r.identity(id).unwrap();
        assert_eq!(s.applicable_points, 50, "{id}");
        assert!(s.max_rel_residual.unwrap() < 1e-7, "{id}");
    }
}

#[test]
fn nilmanifold_violates_the_kahler_condition() {
    let r = run_suite(&builtin("kodaira_thurston").unwrap(), &settings(50, 3, &["EQ01"])).unwrap();
    let s = r.identity("EQ01").unwrap();
    assert_eq!(s.verdict, "violated (expected: strictly almost Kähler)");
    assert!(s.min_signed.unwrap() > 1e-4);
    assert!(!r.passed());
}

#[test]
fn classification_of_catalog_structures() {
    let tol = Tolerances::default();
    let cases = [
        ("fubini_study_cp2", StructureClass::Kahler),
        ("flat_torus", StructureClass::Kahler),
        ("kodaira_thurston", StructureClass::AlmostKahlerNonKahler),
        ("round_conformal", StructureClass::HermitianNonKahler),
        ("perturbed_j", StructureClass::GenericAlmostHermitian),
    ];
    for (id, want) in cases {
        assert_eq!(
            classify_structure(&builtin(id).unwrap(), 10, 0, &tol).unwrap().verdict,
            want,
            "{id}"
        );
    }
}

#[test]
fn every_builtin_confirms_its_tags() {
    for spec in builtin_manifolds() {
        let r = run_suite(&spec, &settings(10, 4, &[])).unwrap();
        assert!(r.errors.is_empty(), "{}: {:?}", spec.id, r.errors);
        for t in &r.tags {
            assert!(t.confirmed, "{}: {} residual {:e}", spec.id, t.tag, t.residual);
        }
        // identities proper hold everywhere; only structure conditions may fail
        for i in r.identities.iter().filter(|i| i.kind != RecordKind::Condition) {
            assert!(i.passed, "{}: {} {:?}", spec.id, i.id, i.max_rel_residual);
        }
    }
}

#[test]
fn kahler_potentials_are_parallel() {
    for id in ["fubini_study_cp2", "complex_hyperbolic_ch2", "kahler_potential_generic"] {
        let spec = builtin(id).unwrap();
        for p in spec.sample_points(50, 6) {
            let a = PointAnalysis::compute(&spec, &p, &Vec4::from(FrameSeed::default().seed), 0.0).unwrap();
            assert!(a.nj.norm2.sqrt() < 1e-9, "{id}");
        }
    }
}

#[test]
fn m_plus_gate_on_conformally_flat_metric() {
    let r = run_suite(
        &builtin("round_conformal").unwrap(),
        &settings(10, 0, &["EQ04", "EQ05"]),
    )
    .unwrap();
    for id in ["EQ04", "EQ05"] {
        let s = r.identity(id).unwrap();
        assert_eq!(s.applicable_points, 0);
        assert_eq!(s.verdict, "not applicable");
    }
    assert_eq!(r.wplus_support_fraction, 0.0);
}

#[test]
fn suite_is_deterministic() {
    let spec = builtin("kahler_potential_generic").unwrap();
    let a = run_suite(&spec, &settings(8, 9, &[])).unwrap();
    let b = run_suite(&spec, &settings(8, 9, &[])).unwrap();
    assert_eq!(a, b);
}

#[test]
fn more_points_keep_kahler_passes() {
    for id in ["fubini_study_cp2", "kahler_potential_generic"] {
        let spec = builtin(id).unwrap();
        let small = run_suite(&spec, &settings(5, 1, &[])).unwrap();
        let large = run_suite(&spec, &settings(40, 1, &[])).unwrap();
        for (s, l) in small.identities.iter().zip(&large.identities) {
            if s.passed {
                assert!(l.passed, "{id} {}", s.id);
            }
        }
    }
}

#[test]
fn suite_rejects_zero_points() {
    let r = run_suite(&builtin("flat_torus").unwrap(), &settings(0, 0, &[]));
    assert!(matches!(r, Err(GeomError::Validation(_))));
}

#[test]
fn prop21_is_trivial_on_flat_points() {
    let r = prop21_equivalence(&builtin("euclidean_flat").unwrap(), 5, 0).unwrap();
    assert!(r.coherent);
    assert!(r.points.iter().all(|p| p.residuals == [0.0; 4]));
}

#[test]
fn config_copy_of_euclidean_flat_has_same_residuals() {
    let text = "[manifold]\nid = euclidean_flat\ncoords = x, y, z, t\ndomain = [-1, 1], [-1, 1], [-1, 1], [-1, 1]\n\
description = Euclidean R^4 with the standard complex structure\n\
[metric]\ng_11 = 1\ng_22 = 1\ng_33 = 1\ng_44 = 1\n\
[structure]\nJ_2_1 = 1\nJ_1_2 = -1\nJ_4_3 = 1\nJ_3_4 = -1\n\
[tags]\nflat, einstein, kahler, almost-kahler, constant-s, conformally-flat\n";
    let spec = parse_manifold_config(text).unwrap();
    let a = run_suite(&spec, &settings(5, 3, &[])).unwrap();
    let b = run_suite(&builtin("euclidean_flat").unwrap(), &settings(5, 3, &[])).unwrap();
    assert_eq!(a.identities, b.identities);
    assert_eq!(a.tags, b.tags);
}

#[test]
fn reports_serialize() {
    let spec = builtin("fubini_study_cp2").unwrap();
    let r = run_suite(&spec, &settings(3, 0, &["EQ42", "EQ82"])).unwrap();
    let mut json = Vec::new();
    write_json(&mut json, "check", &r).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["manifold"], "fubini_study_cp2");
    assert_eq!(v["identities"][1]["id"], "EQ82");
    assert!(v["conventions"]["laplacian"].is_string());
    assert!(v["identities"][0]["anchor"].is_string());

    let mut csv = Vec::new();
    write_csv(&mut csv, &[&r]).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text
        .lines()
        .nth(2)
        .unwrap()
        .starts_with("fubini_study_cp2,EQ82,identity,Kähler,3,"));

    let mut txt = Vec::new();
    write_text(&mut txt, &r).unwrap();
    let txt = String::from_utf8(txt).unwrap();
    assert!(txt
        .lines()
        .any(|l| l.starts_with("EQ82") && l.contains("holds") && l.contains("\"|W₊|² = S²/6\"")));
    assert!(txt.ends_with("result: pass\n"));
}

#[test]
fn registry_ids_are_unique_and_anchored() {
    let mut ids = std::collections::BTreeSet::new();
    for r in registry() {
        assert!(ids.insert(r.id), "duplicate {}", r.id);
        assert!(!r.anchor.is_empty());
        assert_eq!(r.evaluate.is_none(), r.kind == RecordKind::Integral, "{}", r.id);
    }
    for id in [
        "EQ01", "EQ06", "EQ72", "EQ116", "EQ117", "EQ118", "EQ126", "EQ130", "EQ131", "EQ133",
    ] {
        assert!(ids.contains(id), "{id}");
    }
}

#[test]
fn tag_lookup_and_display() {
    assert_eq!(Tag::parse("Kähler"), Some(Tag::Kahler));
    assert_eq!(Tag::parse("almost_kahler"), Some(Tag::AlmostKahler));
    assert_eq!(Tag::parse("nope"), None);
}

#[test]
fn rounding_level_curvature_counts_as_flat() {
    // e^{ax}(dx² + dy²) is flat; its curvature is pure rounding
    let text = "[manifold]\nid = hidden_flat\ncoords = x, y, z, t\ndomain = [-1, 1], [-1, 1], [-1, 1], [-1, 1]\n\
[metric]\ng_11 = exp(0.3*x)\ng_22 = exp(0.3*x)\ng_33 = 1\ng_44 = 1\n\
[structure]\nJ_2_1 = 1\nJ_1_2 = -1\nJ_4_3 = 1\nJ_3_4 = -1\n[tags]\nflat, kahler\n";
    let spec = parse_manifold_config(text).unwrap();
    let r = run_suite(&spec, &settings(10, 0, &[])).unwrap();
    assert_eq!(r.wplus_support_fraction, 0.0);
    assert_eq!(r.classification.verdict, StructureClass::Kahler);
    assert!(r.passed());
}
