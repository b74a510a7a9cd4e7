use hermitian_weyl::catalog::{builtin_manifolds, ManifoldSpec};
use hermitian_weyl::conditions::{gauss_legendre, FrameSeed, PointAnalysis, Tolerances, Verdict};
use hermitian_weyl::pointgeom::Vec4;
use proptest::prelude::*;

fn catalog_point() -> impl Strategy<Value = (ManifoldSpec, [f64; 4])> {
    let specs = builtin_manifolds();
    (0..specs.len(), prop::array::uniform4(0.1f64..0.9)).prop_map(move |(i, u)| {
        let s = specs[i].clone();
        let p = std::array::from_fn(|k| s.domain[k].0 + u[k] * (s.domain[k].1 - s.domain[k].0));
        (s, p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_free_scalars_ignore_supplement_rotation((spec, p) in catalog_point(), alpha in 0.0f64..6.3) {
        let seed = Vec4::from(FrameSeed::default().seed);
        let a = PointAnalysis::compute(&spec, &p, &seed, 0.0).unwrap();
        let b = PointAnalysis::compute(&spec, &p, &seed, alpha).unwrap();
        let c = a.scale.max(1e-14);
        prop_assert!((a.wplus.norm2 - b.wplus.norm2).abs() <= 1e-10 * c * c);
        prop_assert!((a.star.s_star - b.star.s_star).abs() <= 1e-10 * c);
        prop_assert!((a.nj.norm2 - b.nj.norm2).abs() <= 1e-10 * c);
        prop_assert!((a.star.rtilde_norm2 - b.star.rtilde_norm2).abs() <= 1e-10 * c * c);
    }

    #[test]
    fn wplus_dominates_its_scalar_part((spec, p) in catalog_point()) {
        let a = PointAnalysis::compute(&spec, &p, &Vec4::from(FrameSeed::default().seed), 0.0).unwrap();
        let bound = 0.375 * (a.star.s_star - a.s() / 3.0).powi(2);
        prop_assert!(a.wplus.norm2 - bound >= -1e-9 * a.scale.max(1e-14).powi(2));
    }

    #[test]
    fn wplus_is_symmetric_traceless((spec, p) in catalog_point()) {
        let a = PointAnalysis::compute(&spec, &p, &Vec4::from(FrameSeed::default().seed), 0.0).unwrap();
        let c = a.scale.max(1e-14);
        prop_assert!(a.wplus.trace().abs() <= 1e-10 * c);
        prop_assert!(a.wplus.asymmetry() <= 1e-10 * c);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials(n in 1usize..20, coeffs in prop::collection::vec(-2.0f64..2.0, 1..40)) {
        let deg = (2 * n - 1).min(coeffs.len() - 1);
        let (x, w) = gauss_legendre(n);
        let poly = |t: f64| coeffs[..=deg].iter().rev().fold(0.0, |acc, c| acc * t + c);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * poly(*x)).sum();
        let want: f64 = coeffs[..=deg].iter().enumerate().map(|(k, c)| if k % 2 == 0 { 2.0 * c / (k as f64 + 1.0) } else { 0.0 }).sum();
        prop_assert!((got - want).abs() < 1e-11 * (1.0 + want.abs()));
    }

    #[test]
    fn verdict_bands_are_ordered(pass in 1e-12f64..1e-6, ratio in 1.0f64..1e6, r in 0.0f64..1.0) {
        let t = Tolerances { pass, fail: pass * ratio };
        let v = t.verdict(r);
        let expected = if r <= t.pass { Verdict::Holds } else if r > t.fail { Verdict::Violated } else { Verdict::Indeterminate };
        prop_assert_eq!(v, expected);
    }
}
