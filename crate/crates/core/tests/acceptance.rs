//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::time::{Duration, Instant};

use hermitian_weyl::catalog::{builtin, builtin_manifolds, ManifoldSpec};
use hermitian_weyl::cli;
use hermitian_weyl::conditions::{
    check_integral_formulas, classify_structure, conformal_check, evaluate_identity, integrate_density,
    prop21_equivalence, run_suite, FrameSeed, Gates, PointAnalysis, QuadratureSpec, StructureClass, SuiteSettings,
    Tolerances, Verdict,
};
use hermitian_weyl::exprjet::{eval_jet, parse_expression};
use hermitian_weyl::pointgeom::Vec4;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn seed_vec() -> Vec4 {
    Vec4::from(FrameSeed::default().seed)
}

fn analysis(spec: &ManifoldSpec, p: &[f64; 4]) -> PointAnalysis {
    PointAnalysis::compute(spec, p, &seed_vec(), 0.0).expect("point analysis")
}

fn suite(
    spec: &ManifoldSpec,
    points: usize,
    seed: u64,
    rotations: usize,
    ids: &[&str],
) -> hermitian_weyl::conditions::ConditionReport {
    let settings = SuiteSettings {
        points,
        seed,
        rotations,
        tolerances: Tolerances::default(),
        identities: ids.iter().map(|s| s.to_string()).collect(),
    };
    run_suite(spec, &settings).expect("suite runs")
}

/// Checks `max_rel < tol` with at least one applicable point for each id.
fn residuals_below(
    report: &hermitian_weyl::conditions::ConditionReport,
    ids: &[&str],
    tol: f64,
) -> (bool, f64, Vec<String>) {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for id in ids {
        let s = report.identity(id).expect("id in report");
        match s.max_rel_residual {
            Some(r) if r < tol && s.applicable_points > 0 => worst = worst.max(r),
            Some(r) => {
                worst = worst.max(r);
                bad.push(format!("{}:{id}={r:.2e}", report.manifold));
            }
            None => bad.push(format!("{}:{id} not applicable", report.manifold)),
        }
    }
    if !report.errors.is_empty() {
        bad.push(format!("{}: {} point errors", report.manifold, report.errors.len()));
    }
    (bad.is_empty(), worst, bad)
}

fn flat_baseline() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in ["euclidean_flat", "flat_torus"] {
        let spec = builtin(id).unwrap();
        for p in spec.sample_points(100, 11) {
            let a = analysis(&spec, &p);
            let b = a.bundle();
            let ric = b.ric.norm();
            let quantities = [
                b.riemann_norm2(a.mp()).abs().sqrt(),
                ric,
                b.s.abs(),
                a.wplus_norm(),
                a.nj.norm2.abs().sqrt(),
                a.nj.nijenhuis_norm2.abs().sqrt(),
                a.star.rtilde_norm2.abs().sqrt(),
                a.star.ric_star_minus_norm2.abs().sqrt(),
            ];
            worst = quantities.iter().cloned().fold(worst, f64::max);
        }
    }
    outcome(worst < 1e-9, format!("largest curvature norm {worst:.2e} (< 1e-9)"))
}

const KAHLER_IDS: [&str; 8] = ["EQ82", "EQ83", "EQ84", "EQ85", "EQ86", "EQ87", "EQ88", "EQ114"];

fn kahler_suite() -> Outcome {
    let mut all_ok = true;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for id in ["fubini_study_cp2", "complex_hyperbolic_ch2", "kahler_potential_generic"] {
        let r = suite(&builtin(id).unwrap(), 50, 2, 2, &KAHLER_IDS);
        let (ok, w, b) = residuals_below(&r, &KAHLER_IDS, 1e-6);
        all_ok &= ok;
        worst = worst.max(w);
        bad.extend(b);
    }
    outcome(all_ok, format!("worst rel {worst:.2e} (< 1e-6) {}", bad.join(" ")))
}

const UNIVERSAL_IDS: [&str; 13] = [
    "EQ42", "EQ46", "EQ54", "EQ63", "EQ65", "EQ69", "EQ71", "EQ70", "EQ72", "EQ73", "EQ75", "EQ48", "EQ121",
];

fn universal_suite() -> Outcome {
    let mut all_ok = true;
    let mut worst: f64 = 0.0;
    let mut min_signed = f64::INFINITY;
    let mut bad = Vec::new();
    let mut ids: Vec<&str> = UNIVERSAL_IDS.to_vec();
    ids.push("EQ131");
    for spec in builtin_manifolds() {
        let r = suite(&spec, 25, 3, 5, &ids);
        let (ok, w, b) = residuals_below(&r, &UNIVERSAL_IDS, 1e-7);
        all_ok &= ok;
        worst = worst.max(w);
        bad.extend(b);
        let s = r.identity("EQ131").unwrap();
        let m = s.min_signed.unwrap_or(f64::NEG_INFINITY);
        min_signed = min_signed.min(m);
        if m < -1e-9 || !s.passed {
            all_ok = false;
            bad.push(format!("{}:EQ131 min signed {m:.2e}", spec.id));
        }
    }
    outcome(
        all_ok,
        format!(
            "worst rel {worst:.2e} (< 1e-7), EQ131 min signed {min_signed:.2e} (>= -1e-9) {}",
            bad.join(" ")
        ),
    )
}

fn strictly_almost_kahler() -> Outcome {
    let spec = builtin("kodaira_thurston").unwrap();
    let tol = Tolerances::default();
    let mut d_omega: f64 = 0.0;
    let mut eta: f64 = 0.0;
    let mut min_nj = f64::INFINITY;
    let mut min_n = f64::INFINITY;
    for p in spec.sample_points(50, 4) {
        let a = analysis(&spec, &p);
        let g = Gates::of(&a);
        let c = a.scale.sqrt();
        d_omega = d_omega.max(g.r_d_omega);
        eta = eta.max(a.mp().norm(&a.nj.eta_j_xi(&a.frame.j)) / c);
        min_nj = min_nj.min(a.nj.norm2);
        min_n = min_n.min(g.r_nijenhuis);
    }
    let class = classify_structure(&spec, 50, 4, &tol).unwrap().verdict;
    let r = suite(&spec, 50, 4, 2, &["EQ116", "EQ01"]);
    let e116 = r.identity("EQ116").unwrap().max_rel_residual.unwrap_or(f64::INFINITY);
    let e01 = r.identity("EQ01").unwrap();
    let e01_min = e01.min_signed.unwrap_or(f64::NEG_INFINITY);
    let ok = d_omega < 1e-9
        && eta < 1e-9
        && min_nj > 0.0
        && min_n > tol.fail
        && class == StructureClass::AlmostKahlerNonKahler
        && e116 < 1e-7
        && e01_min > tol.fail
        && e01.verdict.starts_with(Verdict::Violated.as_str());
    outcome(
        ok,
        format!(
            "dOmega {d_omega:.1e}, eta-J xi {eta:.1e}, min |nabla J|^2 {min_nj:.3}, min N_J {min_n:.3}, {class}; \
             EQ116 {e116:.1e}; EQ01 min (lhs-rhs)/scale {e01_min:.3} -> {}",
            e01.verdict
        ),
    )
}

fn integral_formulas() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["flat_torus", "kodaira_thurston"] {
        let spec = builtin(id).unwrap();
        let r = check_integral_formulas(&spec, &QuadratureSpec::default()).unwrap();
        let bound = 1e-6 * r.volume;
        ok &= r.eq117.abs() < bound && r.eq118.abs() < bound && r.combination_residual.abs() < bound;
        parts.push(format!(
            "{id}: vol {:.4e} eq117 {:.1e} eq118 {:.1e} combo {:.1e} ({})",
            r.volume, r.eq117, r.eq118, r.combination_residual, r.method
        ));
    }
    // the constant shortcut agrees with a genuine tensor rule
    let kt = builtin("kodaira_thurston").unwrap();
    let seed = seed_vec();
    let q = |p: &[f64; 4]| -> hermitian_weyl::Result<Vec<f64>> {
        let a = PointAnalysis::compute(&kt, p, &seed, 0.0)?;
        Ok(vec![hermitian_weyl::hermitian::q_j_integrand(
            a.bundle(),
            &a.frame.j,
            a.mp(),
        )?])
    };
    let fast = integrate_density(&kt, q, &QuadratureSpec::default()).unwrap();
    let slow = QuadratureSpec {
        nodes: 4,
        refined: 6,
        allow_constant: false,
        ..QuadratureSpec::default()
    };
    let full = integrate_density(&kt, q, &slow).unwrap();
    let agree = (fast.value[0] - full.value[0]).abs() / fast.value[0].abs();
    ok &= fast.method == "constant" && full.method == "gauss-legendre" && agree < 1e-8;
    parts.push(format!("Q(J) shortcut vs tensor rule {agree:.1e}"));
    outcome(ok, parts.join("; "))
}

fn conformal_cross_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in ["kodaira_thurston", "fubini_study_cp2", "perturbed_j"] {
        let spec = builtin(id).unwrap();
        let f = parse_expression(&format!("0.2*{}", spec.coords[0]), &spec.coords).unwrap();
        for p in spec.sample_points(20, 6) {
            worst = worst.max(conformal_check(&spec, &p, &f).unwrap().rel_residual);
        }
    }
    outcome(worst < 1e-7, format!("worst rel {worst:.2e} (< 1e-7) on 3 metrics"))
}

fn prop21_coherence() -> Outcome {
    let mut kahler_max: f64 = 0.0;
    let mut ok = true;
    for id in ["fubini_study_cp2", "complex_hyperbolic_ch2", "kahler_potential_generic"] {
        let r = prop21_equivalence(&builtin(id).unwrap(), 30, 7).unwrap();
        ok &= r.points.iter().all(|p| p.all_small);
        for p in &r.points {
            kahler_max = p.residuals.iter().cloned().fold(kahler_max, f64::max);
        }
    }
    let kt = prop21_equivalence(&builtin("kodaira_thurston").unwrap(), 30, 7).unwrap();
    ok &= kt.points.iter().all(|p| p.all_large) && kt.coherent;
    let kt_min = kt.points.iter().flat_map(|p| p.residuals).fold(f64::INFINITY, f64::min);
    let gap = kt_min / kahler_max.max(f64::MIN_POSITIVE);
    ok &= kahler_max < 1e-8 && kt_min > 1e-4 && gap >= 1e3;
    outcome(
        ok,
        format!("Kähler max {kahler_max:.1e} (< 1e-8), KT min {kt_min:.3} (> 1e-4), gap {gap:.1e}"),
    )
}

/// Richardson-extrapolated central differences, error `O(h⁴)`.
fn richardson_d1(f: &dyn Fn(&[f64; 4]) -> f64, p: &[f64; 4], a: usize, h: f64) -> f64 {
    let d = |h: f64| {
        let (mut pp, mut pm) = (*p, *p);
        pp[a] += h;
        pm[a] -= h;
        (f(&pp) - f(&pm)) / (2.0 * h)
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn richardson_d2(f: &dyn Fn(&[f64; 4]) -> f64, p: &[f64; 4], a: usize, b: usize, h: f64) -> f64 {
    let d = |h: f64| {
        let at = |sa: f64, sb: f64| {
            let mut q = *p;
            q[a] += sa * h;
            q[b] += sb * h;
            f(&q)
        };
        if a == b {
            (at(1.0, 0.0) - 2.0 * f(p) + at(-1.0, 0.0)) / (h * h)
        } else {
            (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h)
        }
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn differentiation_integrity() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in builtin_manifolds() {
        for p in spec.sample_points(100, 8) {
            let g0 = spec.metric_point(&p, 0).unwrap().g.abs().max();
            for i in 0..4 {
                for j in i..4 {
                    let e = &spec.metric[i][j];
                    let jet = eval_jet(e, &p, 2).unwrap();
                    let f = |q: &[f64; 4]| e.eval(q).unwrap();
                    for a in 0..4 {
                        let fd = richardson_d1(&f, &p, a, 5e-3);
                        let d = jet.d1(a);
                        worst = worst.max((d - fd).abs() / d.abs().max(g0));
                        for b in a..4 {
                            let fd = richardson_d2(&f, &p, a, b, 5e-3);
                            let d = jet.d2(a, b);
                            worst = worst.max((d - fd).abs() / d.abs().max(g0));
                        }
                    }
                }
            }
        }
    }
    let mut delta: f64 = 0.0;
    for spec in builtin_manifolds() {
        for p in spec.sample_points(10, 9) {
            let r = evaluate_identity("EQ121", &spec, &p, &FrameSeed::default()).unwrap();
            delta = delta.max(r.rel_residual.unwrap_or(f64::INFINITY));
        }
    }
    outcome(
        worst < 1e-6 && delta < 1e-7,
        format!("jets vs Richardson {worst:.1e} (< 1e-6); delta W+ two ways {delta:.1e} (< 1e-7)"),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("hweyl").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn determinism_and_cli() -> Outcome {
    let args = ["check", "fubini_study_cp2", "--points", "50", "--seed", "7"];
    let (c1, o1) = run_cli(&args);
    let (c2, o2) = run_cli(&args);
    let identical = o1 == o2 && !o1.is_empty();
    let (cv, ov) = run_cli(&["check", "kodaira_thurston", "--identities", "EQ01"]);
    let text = String::from_utf8_lossy(&ov);
    let flagged = text.contains("violated (expected: strictly almost Kähler)");
    let (cu, _) = run_cli(&["check", "no_such_manifold"]);
    let ok = identical
        && c1 == cli::EXIT_PASS
        && c2 == cli::EXIT_PASS
        && cv == cli::EXIT_VIOLATION
        && flagged
        && cu == cli::EXIT_USAGE;
    outcome(
        ok,
        format!("identical reports {identical}, exits pass {c1}/{c2}, violation {cv} (flagged {flagged}), usage {cu}"),
    )
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 9] = [
        (1, "flat baseline", flat_baseline, Duration::from_secs(10)),
        (2, "Kähler identity suite", kahler_suite, Duration::from_secs(120)),
        (
            3,
            "universal identities, frame independence",
            universal_suite,
            Duration::from_secs(300),
        ),
        (
            4,
            "strictly almost Kähler",
            strictly_almost_kahler,
            Duration::from_secs(300),
        ),
        (5, "integral formulas", integral_formulas, Duration::from_secs(300)),
        (
            6,
            "conformal cross-check",
            conformal_cross_check,
            Duration::from_secs(300),
        ),
        (
            7,
            "two-eigenvalue coherence",
            prop21_coherence,
            Duration::from_secs(300),
        ),
        (
            8,
            "differentiation integrity",
            differentiation_integrity,
            Duration::from_secs(300),
        ),
        (
            9,
            "determinism and CLI contract",
            determinism_and_cli,
            Duration::from_secs(300),
        ),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str()) || s == &n.to_string()) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let dt = t.elapsed();
        let ok = o.ok && dt <= budget;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n} {name}: {} [{:.2}s / {}s] {}",
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
