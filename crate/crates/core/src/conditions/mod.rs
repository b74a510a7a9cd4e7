//! Identity suites, structure classification, coherence of the two-eigenvalue
//! conditions and integral formulas over compact domains.

mod analysis;
mod integrate;
mod registry;
mod report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use analysis::{derivative_floor, PointAnalysis, PointBase, CURVATURE_NOISE, JET_ORDER};
pub use integrate::{
    check_integral_formulas, gauss_legendre, integrate_density, IntegralFormulaReport, IntegralResult, QuadratureSpec,
};
pub use registry::{lookup, registry, Applicability, Gates, IdentityRecord, RecordKind, Sides};
pub use report::{
    envelope, report_value, write_csv, write_json, write_text, Conventions, ReportFormat, SCHEMA_VERSION,
};

use crate::catalog::{ManifoldSpec, Tag};
use crate::error::{GeomError, Result};
use crate::pointgeom::Vec4;

/// Verdict thresholds on scale-relative residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub pass: f64,
    pub fail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { pass: 1e-8, fail: 1e-4 }
    }
}

impl Tolerances {
    pub fn verdict(&self, r: f64) -> Verdict {
        if r <= self.pass {
            Verdict::Holds
        } else if r > self.fail {
            Verdict::Violated
        } else {
            Verdict::Indeterminate
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    Indeterminate,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
            Verdict::NotApplicable => "not applicable",
        }
    }
}

/// Frame choice: the seed vector completing `J` to a frame, and a rotation
/// angle of the quaternionic supplement `(I, K)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameSeed {
    pub seed: [f64; 4],
    pub rotation: f64,
}

impl Default for FrameSeed {
    fn default() -> Self {
        FrameSeed {
            seed: [1.0, 0.0, 0.0, 0.0],
            rotation: 0.0,
        }
    }
}

/// One record at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub id: String,
    pub point: [f64; 4],
    pub applicable: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    pub signed: Option<f64>,
    pub scale: Option<f64>,
}

fn residual_of(record: &IdentityRecord, p: &PointAnalysis, gates: &Gates, tol: f64) -> Result<IdentityResidual> {
    let mut out = IdentityResidual {
        id: record.id.to_string(),
        point: p.base.point,
        applicable: false,
        lhs: None,
        rhs: None,
        abs_residual: None,
        rel_residual: None,
        signed: None,
        scale: None,
    };
    let Some(eval) = record.evaluate else {
        return Ok(out);
    };
    if !gates.admits(record.applicability, tol) {
        return Ok(out);
    }
    let sides = eval(p)?;
    let (scale, rel) = registry::relative(record, &sides, p.scale);
    out.applicable = true;
    out.lhs = Some(sides.lhs);
    out.rhs = Some(sides.rhs);
    out.abs_residual = Some(sides.abs);
    out.rel_residual = Some(rel);
    out.signed = sides.signed.map(|s| s / scale);
    out.scale = Some(scale);
    Ok(out)
}

/// Evaluates one record at one point.
pub fn evaluate_identity(
    id: &str,
    spec: &ManifoldSpec,
    point: &[f64; 4],
    frame: &FrameSeed,
) -> Result<IdentityResidual> {
    let record = lookup(id)?;
    if !spec.contains(point) {
        return Err(GeomError::OutOfDomain(*point));
    }
    let p = PointAnalysis::compute(spec, point, &Vec4::from(frame.seed), frame.rotation)?;
    let gates = Gates::of(&p);
    residual_of(record, &p, &gates, Tolerances::default().pass)
}

/// Run parameters of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSettings {
    pub points: usize,
    pub seed: u64,
    /// Frames per point: the seeded frame plus random supplement rotations.
    pub rotations: usize,
    pub tolerances: Tolerances,
    /// Restrict to these ids; empty means all.
    pub identities: Vec<String>,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            points: 20,
            seed: 0,
            rotations: 2,
            tolerances: Tolerances::default(),
            identities: Vec::new(),
        }
    }
}

impl SuiteSettings {
    fn selected(&self) -> Result<Vec<&'static IdentityRecord>> {
        if self.identities.is_empty() {
            return Ok(registry().iter().collect());
        }
        self.identities.iter().map(|id| lookup(id)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub id: String,
    pub description: String,
    pub anchor: String,
    pub kind: RecordKind,
    pub applicability: String,
    pub applicable_points: usize,
    pub evaluations: usize,
    pub max_rel_residual: Option<f64>,
    pub mean_rel_residual: Option<f64>,
    pub max_abs_residual: Option<f64>,
    /// Extremes of `(lhs − rhs)/scale` for scalar relations.
    pub min_signed: Option<f64>,
    pub max_signed: Option<f64>,
    pub verdict: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TagCheck {
    pub tag: String,
    pub claimed: bool,
    /// Largest scale-relative residual of the tag's defining property.
    pub residual: f64,
    pub verdict: String,
    pub confirmed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StructureClass {
    #[serde(rename = "Kähler")]
    Kahler,
    #[serde(rename = "almost-Kähler non-Kähler")]
    AlmostKahlerNonKahler,
    #[serde(rename = "Hermitian non-Kähler")]
    HermitianNonKahler,
    #[serde(rename = "generic almost-Hermitian")]
    GenericAlmostHermitian,
    #[serde(rename = "indeterminate")]
    Indeterminate,
}

impl StructureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StructureClass::Kahler => "Kähler",
            StructureClass::AlmostKahlerNonKahler => "almost-Kähler non-Kähler",
            StructureClass::HermitianNonKahler => "Hermitian non-Kähler",
            StructureClass::GenericAlmostHermitian => "generic almost-Hermitian",
            StructureClass::Indeterminate => "indeterminate",
        }
    }
}

impl std::fmt::Display for StructureClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: StructureClass,
    /// Largest `|∇J|/√c` over the sample.
    pub r_nabla_j: f64,
    pub r_d_omega: f64,
    pub r_nijenhuis: f64,
    /// Smallest `|∇J|/√c`, `|dΩ|/√c`, `|N_J|/√c`.
    pub min_r_nabla_j: f64,
    pub min_r_d_omega: f64,
    pub min_r_nijenhuis: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointError {
    pub point: [f64; 4],
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub manifold: String,
    pub settings: SuiteSettings,
    pub conventions: Conventions,
    pub identities: Vec<IdentitySummary>,
    pub tags: Vec<TagCheck>,
    pub classification: Classification,
    /// Fraction of sampled points with `|W₊| > 1e−8·c`.
    pub wplus_support_fraction: f64,
    pub errors: Vec<PointError>,
}

impl ConditionReport {
    /// Every applicable identity passes, every claimed tag is confirmed and
    /// no point failed.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.identities.iter().all(|i| i.passed) && self.tags.iter().all(|t| t.confirmed)
    }

    pub fn identity(&self, id: &str) -> Option<&IdentitySummary> {
        self.identities.iter().find(|i| i.id.eq_ignore_ascii_case(id))
    }

    pub fn tag(&self, tag: Tag) -> Option<&TagCheck> {
        self.tags.iter().find(|t| t.tag == tag.name())
    }
}

/// Per-point raw data gathered by the suite.
struct PointRun {
    residuals: Vec<Vec<IdentityResidual>>,
    gates: Gates,
    tag_residuals: [f64; 7],
    s: f64,
    scale: f64,
    m_plus: bool,
}

fn rotations_for(seed: u64, index: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1));
    let mut v = vec![0.0];
    for _ in 1..n {
        v.push(rng.random_range(0.0..std::f64::consts::TAU));
    }
    v
}

fn tag_residuals(p: &PointAnalysis, gates: &Gates) -> [f64; 7] {
    let c = p.scale.max(1e-14);
    let b = p.bundle();
    let mp = p.mp();
    let riem = b.riemann_norm2(mp).max(0.0).sqrt();
    let trace_free = b.ric - crate::pointgeom::Endo::identity() * (b.s / 4.0);
    let einstein = crate::pointgeom::norm2_endo(&trace_free, mp).max(0.0).sqrt() / c;
    let ds = p.grad_s_norm2().max(0.0).sqrt() / c.powf(1.5);
    let weyl = crate::curvature::tensor4_norm2(&b.weyl, mp).max(0.0).sqrt() / c;
    [riem, einstein, gates.r_nabla_j, gates.r_d_omega, ds, weyl, 0.0]
}

fn analyse_point(
    spec: &ManifoldSpec,
    point: &[f64; 4],
    alphas: &[f64],
    records: &[&'static IdentityRecord],
    tol: f64,
) -> Result<PointRun> {
    let base = PointBase::compute(spec, point)?;
    let seed = Vec4::from(FrameSeed::default().seed);
    let mut residuals = vec![Vec::with_capacity(alphas.len()); records.len()];
    let mut first_gates = None;
    let mut tags = [0.0; 7];
    let mut s = 0.0;
    let mut scale = 0.0;
    let mut m_plus = false;
    for (n, &alpha) in alphas.iter().enumerate() {
        let p = PointAnalysis::with_frame(base.clone(), &seed, alpha)?;
        let gates = Gates::of(&p);
        if n == 0 {
            tags = tag_residuals(&p, &gates);
            s = p.s();
            scale = p.scale;
            m_plus = gates.r_wplus > 1e-8;
            first_gates = Some(gates);
        }
        for (slot, record) in residuals.iter_mut().zip(records) {
            slot.push(residual_of(record, &p, &gates, tol)?);
        }
    }
    Ok(PointRun {
        residuals,
        gates: first_gates.expect("at least one frame"),
        tag_residuals: tags,
        s,
        scale,
        m_plus,
    })
}

fn classify(gates: &[Gates], tol: &Tolerances) -> Classification {
    let fold = |f: fn(&Gates) -> f64| {
        gates
            .iter()
            .map(f)
            .fold((0.0f64, f64::INFINITY), |(hi, lo), x| (hi.max(x), lo.min(x)))
    };
    let (nj, nj_lo) = fold(|g| g.r_nabla_j);
    let (dw, dw_lo) = fold(|g| g.r_d_omega);
    let (nn, nn_lo) = fold(|g| g.r_nijenhuis);
    let small = |x: f64| x <= tol.pass;
    let large = |x: f64| x > tol.fail;
    // a structure fails a property if it fails somewhere in the sample
    let verdict = if gates.is_empty() {
        StructureClass::Indeterminate
    } else if small(nj) {
        StructureClass::Kahler
    } else if !large(nj) {
        StructureClass::Indeterminate
    } else if small(dw) && large(nn) {
        StructureClass::AlmostKahlerNonKahler
    } else if small(nn) && large(dw) {
        StructureClass::HermitianNonKahler
    } else if large(dw) && large(nn) {
        StructureClass::GenericAlmostHermitian
    } else {
        StructureClass::Indeterminate
    };
    Classification {
        verdict,
        r_nabla_j: nj,
        r_d_omega: dw,
        r_nijenhuis: nn,
        min_r_nabla_j: if gates.is_empty() { 0.0 } else { nj_lo },
        min_r_d_omega: if gates.is_empty() { 0.0 } else { dw_lo },
        min_r_nijenhuis: if gates.is_empty() { 0.0 } else { nn_lo },
        points: gates.len(),
    }
}

fn summarize(
    record: &IdentityRecord,
    per_point: &[&Vec<IdentityResidual>],
    spec: &ManifoldSpec,
    tol: &Tolerances,
) -> IdentitySummary {
    let mut applicable_points = 0;
    let mut evaluations = 0;
    let mut max_rel: Option<f64> = None;
    let mut max_abs: Option<f64> = None;
    let mut sum = 0.0;
    let mut min_signed: Option<f64> = None;
    let mut max_signed: Option<f64> = None;
    for rs in per_point {
        let mut any = false;
        for r in rs.iter() {
            let (Some(rel), Some(abs)) = (r.rel_residual, r.abs_residual) else {
                continue;
            };
            any = true;
            evaluations += 1;
            sum += rel;
            max_rel = Some(max_rel.map_or(rel, |m: f64| m.max(rel)));
            max_abs = Some(max_abs.map_or(abs, |m: f64| m.max(abs)));
            if let Some(s) = r.signed {
                min_signed = Some(min_signed.map_or(s, |m: f64| m.min(s)));
                max_signed = Some(max_signed.map_or(s, |m: f64| m.max(s)));
            }
        }
        if any {
            applicable_points += 1;
        }
    }
    let verdict = match max_rel {
        None => Verdict::NotApplicable,
        Some(r) => tol.verdict(r),
    };
    let mut text = verdict.as_str().to_string();
    if record.kind == RecordKind::Condition && verdict == Verdict::Violated && !spec.tags.contains(&Tag::Kahler) {
        if spec.tags.contains(&Tag::AlmostKahler) {
            text.push_str(" (expected: strictly almost Kähler)");
        } else {
            text.push_str(" (expected: not Kähler)");
        }
    }
    IdentitySummary {
        id: record.id.to_string(),
        description: record.description.to_string(),
        anchor: record.anchor.to_string(),
        kind: record.kind,
        applicability: record.applicability.describe().to_string(),
        applicable_points,
        evaluations,
        max_rel_residual: max_rel,
        mean_rel_residual: max_rel.map(|_| sum / evaluations as f64),
        max_abs_residual: max_abs,
        min_signed,
        max_signed,
        verdict: text,
        passed: matches!(verdict, Verdict::Holds | Verdict::NotApplicable),
    }
}

fn tag_checks(spec: &ManifoldSpec, runs: &[&PointRun], tol: &Tolerances) -> Vec<TagCheck> {
    Tag::ALL
        .iter()
        .enumerate()
        .map(|(n, &tag)| {
            let claimed = spec.tags.contains(&tag);
            let (residual, observed) = if tag == Tag::Compact {
                (0.0, Some(spec.compact))
            } else {
                let mut r = runs.iter().map(|p| p.tag_residuals[n]).fold(0.0f64, f64::max);
                if tag == Tag::ConstantS {
                    let (lo, hi) = runs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p.s), hi.max(p.s))
                    });
                    let c = runs.iter().map(|p| p.scale).fold(1e-14, f64::max);
                    if hi >= lo {
                        r = r.max((hi - lo) / c);
                    }
                }
                let obs = match tol.verdict(r) {
                    Verdict::Holds => Some(true),
                    Verdict::Violated => Some(false),
                    _ => None,
                };
                (r, obs)
            };
            let verdict = match observed {
                Some(true) => "present",
                Some(false) => "absent",
                None => "indeterminate",
            };
            TagCheck {
                tag: tag.name().to_string(),
                claimed,
                residual,
                verdict: verdict.to_string(),
                confirmed: !claimed || observed == Some(true),
            }
        })
        .collect()
}

/// Samples points, evaluates every selected record at each frame, aggregates.
pub fn run_suite(spec: &ManifoldSpec, settings: &SuiteSettings) -> Result<ConditionReport> {
    if settings.points == 0 {
        return Err(GeomError::Validation(vec!["points must be at least 1".into()]));
    }
    if settings.rotations == 0 {
        return Err(GeomError::Validation(vec!["rotations must be at least 1".into()]));
    }
    let records = settings.selected()?;
    let points = spec.sample_points(settings.points, settings.seed);
    let tol = settings.tolerances;
    let outcomes: Vec<Result<PointRun>> = points
        .par_iter()
        .enumerate()
        .map(|(n, pt)| {
            analyse_point(
                spec,
                pt,
                &rotations_for(settings.seed, n, settings.rotations),
                &records,
                tol.pass,
            )
        })
        .collect();
    let mut runs = Vec::new();
    let mut errors = Vec::new();
    for (pt, out) in points.iter().zip(outcomes) {
        match out {
            Ok(r) => runs.push(r),
            Err(e) => errors.push(PointError {
                point: *pt,
                message: e.to_string(),
            }),
        }
    }
    let run_refs: Vec<&PointRun> = runs.iter().collect();
    let identities = records
        .iter()
        .enumerate()
        .map(|(n, rec)| {
            let per: Vec<&Vec<IdentityResidual>> = runs.iter().map(|r| &r.residuals[n]).collect();
            summarize(rec, &per, spec, &tol)
        })
        .collect();
    let gates: Vec<Gates> = runs.iter().map(|r| r.gates).collect();
    let support = if runs.is_empty() {
        0.0
    } else {
        runs.iter().filter(|r| r.m_plus).count() as f64 / runs.len() as f64
    };
    Ok(ConditionReport {
        manifold: spec.id.clone(),
        settings: settings.clone(),
        conventions: Conventions::current(),
        identities,
        tags: tag_checks(spec, &run_refs, &tol),
        classification: classify(&gates, &tol),
        wplus_support_fraction: support,
        errors,
    })
}

/// Classifies the almost Hermitian structure from residual gates on
/// `∇J`, `dΩ` and `N_J` at sampled points.
pub fn classify_structure(spec: &ManifoldSpec, n_points: usize, seed: u64, tol: &Tolerances) -> Result<Classification> {
    let points = spec.sample_points(n_points.max(1), seed);
    let gates: Vec<Result<Gates>> = points
        .par_iter()
        .map(|pt| {
            let p = PointAnalysis::compute(spec, pt, &Vec4::from(FrameSeed::default().seed), 0.0)?;
            Ok(Gates::of(&p))
        })
        .collect();
    let gates = gates.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(classify(&gates, tol))
}

/// The four equivalent conditions of the two-eigenvalue proposition, each
/// as a residual linear in curvature and divided by `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop21Point {
    pub point: [f64; 4],
    /// (i) spectrum vs `(2λ, −λ, −λ)`; (ii) `||W₊| − √6|λ||`;
    /// (iii) `|W₊ − λ(2P₁ − P₂)|`; (iv) `√(|Ric⋆⁻|² + |R̃⁻|²)`.
    pub residuals: [f64; 4],
    pub all_small: bool,
    pub all_large: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop21Report {
    pub manifold: String,
    pub points: Vec<Prop21Point>,
    pub small: f64,
    pub large: f64,
    /// Every point has its four residuals all small or all large.
    pub coherent: bool,
    /// Smallest over points of `min residual / max residual`.
    pub min_internal_ratio: f64,
}

pub fn prop21_point(p: &PointAnalysis) -> [f64; 4] {
    let c = p.scale.max(1e-14);
    let l = p.lambda();
    let mut want = [2.0 * l, -l, -l];
    want.sort_by(|a, b| b.total_cmp(a));
    let eig = p.wplus.eigenvalues;
    let i = (0..3).map(|k| (eig[k] - want[k]).abs()).fold(0.0, f64::max);
    // ||W₊| − √6|λ|| vanishes exactly when |W₊|² = 6λ² and stays linear
    let ii = (p.wplus_norm() - 6f64.sqrt() * l.abs()).abs();
    let iii = crate::hermitian::projections_p1p2(&p.wplus, l).g_norm2.max(0.0).sqrt();
    let iv = (p.star.ric_star_minus_norm2 + p.star.rtilde_minus_norm2)
        .max(0.0)
        .sqrt();
    [i / c, ii / c, iii / c, iv / c]
}

pub fn prop21_equivalence(spec: &ManifoldSpec, n_points: usize, seed: u64) -> Result<Prop21Report> {
    let (small, large) = (1e-8, 1e-4);
    let pts = spec.sample_points(n_points.max(1), seed);
    let out: Vec<Result<Prop21Point>> = pts
        .par_iter()
        .map(|pt| {
            let p = PointAnalysis::compute(spec, pt, &Vec4::from(FrameSeed::default().seed), 0.0)?;
            let r = prop21_point(&p);
            Ok(Prop21Point {
                point: *pt,
                residuals: r,
                all_small: r.iter().all(|&x| x < small),
                all_large: r.iter().all(|&x| x > large),
            })
        })
        .collect();
    let points = out.into_iter().collect::<Result<Vec<_>>>()?;
    let coherent = points.iter().all(|p| p.all_small || p.all_large);
    let min_internal_ratio = points
        .iter()
        .filter(|p| p.all_large)
        .map(|p| {
            let lo = p.residuals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = p.residuals.iter().cloned().fold(0.0, f64::max);
            lo / hi
        })
        .fold(1.0, f64::min);
    Ok(Prop21Report {
        manifold: spec.id.clone(),
        points,
        small,
        large,
        coherent,
        min_internal_ratio,
    })
}

/// `∇̄J` for `ḡ = e^f g`, predicted from `∇J` and `df` through the
/// quaternionic supplement and recomputed from the Christoffel symbols of `ḡ`.
#[derive(Clone, Debug)]
pub struct ConformalCheck {
    pub predicted: [crate::pointgeom::Endo; 4],
    pub direct: [crate::pointgeom::Endo; 4],
    pub abs_residual: f64,
    pub rel_residual: f64,
}

pub fn conformal_check(spec: &ManifoldSpec, point: &[f64; 4], f: &crate::exprjet::Expr) -> Result<ConformalCheck> {
    use crate::curvature::christoffel;
    use crate::hermitian::{conformal_nabla_j, nabla_j_data, AcsPoint};
    use crate::pointgeom::{build_j_frame, inner_endo, Endo};

    let seed = Vec4::from(FrameSeed::default().seed);
    let mp = spec.metric_point(point, JET_ORDER)?;
    let acs = spec.acs_point(&mp, JET_ORDER)?;
    let frame = build_j_frame(&mp, &acs.j, &seed)?;
    let nj = nabla_j_data(&acs, &frame, &christoffel(&mp)?, &mp)?;
    let fj = crate::exprjet::eval_jet(f, point, JET_ORDER)?;
    let df = Vec4::from(fj.gradient());
    let predicted = conformal_nabla_j(&nj, &frame, &df);

    let mpb = mp.conformal(&fj)?;
    let acsb = AcsPoint::from_jets((*acs.jets).clone(), &mpb)?;
    let frameb = build_j_frame(&mpb, &acsb.j, &seed)?;
    let njb = nabla_j_data(&acsb, &frameb, &christoffel(&mpb)?, &mpb)?;
    let direct = njb.nabla_j;

    let norm = |t: &[Endo; 4]| {
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += mpb.g_inv[(a, b)] * inner_endo(&t[a], &t[b], &mpb);
            }
        }
        s.max(0.0).sqrt()
    };
    let diff: [Endo; 4] = std::array::from_fn(|a| predicted[a] - direct[a]);
    let abs = norm(&diff);
    let scale = norm(&predicted)
        .max(norm(&direct))
        .max(mpb.norm(&mpb.raise(&df)))
        .max(1e-14);
    Ok(ConformalCheck {
        predicted,
        direct,
        abs_residual: abs,
        rel_residual: abs / scale,
    })
}
