//! The identity registry: one residual evaluator per numbered relation.

use nalgebra::Matrix3;
use serde::Serialize;

use super::analysis::PointAnalysis;
use crate::error::{GeomError, Result};
use crate::hermitian::{interior_two_p1_minus_p2, projections_p1p2, theta_form};
use crate::pointgeom::{Endo, Vec4};
use crate::selfdual::{delta_wplus_from_ricci, interior_wplus};

/// Hypothesis under which a record is expected to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    All,
    Kahler,
    KahlerMPlus,
    KahlerNonzeroS,
    AlmostKahler,
    /// `|W₊|² = 6λ²`.
    RequiresEq77,
    RequiresEq77MPlus,
    /// `|W₊| > 0`.
    MPlus,
    /// `δW₊ = 0`.
    HarmonicWplus,
    CompactIntegral,
}

impl Applicability {
    pub fn describe(self) -> &'static str {
        match self {
            Applicability::All => "all",
            Applicability::Kahler => "Kähler",
            Applicability::KahlerMPlus => "Kähler, |W₊| > 0",
            Applicability::KahlerNonzeroS => "Kähler, S ≠ 0",
            Applicability::AlmostKahler => "almost-Kähler",
            Applicability::RequiresEq77 => "requires |W₊|² = 6λ²",
            Applicability::RequiresEq77MPlus => "requires |W₊|² = 6λ², |W₊| > 0",
            Applicability::MPlus => "|W₊| > 0",
            Applicability::HarmonicWplus => "requires δW₊ = 0",
            Applicability::CompactIntegral => "compact-integral",
        }
    }
}

/// What a record asserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordKind {
    /// Valid under its hypothesis.
    Identity,
    /// `lhs ≥ rhs`, checked with sign.
    Inequality,
    /// A candidate characterization; expected to fail off the Kähler class.
    Condition,
    /// Evaluated by quadrature over a compact domain.
    Integral,
}

/// Both sides of a relation at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sides {
    /// Value, or norm for tensor-valued sides.
    pub lhs: f64,
    pub rhs: f64,
    pub abs: f64,
    /// Largest absolute term on either side.
    pub terms: f64,
    /// `lhs − rhs` when both sides are scalars.
    pub signed: Option<f64>,
}

impl Sides {
    pub fn scalar(lhs: f64, rhs: f64, terms: &[f64]) -> Self {
        let t = terms.iter().fold(lhs.abs().max(rhs.abs()), |m, x| m.max(x.abs()));
        Sides {
            lhs,
            rhs,
            abs: (lhs - rhs).abs(),
            terms: t,
            signed: Some(lhs - rhs),
        }
    }

    /// `lhs ≥ rhs`; only a deficit counts as residual.
    pub fn at_least(lhs: f64, rhs: f64, terms: &[f64]) -> Self {
        let mut s = Sides::scalar(lhs, rhs, terms);
        s.abs = (rhs - lhs).max(0.0);
        s
    }

    pub fn norms(lhs: f64, rhs: f64, diff: f64) -> Self {
        Sides {
            lhs,
            rhs,
            abs: diff,
            terms: lhs.max(rhs),
            signed: None,
        }
    }
}

pub type Evaluator = fn(&PointAnalysis) -> Result<Sides>;

#[derive(Clone, Copy)]
pub struct IdentityRecord {
    pub id: &'static str,
    pub description: &'static str,
    /// The quoted relation.
    pub anchor: &'static str,
    pub kind: RecordKind,
    pub applicability: Applicability,
    /// Curvature weight `p`: sides scale like `c^p` for curvature magnitude `c`.
    pub weight: f64,
    pub evaluate: Option<Evaluator>,
}

impl std::fmt::Debug for IdentityRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityRecord")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("applicability", &self.applicability)
            .finish()
    }
}

fn endo_diff(p: &PointAnalysis, a: &Endo, b: &Endo) -> Sides {
    Sides::norms(p.endo_norm(a), p.endo_norm(b), p.endo_norm(&(a - b)))
}

fn one_form_diff(p: &PointAnalysis, a: &[Endo; 4], b: &[Endo; 4]) -> Sides {
    let d: [Endo; 4] = std::array::from_fn(|i| a[i] - b[i]);
    let n = |t: &[Endo; 4]| p.one_form_norm2(t).max(0.0).sqrt();
    Sides::norms(n(a), n(b), n(&d))
}

fn matrix_diff(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Sides {
    Sides::norms(a.norm(), b.norm(), (a - b).norm())
}

fn chart_one_form(f: impl Fn(&Vec4) -> Endo) -> [Endo; 4] {
    std::array::from_fn(|a| f(&Vec4::ith(a, 1.0)))
}

/// `Σ_B c_B(X) B` for `B = J, I, K`.
fn jik(p: &PointAnalysis, cj: f64, ci: f64, ck: f64) -> Endo {
    p.frame.j * cj + p.frame.i * ci + p.frame.k * ck
}

fn sq(x: f64) -> f64 {
    x * x
}

// ---------------------------------------------------------------- conditions

fn eq01(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.wplus.norm2, sq(p.s()) / 6.0, &[]))
}

fn eq02(p: &PointAnalysis) -> Result<Sides> {
    let n = p.wplus.norm2;
    Ok(Sides::scalar(sq(p.wplus.det), n * n * n / 54.0, &[]))
}

fn eq03(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.nabla_wplus_norm2, p.grad_s_norm2() / 6.0, &[]))
}

fn eq04(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.nabla_wplus_norm2, p.grad_wplus_norm_sq()?, &[]))
}

fn log_wplus_interior(p: &PointAnalysis) -> [Endo; 4] {
    let y = p.grad_log_wplus();
    chart_one_form(|x| interior_wplus(&y, x, p.bundle(), &p.frame, p.mp()))
}

fn eq05(p: &PointAnalysis) -> Result<Sides> {
    let t = log_wplus_interior(p);
    let neg: [Endo; 4] = std::array::from_fn(|a| -t[a]);
    Ok(one_form_diff(p, &p.delta.plus, &neg))
}

fn eq06(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(Sides::scalar(p.wplus.norm2, 0.375 * sq(st.s_star - p.s() / 3.0), &[]))
}

// ------------------------------------------------------- universal identities

fn eq42(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(endo_diff(p, &(st.ric_tri + st.ric_box + st.ric_star), &p.bundle().ric))
}

fn eq44(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(endo_diff(
        p,
        &(st.ric_tri_plus + st.ric_box_plus + st.ric_star_plus),
        &p.bundle().ric,
    ))
}

fn eq45(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let sum = st.ric_tri_minus + st.ric_box_minus + st.ric_star_minus;
    let mut s = endo_diff(p, &sum, &Endo::zeros());
    s.terms = s
        .terms
        .max(p.endo_norm(&st.ric_star_minus))
        .max(p.endo_norm(&st.ric_tri_minus));
    Ok(s)
}

fn eq46(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(Sides::scalar(
        st.s_tri + st.s_box + st.s_star,
        p.s(),
        &[st.s_tri, st.s_box, st.s_star],
    ))
}

fn eq47(p: &PointAnalysis) -> Result<Sides> {
    let rt = &p.rictilde;
    let st = &p.star;
    let iso = Endo::identity() * (rt.s_tilde / 4.0);
    let via_star = Endo::identity() * ((st.s_star - p.s()) / 8.0);
    let diff =
        p.endo_norm(&(rt.rictilde - iso)) + p.endo_norm(&(iso - via_star)) + p.endo_norm(&(rt.rictilde - rt.from_star));
    Ok(Sides::norms(
        p.endo_norm(&rt.rictilde),
        p.endo_norm(&via_star).max(p.endo_norm(&rt.from_star)),
        diff,
    ))
}

fn weyl_of(p: &PointAnalysis, idx: usize, s_b: f64, ric_b_minus: &Endo) -> Sides {
    let b = [&p.frame.j, &p.frame.i, &p.frame.k][idx];
    let rhs = b * (0.5 * (s_b - p.s() / 3.0)) + ric_b_minus * b * 2.0;
    endo_diff(p, &p.w_of[idx], &rhs)
}

fn eq48(p: &PointAnalysis) -> Result<Sides> {
    Ok(weyl_of(p, 0, p.star.s_star, &p.star.ric_star_minus))
}

fn eq49(p: &PointAnalysis) -> Result<Sides> {
    Ok(weyl_of(p, 1, p.star.s_tri, &p.star.ric_tri_minus))
}

fn eq50(p: &PointAnalysis) -> Result<Sides> {
    Ok(weyl_of(p, 2, p.star.s_box, &p.star.ric_box_minus))
}

fn eq54(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let a = 0.25 * (sq(st.s_star) + sq(st.s_tri) + sq(st.s_box) - sq(p.s()) / 3.0);
    let b = 4.0 * (st.ric_star_minus_norm2 + st.ric_tri_minus_norm2 + st.ric_box_minus_norm2);
    Ok(Sides::scalar(p.wplus.norm2, a + b, &[a, b, sq(p.s())]))
}

fn eq55(p: &PointAnalysis) -> Result<Sides> {
    let f = &p.frame;
    let rhs = -(p.star.ric_tri * f.i) - f.j * p.star.ric_tri * f.k;
    Ok(endo_diff(p, &p.star.rtilde_i, &rhs))
}

fn eq56(p: &PointAnalysis) -> Result<Sides> {
    let f = &p.frame;
    let rhs = -(p.star.ric_box * f.k) + f.j * p.star.ric_box * f.i;
    Ok(endo_diff(p, &p.star.rtilde_k, &rhs))
}

fn eq57(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let rhs = p.frame.i * (-0.5 * st.s_tri) + p.frame.k * (2.0 * st.j_ric_tri_minus);
    Ok(endo_diff(p, &st.rtilde_i, &rhs))
}

fn eq58(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let rhs = p.frame.k * (-0.5 * st.s_box) + p.frame.i * (2.0 * st.j_ric_tri_minus);
    Ok(endo_diff(p, &st.rtilde_k, &rhs))
}

fn bracket(p: &PointAnalysis) -> f64 {
    let st = &p.star;
    st.ric_tri_minus_norm2 + st.ric_box_minus_norm2 - st.ric_star_minus_norm2
}

fn eq63(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(Sides::scalar(
        bracket(p),
        2.0 * sq(st.j_ric_tri_minus),
        &[st.ric_tri_minus_norm2, st.ric_box_minus_norm2, st.ric_star_minus_norm2],
    ))
}

fn eq64(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let rhs = p.endo_norm(&st.rtilde_i).powi(2) + p.endo_norm(&st.rtilde_k).powi(2);
    Ok(Sides::scalar(st.rtilde_norm2, rhs, &[]))
}

fn eq65(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let a = 0.25 * (sq(st.s_tri) + sq(st.s_box));
    let b = 4.0 * bracket(p);
    Ok(Sides::scalar(st.rtilde_norm2, a + b, &[a, b]))
}

fn eq69(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let a = sq(st.s_tri - st.s_box) / 8.0;
    let b = 4.0 * bracket(p);
    Ok(Sides::scalar(
        st.rtilde_minus_norm2,
        a + b,
        &[a, b, sq(st.s_tri), sq(st.s_box)],
    ))
}

fn eq70(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(Sides::scalar(
        st.rtilde_norm2,
        st.rtilde_plus_norm2 + st.rtilde_minus_norm2,
        &[],
    ))
}

fn eq71(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(Sides::scalar(
        st.rtilde_plus_norm2,
        sq(st.s_star - p.s()) / 8.0,
        &[sq(st.s_star), sq(p.s())],
    ))
}

fn eq72(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let a = 0.375 * sq(st.s_star - p.s() / 3.0);
    let b = 8.0 * st.ric_star_minus_norm2;
    let c = st.rtilde_minus_norm2;
    Ok(Sides::scalar(p.wplus.norm2, a + b + c, &[a, b, c]))
}

fn eq73(p: &PointAnalysis) -> Result<Sides> {
    let pp = projections_p1p2(&p.wplus, p.lambda());
    let a = 6.0 * sq(p.lambda());
    Ok(Sides::scalar(p.wplus.norm2, a + pp.g_norm2, &[a, pp.g_norm2]))
}

fn eq75(p: &PointAnalysis) -> Result<Sides> {
    let pp = projections_p1p2(&p.wplus, p.lambda());
    let two_l = 2.0 * p.lambda();
    let diff = (pp.inner_p1 - two_l).abs() + (pp.inner_p2 + two_l).abs();
    Ok(Sides {
        lhs: pp.inner_p1,
        rhs: two_l,
        abs: diff,
        terms: pp.inner_p1.abs().max(pp.inner_p2.abs()).max(two_l.abs()),
        signed: Some(pp.inner_p1 - two_l),
    })
}

fn eq121(p: &PointAnalysis) -> Result<Sides> {
    let mut rhs = [Endo::zeros(); 4];
    for (a, r) in rhs.iter_mut().enumerate() {
        *r = delta_wplus_from_ricci(p.bundle(), &p.frame, &Vec4::ith(a, 1.0), p.mp())?;
    }
    Ok(one_form_diff(p, &p.delta.plus, &rhs))
}

fn eq128(p: &PointAnalysis) -> Result<Sides> {
    let nj = &p.nj;
    let rebuilt =
        chart_one_form(|x| p.frame.i * nj.xi.dot(&p.mp().lower(x)) + p.frame.k * nj.eta.dot(&p.mp().lower(x)));
    Ok(one_form_diff(p, &nj.nabla_j, &rebuilt))
}

fn eq131(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let rhs = 0.375 * sq(st.s_star - p.s() / 3.0);
    Ok(Sides::at_least(p.wplus.norm2, rhs, &[]))
}

// --------------------------------------------------------------------- Kähler

fn eq77(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.wplus.norm2, 6.0 * sq(p.lambda()), &[]))
}

fn eq82(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.wplus.norm2, sq(p.s()) / 6.0, &[]))
}

fn eq83(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.wplus.det, p.s().powi(3) / 108.0, &[]))
}

fn eq84(p: &PointAnalysis) -> Result<Sides> {
    let s = p.s();
    let mut want = [s / 3.0, -s / 6.0, -s / 6.0];
    want.sort_by(|a, b| b.total_cmp(a));
    let got = p.wplus.eigenvalues;
    let d = (0..3).map(|i| sq(got[i] - want[i])).sum::<f64>().sqrt();
    let n = |v: &[f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(Sides::norms(n(&got), n(&want), d))
}

fn two_p1_minus_p2() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0, -1.0, -1.0))
}

fn eq85(p: &PointAnalysis) -> Result<Sides> {
    Ok(matrix_diff(&p.wplus.m, &(two_p1_minus_p2() * (p.s() / 6.0))))
}

fn eq86(p: &PointAnalysis) -> Result<Sides> {
    let mp = p.mp();
    let ds = p.bundle().ds;
    let want: [Matrix3<f64>; 4] = std::array::from_fn(|k| two_p1_minus_p2() * (ds[k] / 6.0));
    let norm = |m: &[Matrix3<f64>; 4]| {
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += mp.g_inv[(a, b)] * m[a].component_mul(&m[b]).sum();
            }
        }
        s.max(0.0).sqrt()
    };
    let d: [Matrix3<f64>; 4] = std::array::from_fn(|k| p.nabla_wplus[k] - want[k]);
    Ok(Sides::norms(norm(&p.nabla_wplus), norm(&want), norm(&d)))
}

fn eq87(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.nabla_wplus_norm2, p.grad_s_norm2() / 6.0, &[]))
}

fn eq88(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.nabla_wplus_norm2, p.grad_wplus_norm_sq()?, &[]))
}

fn eq114(p: &PointAnalysis) -> Result<Sides> {
    let s = p.s();
    let y = p.mp().raise(&(Vec4::from(p.bundle().ds) / s));
    let t = chart_one_form(|x| -interior_wplus(&y, x, p.bundle(), &p.frame, p.mp()));
    Ok(one_form_diff(p, &p.delta.plus, &t))
}

fn eq123(p: &PointAnalysis) -> Result<Sides> {
    let t = chart_one_form(|x| -theta_form(p.bundle(), &p.frame, x));
    Ok(one_form_diff(p, &p.delta.plus, &t))
}

// -------------------------------------------------------------- almost Kähler

fn eq30(p: &PointAnalysis) -> Result<Sides> {
    Ok(endo_diff(p, &p.rictilde.rictilde, &p.rictilde.from_nabla_j))
}

fn eq31(p: &PointAnalysis) -> Result<Sides> {
    Ok(Sides::scalar(p.rictilde.s_tilde, p.nj.norm2, &[]))
}

fn eq32(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    Ok(Sides::scalar(st.s_star - p.s(), 2.0 * p.nj.norm2, &[st.s_star, p.s()]))
}

fn eq116(p: &PointAnalysis) -> Result<Sides> {
    let st = &p.star;
    let t = p.nj.norm2;
    let s = p.s();
    let lhs = p.wplus.norm2 - sq(s) / 6.0;
    let rhs = s * t + t * t + 8.0 * st.ric_star_minus_norm2 + st.rtilde_norm2;
    Ok(Sides::scalar(
        lhs,
        rhs,
        &[p.wplus.norm2, sq(s), s * t, t * t, st.rtilde_norm2],
    ))
}

fn eq126(p: &PointAnalysis) -> Result<Sides> {
    let pp = &p.phi_psi;
    Ok(Sides::scalar(pp.definition, pp.via_nabla_ric, &[]))
}

fn eq129(p: &PointAnalysis) -> Result<Sides> {
    let mp = p.mp();
    let d = p.nj.eta_j_xi(&p.frame.j);
    let jx = p.frame.j * p.nj.xi;
    Ok(Sides::norms(mp.norm(&p.nj.eta), mp.norm(&jx), mp.norm(&d)))
}

fn eq130(p: &PointAnalysis) -> Result<Sides> {
    let pp = &p.phi_psi;
    Ok(Sides::scalar(pp.definition, pp.via_xi_eta, &[]))
}

// ------------------------------------------------------------ |W₊|² = 6λ² class

fn eq80(p: &PointAnalysis) -> Result<Sides> {
    eq02(p)
}

fn eq104(p: &PointAnalysis) -> Result<Sides> {
    let l = p.lambda();
    let dl = p.d_lambda();
    let f = &p.frame;
    let nj = &p.nj;
    let t = chart_one_form(|x| {
        let jx = f.j * x;
        let cj = 3.0 * l * nj.delta_omega_at(x) + 2.0 * dl.dot(&jx);
        (f.j * cj + nj.along(&jx) * (3.0 * l) - f.i * dl.dot(&(f.i * x)) - f.k * dl.dot(&(f.k * x))) * -0.25
    });
    Ok(one_form_diff(p, &p.delta.plus, &t))
}

fn eq112(p: &PointAnalysis) -> Result<Sides> {
    let l = p.lambda();
    let f = &p.frame;
    let nj = &p.nj;
    let interior = log_wplus_interior(p);
    let t: [Endo; 4] = std::array::from_fn(|a| {
        let x = Vec4::ith(a, 1.0);
        (f.j * nj.delta_omega_at(&x) + nj.along(&(f.j * x))) * (-0.75 * l) - interior[a]
    });
    Ok(one_form_diff(p, &p.delta.plus, &t))
}

fn eq113(p: &PointAnalysis) -> Result<Sides> {
    let dl = p.d_lambda();
    let t = chart_one_form(|x| {
        let c = |b: &Endo| dl.dot(&(b * x));
        jik(p, 2.0 * c(&p.frame.j), -c(&p.frame.i), -c(&p.frame.k)) * 0.25
    });
    // the same tensor via ∇ log |W₊| ⌟ λ(2P₁ − P₂)
    let y = p.grad_log_wplus();
    let check = chart_one_form(|x| interior_two_p1_minus_p2(&y, x, p.lambda(), &p.frame, p.mp()));
    let direct = log_wplus_interior(p);
    let mut s = one_form_diff(p, &direct, &t);
    let alt = one_form_diff(p, &check, &t);
    s.abs = s.abs.max(alt.abs);
    Ok(s)
}

// --------------------------------------------------------------- δW₊ = 0 class

fn eq133(p: &PointAnalysis) -> Result<Sides> {
    let a = 2.0 * p.nabla_wplus_norm2;
    let b = p.base.laplacian_wplus_norm2;
    let c = 18.0 * p.wplus.det;
    let d = p.s() * p.wplus.norm2;
    Ok(Sides::scalar(a + b, c - d, &[a, b, c, d]))
}

macro_rules! rec {
    ($id:literal, $kind:ident, $app:ident, $w:expr, $f:expr, $desc:literal, $anchor:literal) => {
        IdentityRecord {
            id: $id,
            description: $desc,
            anchor: $anchor,
            kind: RecordKind::$kind,
            applicability: Applicability::$app,
            weight: $w,
            evaluate: $f,
        }
    };
}

/// Every registered relation, in report order.
pub fn registry() -> &'static [IdentityRecord] {
    static RECORDS: &[IdentityRecord] = &[
        rec!(
            "EQ01",
            Condition,
            All,
            2.0,
            Some(eq01),
            "norm of W₊ fixed by S",
            "|W₊|² = S²/6"
        ),
        rec!(
            "EQ02",
            Condition,
            All,
            6.0,
            Some(eq02),
            "W₊ has a repeated eigenvalue",
            "det(W₊)² = |W₊|⁶/54"
        ),
        rec!(
            "EQ03",
            Condition,
            All,
            3.0,
            Some(eq03),
            "gradient of W₊ fixed by dS",
            "|∇W₊|² = |∇S|²/6"
        ),
        rec!(
            "EQ04",
            Condition,
            MPlus,
            3.0,
            Some(eq04),
            "gradient of W₊ fixed by its length",
            "|∇W₊|² = |∇|W₊||²"
        ),
        rec!(
            "EQ05",
            Condition,
            MPlus,
            1.5,
            Some(eq05),
            "divergence of W₊ fixed by its length",
            "δW₊ + ∇log|W₊| ⌟ W₊ = 0"
        ),
        rec!(
            "EQ06",
            Condition,
            All,
            2.0,
            Some(eq06),
            "equality case of the W₊ bound",
            "|W₊|² = 3/8 (S⋆ − S/3)²"
        ),
        rec!(
            "EQ30",
            Identity,
            AlmostKahler,
            1.0,
            Some(eq30),
            "R̃ic through ∇J",
            "R̃ic = −¼ ∇_{X_k}J ∘ ∇_{X^k}J"
        ),
        rec!(
            "EQ31",
            Identity,
            AlmostKahler,
            1.0,
            Some(eq31),
            "trace of R̃ic",
            "S̃ = (n/4) |∇J|²"
        ),
        rec!(
            "EQ32",
            Identity,
            AlmostKahler,
            1.0,
            Some(eq32),
            "star scalar curvature defect",
            "S⋆ − S = (n/2) |∇J|²"
        ),
        rec!(
            "EQ42",
            Identity,
            All,
            1.0,
            Some(eq42),
            "Ricci splits into star Ricci tensors",
            "Ric△ + Ric□ + Ric⋆ = Ric"
        ),
        rec!(
            "EQ44",
            Identity,
            All,
            1.0,
            Some(eq44),
            "invariant parts of the star Ricci tensors",
            "Ric△⁺ + Ric□⁺ + Ric⋆⁺ = Ric"
        ),
        rec!(
            "EQ45",
            Identity,
            All,
            1.0,
            Some(eq45),
            "anti-invariant parts cancel",
            "Ric△⁻ + Ric□⁻ + Ric⋆⁻ = 0"
        ),
        rec!(
            "EQ46",
            Identity,
            All,
            1.0,
            Some(eq46),
            "star scalar curvatures sum to S",
            "S△ + S□ + S⋆ = S"
        ),
        rec!(
            "EQ47",
            Identity,
            All,
            1.0,
            Some(eq47),
            "R̃ic is isotropic",
            "R̃ic = S̃/4 = (S⋆ − S)/8 = ½(Ric⋆⁺ − Ric⁺)"
        ),
        rec!(
            "EQ48",
            Identity,
            All,
            1.0,
            Some(eq48),
            "W on J",
            "W(J) = ½(S⋆ − S/3) J + 2 Ric⋆⁻ ∘ J"
        ),
        rec!(
            "EQ49",
            Identity,
            All,
            1.0,
            Some(eq49),
            "W on I",
            "W(I) = ½(S△ − S/3) I + 2 Ric△⁻ ∘ I"
        ),
        rec!(
            "EQ50",
            Identity,
            All,
            1.0,
            Some(eq50),
            "W on K",
            "W(K) = ½(S□ − S/3) K + 2 Ric□⁻ ∘ K"
        ),
        rec!(
            "EQ54",
            Identity,
            All,
            2.0,
            Some(eq54),
            "|W₊|² through star curvatures",
            "|W₊|² = ¼ (S⋆² + S△² + S□² − S²/3) + 4(|Ric⋆⁻|² + |Ric△⁻|² + |Ric□⁻|²)"
        ),
        rec!(
            "EQ55",
            Identity,
            All,
            1.0,
            Some(eq55),
            "R̃ on I",
            "R̃(I) = −Ric△ ∘ I − J ∘ Ric△ ∘ K"
        ),
        rec!(
            "EQ56",
            Identity,
            All,
            1.0,
            Some(eq56),
            "R̃ on K",
            "R̃(K) = −Ric□ ∘ K + J ∘ Ric□ ∘ I"
        ),
        rec!(
            "EQ57",
            Identity,
            All,
            1.0,
            Some(eq57),
            "R̃(I) in the (I, K) plane",
            "R̃(I) = −½ S△ I + 2⟨J, Ric△⁻⟩ K"
        ),
        rec!(
            "EQ58",
            Identity,
            All,
            1.0,
            Some(eq58),
            "R̃(K) in the (I, K) plane",
            "R̃(K) = −½ S□ K + 2⟨J, Ric△⁻⟩ I"
        ),
        rec!(
            "EQ63",
            Identity,
            All,
            2.0,
            Some(eq63),
            "anti-invariant Ricci norms",
            "|Ric△⁻|² + |Ric□⁻|² − |Ric⋆⁻|² = 2⟨J, Ric△⁻⟩²"
        ),
        rec!(
            "EQ64",
            Identity,
            All,
            2.0,
            Some(eq64),
            "|R̃|² from two values",
            "|R̃|² = |R̃(I)|² + |R̃(K)|²"
        ),
        rec!(
            "EQ65",
            Identity,
            All,
            2.0,
            Some(eq65),
            "|R̃|² through star curvatures",
            "|R̃|² = ¼(S△² + S□²) + 4(|Ric△⁻|² + |Ric□⁻|² − |Ric⋆⁻|²)"
        ),
        rec!(
            "EQ69",
            Identity,
            All,
            2.0,
            Some(eq69),
            "|R̃⁻|² through star curvatures",
            "|R̃⁻|² = ⅛(S△ − S□)² + 4(|Ric△⁻|² + |Ric□⁻|² − |Ric⋆⁻|²)"
        ),
        rec!(
            "EQ70",
            Identity,
            All,
            2.0,
            Some(eq70),
            "R̃ splits orthogonally",
            "|R̃|² = |R̃⁺|² + |R̃⁻|²"
        ),
        rec!(
            "EQ71",
            Identity,
            All,
            2.0,
            Some(eq71),
            "|R̃⁺|² through S⋆",
            "|R̃⁺|² = ⅛(S⋆ − S)²"
        ),
        rec!(
            "EQ72",
            Identity,
            All,
            2.0,
            Some(eq72),
            "|W₊|² through S⋆, Ric⋆⁻ and R̃⁻",
            "|W₊|² = 3/8 (S⋆ − S/3)² + 8 |Ric⋆⁻|² + |R̃⁻|²"
        ),
        rec!(
            "EQ73",
            Identity,
            All,
            2.0,
            Some(eq73),
            "W₊ splits along P₁, P₂",
            "|W₊|² = 6λ² + |G|²"
        ),
        rec!(
            "EQ75",
            Identity,
            All,
            1.0,
            Some(eq75),
            "pairings with P₁ and P₂",
            "⟨W₊, P₁⟩ = 2λ = −⟨W₊, P₂⟩"
        ),
        rec!(
            "EQ77",
            Identity,
            Kahler,
            2.0,
            Some(eq77),
            "two-eigenvalue condition",
            "|W₊|² = 6λ²"
        ),
        rec!(
            "EQ80",
            Identity,
            RequiresEq77,
            6.0,
            Some(eq80),
            "repeated eigenvalue",
            "det(W₊)² = |W₊|⁶/54"
        ),
        rec!(
            "EQ82",
            Identity,
            Kahler,
            2.0,
            Some(eq82),
            "Kähler |W₊|²",
            "|W₊|² = S²/6"
        ),
        rec!(
            "EQ83",
            Identity,
            Kahler,
            3.0,
            Some(eq83),
            "Kähler det(W₊)",
            "det(W₊) = S³/108"
        ),
        rec!(
            "EQ84",
            Identity,
            Kahler,
            1.0,
            Some(eq84),
            "Kähler spectrum of W₊",
            "spec(W₊) = (S/3, −S/6, −S/6)"
        ),
        rec!(
            "EQ85",
            Identity,
            Kahler,
            1.0,
            Some(eq85),
            "Kähler W₊",
            "W₊ = (S/6)(2P₁ − P₂)"
        ),
        rec!(
            "EQ86",
            Identity,
            Kahler,
            1.5,
            Some(eq86),
            "Kähler ∇W₊",
            "∇W₊ = (1/6) dS ⊗ (2P₁ − P₂)"
        ),
        rec!(
            "EQ87",
            Identity,
            Kahler,
            3.0,
            Some(eq87),
            "Kähler |∇W₊|²",
            "|∇W₊|² = |∇S|²/6"
        ),
        rec!(
            "EQ88",
            Identity,
            KahlerMPlus,
            3.0,
            Some(eq88),
            "Kähler |∇W₊|² via |W₊|",
            "|∇W₊|² = |∇|W₊||²"
        ),
        rec!(
            "EQ104",
            Identity,
            RequiresEq77,
            1.5,
            Some(eq104),
            "δW₊ under the two-eigenvalue condition",
            "δW₊(X) = −¼((3λ δΩ(X) + 2dλ(JX))J + 3λ ∇_{JX}J − dλ(IX)I − dλ(KX)K)"
        ),
        rec!(
            "EQ112",
            Identity,
            RequiresEq77MPlus,
            1.5,
            Some(eq112),
            "δW₊ through ∇J and |W₊|",
            "δW₊(X) = −¾λ(δΩ(X)J + ∇_{JX}J) − (∇log|W₊| ⌟ W₊)(X)"
        ),
        rec!(
            "EQ113",
            Identity,
            RequiresEq77MPlus,
            1.5,
            Some(eq113),
            "interior product with W₊",
            "(∇log|W₊| ⌟ W₊)(X) = ¼(2dλ(JX)J − dλ(IX)I − dλ(KX)K)"
        ),
        rec!(
            "EQ114",
            Identity,
            KahlerNonzeroS,
            1.5,
            Some(eq114),
            "Kähler δW₊",
            "δW₊ + ∇log|S| ⌟ W₊ = 0"
        ),
        rec!(
            "EQ116",
            Identity,
            AlmostKahler,
            2.0,
            Some(eq116),
            "almost Kähler |W₊|² defect",
            "|W₊|² − S²/6 = S |∇J|² + |∇J|⁴ + 8 |Ric⁻⋆|² + |R̃|²"
        ),
        rec!(
            "EQ117",
            Integral,
            CompactIntegral,
            2.0,
            None,
            "integral formula with Ric⋆⁻",
            "Q(J) + ∫_M (|R̃|² + 4 |Ric⋆⁻|² + S/2 |∇J|² + |∇J|⁴) ω = 0"
        ),
        rec!(
            "EQ118",
            Integral,
            CompactIntegral,
            2.0,
            None,
            "integral formula with W₊",
            "Q(J) + ½ ∫_M (|R̃|² + |∇J|⁴ + |W₊|² − S²/6) ω = 0"
        ),
        rec!(
            "EQ121",
            Identity,
            All,
            1.5,
            Some(eq121),
            "δW₊ through ∇Ric",
            "δW₊(X) = ¼ Σ_B g(X, (∇_{X_k}Ric) B X^k) B + (1/24) Σ_B dS(BX) B"
        ),
        rec!(
            "EQ123",
            Identity,
            Kahler,
            1.5,
            Some(eq123),
            "Kähler δW₊ against Θ",
            "δW₊ + Θ = 0"
        ),
        rec!(
            "EQ126",
            Identity,
            AlmostKahler,
            2.0,
            Some(eq126),
            "⟨φ, ψ⟩ through ∇Ric",
            "⟨φ, ψ⟩ = ¼ g(J(φ(X^k, X^l)), (∇_{X_k}Ric) X_l − (∇_{X_l}Ric) X_k)"
        ),
        rec!(
            "EQ128",
            Identity,
            All,
            0.5,
            Some(eq128),
            "∇J in the supplement",
            "∇_X J = g(ξ, X) I + g(η, X) K"
        ),
        rec!(
            "EQ129",
            Identity,
            AlmostKahler,
            0.5,
            Some(eq129),
            "closedness of Ω",
            "η = Jξ"
        ),
        rec!(
            "EQ130",
            Identity,
            AlmostKahler,
            2.0,
            Some(eq130),
            "⟨φ, ψ⟩ through ξ and η",
            "⟨φ, ψ⟩ = ½ g((∇_{X_k}Ric) K X^k, ξ) − ½ g((∇_{X_k}Ric) I X^k, η)"
        ),
        rec!(
            "EQ131",
            Inequality,
            All,
            2.0,
            Some(eq131),
            "lower bound for |W₊|²",
            "|W₊|² ≥ 3/8 (S⋆ − S/3)²"
        ),
        rec!(
            "EQ133",
            Identity,
            HarmonicWplus,
            3.0,
            Some(eq133),
            "Weitzenböck formula for harmonic W₊",
            "2 |∇W₊|² + Δ|W₊|² = 18 det(W₊) − S |W₊|²"
        ),
    ];
    RECORDS
}

pub fn lookup(id: &str) -> Result<&'static IdentityRecord> {
    let want = id.trim().to_ascii_uppercase();
    registry()
        .iter()
        .find(|r| r.id == want)
        .ok_or_else(|| GeomError::UnknownIdentity(id.to_string()))
}

/// Pointwise hypothesis gates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gates {
    /// `|∇J| / √c`.
    pub r_nabla_j: f64,
    /// `|dΩ| / √c`.
    pub r_d_omega: f64,
    /// `|N_J| / √c`.
    pub r_nijenhuis: f64,
    /// `||W₊|² − 6λ²| / max(|W₊|², 6λ², c²)`.
    pub r_eq77: f64,
    /// `‖δW₊‖ / c^{3/2}`.
    pub r_delta_wplus: f64,
    /// `|W₊| / c`.
    pub r_wplus: f64,
    /// `|S| / c`.
    pub r_s: f64,
}

const FLOOR: f64 = 1e-14;

impl Gates {
    pub fn of(p: &PointAnalysis) -> Gates {
        let c = p.scale;
        let root = c.sqrt().max(FLOOR);
        let nj = &p.nj;
        let w2 = p.wplus.norm2;
        let l6 = 6.0 * sq(p.lambda());
        Gates {
            r_nabla_j: nj.norm2.max(0.0).sqrt() / root,
            r_d_omega: nj.d_omega_norm2.max(0.0).sqrt() / root,
            r_nijenhuis: nj.nijenhuis_norm2.max(0.0).sqrt() / root,
            r_eq77: (w2 - l6).abs() / w2.max(l6).max(c * c).max(FLOOR),
            r_delta_wplus: p.one_form_norm2(&p.delta.plus).max(0.0).sqrt() / c.powf(1.5).max(FLOOR),
            r_wplus: p.wplus_norm() / c.max(FLOOR),
            r_s: p.s().abs() / c.max(FLOOR),
        }
    }

    /// Whether the hypothesis of `a` holds at this point.
    pub fn admits(&self, a: Applicability, tol: f64) -> bool {
        let kahler = self.r_nabla_j <= tol;
        let m_plus = self.r_wplus > 1e-8;
        let eq77 = self.r_eq77 <= tol;
        match a {
            Applicability::All => true,
            Applicability::Kahler => kahler,
            Applicability::KahlerMPlus => kahler && m_plus,
            Applicability::KahlerNonzeroS => kahler && self.r_s > 1e-8,
            Applicability::AlmostKahler => self.r_d_omega <= tol,
            Applicability::RequiresEq77 => eq77,
            Applicability::RequiresEq77MPlus => eq77 && m_plus,
            Applicability::MPlus => m_plus,
            Applicability::HarmonicWplus => self.r_delta_wplus <= tol,
            Applicability::CompactIntegral => false,
        }
    }
}

/// Relative residual of one record at one analysed point.
pub fn relative(record: &IdentityRecord, sides: &Sides, scale: f64) -> (f64, f64) {
    let s = sides.terms.max(scale.powf(record.weight)).max(FLOOR);
    (s, sides.abs / s)
}
