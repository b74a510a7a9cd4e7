//! Point-local metric linear algebra.
//!
//! Endomorphisms are 4×4 matrices in the chart basis acting on column
//! vectors. Two-forms are antisymmetric 4×4 matrices of lower components
//! `α_ij = α(∂_i, ∂_j)`.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{GeomError, Result};
use crate::exprjet::Jet;

pub type Endo = Matrix4<f64>;
pub type Vec4 = Vector4<f64>;
pub type TwoForm = Matrix4<f64>;

/// Metric, inverse and metric jets at one chart point.
#[derive(Clone, Debug)]
pub struct MetricPoint {
    pub point: [f64; 4],
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub jets: Box<[[Jet; 4]; 4]>,
    scale: f64,
}

impl MetricPoint {
    /// Validates symmetry and positive definiteness of the jets' values.
    pub fn from_jets(point: [f64; 4], jets: [[Jet; 4]; 4]) -> Result<Self> {
        let g = Matrix4::from_fn(|i, j| jets[i][j].value());
        let scale = g.abs().max().max(f64::MIN_POSITIVE);
        let asym = (g - g.transpose()).abs().max();
        if asym > 1e-12 * scale {
            return Err(GeomError::DegenerateMetric(point));
        }
        let eig = SymmetricEigen::new(g);
        let lmax = eig.eigenvalues.max();
        if lmax.is_nan() || lmax <= 0.0 || eig.eigenvalues.min() <= 1e-12 * lmax {
            return Err(GeomError::DegenerateMetric(point));
        }
        let g_inv = g.try_inverse().ok_or(GeomError::DegenerateMetric(point))?;
        Ok(MetricPoint {
            point,
            g,
            g_inv,
            jets: Box::new(jets),
            scale: lmax,
        })
    }

    /// A constant metric (all derivatives zero) at the given jet order.
    pub fn constant(point: [f64; 4], g: Matrix4<f64>, order: usize) -> Result<Self> {
        let jets = std::array::from_fn(|i| std::array::from_fn(|j| Jet::constant(g[(i, j)], order)));
        Self::from_jets(point, jets)
    }

    pub fn jet_order(&self) -> usize {
        self.jets.iter().flatten().map(Jet::order).min().unwrap_or(0)
    }

    /// Largest metric eigenvalue; tolerances are expressed relative to it.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn inner(&self, x: &Vec4, y: &Vec4) -> f64 {
        (x.transpose() * self.g * y)[0]
    }

    pub fn norm(&self, x: &Vec4) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Index lowering `X ↦ g(X, ·)`.
    pub fn lower(&self, x: &Vec4) -> Vec4 {
        self.g * x
    }

    /// Index raising of a covector.
    pub fn raise(&self, a: &Vec4) -> Vec4 {
        self.g_inv * a
    }

    /// `√det g`.
    pub fn volume_density(&self) -> f64 {
        self.g.determinant().sqrt()
    }

    /// Conformally rescaled metric `e^f g`, jets included.
    pub fn conformal(&self, f: &Jet) -> Result<MetricPoint> {
        let ef = f.exp();
        let jets = std::array::from_fn(|i| std::array::from_fn(|j| &ef * &self.jets[i][j]));
        MetricPoint::from_jets(self.point, jets)
    }
}

/// `A* = g⁻¹ Aᵀ g`.
pub fn adjoint_endo(a: &Endo, mp: &MetricPoint) -> Endo {
    mp.g_inv * a.transpose() * mp.g
}

/// Weighted product `⟨A,B⟩ = ¼ tr(A* ∘ B)`.
pub fn inner_endo(a: &Endo, b: &Endo, mp: &MetricPoint) -> f64 {
    0.25 * (adjoint_endo(a, mp) * b).trace()
}

pub fn norm2_endo(a: &Endo, mp: &MetricPoint) -> f64 {
    inner_endo(a, a, mp)
}

/// `‖A* + A‖` relative to `‖A‖`, zero for skew-adjoint input.
pub fn skew_residual(a: &Endo, mp: &MetricPoint) -> f64 {
    let s = adjoint_endo(a, mp) + a;
    s.abs().max() / a.abs().max().max(1.0)
}

pub fn commutator(a: &Endo, b: &Endo) -> Endo {
    a * b - b * a
}

pub fn anticommutator(a: &Endo, b: &Endo) -> Endo {
    a * b + b * a
}

const SKEW_TOL: f64 = 1e-9;

/// `Ω_A(X,Y) = g(AX, Y)`, i.e. `Ω = Aᵀ g`.
pub fn endo_to_two_form(a: &Endo, mp: &MetricPoint) -> Result<TwoForm> {
    let r = skew_residual(a, mp);
    if r > SKEW_TOL {
        return Err(GeomError::NotSkew(r));
    }
    Ok(a.transpose() * mp.g)
}

/// Inverse of [`endo_to_two_form`]: `A = −g⁻¹ Ω`.
pub fn two_form_to_endo(omega: &TwoForm, mp: &MetricPoint) -> Result<Endo> {
    let r = (omega + omega.transpose()).abs().max() / omega.abs().max().max(1.0);
    if r > SKEW_TOL {
        return Err(GeomError::NotSkew(r));
    }
    Ok(-(mp.g_inv * omega))
}

/// `⟨α,β⟩ = ¼ α_ij β^ij`, matching [`inner_endo`] under the correspondence.
pub fn inner_two_form(a: &TwoForm, b: &TwoForm, mp: &MetricPoint) -> f64 {
    let b_up = mp.g_inv * b * mp.g_inv;
    0.25 * a.component_mul(&b_up).sum()
}

/// Pfaffian of an antisymmetric 4×4 matrix.
pub fn pfaffian(w: &TwoForm) -> f64 {
    w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]
}

/// Sign of `½ Ω_J ∧ Ω_J` relative to `dx⁰∧dx¹∧dx²∧dx³`.
pub fn orientation_sign(j: &Endo, mp: &MetricPoint) -> f64 {
    let omega = j.transpose() * mp.g;
    if pfaffian(&omega) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn perm_sign(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = [i, j, k, l];
    let mut sign = 1.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if p[a] == p[b] {
                return 0.0;
            }
            if p[a] > p[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge star on two-forms for the orientation with sign `orient`:
/// `(★α)_kl = ½ α^ij ε_ijkl`.
pub fn hodge_star(alpha: &TwoForm, mp: &MetricPoint, orient: f64) -> TwoForm {
    let up = mp.g_inv * alpha * mp.g_inv;
    let vol = orient * mp.volume_density();
    let mut out = TwoForm::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    let e = perm_sign(i, j, k, l);
                    if e != 0.0 {
                        s += up[(i, j)] * e;
                    }
                }
            }
            out[(k, l)] = 0.5 * vol * s;
        }
    }
    out
}

/// Hodge star transported to skew endomorphisms.
pub fn hodge_star_endo(a: &Endo, mp: &MetricPoint, orient: f64) -> Endo {
    let omega = a.transpose() * mp.g;
    -(mp.g_inv * hodge_star(&omega, mp, orient))
}

/// Residuals of `J² = −1` and `J* = −J`, relative.
pub fn acs_residuals(j: &Endo, mp: &MetricPoint) -> (f64, f64) {
    let sq = (j * j + Endo::identity()).abs().max();
    (sq, skew_residual(j, mp))
}

/// J-adapted orthonormal frame with its quaternionic supplement.
#[derive(Clone, Debug)]
pub struct SelfDualFrame {
    pub e: [Vec4; 4],
    pub j: Endo,
    pub i: Endo,
    pub k: Endo,
    pub omega_j: TwoForm,
    pub omega_i: TwoForm,
    pub omega_k: TwoForm,
    /// Orientation of the chart relative to `½ Ω_J ∧ Ω_J`.
    pub star_orientation: f64,
    /// Orientation of the ordered triple `(Ω_J, Ω_I, Ω_K)` in Λ²₊.
    pub triple_orientation: f64,
}

/// Elementary skew map of the frame: `e_a ↦ e_b`, `e_b ↦ −e_a`.
fn frame_elementary(a: usize, b: usize) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(b, a)] = 1.0;
    m[(a, b)] = -1.0;
    m
}

/// Frame-component matrices of `(J, I, K)` and of the anti-self-dual triple.
pub(crate) fn frame_models() -> [Matrix4<f64>; 6] {
    let e = frame_elementary;
    [
        e(0, 1) + e(2, 3),
        e(0, 2) - e(1, 3),
        -e(0, 3) - e(1, 2),
        e(0, 1) - e(2, 3),
        e(0, 2) + e(1, 3),
        -e(0, 3) + e(1, 2),
    ]
}

impl SelfDualFrame {
    /// Columns are the frame vectors.
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_columns(&self.e)
    }

    /// Maps a frame-component matrix to the chart basis.
    pub fn from_frame_components(&self, m: &Matrix4<f64>, mp: &MetricPoint) -> Endo {
        let e = self.matrix();
        e * m * e.transpose() * mp.g
    }

    /// Skew basis `(J, I, K, J⁻, I⁻, K⁻)`; the first three span Λ²₊.
    pub fn skew_basis(&self, mp: &MetricPoint) -> [Endo; 6] {
        let models = frame_models();
        [
            self.j,
            self.i,
            self.k,
            self.from_frame_components(&models[3], mp),
            self.from_frame_components(&models[4], mp),
            self.from_frame_components(&models[5], mp),
        ]
    }

    /// Largest violation of the frame invariants.
    pub fn invariant_residual(&self, mp: &MetricPoint) -> f64 {
        let mut worst: f64 = 0.0;
        let e = self.matrix();
        let gram = e.transpose() * mp.g * e;
        worst = worst.max((gram - Matrix4::identity()).abs().max());
        worst = worst.max((self.j * self.e[0] - self.e[1]).abs().max());
        worst = worst.max((self.j * self.e[2] - self.e[3]).abs().max());
        let id = Endo::identity();
        for a in [&self.i, &self.j, &self.k] {
            worst = worst.max((a * a + id).abs().max());
            worst = worst.max((norm2_endo(a, mp) - 1.0).abs());
        }
        worst = worst.max((self.i * self.j * self.k + id).abs().max());
        worst = worst.max(inner_endo(&self.i, &self.j, mp).abs());
        worst = worst.max(inner_endo(&self.i, &self.k, mp).abs());
        worst = worst.max(inner_endo(&self.j, &self.k, mp).abs());
        worst
    }
}

/// Builds the J-frame seeded by `seed` and its quaternionic supplement.
pub fn build_j_frame(mp: &MetricPoint, j: &Endo, seed: &Vec4) -> Result<SelfDualFrame> {
    let (sq, skew) = acs_residuals(j, mp);
    if sq > 1e-10 || skew > 1e-10 {
        return Err(GeomError::Incompatible(format!(
            "J² + 1 residual {sq:.3e}, J* + J residual {skew:.3e}"
        )));
    }
    let n = mp.norm(seed);
    if n < 1e-12 * mp.scale().sqrt() {
        return Err(GeomError::DegenerateSeed(n));
    }
    let e1 = seed / n;
    let e2 = j * e1;
    let mut e3 = None;
    for m in 0..4 {
        let dm = Vec4::ith(m, 1.0);
        let r = dm - e1 * mp.inner(&dm, &e1) - e2 * mp.inner(&dm, &e2);
        let rn = mp.norm(&r);
        if rn > 1e-6 * mp.norm(&dm) {
            e3 = Some(r / rn);
            break;
        }
    }
    let e3 = e3.ok_or(GeomError::DegenerateSeed(n))?;
    let e4 = j * e3;
    Ok(assemble_frame(mp, j, [e1, e2, e3, e4]))
}

fn assemble_frame(mp: &MetricPoint, j: &Endo, e: [Vec4; 4]) -> SelfDualFrame {
    let models = frame_models();
    let em = Matrix4::from_columns(&e);
    let to_chart = |m: &Matrix4<f64>| em * m * em.transpose() * mp.g;
    let i = to_chart(&models[1]);
    let k = to_chart(&models[2]);
    build_from_parts(mp, e, *j, i, k)
}

fn build_from_parts(mp: &MetricPoint, e: [Vec4; 4], j: Endo, i: Endo, k: Endo) -> SelfDualFrame {
    let omega = |a: &Endo| a.transpose() * mp.g;
    let ij_k = inner_endo(&(i * j), &k, mp);
    SelfDualFrame {
        e,
        j,
        i,
        k,
        omega_j: omega(&j),
        omega_i: omega(&i),
        omega_k: omega(&k),
        star_orientation: orientation_sign(&j, mp),
        // (I,J,K) with I∘J∘K = −1 orders Λ²₊ positively; (J,I,K) is the swap.
        triple_orientation: if ij_k > 0.0 { -1.0 } else { 1.0 },
    }
}

/// `I' = cos α I − sin α K`, `K' = sin α I + cos α K`; the frame vectors
/// `e₃, e₄` rotate accordingly so that `I' e₁ = e₃'` still holds.
pub fn rotate_supplement(frame: &SelfDualFrame, alpha: f64, mp: &MetricPoint) -> SelfDualFrame {
    let (s, c) = alpha.sin_cos();
    let i = frame.i * c - frame.k * s;
    let k = frame.i * s + frame.k * c;
    let e3 = frame.e[2] * c + frame.e[3] * s;
    let e4 = frame.e[3] * c - frame.e[2] * s;
    build_from_parts(mp, [frame.e[0], frame.e[1], e3, e4], frame.j, i, k)
}

/// Components `(J, I, K)` of a skew endomorphism's Λ²₊ part.
pub fn plus_components(a: &Endo, frame: &SelfDualFrame, mp: &MetricPoint) -> [f64; 3] {
    [
        inner_endo(&frame.j, a, mp),
        inner_endo(&frame.i, a, mp),
        inner_endo(&frame.k, a, mp),
    ]
}

/// Projection onto `span(J, I, K)`.
pub fn project_plus(a: &Endo, frame: &SelfDualFrame, mp: &MetricPoint) -> Endo {
    let [cj, ci, ck] = plus_components(a, frame, mp);
    frame.j * cj + frame.i * ci + frame.k * ck
}

/// Standard complex structure `∂₀ ↦ ∂₁`, `∂₂ ↦ ∂₃` on coordinate columns.
pub fn standard_j() -> Endo {
    let mut j = Endo::zeros();
    j[(1, 0)] = 1.0;
    j[(0, 1)] = -1.0;
    j[(3, 2)] = 1.0;
    j[(2, 3)] = -1.0;
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_metric(rng: &mut ChaCha8Rng) -> MetricPoint {
        let a = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let g = a * a.transpose() + Matrix4::identity() * 0.5;
        MetricPoint::constant([0.0; 4], g, 0).unwrap()
    }

    fn random_skew(mp: &MetricPoint, rng: &mut ChaCha8Rng) -> Endo {
        let w = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let w = w - w.transpose();
        -(mp.g_inv * w)
    }

    #[test]
    fn adjoint_examples() {
        let flat = MetricPoint::constant([0.0; 4], Matrix4::identity(), 0).unwrap();
        assert_eq!(adjoint_endo(&Endo::identity(), &flat), Endo::identity());
        let j = standard_j();
        assert_eq!(adjoint_endo(&j, &flat), -j);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mp = random_metric(&mut rng);
        let a = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let astar = adjoint_endo(&a, &mp);
        for _ in 0..20 {
            let x = Vec4::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let y = Vec4::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let d = mp.inner(&(a * x), &y) - mp.inner(&x, &(astar * y));
            assert!(d.abs() < 1e-12, "{d}");
        }
        assert!((adjoint_endo(&astar, &mp) - a).abs().max() < 1e-12);
    }

    #[test]
    fn euclidean_frame_is_identity() {
        let flat = MetricPoint::constant([0.0; 4], Matrix4::identity(), 0).unwrap();
        let f = build_j_frame(&flat, &standard_j(), &Vec4::x()).unwrap();
        assert!((f.matrix() - Matrix4::identity()).abs().max() < 1e-15);
        // I e1 = e3, I e2 = −e4, I e3 = −e1, I e4 = e2
        let e = |k| Vec4::ith(k, 1.0);
        assert_eq!(f.i * e(0), e(2));
        assert_eq!(f.i * e(1), -e(3));
        assert_eq!(f.i * e(2), -e(0));
        assert_eq!(f.i * e(3), e(1));
        // K e1 = −e4, K e2 = −e3, K e3 = e2, K e4 = e1
        assert_eq!(f.k * e(0), -e(3));
        assert_eq!(f.k * e(1), -e(2));
        assert_eq!(f.k * e(2), e(1));
        assert_eq!(f.k * e(3), e(0));
        assert!(f.invariant_residual(&flat) < 1e-14);
        let f3 = build_j_frame(&flat, &standard_j(), &Vec4::z()).unwrap();
        assert!(f3.invariant_residual(&flat) < 1e-14);
        assert_eq!(inner_endo(&Endo::identity(), &Endo::identity(), &flat), 1.0);
    }

    #[test]
    fn frame_on_random_metric_and_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mp = random_metric(&mut rng);
        // compatible J from an orthonormal basis
        let seed_frame = {
            let a = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let mut cols: Vec<Vec4> = Vec::new();
            for c in 0..4 {
                let mut v: Vec4 = a.column(c).into();
                for u in &cols {
                    v -= u * mp.inner(&v, u);
                }
                cols.push(v / mp.norm(&v));
            }
            Matrix4::from_columns(&cols)
        };
        let j = seed_frame * frame_models()[0] * seed_frame.transpose() * mp.g;
        let seed = Vec4::new(0.3, -0.2, 0.9, 0.1);
        let f = build_j_frame(&mp, &j, &seed).unwrap();
        assert!(f.invariant_residual(&mp) < 1e-10);
        assert_eq!(f.triple_orientation, -1.0);
        for form in [&f.omega_j, &f.omega_i, &f.omega_k] {
            let st = hodge_star(form, &mp, f.star_orientation);
            assert!((st - form).abs().max() < 1e-10);
        }
        let r0 = rotate_supplement(&f, 0.0, &mp);
        assert!((r0.i - f.i).abs().max() < 1e-15);
        let r = rotate_supplement(&f, std::f64::consts::FRAC_PI_2, &mp);
        assert!((r.i + f.k).abs().max() < 1e-12);
        assert!((r.k - f.i).abs().max() < 1e-12);
        assert!(r.invariant_residual(&mp) < 1e-10);
        let r = rotate_supplement(&f, 1.234, &mp);
        assert!(r.invariant_residual(&mp) < 1e-10);
        assert!((r.i * r.e[0] - r.e[2]).abs().max() < 1e-12);
    }

    #[test]
    fn two_form_round_trip_and_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mp = random_metric(&mut rng);
        let a = random_skew(&mp, &mut rng);
        let b = random_skew(&mp, &mut rng);
        let wa = endo_to_two_form(&a, &mp).unwrap();
        let wb = endo_to_two_form(&b, &mp).unwrap();
        let back = two_form_to_endo(&wa, &mp).unwrap();
        assert!((back - a).abs().max() < 1e-13);
        let d = inner_two_form(&wa, &wb, &mp) - inner_endo(&a, &b, &mp);
        assert!(d.abs() < 1e-12);
        assert!(endo_to_two_form(&Endo::identity(), &mp).is_err());
        assert_eq!(endo_to_two_form(&Endo::zeros(), &mp).unwrap(), TwoForm::zeros());
        let flat = MetricPoint::constant([0.0; 4], Matrix4::identity(), 0).unwrap();
        let j = standard_j();
        let w = endo_to_two_form(&j, &flat).unwrap();
        let x = Vec4::new(1.0, 2.0, 0.0, -1.0);
        let y = Vec4::new(0.5, 0.0, 3.0, 1.0);
        let lhs = (x.transpose() * w * y)[0];
        assert!((lhs - flat.inner(&(j * x), &y)).abs() < 1e-15);
    }

    #[test]
    fn self_dual_and_anti_self_dual_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mp = MetricPoint::constant([0.0; 4], Matrix4::identity(), 0).unwrap();
        let f = build_j_frame(&mp, &standard_j(), &Vec4::x()).unwrap();
        let basis = f.skew_basis(&mp);
        let a: Endo = (0..3).map(|n| basis[n] * rng.random_range(-1.0..1.0)).sum();
        let b: Endo = (3..6).map(|n| basis[n] * rng.random_range(-1.0..1.0)).sum();
        assert!(commutator(&a, &b).abs().max() < 1e-12);
        for (n, bb) in basis.iter().enumerate() {
            let sign = if n < 3 { 1.0 } else { -1.0 };
            let st = hodge_star_endo(bb, &mp, f.star_orientation);
            assert!((st - bb * sign).abs().max() < 1e-12);
        }
    }
}
