//! Almost-Hermitian curvature: the star-Ricci family, the operator `R̃`,
//! covariant derivatives of `J`, and the `φ`/`ψ` pairings.

use crate::curvature::{ix2, ix4, pair_sum, Christoffel, CurvatureBundle};
use crate::error::{GeomError, Result};
use crate::exprjet::Jet;
use crate::pointgeom::{
    acs_residuals, adjoint_endo, commutator, inner_endo, norm2_endo, Endo, MetricPoint, SelfDualFrame, TwoForm, Vec4,
};
use crate::selfdual::{Lambda2Basis, WplusMatrix};

/// Almost complex structure at a point with its jets `J^i_j`.
#[derive(Clone, Debug)]
pub struct AcsPoint {
    pub j: Endo,
    pub omega: TwoForm,
    pub jets: Box<[[Jet; 4]; 4]>,
}

impl AcsPoint {
    /// Validates `J² = −1` and `g`-orthogonality to 1e-10.
    pub fn from_jets(jets: [[Jet; 4]; 4], mp: &MetricPoint) -> Result<Self> {
        let j = Endo::from_fn(|a, b| jets[a][b].value());
        let (sq, skew) = acs_residuals(&j, mp);
        if sq > 1e-10 || skew > 1e-10 {
            return Err(GeomError::Incompatible(format!(
                "J² + 1 residual {sq:.3e}, J* + J residual {skew:.3e} at {:?}",
                mp.point
            )));
        }
        Ok(AcsPoint {
            j,
            omega: j.transpose() * mp.g,
            jets: Box::new(jets),
        })
    }

    /// Parallel-in-chart structure (all derivatives zero).
    pub fn constant(j: Endo, mp: &MetricPoint, order: usize) -> Result<Self> {
        let jets = std::array::from_fn(|a| std::array::from_fn(|b| Jet::constant(j[(a, b)], order)));
        Self::from_jets(jets, mp)
    }

    pub fn order(&self) -> usize {
        self.jets[0][0].order()
    }

    /// `Ω_jk = J^p_j g_pk` as jets.
    pub fn omega_jets(&self, mp: &MetricPoint) -> Vec<Jet> {
        let order = self.order().min(mp.jet_order());
        let mut out = vec![Jet::zero(order); 16];
        for j in 0..4 {
            for k in 0..4 {
                let mut acc = Jet::zero(order);
                for p in 0..4 {
                    acc.add_product(&self.jets[p][j], &mp.jets[p][k]);
                }
                out[ix2(j, k)] = acc;
            }
        }
        out
    }
}

/// `Ric_A(X) = R(AX, AX_k) X^k`; `A = Id` gives Ricci, `A = J` gives Ric⋆.
pub fn star_ricci(a: &Endo, bundle: &CurvatureBundle, mp: &MetricPoint) -> Endo {
    let c = a * mp.g_inv;
    let mut out = Endo::zeros();
    for p in 0..4 {
        for i in 0..4 {
            let mut s = 0.0;
            for aa in 0..4 {
                let ai = a[(aa, i)];
                if ai == 0.0 {
                    continue;
                }
                for b in 0..4 {
                    let r = &bundle.r_pairs[aa][b];
                    for l in 0..4 {
                        s += ai * r[(p, l)] * c[(b, l)];
                    }
                }
            }
            out[(p, i)] = s;
        }
    }
    out
}

/// `R̃(X,Y) = ¼ [R(X,Y) − R(JX,JY), J] ∘ J`.
pub fn rtilde_pair(x: &Vec4, y: &Vec4, bundle: &CurvatureBundle, j: &Endo) -> Endo {
    let r = |u: &Vec4, v: &Vec4| -> Endo {
        let mut m = Endo::zeros();
        for a in 0..4 {
            for b in 0..4 {
                let c = u[a] * v[b];
                if c != 0.0 {
                    m += bundle.r_pairs[a][b] * c;
                }
            }
        }
        m
    };
    let d = r(x, y) - r(&(j * x), &(j * y));
    commutator(&d, j) * j * 0.25
}

/// `R̃(B) = R̃(B X_k, X^k)` for any endomorphism `B`.
pub fn rtilde_operator(b: &Endo, bundle: &CurvatureBundle, j: &Endo, mp: &MetricPoint) -> Endo {
    let id = Endo::identity();
    let d = pair_sum(b, &id, &bundle.r_pairs, mp) - pair_sum(&(j * b), j, &bundle.r_pairs, mp);
    commutator(&d, j) * j * 0.25
}

/// `½(R̃(B) ± R̃(JB) ∘ J)`.
pub fn rtilde_pm(b: &Endo, bundle: &CurvatureBundle, j: &Endo, mp: &MetricPoint) -> (Endo, Endo) {
    let r = rtilde_operator(b, bundle, j, mp);
    let rj = rtilde_operator(&(j * b), bundle, j, mp) * j;
    ((r + rj) * 0.5, (r - rj) * 0.5)
}

/// Coefficients of `R̃(I)` and `R̃(K)` in the `(I, K)` plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RtildeCoefficients {
    /// `⟨I, R̃(I)⟩`.
    pub ii: f64,
    /// `⟨K, R̃(I)⟩`.
    pub ik: f64,
    /// `⟨K, R̃(K)⟩`.
    pub kk: f64,
    /// `⟨I, R̃(K)⟩`.
    pub ki: f64,
}

#[derive(Clone, Debug)]
pub struct StarCurvature {
    pub ric_plus: Endo,
    pub ric_minus: Endo,
    pub ric_star: Endo,
    pub ric_star_plus: Endo,
    pub ric_star_minus: Endo,
    pub s_star: f64,
    pub ric_tri: Endo,
    pub ric_tri_plus: Endo,
    pub ric_tri_minus: Endo,
    pub s_tri: f64,
    pub ric_box: Endo,
    pub ric_box_plus: Endo,
    pub ric_box_minus: Endo,
    pub s_box: f64,
    /// `¼(S⋆ − S/3)`.
    pub lambda: f64,
    pub rtilde_i: Endo,
    pub rtilde_k: Endo,
    pub rtilde_coefficients: RtildeCoefficients,
    /// `|R̃|²` summed over the orthonormal basis of Λ².
    pub rtilde_norm2: f64,
    pub rtilde_plus_norm2: f64,
    pub rtilde_minus_norm2: f64,
    pub ric_star_minus_norm2: f64,
    pub ric_tri_minus_norm2: f64,
    pub ric_box_minus_norm2: f64,
    /// `⟨J, Ric△⁻⟩`.
    pub j_ric_tri_minus: f64,
    /// `⟨J, Ric□⁻⟩`.
    pub j_ric_box_minus: f64,
}

fn star_split(t: &Endo, mp: &MetricPoint) -> (Endo, Endo) {
    let ad = adjoint_endo(t, mp);
    ((t + ad) * 0.5, (t - ad) * 0.5)
}

pub fn star_curvature(
    bundle: &CurvatureBundle,
    frame: &SelfDualFrame,
    basis: &Lambda2Basis,
    mp: &MetricPoint,
) -> StarCurvature {
    let j = &frame.j;
    let ric = &bundle.ric;
    let jrj = j * ric * j;
    let ric_plus = (ric - jrj) * 0.5;
    let ric_minus = (ric + jrj) * 0.5;
    let ric_star = star_ricci(j, bundle, mp);
    let (ric_star_plus, ric_star_minus) = star_split(&ric_star, mp);
    let ric_tri = star_ricci(&frame.i, bundle, mp);
    let (ric_tri_plus, ric_tri_minus) = star_split(&ric_tri, mp);
    let ric_box = star_ricci(&frame.k, bundle, mp);
    let (ric_box_plus, ric_box_minus) = star_split(&ric_box, mp);
    let s_star = ric_star.trace();
    let rtilde_i = rtilde_operator(&frame.i, bundle, j, mp);
    let rtilde_k = rtilde_operator(&frame.k, bundle, j, mp);
    let mut n = 0.0;
    let mut np = 0.0;
    let mut nm = 0.0;
    for b in &basis.endos {
        n += norm2_endo(&rtilde_operator(b, bundle, j, mp), mp);
        let (p, m) = rtilde_pm(b, bundle, j, mp);
        np += norm2_endo(&p, mp);
        nm += norm2_endo(&m, mp);
    }
    StarCurvature {
        ric_plus,
        ric_minus,
        s_star,
        lambda: 0.25 * (s_star - bundle.s / 3.0),
        ric_star_minus_norm2: norm2_endo(&ric_star_minus, mp),
        ric_tri_minus_norm2: norm2_endo(&ric_tri_minus, mp),
        ric_box_minus_norm2: norm2_endo(&ric_box_minus, mp),
        j_ric_tri_minus: inner_endo(j, &ric_tri_minus, mp),
        j_ric_box_minus: inner_endo(j, &ric_box_minus, mp),
        s_tri: ric_tri.trace(),
        s_box: ric_box.trace(),
        rtilde_coefficients: RtildeCoefficients {
            ii: inner_endo(&frame.i, &rtilde_i, mp),
            ik: inner_endo(&frame.k, &rtilde_i, mp),
            kk: inner_endo(&frame.k, &rtilde_k, mp),
            ki: inner_endo(&frame.i, &rtilde_k, mp),
        },
        ric_star,
        ric_star_plus,
        ric_star_minus,
        ric_tri,
        ric_tri_plus,
        ric_tri_minus,
        ric_box,
        ric_box_plus,
        ric_box_minus,
        rtilde_i,
        rtilde_k,
        rtilde_norm2: n,
        rtilde_plus_norm2: np,
        rtilde_minus_norm2: nm,
    }
}

/// Ricci-type form `ρ_T(X, Y) = g(J T X, Y)` of a `J`-invariant endomorphism.
pub fn ricci_form(t: &Endo, j: &Endo, mp: &MetricPoint) -> TwoForm {
    (j * t).transpose() * mp.g
}

/// The `Ric△`/`Ric□` pair for an arbitrary supplement.
pub fn triangle_box_ricci(bundle: &CurvatureBundle, frame: &SelfDualFrame, mp: &MetricPoint) -> (Endo, Endo) {
    (star_ricci(&frame.i, bundle, mp), star_ricci(&frame.k, bundle, mp))
}

/// `S⋆ = J^a_i J^b_k g^{kl} g^{ir} R_{ablr}` as a jet.
pub fn s_star_jet(bundle: &CurvatureBundle, acs: &AcsPoint, mp: &MetricPoint) -> Jet {
    let order = (bundle.jet_order() - 2).min(acs.order());
    let gi = &bundle.gamma.g_inv_jets;
    let rj = &bundle.riem_jets;
    let _ = mp;
    let mut out = Jet::zero(order);
    for a in 0..4 {
        for b in 0..4 {
            for l in 0..4 {
                for r in 0..4 {
                    let mut k_sum = Jet::zero(order);
                    for k in 0..4 {
                        k_sum.add_product(&acs.jets[b][k], &gi[ix2(k, l)]);
                    }
                    let mut i_sum = Jet::zero(order);
                    for i in 0..4 {
                        i_sum.add_product(&acs.jets[a][i], &gi[ix2(i, r)]);
                    }
                    let t = &(&k_sum * &i_sum) * &rj[ix4(a, b, l, r)];
                    out.axpy(1.0, &t);
                }
            }
        }
    }
    out
}

/// `λ = ¼(S⋆ − S/3)` as a jet.
pub fn lambda_jet(bundle: &CurvatureBundle, acs: &AcsPoint, mp: &MetricPoint) -> Jet {
    let ss = s_star_jet(bundle, acs, mp);
    let s = bundle.scalar_jet().truncate(ss.order());
    let mut l = ss;
    l.axpy(-1.0 / 3.0, &s);
    l.scale(0.25)
}

/// Covariant derivatives of `J` and the quantities derived from them.
#[derive(Clone, Debug)]
pub struct NablaJData {
    /// `∇_{∂_a} J`.
    pub nabla_j: [Endo; 4],
    /// `∇_X J = g(ξ, X) I + g(η, X) K`.
    pub xi: Vec4,
    pub eta: Vec4,
    /// `dΩ_abc`.
    pub d_omega: [[[f64; 4]; 4]; 4],
    /// `δΩ(∂_a) = (∇_{X_k} J)^k_a`.
    pub delta_omega: [f64; 4],
    /// `N_J(∂_a, ∂_b)`.
    pub nijenhuis: [[Vec4; 4]; 4],
    /// `|∇J|² = g^{kl} ⟨∇_k J, ∇_l J⟩`.
    pub norm2: f64,
    /// `(1/6) dΩ_abc dΩ^abc`.
    pub d_omega_norm2: f64,
    /// `½ g^{ac} g^{bd} g(N_ab, N_cd)`.
    pub nijenhuis_norm2: f64,
    /// Largest `‖∇_{JX}J − (∇_X J) J‖` over chart directions.
    pub quasi_kahler_residual: f64,
    /// Largest `‖∇_a J − ξ_a I − η_a K‖`.
    pub reconstruction_residual: f64,
}

impl NablaJData {
    pub fn along(&self, x: &Vec4) -> Endo {
        (0..4).map(|a| self.nabla_j[a] * x[a]).sum()
    }

    pub fn delta_omega_at(&self, x: &Vec4) -> f64 {
        (0..4).map(|a| self.delta_omega[a] * x[a]).sum()
    }

    /// `η − Jξ`; vanishes iff `dΩ = 0`.
    pub fn eta_j_xi(&self, j: &Endo) -> Vec4 {
        self.eta - j * self.xi
    }
}

pub fn nabla_j_data(
    acs: &AcsPoint,
    frame: &SelfDualFrame,
    gamma: &Christoffel,
    mp: &MetricPoint,
) -> Result<NablaJData> {
    if acs.order() < 1 {
        return Err(GeomError::InsufficientJetOrder {
            needed: 1,
            available: acs.order(),
        });
    }
    let j = &acs.j;
    let gv = &gamma.values;
    let nabla_j: [Endo; 4] = std::array::from_fn(|a| {
        Endo::from_fn(|i, k| {
            let mut v = acs.jets[i][k].d1(a);
            for m in 0..4 {
                v += gv[i][a][m] * j[(m, k)] - gv[m][a][k] * j[(i, m)];
            }
            v
        })
    });
    let xi_l = Vec4::from_fn(|a, _| inner_endo(&frame.i, &nabla_j[a], mp));
    let eta_l = Vec4::from_fn(|a, _| inner_endo(&frame.k, &nabla_j[a], mp));
    let mut reconstruction_residual: f64 = 0.0;
    for a in 0..4 {
        let d = nabla_j[a] - frame.i * xi_l[a] - frame.k * eta_l[a];
        reconstruction_residual = reconstruction_residual.max(d.abs().max());
    }
    let om = acs.omega_jets(mp);
    let dom = |i: usize, j: usize, k: usize| om[ix2(j, k)].d1(i);
    let mut d_omega = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                d_omega[a][b][c] = dom(a, b, c) + dom(b, c, a) + dom(c, a, b);
            }
        }
    }
    let gi = &mp.g_inv;
    let mut d_omega_norm2 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut raised = 0.0;
                for p in 0..4 {
                    for q in 0..4 {
                        for r in 0..4 {
                            raised += gi[(a, p)] * gi[(b, q)] * gi[(c, r)] * d_omega[p][q][r];
                        }
                    }
                }
                d_omega_norm2 += raised * d_omega[a][b][c];
            }
        }
    }
    d_omega_norm2 /= 6.0;
    let delta_omega = std::array::from_fn(|a| (0..4).map(|k| nabla_j[k][(k, a)]).sum());
    let along = |x: &Vec4| -> Endo { (0..4).map(|a| nabla_j[a] * x[a]).sum() };
    let nijenhuis: [[Vec4; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let x = Vec4::ith(a, 1.0);
            let y = Vec4::ith(b, 1.0);
            along(&(j * x)) * y - along(&(j * y)) * x + j * (nabla_j[b] * x) - j * (nabla_j[a] * y)
        })
    });
    let mut nijenhuis_norm2 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let w = gi[(a, c)] * gi[(b, d)];
                    if w != 0.0 {
                        nijenhuis_norm2 += w * mp.inner(&nijenhuis[a][b], &nijenhuis[c][d]);
                    }
                }
            }
        }
    }
    nijenhuis_norm2 *= 0.5;
    let mut norm2 = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            norm2 += gi[(k, l)] * inner_endo(&nabla_j[k], &nabla_j[l], mp);
        }
    }
    let mut quasi_kahler_residual: f64 = 0.0;
    for a in 0..4 {
        let x = Vec4::ith(a, 1.0);
        let d = along(&(j * x)) - nabla_j[a] * j;
        quasi_kahler_residual = quasi_kahler_residual.max(d.abs().max());
    }
    Ok(NablaJData {
        nabla_j,
        xi: mp.raise(&xi_l),
        eta: mp.raise(&eta_l),
        d_omega,
        delta_omega,
        nijenhuis,
        norm2,
        d_omega_norm2,
        nijenhuis_norm2,
        quasi_kahler_residual,
        reconstruction_residual,
    })
}

/// `R̃ic(X) = R̃(X, X_k) X^k` and the expressions it should equal.
#[derive(Clone, Debug)]
pub struct RictildeCheck {
    pub rictilde: Endo,
    /// `½(Ric⋆⁺ − Ric⁺)`.
    pub from_star: Endo,
    /// `tr R̃ic`.
    pub s_tilde: f64,
    /// `−¼ g^{kl} ∇_k J ∘ ∇_l J`.
    pub from_nabla_j: Endo,
    /// `|∇J|²`.
    pub nabla_j_norm2: f64,
}

impl RictildeCheck {
    /// `‖R̃ic − S̃/4 Id‖`.
    pub fn isotropy_residual(&self) -> f64 {
        (self.rictilde - Endo::identity() * (self.s_tilde / 4.0)).abs().max()
    }
}

pub fn rictilde_ak_check(
    bundle: &CurvatureBundle,
    star: &StarCurvature,
    nj: &NablaJData,
    j: &Endo,
    mp: &MetricPoint,
) -> RictildeCheck {
    let mut rictilde = Endo::zeros();
    for i in 0..4 {
        let x = Vec4::ith(i, 1.0);
        let mut col = Vec4::zeros();
        for k in 0..4 {
            let r = rtilde_pair(&x, &Vec4::ith(k, 1.0), bundle, j);
            for l in 0..4 {
                col += r.column(l) * mp.g_inv[(k, l)];
            }
        }
        rictilde.set_column(i, &col);
    }
    let mut from_nabla_j = Endo::zeros();
    for k in 0..4 {
        for l in 0..4 {
            from_nabla_j += nj.nabla_j[k] * nj.nabla_j[l] * mp.g_inv[(k, l)];
        }
    }
    RictildeCheck {
        s_tilde: rictilde.trace(),
        rictilde,
        from_star: (star.ric_star_plus - star.ric_plus) * 0.5,
        from_nabla_j: from_nabla_j * -0.25,
        nabla_j_norm2: nj.norm2,
    }
}

/// Pairings of `W₊` with `P₁ = J ⊗ J` and `P₂ = I ⊗ I + K ⊗ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct P1P2 {
    pub inner_p1: f64,
    pub inner_p2: f64,
    /// `F = λ(2P₁ − P₂)` in the `(J, I, K)` basis.
    pub f: nalgebra::Matrix3<f64>,
    /// `G = W₊ − F`.
    pub g: nalgebra::Matrix3<f64>,
    pub g_norm2: f64,
}

pub fn projections_p1p2(w: &WplusMatrix, lambda: f64) -> P1P2 {
    let f = nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0, -1.0, -1.0)) * lambda;
    let g = w.m - f;
    P1P2 {
        inner_p1: w.m[(0, 0)],
        inner_p2: w.m[(1, 1)] + w.m[(2, 2)],
        f,
        g_norm2: g.norm_squared(),
        g,
    }
}

/// `Θ(X) = (1/24)(2 dS(JX) J − dS(IX) I − dS(KX) K)`.
pub fn theta_form(bundle: &CurvatureBundle, frame: &SelfDualFrame, x: &Vec4) -> Endo {
    let ds = Vec4::from(bundle.ds);
    let d = |b: &Endo| ds.dot(&(b * x));
    (frame.j * (2.0 * d(&frame.j)) - frame.i * d(&frame.i) - frame.k * d(&frame.k)) / 24.0
}

/// `(Y ⌟ T)(X)` for `T = a P₁ + b (P₂ parts)`, evaluated from the operator
/// `A ↦ 2⟨J,A⟩J − ⟨I,A⟩I − ⟨K,A⟩K` scaled by `c`.
pub fn interior_two_p1_minus_p2(y: &Vec4, x: &Vec4, c: f64, frame: &SelfDualFrame, mp: &MetricPoint) -> Endo {
    let a = y * mp.lower(x).transpose() - x * mp.lower(y).transpose();
    let t = frame.j * (2.0 * inner_endo(&frame.j, &a, mp))
        - frame.i * inner_endo(&frame.i, &a, mp)
        - frame.k * inner_endo(&frame.k, &a, mp);
    t * (0.5 * c)
}

/// `q(J) = g((∇²_{X_k,X_l} Ric) J X^k, J X^l)`.
pub fn q_j_integrand(bundle: &CurvatureBundle, j: &Endo, mp: &MetricPoint) -> Result<f64> {
    let n2 = bundle.nabla2_ric()?;
    let jg = j * mp.g_inv; // (J X^k)^p = (J g⁻¹)^{pk}
    let mut s = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            for p in 0..4 {
                for q in 0..4 {
                    s += jg[(p, k)] * jg[(q, l)] * n2[k][l][p][q];
                }
            }
        }
    }
    Ok(s)
}

/// `⟨φ, ψ⟩` evaluated three ways.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiPsi {
    /// `½ g(φ(X^k, X^l), ψ(X_k, X_l))`.
    pub definition: f64,
    /// `¼ g(J φ(X^k, X^l), (∇_k Ric) X_l − (∇_l Ric) X_k)`.
    pub via_nabla_ric: f64,
    /// `½ g((∇_k Ric) K X^k, ξ) − ½ g((∇_k Ric) I X^k, η)`.
    pub via_xi_eta: f64,
}

pub fn phi_psi_pairing(
    bundle: &CurvatureBundle,
    nj: &NablaJData,
    frame: &SelfDualFrame,
    mp: &MetricPoint,
) -> Result<PhiPsi> {
    let j = &frame.j;
    let mut nric = [Endo::zeros(); 4];
    for (a, n) in nric.iter_mut().enumerate() {
        *n = bundle.nabla_ric_endo(&Vec4::ith(a, 1.0), mp)?;
    }
    let along_ric = |x: &Vec4| -> Endo { (0..4).map(|a| nric[a] * x[a]).sum() };
    let phi = |x: &Vec4, y: &Vec4| nj.along(x) * y - nj.along(y) * x;
    let psi = |x: &Vec4, y: &Vec4| -> Vec4 {
        let c = |z: &Vec4| commutator(&along_ric(z), j);
        (c(x) * y - c(y) * x - c(&(j * x)) * (j * y) + c(&(j * y)) * (j * x)) / 8.0
    };
    let up = |k: usize| Vec4::from_fn(|l, _| mp.g_inv[(k, l)]);
    let mut definition = 0.0;
    let mut via_nabla_ric = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            let p = phi(&up(k), &up(l));
            let xk = Vec4::ith(k, 1.0);
            let xl = Vec4::ith(l, 1.0);
            definition += 0.5 * mp.inner(&p, &psi(&xk, &xl));
            let d = nric[k] * xl - nric[l] * xk;
            via_nabla_ric += 0.25 * mp.inner(&(j * p), &d);
        }
    }
    let mut vk = Vec4::zeros();
    let mut vi = Vec4::zeros();
    for k in 0..4 {
        vk += nric[k] * (frame.k * up(k));
        vi += nric[k] * (frame.i * up(k));
    }
    let via_xi_eta = 0.5 * mp.inner(&vk, &nj.xi) - 0.5 * mp.inner(&vi, &nj.eta);
    Ok(PhiPsi {
        definition,
        via_nabla_ric,
        via_xi_eta,
    })
}

/// `½ [df ⊗ X − g(X) ⊗ ∇f, J]`.
pub fn conformal_bracket(x: &Vec4, df: &Vec4, j: &Endo, mp: &MetricPoint) -> Endo {
    let grad = mp.raise(df);
    let a = x * df.transpose() - grad * mp.lower(x).transpose();
    commutator(&a, j) * 0.5
}

/// `∇̄_{∂_a} J` for `ḡ = e^f g`: `∇_a J + ½(df(K∂_a) I − df(I∂_a) K)`.
pub fn conformal_nabla_j(nj: &NablaJData, frame: &SelfDualFrame, df: &Vec4) -> [Endo; 4] {
    std::array::from_fn(|a| {
        let x = Vec4::ith(a, 1.0);
        nj.nabla_j[a] + (frame.i * df.dot(&(frame.k * x)) - frame.k * df.dot(&(frame.i * x))) * 0.5
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::CurvatureBundle;
    use crate::exprjet::{coord_names, eval_jet, parse_expression};
    use crate::pointgeom::build_j_frame;

    fn kt_point(p: [f64; 4]) -> (MetricPoint, AcsPoint) {
        let names = coord_names(["x", "y", "z", "t"]);
        let g = [
            ["1", "0", "0", "0"],
            ["0", "1 + x^2", "-x", "0"],
            ["0", "-x", "1", "0"],
            ["0", "0", "0", "1"],
        ];
        let j = [
            ["0", "x", "-1", "0"],
            ["0", "0", "0", "-1"],
            ["1", "0", "0", "-x"],
            ["0", "1", "0", "0"],
        ];
        let ev = |s: &str| eval_jet(&parse_expression(s, &names).unwrap(), &p, 4).unwrap();
        let gj: [[Jet; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| ev(g[a][b])));
        let mp = MetricPoint::from_jets(p, gj).unwrap();
        let jj: [[Jet; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| ev(j[a][b])));
        let acs = AcsPoint::from_jets(jj, &mp).unwrap();
        (mp, acs)
    }

    #[test]
    fn kodaira_thurston_reference_values() {
        let (mp, acs) = kt_point([0.3, 0.2, 0.7, 0.1]);
        let b = CurvatureBundle::compute(&mp).unwrap();
        let frame = build_j_frame(&mp, &acs.j, &Vec4::x()).unwrap();
        let basis = crate::selfdual::lambda2_split(&frame, &mp);
        let star = star_curvature(&b, &frame, &basis, &mp);
        let nj = nabla_j_data(&acs, &frame, &b.gamma, &mp).unwrap();
        assert!((b.s + 0.5).abs() < 1e-12);
        assert!((star.s_star - 0.5).abs() < 1e-12);
        assert!((nj.norm2 - 0.5).abs() < 1e-12);
        assert!(nj.d_omega_norm2 < 1e-24);
        assert!(nj.nijenhuis_norm2 > 1e-3);
        assert!((star.rtilde_plus_norm2 - 0.125).abs() < 1e-12);
        assert!(nj.reconstruction_residual < 1e-12);
        assert!(nj.quasi_kahler_residual < 1e-12);
        assert!(nj.eta_j_xi(&acs.j).abs().max() < 1e-12);
        // N(∂x, ∂y) = −∂z
        let n = nj.nijenhuis[0][1];
        assert!((n - Vec4::new(0.0, 0.0, -1.0, 0.0)).abs().max() < 1e-12);
    }

    #[test]
    fn star_ricci_of_identity_is_ricci() {
        let (mp, _) = kt_point([0.1, -0.4, 0.2, 0.0]);
        let b = CurvatureBundle::compute(&mp).unwrap();
        let r = star_ricci(&Endo::identity(), &b, &mp);
        assert!((r - b.ric).abs().max() < 1e-13);
    }

    #[test]
    fn conformal_bracket_matches_supplement_form() {
        let (mp, acs) = kt_point([0.6, 0.1, 0.0, 0.3]);
        let frame = build_j_frame(&mp, &acs.j, &Vec4::y()).unwrap();
        let df = Vec4::new(0.3, -1.2, 0.5, 0.8);
        for a in 0..4 {
            let x = Vec4::ith(a, 1.0);
            let lhs = conformal_bracket(&x, &df, &acs.j, &mp) * 2.0;
            let rhs = frame.i * df.dot(&(frame.k * x)) - frame.k * df.dot(&(frame.i * x));
            assert!((lhs - rhs).abs().max() < 1e-12);
        }
    }

    #[test]
    fn theta_agrees_with_interior_product() {
        let (mp, acs) = kt_point([0.2, 0.3, 0.4, 0.5]);
        let mut b = CurvatureBundle::compute(&mp).unwrap();
        b.ds = [0.3, -0.7, 1.1, 0.2];
        let frame = build_j_frame(&mp, &acs.j, &Vec4::x()).unwrap();
        let grad = b.grad_s(&mp);
        for a in 0..4 {
            let x = Vec4::ith(a, 1.0);
            let t = theta_form(&b, &frame, &x);
            let u = interior_two_p1_minus_p2(&grad, &x, 1.0 / 6.0, &frame, &mp);
            assert!((t - u).abs().max() < 1e-13);
        }
    }
}
