//! Self-dual/anti-self-dual splitting of two-forms, the self-dual Weyl
//! operator as a 3×3 matrix, and the divergences `δW±`.
//!
//! Operators on Λ² are paired with the full trace; tangent endomorphisms use
//! the weighted product of [`inner_endo`].

use nalgebra::{Matrix3, Matrix6, SymmetricEigen};

use crate::curvature::{ix4, nabla_weyl_operator, pair_sum, weyl_operator, CurvatureBundle};
use crate::error::{GeomError, Result};
use crate::exprjet::Jet;
use crate::pointgeom::{inner_endo, perm_sign, project_plus, Endo, MetricPoint, SelfDualFrame, TwoForm, Vec4};

/// Orthonormal basis of Λ²: `(Ω_J, Ω_I, Ω_K)` then three anti-self-dual forms.
#[derive(Clone, Debug)]
pub struct Lambda2Basis {
    pub endos: [Endo; 6],
    pub forms: [TwoForm; 6],
    pub star_signs: [f64; 6],
}

impl Lambda2Basis {
    pub fn plus(&self) -> &[Endo] {
        &self.endos[..3]
    }

    pub fn minus(&self) -> &[Endo] {
        &self.endos[3..]
    }

    pub fn project_plus(&self, a: &Endo, mp: &MetricPoint) -> Endo {
        self.plus().iter().map(|b| b * inner_endo(b, a, mp)).sum()
    }

    pub fn project_minus(&self, a: &Endo, mp: &MetricPoint) -> Endo {
        self.minus().iter().map(|b| b * inner_endo(b, a, mp)).sum()
    }

    /// Gram matrix under the weighted product.
    pub fn gram(&self, mp: &MetricPoint) -> Matrix6<f64> {
        Matrix6::from_fn(|a, b| inner_endo(&self.endos[a], &self.endos[b], mp))
    }
}

pub fn lambda2_split(frame: &SelfDualFrame, mp: &MetricPoint) -> Lambda2Basis {
    let endos = frame.skew_basis(mp);
    let forms = endos.map(|a| a.transpose() * mp.g);
    Lambda2Basis {
        endos,
        forms,
        star_signs: [1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
    }
}

/// Symmetric 3×3 matrix of an operator on Λ²₊ (or Λ²₋) and its invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct WplusMatrix {
    pub m: Matrix3<f64>,
    pub norm2: f64,
    pub det: f64,
    /// Sorted descending.
    pub eigenvalues: [f64; 3],
}

impl WplusMatrix {
    pub fn from_matrix(m: Matrix3<f64>) -> Self {
        let sym = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        ev.sort_by(|a, b| b.total_cmp(a));
        WplusMatrix {
            m,
            norm2: m.norm_squared(),
            det: m.determinant(),
            eigenvalues: ev,
        }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn asymmetry(&self) -> f64 {
        (self.m - self.m.transpose()).abs().max()
    }
}

fn operator_matrix(basis: &[Endo], bundle: &CurvatureBundle, mp: &MetricPoint) -> Result<Matrix3<f64>> {
    let images: Vec<Endo> = basis
        .iter()
        .map(|b| weyl_operator(b, bundle, mp))
        .collect::<Result<_>>()?;
    Ok(Matrix3::from_fn(|a, b| inner_endo(&basis[a], &images[b], mp)))
}

/// `m_ab = ⟨B_a, W(B_b)⟩` over `(J, I, K)`.
pub fn wplus_matrix(bundle: &CurvatureBundle, basis: &Lambda2Basis, mp: &MetricPoint) -> Result<WplusMatrix> {
    Ok(WplusMatrix::from_matrix(operator_matrix(basis.plus(), bundle, mp)?))
}

/// Same construction over the anti-self-dual basis.
pub fn wminus_matrix(bundle: &CurvatureBundle, basis: &Lambda2Basis, mp: &MetricPoint) -> Result<WplusMatrix> {
    Ok(WplusMatrix::from_matrix(operator_matrix(basis.minus(), bundle, mp)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WplusInvariants {
    pub norm2: f64,
    pub det: f64,
    /// Coefficients of `t³ + c₂t² + c₁t + c₀`, highest first.
    pub chi: [f64; 4],
    pub eigenvalues: [f64; 3],
    /// `det² − |W₊|⁶/54`; zero iff at most two distinct eigenvalues.
    pub two_eigen_residual: f64,
}

pub fn wplus_invariants(w: &WplusMatrix) -> WplusInvariants {
    WplusInvariants {
        norm2: w.norm2,
        det: w.det,
        chi: [1.0, 0.0, -0.5 * w.norm2, -w.det],
        eigenvalues: w.eigenvalues,
        two_eigen_residual: w.det * w.det - w.norm2.powi(3) / 54.0,
    }
}

/// Real roots of `t³ − ½ n t − d`, descending, for a traceless symmetric
/// matrix with `|W|² = n` and determinant `d`.
pub fn chi_roots(norm2: f64, det: f64) -> [f64; 3] {
    let p = 0.5 * norm2;
    if p <= 0.0 {
        return [0.0; 3];
    }
    let r = 2.0 * (p / 3.0).sqrt();
    let arg = (1.5 * det / p * (3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let tau = 2.0 * std::f64::consts::PI / 3.0;
    let mut roots = [r * theta.cos(), r * (theta - tau).cos(), r * (theta + tau).cos()];
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// Divergences `δW₊(∂_a)` and `δW₋(∂_a)` for the four chart directions.
#[derive(Clone, Debug)]
pub struct DeltaW {
    pub plus: [Endo; 4],
    pub minus: [Endo; 4],
}

impl DeltaW {
    pub fn plus_at(&self, x: &Vec4) -> Endo {
        (0..4).map(|a| self.plus[a] * x[a]).sum()
    }

    pub fn minus_at(&self, x: &Vec4) -> Endo {
        (0..4).map(|a| self.minus[a] * x[a]).sum()
    }
}

/// `A_k = ξ^k ⊗ X − g(X) ⊗ X^k`: `(A_k)^m_n = δ^k_n X^m − g^{km} (gX)_n`.
fn divergence_argument(k: usize, x: &Vec4, mp: &MetricPoint) -> Endo {
    let gx = mp.lower(x);
    Endo::from_fn(|m, n| {
        let delta = if n == k { x[m] } else { 0.0 };
        delta - mp.g_inv[(k, m)] * gx[n]
    })
}

/// `δW±(X) = ½ (∇_{X_k} W±)(ξ^k ⊗ X − g(X) ⊗ X^k)`.
pub fn delta_wpm(bundle: &CurvatureBundle, frame: &SelfDualFrame, mp: &MetricPoint) -> Result<DeltaW> {
    let mut plus = [Endo::zeros(); 4];
    let mut minus = [Endo::zeros(); 4];
    for a in 0..4 {
        let x = Vec4::ith(a, 1.0);
        let mut p = Endo::zeros();
        let mut q = Endo::zeros();
        for k in 0..4 {
            let arg = divergence_argument(k, &x, mp);
            let ap = project_plus(&arg, frame, mp);
            let am = arg - ap;
            let nw_p = nabla_weyl_operator(&ap, bundle, mp)?;
            let nw_m = nabla_weyl_operator(&am, bundle, mp)?;
            p += project_plus(&nw_p[k], frame, mp);
            q += nw_m[k] - project_plus(&nw_m[k], frame, mp);
        }
        plus[a] = p * 0.5;
        minus[a] = q * 0.5;
    }
    Ok(DeltaW { plus, minus })
}

/// `δW(X) = (∇_{X_k} W)(X, X^k)` contracted directly from `∇W`.
pub fn delta_w_full(bundle: &CurvatureBundle, x: &Vec4, mp: &MetricPoint) -> Result<Endo> {
    let pairs = bundle.nabla_w_pairs()?;
    let mut out = Endo::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let gkl = mp.g_inv[(k, l)];
            if gkl == 0.0 {
                continue;
            }
            for a in 0..4 {
                out += pairs[k][a][l] * (gkl * x[a]);
            }
        }
    }
    Ok(out)
}

/// `(Y ⌟ W₊)(X) = W₊(Y, X)`.
pub fn interior_wplus(y: &Vec4, x: &Vec4, bundle: &CurvatureBundle, frame: &SelfDualFrame, mp: &MetricPoint) -> Endo {
    let mut w = Endo::zeros();
    for a in 0..4 {
        for b in 0..4 {
            w += bundle.w_pairs[a][b] * (y[a] * x[b]);
        }
    }
    project_plus(&w, frame, mp)
}

/// `|∇W₊|² = Σ g^{kl} tr(∇_k W₊ ∘ ∇_l W₊)` in the frame's Λ²₊ basis.
pub fn nabla_wplus_norm2(bundle: &CurvatureBundle, basis: &Lambda2Basis, mp: &MetricPoint) -> Result<f64> {
    let plus = basis.plus();
    let mut mats = [Matrix3::zeros(); 4];
    for (b, bb) in plus.iter().enumerate() {
        let imgs = nabla_weyl_operator(bb, bundle, mp)?;
        for k in 0..4 {
            for a in 0..3 {
                mats[k][(a, b)] = inner_endo(&plus[a], &imgs[k], mp);
            }
        }
    }
    let mut s = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            s += mp.g_inv[(k, l)] * mats[k].component_mul(&mats[l]).sum();
        }
    }
    Ok(s)
}

/// `|W₊|²` as a scalar jet, computed without a frame:
/// `½ (tr 𝒲² + tr ★𝒲²)` over coordinate two-forms.
pub fn wplus_norm2_jet(bundle: &CurvatureBundle, mp: &MetricPoint, orient: f64) -> Result<Jet> {
    let order = bundle.jet_order() - 2;
    let ginv: Vec<Jet> = bundle.gamma.g_inv_jets.iter().map(|j| j.truncate(order)).collect();
    let gi = |a: usize, b: usize| &ginv[4 * a + b];
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|a| ((a + 1)..4).map(move |b| (a, b))).collect();
    // raise(ab, ml) = g^{ma} g^{lb} − g^{mb} g^{la}
    let mut raise = vec![Jet::zero(order); 6 * 16];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for m in 0..4 {
            for l in 0..4 {
                let mut j = gi(m, a) * gi(l, b);
                j.axpy(-1.0, &(gi(m, b) * gi(l, a)));
                raise[16 * p + 4 * m + l] = j;
            }
        }
    }
    let w = bundle.weyl_jets();
    // L_{(qs),(ab)} = Σ_{ml} raise(ab,ml) W_{mlsq}
    let mut lmat = vec![Jet::zero(order); 36];
    for (r, &(q, s)) in pairs.iter().enumerate() {
        for c in 0..6 {
            let mut acc = Jet::zero(order);
            for m in 0..4 {
                for l in 0..4 {
                    acc.add_product(&raise[16 * c + 4 * m + l], &w[ix4(m, l, s, q)]);
                }
            }
            lmat[6 * r + c] = acc;
        }
    }
    // ★_{(kl),(ab)} = Σ_{i<j} raise(ab,ij) ε_ijkl
    let det = jet_det(mp, order);
    let vol = det.sqrt()?.scale(orient);
    let mut star = vec![Jet::zero(order); 36];
    for (r, &(k, l)) in pairs.iter().enumerate() {
        for c in 0..6 {
            let mut acc = Jet::zero(order);
            for &(i, j) in &pairs {
                let e = perm_sign(i, j, k, l);
                if e != 0.0 {
                    acc.axpy(e, &raise[16 * c + 4 * i + j]);
                }
            }
            star[6 * r + c] = &acc * &vol;
        }
    }
    let l2 = jet_matmul6(&lmat, &lmat, order);
    let sl2 = jet_matmul6(&star, &l2, order);
    let mut out = Jet::zero(order);
    for d in 0..6 {
        out.axpy(0.5, &l2[7 * d]);
        out.axpy(0.5, &sl2[7 * d]);
    }
    Ok(out)
}

fn jet_matmul6(a: &[Jet], b: &[Jet], order: usize) -> Vec<Jet> {
    let mut out = vec![Jet::zero(order); 36];
    for i in 0..6 {
        for j in 0..6 {
            let mut acc = Jet::zero(order);
            for k in 0..6 {
                acc.add_product(&a[6 * i + k], &b[6 * k + j]);
            }
            out[6 * i + j] = acc;
        }
    }
    out
}

/// `det g` as a jet by the Leibniz expansion.
pub(crate) fn jet_det(mp: &MetricPoint, order: usize) -> Jet {
    let mut out = Jet::zero(order);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let e = perm_sign(a, b, c, d);
                    if e == 0.0 {
                        continue;
                    }
                    let t = &(&mp.jets[0][a] * &mp.jets[1][b]) * &(&mp.jets[2][c] * &mp.jets[3][d]);
                    out.axpy(e, &t.truncate(order));
                }
            }
        }
    }
    out
}

/// `|∇|W₊||²` from the jet of `|W₊|²`; needs `|W₊| > threshold`.
pub fn grad_wplus_norm_sq(norm2_jet: &Jet, mp: &MetricPoint, threshold: f64) -> Result<f64> {
    let n2 = norm2_jet.value();
    if n2.max(0.0).sqrt() <= threshold {
        return Err(GeomError::Domain(format!(
            "|W+| = {:.3e} below threshold",
            n2.max(0.0).sqrt()
        )));
    }
    let d = Vec4::from(norm2_jet.gradient());
    Ok(mp.inner(&mp.raise(&d), &mp.raise(&d)) / (4.0 * n2))
}

/// Both gradient norms of the self-dual Weyl operator.
pub fn nabla_wplus_norms(
    bundle: &CurvatureBundle,
    basis: &Lambda2Basis,
    frame: &SelfDualFrame,
    mp: &MetricPoint,
) -> Result<(f64, f64)> {
    let a = nabla_wplus_norm2(bundle, basis, mp)?;
    let jet = wplus_norm2_jet(bundle, mp, frame.star_orientation)?;
    let b = grad_wplus_norm_sq(&jet, mp, 1e-12)?;
    Ok((a, b))
}

/// `Σ_B g(X, V_B) B / 4 + Σ_B dS(BX) B / 24` with `V_B = (∇_{X_k} Ric) B X^k`,
/// the divergence of W₊ expressed through `∇Ric` and `dS`.
pub fn delta_wplus_from_ricci(
    bundle: &CurvatureBundle,
    frame: &SelfDualFrame,
    x: &Vec4,
    mp: &MetricPoint,
) -> Result<Endo> {
    let mut out = Endo::zeros();
    let ds = Vec4::from(bundle.ds);
    for b in [&frame.j, &frame.i, &frame.k] {
        let v = ricci_divergence_along(bundle, b, mp)?;
        let coeff = 0.25 * mp.inner(x, &v) + ds.dot(&(b * x)) / 24.0;
        out += b * coeff;
    }
    Ok(out)
}

/// `(∇_{X_k} Ric) B X^k` as a vector.
pub fn ricci_divergence_along(bundle: &CurvatureBundle, b: &Endo, mp: &MetricPoint) -> Result<Vec4> {
    let mut v = Vec4::zeros();
    for k in 0..4 {
        let xk = Vec4::from_fn(|l, _| mp.g_inv[(k, l)]);
        let nrk = bundle.nabla_ric_endo(&Vec4::ith(k, 1.0), mp)?;
        v += nrk * (b * xk);
    }
    Ok(v)
}

/// `W(A)` through the pair table, exposed for cross-checks.
pub fn weyl_pair_operator(a: &Endo, bundle: &CurvatureBundle, mp: &MetricPoint) -> Endo {
    pair_sum(a, &Endo::identity(), &bundle.w_pairs, mp)
}
