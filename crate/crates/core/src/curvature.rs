//! Christoffel symbols, curvature tensors and their covariant derivatives
//! computed from metric jets in the chart basis.
//!
//! Conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`,
//! `R_ijkl = g(R(∂_i,∂_j)∂_k, ∂_l)`, `Ric(X) = R(X, X_k)X^k`, `S = tr Ric`.
//! Higher covariant derivatives prepend the derivative index:
//! `(∇²T)_{a b …} = ∇_a (∇T)_{b …}`.

use nalgebra::Matrix4;

use crate::error::{GeomError, Result};
use crate::exprjet::Jet;
use crate::pointgeom::{skew_residual, Endo, MetricPoint};

pub type T2 = [[f64; 4]; 4];
pub type T3 = [[[f64; 4]; 4]; 4];
pub type T4 = [[[[f64; 4]; 4]; 4]; 4];
pub type T5 = [[[[[f64; 4]; 4]; 4]; 4]; 4];

#[inline]
pub(crate) fn ix2(a: usize, b: usize) -> usize {
    4 * a + b
}
#[inline]
pub(crate) fn ix3(a: usize, b: usize, c: usize) -> usize {
    16 * a + 4 * b + c
}
#[inline]
pub(crate) fn ix4(a: usize, b: usize, c: usize, d: usize) -> usize {
    64 * a + 16 * b + 4 * c + d
}

/// Endomorphism-valued 2-tensor `(a,b) ↦ T(∂_a, ∂_b)`.
pub type PairEndos = [[Endo; 4]; 4];

/// Christoffel symbols `Γ^k_ij` (stored `[k][i][j]`) and their jets.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub values: T3,
    pub jets: Vec<Jet>,
    pub g_inv_jets: Vec<Jet>,
}

/// Inverse metric as jets: `(G₀ + H)⁻¹ = Σ_k (−G₀⁻¹H)^k G₀⁻¹`.
fn inverse_jets(mp: &MetricPoint) -> Vec<Jet> {
    let order = mp.jet_order();
    let g0i = mp.g_inv;
    let mut n = vec![Jet::zero(order); 16];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = Jet::zero(order);
            for c in 0..4 {
                let mut h = mp.jets[c][b].clone();
                h = h.add_const(-h.value());
                acc.axpy(g0i[(a, c)], &h);
            }
            n[ix2(a, b)] = acc;
        }
    }
    let mut term: Vec<Jet> = (0..16).map(|i| Jet::constant(g0i[(i / 4, i % 4)], order)).collect();
    let mut sum = term.clone();
    for _ in 0..order {
        let mut next = vec![Jet::zero(order); 16];
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = Jet::zero(order);
                for c in 0..4 {
                    acc.add_product(&n[ix2(a, c)], &term[ix2(c, b)]);
                }
                next[ix2(a, b)] = -acc;
            }
        }
        for (s, t) in sum.iter_mut().zip(&next) {
            s.axpy(1.0, t);
        }
        term = next;
    }
    sum
}

/// `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffel(mp: &MetricPoint) -> Result<Christoffel> {
    let order = mp.jet_order();
    if order < 1 {
        return Err(GeomError::InsufficientJetOrder {
            needed: 1,
            available: order,
        });
    }
    let g_inv_jets = inverse_jets(mp);
    let mut dg: Vec<Jet> = Vec::with_capacity(64);
    for var in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                dg.push(mp.jets[i][j].partial(var)?);
            }
        }
    }
    let d = |var: usize, i: usize, j: usize| &dg[ix3(var, i, j)];
    let mut lower = vec![Jet::zero(order - 1); 64];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let s = &(d(i, j, l) + d(j, i, l)) - d(l, i, j);
                lower[ix3(l, i, j)] = s.scale(0.5);
            }
        }
    }
    let mut jets = vec![Jet::zero(order - 1); 64];
    let mut values = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let mut acc = Jet::zero(order - 1);
                for l in 0..4 {
                    acc.add_product(&g_inv_jets[ix2(k, l)], &lower[ix3(l, i, j)]);
                }
                values[k][i][j] = acc.value();
                values[k][j][i] = acc.value();
                jets[ix3(k, j, i)] = acc.clone();
                jets[ix3(k, i, j)] = acc;
            }
        }
    }
    Ok(Christoffel {
        values,
        jets,
        g_inv_jets,
    })
}

/// Full curvature data at one point.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub gamma: Christoffel,
    /// `R_ijkl`.
    pub riem: T4,
    /// Ricci as a symmetric bilinear form `Ric_ij`.
    pub ric_lower: T2,
    /// Ricci endomorphism `Ric^i_j`.
    pub ric: Endo,
    pub s: f64,
    pub ds: [f64; 4],
    /// `W_ijkl`.
    pub weyl: T4,
    /// `(∇_a Ric)_bc`.
    pub nabla_ric: Option<T3>,
    /// `(∇²_{a,b} Ric)_cd`.
    pub nabla2_ric: Option<T4>,
    /// `(∇_a W)_ijkl`.
    pub nabla_weyl: Option<T5>,
    /// `R(∂_a, ∂_b)` as endomorphisms.
    pub r_pairs: PairEndos,
    /// `W(∂_a, ∂_b)` as endomorphisms.
    pub w_pairs: PairEndos,
    /// `(∇_k W)(∂_a, ∂_b)`, indexed `[k][a][b]`.
    pub nabla_w_pairs: Option<[PairEndos; 4]>,
    pub(crate) riem_jets: Vec<Jet>,
    pub(crate) weyl_jets: Vec<Jet>,
    pub(crate) s_jet: Jet,
    jet_order: usize,
}

fn endo_pairs(up: impl Fn(usize, usize, usize, usize) -> f64) -> PairEndos {
    std::array::from_fn(|a| std::array::from_fn(|b| Matrix4::from_fn(|p, q| up(p, q, a, b))))
}

/// Riemann, Ricci and scalar curvature jets, plus values.
pub fn riemann_ricci_scalar(mp: &MetricPoint) -> Result<CurvatureBundle> {
    CurvatureBundle::compute(mp)
}

impl CurvatureBundle {
    /// Computes everything the metric jets allow: curvature needs order 2,
    /// `∇Ric` and `∇W` order 3, `∇²Ric` order 4.
    pub fn compute(mp: &MetricPoint) -> Result<Self> {
        let order = mp.jet_order();
        if order < 2 {
            return Err(GeomError::InsufficientJetOrder {
                needed: 2,
                available: order,
            });
        }
        let gamma = christoffel(mp)?;
        let ro = order - 2;
        let gj = &gamma.jets;
        let mut dgamma: Vec<Jet> = Vec::with_capacity(256);
        for var in 0..4 {
            for x in gj {
                dgamma.push(x.partial(var)?);
            }
        }
        let dg = |var: usize, l: usize, i: usize, j: usize| &dgamma[64 * var + ix3(l, i, j)];

        // R^l_kij = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
        let mut up = vec![Jet::zero(ro); 256];
        for l in 0..4 {
            for k in 0..4 {
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        let mut acc = dg(i, l, j, k) - dg(j, l, i, k);
                        for m in 0..4 {
                            acc.add_product(&gj[ix3(l, i, m)], &gj[ix3(m, j, k)]);
                            let neg = -&gj[ix3(l, j, m)];
                            acc.add_product(&neg, &gj[ix3(m, i, k)]);
                        }
                        up[ix4(l, k, j, i)] = -&acc;
                        up[ix4(l, k, i, j)] = acc;
                    }
                }
            }
        }

        // R_ijkl = g_lm R^m_kij
        let mut riem_jets = vec![Jet::zero(ro); 256];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut acc = Jet::zero(ro);
                        for m in 0..4 {
                            acc.add_product(&mp.jets[l][m], &up[ix4(m, k, i, j)]);
                        }
                        riem_jets[ix4(i, j, k, l)] = acc;
                    }
                }
            }
        }

        let ginv = &gamma.g_inv_jets;
        // Ric_ij = g^kl R_iklj
        let mut ric_jets = vec![Jet::zero(ro); 16];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Jet::zero(ro);
                for k in 0..4 {
                    for l in 0..4 {
                        acc.add_product(&ginv[ix2(k, l)], &riem_jets[ix4(i, k, l, j)]);
                    }
                }
                ric_jets[ix2(i, j)] = acc;
            }
        }
        let mut s_jet = Jet::zero(ro);
        for i in 0..4 {
            for j in 0..4 {
                s_jet.add_product(&ginv[ix2(i, j)], &ric_jets[ix2(i, j)]);
            }
        }

        // W = R − ½ (Ric − S g/6) ⊙ g
        let mut h = vec![Jet::zero(ro); 16];
        for i in 0..4 {
            for j in 0..4 {
                let mut x = ric_jets[ix2(i, j)].clone();
                x.axpy(-1.0 / 6.0, &(&s_jet * &mp.jets[i][j]));
                h[ix2(i, j)] = x;
            }
        }
        let gjet = |a: usize, b: usize| &mp.jets[a][b];
        let mut weyl_jets = vec![Jet::zero(ro); 256];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut acc = riem_jets[ix4(i, j, k, l)].clone();
                        let mut kn = Jet::zero(ro);
                        kn.add_product(&h[ix2(i, l)], gjet(j, k));
                        kn.add_product(&h[ix2(j, k)], gjet(i, l));
                        kn.axpy(-1.0, &(&h[ix2(i, k)] * gjet(j, l)));
                        kn.axpy(-1.0, &(&h[ix2(j, l)] * gjet(i, k)));
                        acc.axpy(-0.5, &kn);
                        weyl_jets[ix4(i, j, k, l)] = acc;
                    }
                }
            }
        }

        let val4 = |v: &[Jet]| -> T4 {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| v[ix4(i, j, k, l)].value())))
            })
        };
        let riem = val4(&riem_jets);
        let weyl = val4(&weyl_jets);
        let ric_lower: T2 = std::array::from_fn(|i| std::array::from_fn(|j| ric_jets[ix2(i, j)].value()));
        let rl = Matrix4::from_fn(|i, j| ric_lower[i][j]);
        let ric = mp.g_inv * rl;
        let s = s_jet.value();
        let ds = s_jet.gradient();
        let g_inv = mp.g_inv;

        let r_pairs = endo_pairs(|p, q, a, b| up[ix4(p, q, a, b)].value());
        let w_pairs = endo_pairs(|p, q, a, b| (0..4).map(|r| g_inv[(p, r)] * weyl[a][b][q][r]).sum());

        let mut bundle = CurvatureBundle {
            gamma,
            riem,
            ric_lower,
            ric,
            s,
            ds,
            weyl,
            nabla_ric: None,
            nabla2_ric: None,
            nabla_weyl: None,
            r_pairs,
            w_pairs,
            nabla_w_pairs: None,
            riem_jets,
            weyl_jets,
            s_jet,
            jet_order: order,
        };
        if order >= 3 {
            bundle.derivatives(mp, &ric_jets)?;
        }
        Ok(bundle)
    }

    fn derivatives(&mut self, mp: &MetricPoint, ric_jets: &[Jet]) -> Result<()> {
        let order = self.jet_order;
        let gj = &self.gamma.jets;
        let gv = &self.gamma.values;
        let no = order - 3;
        // (∇_a Ric)_bc = ∂_a Ric_bc − Γ^m_ab Ric_mc − Γ^m_ac Ric_bm
        let mut nr = vec![Jet::zero(no); 64];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let mut acc = ric_jets[ix2(b, c)].partial(a)?;
                    for m in 0..4 {
                        let n1 = -&gj[ix3(m, a, b)];
                        acc.add_product(&n1, &ric_jets[ix2(m, c)]);
                        let n2 = -&gj[ix3(m, a, c)];
                        acc.add_product(&n2, &ric_jets[ix2(b, m)]);
                    }
                    nr[ix3(a, b, c)] = acc;
                }
            }
        }
        let nabla_ric: T3 =
            std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| nr[ix3(a, b, c)].value())));
        if order >= 4 {
            let mut n2: T4 = [[[[0.0; 4]; 4]; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let mut v = nr[ix3(b, c, d)].d1(a);
                            for m in 0..4 {
                                v -= gv[m][a][b] * nabla_ric[m][c][d];
                                v -= gv[m][a][c] * nabla_ric[b][m][d];
                                v -= gv[m][a][d] * nabla_ric[b][c][m];
                            }
                            n2[a][b][c][d] = v;
                        }
                    }
                }
            }
            self.nabla2_ric = Some(n2);
        }
        self.nabla_ric = Some(nabla_ric);

        let nw = covariant_derivative_4(&self.weyl_jets, &self.weyl, gv);
        let g_inv = mp.g_inv;
        let pairs: [PairEndos; 4] =
            std::array::from_fn(|k| endo_pairs(|p, q, a, b| (0..4).map(|r| g_inv[(p, r)] * nw[k][a][b][q][r]).sum()));
        self.nabla_weyl = Some(nw);
        self.nabla_w_pairs = Some(pairs);
        Ok(())
    }

    pub fn jet_order(&self) -> usize {
        self.jet_order
    }

    fn missing(needed: usize, available: usize) -> GeomError {
        GeomError::InsufficientJetOrder { needed, available }
    }

    pub fn nabla_ric(&self) -> Result<&T3> {
        self.nabla_ric.as_ref().ok_or(Self::missing(3, self.jet_order))
    }

    pub fn nabla2_ric(&self) -> Result<&T4> {
        self.nabla2_ric.as_ref().ok_or(Self::missing(4, self.jet_order))
    }

    pub fn nabla_weyl(&self) -> Result<&T5> {
        self.nabla_weyl.as_ref().ok_or(Self::missing(3, self.jet_order))
    }

    pub fn nabla_w_pairs(&self) -> Result<&[PairEndos; 4]> {
        self.nabla_w_pairs.as_ref().ok_or(Self::missing(3, self.jet_order))
    }

    /// `(∇_a R)_ijkl`, values only.
    pub fn nabla_riemann(&self) -> Result<T5> {
        if self.jet_order < 3 {
            return Err(Self::missing(3, self.jet_order));
        }
        Ok(covariant_derivative_4(&self.riem_jets, &self.riem, &self.gamma.values))
    }

    /// Scalar curvature as a jet (order two below the metric jets).
    pub fn scalar_jet(&self) -> &Jet {
        &self.s_jet
    }

    /// `W_ijkl` as jets (order two below the metric jets).
    pub fn weyl_jets(&self) -> &[Jet] {
        &self.weyl_jets
    }

    /// `|R|²` with all indices raised (usual tensor norm).
    pub fn riemann_norm2(&self, mp: &MetricPoint) -> f64 {
        tensor4_norm2(&self.riem, mp)
    }

    /// `∇S` as a vector.
    pub fn grad_s(&self, mp: &MetricPoint) -> crate::pointgeom::Vec4 {
        mp.raise(&crate::pointgeom::Vec4::from(self.ds))
    }

    /// `Ric` applied as `(∇_X Ric)` for a direction with components `x`.
    pub fn nabla_ric_endo(&self, x: &crate::pointgeom::Vec4, mp: &MetricPoint) -> Result<Endo> {
        let nr = self.nabla_ric()?;
        let lower = Matrix4::from_fn(|b, c| (0..4).map(|a| x[a] * nr[a][b][c]).sum());
        Ok(mp.g_inv * lower)
    }
}

/// `(∇_a T)_ijkl` from jets of `T_ijkl`.
fn covariant_derivative_4(jets: &[Jet], t: &T4, gv: &T3) -> T5 {
    let mut out: T5 = [[[[[0.0; 4]; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut v = jets[ix4(i, j, k, l)].d1(a);
                        for m in 0..4 {
                            v -= gv[m][a][i] * t[m][j][k][l];
                            v -= gv[m][a][j] * t[i][m][k][l];
                            v -= gv[m][a][k] * t[i][j][m][l];
                            v -= gv[m][a][l] * t[i][j][k][m];
                        }
                        out[a][i][j][k][l] = v;
                    }
                }
            }
        }
    }
    out
}

/// Full tensor norm of a (0,4) tensor.
pub fn tensor4_norm2(t: &T4, mp: &MetricPoint) -> f64 {
    let gi = &mp.g_inv;
    let mut raised = *t;
    for _ in 0..4 {
        // raise the first index and rotate it to the back
        let mut next = [[[[0.0; 4]; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        next[j][k][l][i] = (0..4).map(|m| gi[(i, m)] * raised[m][j][k][l]).sum();
                    }
                }
            }
        }
        raised = next;
    }
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    s += raised[i][j][k][l] * t[i][j][k][l];
                }
            }
        }
    }
    s
}

/// `Σ_{a,b} (P g⁻¹ Qᵀ)^{ab} T(∂_a, ∂_b) = Σ_k T(P X_k, Q X^k)`.
pub fn pair_sum(p: &Endo, q: &Endo, pairs: &PairEndos, mp: &MetricPoint) -> Endo {
    let c = p * mp.g_inv * q.transpose();
    let mut out = Endo::zeros();
    for a in 0..4 {
        for b in 0..4 {
            if c[(a, b)] != 0.0 {
                out += pairs[a][b] * c[(a, b)];
            }
        }
    }
    out
}

/// `R(A) = R(A X_k, X^k)`.
pub fn curvature_operator(a: &Endo, bundle: &CurvatureBundle, mp: &MetricPoint) -> Result<Endo> {
    let r = skew_residual(a, mp);
    if r > 1e-9 {
        return Err(GeomError::NotSkew(r));
    }
    Ok(pair_sum(a, &Endo::identity(), &bundle.r_pairs, mp))
}

/// `W(A) = R(A) − ({Ric, A} − S A / 3)`.
pub fn weyl_operator(a: &Endo, bundle: &CurvatureBundle, mp: &MetricPoint) -> Result<Endo> {
    let ra = curvature_operator(a, bundle, mp)?;
    let anti = bundle.ric * a + a * bundle.ric;
    Ok(ra - (anti - a * (bundle.s / 3.0)))
}

/// `W(A)` by contracting the (0,4) Weyl tensor directly.
pub fn weyl_operator_from_tensor(a: &Endo, bundle: &CurvatureBundle, mp: &MetricPoint) -> Endo {
    pair_sum(a, &Endo::identity(), &bundle.w_pairs, mp)
}

/// `(∇_k W)(A)` for each coordinate direction `k`.
pub fn nabla_weyl_operator(a: &Endo, bundle: &CurvatureBundle, mp: &MetricPoint) -> Result<[Endo; 4]> {
    let pairs = bundle.nabla_w_pairs()?;
    Ok(std::array::from_fn(|k| pair_sum(a, &Endo::identity(), &pairs[k], mp)))
}

/// `(∇Ric, ∇²Ric, ∇W)` values.
pub fn covariant_derivatives(bundle: &CurvatureBundle) -> Result<(T3, T4, T5)> {
    Ok((*bundle.nabla_ric()?, *bundle.nabla2_ric()?, *bundle.nabla_weyl()?))
}

/// Geometer's Laplacian `Δf = −g^ij (∂_i∂_j f − Γ^k_ij ∂_k f)`.
pub fn laplacian_scalar(f: &Jet, mp: &MetricPoint, gamma: &Christoffel) -> Result<f64> {
    if f.order() < 2 {
        return Err(GeomError::InsufficientJetOrder {
            needed: 2,
            available: f.order(),
        });
    }
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut h = f.d2(i, j);
            for k in 0..4 {
                h -= gamma.values[k][i][j] * f.d1(k);
            }
            s += mp.g_inv[(i, j)] * h;
        }
    }
    Ok(-s)
}

/// Sign convention label recorded in reports.
pub const LAPLACIAN_CONVENTION: &str = "delta f = -g^ij (d_i d_j f - Gamma^k_ij d_k f)";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprjet::{coord_names, eval_jet, parse_expression};

    fn metric_from(exprs: [[&str; 4]; 4], point: [f64; 4], order: usize) -> MetricPoint {
        let c = coord_names(["x", "y", "z", "t"]);
        let jets = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let e = parse_expression(exprs[i][j], &c).unwrap();
                eval_jet(&e, &point, order).unwrap()
            })
        });
        MetricPoint::from_jets(point, jets).unwrap()
    }

    #[test]
    fn warped_christoffel() {
        let mp = metric_from(
            [
                ["1", "0", "0", "0"],
                ["0", "1", "0", "0"],
                ["0", "0", "1", "0"],
                ["0", "0", "0", "exp(2*x)"],
            ],
            [0.3, 0.0, 0.0, 0.0],
            3,
        );
        let g = christoffel(&mp).unwrap();
        assert!((g.values[3][0][3] - 1.0).abs() < 1e-14);
        assert!((g.values[0][3][3] + (0.6f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn round_sphere_chart() {
        // stereographic unit S⁴ chart: conformal factor 4/(1+r²)²
        let f = "4/(1 + x^2 + y^2 + z^2 + t^2)^2";
        let mp = metric_from(
            [
                [f, "0", "0", "0"],
                ["0", f, "0", "0"],
                ["0", "0", f, "0"],
                ["0", "0", "0", f],
            ],
            [0.2, -0.1, 0.4, 0.3],
            4,
        );
        let b = CurvatureBundle::compute(&mp).unwrap();
        assert!((b.s - 12.0).abs() < 1e-11, "S = {}", b.s);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let expect = mp.g[(j, k)] * mp.g[(i, l)] - mp.g[(i, k)] * mp.g[(j, l)];
                        assert!((b.riem[i][j][k][l] - expect).abs() < 1e-11);
                        assert!(b.weyl[i][j][k][l].abs() < 1e-11);
                    }
                }
            }
        }
        assert!((b.ric - Endo::identity() * 3.0).abs().max() < 1e-11);
        let nr = b.nabla_ric().unwrap();
        assert!(nr.iter().flatten().flatten().all(|v| v.abs() < 1e-10));
        let n2 = b.nabla2_ric().unwrap();
        assert!(n2.iter().flatten().flatten().flatten().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn flat_laplacian() {
        let one = "1";
        let mp = metric_from(
            [
                [one, "0", "0", "0"],
                ["0", one, "0", "0"],
                ["0", "0", one, "0"],
                ["0", "0", "0", one],
            ],
            [0.5, 0.0, 0.0, 0.0],
            2,
        );
        let g = christoffel(&mp).unwrap();
        let c = coord_names(["x", "y", "z", "t"]);
        let f = eval_jet(&parse_expression("x^2", &c).unwrap(), &mp.point, 2).unwrap();
        assert_eq!(laplacian_scalar(&f, &mp, &g).unwrap(), -2.0);
        let k = Jet::constant(3.0, 2);
        assert_eq!(laplacian_scalar(&k, &mp, &g).unwrap(), 0.0);
    }
}
