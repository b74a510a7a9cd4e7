//! Everything the registry needs at one point, for one frame.

use crate::catalog::ManifoldSpec;
use crate::curvature::{laplacian_scalar, CurvatureBundle};
use crate::error::Result;
use crate::exprjet::Jet;
use crate::hermitian::{
    lambda_jet, nabla_j_data, phi_psi_pairing, rictilde_ak_check, star_curvature, AcsPoint, NablaJData, PhiPsi,
    RictildeCheck, StarCurvature,
};
use crate::pointgeom::{
    build_j_frame, norm2_endo, orientation_sign, rotate_supplement, Endo, MetricPoint, SelfDualFrame, Vec4,
};
use crate::selfdual::{
    delta_wpm, lambda2_split, nabla_wplus_norm2, weyl_pair_operator, wminus_matrix, wplus_matrix, wplus_norm2_jet,
    DeltaW, Lambda2Basis, WplusMatrix,
};

/// Jet order used for every point evaluation.
pub const JET_ORDER: usize = 4;

/// Frame-independent data at a point.
#[derive(Clone, Debug)]
pub struct PointBase {
    pub point: [f64; 4],
    pub mp: MetricPoint,
    pub bundle: CurvatureBundle,
    pub acs: AcsPoint,
    pub orientation: f64,
    /// `|W₊|²` as a jet (order 2), frame-free.
    pub wplus_norm2_jet: Jet,
    /// `λ = ¼(S⋆ − S/3)` as a jet (order 2).
    pub lambda_jet: Jet,
    /// `Δ|W₊|²` (geometer's sign).
    pub laplacian_wplus_norm2: f64,
    /// `max(|R|, κ)`, the natural curvature magnitude, with `κ` from
    /// [`derivative_floor`].
    pub curvature_scale: f64,
}

/// Relative size below which curvature counts as rounding noise.
pub const CURVATURE_NOISE: f64 = 1e-6;

/// `CURVATURE_NOISE · (|g⁻¹| |∂²g| + (|g⁻¹| |∂g|)²)` in Frobenius norms: the
/// magnitude curvature would have if its terms did not cancel.
pub fn derivative_floor(mp: &MetricPoint) -> f64 {
    let (mut d1, mut d2) = (0.0, 0.0);
    for row in mp.jets.iter() {
        for e in row {
            for a in 0..4 {
                d1 += e.d1(a).powi(2);
                for b in 0..4 {
                    d2 += e.d2(a, b).powi(2);
                }
            }
        }
    }
    let gi = mp.g_inv.norm();
    CURVATURE_NOISE * (gi * d2.sqrt() + (gi * d1.sqrt()).powi(2))
}

impl PointBase {
    pub fn compute(spec: &ManifoldSpec, point: &[f64; 4]) -> Result<Self> {
        let mp = spec.metric_point(point, JET_ORDER)?;
        let bundle = CurvatureBundle::compute(&mp)?;
        let acs = spec.acs_point(&mp, JET_ORDER)?;
        let orientation = orientation_sign(&acs.j, &mp);
        let wplus_norm2_jet = wplus_norm2_jet(&bundle, &mp, orientation)?;
        let lambda_jet = lambda_jet(&bundle, &acs, &mp);
        let laplacian_wplus_norm2 = laplacian_scalar(&wplus_norm2_jet, &mp, &bundle.gamma)?;
        let r = bundle.riemann_norm2(&mp).max(0.0).sqrt();
        let floor = derivative_floor(&mp);
        Ok(PointBase {
            point: *point,
            mp,
            bundle,
            acs,
            orientation,
            wplus_norm2_jet,
            lambda_jet,
            laplacian_wplus_norm2,
            curvature_scale: r.max(floor),
        })
    }
}

/// Frame-dependent data on top of a [`PointBase`].
#[derive(Clone, Debug)]
pub struct PointAnalysis {
    pub base: PointBase,
    pub frame: SelfDualFrame,
    pub basis: Lambda2Basis,
    pub wplus: WplusMatrix,
    pub wminus: WplusMatrix,
    pub star: StarCurvature,
    pub nj: NablaJData,
    pub delta: DeltaW,
    pub rictilde: RictildeCheck,
    pub phi_psi: PhiPsi,
    pub nabla_wplus_norm2: f64,
    /// `(∇_k W₊)` as 3×3 matrices in the `(J, I, K)` basis.
    pub nabla_wplus: [nalgebra::Matrix3<f64>; 4],
    /// `W(J), W(I), W(K)`.
    pub w_of: [Endo; 3],
    /// Largest natural magnitude: curvature, `|∇J|²`.
    pub scale: f64,
}

impl PointAnalysis {
    pub fn compute(spec: &ManifoldSpec, point: &[f64; 4], seed: &Vec4, alpha: f64) -> Result<Self> {
        let base = PointBase::compute(spec, point)?;
        Self::with_frame(base, seed, alpha)
    }

    pub fn with_frame(base: PointBase, seed: &Vec4, alpha: f64) -> Result<Self> {
        let mp = &base.mp;
        let frame0 = build_j_frame(mp, &base.acs.j, seed)?;
        let frame = if alpha == 0.0 {
            frame0
        } else {
            rotate_supplement(&frame0, alpha, mp)
        };
        let basis = lambda2_split(&frame, mp);
        let b = &base.bundle;
        let wplus = wplus_matrix(b, &basis, mp)?;
        let wminus = wminus_matrix(b, &basis, mp)?;
        let star = star_curvature(b, &frame, &basis, mp);
        let nj = nabla_j_data(&base.acs, &frame, &b.gamma, mp)?;
        let delta = delta_wpm(b, &frame, mp)?;
        let rictilde = rictilde_ak_check(b, &star, &nj, &frame.j, mp);
        let phi_psi = phi_psi_pairing(b, &nj, &frame, mp)?;
        let nabla_wplus_norm2 = nabla_wplus_norm2(b, &basis, mp)?;
        let plus = basis.plus();
        let mut nabla_wplus = [nalgebra::Matrix3::zeros(); 4];
        for (col, bb) in plus.iter().enumerate() {
            let imgs = crate::curvature::nabla_weyl_operator(bb, b, mp)?;
            for k in 0..4 {
                for row in 0..3 {
                    nabla_wplus[k][(row, col)] = crate::pointgeom::inner_endo(&plus[row], &imgs[k], mp);
                }
            }
        }
        let w_of = [
            weyl_pair_operator(&frame.j, b, mp),
            weyl_pair_operator(&frame.i, b, mp),
            weyl_pair_operator(&frame.k, b, mp),
        ];
        let scale = base.curvature_scale.max(nj.norm2);
        Ok(PointAnalysis {
            base,
            frame,
            basis,
            wplus,
            wminus,
            star,
            nj,
            delta,
            rictilde,
            phi_psi,
            nabla_wplus_norm2,
            nabla_wplus,
            w_of,
            scale,
        })
    }

    pub fn mp(&self) -> &MetricPoint {
        &self.base.mp
    }

    pub fn bundle(&self) -> &CurvatureBundle {
        &self.base.bundle
    }

    pub fn s(&self) -> f64 {
        self.base.bundle.s
    }

    pub fn lambda(&self) -> f64 {
        self.star.lambda
    }

    pub fn wplus_norm(&self) -> f64 {
        self.wplus.norm2.max(0.0).sqrt()
    }

    /// `|∇S|²`.
    pub fn grad_s_norm2(&self) -> f64 {
        let g = self.bundle().grad_s(self.mp());
        self.mp().inner(&g, &g)
    }

    /// `|∇|W₊||²` from the frame-free jet.
    pub fn grad_wplus_norm_sq(&self) -> Result<f64> {
        crate::selfdual::grad_wplus_norm_sq(&self.base.wplus_norm2_jet, self.mp(), 1e-300)
    }

    /// `∇ log |W₊|` as a vector.
    pub fn grad_log_wplus(&self) -> Vec4 {
        let j = &self.base.wplus_norm2_jet;
        let d = Vec4::from(j.gradient()) / (2.0 * j.value());
        self.mp().raise(&d)
    }

    /// `dλ` as a covector.
    pub fn d_lambda(&self) -> Vec4 {
        Vec4::from(self.base.lambda_jet.gradient())
    }

    /// Norm of an endomorphism-valued one-form given on chart directions:
    /// `Σ g^{ab} ⟨T_a, T_b⟩`.
    pub fn one_form_norm2(&self, t: &[Endo; 4]) -> f64 {
        let mp = self.mp();
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += mp.g_inv[(a, b)] * crate::pointgeom::inner_endo(&t[a], &t[b], mp);
            }
        }
        s
    }

    pub fn endo_norm(&self, a: &Endo) -> f64 {
        norm2_endo(a, self.mp()).max(0.0).sqrt()
    }
}
