//! Quadrature over compact fundamental domains and the integral formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::analysis::PointAnalysis;
use super::FrameSeed;
use crate::catalog::ManifoldSpec;
use crate::error::{GeomError, Result};
use crate::hermitian::q_j_integrand;
use crate::pointgeom::Vec4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per axis.
    pub nodes: usize,
    /// Nodes per axis of the refinement used for the error estimate.
    pub refined: usize,
    /// Samples of the constancy check.
    pub constancy_samples: usize,
    /// Relative spread below which an integrand counts as constant.
    pub constancy_tol: f64,
    /// Use the constant shortcut when the check passes.
    pub allow_constant: bool,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes: 16,
            refined: 24,
            constancy_samples: 20,
            constancy_tol: 1e-12,
            allow_constant: true,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: Vec<f64>,
    pub error_estimate: Vec<f64>,
    /// "constant" or "gauss-legendre".
    pub method: String,
    pub nodes: usize,
    pub coordinate_volume: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn tensor_rule(spec: &ManifoldSpec, n: usize) -> Vec<([f64; 4], f64)> {
    let (x, w) = gauss_legendre(n);
    let d = &spec.domain;
    let mut out = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    let idx = [a, b, c, e];
                    let mut p = [0.0; 4];
                    let mut wt = 1.0;
                    for k in 0..4 {
                        let (lo, hi) = d[k];
                        let h = 0.5 * (hi - lo);
                        p[k] = lo + h * (x[idx[k]] + 1.0);
                        wt *= h * w[idx[k]];
                    }
                    out.push((p, wt));
                }
            }
        }
    }
    out
}

fn quadrature<F>(spec: &ManifoldSpec, n: usize, dim: usize, density: &F) -> Result<Vec<f64>>
where
    F: Fn(&[f64; 4]) -> Result<Vec<f64>> + Sync,
{
    let rule = tensor_rule(spec, n);
    let parts: Vec<Result<Vec<f64>>> = rule
        .par_chunks(n * n)
        .map(|chunk| {
            let mut acc = vec![0.0; dim];
            for (p, w) in chunk {
                let v = density(p)?;
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += w * x;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; dim];
    for part in parts {
        for (t, x) in total.iter_mut().zip(part?) {
            *t += x;
        }
    }
    Ok(total)
}

/// Integrates `density · √det g` over the fundamental domain of a compact
/// manifold. `density` returns a fixed-length vector of integrands.
///
/// An explicit constancy check at seeded samples comes first; a constant
/// integrand is integrated exactly as value times coordinate volume.
pub fn integrate_density<F>(spec: &ManifoldSpec, density: F, q: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[f64; 4]) -> Result<Vec<f64>> + Sync,
{
    if !spec.compact {
        return Err(GeomError::NonCompact(spec.id.clone()));
    }
    let weighted = |p: &[f64; 4]| -> Result<Vec<f64>> {
        let mp = spec.metric_point(p, 0)?;
        let vol = mp.volume_density();
        Ok(density(p)?.into_iter().map(|x| x * vol).collect())
    };
    let volume = spec.coordinate_volume();
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    let samples: Vec<[f64; 4]> = (0..q.constancy_samples.max(1))
        .map(|_| std::array::from_fn(|k| rng.random_range(spec.domain[k].0..spec.domain[k].1)))
        .collect();
    let values = samples.par_iter().map(weighted).collect::<Result<Vec<_>>>()?;
    let dim = values[0].len();
    let mut mean = vec![0.0; dim];
    let mut spread = vec![0.0f64; dim];
    for k in 0..dim {
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v[k]), hi.max(v[k]))
        });
        mean[k] = values.iter().map(|v| v[k]).sum::<f64>() / values.len() as f64;
        spread[k] = hi - lo;
    }
    let magnitude = values.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let constant = spread
        .iter()
        .all(|&s| s <= q.constancy_tol * magnitude.max(1e-300) || s == 0.0);
    if constant && q.allow_constant {
        return Ok(IntegralResult {
            value: mean.iter().map(|m| m * volume).collect(),
            error_estimate: spread.iter().map(|s| s * volume).collect(),
            method: "constant".into(),
            nodes: q.constancy_samples,
            coordinate_volume: volume,
        });
    }
    let coarse = quadrature(spec, q.nodes, dim, &weighted)?;
    let fine = quadrature(spec, q.refined, dim, &weighted)?;
    let mid = quadrature(spec, (q.nodes + q.refined) / 2, dim, &weighted)?;
    let err: Vec<f64> = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).collect();
    let err_mid = fine.iter().zip(&mid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let err_max = err.iter().cloned().fold(0.0, f64::max);
    let scale = fine.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    if err_mid > err_max && err_max > 1e-12 * scale {
        return Err(GeomError::NonConvergent(err_max, err_mid));
    }
    Ok(IntegralResult {
        value: fine,
        error_estimate: err,
        method: "gauss-legendre".into(),
        nodes: q.refined,
        coordinate_volume: volume,
    })
}

/// Both integral formulas and the combination that reproduces the
/// integrated pointwise defect of `|W₊|² − S²/6`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralFormulaReport {
    pub manifold: String,
    /// Riemannian volume of the fundamental domain.
    pub volume: f64,
    pub method: String,
    /// `Q(J) = ∫ q(J) ω`.
    pub q: f64,
    /// Left side of the formula with `Ric⋆⁻`.
    pub eq117: f64,
    /// Left side of the formula with `W₊`.
    pub eq118: f64,
    /// `∫ (|W₊|² − S²/6 − S|∇J|² − |∇J|⁴ − 8|Ric⋆⁻|² − |R̃|²) ω`.
    pub eq116_integrated: f64,
    /// `eq117 − eq118 + ½ eq116_integrated`, zero up to rounding.
    pub combination_residual: f64,
    pub error_estimate: f64,
    /// `max(|eq117|, |eq118|) / volume`.
    pub relative: f64,
}

/// Order of the vector density used by [`check_integral_formulas`].
const Q: usize = 0;
const RT: usize = 1;
const RSM: usize = 2;
const S: usize = 3;
const NJ: usize = 4;
const W2: usize = 5;

fn formula_density(spec: &ManifoldSpec, p: &[f64; 4]) -> Result<Vec<f64>> {
    let a = PointAnalysis::compute(spec, p, &Vec4::from(FrameSeed::default().seed), 0.0)?;
    let q = q_j_integrand(a.bundle(), &a.frame.j, a.mp())?;
    Ok(vec![
        q,
        a.star.rtilde_norm2,
        a.star.ric_star_minus_norm2,
        a.s(),
        a.nj.norm2,
        a.wplus.norm2,
    ])
}

/// Evaluates both integral formulas on a compact almost Kähler manifold.
pub fn check_integral_formulas(spec: &ManifoldSpec, quad: &QuadratureSpec) -> Result<IntegralFormulaReport> {
    if !spec.compact {
        return Err(GeomError::NonCompact(spec.id.clone()));
    }
    // the formulas need dΩ = 0; check it where the constancy check samples
    let probe = spec.sample_points(quad.constancy_samples.max(1), quad.seed);
    for pt in &probe {
        let a = PointAnalysis::compute(spec, pt, &Vec4::from(FrameSeed::default().seed), 0.0)?;
        let g = super::Gates::of(&a);
        if g.r_d_omega > 1e-8 {
            return Err(GeomError::MissingStructure(format!(
                "{}: dΩ ≠ 0 at {:?} (relative {:.3e}); the integral formulas need an almost Kähler structure",
                spec.id, pt, g.r_d_omega
            )));
        }
    }
    // each integrand is a product of point values, so integrate the products
    let density = |p: &[f64; 4]| -> Result<Vec<f64>> {
        let v = formula_density(spec, p)?;
        let (s, t) = (v[S], v[NJ]);
        let e117 = v[Q] + v[RT] + 4.0 * v[RSM] + 0.5 * s * t + t * t;
        let e118 = v[Q] + 0.5 * (v[RT] + t * t + v[W2] - s * s / 6.0);
        let e116 = v[W2] - s * s / 6.0 - s * t - t * t - 8.0 * v[RSM] - v[RT];
        Ok(vec![v[Q], e117, e118, e116, 1.0])
    };
    let r = integrate_density(spec, density, quad)?;
    let (q, e117, e118, e116, volume) = (r.value[0], r.value[1], r.value[2], r.value[3], r.value[4]);
    let err = r.error_estimate.iter().cloned().fold(0.0, f64::max);
    Ok(IntegralFormulaReport {
        manifold: spec.id.clone(),
        volume,
        method: r.method.clone(),
        q,
        eq117: e117,
        eq118: e118,
        eq116_integrated: e116,
        combination_residual: e117 - e118 + 0.5 * e116,
        error_estimate: err,
        relative: e117.abs().max(e118.abs()) / volume,
    })
}
