//! Built-in manifolds with ground-truth tags, and the text config loader.
//!
//! Config grammar (one item per line, `#` starts a comment):
//!
//! ```text
//! [manifold]
//! id = my_flat                      # required
//! coords = x, y, z, t               # four identifiers, required
//! domain = [-1, 1], [-1, 1], [-1, 1], [-1, 1]   # required
//! compact = false                   # optional, default false
//! description = free text           # optional
//! [metric]
//! g_11 = 1                          # g_ij or g_i_j, 1-based; unset entries are 0
//! [structure]                       # optional; Gram–Schmidt J when absent
//! J_2_1 = 1                         # J^i_j: row i, column j
//! [tags]
//! flat, kahler                      # comma or line separated
//! ```
//!
//! A missing `(j,i)` metric entry copies `(i,j)`. Expressions use the
//! [`crate::exprjet`] grammar over the declared coordinate names.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use nalgebra::{Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::exprjet::{coord_names, eval_jet, parse_expression, Expr, Jet};
use crate::hermitian::AcsPoint;
use crate::pointgeom::{acs_residuals, MetricPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Flat,
    Einstein,
    Kahler,
    AlmostKahler,
    ConstantS,
    ConformallyFlat,
    Compact,
}

impl Tag {
    pub const ALL: [Tag; 7] = [
        Tag::Flat,
        Tag::Einstein,
        Tag::Kahler,
        Tag::AlmostKahler,
        Tag::ConstantS,
        Tag::ConformallyFlat,
        Tag::Compact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Flat => "flat",
            Tag::Einstein => "einstein",
            Tag::Kahler => "kahler",
            Tag::AlmostKahler => "almost-kahler",
            Tag::ConstantS => "constant-s",
            Tag::ConformallyFlat => "conformally-flat",
            Tag::Compact => "compact",
        }
    }

    /// Case-insensitive; accepts `kähler` and `_` for `-`.
    pub fn parse(s: &str) -> Option<Tag> {
        let norm = s.trim().to_lowercase().replace('ä', "a").replace('_', "-");
        Tag::ALL.into_iter().find(|t| t.name() == norm)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type ExprMatrix = Box<[[Expr; 4]; 4]>;

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    pub id: String,
    pub description: String,
    pub coords: [String; 4],
    pub metric: ExprMatrix,
    pub j: Option<ExprMatrix>,
    pub domain: [(f64, f64); 4],
    /// The domain is a fundamental domain with periodic identifications.
    pub compact: bool,
    pub tags: BTreeSet<Tag>,
    pub notes: String,
}

const DOMAIN_SLACK: f64 = 1e-12;

impl ManifoldSpec {
    pub fn contains(&self, p: &[f64; 4]) -> bool {
        p.iter().zip(&self.domain).all(|(x, (lo, hi))| {
            let w = (hi - lo).abs().max(1.0) * DOMAIN_SLACK;
            *x >= lo - w && *x <= hi + w
        })
    }

    pub fn coordinate_volume(&self) -> f64 {
        self.domain.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn metric_point(&self, p: &[f64; 4], order: usize) -> Result<MetricPoint> {
        if !self.contains(p) {
            return Err(GeomError::OutOfDomain(*p));
        }
        let mut jets: [[Jet; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Jet::zero(order)));
        for a in 0..4 {
            for b in a..4 {
                let j = eval_jet(&self.metric[a][b], p, order)?;
                jets[b][a] = j.clone();
                jets[a][b] = j;
            }
        }
        MetricPoint::from_jets(*p, jets)
    }

    pub fn has_structure(&self) -> bool {
        self.j.is_some()
    }

    /// Jets of `J`, either from the manifold description or by Gram–Schmidt on the chart frame.
    pub fn acs_point(&self, mp: &MetricPoint, order: usize) -> Result<AcsPoint> {
        let jets = match &self.j {
            Some(m) => {
                let mut jets: [[Jet; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Jet::zero(order)));
                for a in 0..4 {
                    for b in 0..4 {
                        jets[a][b] = eval_jet(&m[a][b], &mp.point, order)?;
                    }
                }
                jets
            }
            None => gram_schmidt_j(mp, order)?,
        };
        AcsPoint::from_jets(jets, mp)
    }

    /// Uniform samples with a 10% margin on each side of every interval.
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                std::array::from_fn(|a| {
                    let (lo, hi) = self.domain[a];
                    lo + (hi - lo) * (0.1 + 0.8 * rng.random::<f64>())
                })
            })
            .collect()
    }

    pub fn metric_text(&self) -> [[String; 4]; 4] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.metric[a][b].display(&self.coords).to_string()))
    }

    /// Checks symmetry, positivity and `J` compatibility at 20 sample points.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let pts = self.sample_points(20, 0x5eed);
        let mut worst_sym = (0.0f64, [0.0; 4], (0, 0));
        let mut worst_sq = (0.0f64, [0.0; 4]);
        let mut worst_skew = (0.0f64, [0.0; 4]);
        let mut worst_pd: Option<(f64, [f64; 4])> = None;
        let mut eval_errors = Vec::new();
        for p in &pts {
            let g = match eval_matrix(&self.metric, p) {
                Ok(g) => g,
                Err(e) => {
                    eval_errors.push(format!("metric evaluation failed at {p:?}: {e}"));
                    continue;
                }
            };
            for a in 0..4 {
                for b in (a + 1)..4 {
                    let d = (g[(a, b)] - g[(b, a)]).abs() / g.abs().max().max(1e-300);
                    if d > worst_sym.0 {
                        worst_sym = (d, *p, (a, b));
                    }
                }
            }
            let sym = (g + g.transpose()) * 0.5;
            let ev = SymmetricEigen::new(sym).eigenvalues;
            let min = ev.min();
            if min <= 1e-12 * ev.amax() || !min.is_finite() {
                if worst_pd.map(|w| min < w.0).unwrap_or(true) {
                    worst_pd = Some((min, *p));
                }
                continue;
            }
            if let Some(jm) = &self.j {
                let j = match eval_matrix(jm, p) {
                    Ok(j) => j,
                    Err(e) => {
                        eval_errors.push(format!("J evaluation failed at {p:?}: {e}"));
                        continue;
                    }
                };
                let mp = MetricPoint::constant(*p, sym, 0)?;
                let (sq, skew) = acs_residuals(&j, &mp);
                if sq > worst_sq.0 {
                    worst_sq = (sq, *p);
                }
                if skew > worst_skew.0 {
                    worst_skew = (skew, *p);
                }
            }
        }
        problems.extend(eval_errors);
        if worst_sym.0 > 1e-10 {
            let (a, b) = worst_sym.2;
            problems.push(format!(
                "metric not symmetric: g_{}{} vs g_{}{} differ by {:.3e} (relative) at {:?}",
                a + 1,
                b + 1,
                b + 1,
                a + 1,
                worst_sym.0,
                worst_sym.1
            ));
        }
        if let Some((min, p)) = worst_pd {
            problems.push(format!(
                "metric not positive definite: smallest eigenvalue {min:.3e} at {p:?}"
            ));
        }
        if worst_sq.0 > 1e-10 {
            problems.push(format!(
                "J² = −1 violated: worst residual {:.3e} at {:?}",
                worst_sq.0, worst_sq.1
            ));
        }
        if worst_skew.0 > 1e-10 {
            problems.push(format!(
                "J not compatible with g: worst residual {:.3e} at {:?}",
                worst_skew.0, worst_skew.1
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GeomError::Validation(problems))
        }
    }
}

fn eval_matrix(m: &ExprMatrix, p: &[f64; 4]) -> Result<Matrix4<f64>> {
    let mut out = Matrix4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            out[(a, b)] = m[a][b].eval(p)?;
        }
    }
    Ok(out)
}

/// `J = e₂⊗e₁♭ − e₁⊗e₂♭ + e₄⊗e₃♭ − e₃⊗e₄♭` for the Gram–Schmidt frame of
/// the chart basis, as jets.
fn gram_schmidt_j(mp: &MetricPoint, order: usize) -> Result<[[Jet; 4]; 4]> {
    let order = order.min(mp.jet_order());
    let g = |a: usize, b: usize| mp.jets[a][b].truncate(order);
    let inner = |x: &[Jet; 4], y: &[Jet; 4]| -> Jet {
        let mut acc = Jet::zero(order);
        for a in 0..4 {
            for b in 0..4 {
                acc.add_product(&(&x[a] * &g(a, b)), &y[b]);
            }
        }
        acc
    };
    let mut frame: Vec<[Jet; 4]> = Vec::with_capacity(4);
    for m in 0..4 {
        let mut v: [Jet; 4] = std::array::from_fn(|a| Jet::constant(if a == m { 1.0 } else { 0.0 }, order));
        for e in &frame {
            let c = inner(&v, e);
            for a in 0..4 {
                let t = &c * &e[a];
                v[a].axpy(-1.0, &t);
            }
        }
        let n = inner(&v, &v).sqrt()?.recip()?;
        frame.push(std::array::from_fn(|a| &v[a] * &n));
    }
    let flat = |e: &[Jet; 4]| -> [Jet; 4] {
        std::array::from_fn(|b| {
            let mut acc = Jet::zero(order);
            for a in 0..4 {
                acc.add_product(&e[a], &g(a, b));
            }
            acc
        })
    };
    let fl: Vec<[Jet; 4]> = frame.iter().map(flat).collect();
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|k| {
            let mut acc = &frame[1][i] * &fl[0][k];
            acc.axpy(-1.0, &(&frame[0][i] * &fl[1][k]));
            acc.axpy(1.0, &(&frame[3][i] * &fl[2][k]));
            acc.axpy(-1.0, &(&frame[2][i] * &fl[3][k]));
            acc
        })
    }))
}

struct Builder {
    id: &'static str,
    description: &'static str,
    coords: [&'static str; 4],
    metric: [[String; 4]; 4],
    j: [[String; 4]; 4],
    domain: [(f64, f64); 4],
    compact: bool,
    tags: &'static [Tag],
    notes: &'static str,
}

fn parse_matrix(m: &[[String; 4]; 4], names: &[String; 4]) -> ExprMatrix {
    Box::new(std::array::from_fn(|a| {
        std::array::from_fn(|b| parse_expression(&m[a][b], names).expect("builtin expression parses"))
    }))
}

impl Builder {
    fn build(self) -> ManifoldSpec {
        let names = coord_names(self.coords);
        ManifoldSpec {
            id: self.id.to_string(),
            description: self.description.to_string(),
            metric: parse_matrix(&self.metric, &names),
            j: Some(parse_matrix(&self.j, &names)),
            coords: names,
            domain: self.domain,
            compact: self.compact,
            tags: self.tags.iter().copied().collect(),
            notes: self.notes.to_string(),
        }
    }
}

const STD_J: [[&str; 4]; 4] = [
    ["0", "-1", "0", "0"],
    ["1", "0", "0", "0"],
    ["0", "0", "0", "-1"],
    ["0", "0", "1", "0"],
];

const DELTA: [[&str; 4]; 4] = [
    ["1", "0", "0", "0"],
    ["0", "1", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "1"],
];

fn own(m: [[&str; 4]; 4]) -> [[String; 4]; 4] {
    m.map(|row| row.map(str::to_string))
}

const XYZT: [&str; 4] = ["x", "y", "z", "t"];
const UVPQ: [&str; 4] = ["u", "v", "p", "q"];

pub fn builtin_manifolds() -> Vec<ManifoldSpec> {
    use Tag::*;
    let fs_rho = "(1 + u^2 + v^2 + p^2 + q^2)";
    let ch_sig = "(1 - u^2 - v^2 - p^2 - q^2)";
    let fs = |num: &str| format!("{num} / {fs_rho}^2");
    let ch = |num: &str| format!("{num} / {ch_sig}^2");
    let fs_m = [
        [
            fs("2*(1 + p^2 + q^2)"),
            "0".into(),
            fs("-2*(u*p + v*q)"),
            fs("-2*(u*q - v*p)"),
        ],
        [
            "0".into(),
            fs("2*(1 + p^2 + q^2)"),
            fs("2*(u*q - v*p)"),
            fs("-2*(u*p + v*q)"),
        ],
        [
            fs("-2*(u*p + v*q)"),
            fs("2*(u*q - v*p)"),
            fs("2*(1 + u^2 + v^2)"),
            "0".into(),
        ],
        [
            fs("-2*(u*q - v*p)"),
            fs("-2*(u*p + v*q)"),
            "0".into(),
            fs("2*(1 + u^2 + v^2)"),
        ],
    ];
    let ch_m = [
        [
            ch("2*(1 - p^2 - q^2)"),
            "0".into(),
            ch("2*(u*p + v*q)"),
            ch("2*(u*q - v*p)"),
        ],
        [
            "0".into(),
            ch("2*(1 - p^2 - q^2)"),
            ch("-2*(u*q - v*p)"),
            ch("2*(u*p + v*q)"),
        ],
        [
            ch("2*(u*p + v*q)"),
            ch("-2*(u*q - v*p)"),
            ch("2*(1 - u^2 - v^2)"),
            "0".into(),
        ],
        [
            ch("2*(u*q - v*p)"),
            ch("2*(u*p + v*q)"),
            "0".into(),
            ch("2*(1 - u^2 - v^2)"),
        ],
    ];
    let conf = "4 / (1 + x^2 + y^2 + z^2 + t^2)^2";
    let c = "cos(0.3*sin(x))";
    let s = "sin(0.3*sin(x))";
    let neg = |x: &str| format!("-{x}");
    vec![
        Builder {
            id: "euclidean_flat",
            description: "Euclidean R^4 with the standard complex structure",
            coords: XYZT,
            metric: own(DELTA),
            j: own(STD_J),
            domain: [(-1.0, 1.0); 4],
            compact: false,
            tags: &[Flat, Einstein, Kahler, AlmostKahler, ConstantS, ConformallyFlat],
            notes: "",
        },
        Builder {
            id: "flat_torus",
            description: "flat torus R^4 / (2 pi Z)^4",
            coords: XYZT,
            metric: own(DELTA),
            j: own(STD_J),
            domain: [(0.0, 2.0 * std::f64::consts::PI); 4],
            compact: true,
            tags: &[
                Flat,
                Einstein,
                Kahler,
                AlmostKahler,
                ConstantS,
                ConformallyFlat,
                Compact,
            ],
            notes: "",
        },
        Builder {
            id: "fubini_study_cp2",
            description: "Fubini-Study metric on an affine chart of CP^2, potential log(1 + |z|^2)",
            coords: UVPQ,
            metric: fs_m,
            j: own(STD_J),
            domain: [(-1.0, 1.0); 4],
            compact: false,
            tags: &[Einstein, Kahler, AlmostKahler, ConstantS],
            notes: "g = 2 Re(d d-bar K); S = 12",
        },
        Builder {
            id: "complex_hyperbolic_ch2",
            description: "Bergman metric on the unit ball of C^2, potential -log(1 - |z|^2)",
            coords: UVPQ,
            metric: ch_m,
            j: own(STD_J),
            domain: [(-0.35, 0.35); 4],
            compact: false,
            tags: &[Einstein, Kahler, AlmostKahler, ConstantS],
            notes: "box inscribed in the ball of radius 0.7; S = -12",
        },
        Builder {
            id: "kahler_potential_generic",
            description: "Kahler metric from 1/2 |z|^2 + 0.1 u^4 + 0.05 u v p",
            coords: UVPQ,
            metric: own([
                ["1 + 0.6*u^2", "0", "0.025*v", "-0.025*u"],
                ["0", "1 + 0.6*u^2", "0.025*u", "0.025*v"],
                ["0.025*v", "0.025*u", "1", "0"],
                ["-0.025*u", "0.025*v", "0", "1"],
            ]),
            j: own(STD_J),
            domain: [(-0.5, 0.5); 4],
            compact: false,
            tags: &[Kahler, AlmostKahler],
            notes: "nonconstant scalar curvature",
        },
        Builder {
            id: "kodaira_thurston",
            description: "Kodaira-Thurston nilmanifold, dx^2 + dy^2 + (dz - x dy)^2 + dt^2",
            coords: XYZT,
            metric: own([
                ["1", "0", "0", "0"],
                ["0", "1 + x^2", "-x", "0"],
                ["0", "-x", "1", "0"],
                ["0", "0", "0", "1"],
            ]),
            // J e1 = e3, J e2 = e4 on the coframe dx, dy, dz - x dy, dt
            j: own([
                ["0", "x", "-1", "0"],
                ["0", "0", "0", "-1"],
                ["1", "0", "0", "-x"],
                ["0", "1", "0", "0"],
            ]),
            domain: [(0.0, 1.0); 4],
            compact: true,
            tags: &[AlmostKahler, ConstantS, Compact],
            notes: "left-invariant; integrands are constant on the quotient",
        },
        Builder {
            id: "round_conformal",
            description: "round S^4 in stereographic coordinates, e^{2f} delta with f = log(2/(1+r^2))",
            coords: XYZT,
            metric: own([
                [conf, "0", "0", "0"],
                ["0", conf, "0", "0"],
                ["0", "0", conf, "0"],
                ["0", "0", "0", conf],
            ]),
            j: own(STD_J),
            domain: [(-1.0, 1.0); 4],
            compact: false,
            tags: &[Einstein, ConstantS, ConformallyFlat],
            notes: "standard J is Hermitian, not Kahler, for this metric",
        },
        Builder {
            id: "perturbed_j",
            description: "flat R^4 with J rotated by 0.3 sin(x) towards the standard I",
            coords: XYZT,
            metric: own(DELTA),
            j: [
                ["0".into(), neg(c), neg(s), "0".into()],
                [c.into(), "0".into(), "0".into(), s.into()],
                [s.into(), "0".into(), "0".into(), neg(c)],
                ["0".into(), neg(s), c.into(), "0".into()],
            ],
            domain: [(-2.0, 2.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
            compact: false,
            tags: &[Flat, Einstein, ConstantS, ConformallyFlat],
            notes: "d Omega != 0 and N_J != 0",
        },
    ]
    .into_iter()
    .map(Builder::build)
    .collect()
}

pub fn builtin(id: &str) -> Result<ManifoldSpec> {
    builtin_manifolds()
        .into_iter()
        .find(|m| m.id == id)
        .ok_or_else(|| GeomError::UnknownManifold(id.to_string()))
}

pub fn load_manifold_config(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| GeomError::Io(format!("{}: {e}", path.display())))?;
    parse_manifold_config(&text)
}

#[derive(PartialEq)]
enum Section {
    None,
    Manifold,
    Metric,
    Structure,
    Tags,
}

fn cfg_err(line: usize, message: impl Into<String>) -> GeomError {
    GeomError::Config {
        line,
        message: message.into(),
    }
}

/// `g_12`, `g_1_2` → `(0, 1)`.
fn parse_index_key(key: &str, prefix: char, line: usize) -> Result<(usize, usize)> {
    let rest = key
        .strip_prefix(prefix)
        .and_then(|r| r.strip_prefix('_'))
        .ok_or_else(|| cfg_err(line, format!("expected key `{prefix}_ij`, got `{key}`")))?;
    let digits: Vec<char> = rest.chars().filter(|c| *c != '_').collect();
    if digits.len() != 2 || !digits.iter().all(|c| c.is_ascii_digit()) {
        return Err(cfg_err(line, format!("bad index in `{key}`: need two digits 1..4")));
    }
    let i = digits[0].to_digit(10).unwrap() as usize;
    let j = digits[1].to_digit(10).unwrap() as usize;
    if !(1..=4).contains(&i) || !(1..=4).contains(&j) {
        return Err(cfg_err(line, format!("index out of range in `{key}`: dimension is 4")));
    }
    Ok((i - 1, j - 1))
}

fn parse_domain(v: &str, line: usize) -> Result<[(f64, f64); 4]> {
    let mut out = Vec::new();
    let mut rest = v.trim();
    while !rest.is_empty() {
        let open = rest
            .find('[')
            .ok_or_else(|| cfg_err(line, "domain: expected `[lo, hi]` intervals"))?;
        let close = rest[open..]
            .find(']')
            .map(|c| c + open)
            .ok_or_else(|| cfg_err(line, "domain: unclosed `[`"))?;
        let inner = &rest[open + 1..close];
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(cfg_err(line, format!("domain: interval `[{inner}]` needs two bounds")));
        }
        let num = |s: &str| -> Result<f64> {
            let names = coord_names(["x", "y", "z", "t"]);
            parse_expression(s.trim(), &names)
                .ok()
                .and_then(|e| e.fold().constant_value())
                .ok_or_else(|| cfg_err(line, format!("domain: `{}` is not a number", s.trim())))
        };
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(cfg_err(line, format!("domain: empty interval [{lo}, {hi}]")));
        }
        out.push((lo, hi));
        rest = rest[close + 1..].trim_start_matches([',', ' ', '\t', 'x', '×']);
    }
    out.try_into()
        .map_err(|v: Vec<(f64, f64)>| cfg_err(line, format!("domain: expected 4 intervals, got {}", v.len())))
}

pub fn parse_manifold_config(text: &str) -> Result<ManifoldSpec> {
    let mut section = Section::None;
    let mut id = None;
    let mut description = String::new();
    let mut coords: Option<[String; 4]> = None;
    let mut domain = None;
    let mut compact = false;
    let mut tags = BTreeSet::new();
    let mut metric_raw: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut j_raw: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut saw_structure = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') && content.ends_with(']') && !content.contains('=') {
            section = match content[1..content.len() - 1].trim() {
                "manifold" => Section::Manifold,
                "metric" => Section::Metric,
                "structure" => {
                    saw_structure = true;
                    Section::Structure
                }
                "tags" => Section::Tags,
                other => return Err(cfg_err(line, format!("unknown section `[{other}]`"))),
            };
            continue;
        }
        if section == Section::Tags {
            for t in content.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                tags.insert(Tag::parse(t).ok_or_else(|| cfg_err(line, format!("unknown tag `{t}`")))?);
            }
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| cfg_err(line, format!("expected `key = value`, got `{content}`")))?;
        match section {
            Section::None => return Err(cfg_err(line, "entry outside of any section")),
            Section::Manifold => match key {
                "id" => id = Some(value.to_string()),
                "description" => description = value.to_string(),
                "coords" => {
                    let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                    if names.len() != 4 {
                        return Err(cfg_err(
                            line,
                            format!("coords: dimension must be 4, got {}", names.len()),
                        ));
                    }
                    for nm in &names {
                        let ok = nm.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                            && nm.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                        if !ok {
                            return Err(cfg_err(line, format!("coords: `{nm}` is not an identifier")));
                        }
                    }
                    coords = Some(names.try_into().unwrap());
                }
                "domain" => domain = Some(parse_domain(value, line)?),
                "compact" => {
                    compact = match value {
                        "true" | "yes" => true,
                        "false" | "no" => false,
                        _ => return Err(cfg_err(line, format!("compact: expected true/false, got `{value}`"))),
                    }
                }
                "tags" => {
                    for t in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        tags.insert(Tag::parse(t).ok_or_else(|| cfg_err(line, format!("unknown tag `{t}`")))?);
                    }
                }
                other => return Err(cfg_err(line, format!("unknown key `{other}` in [manifold]"))),
            },
            Section::Metric => {
                let (a, b) = parse_index_key(key, 'g', line)?;
                metric_raw.push((line, a, b, value.to_string()));
            }
            Section::Structure => {
                let (a, b) = parse_index_key(key, 'J', line)?;
                j_raw.push((line, a, b, value.to_string()));
            }
            Section::Tags => unreachable!(),
        }
    }
    let id = id.ok_or_else(|| cfg_err(0, "missing `id` in [manifold]"))?;
    let coords = coords.ok_or_else(|| cfg_err(0, "missing `coords` in [manifold]"))?;
    let domain = domain.ok_or_else(|| cfg_err(0, "missing `domain` in [manifold]"))?;
    if metric_raw.is_empty() {
        return Err(cfg_err(0, "missing [metric] entries"));
    }
    let parse_at = |line: usize, src: &str| -> Result<Expr> {
        parse_expression(src, &coords).map_err(|e| cfg_err(line, e.to_string()))
    };
    let zero = || Expr::num(0.0);
    let mut metric: [[Option<Expr>; 4]; 4] = Default::default();
    for (line, a, b, src) in &metric_raw {
        if metric[*a][*b].is_some() {
            return Err(cfg_err(*line, format!("duplicate metric entry g_{}{}", a + 1, b + 1)));
        }
        metric[*a][*b] = Some(parse_at(*line, src)?);
    }
    let metric: [[Expr; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            metric[a][b]
                .clone()
                .or_else(|| metric[b][a].clone())
                .unwrap_or_else(zero)
        })
    });
    let j = if saw_structure {
        let mut m: [[Expr; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero()));
        for (line, a, b, src) in &j_raw {
            m[*a][*b] = parse_at(*line, src)?;
        }
        Some(Box::new(m))
    } else {
        None
    };
    if compact {
        tags.insert(Tag::Compact);
    }
    let spec = ManifoldSpec {
        id,
        description,
        coords,
        metric: Box::new(metric),
        j,
        domain,
        compact,
        tags,
        notes: String::new(),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        let all = builtin_manifolds();
        assert_eq!(all.len(), 8);
        for m in &all {
            m.validate().unwrap_or_else(|e| panic!("{}: {e}", m.id));
        }
    }

    #[test]
    fn tag_parsing() {
        assert_eq!(Tag::parse("Kähler"), Some(Tag::Kahler));
        assert_eq!(Tag::parse("almost_kahler"), Some(Tag::AlmostKahler));
        assert_eq!(Tag::parse("nope"), None);
    }

    #[test]
    fn config_round_trip_of_flat() {
        let text = "\
[manifold]
id = euclidean_flat
description = Euclidean R^4 with the standard complex structure
coords = x, y, z, t
domain = [-1, 1], [-1, 1], [-1, 1], [-1, 1]
[metric]
g_11 = 1
g_22 = 1
g_33 = 1
g_44 = 1
[structure]
J_2_1 = 1
J_1_2 = -1
J_4_3 = 1
J_3_4 = -1
[tags]
flat, einstein, kähler, almost-kahler, constant-s, conformally-flat
";
        let spec = parse_manifold_config(text).unwrap();
        let b = builtin("euclidean_flat").unwrap();
        assert_eq!(spec.tags, b.tags);
        let p = [0.1, 0.2, -0.3, 0.4];
        let m1 = spec.metric_point(&p, 2).unwrap();
        let m2 = b.metric_point(&p, 2).unwrap();
        assert_eq!(m1.g, m2.g);
        assert_eq!(spec.acs_point(&m1, 2).unwrap().j, b.acs_point(&m2, 2).unwrap().j);
    }

    #[test]
    fn config_reports_parse_offset() {
        let text =
            "[manifold]\nid = bad\ncoords = x, y, z, t\ndomain = [0,1],[0,1],[0,1],[0,1]\n[metric]\ng_11 = x +\n";
        match parse_manifold_config(text) {
            Err(GeomError::Config { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("byte 3"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_rejects_bad_j() {
        let text = "[manifold]\nid = badj\ncoords = x, y, z, t\ndomain = [0,1],[0,1],[0,1],[0,1]\n\
[metric]\ng_11 = 1\ng_22 = 1\ng_33 = 1\ng_44 = 1\n[structure]\nJ_2_1 = 2\nJ_1_2 = -1\nJ_4_3 = 1\nJ_3_4 = -1\n";
        match parse_manifold_config(text) {
            Err(GeomError::Validation(list)) => {
                assert!(
                    list.iter()
                        .any(|s| s.contains("J² = −1") && s.contains("worst residual")),
                    "{list:?}"
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_rejects_wrong_dimension() {
        let text = "[manifold]\nid = d3\ncoords = x, y, z\n";
        assert!(matches!(
            parse_manifold_config(text),
            Err(GeomError::Config { line: 3, .. })
        ));
    }

    #[test]
    fn gram_schmidt_structure_is_compatible() {
        let text = "[manifold]\nid = gs\ncoords = x, y, z, t\ndomain = [-1,1],[-1,1],[-1,1],[-1,1]\n\
[metric]\ng_11 = 1 + 0.1*y^2\ng_12 = 0.2*x\ng_22 = 2\ng_33 = 1\ng_44 = exp(z)\n";
        let spec = parse_manifold_config(text).unwrap();
        let mp = spec.metric_point(&[0.3, -0.2, 0.1, 0.5], 3).unwrap();
        let acs = spec.acs_point(&mp, 3).unwrap();
        let (sq, skew) = acs_residuals(&acs.j, &mp);
        assert!(sq < 1e-12 && skew < 1e-12);
    }
}
