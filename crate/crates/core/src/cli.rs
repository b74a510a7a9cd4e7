//! Command-line surface: `list`, `check`, `classify`, `integrate`.
//!
//! Exit codes: 0 pass, 1 identity violation or failed point, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{builtin, builtin_manifolds, load_manifold_config, ManifoldSpec, Tag};
use crate::conditions::{
    check_integral_formulas, classify_structure, envelope, integrate_density, write_csv, write_json, write_text,
    Conventions, FrameSeed, PointAnalysis, QuadratureSpec, StructureClass, SuiteSettings, Tolerances,
};
use crate::error::{GeomError, Result};
use crate::hermitian::q_j_integrand;
use crate::pointgeom::Vec4;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default bound on `|value| / volume` for the integral formulas.
pub const INTEGRAL_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "hweyl",
    version,
    about = "Curvature identity suites for almost Hermitian 4-manifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List built-in manifolds with tags and domains.
    List(ListArgs),
    /// Run the identity suite and confirm the truth tags.
    Check(CheckArgs),
    /// Classify the almost Hermitian structure.
    Classify(ClassifyArgs),
    /// Integrate a density or evaluate the integral formulas.
    Integrate(IntegrateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct ListArgs {
    /// Keep manifolds carrying every listed tag (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub tags: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Target {
    /// Built-in manifold id.
    pub manifold: Option<String>,
    /// Manifold config file instead of a built-in.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Sampling {
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_pass: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol_fail: f64,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub target: Target,
    #[command(flatten)]
    pub sampling: Sampling,
    /// Frames per point: the seeded frame plus random supplement rotations.
    #[arg(long, default_value_t = 2)]
    pub rotations: usize,
    /// Restrict to these identity ids (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub identities: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub target: Target,
    #[command(flatten)]
    pub sampling: Sampling,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Density {
    /// The integrand `q(J)` of `Q(J)`.
    #[value(name = "qJ", alias = "qj")]
    QJ,
    /// The constant 1, giving the Riemannian volume.
    #[value(name = "one", alias = "volume")]
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Eq117,
    Eq118,
    Both,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, value_enum, conflicts_with = "formula")]
    pub density: Option<Density>,
    #[arg(long, value_enum)]
    pub formula: Option<Formula>,
    /// Bound on `|value| / volume` for the formulas.
    #[arg(long, default_value_t = INTEGRAL_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    #[arg(long, default_value_t = 24)]
    pub refined: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Engine(GeomError),
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure::Engine(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl Target {
    fn resolve(&self) -> std::result::Result<ManifoldSpec, Failure> {
        match (&self.manifold, &self.config) {
            (Some(id), None) => Ok(builtin(id)?),
            (None, Some(path)) => Ok(load_manifold_config(path)?),
            (Some(_), Some(_)) => Err(usage("give either a manifold id or --config, not both")),
            (None, None) => Err(usage("missing manifold id or --config")),
        }
    }
}

impl Sampling {
    fn tolerances(&self) -> std::result::Result<Tolerances, Failure> {
        if self.points == 0 {
            return Err(usage("--points must be at least 1"));
        }
        let t = Tolerances {
            pass: self.tol_pass,
            fail: self.tol_fail,
        };
        if !(t.pass > 0.0 && t.pass <= t.fail && t.fail.is_finite()) {
            return Err(usage("tolerances need 0 < --tol-pass <= --tol-fail"));
        }
        Ok(t)
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Reports go to `out` unless `--out` names a file.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::List(a) => cmd_list(a, out),
        Command::Check(a) => cmd_check(a, out, err),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Integrate(a) => cmd_integrate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Engine(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Writes `body` to the `--out` file or to `out`.
fn emit(path: &Option<PathBuf>, out: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| GeomError::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(body).map_err(|e| GeomError::Io(e.to_string())),
    }
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| GeomError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| GeomError::Io(e.to_string()))
}

fn tag_names(spec: &ManifoldSpec) -> Vec<&'static str> {
    let mut v: Vec<&str> = spec.tags.iter().map(|t| t.name()).collect();
    if spec.compact && !spec.tags.contains(&Tag::Compact) {
        v.push(Tag::Compact.name());
    }
    v
}

fn domain_text(spec: &ManifoldSpec) -> String {
    spec.domain
        .iter()
        .map(|(lo, hi)| format!("[{lo:.4}, {hi:.4}]"))
        .collect::<Vec<_>>()
        .join(" x ")
}

fn cmd_list(a: &ListArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let mut wanted = Vec::new();
    for t in &a.tags {
        wanted.push(Tag::parse(t).ok_or_else(|| usage(format!("unknown tag {t:?}")))?);
    }
    let rows: Vec<ManifoldSpec> = builtin_manifolds()
        .into_iter()
        .filter(|m| {
            wanted
                .iter()
                .all(|t| m.tags.contains(t) || (*t == Tag::Compact && m.compact))
        })
        .collect();
    let body = match a.format {
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|m| {
                    json!({
                        "id": m.id,
                        "description": m.description,
                        "coords": m.coords,
                        "domain": m.domain,
                        "compact": m.compact,
                        "has_structure": m.has_structure(),
                        "tags": tag_names(m),
                        "notes": m.notes,
                    })
                })
                .collect();
            json_bytes(&envelope("list", json!({ "manifolds": list })))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|m| {
                    vec![
                        m.id.clone(),
                        tag_names(m).join(";"),
                        domain_text(m),
                        m.compact.to_string(),
                    ]
                })
                .collect();
            csv_bytes(&["id", "tags", "domain", "compact"], &rows)?
        }
        Format::Text => {
            let mut s = format!("{:<26} {:<76} {}\n", "id", "tags", "domain");
            for m in &rows {
                s.push_str(&format!(
                    "{:<26} {:<76} {}\n",
                    m.id,
                    tag_names(m).join(", "),
                    domain_text(m)
                ));
            }
            s.into_bytes()
        }
    };
    emit(&a.out, out, &body)?;
    Ok(EXIT_PASS)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let spec = a.target.resolve()?;
    let tolerances = a.sampling.tolerances()?;
    if a.rotations == 0 {
        return Err(usage("--rotations must be at least 1"));
    }
    for id in &a.identities {
        crate::conditions::lookup(id)?;
    }
    let settings = SuiteSettings {
        points: a.sampling.points,
        seed: a.sampling.seed,
        rotations: a.rotations,
        tolerances,
        identities: a.identities.clone(),
    };
    let report = crate::conditions::run_suite(&spec, &settings)?;
    let mut body = Vec::new();
    match a.format {
        Format::Json => write_json(&mut body, "check", &report)?,
        Format::Csv => write_csv(&mut body, &[&report])?,
        Format::Text => write_text(&mut body, &report)?,
    }
    emit(&a.out, out, &body)?;
    if let Some(p) = &a.out {
        let _ = writeln!(
            err,
            "{}: {} ({})",
            spec.id,
            if report.passed() { "pass" } else { "fail" },
            p.display()
        );
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_VIOLATION })
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let spec = a.target.resolve()?;
    let tol = a.sampling.tolerances()?;
    let c = classify_structure(&spec, a.sampling.points, a.sampling.seed, &tol)?;
    let body = match a.format {
        Format::Json => json_bytes(&envelope(
            "classify",
            json!({
                "manifold": spec.id,
                "points": a.sampling.points,
                "seed": a.sampling.seed,
                "tolerances": tol,
                "conventions": Conventions::current(),
                "classification": c,
            }),
        )),
        Format::Csv => csv_bytes(
            &["manifold", "verdict", "r_nabla_j", "r_d_omega", "r_nijenhuis"],
            &[vec![
                spec.id.clone(),
                c.verdict.to_string(),
                format!("{:.6e}", c.r_nabla_j),
                format!("{:.6e}", c.r_d_omega),
                format!("{:.6e}", c.r_nijenhuis),
            ]],
        )?,
        Format::Text => format!(
            "{}: {}\n  max |nabla J|/sqrt(c) {:.3e}, |dOmega|/sqrt(c) {:.3e}, |N_J|/sqrt(c) {:.3e} over {} points\n",
            spec.id, c.verdict, c.r_nabla_j, c.r_d_omega, c.r_nijenhuis, c.points
        )
        .into_bytes(),
    };
    emit(&a.out, out, &body)?;
    Ok(if c.verdict == StructureClass::Indeterminate {
        EXIT_VIOLATION
    } else {
        EXIT_PASS
    })
}

fn cmd_integrate(a: &IntegrateArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let spec = a.target.resolve()?;
    if !spec.compact {
        return Err(usage(format!(
            "manifold `{}` is not compact; integrate needs a compact fundamental domain",
            spec.id
        )));
    }
    if a.nodes == 0 || a.refined <= a.nodes {
        return Err(usage("need 0 < --nodes < --refined"));
    }
    let quad = QuadratureSpec {
        nodes: a.nodes,
        refined: a.refined,
        ..QuadratureSpec::default()
    };
    if let Some(d) = a.density {
        return integrate_one(&spec, d, &quad, a, out);
    }
    let r = check_integral_formulas(&spec, &quad)?;
    let which = a.formula.unwrap_or(Formula::Both);
    let pick: Vec<(&str, f64)> = match which {
        Formula::Eq117 => vec![("eq117", r.eq117)],
        Formula::Eq118 => vec![("eq118", r.eq118)],
        Formula::Both => vec![("eq117", r.eq117), ("eq118", r.eq118)],
    };
    let combo = r.combination_residual.abs() / r.volume;
    let pass = pick.iter().all(|(_, v)| v.abs() <= a.tol * r.volume) && (which != Formula::Both || combo <= a.tol);
    let body = match a.format {
        Format::Json => json_bytes(&envelope(
            "integrate",
            json!({
                "manifold": spec.id,
                "quadrature": quad,
                "tolerance": a.tol,
                "formulas": pick.iter().map(|(n, v)| json!({ "formula": n, "value": v, "relative": v.abs() / r.volume })).collect::<Vec<_>>(),
                "report": r,
                "passed": pass,
            }),
        )),
        Format::Csv => {
            let rows: Vec<Vec<String>> = pick
                .iter()
                .map(|(n, v)| {
                    vec![
                        spec.id.clone(),
                        n.to_string(),
                        format!("{v:.6e}"),
                        format!("{:.6e}", r.error_estimate),
                        format!("{:.6e}", r.volume),
                        r.method.clone(),
                    ]
                })
                .collect();
            csv_bytes(
                &["manifold", "formula", "value", "error_estimate", "volume", "method"],
                &rows,
            )?
        }
        Format::Text => {
            let mut s = format!(
                "{}: volume {:.6e} ({}), Q(J) {:.6e}\n",
                spec.id, r.volume, r.method, r.q
            );
            for (n, v) in &pick {
                s.push_str(&format!(
                    "{n}: {v:.6e} ± {:.1e}  (|value|/volume {:.3e})\n",
                    r.error_estimate,
                    v.abs() / r.volume
                ));
            }
            if which == Formula::Both {
                s.push_str(&format!(
                    "eq117 - eq118 + (1/2) integrated eq116: {:.3e}\n",
                    r.combination_residual
                ));
            }
            s.push_str(&format!("result: {}\n", if pass { "pass" } else { "fail" }));
            s.into_bytes()
        }
    };
    emit(&a.out, out, &body)?;
    Ok(if pass { EXIT_PASS } else { EXIT_VIOLATION })
}

fn integrate_one(
    spec: &ManifoldSpec,
    d: Density,
    quad: &QuadratureSpec,
    a: &IntegrateArgs,
    out: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let seed = Vec4::from(FrameSeed::default().seed);
    let r = match d {
        Density::One => integrate_density(spec, |_| Ok(vec![1.0]), quad)?,
        Density::QJ => integrate_density(
            spec,
            |p| {
                let an = PointAnalysis::compute(spec, p, &seed, 0.0)?;
                Ok(vec![q_j_integrand(an.bundle(), &an.frame.j, an.mp())?])
            },
            quad,
        )?,
    };
    let name = match d {
        Density::QJ => "qJ",
        Density::One => "one",
    };
    let (value, error) = (r.value[0], r.error_estimate[0]);
    let body = match a.format {
        Format::Json => json_bytes(&envelope(
            "integrate",
            json!({
                "manifold": spec.id,
                "quadrature": quad,
                "density": name,
                "value": value,
                "error_estimate": error,
                "method": r.method,
                "coordinate_volume": r.coordinate_volume,
            }),
        )),
        Format::Csv => csv_bytes(
            &["manifold", "density", "value", "error_estimate", "method"],
            &[vec![
                spec.id.clone(),
                name.into(),
                format!("{value:.6e}"),
                format!("{error:.6e}"),
                r.method.clone(),
            ]],
        )?,
        Format::Text => format!(
            "{}: integral of {name} = {value:.12e} ± {error:.1e} ({})\n",
            spec.id, r.method
        )
        .into_bytes(),
    };
    emit(&a.out, out, &body)?;
    Ok(EXIT_PASS)
}
