//! Command-line front end for Frégier-point and Frégier-locus computations.
//!
//! Subcommands: `point`, `locus`, `classify`, `scan`, `render`. The first
//! three emit one JSON object on stdout; `scan` emits CSV on stdout with a
//! `#`-prefixed root summary on stderr; `render` writes an SVG file. All
//! outputs are deterministic for fixed flags, so repeated runs are
//! byte-identical.
//!
//! Exit codes: 0 success, 2 input or domain error, 3 numerical instability
//! (unstable or borderline-rank fit, ambiguous classification, exhausted
//! sampling), 4 I/O error. Failures print `{"error": {"code": …,
//! "message": …}}` on stdout.
//!
//! The environment variable `FREGIER_TOLERANCE` overrides the default
//! relative tolerance (1e-9) used by the geometric predicates.

mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fregier_core::conic::{conic_match, Conic};
use fregier_core::fregier::families::FamilySpec;
use fregier_core::fregier::scan::{singular_scan, SweepSpec};
use fregier_core::fregier::{
    fregier_point_chords, fregier_point_isotropic, locus_fit, LocusResult, LocusShape,
};
use fregier_core::metric::{normal_line, Geometry};
use fregier_core::pencil::{classify, MemberForm, PencilClass};
use fregier_core::projective::{chordal, normalize3, normalize3_c, ProjPoint, Tol};
use fregier_core::Error as CoreError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fregier", version, about = "Frégier points, loci, and conic pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Frégier point of a point on a conic.
    Point(PointArgs),
    /// Fit the Frégier locus of a conic and diagnose degenerations.
    Locus(LocusArgs),
    /// Classify the pencil spanned by a conic and the absolute.
    Classify(ClassifyArgs),
    /// Sweep a family parameter and locate singular loci.
    Scan(ScanArgs),
    /// Render a configuration to an SVG file.
    Render(RenderArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    Euclidean,
    PseudoEuclidean,
    Elliptic,
    Hyperbolic,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Geometry {
        match g {
            GeometryArg::Euclidean => Geometry::Euclidean,
            GeometryArg::PseudoEuclidean => Geometry::PseudoEuclidean,
            GeometryArg::Elliptic => Geometry::Elliptic,
            GeometryArg::Hyperbolic => Geometry::Hyperbolic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Chords,
    Isotropic,
    Both,
}

#[derive(Args)]
struct PointArgs {
    /// Plane geometry the right angles live in.
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    /// Conic coefficients m00,m11,m22,m01,m02,m12 (cross terms are the
    /// matrix entries; the quadratic form carries them twice).
    #[arg(long, allow_hyphen_values = true)]
    conic: String,
    /// Homogeneous coordinates x0,x1,x2 of a point on the conic.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Construction whose coordinates are reported; both always run for the
    /// agreement check.
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
}

#[derive(Args)]
struct LocusArgs {
    /// Plane geometry; defaults to the family's own geometry when --family
    /// is given.
    #[arg(long, value_enum)]
    geometry: Option<GeometryArg>,
    /// Conic coefficients m00,m11,m22,m01,m02,m12; defaults to the family
    /// member when --family is given.
    #[arg(long, allow_hyphen_values = true)]
    conic: Option<String>,
    /// Number of points sampled for the locus fit.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Seed for the deterministic point sampler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Canonical family name; requests the closed-form locus alongside the
    /// fit.
    #[arg(long)]
    family: Option<String>,
    /// Family parameters as name=value, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Geometry providing the absolute conic (must be elliptic or
    /// hyperbolic; the other absolutes are degenerate).
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    /// Conic coefficients m00,m11,m22,m01,m02,m12.
    #[arg(long, allow_hyphen_values = true)]
    conic: String,
}

#[derive(Args)]
struct ScanArgs {
    /// Canonical family name.
    #[arg(long)]
    family: String,
    /// Fixed family parameters as name=value, comma-separated or repeated.
    /// The swept parameter may be omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<String>,
    /// Sweep description param:lo:hi:step.
    #[arg(long, allow_hyphen_values = true)]
    sweep: String,
    /// Size of the thread pool used for the sweep (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RenderArgs {
    /// Output SVG path.
    #[arg(long)]
    out: String,
    /// Plane geometry of the scene.
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    /// Conic coefficients m00,m11,m22,m01,m02,m12.
    #[arg(long, allow_hyphen_values = true)]
    conic: String,
    /// Draw the absolute conic (hyperbolic: unit circle; euclidean and
    /// pseudo-euclidean: dashed viewport border for the line at infinity,
    /// plus the isotropic directions in the pseudo-euclidean case).
    #[arg(long)]
    show_absolute: bool,
    /// Fit and draw the Frégier locus.
    #[arg(long)]
    show_locus: bool,
    /// Number of inscribed right triangles to draw, all with the right
    /// angle at the same base point; their hypotenuses concur in the
    /// Frégier point.
    #[arg(long, default_value_t = 0)]
    triangles: usize,
    /// Affine window xmin:xmax:ymin:ymax in the chart x=x1/x0, y=x2/x0.
    #[arg(long, default_value = "-2:2:-2:2", allow_hyphen_values = true)]
    viewport: String,
    /// Pixel width of the image (height follows the viewport aspect).
    #[arg(long, default_value_t = 640)]
    size: u32,
    /// Seed for point sampling (base point, locus fit).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

// ── Output schemas ─────────────────────────────────────────────────────────

#[derive(Serialize)]
struct ErrorOut {
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    code: u8,
    message: String,
}

#[derive(Serialize)]
struct PointOut {
    fregier_point: [f64; 3],
    on_normal: bool,
    methods_agree: bool,
    residuals: PointResiduals,
}

#[derive(Serialize)]
struct PointResiduals {
    point_on_conic: f64,
    normal_incidence: f64,
    construction_gap: f64,
}

#[derive(Serialize)]
struct LocusOut {
    fitted: ConicOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<ConicOut>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    match_: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular: Option<SingularOut>,
}

#[derive(Serialize)]
struct ConicOut {
    conic: [f64; 6],
    rank: u8,
}

#[derive(Serialize)]
struct SingularOut {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lines: Option<[[f64; 3]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    carrier: Option<[f64; 3]>,
    /// Chart `[den, num]`: interval endpoints are `t = x[num]/x[den]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    chart: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    real_range: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct ClassifyOut {
    class: &'static str,
    base_points: Vec<BasePointOut>,
    singular_members: Vec<MemberOut>,
}

#[derive(Serialize)]
struct BasePointOut {
    /// Homogeneous coordinates as [re, im] pairs.
    point: [[f64; 2]; 3],
    multiplicity: u8,
}

#[derive(Serialize)]
struct MemberOut {
    /// Pencil parameter (u, v) as [re, im] pairs; the member is u·C + v·N.
    param: [[f64; 2]; 2],
    multiplicity: u8,
    rank: u8,
    real: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    conic: Option<[f64; 6]>,
}

// ── Shared plumbing ────────────────────────────────────────────────────────

enum CliError {
    Core(CoreError),
    Input(String),
    Unstable(String),
    Io(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            // NotDegenerate escapes only from locus-fit post-processing,
            // when a borderline fit lands between shape classes — an
            // instability of the configuration, not an input error.
            CliError::Core(
                CoreError::FitUnstable
                | CoreError::ClassificationAmbiguous(_)
                | CoreError::SamplingExhausted
                | CoreError::NotDegenerate,
            ) => 3,
            CliError::Unstable(_) => 3,
            CliError::Core(_) | CliError::Input(_) => 2,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Input(m) | CliError::Unstable(m) | CliError::Io(m) => m.clone(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Runs the locus fit, rephrasing the borderline-rank error: at that point the
/// fitted conic sits between regular and degenerate, so neither a clean conic
/// nor a recognisable degenerate shape can be reported.
fn fit_locus(g: Geometry, c: &Conic, samples: usize, seed: u64, tol: Tol) -> CliResult<LocusResult> {
    locus_fit(g, c, samples, seed, tol).map_err(|e| match e {
        CoreError::NotDegenerate => CliError::Unstable(
            "locus fit is numerically unstable: the fitted conic sits on the boundary \
             between regular and degenerate"
                .into(),
        ),
        other => CliError::Core(other),
    })
}

/// Relative tolerance from `FREGIER_TOLERANCE`, else the library default.
fn effective_tol() -> CliResult<Tol> {
    match std::env::var("FREGIER_TOLERANCE") {
        Ok(raw) => {
            let eps: f64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("invalid FREGIER_TOLERANCE {raw:?}")))?;
            if !eps.is_finite() || eps <= 0.0 {
                return Err(CliError::Input(format!("invalid FREGIER_TOLERANCE {raw:?}")));
            }
            Ok(Tol { eps_rel: eps, ..Tol::default() })
        }
        Err(_) => Ok(Tol::default()),
    }
}

/// Flushes negative zeros so JSON output has one canonical form.
fn c0(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn point3(v: &nalgebra::Vector3<f64>) -> [f64; 3] {
    // Prefer the affine representative (x0 = 1); ideal points fall back to
    // the largest-coordinate pivot.
    let mut n = normalize3(v);
    if n[0].abs() > 1e-9 {
        n /= n[0];
    }
    [c0(n[0]), c0(n[1]), c0(n[2])]
}

fn conic6(c: &Conic) -> [f64; 6] {
    let k = c.normalized().coeffs();
    [c0(k[0]), c0(k[1]), c0(k[2]), c0(k[3]), c0(k[4]), c0(k[5])]
}

fn parse_reals(raw: &str, n: usize, flag: &str) -> CliResult<Vec<f64>> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("{flag} {raw:?} is not a comma-separated number list")))?;
    if values.len() != n {
        return Err(CliError::Input(format!(
            "{flag} takes exactly {n} comma-separated values, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn parse_conic(raw: &str) -> CliResult<Conic> {
    let v = parse_reals(raw, 6, "--conic")?;
    Ok(Conic::new(v[0], v[1], v[2], v[3], v[4], v[5])?)
}

fn parse_point(raw: &str) -> CliResult<ProjPoint> {
    let v = parse_reals(raw, 3, "--point")?;
    Ok(ProjPoint::new(v[0], v[1], v[2])?)
}

fn parse_params(pairs: &[String]) -> CliResult<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(CliError::Input(format!("--params entry {pair:?} is not name=value")));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Input(format!("--params value in {pair:?} is not a number")))?;
        map.insert(key.trim().to_string(), value);
    }
    Ok(map)
}

fn parse_family(name: &str, params: &[String]) -> CliResult<FamilySpec> {
    let map = parse_params(params)?;
    Ok(FamilySpec::from_name(name, &map)?)
}

fn parse_sweep(raw: &str) -> CliResult<SweepSpec> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [param, lo, hi, step] = parts.as_slice() else {
        return Err(CliError::Input(format!("--sweep {raw:?} is not param:lo:hi:step")));
    };
    let num = |s: &str, what: &str| -> CliResult<f64> {
        s.parse()
            .map_err(|_| CliError::Input(format!("--sweep {what} {s:?} is not a number")))
    };
    Ok(SweepSpec {
        param: param.to_string(),
        lo: num(lo, "lower bound")?,
        hi: num(hi, "upper bound")?,
        step: num(step, "step")?,
    })
}

// ── Subcommands ────────────────────────────────────────────────────────────

fn cmd_point(args: &PointArgs) -> CliResult<PointOut> {
    let tol = effective_tol()?;
    let g: Geometry = args.geometry.into();
    let c = parse_conic(&args.conic)?;
    let p = parse_point(&args.point)?;

    let f_chords = fregier_point_chords(g, &c, &p, tol)?;
    let f_isotropic = fregier_point_isotropic(g, &c, &p, tol)?;
    let f = match args.method {
        MethodArg::Isotropic => &f_isotropic,
        _ => &f_chords,
    };
    let normal = normal_line(g, &c, &p, tol)?;

    let pn = normalize3(&p.0);
    let point_on_conic = (pn.transpose() * c.matrix() * pn)[0].abs() / c.matrix().norm();
    let normal_incidence = normal.incidence(f);
    let construction_gap = chordal(&f_chords.0, &f_isotropic.0);

    Ok(PointOut {
        fregier_point: point3(&f.0),
        on_normal: normal_incidence <= tol.threshold(1.0),
        methods_agree: f_chords.approx_eq(&f_isotropic, tol),
        residuals: PointResiduals {
            point_on_conic: c0(point_on_conic),
            normal_incidence: c0(normal_incidence),
            construction_gap: c0(construction_gap),
        },
    })
}

fn singular_out(result: &LocusResult) -> Option<SingularOut> {
    match &result.shape {
        LocusShape::Regular => None,
        LocusShape::Point(p) => Some(SingularOut {
            kind: "point",
            point: Some(point3(&p.0)),
            lines: None,
            carrier: None,
            chart: None,
            real_range: None,
        }),
        LocusShape::CrossedLines(l1, l2) => Some(SingularOut {
            kind: "crossed_lines",
            point: None,
            lines: Some([point3(&l1.0), point3(&l2.0)]),
            carrier: None,
            chart: None,
            real_range: None,
        }),
        LocusShape::Segment { carrier, chart, real_range } => Some(SingularOut {
            kind: "segment",
            point: None,
            lines: None,
            carrier: Some(point3(&carrier.0)),
            chart: Some([chart.0, chart.1]),
            real_range: Some(real_range.iter().map(|&(lo, hi)| [c0(lo), c0(hi)]).collect()),
        }),
    }
}

fn cmd_locus(args: &LocusArgs) -> CliResult<LocusOut> {
    let tol = effective_tol()?;
    let family = match &args.family {
        Some(name) => {
            if args.geometry.is_some() || args.conic.is_some() {
                return Err(CliError::Input(
                    "--family determines the geometry and conic; drop --geometry/--conic".into(),
                ));
            }
            let spec = parse_family(name, &args.params)?;
            spec.validate()?;
            Some(spec)
        }
        None => {
            if !args.params.is_empty() {
                return Err(CliError::Input("--params requires --family".into()));
            }
            None
        }
    };
    let g: Geometry = match (args.geometry, &family) {
        (Some(g), _) => g.into(),
        (None, Some(spec)) => spec.geometry(),
        (None, None) => return Err(CliError::Input("--geometry or --family is required".into())),
    };
    let c = match (&args.conic, &family) {
        (Some(values), _) => parse_conic(values)?,
        (None, Some(spec)) => spec.conic()?,
        (None, None) => return Err(CliError::Input("--conic or --family is required".into())),
    };

    let fit = fit_locus(g, &c, args.samples, args.seed, tol)?;
    let closed = match &family {
        Some(spec) => {
            let cf = spec.closed_form_locus(tol)?;
            Some(cf)
        }
        None => None,
    };

    let match_ = closed
        .as_ref()
        .map(|cf| conic_match(&fit.conic, &cf.conic) <= 1e-6);
    Ok(LocusOut {
        singular: singular_out(&fit),
        fitted: ConicOut { conic: conic6(&fit.conic), rank: fit.rank.rank },
        closed_form: closed
            .as_ref()
            .map(|cf| ConicOut { conic: conic6(&cf.conic), rank: cf.rank.rank }),
        match_,
    })
}

fn classify_out(cls: &PencilClass) -> ClassifyOut {
    let base_points = cls
        .base_points
        .iter()
        .map(|(p, mult)| {
            let n = normalize3_c(&p.0);
            BasePointOut {
                point: [
                    [c0(n[0].re), c0(n[0].im)],
                    [c0(n[1].re), c0(n[1].im)],
                    [c0(n[2].re), c0(n[2].im)],
                ],
                multiplicity: *mult,
            }
        })
        .collect();
    let singular_members = cls
        .singular_members
        .iter()
        .map(|m| {
            let (u, v) = m.param;
            let conic = match &m.form {
                MemberForm::Real(c) => Some(conic6(c)),
                MemberForm::Complex(_) => None,
            };
            MemberOut {
                param: [[c0(u.re), c0(u.im)], [c0(v.re), c0(v.im)]],
                multiplicity: m.multiplicity,
                rank: m.rank,
                real: matches!(m.form, MemberForm::Real(_)),
                conic,
            }
        })
        .collect();
    ClassifyOut { class: cls.kind.tag(), base_points, singular_members }
}

fn cmd_classify(args: &ClassifyArgs) -> CliResult<ClassifyOut> {
    let tol = effective_tol()?;
    let g: Geometry = args.geometry.into();
    let Some(absolute) = g.primal_absolute() else {
        return Err(CliError::Input(
            "classification needs a regular absolute: use --geometry elliptic or hyperbolic"
                .into(),
        ));
    };
    let c = parse_conic(&args.conic)?;
    let cls = classify(&c, &absolute, tol)?;
    Ok(classify_out(&cls))
}

fn cmd_scan(args: &ScanArgs, out: &mut impl Write) -> CliResult<()> {
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Input("--jobs must be at least 1".into()));
        }
        // Build errors only repeat-initialization; results do not depend on
        // pool size, so a pre-existing pool is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let sweep = parse_sweep(&args.sweep)?;
    let mut params = parse_params(&args.params)?;
    // The swept parameter needs a placeholder binding for construction; its
    // value is immaterial and never domain-checked.
    params.entry(sweep.param.clone()).or_insert(sweep.lo);
    let spec = FamilySpec::from_name(&args.family, &params)?;

    let result = singular_scan(&spec, &sweep)?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    writeln!(out, "param,det,singular").map_err(io)?;
    for row in &result.rows {
        writeln!(out, "{},{},{}", row.value, row.det, row.singular).map_err(io)?;
    }
    let mut err = std::io::stderr().lock();
    writeln!(err, "# {} roots in [{}, {}]", result.roots.len(), sweep.lo, sweep.hi).map_err(io)?;
    for root in &result.roots {
        writeln!(
            err,
            "# root {} = {} admissible={} even_multiplicity={}",
            sweep.param, root.value, root.admissible, root.even_multiplicity
        )
        .map_err(io)?;
    }
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> CliResult<()> {
    let tol = effective_tol()?;
    let g: Geometry = args.geometry.into();
    let c = parse_conic(&args.conic)?;
    let viewport = render::Viewport::parse(&args.viewport)
        .ok_or_else(|| CliError::Input(format!("--viewport {:?} is not xmin:xmax:ymin:ymax", args.viewport)))?;
    if args.size == 0 {
        return Err(CliError::Input("--size must be at least 1".into()));
    }
    let locus = if args.show_locus {
        Some(fit_locus(g, &c, 64, args.seed, tol)?)
    } else {
        None
    };
    let scene = render::Scene {
        geometry: g,
        conic: &c,
        show_absolute: args.show_absolute,
        locus: locus.as_ref(),
        triangles: args.triangles,
        viewport,
        size: args.size,
        seed: args.seed,
        tol,
    };
    let svg = render::render_scene(&scene)?;
    std::fs::write(&args.out, svg)
        .map_err(|e| CliError::Io(format!("cannot write {:?}: {e}", args.out)))
}

fn emit_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    println!("{text}");
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Point(args) => cmd_point(args).map(|out| emit_json(&out)),
        Command::Locus(args) => cmd_locus(args).map(|out| emit_json(&out)),
        Command::Classify(args) => cmd_classify(args).map(|out| emit_json(&out)),
        Command::Scan(args) => cmd_scan(args, &mut std::io::stdout().lock()),
        Command::Render(args) => cmd_render(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.code();
            emit_json(&ErrorOut { error: ErrorBody { code, message: e.message() } });
            ExitCode::from(code)
        }
    }
}
