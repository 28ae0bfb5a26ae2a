//! `qhgeo` command-line front end: distances, geodesics, metric-ball
//! analysis, critical-radius tables, moduli estimation and the verification
//! suite.
//!
//! Exit codes: 0 on success, 1 when `verify` records a failing check, 2 on
//! invalid input (with a one-line diagnostic on stderr).

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qhgeo::constants::{radius_table, solve_kappa, solve_lambda};
use qhgeo::field::{count_components, distance_field, trace_ball_boundary, GridSpec};
use qhgeo::metric::{
    hyperbolic_ball_distance, hyperbolic_halfspace_distance, j_metric, qh_punctured_distance,
    qh_punctured_geodesic,
};
use qhgeo::moduli::{modulus_of_convexity, modulus_of_smoothness, power_type_fit, ModulusKind};
use qhgeo::shape::{test_close_to_convex, test_convex, test_starlike, SampleBudget};
use qhgeo::solver::{qh_distance_numeric, SolverOptions};
use qhgeo::svg::render_svg;
use qhgeo::verify::{run_suite, Suite, VerifyOptions};
use qhgeo::{DomainSpec, MetricKind, NormSpec, PathPolyline, Point};

#[derive(Parser)]
#[command(
    name = "qhgeo",
    about = "Quasihyperbolic and distance-ratio metric toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two points (closed form when available).
    Dist(DistArgs),
    /// Geodesic between two points, written as CSV or SVG.
    Geodesic(GeodesicArgs),
    /// Metric-ball boundary tracing, field dumps and shape certification.
    Ball(BallArgs),
    /// Critical radii and the critical-radius tables.
    Constants(ConstantsArgs),
    /// Moduli of convexity / smoothness and their power-type fit.
    Moduli(ModuliArgs),
    /// Run the verification suite and emit JSONL check reports.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    /// quasihyperbolic metric
    K,
    /// distance ratio metric
    J,
    /// hyperbolic metric (ball or half-space domains)
    Hyperbolic,
}

#[derive(Args)]
struct DistArgs {
    /// Domain: JSON file path, inline JSON, or a named shorthand
    /// (punctured-plane, upper-half-plane, unit-disk, slit-plane)
    #[arg(long)]
    domain: String,
    /// Norm: euclidean, inf, p=<exponent>, a JSON file path or inline JSON
    #[arg(long, default_value = "euclidean")]
    norm: String,
    #[arg(long, value_enum, default_value = "k")]
    metric: MetricArg,
    /// Start point as comma-separated coordinates, e.g. 1,0
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// End point as comma-separated coordinates
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    /// Force the numeric solver even when a closed form exists
    #[arg(long)]
    numeric: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also write the geodesic to this path (.csv or .svg)
    #[arg(long)]
    geodesic_out: Option<PathBuf>,
}

#[derive(Args)]
struct GeodesicArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, default_value = "euclidean")]
    norm: String,
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    /// Output path; the extension selects the format (.csv or .svg)
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SolverArgs {
    /// Lattice cell size as a fraction of the endpoint boundary distance
    #[arg(long)]
    grid_resolution: Option<f64>,
    /// Refinement sweeps after the graph search
    #[arg(long)]
    refine_iterations: Option<usize>,
    /// Target relative error of the numeric value
    #[arg(long)]
    target_rel_error: Option<f64>,
}

impl SolverArgs {
    fn build(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(g) = self.grid_resolution {
            opts.grid_resolution = g;
        }
        if let Some(n) = self.refine_iterations {
            opts.refine_iterations = n;
        }
        if let Some(e) = self.target_rel_error {
            opts.target_rel_error = e;
        }
        opts
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Convex,
    Starlike,
    CloseToConvex,
    Components,
}

#[derive(Args)]
struct BallArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_enum, default_value = "k")]
    metric: MetricArg,
    /// Ball center as comma-separated coordinates
    #[arg(long, allow_hyphen_values = true)]
    center: String,
    /// Radius: a number or one of log2, log1+sqrt2, log1+sqrt3, kappa,
    /// lambda, pi/2
    #[arg(long)]
    radius: String,
    /// Write the traced boundary (.svg) or the sampled field (.csv)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a shape test and print its report as JSON
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    /// Grid side for tracing / component counting
    #[arg(long, default_value_t = 321)]
    grid: usize,
    /// Half-extent of the sampling window (default: fitted to the ball)
    #[arg(long)]
    extent: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Convexity,
    Smoothness,
}

#[derive(Args)]
struct ModuliArgs {
    #[arg(long, default_value = "euclidean")]
    norm: String,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Comma-separated parameter values (epsilon or tau)
    #[arg(long)]
    params: String,
    /// Write the (parameter, value) CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the power-type fit as JSON
    #[arg(long)]
    fit: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Constants,
    Distances,
    Balls,
    Properties,
    Moduli,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Seed for all randomized checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Reduced budgets; skips the budget-doubling stability pass
    #[arg(long)]
    fast: bool,
    /// Write the JSONL report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // die quietly when the consumer of a pipe exits early (e.g. | head)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Dist(args) => run_dist(&args),
        Command::Geodesic(args) => run_geodesic(&args),
        Command::Ball(args) => run_ball(&args),
        Command::Constants(args) => run_constants(&args),
        Command::Moduli(args) => run_moduli(&args),
        Command::Verify(args) => return run_verify(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------------------
// argument parsing helpers

fn parse_point(text: &str) -> anyhow::Result<Point> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow::anyhow!("invalid point '{text}': expected comma-separated reals"))?;
    Ok(Point::new(coords)?)
}

fn parse_domain(text: &str) -> anyhow::Result<DomainSpec> {
    let domain = match text {
        "punctured-plane" => DomainSpec::punctured_plane(),
        "upper-half-plane" => DomainSpec::upper_half_plane(),
        "unit-disk" => DomainSpec::unit_ball(Point::new2(0.0, 0.0), 1.0)?,
        "slit-plane" => DomainSpec::slit_plane(Point::new2(0.0, 0.0), vec![1.0, 0.0])?,
        other => {
            let json = if Path::new(other).is_file() {
                std::fs::read_to_string(other)?
            } else {
                other.to_string()
            };
            let spec: DomainSpec = serde_json::from_str(&json)
                .map_err(|e| anyhow::anyhow!("invalid domain '{other}': {e}"))?;
            spec.validate()?;
            spec
        }
    };
    Ok(domain)
}

fn parse_norm(text: &str) -> anyhow::Result<NormSpec> {
    match text {
        "euclidean" => return Ok(NormSpec::Euclidean),
        "inf" | "sup" => return Ok(NormSpec::sup()),
        _ => {}
    }
    if let Some(p) = text.strip_prefix("p=") {
        let p: f64 = p
            .parse()
            .map_err(|_| anyhow::anyhow!("invalid norm exponent '{p}'"))?;
        return Ok(NormSpec::p_norm(p)?);
    }
    let json = if Path::new(text).is_file() {
        std::fs::read_to_string(text)?
    } else {
        text.to_string()
    };
    serde_json::from_str(&json).map_err(|e| anyhow::anyhow!("invalid norm '{text}': {e}"))
}

fn parse_radius(text: &str) -> anyhow::Result<f64> {
    let value = match text {
        "log2" => 2f64.ln(),
        "log1+sqrt2" => (1.0 + 2f64.sqrt()).ln(),
        "log1+sqrt3" => (1.0 + 3f64.sqrt()).ln(),
        "kappa" => solve_kappa().value,
        "lambda" => solve_lambda().value,
        "pi/2" => PI / 2.0,
        other => other
            .parse()
            .map_err(|_| anyhow::anyhow!("invalid radius '{other}'"))?,
    };
    if !(value > 0.0) {
        anyhow::bail!("radius must be positive, got {value}");
    }
    Ok(value)
}

/// The library metric kind for a CLI metric flag in a given domain.
fn resolve_metric(metric: MetricArg, domain: &DomainSpec) -> anyhow::Result<MetricKind> {
    Ok(match metric {
        MetricArg::K => MetricKind::Quasihyperbolic,
        MetricArg::J => MetricKind::DistanceRatio,
        MetricArg::Hyperbolic => match domain {
            DomainSpec::UnitBall { .. } => MetricKind::HyperbolicBall,
            DomainSpec::HalfSpace { .. } => MetricKind::HyperbolicHalfspace,
            _ => anyhow::bail!("the hyperbolic metric needs a ball or half-space domain"),
        },
    })
}

// ---------------------------------------------------------------------------
// dist / geodesic

/// Closed-form k-distance if the domain/norm admit one.
fn closed_form_k(
    domain: &DomainSpec,
    norm: &NormSpec,
    x: &Point,
    y: &Point,
) -> anyhow::Result<Option<f64>> {
    if !norm.is_euclidean() {
        return Ok(None);
    }
    match domain {
        DomainSpec::Punctured { punctures } if punctures.len() == 1 => {
            let p = &punctures[0];
            let xs = Point::new(x.sub(p))?;
            let ys = Point::new(y.sub(p))?;
            Ok(Some(qh_punctured_distance(&xs, &ys)?))
        }
        // in a half-space k coincides with the hyperbolic metric
        DomainSpec::HalfSpace { .. } => Ok(Some(hyperbolic_halfspace_distance(domain, x, y)?)),
        _ => Ok(None),
    }
}

fn run_dist(args: &DistArgs) -> anyhow::Result<()> {
    let domain = parse_domain(&args.domain)?;
    let norm = parse_norm(&args.norm)?;
    let x = parse_point(&args.from)?;
    let y = parse_point(&args.to)?;
    if !domain.contains(&x)? || !domain.contains(&y)? {
        anyhow::bail!("a point lies outside the domain");
    }

    let mut geodesic: Option<PathPolyline> = None;
    let (label, value, note) = match args.metric {
        MetricArg::J => ("j", j_metric(&domain, &x, &y)?, "closed form".to_string()),
        MetricArg::Hyperbolic => {
            let value = match resolve_metric(MetricArg::Hyperbolic, &domain)? {
                MetricKind::HyperbolicBall => hyperbolic_ball_distance(&domain, &x, &y)?,
                _ => hyperbolic_halfspace_distance(&domain, &x, &y)?,
            };
            ("rho", value, "closed form".to_string())
        }
        MetricArg::K => {
            let closed = if args.numeric {
                None
            } else {
                closed_form_k(&domain, &norm, &x, &y)?
            };
            match closed {
                Some(v) => ("k", v, "closed form".to_string()),
                None => {
                    let opts = args.solver.build();
                    let (v, path) = qh_distance_numeric(&domain, &norm, &x, &y, &opts)?;
                    geodesic = Some(path);
                    (
                        "k",
                        v,
                        format!("numeric upper bound, target rel error {:e}", opts.target_rel_error),
                    )
                }
            }
        }
    };
    println!("{label} = {value:.12} ({note})");

    if let Some(out) = &args.geodesic_out {
        let path = match geodesic {
            Some(p) => p,
            None => geodesic_path(&domain, &norm, &x, &y, &args.solver.build())?,
        };
        write_polyline(out, &path, &domain)?;
        println!("geodesic written to {}", out.display());
    }
    Ok(())
}

/// Geodesic polyline: exact circular arc in the once-punctured plane,
/// numeric elsewhere.
fn geodesic_path(
    domain: &DomainSpec,
    norm: &NormSpec,
    x: &Point,
    y: &Point,
    opts: &SolverOptions,
) -> anyhow::Result<PathPolyline> {
    if norm.is_euclidean() {
        if let DomainSpec::Punctured { punctures } = domain {
            if punctures.len() == 1 && x.dim() == 2 {
                let p = &punctures[0];
                let g = qh_punctured_geodesic(&Point::new(x.sub(p))?, &Point::new(y.sub(p))?, 129)?;
                let vertices = g
                    .path
                    .vertices
                    .iter()
                    .map(|v| Point::new2(v.x() + p.x(), v.y() + p.y()))
                    .collect();
                return Ok(PathPolyline::new(vertices)?);
            }
        }
    }
    let (_, path) = qh_distance_numeric(domain, norm, x, y, opts)?;
    Ok(path)
}

fn domain_punctures(domain: &DomainSpec) -> Vec<Point> {
    match domain {
        DomainSpec::Punctured { punctures } => punctures.clone(),
        DomainSpec::SlitPlane { apex, .. } => vec![apex.clone()],
        _ => Vec::new(),
    }
}

fn write_polyline(out: &Path, path: &PathPolyline, domain: &DomainSpec) -> anyhow::Result<()> {
    match out.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            let mut text = String::from("x,y\n");
            for v in &path.vertices {
                writeln!(text, "{},{}", v.x(), v.y()).unwrap();
            }
            std::fs::write(out, text)?;
        }
        Some("svg") => {
            let svg = render_svg(&[path.vertices.clone()], &domain_punctures(domain))?;
            std::fs::write(out, svg)?;
        }
        _ => anyhow::bail!("output extension must be .csv or .svg"),
    }
    Ok(())
}

fn run_geodesic(args: &GeodesicArgs) -> anyhow::Result<()> {
    let domain = parse_domain(&args.domain)?;
    let norm = parse_norm(&args.norm)?;
    let x = parse_point(&args.from)?;
    let y = parse_point(&args.to)?;
    if !domain.contains(&x)? || !domain.contains(&y)? {
        anyhow::bail!("a point lies outside the domain");
    }
    let path = geodesic_path(&domain, &norm, &x, &y, &args.solver.build())?;
    let length = qhgeo::path::qh_length(&domain, &norm, &path, 16)?;
    write_polyline(&args.out, &path, &domain)?;
    println!(
        "geodesic with {} vertices, quasihyperbolic length {length:.9}, written to {}",
        path.vertices.len(),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// ball

fn run_ball(args: &BallArgs) -> anyhow::Result<()> {
    let domain = parse_domain(&args.domain)?;
    let center = parse_point(&args.center)?;
    let r = parse_radius(&args.radius)?;
    let metric = resolve_metric(args.metric, &domain)?;
    if !domain.contains(&center)? {
        anyhow::bail!("center lies outside the domain");
    }
    if args.out.is_none() && args.shape.is_none() {
        anyhow::bail!("nothing to do: pass --out and/or --shape");
    }

    if let Some(shape) = args.shape {
        let budget = SampleBudget::default();
        match shape {
            ShapeArg::Convex | ShapeArg::Starlike | ShapeArg::CloseToConvex => {
                let report = match shape {
                    ShapeArg::Convex => test_convex(&domain, metric, &center, r, &budget)?,
                    ShapeArg::Starlike => test_starlike(&domain, metric, &center, r, &budget)?,
                    _ => test_close_to_convex(&domain, metric, &center, r, &budget)?,
                };
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
            ShapeArg::Components => {
                let field = ball_field(&domain, metric, &center, r, args)?;
                let n = count_components(&field, r)?;
                println!("{{\"components\": {n}}}");
            }
        }
    }

    if let Some(out) = &args.out {
        let field = ball_field(&domain, metric, &center, r, args)?;
        match out.extension().and_then(|e| e.to_str()) {
            Some("svg") => {
                let contours = trace_ball_boundary(&field, r)?;
                let lines: Vec<Vec<Point>> = contours.into_iter().map(|c| c.vertices).collect();
                std::fs::write(out, render_svg(&lines, &domain_punctures(&domain))?)?;
                println!("boundary written to {}", out.display());
            }
            Some("csv") => {
                let mut text = String::from("x,y,value\n");
                for j in 0..field.grid.ny {
                    for i in 0..field.grid.nx {
                        let v = field.value(i, j);
                        if v.is_finite() {
                            let p = field.grid.node(i, j);
                            writeln!(text, "{},{},{}", p.x(), p.y(), v).unwrap();
                        }
                    }
                }
                std::fs::write(out, text)?;
                println!("field written to {}", out.display());
            }
            _ => anyhow::bail!("output extension must be .csv or .svg"),
        }
    }
    Ok(())
}

fn ball_field(
    domain: &DomainSpec,
    metric: MetricKind,
    center: &Point,
    r: f64,
    args: &BallArgs,
) -> anyhow::Result<qhgeo::field::ScalarField> {
    let half_extent = match args.extent {
        Some(e) => e,
        None => {
            // both k- and j-balls of radius r fit inside the Euclidean ball
            // of radius d(center) * (e^r - 1)
            let d = domain.boundary_distance(&NormSpec::Euclidean, center)?;
            1.1 * d * (r.exp() - 1.0)
        }
    };
    let grid = GridSpec::centered(center, half_extent, args.grid.max(3))?;
    Ok(distance_field(domain, metric, center, &grid)?)
}

// ---------------------------------------------------------------------------
// constants

fn run_constants(args: &ConstantsArgs) -> anyhow::Result<()> {
    let kappa = solve_kappa();
    let lambda = solve_lambda();
    let tables = [
        ("quasihyperbolic", radius_table(MetricKind::Quasihyperbolic)),
        ("distance_ratio", radius_table(MetricKind::DistanceRatio)),
    ];
    match args.format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "critical_radii": [kappa, lambda],
                "tables": tables
                    .iter()
                    .map(|(m, rows)| serde_json::json!({ "metric": m, "rows": rows }))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OutputFormat::Text => {
            for c in [&kappa, &lambda] {
                println!(
                    "{:<7} = {:.10}   root of {} on [{}, {}]",
                    c.name, c.value, c.defining_equation, c.bracket.0, c.bracket.1
                );
            }
            for (name, rows) in &tables {
                println!("\n{name} metric balls:");
                println!(
                    "  {:<28} {:>14} {:>14} {:>16}",
                    "domain", "convex", "starlike", "close-to-convex"
                );
                for row in rows {
                    let cell = |e: &qhgeo::constants::RadiusEntry| {
                        let mut s = e.value.display();
                        if !e.sharp {
                            s.push('*');
                        }
                        s
                    };
                    println!(
                        "  {:<28} {:>14} {:>14} {:>16}",
                        row.domain_class,
                        cell(&row.convex),
                        cell(&row.starlike),
                        cell(&row.close_to_convex)
                    );
                }
            }
            println!("\n(* = not known to be sharp)");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// moduli

fn run_moduli(args: &ModuliArgs) -> anyhow::Result<()> {
    let norm = parse_norm(&args.norm)?;
    let params: Vec<f64> = args
        .params
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow::anyhow!("invalid --params '{}': expected comma-separated reals", args.params))?;
    if params.is_empty() {
        anyhow::bail!("--params must list at least one value");
    }
    let kind = match args.kind {
        KindArg::Convexity => ModulusKind::Convexity,
        KindArg::Smoothness => ModulusKind::Smoothness,
    };

    let mut samples = Vec::new();
    let mut csv = String::from("parameter,value\n");
    for &t in &params {
        let est = match kind {
            ModulusKind::Convexity => modulus_of_convexity(&norm, t)?,
            ModulusKind::Smoothness => modulus_of_smoothness(&norm, t)?,
        };
        writeln!(csv, "{},{}", est.parameter, est.value).unwrap();
        samples.push((est.parameter, est.value));
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            println!("table written to {}", path.display());
        }
        None => print!("{csv}"),
    }

    if args.fit {
        let (coeff, exponent) = power_type_fit(&samples, kind)?;
        println!(
            "{}",
            serde_json::json!({ "coefficient": coeff, "exponent": exponent })
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

fn run_verify(args: &VerifyArgs) -> ExitCode {
    let suite = match args.suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Constants => Suite::Constants,
        SuiteArg::Distances => Suite::Distances,
        SuiteArg::Balls => Suite::Balls,
        SuiteArg::Properties => Suite::Properties,
        SuiteArg::Moduli => Suite::Moduli,
    };
    let checks = run_suite(
        suite,
        &VerifyOptions {
            seed: args.seed,
            fast: args.fast,
        },
    );
    let mut report = String::new();
    for c in &checks {
        report.push_str(&serde_json::to_string(c).expect("check serialization"));
        report.push('\n');
    }
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, &report) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{report}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    eprintln!(
        "{} checks, {} failed",
        checks.len(),
        failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
