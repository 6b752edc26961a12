//! Command-line driver: builds spaces, selective Rips complexes,
//! barcodes, crushing reports, nerve checks, and the end-to-end
//! reconstruction experiment.
//!
//! Exit codes: 0 success, 1 validation/check failure (a JSON witness goes
//! to stdout), 2 I/O or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use srips::counterexample::{counterexample_report, default_scales, CounterexampleError};
use srips::crushing::{crushable_in_union, greedy_crushable, Strategy, UnionCrushParams};
use srips::glue::{distortion, glue, nearest_point_correspondence};
use srips::homology::{betti, persistence};
use srips::io;
use srips::metric::MetricError;
use srips::nerve::{
    build_cover, build_right_cover, critical_radii, good_cover_check, intersection_hausdorff,
    lebesgue_number, mu_margin, nerve_complex, nerve_iso_check,
};
use srips::reconstruct::{run_reconstruction, ReconstructConfig};
use srips::sample::{sample, Mode, SampleSpec, Shape};
use srips::srips::{build_complex, build_filtration};
use srips::{Scales, Space, DEFAULT_DIM_CAP, DEFAULT_SIZE_CAP};

/// Environment variable holding the default output directory.
const OUT_DIR_ENV: &str = "SRIPS_OUT_DIR";

#[derive(Parser)]
#[command(name = "srips", version, about = "Selective Rips complexes of finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a space (interval, disk, circle, flat torus) and emit it.
    Sample(SampleArgs),
    /// Build the selective Rips complex and report simplex counts.
    Complex(ComplexArgs),
    /// Betti numbers of the selective Rips complex.
    Betti(ComplexArgs),
    /// Persistence barcode of the profile filtration.
    Barcode(BarcodeArgs),
    /// Search for a crushing sequence.
    Crush(CrushArgs),
    /// Cover, nerve, margins, and optional perturbation comparison.
    NerveCheck(NerveArgs),
    /// Four-link reconstruction experiment against a jittered copy.
    Reconstruct(ReconstructArgs),
    /// The spread-points instance with fast-decaying scales.
    Counterexample(CounterexampleArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Distance-matrix file: lower-triangular text (.txt) or square JSON
    /// array (.json).
    #[arg(long, conflicts_with_all = ["cloud", "sample"])]
    matrix: Option<PathBuf>,
    /// Point-cloud CSV file; combine with --metric.
    #[arg(long, conflicts_with = "sample")]
    cloud: Option<PathBuf>,
    /// Metric for --cloud input.
    #[arg(long, value_enum, default_value_t = MetricFlag::Euclidean)]
    metric: MetricFlag,
    /// Side lengths for the flat-torus metric, e.g. `4,4`.
    #[arg(long)]
    torus_sides: Option<String>,
    /// Sampler spec, e.g. `circle:r=1,n=60`, `interval:len=10,n=11`,
    /// `disk:r=1,dim=2,n=40`, `torus:sides=4x4,n=16`.
    #[arg(long)]
    sample: Option<String>,
    /// Sampling mode for --sample.
    #[arg(long, value_enum, default_value_t = ModeFlag::Grid)]
    mode: ModeFlag,
    /// RNG seed for random/jittered sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Jitter amplitude for jittered sampling.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Absolute tolerance for triangle-inequality validation of matrix
    /// inputs.
    #[arg(long, default_value_t = srips::DEFAULT_TRIANGLE_TOL)]
    triangle_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricFlag {
    Euclidean,
    CircleGeodesic,
    FlatTorus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeFlag {
    Grid,
    Random,
    Jitter,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = SpaceFormat::MatrixJson)]
    format: SpaceFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceFormat {
    MatrixJson,
    MatrixTxt,
    CloudCsv,
}

#[derive(Args)]
struct ComplexArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Scales, comma-separated, non-increasing; the last entry repeats.
    #[arg(long, conflicts_with = "rips")]
    scales: Option<String>,
    /// Constant-scale (plain Rips) shorthand.
    #[arg(long)]
    rips: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    /// Where to write the complex itself (summary always goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ComplexFormat::Json)]
    format: ComplexFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexFormat {
    Json,
    Text,
}

#[derive(Args)]
struct BarcodeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Shape profile, comma-separated, first entry 1.
    #[arg(long, default_value = "1")]
    profile: String,
    #[arg(long, default_value_t = 2)]
    dim_cap: usize,
    #[arg(long, value_enum, default_value_t = BarcodeFormat::Csv)]
    format: BarcodeFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additionally write an SVG rendering to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Also render the barcode as text to stderr.
    #[arg(long)]
    ascii: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BarcodeFormat {
    Csv,
    Svg,
    Json,
}

#[derive(Args)]
struct CrushArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    scales: String,
    #[arg(long, value_enum, default_value_t = StrategyFlag::Farthest)]
    strategy: StrategyFlag,
    /// Center index for the farthest-first strategy (defaults to the
    /// metric center).
    #[arg(long)]
    center: Option<usize>,
    /// Glue a jittered copy to the sampled model and run the segment
    /// schedule on it instead of crushing the model directly. Requires
    /// --sample with an interval or disk shape.
    #[arg(long)]
    glued: bool,
    /// Jitter of the glued copy.
    #[arg(long, default_value_t = 0.001)]
    glued_jitter: f64,
    #[arg(long, default_value_t = 1)]
    glued_seed: u64,
    /// Gluing slack; computed from the correspondence distortion when
    /// omitted.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Divisor applied to the inscribed radius in the glued schedule.
    #[arg(long, default_value_t = srips::DEFAULT_K_DIVISOR)]
    k_divisor: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyFlag {
    Farthest,
    Exhaustive,
}

#[derive(Args)]
struct NerveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Explicit center indices, comma-separated.
    #[arg(long, conflicts_with = "centers_every")]
    centers: Option<String>,
    /// Take every k-th point as a center.
    #[arg(long)]
    centers_every: Option<usize>,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
    /// Scales for the good-cover verdicts (skipped when absent).
    #[arg(long)]
    scales: Option<String>,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    /// Compare against a jittered copy glued with this slack.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Jitter amplitude of the comparison copy.
    #[arg(long, default_value_t = 0.0)]
    perturb_jitter: f64,
    #[arg(long, default_value_t = 1)]
    perturb_seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sampler spec for the model space.
    #[arg(long)]
    sample: String,
    /// Every k-th model point becomes a cover center.
    #[arg(long, default_value_t = 3)]
    centers_every: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    scales: String,
    /// Jitter applied to the approximation copy.
    #[arg(long, default_value_t = 0.002)]
    jitter: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Gluing slack; computed from the correspondence distortion when
    /// omitted.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    #[arg(long, default_value_t = 5)]
    size_cap: usize,
    /// Reference Betti numbers, comma-separated.
    #[arg(long, default_value = "1,1,0")]
    reference: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Dimension of the missing class (n+1 points are laid out).
    #[arg(long)]
    n: usize,
    /// Explicit scales; must satisfy the decay constraint.
    #[arg(long)]
    scales: Option<String>,
    /// First scale when generating the sequence.
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Validation or check failure: JSON witness on stdout, exit 1.
    Check(serde_json::Value),
    /// I/O or parse failure: message on stderr, exit 2.
    Io(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(witness)) => {
            println!("{}", serde_json::to_string_pretty(&witness).unwrap());
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Complex(args) => cmd_complex(args, false),
        Command::Betti(args) => cmd_complex(args, true),
        Command::Barcode(args) => cmd_barcode(args),
        Command::Crush(args) => cmd_crush(args),
        Command::NerveCheck(args) => cmd_nerve_check(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Counterexample(args) => cmd_counterexample(args),
    }
}

fn out_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn write_out(path: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let p = out_path(p);
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(p, contents)?;
            Ok(())
        }
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

fn metric_failure(e: &MetricError) -> Failure {
    Failure::Check(json!({ "error": "metric-validation", "detail": e.to_string() }))
}

fn parse_scales(text: &str) -> Result<Scales, Failure> {
    Scales::parse(text)
        .map_err(|e| Failure::Check(json!({ "error": "scales", "detail": e.to_string() })))
}

fn parse_sampler_spec(text: &str, mode: ModeFlag, seed: u64, jitter: f64) -> Result<SampleSpec<f64>, Failure> {
    let bad = |msg: String| Failure::Io(format!("bad sampler spec {text:?}: {msg}"));
    let (shape_name, rest) = text
        .split_once(':')
        .ok_or_else(|| bad("expected shape:key=value,…".into()))?;
    let mut kv = std::collections::BTreeMap::new();
    for part in rest.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("bad key=value pair {part:?}")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let getf = |kv: &std::collections::BTreeMap<String, String>, k: &str| -> Result<f64, Failure> {
        kv.get(k)
            .ok_or_else(|| bad(format!("missing {k}")))?
            .parse::<f64>()
            .map_err(|e| bad(format!("{k}: {e}")))
    };
    let getn = |kv: &std::collections::BTreeMap<String, String>| -> Result<usize, Failure> {
        kv.get("n")
            .ok_or_else(|| bad("missing n".into()))?
            .parse::<usize>()
            .map_err(|e| bad(format!("n: {e}")))
    };
    let shape = match shape_name {
        "circle" => Shape::Circle {
            radius: getf(&kv, "r")?,
            geodesic: kv
                .get("geodesic")
                .map_or(Ok(true), |v| v.parse().map_err(|_| bad("geodesic must be true/false".into())))?,
        },
        "interval" => Shape::Interval {
            length: getf(&kv, "len")?,
        },
        "disk" => Shape::Disk {
            radius: getf(&kv, "r")?,
            dim: kv
                .get("dim")
                .map_or(Ok(2), |v| v.parse().map_err(|_| bad("dim must be an integer".into())))?,
        },
        "torus" => {
            let sides = kv
                .get("sides")
                .ok_or_else(|| bad("missing sides".into()))?
                .split('x')
                .map(|t| t.parse::<f64>().map_err(|e| bad(format!("sides: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Shape::FlatTorus { sides }
        }
        other => return Err(bad(format!("unknown shape {other:?}"))),
    };
    let count = getn(&kv)?;
    let mode = match mode {
        ModeFlag::Grid => Mode::Grid,
        ModeFlag::Random => Mode::UniformRandom { seed },
        ModeFlag::Jitter => Mode::JitteredGrid { seed, jitter },
    };
    Ok(SampleSpec { shape, count, mode })
}

fn load_space(input: &InputArgs) -> Result<Space, Failure> {
    if let Some(path) = &input.matrix {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        if text.trim().is_empty() {
            return Err(Failure::Io(format!("{}: empty input file", path.display())));
        }
        let parsed = if path.extension().is_some_and(|x| x == "json") {
            io::parse_matrix_json_with_tol::<f64>(&text, input.triangle_tol)
        } else {
            io::parse_lower_triangular_with_tol::<f64>(&text, input.triangle_tol)
        };
        return parsed.map_err(|e| match e {
            io::FormatError::Metric(ref m) => metric_failure(m),
            other => Failure::Io(other.to_string()),
        });
    }
    if let Some(path) = &input.cloud {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        if text.trim().is_empty() {
            return Err(Failure::Io(format!("{}: empty input file", path.display())));
        }
        let metric = match input.metric {
            MetricFlag::Euclidean => io::CloudMetric::Euclidean,
            MetricFlag::CircleGeodesic => io::CloudMetric::CircleGeodesic,
            MetricFlag::FlatTorus => {
                let sides = input
                    .torus_sides
                    .as_ref()
                    .ok_or_else(|| Failure::Io("--metric flat-torus needs --torus-sides".into()))?
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Failure::Io(format!("--torus-sides: {e}")))?;
                io::CloudMetric::FlatTorus { sides }
            }
        };
        return io::parse_cloud_csv::<f64>(&text, &metric).map_err(|e| match e {
            io::FormatError::Metric(ref m) => metric_failure(m),
            other => Failure::Io(other.to_string()),
        });
    }
    if let Some(spec_text) = &input.sample {
        let spec = parse_sampler_spec(spec_text, input.mode, input.seed, input.jitter)?;
        return sample(&spec)
            .map_err(|e| Failure::Check(json!({ "error": "sampler", "detail": e.to_string() })));
    }
    Err(Failure::Io(
        "no input: pass one of --matrix, --cloud, --sample".into(),
    ))
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    let space = load_space(&args.input)?;
    let text = match args.format {
        SpaceFormat::MatrixJson => io::emit_matrix_json(&space),
        SpaceFormat::MatrixTxt => io::emit_lower_triangular(&space),
        SpaceFormat::CloudCsv => io::emit_cloud_csv(&space)
            .ok_or_else(|| Failure::Io("space carries no coordinates".into()))?,
    };
    write_out(&args.out, &text)
}

fn scales_of(args: &ComplexArgs) -> Result<Scales, Failure> {
    match (&args.scales, args.rips) {
        (Some(text), None) => parse_scales(text),
        (None, Some(r)) => Scales::constant(r)
            .map_err(|e| Failure::Check(json!({ "error": "scales", "detail": e.to_string() }))),
        _ => Err(Failure::Io("pass exactly one of --scales, --rips".into())),
    }
}

fn cmd_complex(args: ComplexArgs, betti_only: bool) -> Result<(), Failure> {
    let space = load_space(&args.input)?;
    let scales = scales_of(&args)?;
    if betti_only {
        // One dimension past the cap so every reported Betti number sees
        // its killers.
        let complex = build_complex(&space, &scales, args.dim_cap + 1);
        let b = betti(&complex, args.dim_cap);
        let counts: Vec<usize> = (0..=args.dim_cap).map(|d| complex.count(d)).collect();
        let summary = json!({ "betti": b, "counts": counts });
        println!("{}", serde_json::to_string_pretty(&summary).unwrap());
        return Ok(());
    }
    let complex = build_complex(&space, &scales, args.dim_cap);
    if args.out.is_some() {
        let text = match args.format {
            ComplexFormat::Json => serde_json::to_string_pretty(&complex).unwrap(),
            ComplexFormat::Text => io::emit_complex_text(&complex),
        };
        write_out(&args.out, &text)?;
    }
    let summary = json!({
        "points": space.len(),
        "counts": complex.counts(),
        "scales": scales.prefix(),
        "dim_cap": args.dim_cap,
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn cmd_barcode(args: BarcodeArgs) -> Result<(), Failure> {
    let space = load_space(&args.input)?;
    let profile = Scales::profile(
        args.profile
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Io(format!("--profile: {e}")))?,
    )
    .map_err(|e| Failure::Check(json!({ "error": "profile", "detail": e.to_string() })))?;
    let filtration = build_filtration(&space, &profile, args.dim_cap);
    let barcode = persistence(&filtration);
    if args.ascii {
        eprint!("{}", io::barcode_ascii(&barcode, 72));
    }
    if let Some(svg_path) = &args.svg {
        write_out(&Some(svg_path.clone()), &io::barcode_svg(&barcode))?;
    }
    let text = match args.format {
        BarcodeFormat::Csv => io::barcode_csv(&barcode),
        BarcodeFormat::Svg => io::barcode_svg(&barcode),
        BarcodeFormat::Json => serde_json::to_string_pretty(&barcode).unwrap(),
    };
    write_out(&args.out, &text)
}

fn cmd_crush(args: CrushArgs) -> Result<(), Failure> {
    let space = load_space(&args.input)?;
    let scales = parse_scales(&args.scales)?;
    let outcome = if args.glued {
        let spec_text = args
            .input
            .sample
            .as_ref()
            .ok_or_else(|| Failure::Io("--glued needs --sample input".into()))?;
        let spec = parse_sampler_spec(
            spec_text,
            ModeFlag::Jitter,
            args.glued_seed,
            args.glued_jitter,
        )?;
        let copy = sample(&spec)
            .map_err(|e| Failure::Check(json!({ "error": "sampler", "detail": e.to_string() })))?;
        let pairs: Vec<(usize, usize)> = (0..space.len()).map(|i| (i, i)).collect();
        let eps = args.epsilon.unwrap_or_else(|| {
            let d = distortion(&space, &copy, &pairs);
            (d / 2.0) * 1.0001 + 1e-12
        });
        let union = glue(&space, &copy, &pairs, eps)
            .map_err(|e| Failure::Check(json!({ "error": "glue", "detail": e.to_string() })))?;
        let params = UnionCrushParams {
            k_divisor: args.k_divisor,
            alpha: None,
        };
        crushable_in_union(&union, &scales, &params)
            .map_err(|e| Failure::Check(json!({ "error": "union-crush", "detail": e.to_string() })))?
    } else {
        let strategy = match args.strategy {
            StrategyFlag::Farthest => Strategy::FarthestFirst {
                center: args.center,
            },
            StrategyFlag::Exhaustive => Strategy::ExhaustiveElementary,
        };
        greedy_crushable(&space, &scales, strategy)
    };
    let report = serde_json::to_value(&outcome).unwrap();
    if let Some(path) = &args.out {
        write_out(&Some(path.clone()), &serde_json::to_string_pretty(&report).unwrap())?;
    }
    if outcome.is_crushed() {
        if args.out.is_none() {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Ok(())
    } else {
        Err(Failure::Check(json!({ "error": "not-crushable", "report": report })))
    }
}

fn parse_centers(args: &NerveArgs, n: usize) -> Result<Vec<usize>, Failure> {
    if let Some(text) = &args.centers {
        let centers = text
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Io(format!("--centers: {e}")))?;
        return Ok(centers);
    }
    if let Some(k) = args.centers_every {
        if k == 0 {
            return Err(Failure::Io("--centers-every must be positive".into()));
        }
        return Ok((0..n).step_by(k).collect());
    }
    Err(Failure::Io("pass --centers or --centers-every".into()))
}

fn cmd_nerve_check(args: NerveArgs) -> Result<(), Failure> {
    let space = load_space(&args.input)?;
    let centers = parse_centers(&args, space.len())?;
    let cover = build_cover(&space, &centers, args.alpha)
        .map_err(|e| Failure::Check(json!({ "error": "cover", "detail": e.to_string() })))?;
    let nerve = nerve_complex(&cover, args.size_cap);
    let radii = critical_radii(&space, &centers, args.size_cap);
    let mu = mu_margin(&space, &centers, args.alpha, args.size_cap);
    let lebesgue = lebesgue_number(&space, &cover).ok();
    let mut report = json!({
        "covering": cover.covering,
        "nerve_counts": nerve.counts(),
        "nerve_betti": betti(&nerve, args.dim_cap),
        "critical_radii_max": radii.iter().map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max),
        "mu": mu,
        "lebesgue": lebesgue,
    });
    if let Some(text) = &args.scales {
        let scales = parse_scales(text)?;
        let good = good_cover_check(&space, &cover, &scales, args.dim_cap, args.size_cap);
        report["good_cover"] = serde_json::to_value(&good).unwrap();
    }
    let mut failed = false;
    if let Some(eps) = args.epsilon {
        let copy = perturbed_copy(&args, &space)?;
        let pairs: Vec<(usize, usize)> = (0..space.len()).map(|i| (i, i)).collect();
        let union = glue(&space, &copy, &pairs, eps)
            .map_err(|e| Failure::Check(json!({ "error": "glue", "detail": e.to_string() })))?;
        let traced = build_right_cover(&union, &centers, args.alpha)
            .map_err(|e| Failure::Check(json!({ "error": "cover", "detail": e.to_string() })))?;
        let iso = nerve_iso_check(&cover, &traced, args.size_cap)
            .map_err(|e| Failure::Check(json!({ "error": "iso", "detail": e.to_string() })))?;
        let inter = intersection_hausdorff(&union, &centers, args.alpha, args.size_cap);
        failed = !iso.isomorphic || !inter.mismatches.is_empty();
        report["perturbation"] = json!({
            "epsilon": eps,
            "gh_upper_bound": union.gh_upper_bound(),
            "nerve_isomorphic": iso.isomorphic,
            "first_mismatch": iso.first_mismatch,
            "max_intersection_hausdorff": inter.max_hausdorff,
            "one_sided_mismatches": inter.mismatches,
        });
    }
    let text = serde_json::to_string_pretty(&report).unwrap();
    write_out(&args.out, &text)?;
    if failed {
        Err(Failure::Check(json!({ "error": "nerve-mismatch" })))
    } else {
        Ok(())
    }
}

fn perturbed_copy(args: &NerveArgs, space: &Space) -> Result<Space, Failure> {
    let spec_text = args
        .input
        .sample
        .as_ref()
        .ok_or_else(|| Failure::Io("--epsilon comparison needs --sample input".into()))?;
    let spec = parse_sampler_spec(
        spec_text,
        ModeFlag::Jitter,
        args.perturb_seed,
        args.perturb_jitter,
    )?;
    let copy = sample(&spec)
        .map_err(|e| Failure::Check(json!({ "error": "sampler", "detail": e.to_string() })))?;
    if copy.len() != space.len() {
        return Err(Failure::Io("perturbed copy has different size".into()));
    }
    Ok(copy)
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<(), Failure> {
    let model_spec = parse_sampler_spec(&args.sample, ModeFlag::Grid, 0, 0.0)?;
    let model = sample(&model_spec)
        .map_err(|e| Failure::Check(json!({ "error": "sampler", "detail": e.to_string() })))?;
    let approx_spec = parse_sampler_spec(&args.sample, ModeFlag::Jitter, args.seed, args.jitter)?;
    let approx = sample(&approx_spec)
        .map_err(|e| Failure::Check(json!({ "error": "sampler", "detail": e.to_string() })))?;
    let pairs = nearest_point_correspondence(&model, &approx)
        .map_err(|e| Failure::Check(json!({ "error": "correspondence", "detail": e.to_string() })))?;
    let eps = args.epsilon.unwrap_or_else(|| {
        let d = distortion(&model, &approx, &pairs);
        (d / 2.0) * 1.0001 + 1e-12
    });
    let union = glue(&model, &approx, &pairs, eps)
        .map_err(|e| Failure::Check(json!({ "error": "glue", "detail": e.to_string() })))?;
    let reference = args
        .reference
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Io(format!("--reference: {e}")))?;
    let config = ReconstructConfig {
        centers: (0..model.len()).step_by(args.centers_every).collect(),
        alpha: args.alpha,
        scales: parse_scales(&args.scales)?,
        dim_cap: args.dim_cap,
        size_cap: args.size_cap,
        reference_betti: reference,
    };
    let report = run_reconstruction(&model, &union, &config)
        .map_err(|e| Failure::Check(json!({ "error": "reconstruct", "detail": e.to_string() })))?;
    let pass = report.all_pass;
    let text = serde_json::to_string_pretty(&report).unwrap();
    write_out(&args.out, &text)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Check(json!({ "error": "reconstruction-link-failed" })))
    }
}

fn cmd_counterexample(args: CounterexampleArgs) -> Result<(), Failure> {
    let check_err = |e: CounterexampleError| {
        Failure::Check(json!({ "error": "counterexample", "detail": e.to_string() }))
    };
    let scales = match &args.scales {
        Some(text) => parse_scales(text)?,
        None => default_scales(args.n, args.r1).map_err(check_err)?,
    };
    let report = counterexample_report(args.n, &scales).map_err(check_err)?;
    let text = serde_json::to_string_pretty(&report).unwrap();
    write_out(&args.out, &text)
}
