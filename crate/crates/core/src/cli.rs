//! Command-line front end.
//!
//! Exit codes: 0 success, 1 strict validation failure, 2 input, format or
//! argument error, 3 internal invariant breach.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{phase_sweep, scaling, SweepConfig};
use crate::denoise::{denoise_candidate, DenoiseParams};
use crate::error::{Error, Result};
use crate::geom::TangentSample;
use crate::graph::{build_candidate_graph, select_nearest, BruteForce, PairSource, PolyGraph};
use crate::io::{
    self, Algorithm, EdgeDiff, Format, GraphSummary, PairSourceKind, ReconstructionParams, RunReport, SampleFile,
    SynthConfig,
};
use crate::render::{render_svg, Layers, RenderOptions};
use crate::spatial::{build_quadtree, estimate_rho_max, QuadTreePairs, TreeStats, DEFAULT_MAX_DEPTH};

/// Environment variable naming the directory for outputs whose path is not
/// given explicitly.
pub const OUT_DIR_ENV: &str = "TANGENT_RECON_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "tangent-recon", version, about = "Reconstruct curves from points with unoriented tangents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct a polygonalization from a sample file.
    Reconstruct(ReconstructArgs),
    /// Generate a synthetic figure from a TOML spec.
    Synth(SynthArgs),
    /// Run the sampling-rate sweep and the size scaling benchmark.
    Bench(BenchArgs),
    /// Draw samples and, optionally, a graph as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    NoiseFree,
    Noisy,
    Denoise,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairSourceArg {
    Brute,
    Quadtree,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to the input file extension.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "noise-free")]
    mode: ModeArg,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long, default_value_t = 1.1)]
    alpha: f64,
    #[arg(long, default_value_t = 4)]
    sweeps: usize,
    #[arg(long)]
    rho_max: Option<f64>,
    #[arg(long, default_value_t = crate::geom::DEFAULT_TOL)]
    tol: f64,
    /// Fail with exit code 1 when a required inequality does not hold.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value = "quadtree")]
    pair_source: PairSourceArg,
    /// Whether every true curve is closed, enabling leaf pruning.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    closed: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Declared curve separation.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    out_graph: Option<PathBuf>,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// TOML figure spec.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Overrides the seed in the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    points: usize,
    #[arg(long, default_value_t = 1e-4)]
    delta_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    delta_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample counts for the scaling run.
    #[arg(long, value_delimiter = ',', default_value = "1000,4000,16000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Directory for sweep.csv and scaling.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Graph JSON as written by `reconstruct`.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    no_ticks: bool,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Validation { .. } => 1,
        Error::Invariant(_) | Error::DepthExceeded { .. } => 3,
        _ => 2,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Reconstruct(a) => reconstruct(&a),
        Command::Synth(a) => synth(&a),
        Command::Bench(a) => bench(&a),
        Command::Render(a) => render(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn out_path(explicit: &Option<PathBuf>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
            dir.join(default_name)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn require(value: Option<f64>, name: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidParams(format!("--{name} is required (flag or params block)")))
}

/// Result of running a reconstruction end to end.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub candidate: PolyGraph,
    pub result: PolyGraph,
    pub tree: Option<TreeStats>,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Builds the candidate graph with the configured pair source and runs the
/// configured selection.
pub fn run_pipeline(samples: &[TangentSample], params: &ReconstructionParams) -> Result<PipelineOutput> {
    let zp = params.zone()?;
    let mode = params.candidate_mode();
    let mut timings_ms = BTreeMap::new();
    let radius = mode.neighbor_radius(&zp);

    let start = Instant::now();
    let (pairs, tree): (Box<dyn PairSource>, Option<TreeStats>) = match params.pair_source {
        PairSourceKind::Brute => (Box::new(BruteForce), None),
        PairSourceKind::Quadtree => {
            let rho = params.rho_max.unwrap_or_else(|| estimate_rho_max(samples, radius));
            let stats = if samples.is_empty() {
                None
            } else {
                Some(build_quadtree(samples, rho, radius, DEFAULT_MAX_DEPTH)?.stats())
            };
            (Box::new(QuadTreePairs::with_rho_max(Some(rho))), stats)
        }
    };
    let candidate = build_candidate_graph(samples, &zp, mode, pairs.as_ref())?;
    timings_ms.insert("candidate".to_string(), start.elapsed().as_secs_f64() * 1e3);

    let start = Instant::now();
    let result = match params.algorithm {
        Algorithm::NoiseFree | Algorithm::Noisy => select_nearest(&candidate, samples, zp.tol).0,
        Algorithm::Denoise => {
            let dp = DenoiseParams::new(params.alpha, params.sweeps, params.closed_figures)?;
            denoise_candidate(&candidate, samples, zp.tol, &dp)
        }
    };
    timings_ms.insert("select".to_string(), start.elapsed().as_secs_f64() * 1e3);

    if !result.is_subgraph_of(&candidate) {
        return Err(Error::Invariant("selected edges outside the candidate graph".into()));
    }
    Ok(PipelineOutput {
        candidate,
        result,
        tree,
        timings_ms,
    })
}

fn reconstruct(a: &ReconstructArgs) -> Result<()> {
    let total = Instant::now();
    let format = a.format.map_or_else(|| Format::from_path(&a.input), Format::from);
    let start = Instant::now();
    let file = io::read_sample_file(&a.input, format)?;
    let parse_ms = start.elapsed().as_secs_f64() * 1e3;
    let block = file.params.unwrap_or_default();

    let mut params = ReconstructionParams::new(
        require(a.kappa.or(block.kappa_max), "kappa")?,
        require(a.epsilon.or(block.epsilon), "epsilon")?,
    );
    params.zeta = a.zeta.or(block.zeta).unwrap_or(0.0);
    params.xi = a.xi.or(block.xi).unwrap_or(0.0);
    params.alpha = a.alpha;
    params.sweeps = a.sweeps;
    params.rho_max = a.rho_max;
    params.tol = a.tol;
    params.algorithm = match a.mode {
        ModeArg::NoiseFree => Algorithm::NoiseFree,
        ModeArg::Noisy => Algorithm::Noisy,
        ModeArg::Denoise => Algorithm::Denoise,
    };
    params.strict_validation = a.strict;
    params.pair_source = match a.pair_source {
        PairSourceArg::Brute => PairSourceKind::Brute,
        PairSourceArg::Quadtree => PairSourceKind::Quadtree,
    };
    params.closed_figures = a.closed;
    params.seed = a.seed;
    params.delta = a.delta.or(block.delta);
    params.zone()?;

    let min_adjacent = file.truth.as_ref().and_then(|t| {
        t.edges()
            .map(|(i, j)| file.samples[i].pos.distance(file.samples[j].pos))
            .min_by(f64::total_cmp)
    });
    // Under noise the stored positions are perturbed, so adjacent spacing
    // measured on them is not the quantity the bound speaks about.
    let min_adjacent = if params.zeta == 0.0 { min_adjacent } else { None };
    let checks = io::validate(&params, min_adjacent);
    let failures: Vec<String> = io::strict_failures(&checks).iter().map(|c| c.inequality.clone()).collect();

    let mut report = RunReport {
        samples: file.samples.len(),
        spurious_declared: file.spurious.len(),
        params,
        validation: checks.clone(),
        strict_failures: failures,
        graph: GraphSummary::new(&PolyGraph::new(file.samples.len()), &PolyGraph::new(file.samples.len())),
        tree: None,
        timings_ms: BTreeMap::from([("parse".to_string(), parse_ms)]),
        truth: None,
    };
    if params.strict_validation {
        if let Err(e) = io::enforce(&checks) {
            report.timings_ms.insert("total".into(), total.elapsed().as_secs_f64() * 1e3);
            write_file(&out_path(&a.out_report, "report.json"), &report.to_json()?)?;
            return Err(e);
        }
    }

    let out = run_pipeline(&file.samples, &params)?;
    report.graph = GraphSummary::new(&out.result, &out.candidate);
    report.tree = out.tree;
    report.timings_ms.extend(out.timings_ms);
    report.truth = file.truth.as_ref().map(|t| EdgeDiff::new(&out.result, t, &file.spurious));
    report.timings_ms.insert("total".into(), total.elapsed().as_secs_f64() * 1e3);

    write_file(&out_path(&a.out_graph, "graph.json"), &io::graph_to_json(&file.samples, &out.result)?)?;
    write_file(&out_path(&a.out_report, "report.json"), &report.to_json()?)?;
    if let Some(svg) = &a.out_svg {
        let layers = Layers {
            graph: Some(&out.result),
            truth: file.truth.as_ref(),
            spurious: &file.spurious,
        };
        write_file(svg, &render_svg(&file.samples, layers, RenderOptions::default()))?;
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let mut cfg = SynthConfig::from_toml(&std::fs::read_to_string(&a.input)?)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let fig = cfg.build()?;
    let file: SampleFile = io::figure_to_file(&fig);
    let format = Format::from(a.format);
    let text = match format {
        Format::Json => io::write_json(&file)?,
        Format::Csv => io::write_csv(&file.samples),
    };
    let name = match format {
        Format::Json => "samples.json",
        Format::Csv => "samples.csv",
    };
    write_file(&out_path(&a.out, name), &text)?;
    if let Some(svg) = &a.out_svg {
        let layers = Layers {
            graph: Some(&fig.truth),
            truth: None,
            spurious: &file.spurious,
        };
        write_file(svg, &render_svg(&fig.samples, layers, RenderOptions::default()))?;
    }
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<()> {
    if a.points == 0 || a.trials == 0 || !(a.delta_min > 0.0 && a.delta_max >= a.delta_min) {
        return Err(Error::InvalidParams("bench needs points, trials > 0 and 0 < delta-min <= delta-max".into()));
    }
    let cfg = SweepConfig::log_spaced(a.delta_min, a.delta_max, a.points, a.trials, a.seed);
    let table = phase_sweep(&cfg)?;
    let dir = out_path(&a.out, "");
    write_file(&dir.join("sweep.csv"), &table.to_csv())?;
    let rows = scaling(&a.sizes, a.repeats, a.seed)?;
    let mut csv = String::from("samples,millis\n");
    for r in &rows {
        csv.push_str(&format!("{},{}\n", r.samples, r.millis));
    }
    write_file(&dir.join("scaling.csv"), &csv)?;
    let summary = serde_json::json!({
        "slope_tangent": table.slope_tangent,
        "slope_baseline": table.slope_baseline,
        "sweep": table.rows,
        "scaling": rows,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn render(a: &RenderArgs) -> Result<()> {
    let format = a.format.map_or_else(|| Format::from_path(&a.input), Format::from);
    let file = io::read_sample_file(&a.input, format)?;
    let graph = match &a.graph {
        Some(p) => {
            let (samples, g) = io::graph_from_json(&std::fs::read_to_string(p)?)?;
            if samples.len() != file.samples.len() {
                return Err(Error::InvalidParams(format!(
                    "graph has {} vertices, sample file has {}",
                    samples.len(),
                    file.samples.len()
                )));
            }
            Some(g)
        }
        None => None,
    };
    let layers = Layers {
        graph: graph.as_ref(),
        truth: file.truth.as_ref(),
        spurious: &file.spurious,
    };
    let opts = RenderOptions {
        tangent_ticks: !a.no_ticks,
        ..Default::default()
    };
    write_file(&out_path(&a.out_svg, "figure.svg"), &render_svg(&file.samples, layers, opts))
}
