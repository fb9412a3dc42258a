//! Sample and graph file formats, run parameters, validation and reports.
//!
//! Samples are read from CSV rows `x,y,tx,ty` (header optional, `#` starts a
//! comment) or from a JSON document `{"params": {...}, "samples": [{"x", "y",
//! "tx", "ty"}], "truth": [[i, j]], "spurious": [k]}` where everything but
//! `samples` is optional. Row order defines sample ids.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{TangentSample, UnorientedTangent, Vec2, ZoneParams, DEFAULT_TOL};
use crate::graph::{Mode, PolyGraph};
use crate::spatial::TreeStats;
use crate::synth::{min_adjacent_spacing, FigureSpec, Provenance, SyntheticFigure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Optional parameter block carried by JSON sample files.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamsBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct SampleRecord {
    x: f64,
    y: f64,
    tx: f64,
    ty: f64,
}

impl From<&TangentSample> for SampleRecord {
    fn from(s: &TangentSample) -> Self {
        SampleRecord {
            x: s.pos.x,
            y: s.pos.y,
            tx: s.tangent.dir().x,
            ty: s.tangent.dir().y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SampleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<ParamsBlock>,
    samples: Vec<SampleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truth: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    spurious: Vec<usize>,
}

/// Parsed contents of a sample file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleFile {
    pub params: Option<ParamsBlock>,
    pub samples: Vec<TangentSample>,
    pub truth: Option<PolyGraph>,
    /// Ids of samples known to be spurious.
    pub spurious: Vec<usize>,
}

fn sample_at(id: usize, x: f64, y: f64, tx: f64, ty: f64) -> Result<TangentSample> {
    let pos = Vec2::try_new(x, y)?;
    Ok(TangentSample::new(id, pos, UnorientedTangent::new(tx, ty)?))
}

pub fn parse_csv(text: &str) -> Result<Vec<TangentSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut samples = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if first {
            first = false;
            let looks_numeric = record.get(0).is_some_and(|f| f.parse::<f64>().is_ok());
            if !looks_numeric {
                continue;
            }
        }
        if record.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields x,y,tx,ty, found {}", record.len()),
            });
        }
        let mut v = [0.0; 4];
        for (k, field) in record.iter().enumerate() {
            v[k] = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("field {} is not a number: {field:?}", k + 1),
            })?;
        }
        let s = sample_at(samples.len(), v[0], v[1], v[2], v[3]).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        samples.push(s);
    }
    Ok(samples)
}

pub fn parse_json(text: &str) -> Result<SampleFile> {
    let doc: SampleDoc = serde_json::from_str(text)?;
    let mut samples = Vec::with_capacity(doc.samples.len());
    for (i, r) in doc.samples.iter().enumerate() {
        let s = sample_at(i, r.x, r.y, r.tx, r.ty).map_err(|e| Error::InvalidSample {
            index: i,
            message: e.to_string(),
        })?;
        samples.push(s);
    }
    let truth = match doc.truth {
        Some(edges) => Some(PolyGraph::from_edges(samples.len(), edges.into_iter().map(|[i, j]| (i, j)))?),
        None => None,
    };
    if let Some(&bad) = doc.spurious.iter().find(|&&k| k >= samples.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            count: samples.len(),
        });
    }
    Ok(SampleFile {
        params: doc.params,
        samples,
        truth,
        spurious: doc.spurious,
    })
}

/// Reads a sample file in the given format.
pub fn read_sample_file(path: &Path, format: Format) -> Result<SampleFile> {
    let text = std::fs::read_to_string(path)?;
    match format {
        Format::Csv => Ok(SampleFile {
            samples: parse_csv(&text)?,
            ..Default::default()
        }),
        Format::Json => parse_json(&text),
    }
}

/// Just the samples of a file.
pub fn parse_samples(path: &Path, format: Format) -> Result<Vec<TangentSample>> {
    read_sample_file(path, format).map(|f| f.samples)
}

pub fn write_csv(samples: &[TangentSample]) -> String {
    let mut out = String::from("x,y,tx,ty\n");
    for s in samples {
        let r = SampleRecord::from(s);
        out.push_str(&format!("{},{},{},{}\n", r.x, r.y, r.tx, r.ty));
    }
    out
}

pub fn write_json(file: &SampleFile) -> Result<String> {
    let doc = SampleDoc {
        params: file.params,
        samples: file.samples.iter().map(SampleRecord::from).collect(),
        truth: file.truth.as_ref().map(|g| g.edges().map(|(i, j)| [i, j]).collect()),
        spurious: file.spurious.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// A synthetic figure as a sample file, with its parameters and truth.
pub fn figure_to_file(fig: &SyntheticFigure) -> SampleFile {
    SampleFile {
        params: Some(ParamsBlock {
            kappa_max: Some(fig.kappa_max),
            epsilon: Some(fig.epsilon),
            zeta: Some(fig.zeta),
            xi: Some(fig.xi),
            delta: fig.delta(),
        }),
        samples: fig.samples.clone(),
        truth: Some(fig.truth.clone()),
        spurious: fig
            .provenance
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Provenance::Spurious))
            .map(|(i, _)| i)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct VertexRecord {
    id: usize,
    x: f64,
    y: f64,
    tx: f64,
    ty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexRecord>,
    edges: Vec<[usize; 2]>,
}

/// Graph JSON: vertices with positions and tangents, edges as sorted
/// `[i, j]` pairs with `i < j`.
pub fn graph_to_json(samples: &[TangentSample], graph: &PolyGraph) -> Result<String> {
    let doc = GraphDoc {
        vertices: samples
            .iter()
            .enumerate()
            .map(|(id, s)| VertexRecord {
                id,
                x: s.pos.x,
                y: s.pos.y,
                tx: s.tangent.dir().x,
                ty: s.tangent.dir().y,
            })
            .collect(),
        edges: graph.edges().map(|(i, j)| [i, j]).collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn graph_from_json(text: &str) -> Result<(Vec<TangentSample>, PolyGraph)> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut samples = Vec::with_capacity(doc.vertices.len());
    for (i, v) in doc.vertices.iter().enumerate() {
        if v.id != i {
            return Err(Error::InvalidSample {
                index: i,
                message: format!("vertex id {} out of order", v.id),
            });
        }
        samples.push(sample_at(i, v.x, v.y, v.tx, v.ty).map_err(|e| Error::InvalidSample {
            index: i,
            message: e.to_string(),
        })?);
    }
    let graph = PolyGraph::from_edges(samples.len(), doc.edges.into_iter().map(|[i, j]| (i, j)))?;
    Ok((samples, graph))
}

/// Which reconstruction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    NoiseFree,
    Noisy,
    /// Almost-nearest selection with leaf pruning. Uses the noisy candidate
    /// test when either noise amplitude is nonzero.
    Denoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSourceKind {
    Brute,
    Quadtree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionParams {
    pub kappa_max: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub xi: f64,
    pub alpha: f64,
    pub sweeps: usize,
    pub rho_max: Option<f64>,
    pub tol: f64,
    pub algorithm: Algorithm,
    pub strict_validation: bool,
    pub pair_source: PairSourceKind,
    pub closed_figures: bool,
    pub seed: u64,
    /// Declared separation; the only way validation learns it.
    pub delta: Option<f64>,
}

impl ReconstructionParams {
    pub fn new(kappa_max: f64, epsilon: f64) -> Self {
        ReconstructionParams {
            kappa_max,
            epsilon,
            zeta: 0.0,
            xi: 0.0,
            alpha: 1.1,
            sweeps: 4,
            rho_max: None,
            tol: DEFAULT_TOL,
            algorithm: Algorithm::NoiseFree,
            strict_validation: false,
            pair_source: PairSourceKind::Quadtree,
            closed_figures: true,
            seed: 0,
            delta: None,
        }
    }

    pub fn zone(&self) -> Result<ZoneParams> {
        ZoneParams::new(self.kappa_max, self.epsilon, self.zeta, self.xi, self.tol)
    }

    /// Membership test used for the candidate graph.
    pub fn candidate_mode(&self) -> Mode {
        match self.algorithm {
            Algorithm::NoiseFree => Mode::NoiseFree,
            Algorithm::Noisy => Mode::Noisy,
            Algorithm::Denoise if self.zeta > 0.0 || self.xi > 0.0 => Mode::Noisy,
            Algorithm::Denoise => Mode::NoiseFree,
        }
    }
}

pub const EPSILON_KAPPA_BOUND: &str = "epsilon * kappa_max < 1/sqrt(2)";
pub const SEPARATION_NOISE_FREE: &str = "delta > 2 kappa_max epsilon^2";
pub const SEPARATION_NOISY: &str = "delta > 4 zeta + 4 epsilon xi + 2.1 kappa_max epsilon^2";
pub const SEPARATION_NOISY_INPUT: &str = "delta > 4 zeta + 2 epsilon xi + 2.1 kappa_max epsilon^2";
pub const ADJACENT_SPACING: &str = "adjacent sample distance > (1 + 2^(3/2)) (2 xi epsilon + zeta)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    NotEvaluated,
}

/// One inequality `lhs < rhs` (or `lhs > rhs` as named) with both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub inequality: String,
    /// Left-hand side as written in `inequality`, `None` when unknown.
    pub lhs: Option<f64>,
    pub rhs: f64,
    pub verdict: Verdict,
    /// Whether strict validation requires this one to hold.
    pub required: bool,
}

impl InequalityCheck {
    fn less(name: &str, lhs: f64, rhs: f64, tol: f64, required: bool) -> Self {
        InequalityCheck {
            inequality: name.into(),
            lhs: Some(lhs),
            rhs,
            verdict: if lhs + tol < rhs { Verdict::Holds } else { Verdict::Violated },
            required,
        }
    }

    fn greater(name: &str, lhs: Option<f64>, rhs: f64, tol: f64, required: bool) -> Self {
        let verdict = match lhs {
            Some(l) if l > rhs + tol => Verdict::Holds,
            Some(_) => Verdict::Violated,
            None => Verdict::NotEvaluated,
        };
        InequalityCheck {
            inequality: name.into(),
            lhs,
            rhs,
            verdict,
            required,
        }
    }

    /// Fails strict validation: required and either violated or, for the
    /// noisy separation bound, impossible to evaluate.
    pub fn fails_strict(&self) -> bool {
        self.required
            && match self.verdict {
                Verdict::Violated => true,
                Verdict::NotEvaluated => self.inequality == SEPARATION_NOISY,
                Verdict::Holds => false,
            }
    }
}

/// Evaluates every inequality. Strict inequalities must hold with margin
/// `tol`, so boundary cases fail. `min_adjacent` is the smallest distance
/// between truly adjacent samples, when known.
pub fn validate(params: &ReconstructionParams, min_adjacent: Option<f64>) -> Vec<InequalityCheck> {
    let (k, e, z, x, t) = (params.kappa_max, params.epsilon, params.zeta, params.xi, params.tol);
    let noisy = params.candidate_mode() == Mode::Noisy;
    vec![
        InequalityCheck::less(EPSILON_KAPPA_BOUND, e * k, FRAC_1_SQRT_2, t, true),
        InequalityCheck::greater(SEPARATION_NOISE_FREE, params.delta, 2.0 * k * e * e, t, !noisy),
        InequalityCheck::greater(SEPARATION_NOISY, params.delta, 4.0 * z + 4.0 * e * x + 2.1 * k * e * e, t, noisy),
        InequalityCheck::greater(
            SEPARATION_NOISY_INPUT,
            params.delta,
            4.0 * z + 2.0 * e * x + 2.1 * k * e * e,
            t,
            false,
        ),
        InequalityCheck::greater(ADJACENT_SPACING, min_adjacent, min_adjacent_spacing(e, z, x), t, noisy),
    ]
}

/// Checks that fail strict validation, or an empty list.
pub fn strict_failures(checks: &[InequalityCheck]) -> Vec<&InequalityCheck> {
    checks.iter().filter(|c| c.fails_strict()).collect()
}

/// Turns the first strict failure into an error.
pub fn enforce(checks: &[InequalityCheck]) -> Result<()> {
    match strict_failures(checks).first() {
        Some(c) => Err(Error::Validation {
            inequality: c.inequality.clone(),
            lhs: c.lhs.unwrap_or(f64::NAN),
            rhs: c.rhs,
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub candidate_edges: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub leaves: usize,
    pub max_degree: usize,
}

impl GraphSummary {
    pub fn new(result: &PolyGraph, candidate: &PolyGraph) -> Self {
        let stats = result.degree_stats();
        GraphSummary {
            vertices: result.vertex_count(),
            edges: result.edge_count(),
            candidate_edges: candidate.edge_count(),
            degree_histogram: stats.histogram,
            leaves: stats.leaves,
            max_degree: stats.max_degree,
        }
    }
}

/// Everything a run reports besides the graph itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub samples: usize,
    pub spurious_declared: usize,
    pub params: ReconstructionParams,
    pub validation: Vec<InequalityCheck>,
    pub strict_failures: Vec<String>,
    pub graph: GraphSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeStats>,
    /// Wall-clock milliseconds per phase.
    pub timings_ms: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<EdgeDiff>,
}

/// Edge-set difference against a known truth graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDiff {
    pub exact: bool,
    pub missing: Vec<(usize, usize)>,
    pub extra: Vec<(usize, usize)>,
    /// Result edges with an endpoint among the declared spurious samples.
    pub spurious_edges: usize,
}

impl EdgeDiff {
    pub fn new(result: &PolyGraph, truth: &PolyGraph, spurious: &[usize]) -> Self {
        let missing: Vec<_> = truth.edge_set().difference(result.edge_set()).copied().collect();
        let extra: Vec<_> = result.edge_set().difference(truth.edge_set()).copied().collect();
        let spurious_edges = result
            .edges()
            .filter(|(i, j)| spurious.contains(i) || spurious.contains(j))
            .count();
        EdgeDiff {
            exact: missing.is_empty() && extra.is_empty(),
            missing,
            extra,
            spurious_edges,
        }
    }
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Declarative synthetic figure config (TOML).
///
/// ```toml
/// epsilon = 0.065
/// seed = 3
///
/// [figure]
/// kappa_max = 3.0
/// delta = 0.18
/// [[figure.curves]]
/// kind = "circle"
/// center = [0.0, 0.0]
/// radius = 0.5
///
/// [noise]
/// zeta = 0.001
/// xi = 0.01
///
/// [spurious]
/// count = 100
/// min = [-1.0, -1.0]
/// max = [1.0, 1.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    pub figure: FigureSpec,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub spurious: Option<SpuriousConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub zeta: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpuriousConfig {
    pub count: usize,
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl SynthConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Samples the figure, then applies noise and spurious samples. Each
    /// stage draws from its own seed derived from `seed`.
    pub fn build(&self) -> Result<SyntheticFigure> {
        let mut spec = self.figure.clone();
        if let Some(n) = self.noise {
            if spec.zeta == 0.0 && spec.xi == 0.0 {
                spec = spec.with_noise_spacing(n.zeta, n.xi);
            }
        }
        let mut fig = crate::synth::sample_figure(&spec, self.epsilon, self.seed)?;
        if let Some(n) = self.noise {
            fig = crate::synth::inject_noise(&fig, n.zeta, n.xi, self.seed.wrapping_add(1))?;
        }
        if let Some(s) = self.spurious {
            let bbox = (Vec2::new(s.min[0], s.min[1]), Vec2::new(s.max[0], s.max[1]));
            fig = crate::synth::inject_spurious(&fig, s.count, bbox, self.seed.wrapping_add(2))?;
        }
        Ok(fig)
    }
}
