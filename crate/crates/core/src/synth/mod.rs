//! Synthetic figures with ground truth.
//!
//! A [`FigureSpec`] lists analytic curves together with the curvature bound
//! and (optionally) the separation they are claimed to satisfy. Both claims
//! are re-measured before any sampling happens. Sampling walks each curve by
//! arc length with seeded gaps in `[epsilon (1 - jitter), epsilon]`, so the
//! figure is epsilon-sampled by construction, and records which curve and
//! parameter every sample came from. The truth graph joins consecutive
//! samples of each curve.

mod curve;
mod measure;
pub mod scenes;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use curve::CurveDesc;
pub use measure::{measure_curvature, measure_separation, CurvatureMeasure, SeparationMeasure};

use crate::error::{Error, Result};
use crate::geom::{TangentSample, UnorientedTangent, Vec2, DEFAULT_TOL};
use crate::graph::PolyGraph;

/// Figure description as read from a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSpec {
    pub curves: Vec<CurveDesc>,
    /// Declared curvature bound. Must dominate the measured curvature.
    pub kappa_max: f64,
    /// Declared separation. Must not exceed the measured separation.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Relative gap jitter in `[0, 1)`; gaps are drawn from
    /// `[epsilon (1 - jitter), epsilon]`.
    #[serde(default = "default_jitter")]
    pub jitter: f64,
    /// Noise amplitudes the figure will later receive. When nonzero, adjacent
    /// samples are kept further apart than `(1 + 2^1.5)(2 xi epsilon + zeta)`.
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub xi: f64,
}

fn default_jitter() -> f64 {
    0.5
}

impl FigureSpec {
    pub fn new(curves: Vec<CurveDesc>, kappa_max: f64) -> Self {
        FigureSpec {
            curves,
            kappa_max,
            delta: None,
            jitter: default_jitter(),
            zeta: 0.0,
            xi: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }

    pub fn with_noise_spacing(mut self, zeta: f64, xi: f64) -> Self {
        self.zeta = zeta;
        self.xi = xi;
        self
    }
}

/// Smallest allowed distance between adjacent samples under noise bounds
/// `zeta` and `xi`.
pub fn min_adjacent_spacing(epsilon: f64, zeta: f64, xi: f64) -> f64 {
    (1.0 + 2f64.powf(1.5)) * (2.0 * xi * epsilon + zeta)
}

/// Verified curvature and separation of a figure spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureMetrics {
    pub kappa_max: f64,
    pub curvature: CurvatureMeasure,
    pub separation: SeparationMeasure,
}

impl FigureMetrics {
    /// The declared separation if there is one, otherwise the measured one.
    pub fn delta(&self, spec: &FigureSpec) -> Option<f64> {
        spec.delta.or(self.separation.delta)
    }
}

/// Re-measures curvature and separation and checks them against the
/// declared values.
pub fn measure_figure(spec: &FigureSpec) -> Result<FigureMetrics> {
    if spec.curves.is_empty() {
        return Err(Error::Figure("figure has no curves".into()));
    }
    for c in &spec.curves {
        c.check()?;
    }
    if !(spec.kappa_max > 0.0 && spec.kappa_max.is_finite()) {
        return Err(Error::Figure(format!("kappa_max must be > 0, got {}", spec.kappa_max)));
    }
    let curvature = measure_curvature(&spec.curves);
    let slack = curvature.resolution.max(DEFAULT_TOL);
    if curvature.exact > spec.kappa_max || curvature.measured > spec.kappa_max + slack {
        return Err(Error::Figure(format!(
            "declared kappa_max {} is below the measured curvature {} (resolution {:e})",
            spec.kappa_max, curvature.measured, curvature.resolution
        )));
    }

    let min_len = spec.curves.iter().map(CurveDesc::length).fold(f64::INFINITY, f64::min);
    let mut h = (min_len / 32.0).min(0.125 / spec.kappa_max);
    if let Some(d) = spec.delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Figure(format!("declared delta must be > 0, got {d}")));
        }
        h = h.min(d / 4.0);
    }
    let separation = measure_separation(&spec.curves, spec.kappa_max, h);
    if let Some(d) = spec.delta {
        let measured = separation.delta.unwrap_or(f64::INFINITY);
        if d > measured + DEFAULT_TOL {
            return Err(Error::Figure(format!(
                "declared delta {d} exceeds the measured separation {measured} (resolution {:e})",
                separation.resolution
            )));
        }
    }
    Ok(FigureMetrics {
        kappa_max: spec.kappa_max,
        curvature,
        separation,
    })
}

/// Where a sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Provenance {
    Curve { curve: usize, param: f64 },
    Spurious,
}

impl Provenance {
    pub fn curve(&self) -> Option<usize> {
        match *self {
            Provenance::Curve { curve, .. } => Some(curve),
            Provenance::Spurious => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFigure {
    pub curves: Vec<CurveDesc>,
    /// Curvature bound the figure was verified against.
    pub kappa_max: f64,
    /// Largest measured curvature.
    pub kappa_max_actual: f64,
    /// Measured separation, `None` when no pair of points qualifies.
    pub min_separation_actual: Option<f64>,
    pub separation_resolution: f64,
    /// Separation as declared in the spec, if any.
    pub declared_delta: Option<f64>,
    pub epsilon: f64,
    /// Noise amplitudes applied so far.
    pub zeta: f64,
    pub xi: f64,
    pub samples: Vec<TangentSample>,
    pub provenance: Vec<Provenance>,
    pub truth: PolyGraph,
    /// Largest arc-length gap between consecutive samples of a curve.
    pub max_arc_gap: f64,
    /// Smallest distance between adjacent samples before noise.
    pub min_adjacent_distance: f64,
}

impl SyntheticFigure {
    /// The separation used for validation: declared if present, else measured.
    pub fn delta(&self) -> Option<f64> {
        self.declared_delta.or(self.min_separation_actual)
    }

    pub fn true_sample_count(&self) -> usize {
        self.provenance.iter().filter(|p| p.curve().is_some()).count()
    }

    pub fn spurious_count(&self) -> usize {
        self.samples.len() - self.true_sample_count()
    }

    /// Axis-aligned bounds of all curves.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in &self.curves {
            let (a, b) = c.bounds();
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        (lo, hi)
    }
}

/// Measures the spec, then samples it.
pub fn sample_figure(spec: &FigureSpec, epsilon: f64, seed: u64) -> Result<SyntheticFigure> {
    let metrics = measure_figure(spec)?;
    sample_measured(spec, &metrics, epsilon, seed)
}

/// Samples a spec whose metrics are already known (from [`measure_figure`]).
pub fn sample_measured(spec: &FigureSpec, metrics: &FigureMetrics, epsilon: f64, seed: u64) -> Result<SyntheticFigure> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParams(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(0.0..1.0).contains(&spec.jitter) {
        return Err(Error::InvalidParams(format!("jitter must lie in [0, 1), got {}", spec.jitter)));
    }
    if spec.zeta < 0.0 || spec.xi < 0.0 {
        return Err(Error::InvalidParams("noise amplitudes must be >= 0".into()));
    }
    let spacing = min_adjacent_spacing(epsilon, spec.zeta, spec.xi);
    let lo_gap = if spacing > 0.0 {
        (epsilon * (1.0 - spec.jitter)).max(1.05 * spacing)
    } else {
        epsilon * (1.0 - spec.jitter)
    };
    if lo_gap > epsilon {
        return Err(Error::Figure(format!(
            "minimum adjacent spacing {spacing} leaves no room below epsilon {epsilon}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut provenance = Vec::new();
    let mut edges = Vec::new();
    let mut max_arc_gap: f64 = 0.0;
    let mut min_adjacent = f64::INFINITY;

    for (ci, c) in spec.curves.iter().enumerate() {
        let len = c.length();
        let closed = c.is_closed();
        let gaps = draw_gaps(len, lo_gap, epsilon, closed, &mut rng)?;
        let start = if closed { rng.random_range(0.0..len) } else { 0.0 };
        let first = samples.len();
        let count = if closed { gaps.len() } else { gaps.len() + 1 };
        let mut s = start;
        let mut params = Vec::with_capacity(count);
        for k in 0..count {
            params.push(if !closed && k == count - 1 { len } else { s });
            if k < gaps.len() {
                s += gaps[k];
            }
        }
        for (k, &t) in params.iter().enumerate() {
            let (pos, tan) = c.eval(t);
            let id = samples.len();
            samples.push(TangentSample::new(id, pos, UnorientedTangent::from_vec(tan)?));
            provenance.push(Provenance::Curve {
                curve: ci,
                param: if closed { t.rem_euclid(len) } else { t },
            });
            if k > 0 {
                edges.push((id - 1, id));
            }
        }
        if closed {
            edges.push((first, first + count - 1));
        }
        let mut pairs: Vec<(usize, usize)> = (first..first + count - 1).map(|i| (i, i + 1)).collect();
        if closed {
            pairs.push((first + count - 1, first));
        }
        for (i, j) in pairs {
            let (Provenance::Curve { param: a, .. }, Provenance::Curve { param: b, .. }) = (provenance[i], provenance[j])
            else {
                unreachable!()
            };
            max_arc_gap = max_arc_gap.max(c.arc_distance(a, b));
            min_adjacent = min_adjacent.min(samples[i].pos.distance(samples[j].pos));
        }
    }

    if max_arc_gap > epsilon * (1.0 + 1e-12) {
        return Err(Error::Invariant(format!("arc gap {max_arc_gap} exceeds epsilon {epsilon}")));
    }
    if spacing > 0.0 && min_adjacent <= spacing {
        return Err(Error::Figure(format!(
            "adjacent samples {min_adjacent} apart, need more than {spacing}; curvature too high for this epsilon"
        )));
    }

    let truth = PolyGraph::from_edges(samples.len(), edges)?;
    Ok(SyntheticFigure {
        curves: spec.curves.clone(),
        kappa_max: spec.kappa_max,
        kappa_max_actual: metrics.curvature.measured.max(metrics.curvature.exact),
        min_separation_actual: metrics.separation.delta,
        separation_resolution: metrics.separation.resolution,
        declared_delta: spec.delta,
        epsilon,
        zeta: 0.0,
        xi: 0.0,
        samples,
        provenance,
        truth,
        max_arc_gap,
        min_adjacent_distance: min_adjacent,
    })
}

/// Gap lengths in `[lo, hi]` summing to `len`: one per sample on a closed
/// curve, one fewer on an open one.
fn draw_gaps(len: f64, lo: f64, hi: f64, closed: bool, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let min_gaps: usize = if closed { 3 } else { 1 };
    let fewest = ((len / hi - 1e-9).ceil() as usize).max(min_gaps);
    let most = (len / lo + 1e-9).floor() as usize;
    if fewest > most || hi - lo <= 1e-12 * hi {
        // No jitter room: equal gaps, as long as they stay within bounds.
        let g = fewest;
        let gap = len / g as f64;
        if gap > hi * (1.0 + 1e-12) {
            return Err(Error::Invariant(format!("cannot split length {len} into gaps <= {hi}")));
        }
        return Ok(vec![gap; g]);
    }
    let target = (2.0 * len / (lo + hi)).round() as usize;
    let g = target.clamp(fewest, most);
    let mut gaps: Vec<f64> = (0..g).map(|_| rng.random_range(lo..=hi)).collect();
    let sum: f64 = gaps.iter().sum();
    if sum > len {
        let room: f64 = gaps.iter().map(|x| x - lo).sum();
        let excess = sum - len;
        for x in &mut gaps {
            *x -= excess * (*x - lo) / room;
        }
    } else if sum < len {
        let room: f64 = gaps.iter().map(|x| hi - x).sum();
        let deficit = len - sum;
        for x in &mut gaps {
            *x += deficit * (hi - *x) / room;
        }
    }
    for x in &mut gaps {
        *x = x.clamp(lo, hi);
    }
    Ok(gaps)
}

/// Displaces every position uniformly within a disk of radius `zeta` and
/// rotates every tangent by a uniform angle in `[-xi, xi]`. Truth is kept.
pub fn inject_noise(fig: &SyntheticFigure, zeta: f64, xi: f64, seed: u64) -> Result<SyntheticFigure> {
    if !(zeta >= 0.0 && xi >= 0.0 && zeta.is_finite() && xi.is_finite()) {
        return Err(Error::InvalidParams(format!("noise amplitudes must be >= 0, got {zeta}, {xi}")));
    }
    let mut out = fig.clone();
    out.zeta = fig.zeta + zeta;
    out.xi = fig.xi + xi;
    if zeta == 0.0 && xi == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in &mut out.samples {
        let r = zeta * rng.random::<f64>().sqrt();
        let theta = rng.random_range(0.0..TAU);
        let turn = if xi > 0.0 { rng.random_range(-xi..=xi) } else { 0.0 };
        if r > 0.0 {
            s.pos = s.pos + Vec2::from_angle(theta) * r;
        }
        s.tangent = s.tangent.rotated(turn);
    }
    Ok(out)
}

/// Appends `count` samples uniform in the box `(min, max)` with tangent
/// angles uniform in `[0, pi)`, marked spurious.
pub fn inject_spurious(fig: &SyntheticFigure, count: usize, bbox: (Vec2, Vec2), seed: u64) -> Result<SyntheticFigure> {
    let (lo, hi) = bbox;
    if !(lo.is_finite() && hi.is_finite() && lo.x <= hi.x && lo.y <= hi.y) {
        return Err(Error::InvalidParams(format!("bad spurious bounding box {bbox:?}")));
    }
    let mut out = fig.clone();
    if count == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let x = if hi.x > lo.x { rng.random_range(lo.x..hi.x) } else { lo.x };
        let y = if hi.y > lo.y { rng.random_range(lo.y..hi.y) } else { lo.y };
        let angle = rng.random_range(0.0..PI);
        let id = out.samples.len();
        out.samples.push(TangentSample::new(id, Vec2::new(x, y), UnorientedTangent::from_angle(angle)));
        out.provenance.push(Provenance::Spurious);
    }
    out.truth = PolyGraph::from_edges(out.samples.len(), fig.truth.edges())?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveAccuracy {
    pub curve: usize,
    pub true_edges: usize,
    pub recovered: usize,
    /// Extra edges with both ends on this curve.
    pub extra: usize,
}

/// Set difference between a reconstruction and the truth graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthDiff {
    pub missing: Vec<(usize, usize)>,
    pub extra: Vec<(usize, usize)>,
    /// Edges joining samples of two different curves.
    pub cross_curve: usize,
    /// Edges with a spurious endpoint.
    pub spurious_edges: usize,
    /// Same-curve edges spanning more than a quarter turn of arc.
    pub far_same_curve: usize,
    pub per_curve: Vec<CurveAccuracy>,
}

impl TruthDiff {
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn compare_to_truth(result: &PolyGraph, fig: &SyntheticFigure) -> Result<TruthDiff> {
    if result.vertex_count() != fig.samples.len() {
        return Err(Error::InvalidParams(format!(
            "graph has {} vertices, figure has {} samples",
            result.vertex_count(),
            fig.samples.len()
        )));
    }
    let truth: &BTreeSet<(usize, usize)> = fig.truth.edge_set();
    let got = result.edge_set();
    let missing: Vec<_> = truth.difference(got).copied().collect();
    let extra: Vec<_> = got.difference(truth).copied().collect();

    let arc_threshold = FRAC_PI_2 / fig.kappa_max;
    let (mut cross_curve, mut spurious_edges, mut far_same_curve) = (0, 0, 0);
    for &(i, j) in got {
        match (fig.provenance[i], fig.provenance[j]) {
            (Provenance::Curve { curve: a, param: s }, Provenance::Curve { curve: b, param: t }) => {
                if a != b {
                    cross_curve += 1;
                } else if fig.curves[a].arc_distance(s, t) > arc_threshold {
                    far_same_curve += 1;
                }
            }
            _ => spurious_edges += 1,
        }
    }

    let mut per_curve: Vec<CurveAccuracy> = (0..fig.curves.len())
        .map(|curve| CurveAccuracy {
            curve,
            true_edges: 0,
            recovered: 0,
            extra: 0,
        })
        .collect();
    for &(i, j) in truth {
        if let Some(c) = fig.provenance[i].curve() {
            per_curve[c].true_edges += 1;
            if got.contains(&(i, j)) {
                per_curve[c].recovered += 1;
            }
        }
    }
    for &(i, j) in &extra {
        if let (Some(a), Some(b)) = (fig.provenance[i].curve(), fig.provenance[j].curve()) {
            if a == b {
                per_curve[a].extra += 1;
            }
        }
    }

    Ok(TruthDiff {
        missing,
        extra,
        cross_curve,
        spurious_edges,
        far_same_curve,
        per_curve,
    })
}
