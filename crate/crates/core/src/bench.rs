//! Sampling-rate phase sweep and size scaling measurements.
//!
//! The sweep finds, for each separation `delta` of two nested ovals,
//! the largest sample spacing at which reconstruction is still exact in
//! every trial. It does so for the tangent method and for a proximity-only
//! baseline that links every sample to its two Euclidean-nearest neighbors.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{TangentSample, Vec2, ZoneParams};
use crate::graph::{build_candidate_graph, polygonalize, Mode, PairSource, PolyGraph};
use crate::spatial::QuadTreePairs;
use crate::synth::{measure_figure, sample_measured, scenes, FigureMetrics, FigureSpec};

/// Links every sample to its two nearest neighbors by Euclidean distance
/// (ties by index). `cell` is the bucket size of the search grid and only
/// affects speed.
pub fn proximity_baseline(samples: &[TangentSample], cell: f64) -> PolyGraph {
    let mut g = PolyGraph::new(samples.len());
    if samples.len() < 2 {
        return g;
    }
    let key = |p: Vec2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in samples.iter().enumerate() {
        grid.entry(key(s.pos)).or_default().push(i);
    }
    let (min_key, max_key) = grid.keys().fold(((i64::MAX, i64::MAX), (i64::MIN, i64::MIN)), |(lo, hi), &(x, y)| {
        ((lo.0.min(x), lo.1.min(y)), (hi.0.max(x), hi.1.max(y)))
    });
    let max_ring = (max_key.0 - min_key.0).max(max_key.1 - min_key.1) + 1;

    for (i, s) in samples.iter().enumerate() {
        let (cx, cy) = key(s.pos);
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(3);
        for ring in 0..=max_ring {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j == i {
                            continue;
                        }
                        best.push((s.pos.distance(samples[j].pos), j));
                        best.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                        best.truncate(2);
                    }
                }
            }
            // Anything in ring r + 1 or beyond is at least r * cell away.
            if best.len() == 2 && best[1].0 <= ring as f64 * cell {
                break;
            }
        }
        for &(_, j) in &best {
            g.add_edge(i, j);
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Tangent,
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Log-space bisection steps after the bracketing phase.
    pub refine_steps: usize,
}

impl SweepConfig {
    /// `count` log-spaced separations from `lo` to `hi` inclusive.
    pub fn log_spaced(lo: f64, hi: f64, count: usize, trials: usize, seed: u64) -> Self {
        let deltas = (0..count)
            .map(|k| {
                let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            })
            .collect();
        SweepConfig {
            deltas,
            trials,
            seed,
            refine_steps: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub eps_tangent: f64,
    pub eps_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln eps` against `ln delta`.
    pub slope_tangent: f64,
    pub slope_baseline: f64,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,eps_tangent,eps_baseline\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.delta, r.eps_tangent, r.eps_baseline));
        }
        out
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn trial_seed(base: u64, cell: usize, trial: usize) -> u64 {
    base ^ (cell as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

/// Whether `method` reconstructs the figure exactly at spacing `epsilon`.
fn exact_at(method: Method, spec: &FigureSpec, metrics: &FigureMetrics, epsilon: f64, seed: u64) -> Result<bool> {
    let fig = sample_measured(spec, metrics, epsilon, seed)?;
    let graph = match method {
        Method::Tangent => {
            let zp = ZoneParams::noise_free(spec.kappa_max, epsilon)?;
            polygonalize(&fig.samples, &zp, Mode::NoiseFree, &QuadTreePairs::default())?
        }
        Method::Baseline => proximity_baseline(&fig.samples, epsilon),
    };
    Ok(graph == fig.truth)
}

/// Largest spacing, up to `cap`, at which every trial is exact. Halves from
/// `cap` until a spacing succeeds, then bisects in log space between the
/// last success and the failure above it.
pub fn critical_epsilon(
    method: Method,
    spec: &FigureSpec,
    metrics: &FigureMetrics,
    cap: f64,
    trials: &[u64],
    refine_steps: usize,
) -> Result<f64> {
    let all = |eps: f64| -> Result<bool> {
        for &seed in trials {
            if !exact_at(method, spec, metrics, eps, seed)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut ok = cap;
    let mut fail = None;
    while !all(ok)? {
        fail = Some(ok);
        ok *= 0.5;
        if ok < cap * 1e-7 {
            return Ok(0.0);
        }
    }
    let Some(mut fail) = fail else {
        return Ok(cap);
    };
    for _ in 0..refine_steps {
        let mid = (ok * fail).sqrt();
        if all(mid)? {
            ok = mid;
        } else {
            fail = mid;
        }
    }
    Ok(ok)
}

/// Runs the sweep on [`scenes::nested_ovals`]. Cells run in parallel
/// and are reassembled in grid order.
pub fn phase_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    let jobs: Vec<(usize, Method)> = (0..cfg.deltas.len())
        .flat_map(|k| [(k, Method::Tangent), (k, Method::Baseline)])
        .collect();
    let specs: Vec<FigureSpec> = cfg.deltas.iter().map(|&d| scenes::nested_ovals(d)).collect();
    let metrics: Vec<FigureMetrics> = specs.par_iter().map(measure_figure).collect::<Result<_>>()?;
    let results: Vec<f64> = jobs
        .par_iter()
        .map(|&(k, method)| {
            let spec = &specs[k];
            let cap = 0.999 / (spec.kappa_max * SQRT_2);
            let seeds: Vec<u64> = (0..cfg.trials).map(|t| trial_seed(cfg.seed, k, t)).collect();
            critical_epsilon(method, spec, &metrics[k], cap, &seeds, cfg.refine_steps)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = cfg
        .deltas
        .iter()
        .enumerate()
        .map(|(k, &delta)| SweepRow {
            delta,
            eps_tangent: results[2 * k],
            eps_baseline: results[2 * k + 1],
        })
        .collect();
    let ln_d: Vec<f64> = rows.iter().map(|r| r.delta.ln()).collect();
    let ln_t: Vec<f64> = rows.iter().map(|r| r.eps_tangent.ln()).collect();
    let ln_b: Vec<f64> = rows.iter().map(|r| r.eps_baseline.ln()).collect();
    Ok(SweepTable {
        slope_tangent: fit_slope(&ln_d, &ln_t),
        slope_baseline: fit_slope(&ln_d, &ln_b),
        rows,
    })
}

/// Radius, pitch and spacing of the scaling family.
pub const SCALING_RADIUS: f64 = 0.35;
pub const SCALING_PITCH: f64 = 1.0;
pub const SCALING_EPSILON: f64 = 0.05;

/// A grid of circles sampled at fixed density with roughly `target`
/// samples in total.
pub fn scaling_figure(target: usize, seed: u64) -> Result<Vec<TangentSample>> {
    let probe = crate::synth::sample_figure(&scenes::circle_grid(1, SCALING_RADIUS, SCALING_PITCH), SCALING_EPSILON, seed)?;
    let per_circle = probe.samples.len().max(1);
    let count = target.div_ceil(per_circle).max(1);
    let spec = scenes::circle_grid(count, SCALING_RADIUS, SCALING_PITCH);
    Ok(crate::synth::sample_figure(&spec, SCALING_EPSILON, seed)?.samples)
}

/// Fastest of `repeats` candidate-graph builds.
pub fn time_candidate_graph(
    samples: &[TangentSample],
    zp: &ZoneParams,
    pairs: &dyn PairSource,
    repeats: usize,
) -> Result<(Duration, PolyGraph)> {
    let mut best = Duration::MAX;
    let mut graph = PolyGraph::new(0);
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        graph = build_candidate_graph(samples, zp, Mode::NoiseFree, pairs)?;
        best = best.min(start.elapsed());
    }
    Ok((best, graph))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub samples: usize,
    pub millis: f64,
}

/// Quadtree candidate-graph timings for each target size.
pub fn scaling(targets: &[usize], repeats: usize, seed: u64) -> Result<Vec<ScalingRow>> {
    let kappa = 1.0 / SCALING_RADIUS;
    let zp = ZoneParams::noise_free(kappa, SCALING_EPSILON)?;
    targets
        .iter()
        .map(|&n| {
            let samples = scaling_figure(n, seed)?;
            let (t, _) = time_candidate_graph(&samples, &zp, &QuadTreePairs::default(), repeats)?;
            Ok(ScalingRow {
                samples: samples.len(),
                millis: t.as_secs_f64() * 1e3,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::UnorientedTangent;

    fn brute_two_nearest(samples: &[TangentSample]) -> PolyGraph {
        let mut g = PolyGraph::new(samples.len());
        for (i, s) in samples.iter().enumerate() {
            let mut d: Vec<(f64, usize)> = samples
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, t)| (s.pos.distance(t.pos), j))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, j) in d.iter().take(2) {
                g.add_edge(i, j);
            }
        }
        g
    }

    #[test]
    fn baseline_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<TangentSample> = (0..300)
            .map(|k| {
                let p = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
                TangentSample::new(k, p, UnorientedTangent::from_angle(0.0))
            })
            .collect();
        for cell in [0.01, 0.2, 5.0] {
            assert_eq!(proximity_baseline(&samples, cell), brute_two_nearest(&samples));
        }
    }

    #[test]
    fn baseline_recovers_a_lone_circle() {
        let spec = scenes::circle_grid(1, 1.0, 1.0);
        let fig = crate::synth::sample_figure(&spec, 0.1, 0).unwrap();
        assert_eq!(proximity_baseline(&fig.samples, 0.1), fig.truth);
    }

    #[test]
    fn slope_of_a_power_law() {
        let x: Vec<f64> = (1..6).map(|k| (k as f64).ln()).collect();
        let y: Vec<f64> = (1..6).map(|k| (3.0 * (k as f64).powf(0.5)).ln()).collect();
        assert!((fit_slope(&x, &y) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn critical_epsilon_orders_methods() {
        let spec = scenes::nested_ovals(0.01);
        let m = measure_figure(&spec).unwrap();
        let cap = 0.999 / SQRT_2;
        let t = critical_epsilon(Method::Tangent, &spec, &m, cap, &[1, 2], 6).unwrap();
        let b = critical_epsilon(Method::Baseline, &spec, &m, cap, &[1, 2], 6).unwrap();
        assert!(t > b, "{t} vs {b}");
        assert!(t >= (0.01f64 / 2.0).sqrt() * 0.9, "{t}");
    }
}
