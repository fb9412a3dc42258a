//! Reconstruction that tolerates spurious samples.
//!
//! Instead of a single nearest tangential neighbor per side, every neighbor
//! within a factor `alpha` of the nearest one is kept. When all true curves
//! are closed, leaves then betray spurious edges and are pruned for a fixed
//! number of sweeps.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{tangential_distance, TangentSample, ZoneParams};
use crate::graph::{build_candidate_graph, nearest_tangential_neighbor, split_sides, Mode, PairSource, PolyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseParams {
    pub alpha: f64,
    pub sweeps: usize,
    pub closed_figures: bool,
}

impl Default for DenoiseParams {
    fn default() -> Self {
        DenoiseParams {
            alpha: 1.1,
            sweeps: 4,
            closed_figures: true,
        }
    }
}

impl DenoiseParams {
    pub fn new(alpha: f64, sweeps: usize, closed_figures: bool) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be >= 1, got {alpha}")));
        }
        Ok(DenoiseParams {
            alpha,
            sweeps,
            closed_figures,
        })
    }
}

/// Members of `side` whose tangential distance to sample `i` is at most
/// `alpha` times the smallest one. Sorted by index.
pub fn almost_nearest_set(i: usize, side: &[usize], samples: &[TangentSample], alpha: f64) -> Vec<usize> {
    let Some(nearest) = nearest_tangential_neighbor(i, side, samples) else {
        return Vec::new();
    };
    let p = samples[i].pos;
    let m = samples[i].tangent;
    let best = tangential_distance(samples[nearest].pos, p, m);
    let mut out: Vec<usize> = side
        .iter()
        .copied()
        .filter(|&j| tangential_distance(samples[j].pos, p, m) <= alpha * best)
        .collect();
    out.sort_unstable();
    out
}

/// Runs `sweeps` passes; each pass finds every degree-one vertex first and
/// then drops all of their edges. Vertices are kept.
pub fn remove_leaves(graph: &PolyGraph, sweeps: usize) -> PolyGraph {
    let mut g = graph.clone();
    for _ in 0..sweeps {
        let deg = g.degrees();
        let doomed: BTreeSet<(usize, usize)> = g.edges().filter(|&(i, j)| deg[i] == 1 || deg[j] == 1).collect();
        if doomed.is_empty() {
            break;
        }
        for (i, j) in doomed {
            g.remove_edge(i, j);
        }
    }
    g
}

/// Candidate graph, almost-nearest selection on both sides, then leaf
/// pruning when `dp.closed_figures` is set.
pub fn polygonalize_with_denoise(
    samples: &[TangentSample],
    zp: &ZoneParams,
    mode: Mode,
    dp: &DenoiseParams,
    pairs: &dyn PairSource,
) -> Result<PolyGraph> {
    let candidate = build_candidate_graph(samples, zp, mode, pairs)?;
    Ok(denoise_candidate(&candidate, samples, zp.tol, dp))
}

/// The selection and pruning steps on an existing candidate graph.
pub fn denoise_candidate(candidate: &PolyGraph, samples: &[TangentSample], tol: f64, dp: &DenoiseParams) -> PolyGraph {
    let adj = candidate.adjacency();
    let mut selected = PolyGraph::new(candidate.vertex_count());
    for i in 0..samples.len() {
        let (plus, minus) = split_sides(i, &adj, samples, tol);
        for side in [plus, minus] {
            for j in almost_nearest_set(i, &side, samples, dp.alpha) {
                selected.add_edge(i, j);
            }
        }
    }
    if dp.closed_figures {
        remove_leaves(&selected, dp.sweeps)
    } else {
        selected
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{UnorientedTangent, Vec2};

    fn on_axis(xs: &[f64]) -> Vec<TangentSample> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| TangentSample::new(i, Vec2::new(x, 0.0), UnorientedTangent::new(1.0, 0.0).unwrap()))
            .collect()
    }

    #[test]
    fn almost_nearest_threshold() {
        let s = on_axis(&[0.0, 0.10, 0.105, 0.20]);
        assert_eq!(almost_nearest_set(0, &[1, 2, 3], &s, 1.1), vec![1, 2]);
        assert_eq!(almost_nearest_set(0, &[1, 2, 3], &s, 1.0), vec![1]);
        assert!(almost_nearest_set(0, &[], &s, 1.1).is_empty());
    }

    #[test]
    fn alpha_one_keeps_exact_ties() {
        let s = vec![
            TangentSample::new(0, Vec2::ZERO, UnorientedTangent::new(1.0, 0.0).unwrap()),
            TangentSample::new(1, Vec2::new(0.1, 0.01), UnorientedTangent::new(1.0, 0.0).unwrap()),
            TangentSample::new(2, Vec2::new(0.1, -0.01), UnorientedTangent::new(1.0, 0.0).unwrap()),
        ];
        assert_eq!(almost_nearest_set(0, &[2, 1], &s, 1.0), vec![1, 2]);
    }

    #[test]
    fn leaf_removal_on_path() {
        let path = PolyGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(remove_leaves(&path, 0), path);
        let two = remove_leaves(&path, 1);
        assert_eq!(two.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3)]);
        // The second pass sees 1 and 3 as leaves and removes both remaining edges.
        assert_eq!(remove_leaves(&path, 2).edge_count(), 0);
        assert_eq!(remove_leaves(&path, 3).edge_count(), 0);
        assert_eq!(remove_leaves(&path, 2).vertex_count(), 5);
    }

    #[test]
    fn leaf_removal_on_five_edge_path() {
        let path = PolyGraph::from_edges(6, (0..5).map(|k| (k, k + 1))).unwrap();
        assert_eq!(remove_leaves(&path, 2).edges().collect::<Vec<_>>(), vec![(2, 3)]);
        assert_eq!(remove_leaves(&path, 3).edge_count(), 0);
    }

    #[test]
    fn leaf_removal_keeps_cycles() {
        let cycle = PolyGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(remove_leaves(&cycle, 10), cycle);
        let mut spur = cycle.clone();
        spur.add_edge(2, 4);
        assert_eq!(remove_leaves(&spur, 1), cycle);
    }

    #[test]
    fn rejects_alpha_below_one() {
        assert!(DenoiseParams::new(0.9, 4, true).is_err());
        assert!(DenoiseParams::new(1.0, 0, false).is_ok());
    }
}
