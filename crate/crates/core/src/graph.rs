//! Candidate graph construction and nearest-tangential-neighbor selection.
//!
//! Reconstruction runs in three steps:
//!
//! 1. Join every pair of samples that lie in each other's allowed region
//!    (noise-free) or pass the widened noisy test (noisy). This is the
//!    candidate graph.
//! 2. For every sample split its candidate neighbors by which side of the
//!    tangent they fall on, and on each side keep the neighbor closest along
//!    the tangent.
//! 3. The output is the union of the kept edges.
//!
//! Vertices are positions in the sample slice.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{in_allowed_region, in_noisy_allowed_region, tangential_distance, TangentSample, ZoneParams};

/// Which membership test the candidate graph uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NoiseFree,
    Noisy,
}

impl Mode {
    /// Largest distance at which two samples can still be joined: `epsilon`,
    /// or `epsilon + 2 zeta` with noise.
    pub fn neighbor_radius(self, zp: &ZoneParams) -> f64 {
        match self {
            Mode::NoiseFree => zp.epsilon,
            Mode::Noisy => zp.epsilon + 2.0 * zp.zeta,
        }
    }

    /// Whether `q` passes the one-directional membership test of `(p, m)`.
    pub fn admits(self, q: &TangentSample, p: &TangentSample, zp: &ZoneParams) -> bool {
        match self {
            Mode::NoiseFree => in_allowed_region(q.pos, p.pos, p.tangent, zp),
            Mode::Noisy => in_noisy_allowed_region(q.pos, p.pos, p.tangent, zp, 2.0 * zp.zeta),
        }
    }
}

/// Simple undirected graph over sample indices, edges stored as `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolyGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl PolyGraph {
    pub fn new(vertex_count: usize) -> Self {
        PolyGraph {
            vertex_count,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops and
    /// out-of-range indices. Duplicates collapse.
    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = PolyGraph::new(vertex_count);
        for (i, j) in edges {
            g.try_add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&canonical(i, j))
    }

    /// Inserts `{i, j}`; returns whether it was new.
    ///
    /// # Panics
    /// On a self-loop or an out-of-range index.
    pub fn add_edge(&mut self, i: usize, j: usize) -> bool {
        self.try_add_edge(i, j).expect("invalid edge")
    }

    pub fn try_add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        for index in [i, j] {
            if index >= self.vertex_count {
                return Err(Error::IndexOutOfRange {
                    index,
                    count: self.vertex_count,
                });
            }
        }
        if i == j {
            return Err(Error::Invariant(format!("self-loop at vertex {i}")));
        }
        Ok(self.edges.insert(canonical(i, j)))
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        self.edges.remove(&canonical(i, j))
    }

    pub fn is_subgraph_of(&self, other: &PolyGraph) -> bool {
        self.vertex_count == other.vertex_count && self.edges.is_subset(&other.edges)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut lists = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.edges {
            lists[i].push(j);
            lists[j].push(i);
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        Adjacency { lists }
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let deg = self.degrees();
        let mut histogram = BTreeMap::new();
        for &d in &deg {
            *histogram.entry(d).or_insert(0) += 1;
        }
        DegreeStats {
            histogram,
            leaves: deg.iter().filter(|&&d| d == 1).count(),
            max_degree: deg.iter().copied().max().unwrap_or(0),
        }
    }
}

fn canonical(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Sorted neighbor lists of a [`PolyGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    lists: Vec<Vec<usize>>,
}

impl Adjacency {
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub histogram: BTreeMap<usize, usize>,
    pub leaves: usize,
    pub max_degree: usize,
}

/// Nearest tangential neighbors chosen on the `+m` and `-m` sides of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NeighborChoice {
    pub plus: Option<usize>,
    pub minus: Option<usize>,
}

/// Enumerates unordered index pairs that may lie within `radius` of each other.
///
/// Implementations must return every pair closer than `radius` at least once,
/// with `i < j` and no pair repeated. Extra pairs are allowed.
pub trait PairSource {
    fn candidate_pairs(&self, samples: &[TangentSample], radius: f64) -> Result<Vec<(usize, usize)>>;
}

/// All-pairs enumeration, filtered by distance.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForce;

impl PairSource for BruteForce {
    fn candidate_pairs(&self, samples: &[TangentSample], radius: f64) -> Result<Vec<(usize, usize)>> {
        let r2 = radius * radius;
        let mut out = Vec::new();
        for (i, a) in samples.iter().enumerate() {
            for (j, b) in samples.iter().enumerate().skip(i + 1) {
                // Slightly generous; the membership tests make the final call.
                if (a.pos - b.pos).norm_squared() <= r2 * (1.0 + 1e-9) + 1e-18 {
                    out.push((i, j));
                }
            }
        }
        Ok(out)
    }
}

/// Applies the mutual membership test to one pair. Near-coincident samples
/// are an error.
pub(crate) fn mutual_test(
    samples: &[TangentSample],
    i: usize,
    j: usize,
    zp: &ZoneParams,
    mode: Mode,
) -> Result<bool> {
    let (a, b) = (&samples[i], &samples[j]);
    let distance = a.pos.distance(b.pos);
    if distance <= zp.tol {
        return Err(Error::DuplicatePositions {
            first: i.min(j),
            second: i.max(j),
            distance,
            tol: zp.tol,
        });
    }
    Ok(mode.admits(b, a, zp) && mode.admits(a, b, zp))
}

/// Step 1: the candidate graph over the pairs supplied by `pairs`.
pub fn build_candidate_graph(
    samples: &[TangentSample],
    zp: &ZoneParams,
    mode: Mode,
    pairs: &dyn PairSource,
) -> Result<PolyGraph> {
    if samples.is_empty() {
        return Err(Error::InvalidParams("no samples".into()));
    }
    zp.check()?;
    let radius = mode.neighbor_radius(zp);
    let mut g = PolyGraph::new(samples.len());
    for (i, j) in pairs.candidate_pairs(samples, radius)? {
        if i == j {
            continue;
        }
        if mutual_test(samples, i, j, zp, mode)? {
            g.add_edge(i, j);
        }
    }
    Ok(g)
}

/// Splits the candidate neighbors of `i` by the sign of `(p_j - p_i) . m_i`.
///
/// Neighbors whose projection is within `tol` of zero go to the `+` side.
pub fn split_sides(i: usize, adj: &Adjacency, samples: &[TangentSample], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let p = samples[i].pos;
    let m = samples[i].tangent.dir();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for &j in adj.neighbors(i) {
        let along = (samples[j].pos - p).dot(m);
        if along < -tol {
            minus.push(j);
        } else {
            plus.push(j);
        }
    }
    (plus, minus)
}

/// The member of `side` closest to sample `i` along its tangent.
///
/// Ties fall back to Euclidean distance, then to the smaller index.
pub fn nearest_tangential_neighbor(i: usize, side: &[usize], samples: &[TangentSample]) -> Option<usize> {
    let p = samples[i].pos;
    let m = samples[i].tangent;
    side.iter()
        .map(|&j| {
            let q = samples[j].pos;
            (tangential_distance(q, p, m), q.distance(p), j)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)))
        .map(|(_, _, j)| j)
}

/// Everything produced by one reconstruction run.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub candidate: PolyGraph,
    pub result: PolyGraph,
    pub choices: Vec<NeighborChoice>,
}

/// Steps 2 and 3 on an already-built candidate graph.
pub fn select_nearest(candidate: &PolyGraph, samples: &[TangentSample], tol: f64) -> (PolyGraph, Vec<NeighborChoice>) {
    let adj = candidate.adjacency();
    let mut result = PolyGraph::new(candidate.vertex_count());
    let mut choices = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        let (plus, minus) = split_sides(i, &adj, samples, tol);
        let choice = NeighborChoice {
            plus: nearest_tangential_neighbor(i, &plus, samples),
            minus: nearest_tangential_neighbor(i, &minus, samples),
        };
        for j in [choice.plus, choice.minus].into_iter().flatten() {
            result.add_edge(i, j);
        }
        choices.push(choice);
    }
    (result, choices)
}

pub fn reconstruct(samples: &[TangentSample], zp: &ZoneParams, mode: Mode, pairs: &dyn PairSource) -> Result<Reconstruction> {
    let candidate = build_candidate_graph(samples, zp, mode, pairs)?;
    let (result, choices) = select_nearest(&candidate, samples, zp.tol);
    Ok(Reconstruction {
        candidate,
        result,
        choices,
    })
}

/// The reconstructed polygonalization of `samples`.
pub fn polygonalize(samples: &[TangentSample], zp: &ZoneParams, mode: Mode, pairs: &dyn PairSource) -> Result<PolyGraph> {
    reconstruct(samples, zp, mode, pairs).map(|r| r.result)
}
