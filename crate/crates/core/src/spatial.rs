//! Quadtree pair enumeration for the near-linear candidate graph build.
//!
//! A node splits into four equal quadrants while it holds more than
//! `ceil(rho_max * lambda^2)` samples. Candidate pairs for a leaf come from
//! every leaf whose box lies within L-infinity distance `lambda` of it, which
//! covers every pair closer than `lambda` regardless of how deep the two
//! leaves sit.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{TangentSample, Vec2, ZoneParams};
use crate::graph::{build_candidate_graph, Mode, PairSource, PolyGraph};

pub const DEFAULT_MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Vec2,
    pub size: f64,
}

impl BoundingBox {
    pub fn max(&self) -> Vec2 {
        Vec2::new(self.min.x + self.size, self.min.y + self.size)
    }

    /// Whether the closed boxes are within L-infinity distance `pad`.
    fn within(&self, other: &BoundingBox, pad: f64) -> bool {
        let (a0, a1) = (self.min, self.max());
        let (b0, b1) = (other.min, other.max());
        a0.x <= b1.x + pad && b0.x <= a1.x + pad && a0.y <= b1.y + pad && b0.y <= a1.y + pad
    }

    fn quadrant(&self, q: usize) -> BoundingBox {
        let half = 0.5 * self.size;
        let dx = if q & 1 == 1 { half } else { 0.0 };
        let dy = if q & 2 == 2 { half } else { 0.0 };
        BoundingBox {
            min: Vec2::new(self.min.x + dx, self.min.y + dy),
            size: half,
        }
    }
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf(Vec<usize>),
    Internal([usize; 4]),
}

#[derive(Debug, Clone)]
struct Node {
    bbox: BoundingBox,
    depth: usize,
    kind: NodeKind,
}

#[derive(Debug, Clone)]
pub struct QuadTree {
    nodes: Vec<Node>,
    leaves: Vec<usize>,
    split_threshold: usize,
    max_depth: usize,
    lambda: f64,
}

/// Shape summary of a built tree.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub depth: usize,
    pub max_leaf_occupancy: usize,
    pub split_threshold: usize,
}

/// Builds the tree. Fails when a leaf at `max_depth` still exceeds the split
/// threshold, which means the density bound does not hold (typically
/// duplicated points).
pub fn build_quadtree(samples: &[TangentSample], rho_max: f64, lambda: f64, max_depth: usize) -> Result<QuadTree> {
    if samples.is_empty() {
        return Err(Error::InvalidParams("quadtree needs at least one sample".into()));
    }
    if !(rho_max > 0.0 && rho_max.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "quadtree needs rho_max > 0 and lambda > 0, got {rho_max} and {lambda}"
        )));
    }
    let split_threshold = split_threshold(rho_max, lambda);

    let (mut lo, mut hi) = (samples[0].pos, samples[0].pos);
    for s in samples {
        lo = Vec2::new(lo.x.min(s.pos.x), lo.y.min(s.pos.y));
        hi = Vec2::new(hi.x.max(s.pos.x), hi.y.max(s.pos.y));
    }
    let root = BoundingBox {
        min: Vec2::new(lo.x - lambda, lo.y - lambda),
        size: (hi.x - lo.x).max(hi.y - lo.y) + 2.0 * lambda,
    };

    let mut tree = QuadTree {
        nodes: vec![Node {
            bbox: root,
            depth: 0,
            kind: NodeKind::Leaf((0..samples.len()).collect()),
        }],
        leaves: Vec::new(),
        split_threshold,
        max_depth,
        lambda,
    };

    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let count = match &tree.nodes[id].kind {
            NodeKind::Leaf(items) => items.len(),
            NodeKind::Internal(_) => unreachable!("only leaves are queued"),
        };
        if count <= split_threshold {
            tree.leaves.push(id);
            continue;
        }
        let depth = tree.nodes[id].depth;
        if depth >= max_depth {
            return Err(Error::DepthExceeded {
                depth,
                count,
                threshold: split_threshold,
            });
        }
        let bbox = tree.nodes[id].bbox;
        let items = match std::mem::replace(&mut tree.nodes[id].kind, NodeKind::Internal([0; 4])) {
            NodeKind::Leaf(items) => items,
            NodeKind::Internal(_) => unreachable!(),
        };
        let mid = Vec2::new(bbox.min.x + 0.5 * bbox.size, bbox.min.y + 0.5 * bbox.size);
        let mut parts: [Vec<usize>; 4] = Default::default();
        for i in items {
            let p = samples[i].pos;
            let q = usize::from(p.x >= mid.x) | (usize::from(p.y >= mid.y) << 1);
            parts[q].push(i);
        }
        let mut children = [0; 4];
        for (q, part) in parts.into_iter().enumerate() {
            children[q] = tree.nodes.len();
            tree.nodes.push(Node {
                bbox: bbox.quadrant(q),
                depth: depth + 1,
                kind: NodeKind::Leaf(part),
            });
        }
        tree.nodes[id].kind = NodeKind::Internal(children);
        // Reverse so quadrant 0 is processed first; keeps leaf order stable.
        stack.extend(children.iter().rev());
    }
    Ok(tree)
}

/// `ceil(rho_max * lambda^2)`, at least one.
pub fn split_threshold(rho_max: f64, lambda: f64) -> usize {
    ((rho_max * lambda * lambda).ceil() as usize).max(1)
}

/// Density estimate used when none is supplied: twice the largest occupancy
/// of a `lambda`-wide grid cell, per unit area.
pub fn estimate_rho_max(samples: &[TangentSample], lambda: f64) -> f64 {
    let mut cells: HashMap<(i64, i64), usize> = HashMap::new();
    for s in samples {
        let key = ((s.pos.x / lambda).floor() as i64, (s.pos.y / lambda).floor() as i64);
        *cells.entry(key).or_insert(0) += 1;
    }
    let max = cells.values().copied().max().unwrap_or(1);
    2.0 * max as f64 / (lambda * lambda)
}

impl QuadTree {
    pub fn split_threshold(&self) -> usize {
        self.split_threshold
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn root(&self) -> BoundingBox {
        self.nodes[0].bbox
    }

    /// `(box, sample indices)` for every leaf.
    pub fn leaves(&self) -> impl Iterator<Item = (BoundingBox, &[usize])> + '_ {
        self.leaves.iter().map(|&id| match &self.nodes[id].kind {
            NodeKind::Leaf(items) => (self.nodes[id].bbox, items.as_slice()),
            NodeKind::Internal(_) => unreachable!(),
        })
    }

    /// `(box, depth)` for every internal node.
    pub fn internal_nodes(&self) -> impl Iterator<Item = (BoundingBox, usize)> + '_ {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Internal(_)))
            .map(|n| (n.bbox, n.depth))
    }

    /// Children of internal nodes, for structural checks.
    pub fn child_boxes(&self) -> impl Iterator<Item = (BoundingBox, [BoundingBox; 4])> + '_ {
        self.nodes.iter().filter_map(|n| match n.kind {
            NodeKind::Internal(c) => Some((n.bbox, c.map(|id| self.nodes[id].bbox))),
            NodeKind::Leaf(_) => None,
        })
    }

    pub fn stats(&self) -> TreeStats {
        TreeStats {
            nodes: self.nodes.len(),
            leaves: self.leaves.len(),
            depth: self.nodes.iter().map(|n| n.depth).max().unwrap_or(0),
            max_leaf_occupancy: self.leaves().map(|(_, items)| items.len()).max().unwrap_or(0),
            split_threshold: self.split_threshold,
        }
    }

    fn leaves_near(&self, target: &BoundingBox, pad: f64, out: &mut Vec<usize>) {
        out.clear();
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !node.bbox.within(target, pad) {
                continue;
            }
            match &node.kind {
                NodeKind::Leaf(items) => {
                    if !items.is_empty() {
                        out.push(id);
                    }
                }
                NodeKind::Internal(children) => stack.extend(children.iter().rev()),
            }
        }
    }

    /// Every unordered pair `(i, j)`, `i < j`, drawn from leaves within
    /// `lambda` of each other. Each pair appears once.
    pub fn neighbor_pairs(&self, lambda: f64) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        let mut near = Vec::new();
        for &leaf in &self.leaves {
            let NodeKind::Leaf(items) = &self.nodes[leaf].kind else {
                unreachable!()
            };
            if items.is_empty() {
                continue;
            }
            self.leaves_near(&self.nodes[leaf].bbox, lambda, &mut near);
            for &i in items {
                for &other in &near {
                    let NodeKind::Leaf(others) = &self.nodes[other].kind else {
                        unreachable!()
                    };
                    pairs.extend(others.iter().filter(|&&j| i < j).map(|&j| (i, j)));
                }
            }
        }
        pairs
    }
}

/// Quadtree-backed [`PairSource`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTreePairs {
    pub rho_max: Option<f64>,
    pub max_depth: usize,
}

impl Default for QuadTreePairs {
    fn default() -> Self {
        QuadTreePairs {
            rho_max: None,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl QuadTreePairs {
    pub fn with_rho_max(rho_max: Option<f64>) -> Self {
        QuadTreePairs {
            rho_max,
            ..Default::default()
        }
    }
}

impl PairSource for QuadTreePairs {
    fn candidate_pairs(&self, samples: &[TangentSample], radius: f64) -> Result<Vec<(usize, usize)>> {
        let rho = self.rho_max.unwrap_or_else(|| estimate_rho_max(samples, radius));
        let tree = build_quadtree(samples, rho, radius, self.max_depth)?;
        Ok(tree.neighbor_pairs(radius))
    }
}

/// Candidate graph through the quadtree, with an estimated density bound.
pub fn fast_candidate_graph(samples: &[TangentSample], zp: &ZoneParams, mode: Mode) -> Result<PolyGraph> {
    build_candidate_graph(samples, zp, mode, &QuadTreePairs::default())
}
