use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::OnceLock;

use super::DecodeError;
use crate::pauli_sim::DetectorErrorModel;
use crate::PauliType;

/// Largest node count for which all pairwise distances are tabulated.
const TABLE_NODES: usize = 4096;

const UNREACHABLE: i64 = i64::MAX;

/// Fixed-point scale for edge weights.
pub const WEIGHT_SCALE: f64 = 1e6;

pub fn quantize(w: f64) -> i64 {
    (w * WEIGHT_SCALE).round().max(0.0) as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    pub u: usize,
    /// `None` for the boundary.
    pub v: Option<usize>,
    pub probability: f64,
    /// Quantized `−ln P`.
    pub weight: i64,
}

/// Matching graph of one channel: its detectors plus one boundary node.
#[derive(Debug, Clone)]
pub struct DecodingGraph {
    channel: PauliType,
    detectors: usize,
    edges: Vec<GraphEdge>,
    /// Neighbours with quantized weight; index `detectors` is the boundary.
    adj: Vec<Vec<(usize, i64)>>,
    /// Row-major distances between all nodes, filled on first use.
    table: OnceLock<Vec<i64>>,
}

impl DecodingGraph {
    /// Edges come from the channel's mechanisms; parallel edges are merged
    /// by odd combination and zero-probability edges are left out of the
    /// weighted graph (they still count for connectivity).
    pub fn from_dem(dem: &DetectorErrorModel, channel: PauliType) -> Result<Self, DecodeError> {
        let n = dem.num_detectors(channel);
        let mut merged: BTreeMap<(usize, Option<usize>), f64> = BTreeMap::new();
        for m in dem.mechanisms(channel) {
            let key = match m.defects[..] {
                [a] => (a, None),
                [a, b] if a != b => (a.min(b), Some(a.max(b))),
                _ => {
                    return Err(DecodeError::Graph(format!(
                        "mechanism with defects {:?} is not an edge",
                        m.defects
                    )))
                }
            };
            if key.0 >= n || key.1.is_some_and(|b| b >= n) {
                return Err(DecodeError::UnknownDetector(key.1.unwrap_or(key.0).max(key.0)));
            }
            let p = merged.entry(key).or_insert(0.0);
            *p = *p * (1.0 - m.probability) + m.probability * (1.0 - *p);
        }

        let boundary = n;
        let mut adj = vec![Vec::new(); n + 1];
        let mut structural = vec![Vec::new(); n + 1];
        let mut edges = Vec::new();
        for (&(u, v), &probability) in &merged {
            let vi = v.unwrap_or(boundary);
            structural[u].push(vi);
            structural[vi].push(u);
            if probability <= 0.0 {
                continue;
            }
            let weight = quantize(-probability.ln());
            adj[u].push((vi, weight));
            adj[vi].push((u, weight));
            edges.push(GraphEdge {
                u,
                v,
                probability,
                weight,
            });
        }

        // every detector must reach the boundary or another detector set
        // that contains the boundary
        let mut seen = vec![false; n + 1];
        let mut stack = vec![boundary];
        seen[boundary] = true;
        while let Some(x) = stack.pop() {
            for &y in &structural[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(DecodeError::Graph(format!(
                "detector {d} is not connected to the boundary"
            )));
        }
        Ok(Self {
            channel,
            detectors: n,
            edges,
            adj,
            table: OnceLock::new(),
        })
    }

    pub fn channel(&self) -> PauliType {
        self.channel
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors
    }

    pub fn boundary(&self) -> usize {
        self.detectors
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Quantized shortest distances from `source` to every node. The
    /// boundary node is reached but never expanded. `None` is unreachable.
    pub fn distances(&self, source: usize) -> Vec<Option<i64>> {
        self.distances_within(source, i64::MAX)
    }

    /// As [`distances`](Self::distances), but nodes farther than `limit`
    /// may be reported as unreachable.
    pub fn distances_within(&self, source: usize, limit: i64) -> Vec<Option<i64>> {
        let mut dist: Vec<Option<i64>> = vec![None; self.detectors + 1];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(0);
        heap.push(Reverse((0i64, source)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if dist[x].is_some_and(|cur| d > cur) || x == self.boundary() && x != source {
                continue;
            }
            if d > limit {
                break;
            }
            for &(y, w) in &self.adj[x] {
                let nd = d + w;
                if dist[y].is_none_or(|cur| nd < cur) {
                    dist[y] = Some(nd);
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        dist
    }

    /// Shortest distance between two nodes, through the table when the
    /// graph is small enough.
    pub fn distance(&self, a: usize, b: usize) -> Option<i64> {
        match self.table() {
            Some(t) => Some(t[a * (self.detectors + 1) + b]).filter(|&d| d != UNREACHABLE),
            None => self.distances(a)[b],
        }
    }

    /// Distances among `nodes` plus each node's boundary distance as a last
    /// column. Pairs farther apart than both boundary distances combined
    /// may be reported as unreachable.
    pub fn pair_distances(&self, nodes: &[usize]) -> Vec<Vec<Option<i64>>> {
        let b = self.boundary();
        let row = |all: &dyn Fn(usize) -> Option<i64>| -> Vec<Option<i64>> {
            nodes.iter().map(|&e| all(e)).chain([all(b)]).collect()
        };
        if let Some(t) = self.table() {
            let w = self.detectors + 1;
            return nodes
                .iter()
                .map(|&d| row(&|e| Some(t[d * w + e]).filter(|&x| x != UNREACHABLE)))
                .collect();
        }
        let to_boundary = self.distances(b);
        let reach = nodes
            .iter()
            .map(|&d| to_boundary[d])
            .collect::<Option<Vec<i64>>>()
            .map(|v| v.into_iter().max().unwrap_or(0));
        nodes
            .iter()
            .map(|&d| {
                let limit = match (reach, to_boundary[d]) {
                    (Some(r), Some(own)) => own + r,
                    _ => i64::MAX,
                };
                let mut all = self.distances_within(d, limit);
                all[b] = to_boundary[d];
                row(&|e| all[e])
            })
            .collect()
    }

    fn table(&self) -> Option<&Vec<i64>> {
        let w = self.detectors + 1;
        if w > TABLE_NODES {
            return None;
        }
        Some(self.table.get_or_init(|| {
            (0..w)
                .flat_map(|s| self.distances(s).into_iter().map(|d| d.unwrap_or(UNREACHABLE)))
                .collect()
        }))
    }
}
