use std::collections::VecDeque;

use crate::foliation::ClusterState;
use crate::PauliType;

/// Unweighted graph with optional edge labels, used to turn matched pairs
/// into chains. Shortest paths break ties by the lexicographically smallest
/// node sequence, then the smallest label.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    adj: Vec<Vec<(usize, Option<usize>)>>,
}

impl LabeledGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, label: Option<usize>) {
        self.adj[a].push((b, label));
        self.adj[b].push((a, label));
    }

    fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    fn bfs(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Hop distances from `from` to every node (`usize::MAX` if unreachable).
    pub fn hop_distances(&self, from: usize) -> Vec<usize> {
        self.bfs(from)
    }

    /// Labels along the canonical shortest path from `a` to `b`, or `None`
    /// if `b` is unreachable.
    pub fn path_labels(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let dist = self.bfs(b);
        if dist[a] == usize::MAX {
            return None;
        }
        let mut labels = Vec::new();
        let mut x = a;
        while x != b {
            // adjacency is sorted, so the first hit is the smallest (node, label)
            let &(y, label) = self.adj[x]
                .iter()
                .find(|&&(y, _)| dist[y] + 1 == dist[x])
                .expect("shortest path continues");
            labels.extend(label);
            x = y;
        }
        Some(labels)
    }
}

/// Detectors of one channel stacked layer by layer: spatial edges carry
/// the data slot they cross, temporal edges and boundary edges carry none.
/// The boundary node is the last node.
pub fn connectivity_stack(state: &ClusterState, channel: PauliType) -> LabeledGraph {
    let lat = state.lattice();
    let e_count = lat.num_edges();
    let z = state.z();
    let (centers, ends): (usize, Vec<[usize; 2]>) = match channel {
        PauliType::Z => (lat.num_vertices(), lat.edges().to_vec()),
        PauliType::X => (
            lat.num_faces(),
            (0..e_count).map(|e| lat.edge_faces(e)).collect(),
        ),
    };
    let boundary = z * centers;
    let mut g = LabeledGraph::new(boundary + 1);
    for i in 0..z {
        for (e, &[a, b]) in ends.iter().enumerate() {
            if a != b {
                g.add_edge(i * centers + a, i * centers + b, Some(i * e_count + e));
            }
        }
        if i + 1 < z {
            for c in 0..centers {
                g.add_edge(i * centers + c, (i + 1) * centers + c, None);
            }
        }
    }
    let boundary_layer = boundary_layer(channel, z);
    for c in 0..centers {
        g.add_edge(boundary_layer * centers + c, boundary, None);
    }
    g.finish();
    g
}

/// Channel layer index (0..z) where the open time boundary sits: the last
/// primal layer for Z, the first dual layer for X.
pub fn boundary_layer(channel: PauliType, z: usize) -> usize {
    match channel {
        PauliType::Z => z - 1,
        PauliType::X => 0,
    }
}

/// The base lattice graph a channel's chains live on: vertices joined by
/// edges for Z, faces joined across edges for X. Labels are edge ids.
pub fn base_graph(state: &ClusterState, channel: PauliType) -> LabeledGraph {
    let lat = state.lattice();
    let (nodes, ends): (usize, Vec<[usize; 2]>) = match channel {
        PauliType::Z => (lat.num_vertices(), lat.edges().to_vec()),
        PauliType::X => (
            lat.num_faces(),
            (0..lat.num_edges()).map(|e| lat.edge_faces(e)).collect(),
        ),
    };
    let mut g = LabeledGraph::new(nodes);
    for (e, &[a, b]) in ends.iter().enumerate() {
        if a != b {
            g.add_edge(a, b, Some(e));
        }
    }
    g.finish();
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::foliation::foliate;
    use crate::lattice::generate_torus;

    #[test]
    fn stack_shape() {
        let state = foliate(&build_code(&generate_torus(3)).unwrap(), 2);
        let g = connectivity_stack(&state, PauliType::Z);
        assert_eq!(g.num_nodes(), 2 * 9 + 1);
        // layer-0 detector to boundary: one temporal hop then the boundary
        assert_eq!(g.path_labels(0, 18), Some(vec![]));
        assert_eq!(g.hop_distances(0)[18], 2);
        // neighbouring vertices in layer 1 are joined by a labeled edge
        let path = g.path_labels(9, 10).unwrap();
        assert_eq!(path.len(), 1);
        assert!(path[0] >= 18 && path[0] < 36);
    }

    #[test]
    fn ties_break_lexicographically() {
        // square 0-1-3, 0-2-3
        let mut g = LabeledGraph::new(4);
        g.add_edge(0, 2, Some(20));
        g.add_edge(2, 3, Some(23));
        g.add_edge(0, 1, Some(10));
        g.add_edge(1, 3, Some(13));
        g.finish();
        assert_eq!(g.path_labels(0, 3), Some(vec![10, 13]));
        assert_eq!(g.path_labels(3, 0), Some(vec![13, 10]));
    }

    #[test]
    fn x_channel_boundary_at_bottom() {
        let state = foliate(&build_code(&generate_torus(3)).unwrap(), 3);
        let g = connectivity_stack(&state, PauliType::X);
        let b = g.num_nodes() - 1;
        assert_eq!(g.hop_distances(b)[0], 1);
        assert_eq!(g.hop_distances(b)[2 * 9], 3);
    }
}
