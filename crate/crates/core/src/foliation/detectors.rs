use std::collections::BTreeSet;

use super::ClusterState;
use crate::PauliType;

/// A parity check on X-basis outcomes.
///
/// X-type detectors sit on a vertex of a primal layer: the q incident data
/// qubits plus the node ancillas of that vertex in the dual layers below and
/// above. Z-type detectors sit on a face of a dual layer: its p boundary data
/// qubits plus the face ancillas in the primal layers below and above. A
/// missing neighbouring layer drops the corresponding apex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detector {
    pub check: PauliType,
    /// Position in the per-type detector list.
    pub index: usize,
    /// Vertex id (X-type) or face id (Z-type).
    pub center: usize,
    /// Layer of the equator.
    pub layer: usize,
    /// Sorted cluster-qubit ids.
    pub qubits: Vec<usize>,
}

impl Detector {
    pub fn weight(&self) -> usize {
        self.qubits.len()
    }
}

pub(super) fn build(state: &ClusterState) -> (Vec<Detector>, Vec<Detector>) {
    let lat = state.lattice();
    let layers = state.layers();
    let mut x = Vec::new();
    let mut z = Vec::new();
    for t in 0..layers {
        let (out, check, rings) = if t % 2 == 0 {
            (&mut x, PauliType::X, lat.vertex_rotations())
        } else {
            (&mut z, PauliType::Z, lat.faces())
        };
        for (center, ring) in rings.iter().enumerate() {
            let mut qubits: Vec<usize> = ring.iter().map(|&e| state.data(t, e)).collect();
            if t >= 1 {
                qubits.push(state.ancilla(t - 1, center));
            }
            if t + 1 < layers {
                qubits.push(state.ancilla(t + 1, center));
            }
            qubits.sort_unstable();
            out.push(Detector {
                check,
                index: out.len(),
                center,
                layer: t,
                qubits,
            });
        }
    }
    (x, z)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("surface is not closed: qubit {qubit} has an odd number of neighbours in it")]
    NotClosed { qubit: usize },
    #[error("unknown cluster qubit {0}")]
    UnknownQubit(usize),
}

/// Multiplies the cluster stabilizers `K_u = X_u ∏ Z_neighbours` of the given
/// qubits (repeats cancel) and returns the X support of the product when the
/// Z factors cancel, i.e. when every qubit has an even number of neighbours
/// in the set.
pub fn closed_surface_check(
    state: &ClusterState,
    cells: &[usize],
) -> Result<Vec<usize>, SurfaceError> {
    let mut support = BTreeSet::new();
    for &u in cells {
        if u >= state.num_qubits() {
            return Err(SurfaceError::UnknownQubit(u));
        }
        if !support.remove(&u) {
            support.insert(u);
        }
    }
    let mut parity = vec![false; state.num_qubits()];
    for g in state.gates() {
        if support.contains(&g.a) {
            parity[g.b] ^= true;
        }
        if support.contains(&g.b) {
            parity[g.a] ^= true;
        }
    }
    if let Some(qubit) = parity.iter().position(|&p| p) {
        return Err(SurfaceError::NotClosed { qubit });
    }
    Ok(support.into_iter().collect())
}
