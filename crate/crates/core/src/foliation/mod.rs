//! Foliated cluster states: 2z alternating primal and dual copies of a CSS
//! code, coupled by CZ gates between neighbouring layers.
//!
//! Layer `t` is primal for even `t` (data qubits on edges plus one ancilla
//! per face) and dual for odd `t` (data qubits on edges plus one ancilla per
//! vertex). Qubit ids are layer-major; within a layer the E data qubits come
//! first, then the ancillas in face or vertex order.

mod detectors;
mod manifest;
mod schedule;

use std::fmt;

use num_rational::Ratio;

use crate::code::CssCode;
use crate::gf2::BitChain;
use crate::lattice::Lattice;
use crate::PauliType;

pub use detectors::{closed_surface_check, Detector, SurfaceError};
pub use manifest::export_manifest;
pub use schedule::CzGate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitKind {
    PrimalData,
    FaceAncilla,
    DualData,
    NodeAncilla,
}

impl QubitKind {
    pub fn name(self) -> &'static str {
        match self {
            QubitKind::PrimalData => "primal-data",
            QubitKind::FaceAncilla => "face-ancilla",
            QubitKind::DualData => "dual-data",
            QubitKind::NodeAncilla => "node-ancilla",
        }
    }

    pub fn is_data(self) -> bool {
        matches!(self, QubitKind::PrimalData | QubitKind::DualData)
    }

    /// The error type whose frame component on this qubit shows up in the
    /// decoding problem: X-outcome flips of primal data and node ancillas are
    /// caught by X-type detectors and stem from Z errors, the rest from X
    /// errors.
    pub fn channel(self) -> PauliType {
        match self {
            QubitKind::PrimalData | QubitKind::NodeAncilla => PauliType::Z,
            QubitKind::DualData | QubitKind::FaceAncilla => PauliType::X,
        }
    }
}

impl fmt::Display for QubitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterQubit {
    pub id: usize,
    pub kind: QubitKind,
    pub layer: usize,
    /// Edge id for data, face id for face ancillas, vertex id for node
    /// ancillas.
    pub anchor: usize,
}

/// Closed-form resource counts for a {p,q} lattice with E edges and 2z
/// layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceCounts {
    pub cz: u64,
    pub qubits: u64,
    pub fault_locations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("E={e} is not the edge count of a {{{p},{q}}} lattice")]
    NotIntegral { p: usize, q: usize, e: usize },
    #[error("z must be at least 1")]
    NoLayers,
}

impl ResourceCounts {
    /// `CZ = E(6z − 1)`, `M = 2Ez(1 + 1/p + 1/q)`, `N_F = 15·CZ + M`.
    pub fn from_formulas(p: usize, q: usize, e: usize, z: usize) -> Result<Self, CountError> {
        if z == 0 {
            return Err(CountError::NoLayers);
        }
        if !(2 * e).is_multiple_of(p) || !(2 * e).is_multiple_of(q) {
            return Err(CountError::NotIntegral { p, q, e });
        }
        let (e, z) = (e as u64, z as u64);
        let cz = e * (6 * z - 1);
        let m = Ratio::from_integer(2 * e * z)
            * (Ratio::from_integer(1) + Ratio::new(1, p as u64) + Ratio::new(1, q as u64));
        debug_assert!(m.is_integer());
        let qubits = m.to_integer();
        Ok(Self {
            cz,
            qubits,
            fault_locations: 15 * cz + qubits,
        })
    }

    /// `N_F = 2Ez(46 + 1/p + 1/q − 15/(2z))`, the expanded closed form.
    pub fn fault_locations_expanded(p: usize, q: usize, e: usize, z: usize) -> Ratio<i64> {
        let (p, q, e, z) = (p as i64, q as i64, e as i64, z as i64);
        Ratio::from_integer(2 * e * z)
            * (Ratio::from_integer(46) + Ratio::new(1, p) + Ratio::new(1, q) - Ratio::new(15, 2 * z))
    }
}

/// A correlation surface, stored by its base chain. Z surfaces repeat a Z
/// logical on every primal layer, X surfaces an X logical on every dual
/// layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSurface {
    pub ty: PauliType,
    pub index: usize,
    pub base: BitChain,
}

#[derive(Debug, Clone)]
pub struct ClusterState {
    code: CssCode,
    layers: usize,
    qubits: Vec<ClusterQubit>,
    layer_offsets: Vec<usize>,
    gates: Vec<CzGate>,
    x_detectors: Vec<Detector>,
    z_detectors: Vec<Detector>,
    surfaces: Vec<CorrelationSurface>,
}

/// Builds the cluster state with `2z` layers.
///
/// # Panics
///
/// If `z == 0`.
pub fn foliate(code: &CssCode, z: usize) -> ClusterState {
    assert!(z >= 1, "foliation needs at least one primal and one dual layer");
    let lat = code.lattice();
    let layers = 2 * z;
    let (n_e, n_f, n_v) = (lat.num_edges(), lat.num_faces(), lat.num_vertices());

    let mut qubits = Vec::new();
    let mut layer_offsets = Vec::with_capacity(layers + 1);
    for t in 0..layers {
        layer_offsets.push(qubits.len());
        let (data_kind, anc_kind, n_anc) = if t % 2 == 0 {
            (QubitKind::PrimalData, QubitKind::FaceAncilla, n_f)
        } else {
            (QubitKind::DualData, QubitKind::NodeAncilla, n_v)
        };
        for (kind, count) in [(data_kind, n_e), (anc_kind, n_anc)] {
            for anchor in 0..count {
                qubits.push(ClusterQubit {
                    id: qubits.len(),
                    kind,
                    layer: t,
                    anchor,
                });
            }
        }
    }
    layer_offsets.push(qubits.len());

    let mut state = ClusterState {
        code: code.clone(),
        layers,
        qubits,
        layer_offsets,
        gates: Vec::new(),
        x_detectors: Vec::new(),
        z_detectors: Vec::new(),
        surfaces: Vec::new(),
    };
    state.gates = schedule::build(&state);
    let (x, z_dets) = detectors::build(&state);
    state.x_detectors = x;
    state.z_detectors = z_dets;
    for ty in [PauliType::Z, PauliType::X] {
        for (index, base) in code.basis().logicals(ty).iter().enumerate() {
            state.surfaces.push(CorrelationSurface {
                ty,
                index,
                base: base.clone(),
            });
        }
    }
    state
}

impl ClusterState {
    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn lattice(&self) -> &Lattice {
        self.code.lattice()
    }

    /// Number of layers, 2z.
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn z(&self) -> usize {
        self.layers / 2
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[ClusterQubit] {
        &self.qubits
    }

    pub fn qubit(&self, id: usize) -> &ClusterQubit {
        &self.qubits[id]
    }

    /// Data qubit on edge `e` in layer `t`.
    pub fn data(&self, t: usize, e: usize) -> usize {
        debug_assert!(e < self.lattice().num_edges());
        self.layer_offsets[t] + e
    }

    /// Ancilla anchored at face `f` (primal `t`) or vertex `v` (dual `t`).
    pub fn ancilla(&self, t: usize, anchor: usize) -> usize {
        let id = self.layer_offsets[t] + self.lattice().num_edges() + anchor;
        debug_assert!(id < self.layer_offsets[t + 1]);
        id
    }

    /// The schedule, sorted by time step.
    pub fn gates(&self) -> &[CzGate] {
        &self.gates
    }

    pub fn detectors(&self, check: PauliType) -> &[Detector] {
        match check {
            PauliType::X => &self.x_detectors,
            PauliType::Z => &self.z_detectors,
        }
    }

    /// Detectors that catch errors of type `channel`.
    pub fn channel_detectors(&self, channel: PauliType) -> &[Detector] {
        self.detectors(channel.other())
    }

    /// `(n_X, n_Z)`.
    pub fn detector_count(&self) -> (usize, usize) {
        (self.x_detectors.len(), self.z_detectors.len())
    }

    pub fn surfaces(&self) -> &[CorrelationSurface] {
        &self.surfaces
    }

    /// Cluster qubits of a correlation surface.
    pub fn surface_qubits(&self, s: &CorrelationSurface) -> Vec<usize> {
        let first = match s.ty {
            PauliType::Z => 0,
            PauliType::X => 1,
        };
        (first..self.layers)
            .step_by(2)
            .flat_map(|t| s.base.ones().map(move |e| (t, e)))
            .map(|(t, e)| self.data(t, e))
            .collect()
    }

    /// Layers whose data qubits carry the `channel` footprint: primal layers
    /// for Z, dual layers for X.
    pub fn channel_layers(&self, channel: PauliType) -> impl Iterator<Item = usize> {
        let first = match channel {
            PauliType::Z => 0,
            PauliType::X => 1,
        };
        (first..self.layers).step_by(2)
    }

    /// Footprint slot of a data qubit: `(layer index within its channel)·E +
    /// edge`. `None` for ancillas.
    pub fn slot(&self, qubit: usize) -> Option<(PauliType, usize)> {
        let q = &self.qubits[qubit];
        q.kind
            .is_data()
            .then(|| (q.kind.channel(), (q.layer / 2) * self.lattice().num_edges() + q.anchor))
    }

    /// Number of footprint slots per channel, `zE`.
    pub fn num_slots(&self) -> usize {
        self.z() * self.lattice().num_edges()
    }

    pub fn counts(&self) -> ResourceCounts {
        ResourceCounts {
            cz: self.gates.len() as u64,
            qubits: self.qubits.len() as u64,
            fault_locations: 15 * self.gates.len() as u64 + self.qubits.len() as u64,
        }
    }

    /// Neighbours of every qubit in the CZ graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.qubits.len()];
        for g in &self.gates {
            adj[g.a].push(g.b);
            adj[g.b].push(g.a);
        }
        adj
    }
}
