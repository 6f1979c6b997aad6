//! Pauli-frame simulation of the cluster circuit under circuit-level noise.
//!
//! Only fault frames are tracked. A CZ maps `X_a → X_a Z_b`, so an X
//! component on a qubit deposits Z on every later CZ partner; Z components
//! pass through unchanged. The X-basis outcome of a qubit flips when its
//! frame carries Z at measurement time.

mod dem;
mod sampler;

use std::fmt;

use crate::foliation::{ClusterState, CzGate};
use crate::PauliType;

pub use dem::{
    mechanism_probability, parse_dem, write_dem, DemHeader, DemMechanism, DemParseError,
    DetectorErrorModel, FaultCatalog, Mechanism, SimError,
};
pub use sampler::{sample_shot, Sampler, ShotOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

/// The 15 nontrivial two-qubit Paulis in lexicographic order.
pub fn two_qubit_paulis() -> impl Iterator<Item = (Pauli, Pauli)> {
    Pauli::ALL
        .into_iter()
        .flat_map(|a| Pauli::ALL.into_iter().map(move |b| (a, b)))
        .filter(|&p| p != (Pauli::I, Pauli::I))
}

/// How a measurement fault acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementNoise {
    /// The recorded outcome flips with probability p.
    #[default]
    OutcomeFlip,
    /// A literal Pauli X just before the X-basis measurement. It commutes
    /// with the measurement, so it never flips anything.
    PauliX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultLocation {
    /// Pauli `paulis.0 ⊗ paulis.1` on `(a, b)` of schedule gate `gate`, right
    /// after it.
    AfterCz { gate: usize, paulis: (Pauli, Pauli) },
    /// Fault on `qubit` right before its measurement.
    BeforeMeasurement { qubit: usize },
}

impl fmt::Display for FaultLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultLocation::AfterCz { gate, paulis } => {
                write!(f, "{}{} after cz {gate}", paulis.0, paulis.1)
            }
            FaultLocation::BeforeMeasurement { qubit } => write!(f, "measurement of qubit {qubit}"),
        }
    }
}

/// All fault locations: 15 per CZ gate in schedule order, then one per qubit.
pub fn fault_locations(state: &ClusterState) -> impl Iterator<Item = FaultLocation> + '_ {
    let cz = (0..state.gates().len())
        .flat_map(|gate| two_qubit_paulis().map(move |paulis| FaultLocation::AfterCz { gate, paulis }));
    let meas = (0..state.num_qubits()).map(|qubit| FaultLocation::BeforeMeasurement { qubit });
    cz.chain(meas)
}

/// Explicit X/Z frame over all cluster qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    pub fn apply(&mut self, qubit: usize, p: Pauli) {
        self.x[qubit] ^= p.has_x();
        self.z[qubit] ^= p.has_z();
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.z[a] ^= self.x[b];
        self.z[b] ^= self.x[a];
    }

    /// Qubits whose X-basis outcome flips.
    pub fn flips(&self) -> Vec<usize> {
        (0..self.z.len()).filter(|&q| self.z[q]).collect()
    }
}

/// Conjugates `frame` through `gates` in order.
pub fn propagate(frame: &mut PauliFrame, gates: &[CzGate]) {
    for g in gates {
        frame.cz(g.a, g.b);
    }
}

/// Effect of one fault, split by decoding channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagatedFault {
    pub location: FaultLocation,
    /// Qubits whose outcome flips, ascending.
    pub flips: Vec<usize>,
    /// Indexed by channel (`Z` then `X`): flipped detectors of the type that
    /// catches that channel, ascending.
    pub syndrome: [Vec<usize>; 2],
    /// Indexed by channel: flipped data slots, ascending.
    pub footprint: [Vec<usize>; 2],
}

impl PropagatedFault {
    pub fn syndrome_of(&self, channel: PauliType) -> &[usize] {
        &self.syndrome[channel_index(channel)]
    }

    pub fn footprint_of(&self, channel: PauliType) -> &[usize] {
        &self.footprint[channel_index(channel)]
    }
}

pub(crate) fn channel_index(channel: PauliType) -> usize {
    match channel {
        PauliType::Z => 0,
        PauliType::X => 1,
    }
}

pub(crate) const CHANNELS: [PauliType; 2] = [PauliType::Z, PauliType::X];

/// Fast single-fault propagation using per-qubit partner lists.
#[derive(Debug, Clone)]
pub struct FaultPropagator<'a> {
    state: &'a ClusterState,
    noise: MeasurementNoise,
    /// Later CZ partners of each qubit, in gate order.
    partners: Vec<Vec<usize>>,
    /// For gate `g`, the position of `g` in the partner lists of `a` and `b`.
    position: Vec<[usize; 2]>,
    /// Detectors containing each qubit (all of the type matching its
    /// channel).
    detectors_of: Vec<Vec<usize>>,
}

impl<'a> FaultPropagator<'a> {
    pub fn new(state: &'a ClusterState, noise: MeasurementNoise) -> Self {
        let n = state.num_qubits();
        let mut partners = vec![Vec::new(); n];
        let mut position = Vec::with_capacity(state.gates().len());
        for g in state.gates() {
            position.push([partners[g.a].len(), partners[g.b].len()]);
            partners[g.a].push(g.b);
            partners[g.b].push(g.a);
        }
        let mut detectors_of = vec![Vec::new(); n];
        for channel in CHANNELS {
            for d in state.channel_detectors(channel) {
                for &q in &d.qubits {
                    debug_assert_eq!(state.qubit(q).kind.channel(), channel);
                    detectors_of[q].push(d.index);
                }
            }
        }
        Self {
            state,
            noise,
            partners,
            position,
            detectors_of,
        }
    }

    pub fn state(&self) -> &'a ClusterState {
        self.state
    }

    pub fn noise(&self) -> MeasurementNoise {
        self.noise
    }

    pub fn detectors_of(&self, qubit: usize) -> &[usize] {
        &self.detectors_of[qubit]
    }

    /// Toggles into `out` the outcome flips caused by `location`.
    pub fn push_flips(&self, location: FaultLocation, out: &mut Vec<usize>) {
        match location {
            FaultLocation::AfterCz { gate, paulis } => {
                let g = self.state.gates()[gate];
                let pos = self.position[gate];
                for (q, p, at) in [(g.a, paulis.0, pos[0]), (g.b, paulis.1, pos[1])] {
                    if p.has_z() {
                        out.push(q);
                    }
                    if p.has_x() {
                        out.extend_from_slice(&self.partners[q][at + 1..]);
                    }
                }
            }
            FaultLocation::BeforeMeasurement { qubit } => {
                if self.noise == MeasurementNoise::OutcomeFlip {
                    out.push(qubit);
                }
            }
        }
    }

    /// Sorted flip set of a single fault (duplicates cancel).
    pub fn flips(&self, location: FaultLocation) -> Vec<usize> {
        let mut out = Vec::new();
        self.push_flips(location, &mut out);
        cancel_pairs(&mut out);
        out
    }

    pub fn propagate_fault(&self, location: FaultLocation) -> PropagatedFault {
        let flips = self.flips(location);
        let (syndrome, footprint) = self.split(&flips);
        PropagatedFault {
            location,
            flips,
            syndrome,
            footprint,
        }
    }

    /// Per-channel syndrome and footprint of a flip set.
    pub fn split(&self, flips: &[usize]) -> ([Vec<usize>; 2], [Vec<usize>; 2]) {
        let mut syndrome = [Vec::new(), Vec::new()];
        let mut footprint = [Vec::new(), Vec::new()];
        for &q in flips {
            let ci = channel_index(self.state.qubit(q).kind.channel());
            syndrome[ci].extend_from_slice(&self.detectors_of[q]);
            if let Some((_, slot)) = self.state.slot(q) {
                footprint[ci].push(slot);
            }
        }
        for v in syndrome.iter_mut().chain(footprint.iter_mut()) {
            cancel_pairs(v);
        }
        (syndrome, footprint)
    }
}

/// Sorts and removes elements occurring an even number of times.
pub(crate) fn cancel_pairs(v: &mut Vec<usize>) {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    *v = out;
}
