//! Minimum-weight perfect matching decoder.
//!
//! Defects are matched on the per-channel decoding graph (weights `−ln P`
//! from the detector error model). Each matched pair becomes a chain along a
//! canonical shortest path in the detector stack, giving the inferred error
//! E_inf over the channel's data slots. The residual `E_act ⊕ E_inf` is
//! projected onto the base lattice, closed by an ideal final readout at the
//! open time boundary, and paired against the opposite logicals.

pub mod blossom;
mod graph;
mod mwpm;
mod stack;

use thiserror::Error;

use crate::foliation::ClusterState;
use crate::gf2::{BitChain, BitMatrix};
use crate::pauli_sim::{DetectorErrorModel, ShotOutcome};
use crate::PauliType;

pub use graph::{quantize, DecodingGraph, GraphEdge, WEIGHT_SCALE};
pub use mwpm::{brute_force_weight, match_with_boundary, mwpm, Matching};
pub use stack::{base_graph, boundary_layer, connectivity_stack, LabeledGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("decoding graph: {0}")]
    Graph(String),
    #[error("unknown detector {0}")]
    UnknownDetector(usize),
    #[error("no perfect matching of the defects")]
    NoPerfectMatching,
    #[error("no path between matched nodes {0} and {1}")]
    NoPath(usize, usize),
    #[error("residual is not a cycle ({odd} odd nodes after closure)")]
    NotACycle { odd: usize },
    #[error("chain has {got} slots, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("DEM does not match the cluster state: {0}")]
    ModelMismatch(String),
}

/// Matching and the chain it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub matching: Matching,
    /// E_inf over the channel's data slots.
    pub correction: BitChain,
}

/// Logical outcome of one shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    /// Any logical flipped.
    pub failed: bool,
    /// One flag per opposite logical.
    pub flags: Vec<bool>,
    /// Edges added by the closure.
    pub closure_weight: usize,
}

/// Decoder for one channel of one cluster state.
#[derive(Debug, Clone)]
pub struct Decoder {
    channel: PauliType,
    graph: DecodingGraph,
    stack: LabeledGraph,
    base: LabeledGraph,
    checks: BitMatrix,
    logicals: Vec<BitChain>,
    edges: usize,
    slots: usize,
    boundary_layer: usize,
}

impl Decoder {
    pub fn new(
        state: &ClusterState,
        dem: &DetectorErrorModel,
        channel: PauliType,
    ) -> Result<Self, DecodeError> {
        let expected = state.channel_detectors(channel).len();
        if dem.num_detectors(channel) != expected {
            return Err(DecodeError::ModelMismatch(format!(
                "{} detectors for channel {channel}, cluster has {expected}",
                dem.num_detectors(channel)
            )));
        }
        if dem.header.slots != state.num_slots() {
            return Err(DecodeError::ModelMismatch(format!(
                "{} slots, cluster has {}",
                dem.header.slots,
                state.num_slots()
            )));
        }
        let code = state.code();
        Ok(Self {
            channel,
            graph: DecodingGraph::from_dem(dem, channel)?,
            stack: connectivity_stack(state, channel),
            base: base_graph(state, channel),
            // Z errors are seen by X checks and flip X logicals
            checks: code.checks(channel.other()).clone(),
            logicals: code.basis().logicals(channel.other()).to_vec(),
            edges: state.lattice().num_edges(),
            slots: state.num_slots(),
            boundary_layer: boundary_layer(channel, state.z()),
        })
    }

    pub fn channel(&self) -> PauliType {
        self.channel
    }

    pub fn graph(&self) -> &DecodingGraph {
        &self.graph
    }

    /// Matches the defects and builds E_inf.
    pub fn decode(&self, defects: &[usize]) -> Result<Decoded, DecodeError> {
        let matching = mwpm(&self.graph, defects)?;
        let boundary = self.graph.boundary();
        let mut correction = BitChain::zeros(self.slots);
        for &(a, b) in &matching.pairs {
            let target = b.unwrap_or(boundary);
            let labels = self
                .stack
                .path_labels(a, target)
                .ok_or(DecodeError::NoPath(a, target))?;
            for s in labels {
                correction.flip(s);
            }
        }
        Ok(Decoded {
            matching,
            correction,
        })
    }

    /// XOR of a slot chain over all layers.
    pub fn project(&self, chain: &BitChain) -> BitChain {
        let mut out = BitChain::zeros(self.edges);
        for s in chain.ones() {
            out.flip(s % self.edges);
        }
        out
    }

    /// Closes the projected residual and pairs it with the opposite logicals.
    pub fn judge(&self, actual: &BitChain, correction: &BitChain) -> Result<Verdict, DecodeError> {
        for c in [actual, correction] {
            if c.len() != self.slots {
                return Err(DecodeError::LengthMismatch {
                    got: c.len(),
                    expected: self.slots,
                });
            }
        }
        let mut proj = self.project(&actual.xor(correction));
        let closure = self.closure(&proj)?;
        let closure_weight = closure.weight();
        proj.xor_assign(&closure);
        let odd = self.checks.mul_vec(&proj).weight();
        if odd != 0 {
            return Err(DecodeError::NotACycle { odd });
        }
        let flags: Vec<bool> = self.logicals.iter().map(|l| proj.dot(l)).collect();
        Ok(Verdict {
            failed: flags.iter().any(|&f| f),
            flags,
            closure_weight,
        })
    }

    /// Edges pairing up the odd nodes of a projected chain by minimum total
    /// hop length. These are the corrections an ideal readout of the
    /// boundary layer would apply.
    pub fn closure(&self, proj: &BitChain) -> Result<BitChain, DecodeError> {
        let odd: Vec<usize> = self.checks.mul_vec(proj).ones().collect();
        let mut out = BitChain::zeros(self.edges);
        if odd.is_empty() {
            return Ok(out);
        }
        let unreachable = usize::MAX;
        let hops: Vec<Vec<usize>> = odd.iter().map(|&a| self.base.hop_distances(a)).collect();
        let mut edges = Vec::new();
        for i in 0..odd.len() {
            for j in i + 1..odd.len() {
                let h = hops[i][odd[j]];
                if h != unreachable {
                    edges.push((i, j, h as i64));
                }
            }
        }
        let mate = blossom::min_weight_perfect_matching(odd.len(), &edges)
            .ok_or(DecodeError::NotACycle { odd: odd.len() })?;
        for (i, &j) in mate.iter().enumerate() {
            if i < j {
                let labels = self
                    .base
                    .path_labels(odd[i], odd[j])
                    .ok_or(DecodeError::NoPath(odd[i], odd[j]))?;
                for e in labels {
                    out.flip(e);
                }
            }
        }
        Ok(out)
    }

    /// Slot a closure edge would occupy in the boundary layer.
    pub fn boundary_slot(&self, edge: usize) -> usize {
        self.boundary_layer * self.edges + edge
    }

    /// Decodes and judges one sampled shot.
    pub fn run(&self, shot: &ShotOutcome) -> Result<Verdict, DecodeError> {
        let decoded = self.decode(shot.syndrome_of(self.channel))?;
        self.judge(shot.actual_of(self.channel), &decoded.correction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::foliation::foliate;
    use crate::lattice::generate_torus;
    use crate::pauli_sim::{FaultCatalog, FaultPropagator, MeasurementNoise};

    fn setup(l: usize, z: usize) -> (ClusterState, DetectorErrorModel) {
        let state = foliate(&build_code(&generate_torus(l)).unwrap(), z);
        let cat = FaultCatalog::build(&state, MeasurementNoise::OutcomeFlip).unwrap();
        let dem = cat.dem(0.005).unwrap();
        (state, dem)
    }

    #[test]
    fn empty_syndrome_is_success() {
        let (state, dem) = setup(3, 2);
        for ch in [PauliType::Z, PauliType::X] {
            let dec = Decoder::new(&state, &dem, ch).unwrap();
            let d = dec.decode(&[]).unwrap();
            assert!(d.correction.is_zero());
            let v = dec.judge(&BitChain::zeros(state.num_slots()), &d.correction).unwrap();
            assert!(!v.failed);
        }
    }

    #[test]
    fn every_single_fault_is_corrected() {
        let (state, dem) = setup(3, 3);
        let prop = FaultPropagator::new(&state, MeasurementNoise::OutcomeFlip);
        let decs: Vec<Decoder> = [PauliType::Z, PauliType::X]
            .into_iter()
            .map(|ch| Decoder::new(&state, &dem, ch).unwrap())
            .collect();
        for loc in crate::pauli_sim::fault_locations(&state) {
            let pf = prop.propagate_fault(loc);
            for (i, dec) in decs.iter().enumerate() {
                let d = dec.decode(&pf.syndrome[i]).unwrap();
                let actual = BitChain::from_indices(state.num_slots(), pf.footprint[i].iter().copied());
                let v = dec.judge(&actual, &d.correction).unwrap();
                assert!(!v.failed, "{loc} channel {i}");
            }
        }
    }

    #[test]
    fn logical_chain_fails() {
        let (state, dem) = setup(3, 2);
        let dec = Decoder::new(&state, &dem, PauliType::Z).unwrap();
        // a horizontal row of Z errors in one primal layer: no syndrome
        let row: Vec<usize> = (0..3).collect();
        let actual = BitChain::from_indices(state.num_slots(), row);
        let v = dec.judge(&actual, &BitChain::zeros(state.num_slots())).unwrap();
        assert!(v.failed);
        assert_eq!(v.closure_weight, 0);
    }
}
