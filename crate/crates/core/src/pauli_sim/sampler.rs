use rand::Rng;

use super::{
    cancel_pairs, channel_index, two_qubit_paulis, FaultLocation, FaultPropagator, MeasurementNoise,
    Pauli,
};
use crate::foliation::ClusterState;
use crate::gf2::BitChain;
use crate::PauliType;

/// Result of one noisy run of the circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotOutcome {
    /// Flipped detectors per channel (`Z`, then `X`), ascending.
    pub syndrome: [Vec<usize>; 2],
    /// Actual error chain E_act per channel over the data slots.
    pub actual: [BitChain; 2],
}

impl ShotOutcome {
    pub fn syndrome_of(&self, channel: PauliType) -> &[usize] {
        &self.syndrome[channel_index(channel)]
    }

    pub fn actual_of(&self, channel: PauliType) -> &BitChain {
        &self.actual[channel_index(channel)]
    }
}

/// Samples circuit-level depolarizing noise. Every CZ site and every
/// measurement site fires independently with probability p; a firing CZ
/// site applies one of the 15 nontrivial two-qubit Paulis uniformly.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    prop: FaultPropagator<'a>,
    paulis: Vec<(Pauli, Pauli)>,
}

impl<'a> Sampler<'a> {
    pub fn new(state: &'a ClusterState, noise: MeasurementNoise) -> Self {
        Self {
            prop: FaultPropagator::new(state, noise),
            paulis: two_qubit_paulis().collect(),
        }
    }

    pub fn propagator(&self) -> &FaultPropagator<'a> {
        &self.prop
    }

    /// Draws the set of firing locations for one shot.
    pub fn draw_faults<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Vec<FaultLocation> {
        let state = self.prop.state();
        let n_gates = state.gates().len();
        let total = n_gates + state.num_qubits();
        let mut out = Vec::new();
        if p <= 0.0 {
            return out;
        }
        // geometric skipping over the sites
        let log_q = (1.0 - p).ln();
        let mut site = 0usize;
        loop {
            let u: f64 = rng.random();
            let skip = ((1.0 - u).ln() / log_q).floor();
            if !skip.is_finite() || skip >= (total - site) as f64 {
                break;
            }
            site += skip as usize;
            if site < n_gates {
                let paulis = self.paulis[rng.random_range(0..self.paulis.len())];
                out.push(FaultLocation::AfterCz { gate: site, paulis });
            } else {
                out.push(FaultLocation::BeforeMeasurement {
                    qubit: site - n_gates,
                });
            }
            site += 1;
            if site >= total {
                break;
            }
        }
        out
    }

    /// Combined effect of a set of faults (Pauli frames add).
    pub fn outcome_of(&self, faults: &[FaultLocation]) -> ShotOutcome {
        let state = self.prop.state();
        let mut flips = Vec::new();
        for &f in faults {
            self.prop.push_flips(f, &mut flips);
        }
        cancel_pairs(&mut flips);
        let (syndrome, footprint) = self.prop.split(&flips);
        let slots = state.num_slots();
        let [fz, fx] = footprint;
        ShotOutcome {
            syndrome,
            actual: [
                BitChain::from_indices(slots, fz),
                BitChain::from_indices(slots, fx),
            ],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> ShotOutcome {
        let faults = self.draw_faults(p, rng);
        self.outcome_of(&faults)
    }
}

/// One shot at rate `p`.
pub fn sample_shot<R: Rng + ?Sized>(
    state: &ClusterState,
    noise: MeasurementNoise,
    p: f64,
    rng: &mut R,
) -> ShotOutcome {
    Sampler::new(state, noise).sample(p, rng)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::code::build_code;
    use crate::foliation::foliate;
    use crate::lattice::generate_torus;

    fn cluster() -> ClusterState {
        foliate(&build_code(&generate_torus(3)).unwrap(), 2)
    }

    #[test]
    fn noiseless_shot_is_empty() {
        let c = cluster();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shot = sample_shot(&c, MeasurementNoise::OutcomeFlip, 0.0, &mut rng);
        assert!(shot.syndrome.iter().all(Vec::is_empty));
        assert!(shot.actual.iter().all(BitChain::is_zero));
    }

    #[test]
    fn same_seed_same_shot() {
        let c = cluster();
        let s = Sampler::new(&c, MeasurementNoise::OutcomeFlip);
        let a = s.sample(0.05, &mut ChaCha8Rng::seed_from_u64(9));
        let b = s.sample(0.05, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn firing_rate_is_about_p() {
        let c = cluster();
        let s = Sampler::new(&c, MeasurementNoise::OutcomeFlip);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sites = (c.gates().len() + c.num_qubits()) as f64;
        let shots = 400;
        let fired: usize = (0..shots).map(|_| s.draw_faults(0.02, &mut rng).len()).sum();
        let mean = fired as f64 / (shots as f64 * sites);
        assert!((mean - 0.02).abs() < 0.002, "{mean}");
    }

    #[test]
    fn single_forced_fault_matches_propagation() {
        let c = cluster();
        let s = Sampler::new(&c, MeasurementNoise::OutcomeFlip);
        let loc = FaultLocation::AfterCz {
            gate: 40,
            paulis: (Pauli::Y, Pauli::X),
        };
        let shot = s.outcome_of(&[loc]);
        let pf = s.propagator().propagate_fault(loc);
        assert_eq!(shot.syndrome, pf.syndrome);
        assert_eq!(shot.actual[0].to_indices(), pf.footprint[0]);
    }
}
