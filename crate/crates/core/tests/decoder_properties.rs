use std::path::PathBuf;

use proptest::prelude::*;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hypercluster::code::build_code;
use hypercluster::decoder::Decoder;
use hypercluster::foliation::{foliate, ClusterState};
use hypercluster::gf2::BitChain;
use hypercluster::homology::pairing;
use hypercluster::lattice::{generate_torus, load_lattice, Lattice};
use hypercluster::pauli_sim::{FaultCatalog, MeasurementNoise, Sampler};
use hypercluster::PauliType;

fn torus_state(l: usize, z: usize) -> ClusterState {
    foliate(&build_code(&generate_torus(l)).unwrap(), z)
}

fn decoder(state: &ClusterState, p: f64, channel: PauliType) -> Decoder {
    let dem = FaultCatalog::build(state, MeasurementNoise::OutcomeFlip)
        .unwrap()
        .dem(p)
        .unwrap();
    Decoder::new(state, &dem, channel).unwrap()
}

/// X-type defects of a data-slot Z error with no circuit propagation.
fn phenomenological_defects(lat: &Lattice, slots: &[usize]) -> Vec<usize> {
    let (e, v) = (lat.num_edges(), lat.num_vertices());
    let mut flipped = BitChain::zeros(v * (slots.iter().max().map_or(0, |s| s / e) + 1));
    for &s in slots {
        for x in lat.edge(s % e) {
            flipped.flip((s / e) * v + x);
        }
    }
    flipped.to_indices()
}

fn face_boundary(lat: &Lattice, f: usize, slots: usize, layer: usize) -> BitChain {
    let e = lat.num_edges();
    BitChain::from_indices(slots, lat.face(f).iter().map(|&x| layer * e + x))
}

#[test]
fn low_weight_errors_on_e216_are_corrected() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../lattices/hyperbolic-8-3-e216.lat");
    let code = build_code(&load_lattice(path).unwrap()).unwrap();
    let t = (code.d_z().value - 1) / 2;
    assert_eq!(t, 5);
    let state = foliate(&code, 4);
    let dec = decoder(&state, 0.005, PauliType::Z);
    let lat = state.lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..300 {
        let w = 1 + trial % t;
        let slots = sample(&mut rng, state.num_slots(), w).into_vec();
        let actual = BitChain::from_indices(state.num_slots(), slots.iter().copied());
        let d = dec.decode(&phenomenological_defects(lat, &slots)).unwrap();
        let v = dec.judge(&actual, &d.correction).unwrap();
        assert!(!v.failed, "weight {w} error {slots:?} failed");
    }
}

#[test]
fn both_two_step_paths_give_the_same_verdict() {
    let state = torus_state(5, 2);
    let lat = state.lattice();
    let dec = decoder(&state, 0.005, PauliType::Z);
    let slots = state.num_slots();
    let mut checked = 0;
    for v in 0..lat.num_vertices() {
        // two-edge paths from v, grouped by far end
        let mut paths: Vec<(usize, [usize; 2])> = Vec::new();
        for &a in lat.vertex_rotation(v) {
            let mid = lat.edge(a).into_iter().find(|&x| x != v).unwrap();
            for &b in lat.vertex_rotation(mid) {
                let end = lat.edge(b).into_iter().find(|&x| x != mid).unwrap();
                if b != a && end != v {
                    paths.push((end, [a, b]));
                }
            }
        }
        for (i, (end, p)) in paths.iter().enumerate() {
            for (end2, q) in &paths[i + 1..] {
                if end == end2 {
                    let a = BitChain::from_indices(slots, p.iter().copied());
                    let b = BitChain::from_indices(slots, q.iter().copied());
                    assert!(!dec.judge(&a, &b).unwrap().failed);
                    checked += 1;
                }
            }
        }
    }
    // each diagonal pair is reached by two paths: 4 diagonals per vertex
    assert_eq!(checked, 4 * lat.num_vertices());
}

#[test]
fn face_boundaries_are_not_failures() {
    let state = torus_state(4, 2);
    let dec = decoder(&state, 0.005, PauliType::Z);
    let lat = state.lattice();
    let zero = BitChain::zeros(state.num_slots());
    for f in 0..lat.num_faces() {
        for layer in 0..state.z() {
            let v = dec.judge(&face_boundary(lat, f, state.num_slots(), layer), &zero).unwrap();
            assert!(!v.failed && v.flags.iter().all(|&x| !x));
            assert_eq!(v.closure_weight, 0);
        }
    }
}

#[test]
fn logical_representative_fails_on_paired_logicals() {
    let state = torus_state(3, 2);
    let dec = decoder(&state, 0.005, PauliType::Z);
    let basis = state.code().basis();
    let zero = BitChain::zeros(state.num_slots());
    for rep in basis.logicals(PauliType::Z) {
        let actual = BitChain::from_indices(state.num_slots(), rep.ones());
        let v = dec.judge(&actual, &zero).unwrap();
        let expected: Vec<bool> = basis
            .logicals(PauliType::X)
            .iter()
            .map(|x| pairing(rep, x).unwrap())
            .collect();
        assert_eq!(v.flags, expected);
        assert!(v.failed);
    }
}

#[test]
fn time_like_pair_needs_no_correction() {
    let state = torus_state(3, 3);
    let dec = decoder(&state, 0.005, PauliType::Z);
    let v = state.lattice().num_vertices();
    let d = dec.decode(&[4, v + 4]).unwrap();
    assert!(d.correction.is_zero());
    let d = dec.decode(&[0, 1]).unwrap();
    assert_eq!(d.correction.weight(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn judge_of_equal_chains_never_fails(bits in proptest::collection::vec(any::<bool>(), 54)) {
        let state = torus_state(3, 3);
        for ch in [PauliType::Z, PauliType::X] {
            let dec = decoder(&state, 0.005, ch);
            let e = BitChain::from_bools(&bits);
            let v = dec.judge(&e, &e).unwrap();
            prop_assert!(!v.failed);
        }
    }

    #[test]
    fn verdict_ignores_stabilizer_changes(seed in any::<u64>(), face in 0usize..16, layer in 0usize..2) {
        let state = torus_state(4, 2);
        let dec = decoder(&state, 0.01, PauliType::Z);
        let sampler = Sampler::new(&state, MeasurementNoise::OutcomeFlip);
        let shot = sampler.sample(0.01, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = dec.decode(shot.syndrome_of(PauliType::Z)).unwrap();
        let shifted = d.correction.xor(&face_boundary(state.lattice(), face, state.num_slots(), layer));
        let a = dec.judge(shot.actual_of(PauliType::Z), &d.correction).unwrap();
        let b = dec.judge(shot.actual_of(PauliType::Z), &shifted).unwrap();
        prop_assert_eq!(a.flags, b.flags);
    }
}
