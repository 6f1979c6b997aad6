use std::path::PathBuf;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hypercluster::code::build_code;
use hypercluster::foliation::foliate;
use hypercluster::harness::{
    curves_from_csv, curves_from_records, run_memory, run_to_csv, ExperimentConfig, LatticeSpec, CSV_COLUMNS,
};
use hypercluster::lattice::generate_torus;
use hypercluster::pauli_sim::{MeasurementNoise, Sampler};
use hypercluster::PauliType;

fn e24() -> LatticeSpec {
    LatticeSpec::File(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../lattices/hyperbolic-8-3-e24.lat"))
}

#[test]
fn failure_rate_grows_from_tiny_to_large_p() {
    let cfg = ExperimentConfig {
        lattices: vec![LatticeSpec::Torus(3), LatticeSpec::Torus(4), e24()],
        layers: vec![4],
        rates: vec![1e-4, 1e-1],
        shots: 1000,
        seed: 3,
        ..ExperimentConfig::default()
    };
    let records = run_memory(&cfg).unwrap();
    for ch in [PauliType::Z, PauliType::X] {
        for curve in curves_from_records(&records, ch, 4) {
            let [(_, low), (_, high)] = curve.points[..] else {
                panic!("two points expected")
            };
            assert!(low < high, "{} {ch:?}: {low} vs {high}", curve.name);
        }
    }
}

#[test]
fn larger_torus_fails_more_above_threshold() {
    let cfg = ExperimentConfig {
        lattices: vec![LatticeSpec::Torus(3), LatticeSpec::Torus(5)],
        layers: vec![8],
        rates: vec![0.02],
        shots: 2000,
        seed: 1,
        channels: vec![PauliType::Z],
        ..ExperimentConfig::default()
    };
    let records = run_memory(&cfg).unwrap();
    assert!(records[0].failures < records[1].failures, "{} vs {}", records[0].failures, records[1].failures);
}

#[test]
fn csv_round_trips_into_curves() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let cfg = ExperimentConfig {
        lattices: vec![LatticeSpec::Torus(3), LatticeSpec::Torus(4)],
        layers: vec![4],
        rates: vec![0.003, 0.01],
        shots: 200,
        seed: 8,
        ..ExperimentConfig::default()
    };
    let records = run_to_csv(&cfg, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 1 + records.len());
    for ch in [PauliType::Z, PauliType::X] {
        let from_file = curves_from_csv(text.as_bytes(), ch, Some(4)).unwrap();
        let direct = curves_from_records(&records, ch, 4);
        assert_eq!(from_file.len(), 2);
        for (a, b) in from_file.iter().zip(&direct) {
            assert_eq!((a.size, &a.name), (b.size, &b.name));
            for (x, y) in a.points.iter().zip(&b.points) {
                assert_eq!(x.0, y.0);
                assert!((x.1 - y.1).abs() < 1e-12);
            }
        }
    }
    let meta = std::fs::read_to_string(dir.path().join("out.csv.meta")).unwrap();
    assert!(meta.contains("failure any-logical"));
}

#[test]
fn rows_respect_record_invariants() {
    let cfg = ExperimentConfig {
        lattices: vec![LatticeSpec::Torus(3)],
        layers: vec![2, 4],
        rates: vec![0.01, 0.05],
        shots: 150,
        seed: 2,
        ..ExperimentConfig::default()
    };
    for r in run_memory(&cfg).unwrap() {
        assert!(r.failures <= r.shots);
        assert_eq!(r.rate(), r.failures as f64 / r.shots as f64);
        let (lo, hi) = r.interval();
        assert!(lo <= r.rate() && r.rate() <= hi);
        assert!(r.logical_failures.iter().all(|&f| f <= r.failures));
        assert!(r.logical_failures.iter().sum::<u64>() >= r.failures);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Pauli frames add: the outcome of two fault sets together is the sum
    /// of their separate outcomes.
    #[test]
    fn outcomes_are_linear_in_faults(a in any::<u64>(), b in any::<u64>(), p in 0.005f64..0.05) {
        let state = foliate(&build_code(&generate_torus(3)).unwrap(), 2);
        let sampler = Sampler::new(&state, MeasurementNoise::OutcomeFlip);
        let fa = sampler.draw_faults(p, &mut ChaCha8Rng::seed_from_u64(a));
        let fb = sampler.draw_faults(p, &mut ChaCha8Rng::seed_from_u64(b));
        let both: Vec<_> = fa.iter().chain(&fb).copied().collect();
        let (oa, ob, oab) = (sampler.outcome_of(&fa), sampler.outcome_of(&fb), sampler.outcome_of(&both));
        for ch in [PauliType::Z, PauliType::X] {
            let mut sum: Vec<usize> = oa.syndrome_of(ch).iter().chain(ob.syndrome_of(ch)).copied().collect();
            sum.sort_unstable();
            let mut odd = Vec::new();
            for d in sum {
                if odd.last() == Some(&d) {
                    odd.pop();
                } else {
                    odd.push(d);
                }
            }
            prop_assert_eq!(oab.syndrome_of(ch), odd.as_slice());
            prop_assert_eq!(oab.actual_of(ch), &oa.actual_of(ch).xor(ob.actual_of(ch)));
        }
    }
}
