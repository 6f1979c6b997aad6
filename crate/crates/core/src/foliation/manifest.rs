//! Text manifest of a cluster state.
//!
//! ```text
//! instance <name>
//! layers <2z>
//! counts qubits <M> cz <CZ> detectors_x <n_X> detectors_z <n_Z>
//! qubit <id> <kind> <layer> <anchor>
//! cz <time> <a> <b>
//! detector <X|Z> <index> <center> <layer> <qubit ids...>
//! surface <Z|X> <index> <base edge ids...>
//! ```

use std::fmt::Write as _;

use super::ClusterState;
use crate::PauliType;

pub fn export_manifest(state: &ClusterState) -> String {
    let mut out = String::new();
    let counts = state.counts();
    let (nx, nz) = state.detector_count();
    let _ = writeln!(out, "# cluster manifest");
    let _ = writeln!(out, "instance {}", state.lattice().display_name());
    let _ = writeln!(out, "layers {}", state.layers());
    let _ = writeln!(
        out,
        "counts qubits {} cz {} detectors_x {nx} detectors_z {nz}",
        counts.qubits, counts.cz
    );
    for q in state.qubits() {
        let _ = writeln!(out, "qubit {} {} {} {}", q.id, q.kind, q.layer, q.anchor);
    }
    for g in state.gates() {
        let _ = writeln!(out, "cz {} {} {}", g.time, g.a, g.b);
    }
    for ty in [PauliType::X, PauliType::Z] {
        for d in state.detectors(ty) {
            let _ = write!(out, "detector {ty} {} {} {}", d.index, d.center, d.layer);
            for q in &d.qubits {
                let _ = write!(out, " {q}");
            }
            out.push('\n');
        }
    }
    for s in state.surfaces() {
        let _ = write!(out, "surface {} {}", s.ty, s.index);
        for e in s.base.ones() {
            let _ = write!(out, " {e}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::foliation::foliate;
    use crate::lattice::generate_torus;

    #[test]
    fn manifest_is_stable_and_complete() {
        let code = build_code(&generate_torus(2)).unwrap();
        let a = export_manifest(&foliate(&code, 1));
        let b = export_manifest(&foliate(&code, 1));
        assert_eq!(a, b);
        assert!(a.contains("counts qubits 24 cz 40 detectors_x 4 detectors_z 4"));
        assert_eq!(a.lines().filter(|l| l.starts_with("cz ")).count(), 40);
        assert_eq!(a.lines().filter(|l| l.starts_with("surface ")).count(), 4);
    }
}
