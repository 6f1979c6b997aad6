use super::ClusterState;

/// One CZ gate. `a` is the check ancilla (intra-layer gates) or the lower
/// data qubit (inter-layer gates); `b` is a data qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CzGate {
    pub a: usize,
    pub b: usize,
    pub time: usize,
}

/// Layers are processed bottom to top. Within a layer, round `r` applies the
/// `r`-th CZ of every check ancilla in rotation order; the inter-layer CZs to
/// the layer above follow as a separate stage. Each gate goes to the
/// earliest time step at which both qubits are free and the current stage
/// has begun.
pub(super) fn build(state: &ClusterState) -> Vec<CzGate> {
    let lat = state.lattice();
    let mut free = vec![0usize; state.num_qubits()];
    let mut stage_start = 0;
    let mut horizon = 0;
    let mut gates = Vec::new();

    let mut place = |a: usize, b: usize, stage_start: usize, horizon: &mut usize| {
        let time = free[a].max(free[b]).max(stage_start);
        free[a] = time + 1;
        free[b] = time + 1;
        *horizon = (*horizon).max(time + 1);
        CzGate { a, b, time }
    };

    for t in 0..state.layers() {
        let checks = if t % 2 == 0 {
            lat.faces()
        } else {
            lat.vertex_rotations()
        };
        let rounds = checks.first().map_or(0, Vec::len);
        for r in 0..rounds {
            for (anchor, cycle) in checks.iter().enumerate() {
                let g = place(state.ancilla(t, anchor), state.data(t, cycle[r]), stage_start, &mut horizon);
                gates.push(g);
            }
        }
        stage_start = horizon;
        if t + 1 < state.layers() {
            for e in 0..lat.num_edges() {
                let g = place(state.data(t, e), state.data(t + 1, e), stage_start, &mut horizon);
                gates.push(g);
            }
            stage_start = horizon;
        }
    }
    // per-qubit order is already time order, so a stable sort keeps it
    gates.sort_by_key(|g| g.time);
    gates
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use crate::code::build_code;
    use crate::foliation::{foliate, QubitKind};
    use crate::lattice::{generate_torus, load_lattice};

    #[test]
    fn no_qubit_twice_per_step() {
        let c = foliate(&build_code(&generate_torus(3)).unwrap(), 3);
        let mut seen = HashSet::new();
        for g in c.gates() {
            assert!(seen.insert((g.time, g.a)), "{g:?}");
            assert!(seen.insert((g.time, g.b)), "{g:?}");
        }
    }

    #[test]
    fn ancillas_follow_rotation_order() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../lattices/hyperbolic-8-3-e24.lat");
        let lat = load_lattice(path).unwrap();
        let c = foliate(&build_code(&lat).unwrap(), 2);
        for q in c.qubits().iter().filter(|q| !q.kind.is_data()) {
            let touched: Vec<usize> = c
                .gates()
                .iter()
                .filter(|g| g.a == q.id)
                .map(|g| c.qubit(g.b).anchor)
                .collect();
            let expected = match q.kind {
                QubitKind::FaceAncilla => lat.face(q.anchor),
                _ => lat.vertex_rotation(q.anchor),
            };
            assert_eq!(touched, expected);
        }
    }

    #[test]
    fn inter_layer_gates_follow_intra_layer_gates() {
        let c = foliate(&build_code(&generate_torus(3)).unwrap(), 2);
        for (i, g) in c.gates().iter().enumerate() {
            let (qa, qb) = (c.qubit(g.a), c.qubit(g.b));
            if qa.kind.is_data() {
                assert_eq!(qb.layer, qa.layer + 1);
                assert_eq!(qa.anchor, qb.anchor);
                // every intra-layer gate of the lower layer comes earlier
                assert!(c.gates()[i..]
                    .iter()
                    .all(|h| !(c.qubit(h.a).layer == qa.layer && !c.qubit(h.a).kind.is_data())));
            }
        }
    }
}
