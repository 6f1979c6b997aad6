use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;

use super::{genus_formula, LatticeData};

/// The lattice invariants, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    FaceSize,
    VertexDegree,
    EdgeEndpoints,
    EdgeIncidence,
    VertexIncidence,
    CountingIdentity,
    EulerCharacteristic,
    GenusFormula,
    Connectivity,
    RotationSystem,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::FaceSize,
        Check::VertexDegree,
        Check::EdgeEndpoints,
        Check::EdgeIncidence,
        Check::VertexIncidence,
        Check::CountingIdentity,
        Check::EulerCharacteristic,
        Check::GenusFormula,
        Check::Connectivity,
        Check::RotationSystem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::FaceSize => "face size",
            Check::VertexDegree => "vertex degree",
            Check::EdgeEndpoints => "edge endpoints",
            Check::EdgeIncidence => "edge incidence violation",
            Check::VertexIncidence => "vertex incidence",
            Check::CountingIdentity => "counting identity pF = 2E = qV",
            Check::EulerCharacteristic => "euler characteristic",
            Check::GenusFormula => "genus formula",
            Check::Connectivity => "connectivity",
            Check::RotationSystem => "rotation system",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub entries: Vec<CheckResult>,
    pub faces: usize,
    pub edges: usize,
    pub vertices: usize,
    pub euler_characteristic: i64,
    /// `1 − χ/2`, present only when χ is even.
    pub genus: Option<i64>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|c| c.passed)
    }

    pub fn get(&self, check: Check) -> Option<&CheckResult> {
        self.entries.iter().find(|c| c.check == check)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "F={} E={} V={} chi={} genus={}",
            self.faces,
            self.edges,
            self.vertices,
            self.euler_characteristic,
            self.genus.map_or_else(|| "n/a".to_string(), |g| g.to_string())
        )?;
        for entry in &self.entries {
            let status = if entry.passed { "PASS" } else { "FAIL" };
            match &entry.detail {
                Some(d) => writeln!(f, "{status} {}: {d}", entry.check)?,
                None => writeln!(f, "{status} {}", entry.check)?,
            }
        }
        Ok(())
    }
}

struct Recorder {
    entries: Vec<CheckResult>,
}

impl Recorder {
    fn record(&mut self, check: Check, outcome: Result<(), String>) -> bool {
        let passed = outcome.is_ok();
        self.entries.push(CheckResult {
            check,
            passed,
            detail: outcome.err(),
        });
        passed
    }

    fn skip(&mut self, check: Check) {
        self.entries.push(CheckResult {
            check,
            passed: false,
            detail: Some("not evaluated: earlier structural checks failed".into()),
        });
    }
}

/// Checks every lattice invariant and reports each one. Never fails; the
/// report carries the failures.
pub fn validate(data: &LatticeData) -> ValidationReport {
    let (n_e, n_f, n_v) = (data.edges.len(), data.faces.len(), data.vertex_rotations.len());
    let chi = n_f as i64 - n_e as i64 + n_v as i64;
    let mut rec = Recorder { entries: Vec::new() };

    let faces_ok = rec.record(Check::FaceSize, check_lists("face", &data.faces, data.p, n_e));
    let verts_ok = rec.record(
        Check::VertexDegree,
        check_lists("vertex", &data.vertex_rotations, data.q, n_e),
    );
    let ends_ok = rec.record(Check::EdgeEndpoints, check_endpoints(data));
    let structural = faces_ok && verts_ok && ends_ok;

    let mut incidence_ok = false;
    if faces_ok {
        incidence_ok = rec.record(Check::EdgeIncidence, check_edge_faces(data));
    } else {
        rec.skip(Check::EdgeIncidence);
    }
    if structural {
        incidence_ok &= rec.record(Check::VertexIncidence, check_vertex_edges(data));
    } else {
        rec.skip(Check::VertexIncidence);
    }

    rec.record(Check::CountingIdentity, {
        let (pf, e2, qv) = (data.p * n_f, 2 * n_e, data.q * n_v);
        if pf == e2 && e2 == qv {
            Ok(())
        } else {
            Err(format!("pF={pf}, 2E={e2}, qV={qv}"))
        }
    });
    rec.record(
        Check::EulerCharacteristic,
        if chi % 2 == 0 && chi <= 2 {
            Ok(())
        } else {
            Err(format!("chi={chi} must be even and at most 2"))
        },
    );
    rec.record(Check::GenusFormula, {
        let formula = genus_formula(data.p, data.q, n_e);
        let from_chi = Ratio::new(2 - chi, 2);
        if formula == from_chi {
            Ok(())
        } else {
            Err(format!("1 - chi/2 = {from_chi} but 1 + E(1/2 - 1/p - 1/q) = {formula}"))
        }
    });
    if ends_ok {
        rec.record(Check::Connectivity, check_connected(data));
    } else {
        rec.skip(Check::Connectivity);
    }
    if structural && incidence_ok {
        rec.record(Check::RotationSystem, check_rotation_system(data));
    } else {
        rec.skip(Check::RotationSystem);
    }

    ValidationReport {
        entries: rec.entries,
        faces: n_f,
        edges: n_e,
        vertices: n_v,
        euler_characteristic: chi,
        genus: (chi % 2 == 0).then_some(1 - chi / 2),
    }
}

fn check_lists(kind: &str, lists: &[Vec<usize>], size: usize, n_e: usize) -> Result<(), String> {
    for (i, list) in lists.iter().enumerate() {
        if list.len() != size {
            return Err(format!("{kind} {i} has {} edges, expected {size}", list.len()));
        }
        if let Some(&e) = list.iter().find(|&&e| e >= n_e) {
            return Err(format!("{kind} {i} references unknown edge {e}"));
        }
    }
    Ok(())
}

fn check_endpoints(data: &LatticeData) -> Result<(), String> {
    let n_v = data.vertex_rotations.len();
    for (e, &[a, b]) in data.edges.iter().enumerate() {
        if a >= n_v || b >= n_v {
            return Err(format!("edge {e} references unknown vertex"));
        }
        if a == b {
            return Err(format!("edge {e} is a loop at vertex {a}"));
        }
    }
    Ok(())
}

fn check_edge_faces(data: &LatticeData) -> Result<(), String> {
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); data.edges.len()];
    for (f, face) in data.faces.iter().enumerate() {
        for &e in face {
            owners[e].push(f);
        }
    }
    for (e, own) in owners.iter().enumerate() {
        if own.len() != 2 {
            return Err(format!("edge {e} lies in {} faces, expected 2", own.len()));
        }
        if own[0] == own[1] {
            return Err(format!("edge {e} appears twice in face {}", own[0]));
        }
    }
    Ok(())
}

fn check_vertex_edges(data: &LatticeData) -> Result<(), String> {
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); data.edges.len()];
    for (v, rot) in data.vertex_rotations.iter().enumerate() {
        for &e in rot {
            seen[e].push(v);
        }
    }
    for (e, vs) in seen.iter_mut().enumerate() {
        vs.sort_unstable();
        let mut ends = data.edges[e];
        ends.sort_unstable();
        if vs.as_slice() != ends {
            return Err(format!(
                "edge {e} joins vertices {ends:?} but appears in rotations of {vs:?}"
            ));
        }
    }
    Ok(())
}

fn check_connected(data: &LatticeData) -> Result<(), String> {
    let n_v = data.vertex_rotations.len();
    if n_v == 0 {
        return Err("lattice has no vertices".into());
    }
    let mut parent: Vec<usize> = (0..n_v).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &[a, b] in &data.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let root = find(&mut parent, 0);
    match (0..n_v).find(|&v| find(&mut parent, v) != root) {
        Some(v) => Err(format!("vertex {v} is disconnected from vertex 0")),
        None => Ok(()),
    }
}

/// Rotates a cyclic sequence so that its smallest element comes first.
pub(crate) fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let start = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, e)| *e)
        .map_or(0, |(i, _)| i);
    cycle[start..].iter().chain(&cycle[..start]).copied().collect()
}

/// Traces the face orbits implied by the vertex rotations and compares them
/// with the declared faces.
fn check_rotation_system(data: &LatticeData) -> Result<(), String> {
    let mut position: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, rot) in data.vertex_rotations.iter().enumerate() {
        for (i, &e) in rot.iter().enumerate() {
            position.insert((v, e), i);
        }
    }
    // dart 2e leaves edges[e][0], dart 2e+1 leaves edges[e][1]
    let n_darts = 2 * data.edges.len();
    let tail = |d: usize| data.edges[d / 2][d % 2];
    let head = |d: usize| data.edges[d / 2][1 - d % 2];
    let dart_from = |e: usize, v: usize| if data.edges[e][0] == v { 2 * e } else { 2 * e + 1 };

    let mut visited = vec![false; n_darts];
    let mut traced: Vec<Vec<usize>> = Vec::new();
    for start in 0..n_darts {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut d = start;
        while !visited[d] {
            visited[d] = true;
            cycle.push(d / 2);
            let w = head(d);
            let rot = &data.vertex_rotations[w];
            let i = position[&(w, d / 2)];
            let next = rot[(i + rot.len() - 1) % rot.len()];
            d = dart_from(next, w);
            debug_assert_eq!(tail(d), w);
        }
        traced.push(canonical_cycle(&cycle));
    }
    traced.sort();

    let mut declared: Vec<(Vec<usize>, usize)> = data
        .faces
        .iter()
        .enumerate()
        .map(|(f, face)| (canonical_cycle(face), f))
        .collect();
    declared.sort();
    for (face, f) in &declared {
        if traced.binary_search(face).is_err() {
            return Err(format!(
                "face {f} is not a face orbit of the vertex rotations (orientation mismatch?)"
            ));
        }
    }
    if traced.len() != declared.len() {
        return Err(format!(
            "vertex rotations trace {} faces but {} are declared",
            traced.len(),
            declared.len()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::generate_torus;

    fn torus_data(l: usize) -> LatticeData {
        generate_torus(l).into_data()
    }

    #[test]
    fn torus_passes_everything() {
        let report = validate(&torus_data(3));
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.genus, Some(1));
    }

    #[test]
    fn short_face_fails_face_size() {
        let mut data = torus_data(3);
        data.faces[2].pop();
        let report = validate(&data);
        let entry = report.get(Check::FaceSize).unwrap();
        assert!(!entry.passed);
        assert!(entry.detail.as_ref().unwrap().contains("face 2"));
    }

    #[test]
    fn edge_in_three_faces_is_an_incidence_violation() {
        let mut data = torus_data(3);
        // replace an edge of face 0 by an edge already used twice elsewhere
        let victim = data.faces[0][0];
        let intruder = data.faces[4][1];
        data.faces[0][0] = intruder;
        let report = validate(&data);
        let entry = report.get(Check::EdgeIncidence).unwrap();
        assert!(!entry.passed);
        let detail = entry.detail.as_ref().unwrap();
        assert!(
            detail.contains(&format!("edge {victim}")) || detail.contains(&format!("edge {intruder}")),
            "{detail}"
        );
    }

    #[test]
    fn reversed_face_breaks_rotation_system() {
        let mut data = torus_data(3);
        data.faces[1].reverse();
        let report = validate(&data);
        assert!(!report.get(Check::RotationSystem).unwrap().passed);
        assert!(report.get(Check::CountingIdentity).unwrap().passed);
    }

    #[test]
    fn loop_edge_is_rejected() {
        let mut data = torus_data(2);
        data.edges[0] = [0, 0];
        let report = validate(&data);
        assert!(!report.get(Check::EdgeEndpoints).unwrap().passed);
    }

    #[test]
    fn counting_identity_detects_missing_vertex() {
        let mut data = torus_data(3);
        data.vertex_rotations.pop();
        let report = validate(&data);
        assert!(!report.get(Check::CountingIdentity).unwrap().passed);
    }

    #[test]
    fn canonical_cycle_rotates_to_minimum() {
        assert_eq!(canonical_cycle(&[5, 2, 9, 4]), vec![2, 9, 4, 5]);
    }
}
