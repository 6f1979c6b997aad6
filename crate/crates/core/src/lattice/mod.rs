//! Closed {p,q} lattices stored as combinatorial maps.
//!
//! A lattice is a set of edges (each joining two vertices), a set of faces
//! (each a counterclockwise cyclic list of edge ids) and, for every vertex,
//! the counterclockwise cyclic list of incident edges. Edge ids are the
//! canonical data-qubit ids everywhere else in the crate.
//!
//! Orientation convention: walking a face counterclockwise and arriving at a
//! vertex `w` along edge `e`, the next edge of the face is the predecessor of
//! `e` in the rotation of `w`.

mod format;
mod torus;
mod validate;

use std::fmt;
use std::path::Path;

pub use format::{parse_lattice, write_lattice};
pub use torus::generate_torus;
pub use validate::{validate, Check, CheckResult, ValidationReport};

use num_rational::Ratio;

/// Errors raised while reading or validating a lattice.
#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{check} failed: {detail}")]
    Invariant { check: Check, detail: String },
}

/// Unvalidated lattice data, as read from a file or assembled by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeData {
    pub p: usize,
    pub q: usize,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<Vec<usize>>,
    pub vertex_rotations: Vec<Vec<usize>>,
    pub label: Option<String>,
}

/// A validated closed {p,q} lattice. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    data: LatticeData,
    /// For every edge, the two faces containing it (ascending).
    edge_faces: Vec<[usize; 2]>,
}

impl Lattice {
    /// Validates `data` and wraps it. The error names the first failing
    /// check together with the offending element.
    pub fn new(data: LatticeData) -> Result<Self, LatticeError> {
        let report = validate(&data);
        if let Some(bad) = report.entries.iter().find(|c| !c.passed) {
            return Err(LatticeError::Invariant {
                check: bad.check,
                detail: bad.detail.clone().unwrap_or_default(),
            });
        }
        let mut edge_faces = vec![[usize::MAX; 2]; data.edges.len()];
        for (f, face) in data.faces.iter().enumerate() {
            for &e in face {
                let slot = &mut edge_faces[e];
                if slot[0] == usize::MAX {
                    slot[0] = f;
                } else {
                    slot[1] = f;
                }
            }
        }
        for pair in &mut edge_faces {
            pair.sort_unstable();
        }
        Ok(Self { data, edge_faces })
    }

    pub fn p(&self) -> usize {
        self.data.p
    }

    pub fn q(&self) -> usize {
        self.data.q
    }

    pub fn num_edges(&self) -> usize {
        self.data.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.data.faces.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.data.vertex_rotations.len()
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.data.edges[e]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.data.edges
    }

    /// Counterclockwise edge cycle of face `f`.
    pub fn face(&self, f: usize) -> &[usize] {
        &self.data.faces[f]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.data.faces
    }

    /// Counterclockwise edge rotation around vertex `v`.
    pub fn vertex_rotation(&self, v: usize) -> &[usize] {
        &self.data.vertex_rotations[v]
    }

    pub fn vertex_rotations(&self) -> &[Vec<usize>] {
        &self.data.vertex_rotations
    }

    /// The two faces that contain edge `e`.
    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        self.edge_faces[e]
    }

    pub fn label(&self) -> Option<&str> {
        self.data.label.as_deref()
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.data.label = Some(label.into());
    }

    pub fn data(&self) -> &LatticeData {
        &self.data
    }

    pub fn into_data(self) -> LatticeData {
        self.data
    }

    /// χ = F − E + V.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_faces() as i64 - self.num_edges() as i64 + self.num_vertices() as i64
    }

    /// g = 1 − χ/2.
    pub fn genus(&self) -> i64 {
        1 - self.euler_characteristic() / 2
    }

    /// g = 1 + E(1/2 − 1/p − 1/q), evaluated exactly.
    pub fn genus_from_formula(&self) -> Ratio<i64> {
        genus_formula(self.p(), self.q(), self.num_edges())
    }

    /// Human-readable instance name: the label if present, otherwise `{p,q}-E<n>`.
    pub fn display_name(&self) -> String {
        match &self.data.label {
            Some(l) => l.clone(),
            None => format!("{{{},{}}}-E{}", self.p(), self.q(), self.num_edges()),
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{},{}}} lattice: E={} F={} V={} genus={}",
            self.p(),
            self.q(),
            self.num_edges(),
            self.num_faces(),
            self.num_vertices(),
            self.genus()
        )
    }
}

pub(crate) fn genus_formula(p: usize, q: usize, e: usize) -> Ratio<i64> {
    let (p, q, e) = (p as i64, q as i64, e as i64);
    Ratio::from_integer(1)
        + Ratio::from_integer(e)
            * (Ratio::new(1, 2) - Ratio::new(1, p) - Ratio::new(1, q))
}

/// Reads and validates a lattice file. The label defaults to the file stem.
pub fn load_lattice(path: impl AsRef<Path>) -> Result<Lattice, LatticeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LatticeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut data = parse_lattice(&text)?;
    if data.label.is_none() {
        data.label = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Lattice::new(data)
}

/// A lattice with the roles of faces and vertices exchanged. Edge ids are
/// preserved, so the dual of a {p,q} lattice is a {q,p} lattice on the same
/// qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLattice(Lattice);

impl DualLattice {
    pub fn lattice(&self) -> &Lattice {
        &self.0
    }

    pub fn into_lattice(self) -> Lattice {
        self.0
    }

    /// Dualizes back. `dual(lat).dual()` equals `lat` up to endpoint order
    /// within each edge record.
    pub fn dual(&self) -> Lattice {
        dual(&self.0).0
    }
}

impl std::ops::Deref for DualLattice {
    type Target = Lattice;

    fn deref(&self) -> &Lattice {
        &self.0
    }
}

/// Exchanges faces and vertices. Dual faces are the vertex rotations, dual
/// vertex rotations are the faces, and dual edge `e` joins the two faces
/// that contain `e`.
pub fn dual(lat: &Lattice) -> DualLattice {
    let data = LatticeData {
        p: lat.q(),
        q: lat.p(),
        edges: (0..lat.num_edges()).map(|e| lat.edge_faces(e)).collect(),
        faces: lat.vertex_rotations().to_vec(),
        vertex_rotations: lat.faces().to_vec(),
        label: lat.label().map(|l| format!("{l}-dual")),
    };
    DualLattice(Lattice::new(data).expect("dual of a valid lattice is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_dual_is_self_similar() {
        let lat = generate_torus(3);
        let d = dual(&lat);
        assert_eq!((d.p(), d.q()), (4, 4));
        assert_eq!(d.num_edges(), lat.num_edges());
        assert_eq!(d.num_faces(), lat.num_vertices());
    }

    #[test]
    fn dual_of_dual_restores_edges() {
        let lat = generate_torus(4);
        let back = dual(&lat).dual();
        assert_eq!(back.faces(), lat.faces());
        assert_eq!(back.vertex_rotations(), lat.vertex_rotations());
        for e in 0..lat.num_edges() {
            let mut a = lat.edge(e);
            a.sort_unstable();
            assert_eq!(back.edge(e), a);
        }
    }

    #[test]
    fn genus_formula_matches_euler() {
        for l in 2..6 {
            let lat = generate_torus(l);
            assert_eq!(lat.euler_characteristic(), 0);
            assert_eq!(lat.genus_from_formula(), Ratio::from_integer(lat.genus()));
        }
    }
}
