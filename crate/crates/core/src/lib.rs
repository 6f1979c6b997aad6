//! Foliated cluster-state memory experiments on closed {p,q} lattices.
//!
//! The pipeline runs lattice → CSS code → foliated cluster state → fault
//! enumeration and detector error model → matching decoder → Monte Carlo
//! harness. Each stage lives in its own module.

pub mod code;
pub mod decoder;
pub mod foliation;
pub mod gf2;
pub mod harness;
pub mod homology;
pub mod lattice;
pub mod pauli_sim;

use std::fmt;

/// The two Pauli types of a CSS code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliType {
    X,
    Z,
}

impl PauliType {
    pub fn other(self) -> Self {
        match self {
            PauliType::X => PauliType::Z,
            PauliType::Z => PauliType::X,
        }
    }
}

impl fmt::Display for PauliType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliType::X => "X",
            PauliType::Z => "Z",
        })
    }
}
