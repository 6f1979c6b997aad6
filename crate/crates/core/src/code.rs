//! CSS codes on closed lattices: qubits on edges, Z checks on faces, X checks
//! on vertices.

use std::fmt::{self, Write as _};

use num_rational::Ratio;

use crate::gf2::{BitChain, BitMatrix};
use crate::homology::{self, Distance, DistanceOptions, HomologyBasis, HomologyError};
use crate::lattice::Lattice;
use crate::PauliType;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("n={n} is not the edge count of a {{{p},{q}}} lattice (2n/p and 2n/q must be integers)")]
    InconsistentSize { p: usize, q: usize, n: usize },
    #[error("logical count {k} differs from 2g = {two_g}")]
    GenusMismatch { k: usize, two_g: i64 },
}

#[derive(Debug, Clone)]
pub struct CssCode {
    lattice: Lattice,
    hz: BitMatrix,
    hx: BitMatrix,
    basis: HomologyBasis,
    d_z: Distance,
    d_x: Distance,
}

/// `1 − 2/p − 2/q + 2/n`, the rate k/n of the code on any closed {p,q}
/// lattice with n edges.
pub fn encoding_rate(p: usize, q: usize, n: usize) -> Result<Ratio<i64>, CodeError> {
    if n == 0 || !(2 * n).is_multiple_of(p) || !(2 * n).is_multiple_of(q) {
        return Err(CodeError::InconsistentSize { p, q, n });
    }
    let (p, q, n) = (p as i64, q as i64, n as i64);
    Ok(Ratio::from_integer(1) - Ratio::new(2, p) - Ratio::new(2, q) + Ratio::new(2, n))
}

pub fn build_code(lattice: &Lattice) -> Result<CssCode, CodeError> {
    build_code_with(lattice, &DistanceOptions::default())
}

pub fn build_code_with(lattice: &Lattice, opts: &DistanceOptions) -> Result<CssCode, CodeError> {
    let n = lattice.num_edges();
    let hz = BitMatrix::from_supports(n, lattice.faces());
    let hx = BitMatrix::from_supports(n, lattice.vertex_rotations());
    let basis = homology::logical_basis(&hz, &hx)?;
    let two_g = 2 * lattice.genus();
    if basis.k() as i64 != two_g {
        return Err(CodeError::GenusMismatch {
            k: basis.k(),
            two_g,
        });
    }
    let d_z = homology::distance(&hz, &hx, &basis, PauliType::Z, opts);
    let d_x = homology::distance(&hz, &hx, &basis, PauliType::X, opts);
    Ok(CssCode {
        lattice: lattice.clone(),
        hz,
        hx,
        basis,
        d_z,
        d_x,
    })
}

impl CssCode {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Face checks S_Z(f), F×E.
    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    /// Vertex checks S_X(v), V×E.
    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn checks(&self, ty: PauliType) -> &BitMatrix {
        match ty {
            PauliType::Z => &self.hz,
            PauliType::X => &self.hx,
        }
    }

    pub fn basis(&self) -> &HomologyBasis {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.hz.num_cols()
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }

    pub fn d_z(&self) -> Distance {
        self.d_z
    }

    pub fn d_x(&self) -> Distance {
        self.d_x
    }

    pub fn distance(&self, ty: PauliType) -> Distance {
        match ty {
            PauliType::Z => self.d_z,
            PauliType::X => self.d_x,
        }
    }

    pub fn rate(&self) -> Ratio<i64> {
        Ratio::new(self.k() as i64, self.n() as i64)
    }

    /// Text listing of stabilizer and logical supports, in check-row and
    /// basis order.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# code manifest");
        let _ = writeln!(out, "instance {}", self.lattice.display_name());
        let _ = writeln!(out, "pq {} {}", self.lattice.p(), self.lattice.q());
        let _ = writeln!(
            out,
            "params {} {} {} {}",
            self.n(),
            self.k(),
            self.d_z,
            self.d_x
        );
        let _ = writeln!(out, "rate {}", self.rate());
        let mut section = |name: &str, rows: &[BitChain]| {
            for (i, r) in rows.iter().enumerate() {
                let _ = write!(out, "{name} {i}");
                for e in r.ones() {
                    let _ = write!(out, " {e}");
                }
                out.push('\n');
            }
        };
        section("stabilizer_z", self.hz.rows());
        section("stabilizer_x", self.hx.rows());
        section("logical_z", self.basis.z_logicals());
        section("logical_x", self.basis.x_logicals());
        out
    }
}

impl fmt::Display for CssCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}, {}, {}]]", self.n(), self.k(), self.d_z, self.d_x)
    }
}
