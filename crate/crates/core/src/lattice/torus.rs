use super::{Lattice, LatticeData};

/// The L×L square lattice on a torus, a {4,4} lattice with E = 2L².
///
/// Vertex `(x, y)` has id `y·L + x`. Horizontal edge `(x, y) → (x+1, y)` has
/// id `y·L + x`; vertical edge `(x, y) → (x, y+1)` has id `L² + y·L + x`.
/// Face `(x, y)` is the unit square with lower-left corner `(x, y)`.
///
/// # Panics
///
/// If `l < 2`.
pub fn generate_torus(l: usize) -> Lattice {
    assert!(l >= 2, "torus size must be at least 2");
    let vid = |x: usize, y: usize| (y % l) * l + (x % l);
    let h = |x: usize, y: usize| vid(x, y);
    let v = |x: usize, y: usize| l * l + vid(x, y);

    let mut edges = vec![[0; 2]; 2 * l * l];
    let mut faces = Vec::with_capacity(l * l);
    let mut vertex_rotations = Vec::with_capacity(l * l);
    for y in 0..l {
        for x in 0..l {
            edges[h(x, y)] = [vid(x, y), vid(x + 1, y)];
            edges[v(x, y)] = [vid(x, y), vid(x, y + 1)];
        }
    }
    for y in 0..l {
        for x in 0..l {
            faces.push(vec![h(x, y), v(x + 1, y), h(x, y + 1), v(x, y)]);
            // east, north, west, south
            vertex_rotations.push(vec![h(x, y), v(x, y), h(x + l - 1, y), v(x, y + l - 1)]);
        }
    }
    let data = LatticeData {
        p: 4,
        q: 4,
        edges,
        faces,
        vertex_rotations,
        label: Some(format!("torus-L{l}")),
    };
    Lattice::new(data).expect("torus construction is valid")
}
