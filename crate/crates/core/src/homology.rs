//! Cycle and cocycle spaces of a CSS code, logical representatives and
//! exact distances.
//!
//! Z logicals live in `ker H_X / row(H_Z)`, X logicals in
//! `ker H_Z / row(H_X)`. The X basis is rotated so that the pairing matrix
//! `Z_i · X_j` is the identity.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::gf2::{BitChain, BitMatrix, RowReducer};
use crate::PauliType;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("CSS condition violated: Z check {z_row} and X check {x_row} overlap on an odd number of qubits")]
    CssViolation { z_row: usize, x_row: usize },
    #[error("chain length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("logical spaces have different dimensions: {z} Z vs {x} X")]
    Unbalanced { z: usize, x: usize },
}

pub fn rank_gf2(m: &BitMatrix) -> usize {
    m.rank()
}

/// Parity of `|a ∩ b|`.
pub fn pairing(a: &BitChain, b: &BitChain) -> Result<bool, HomologyError> {
    a.try_dot(b).ok_or(HomologyError::LengthMismatch {
        left: a.len(),
        right: b.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyBasis {
    z_logicals: Vec<BitChain>,
    x_logicals: Vec<BitChain>,
    pairing_matrix: BitMatrix,
}

impl HomologyBasis {
    /// Nontrivial 1-cycles: commute with every vertex check.
    pub fn z_logicals(&self) -> &[BitChain] {
        &self.z_logicals
    }

    /// Nontrivial 1-cocycles: commute with every face check.
    pub fn x_logicals(&self) -> &[BitChain] {
        &self.x_logicals
    }

    pub fn logicals(&self, ty: PauliType) -> &[BitChain] {
        match ty {
            PauliType::Z => &self.z_logicals,
            PauliType::X => &self.x_logicals,
        }
    }

    /// Entry `(i, j)` is `Z_i · X_j`.
    pub fn pairing_matrix(&self) -> &BitMatrix {
        &self.pairing_matrix
    }

    /// Number of logical qubits.
    pub fn k(&self) -> usize {
        self.z_logicals.len()
    }
}

/// Checks `H_Z · H_Xᵀ = 0`, naming the first offending row pair.
pub fn check_css(hz: &BitMatrix, hx: &BitMatrix) -> Result<(), HomologyError> {
    if hz.num_cols() != hx.num_cols() {
        return Err(HomologyError::LengthMismatch {
            left: hz.num_cols(),
            right: hx.num_cols(),
        });
    }
    for (i, a) in hz.rows().iter().enumerate() {
        for (j, b) in hx.rows().iter().enumerate() {
            if a.dot(b) {
                return Err(HomologyError::CssViolation { z_row: i, x_row: j });
            }
        }
    }
    Ok(())
}

/// Representatives of `ker(h) / row(stabilizers)`, preferring light ones.
fn quotient_basis(h: &BitMatrix, stabilizers: &BitMatrix) -> Vec<BitChain> {
    let mut reducer = RowReducer::new(h.num_cols());
    for row in stabilizers.rows() {
        reducer.insert(row);
    }
    let target = h.num_cols() - h.rank() - reducer.dim();
    let candidates = match graph_of(h) {
        Some(graph) => graph.short_cycles(),
        None => h.kernel(),
    };
    let mut out = Vec::with_capacity(target);
    for c in candidates {
        if out.len() == target {
            break;
        }
        if reducer.insert(&c) {
            out.push(c);
        }
    }
    out
}

/// Computes Z and X logicals and makes the pairing matrix the identity.
/// When the checks are graph-like (every qubit in exactly two checks), the
/// representatives are a shortest homology basis.
pub fn logical_basis(hz: &BitMatrix, hx: &BitMatrix) -> Result<HomologyBasis, HomologyError> {
    check_css(hz, hx)?;
    let z = quotient_basis(hx, hz);
    let x = quotient_basis(hz, hx);
    if z.len() != x.len() {
        return Err(HomologyError::Unbalanced {
            z: z.len(),
            x: x.len(),
        });
    }
    let k = z.len();
    let raw = BitMatrix::from_rows(k, z.iter().map(|zi| pairing_row(zi, &x)).collect());
    // X'_j = Σ_l M[j][l] X_l with M = (Pᵀ)⁻¹
    let m = raw
        .transpose()
        .inverse()
        .expect("pairing of quotient bases is nondegenerate");
    let x_completed: Vec<BitChain> = m
        .rows()
        .iter()
        .map(|coeffs| {
            let mut acc = BitChain::zeros(hz.num_cols());
            for l in coeffs.ones() {
                acc.xor_assign(&x[l]);
            }
            acc
        })
        .collect();
    let pairing_matrix =
        BitMatrix::from_rows(k, z.iter().map(|zi| pairing_row(zi, &x_completed)).collect());
    Ok(HomologyBasis {
        z_logicals: z,
        x_logicals: x_completed,
        pairing_matrix,
    })
}

fn pairing_row(a: &BitChain, others: &[BitChain]) -> BitChain {
    BitChain::from_bools(&others.iter().map(|b| a.dot(b)).collect::<Vec<_>>())
}

/// A minimum-weight logical and whether the search was exhaustive. When
/// `exact` is false, `value` is a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distance {
    pub value: usize,
    pub exact: bool,
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.value)
        } else {
            write!(f, ">={}", self.value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceOptions {
    /// Largest weight the generic search tries before giving up.
    pub max_weight: usize,
    /// The generic search refuses codes with more qubits than this.
    pub max_qubits: usize,
    /// Search-tree nodes visited before giving up.
    pub budget: u64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            max_weight: 14,
            max_qubits: 1000,
            budget: 200_000_000,
        }
    }
}

/// Minimum weight of a `ty`-type logical operator.
///
/// Graph-like check matrices use an exact shortest-cycle search; anything
/// else falls back to [`distance_search`].
pub fn distance(
    hz: &BitMatrix,
    hx: &BitMatrix,
    basis: &HomologyBasis,
    ty: PauliType,
    opts: &DistanceOptions,
) -> Distance {
    // a Z logical commutes with the X checks and is detected by X logicals
    let (h, opposite) = match ty {
        PauliType::Z => (hx, basis.x_logicals()),
        PauliType::X => (hz, basis.z_logicals()),
    };
    match graph_of(h) {
        Some(graph) => Distance {
            value: graph.shortest_nontrivial_cycle(opposite),
            exact: true,
        },
        None => distance_search(h, opposite, opts),
    }
}

/// Exact minimum-weight search for `v` with `h · v = 0` and odd overlap with
/// at least one of `opposite`, by iterative deepening over the weight.
///
/// Only supports reachable by repeatedly adding a qubit of the lowest
/// unsatisfied check are explored; a minimum-weight nontrivial word is always
/// among them, and any trivial word met on the way is pruned since its
/// complement inside a larger word would be a lighter candidate.
pub fn distance_search(h: &BitMatrix, opposite: &[BitChain], opts: &DistanceOptions) -> Distance {
    let n = h.num_cols();
    if n > opts.max_qubits {
        return Distance {
            value: 1,
            exact: false,
        };
    }
    let col_checks: Vec<Vec<usize>> = h.transpose().rows().iter().map(|r| r.to_indices()).collect();
    let row_support: Vec<Vec<usize>> = h.rows().iter().map(|r| r.to_indices()).collect();
    let masks: Vec<BitChain> = (0..n)
        .map(|e| BitChain::from_bools(&opposite.iter().map(|l| l.get(e)).collect::<Vec<_>>()))
        .collect();

    let mut search = WordSearch {
        col_checks: &col_checks,
        row_support: &row_support,
        masks: &masks,
        syndrome: BitChain::zeros(h.num_rows()),
        in_word: vec![false; n],
        pairing: BitChain::zeros(opposite.len()),
        visited: 0,
        budget: opts.budget,
    };
    for w in 1..=opts.max_weight.min(n) {
        for e0 in 0..n {
            search.toggle(e0);
            let found = search.extend(e0, w - 1);
            search.toggle(e0);
            if found {
                return Distance {
                    value: w,
                    exact: true,
                };
            }
            if search.visited > search.budget {
                return Distance {
                    value: w,
                    exact: false,
                };
            }
        }
    }
    Distance {
        value: opts.max_weight.min(n) + 1,
        exact: false,
    }
}

struct WordSearch<'a> {
    col_checks: &'a [Vec<usize>],
    row_support: &'a [Vec<usize>],
    masks: &'a [BitChain],
    syndrome: BitChain,
    in_word: Vec<bool>,
    pairing: BitChain,
    visited: u64,
    budget: u64,
}

impl WordSearch<'_> {
    fn toggle(&mut self, e: usize) {
        self.in_word[e] = !self.in_word[e];
        for &c in &self.col_checks[e] {
            self.syndrome.flip(c);
        }
        self.pairing.xor_assign(&self.masks[e]);
    }

    fn extend(&mut self, e0: usize, left: usize) -> bool {
        self.visited += 1;
        if self.visited > self.budget {
            return false;
        }
        let Some(c) = self.syndrome.first_one() else {
            return !self.pairing.is_zero();
        };
        if left == 0 {
            return false;
        }
        for &e in &self.row_support[c] {
            if e <= e0 || self.in_word[e] {
                continue;
            }
            self.toggle(e);
            let found = self.extend(e0, left - 1);
            self.toggle(e);
            if found {
                return true;
            }
        }
        false
    }
}

/// Check matrix read as a multigraph: checks are nodes, qubits are edges.
struct CheckGraph {
    endpoints: Vec<[usize; 2]>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// `Some` when every column of `h` has weight exactly two.
fn graph_of(h: &BitMatrix) -> Option<CheckGraph> {
    let cols = h.transpose();
    let mut endpoints = Vec::with_capacity(cols.num_rows());
    for col in cols.rows() {
        let ends = col.to_indices();
        if ends.len() != 2 {
            return None;
        }
        endpoints.push([ends[0], ends[1]]);
    }
    let mut adjacency = vec![Vec::new(); h.num_rows()];
    for (e, &[a, b]) in endpoints.iter().enumerate() {
        adjacency[a].push((b, e));
        adjacency[b].push((a, e));
    }
    Some(CheckGraph {
        endpoints,
        adjacency,
    })
}

struct BfsTree {
    /// Tree path from the root, as an edge set.
    path: Vec<Option<BitChain>>,
    in_tree: Vec<bool>,
}

impl CheckGraph {
    fn bfs(&self, root: usize) -> BfsTree {
        let n_e = self.endpoints.len();
        let mut path: Vec<Option<BitChain>> = vec![None; self.adjacency.len()];
        let mut in_tree = vec![false; n_e];
        path[root] = Some(BitChain::zeros(n_e));
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(w, e) in &self.adjacency[u] {
                if path[w].is_none() {
                    let mut p = path[u].clone().expect("visited");
                    p.flip(e);
                    path[w] = Some(p);
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
        BfsTree { path, in_tree }
    }

    fn fundamental_cycle(&self, tree: &BfsTree, e: usize) -> Option<BitChain> {
        let [a, b] = self.endpoints[e];
        let (pa, pb) = (tree.path[a].as_ref()?, tree.path[b].as_ref()?);
        let mut c = pa.xor(pb);
        c.flip(e);
        Some(c)
    }

    /// Fundamental cycles of BFS trees at every root, deduplicated and
    /// sorted by weight then lexicographically.
    fn short_cycles(&self) -> Vec<BitChain> {
        let mut seen = HashSet::new();
        for root in 0..self.adjacency.len() {
            let tree = self.bfs(root);
            for e in 0..self.endpoints.len() {
                if tree.in_tree[e] {
                    continue;
                }
                if let Some(c) = self.fundamental_cycle(&tree, e) {
                    seen.insert(c);
                }
            }
        }
        let mut cycles: Vec<BitChain> = seen.into_iter().collect();
        cycles.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| a.cmp(b)));
        cycles
    }

    /// Weight of the lightest cycle with odd overlap with some element of
    /// `opposite`. The lightest such cycle is a fundamental cycle of a BFS
    /// tree rooted on it.
    fn shortest_nontrivial_cycle(&self, opposite: &[BitChain]) -> usize {
        let mut best = usize::MAX;
        for root in 0..self.adjacency.len() {
            let tree = self.bfs(root);
            for e in 0..self.endpoints.len() {
                if tree.in_tree[e] {
                    continue;
                }
                let Some(c) = self.fundamental_cycle(&tree, e) else {
                    continue;
                };
                let w = c.weight();
                if w < best && opposite.iter().any(|l| l.dot(&c)) {
                    best = w;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toric code checks for the L×L torus, built independently of the
    /// lattice module: horizontal edge (x,y) has id y·L+x, vertical L²+y·L+x.
    fn toric(l: usize) -> (BitMatrix, BitMatrix) {
        let n = 2 * l * l;
        let h = |x: usize, y: usize| (y % l) * l + x % l;
        let v = |x: usize, y: usize| l * l + (y % l) * l + x % l;
        let mut faces = Vec::new();
        let mut stars = Vec::new();
        for y in 0..l {
            for x in 0..l {
                faces.push(vec![h(x, y), v(x + 1, y), h(x, y + 1), v(x, y)]);
                stars.push(vec![h(x, y), v(x, y), h(x + l - 1, y), v(x, y + l - 1)]);
            }
        }
        (BitMatrix::from_supports(n, &faces), BitMatrix::from_supports(n, &stars))
    }

    #[test]
    fn torus_face_rank_is_f_minus_one() {
        let (hz, hx) = toric(3);
        assert_eq!((hz.num_rows(), hz.num_cols()), (9, 18));
        assert_eq!(rank_gf2(&hz), 8);
        assert_eq!(rank_gf2(&hx), 8);
    }

    #[test]
    fn torus_logicals_are_short_and_symplectic() {
        let (hz, hx) = toric(3);
        let basis = logical_basis(&hz, &hx).unwrap();
        assert_eq!(basis.k(), 2);
        for z in basis.z_logicals() {
            assert_eq!(z.weight(), 3);
            assert!(hx.mul_vec(z).is_zero());
        }
        for x in basis.x_logicals() {
            assert!(hz.mul_vec(x).is_zero());
        }
        assert_eq!(basis.pairing_matrix(), &BitMatrix::identity(2));
    }

    #[test]
    fn horizontal_z_meets_vertical_x_once() {
        // Z along the horizontal edges of row 0, X across the vertical
        // edges of column 0 on the dual
        let l = 3;
        let z = BitChain::from_indices(18, (0..l));
        let x = BitChain::from_indices(18, (0..l).map(|y| y * l));
        assert!(pairing(&z, &x).unwrap());
        assert!(pairing(&BitChain::from_indices(18, [4]), &BitChain::from_indices(18, [4])).unwrap());
        assert!(!pairing(&BitChain::from_indices(18, [1]), &BitChain::from_indices(18, [2])).unwrap());
        assert!(pairing(&z, &BitChain::zeros(3)).is_err());
    }

    #[test]
    fn toric_distances_match_size() {
        for l in [3, 4, 5] {
            let (hz, hx) = toric(l);
            let basis = logical_basis(&hz, &hx).unwrap();
            let opts = DistanceOptions::default();
            for ty in [PauliType::Z, PauliType::X] {
                let d = distance(&hz, &hx, &basis, ty, &opts);
                assert_eq!(d, Distance { value: l, exact: true });
            }
            let generic = distance_search(&hx, basis.x_logicals(), &opts);
            assert_eq!(generic.value, l);
            assert!(generic.exact);
        }
    }

    #[test]
    fn search_reports_bound_past_cutoff() {
        let (hz, hx) = toric(5);
        let basis = logical_basis(&hz, &hx).unwrap();
        let opts = DistanceOptions {
            max_weight: 3,
            ..DistanceOptions::default()
        };
        assert_eq!(
            distance_search(&hx, basis.x_logicals(), &opts),
            Distance { value: 4, exact: false }
        );
        let tiny = DistanceOptions {
            max_qubits: 10,
            ..DistanceOptions::default()
        };
        assert!(!distance_search(&hx, basis.x_logicals(), &tiny).exact);
    }

    #[test]
    fn css_violation_is_reported() {
        let hz = BitMatrix::from_supports(3, &[vec![0, 1]]);
        let hx = BitMatrix::from_supports(3, &[vec![1, 2]]);
        assert_eq!(
            logical_basis(&hz, &hx).unwrap_err(),
            HomologyError::CssViolation { z_row: 0, x_row: 0 }
        );
    }

    #[test]
    fn distance_ignores_stabilizer_shifts() {
        let (hz, hx) = toric(4);
        let basis = logical_basis(&hz, &hx).unwrap();
        // shifting X logicals by X checks does not change which cycles are
        // nontrivial
        let shifted: Vec<BitChain> = basis
            .x_logicals()
            .iter()
            .map(|x| x.xor(hx.row(5)).xor(hx.row(11)))
            .collect();
        let opts = DistanceOptions::default();
        assert_eq!(distance_search(&hx, &shifted, &opts).value, 4);
    }
}
