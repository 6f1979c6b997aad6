use super::blossom::min_weight_perfect_matching;
use super::graph::{DecodingGraph, WEIGHT_SCALE};
use super::DecodeError;

/// A pairing of defects; `None` partners are matched to the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, Option<usize>)>,
    /// Total quantized weight.
    pub weight: i64,
}

impl Matching {
    pub fn weight_f64(&self) -> f64 {
        self.weight as f64 / WEIGHT_SCALE
    }
}

/// Minimum-weight matching of `defects` where each defect pairs with another
/// defect or with the boundary. `dist[i][j]` is the pair cost, `dist[i][n]`
/// the boundary cost; `None` means unreachable.
///
/// A pair costing at least both boundary costs combined is left out: sending
/// both defects to the boundary is never worse.
pub fn match_with_boundary(dist: &[Vec<Option<i64>>]) -> Option<(Vec<Option<usize>>, i64)> {
    let n = dist.len();
    // pairs worth considering; defects not linked through them match
    // independently
    let mut pairs = Vec::new();
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if let Some(w) = dist[i][j] {
                let via_boundary = dist[i][n].zip(dist[j][n]).map(|(a, b)| a + b);
                if via_boundary.is_none_or(|b| w < b) {
                    pairs.push((i, j, w));
                    let (ri, rj) = (find(&mut root, i), find(&mut root, j));
                    root[ri] = rj;
                }
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut local = vec![0; n];
    for i in 0..n {
        let r = find(&mut root, i);
        local[i] = members[r].len();
        members[r].push(i);
    }
    let mut edges: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); n];
    for &(i, j, w) in &pairs {
        let (r, m) = (find(&mut root, i), members[find(&mut root, i)].len());
        let (li, lj) = (local[i], local[j]);
        edges[r].push((li, lj, w));
        // one boundary copy per defect; two copies may pair when their
        // defects may, which is all a pairing of defects ever needs
        edges[r].push((m + li, m + lj, 0));
    }

    let mut partner = vec![None; n];
    let mut weight = 0;
    for r in 0..n {
        let group = &members[r];
        let m = group.len();
        if m == 0 {
            continue;
        }
        for (li, &i) in group.iter().enumerate() {
            if let Some(b) = dist[i][n] {
                edges[r].push((li, m + li, b));
            }
        }
        let mate = min_weight_perfect_matching(2 * m, &edges[r])?;
        for (li, &i) in group.iter().enumerate() {
            if mate[li] < m {
                let j = group[mate[li]];
                partner[i] = Some(j);
                if i < j {
                    weight += dist[i][j].expect("matched edge");
                }
            } else {
                weight += dist[i][n].expect("matched boundary");
            }
        }
    }
    Some((partner, weight))
}

/// Exhaustive reference for [`match_with_boundary`]; minimum total weight.
pub fn brute_force_weight(dist: &[Vec<Option<i64>>]) -> Option<i64> {
    fn rec(used: &mut [bool], dist: &[Vec<Option<i64>>]) -> Option<i64> {
        let n = used.len();
        let Some(i) = used.iter().position(|u| !u) else {
            return Some(0);
        };
        used[i] = true;
        let mut best: Option<i64> = None;
        if let Some(b) = dist[i][n] {
            if let Some(r) = rec(used, dist) {
                best = Some(b + r);
            }
        }
        for j in i + 1..n {
            if used[j] {
                continue;
            }
            if let Some(w) = dist[i][j] {
                used[j] = true;
                if let Some(r) = rec(used, dist) {
                    best = Some(best.map_or(w + r, |b| b.min(w + r)));
                }
                used[j] = false;
            }
        }
        used[i] = false;
        best
    }
    rec(&mut vec![false; dist.len()], dist)
}

/// Matches the defects of one shot on the decoding graph.
pub fn mwpm(graph: &DecodingGraph, defects: &[usize]) -> Result<Matching, DecodeError> {
    let n = defects.len();
    if let Some(&d) = defects.iter().find(|&&d| d >= graph.boundary()) {
        return Err(DecodeError::UnknownDetector(d));
    }
    let dist = graph.pair_distances(defects);
    let (partner, weight) = match_with_boundary(&dist).ok_or(DecodeError::NoPerfectMatching)?;
    let pairs = (0..n)
        .filter(|&i| partner[i].is_none_or(|j| i < j))
        .map(|i| (defects[i], partner[i].map(|j| defects[j])))
        .collect();
    debug_assert_eq!(dist.len(), n);
    Ok(Matching { pairs, weight })
}
