//! Bit-packed GF(2) vectors and matrices.

use std::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2), packed into 64-bit words. Used for 1-chains over
/// edge ids, for check-matrix rows and for flip sets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitChain {
    len: usize,
    words: Vec<u64>,
}

impl BitChain {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a chain with the given indices set. Repeated indices cancel.
    ///
    /// # Panics
    ///
    /// If an index is out of range.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::zeros(len);
        for i in indices {
            c.flip(i);
        }
        c
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// # Panics
    ///
    /// On length mismatch.
    pub fn xor_assign(&mut self, other: &BitChain) {
        assert_eq!(self.len, other.len, "chain length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitChain) -> BitChain {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the overlap, or `None` on length mismatch.
    pub fn try_dot(&self, other: &BitChain) -> Option<bool> {
        if self.len != other.len {
            return None;
        }
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Some(ones % 2 == 1)
    }

    /// # Panics
    ///
    /// On length mismatch.
    pub fn dot(&self, other: &BitChain) -> bool {
        self.try_dot(other).expect("chain length mismatch")
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.ones().collect()
    }
}

impl fmt::Debug for BitChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitChain[{}]{:?}", self.len, self.to_indices())
    }
}

/// Renders as a 0/1 string, one character per bit.
impl fmt::Display for BitChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitChain>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitChain::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].flip(i);
        }
        m
    }

    /// # Panics
    ///
    /// If a row has the wrong length.
    pub fn from_rows(cols: usize, rows: Vec<BitChain>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        Self { cols, rows }
    }

    /// Each row given as the list of its set columns.
    pub fn from_supports(cols: usize, supports: &[Vec<usize>]) -> Self {
        Self::from_rows(
            cols,
            supports
                .iter()
                .map(|s| BitChain::from_indices(cols, s.iter().copied()))
                .collect(),
        )
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitChain {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitChain] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].flip(r);
            }
        }
        t
    }

    /// `self · v` over GF(2).
    pub fn mul_vec(&self, v: &BitChain) -> BitChain {
        BitChain::from_bools(&self.rows.iter().map(|r| r.dot(v)).collect::<Vec<_>>())
    }

    /// `self · otherᵀ`; rows index `self`, columns index `other`.
    pub fn mul_transpose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let rows = self
            .rows
            .iter()
            .map(|a| {
                BitChain::from_bools(&other.rows.iter().map(|b| a.dot(b)).collect::<Vec<_>>())
            })
            .collect();
        BitMatrix::from_rows(other.rows.len(), rows)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(pr) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, pr);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        (BitMatrix::from_rows(self.cols, rows), pivots)
    }

    pub fn rank(&self) -> usize {
        let mut basis = RowReducer::new(self.cols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    /// A basis of `{v : self · v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<BitChain> {
        let (reduced, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitChain::zeros(self.cols);
                v.flip(free);
                for (row, &pc) in reduced.rows.iter().zip(&pivots) {
                    if row.get(free) {
                        v.flip(pc);
                    }
                }
                v
            })
            .collect()
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let mut a = self.rows.clone();
        let mut inv = BitMatrix::identity(n).rows;
        for c in 0..n {
            let pr = (c..n).find(|&i| a[i].get(c))?;
            a.swap(c, pr);
            inv.swap(c, pr);
            let (pa, pi) = (a[c].clone(), inv[c].clone());
            for i in 0..n {
                if i != c && a[i].get(c) {
                    a[i].xor_assign(&pa);
                    inv[i].xor_assign(&pi);
                }
            }
        }
        Some(BitMatrix::from_rows(n, inv))
    }

    /// Plain-text bitmap, one row per line.
    pub fn to_bitmap(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * (self.cols + 1));
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }
}

/// Incremental echelon basis for span-membership tests.
///
/// Rows are kept reduced with distinct leading bits, so `reduce` returns the
/// canonical residual of a vector modulo the span.
#[derive(Clone, Debug)]
pub struct RowReducer {
    len: usize,
    /// `(pivot, row)`, row having its first set bit at `pivot`.
    rows: Vec<(usize, BitChain)>,
    by_pivot: Vec<Option<usize>>,
}

impl RowReducer {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            by_pivot: vec![None; len],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` modulo the current span.
    pub fn reduce(&self, v: &BitChain) -> BitChain {
        assert_eq!(v.len(), self.len, "chain length mismatch");
        let mut x = v.clone();
        // pivots are first set bits, so one ascending sweep suffices once
        // each row is applied in pivot order
        let mut start = 0;
        while let Some(b) = first_one_from(&x, start) {
            match self.by_pivot[b] {
                Some(i) => x.xor_assign(&self.rows[i].1),
                None => start = b + 1,
            }
        }
        x
    }

    pub fn contains(&self, v: &BitChain) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &BitChain) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            Some(p) => {
                self.by_pivot[p] = Some(self.rows.len());
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

fn first_one_from(x: &BitChain, start: usize) -> Option<usize> {
    if start >= x.len {
        return None;
    }
    let mut wi = start / WORD;
    let mut w = x.words[wi] & (!0u64 << (start % WORD));
    loop {
        if w != 0 {
            return Some(wi * WORD + w.trailing_zeros() as usize);
        }
        wi += 1;
        if wi == x.words.len() {
            return None;
        }
        w = x.words[wi];
    }
}
