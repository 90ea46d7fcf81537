//! Linear algebra over F_2 with word-packed rows.

use std::fmt;

/// Dense F_2 matrix, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix whose column j is the bit vector `columns[j]` (bit i = row i).
    /// Rows are limited to 64.
    pub fn from_columns(rows: usize, columns: &[u64]) -> Self {
        assert!(rows <= 64);
        let mut m = Self::zeros(rows, columns.len());
        for (j, &col) in columns.iter().enumerate() {
            for i in 0..rows {
                if (col >> i) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&lo[src * w..src * w + w], &mut hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&hi[..w] as &[u64], &mut lo[dst * w..dst * w + w])
        };
        for (d, s) in b.iter_mut().zip(a) {
            *d ^= *s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for i in 0..w {
            self.data.swap(a * w + i, b * w + i);
        }
    }

    /// Reduces in place to row echelon form; returns the pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(p, r);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    /// Nullity: dimension of {v : A v = 0}.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// A basis of the right kernel, each vector as packed words.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.words];
            v[free / 64] |= 1 << (free % 64);
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, free) {
                    v[p / 64] |= 1 << (p % 64);
                }
            }
            out.push(v);
        }
        out
    }

    /// Matrix-vector product over F_2.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.rows.div_ceil(64).max(1)];
        for r in 0..self.rows {
            let parity = self.row(r).iter().zip(v).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1;
            if parity == 1 {
                out[r / 64] |= 1 << (r % 64);
            }
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let w = out.words;
                    for i in 0..w {
                        out.data[r * w + i] ^= other.data[k * w + i];
                    }
                }
            }
        }
        out
    }

    /// Inverse of a square matrix, or None when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let pivots = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Some(inv)
    }
}

/// Nullity of the matrix.
pub fn kernel_dim_f2(m: &BitMatrix) -> usize {
    m.kernel_dim()
}

/// Rank of a set of vectors packed in u64 words, by incremental xor basis.
pub fn rank_u64(vectors: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &v in vectors {
        let mut v = v;
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

/// Solution set of a linear system  sum_j z_j * columns[j] = target  over F_2,
/// with at most 128 unknowns and 128 equations: a particular solution plus a
/// basis of the homogeneous solutions, each encoded as a bit mask over unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolutions {
    pub particular: u128,
    pub kernel: Vec<u128>,
}

impl AffineSolutions {
    pub fn dim(&self) -> usize {
        self.kernel.len()
    }

    /// All solutions in increasing numeric order of the mask. Requires dim <= 24.
    pub fn enumerate(&self) -> Vec<u128> {
        assert!(self.kernel.len() <= 24, "solution space too large to enumerate");
        let mut out: Vec<u128> = (0u64..(1u64 << self.kernel.len()))
            .map(|sel| {
                let mut z = self.particular;
                for (i, k) in self.kernel.iter().enumerate() {
                    if (sel >> i) & 1 == 1 {
                        z ^= k;
                    }
                }
                z
            })
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn solve_columns(columns: &[u128], target: u128) -> Option<AffineSolutions> {
    assert!(columns.len() <= 128);
    // pivot-indexed basis of (vector, combination mask)
    let mut basis: Vec<(u128, u128)> = Vec::with_capacity(columns.len());
    let mut kernel = Vec::new();
    for (j, &col) in columns.iter().enumerate() {
        let mut v = col;
        let mut mask = 1u128 << j;
        for &(b, bm) in &basis {
            if v & (1u128 << (127 - b.leading_zeros())) != 0 {
                v ^= b;
                mask ^= bm;
            }
        }
        if v == 0 {
            kernel.push(mask);
        } else {
            // keep the basis fully reduced on its pivot bits
            let top = 1u128 << (127 - v.leading_zeros());
            for e in basis.iter_mut() {
                if e.0 & top != 0 {
                    e.0 ^= v;
                    e.1 ^= mask;
                }
            }
            basis.push((v, mask));
        }
    }
    let mut t = target;
    let mut particular = 0u128;
    for &(b, bm) in &basis {
        if t & (1u128 << (127 - b.leading_zeros())) != 0 {
            t ^= b;
            particular ^= bm;
        }
    }
    if t != 0 {
        return None;
    }
    Some(AffineSolutions { particular, kernel })
}
