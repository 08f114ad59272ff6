//! Packed GF(2) linear algebra: row-reduced echelon form, kernels, and
//! linear solves. Rows are stored as contiguous 64-bit words.

const WORD: usize = 64;

#[inline]
fn words(n: usize) -> usize {
    (n + WORD - 1) / WORD
}

#[inline]
pub fn vec_get(v: &[u64], i: usize) -> bool {
    v[i / WORD] >> (i % WORD) & 1 == 1
}

#[inline]
pub fn vec_flip(v: &mut [u64], i: usize) {
    v[i / WORD] ^= 1 << (i % WORD);
}

#[inline]
pub fn vec_xor(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

pub fn vec_is_zero(v: &[u64]) -> bool {
    v.iter().all(|w| *w == 0)
}

/// Parity of the AND of two packed vectors.
pub fn vec_dot(a: &[u64], b: &[u64]) -> u8 {
    let mut acc = 0u32;
    for (x, y) in a.iter().zip(b) {
        acc ^= (x & y).count_ones();
    }
    (acc & 1) as u8
}

/// Dense bit matrix over GF(2).
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    w: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let w = words(cols).max(1);
        BitMatrix { rows, cols, w, data: vec![0; rows * w] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.w..(r + 1) * self.w]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.w..(r + 1) * self.w]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        vec_get(self.row(r), c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = self.w;
        let word = &mut self.data[r * w + c / WORD];
        let m = 1u64 << (c % WORD);
        if v { *word |= m } else { *word &= !m }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.w + c / WORD] ^= 1 << (c % WORD);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.w;
        for i in 0..w {
            self.data.swap(a * w + i, b * w + i);
        }
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.w;
        let (lo, hi) = if dst < src {
            let (a, b) = self.data.split_at_mut(src * w);
            (&mut a[dst * w..dst * w + w], &b[..w])
        } else {
            let (a, b) = self.data.split_at_mut(dst * w);
            (&mut b[..w], &a[src * w..src * w + w])
        };
        for (d, s) in lo.iter_mut().zip(hi.iter()) {
            *d ^= s;
        }
    }

    /// In-place reduced row-echelon form over the first `limit` columns.
    /// Returns the pivot column of each leading row.
    pub fn rref_upto(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..limit.min(self.cols) {
            let mut pivot_row = None;
            for r in rank..self.rows {
                if self.get(r, col) {
                    pivot_row = Some(r);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            self.swap_rows(rank, pr);
            for r in 0..self.rows {
                if r != rank && self.get(r, col) {
                    self.xor_rows(r, rank);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    /// Full reduced row-echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_upto(self.cols)
    }

    /// Basis of the right kernel (assumes `self` already in RREF with
    /// `pivots` as returned by [`rref`](Self::rref)).
    pub fn kernel_from_rref(&self, pivots: &[usize]) -> Vec<Vec<u64>> {
        let piv_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if piv_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; words(self.cols)];
            vec_flip(&mut v, free);
            for (i, &p) in pivots.iter().enumerate() {
                if self.get(i, free) {
                    vec_flip(&mut v, p);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reduce `v` against the RREF rows; afterwards `v` is the canonical
    /// coset representative, zero iff `v` was in the row space.
    pub fn reduce_vec(&self, pivots: &[usize], v: &mut [u64]) {
        for (i, &p) in pivots.iter().enumerate() {
            if vec_get(v, p) {
                vec_xor(v, self.row(i));
            }
        }
    }
}

/// Solve `M x = rhs` where row `r` of `M` occupies the first `vars` columns
/// and `rhs` is packed per-row. Returns any solution, or `None`.
///
/// `M` is consumed as an augmented matrix with the RHS in column `vars`.
pub fn solve(mut aug: BitMatrix, vars: usize) -> Option<Vec<u64>> {
    debug_assert!(aug.cols() == vars + 1);
    let pivots = aug.rref_upto(vars);
    // Inconsistent iff a zero row has rhs 1.
    for r in pivots.len()..aug.rows() {
        if aug.get(r, vars) {
            return None;
        }
    }
    let mut x = vec![0u64; words(vars).max(1)];
    for (i, &p) in pivots.iter().enumerate() {
        if aug.get(i, vars) {
            vec_flip(&mut x, p);
        }
    }
    Some(x)
}
