//! Packed GF(2) rows: one bit per coordinate, 64 coordinates per word.

use super::matrix::FMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedRows {
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl PackedRows {
    pub fn from_matrix(m: &FMatrix) -> Self {
        debug_assert!(m.field().is_binary());
        let words = m.cols().div_ceil(64).max(1);
        let mut data = vec![0u64; m.rows() * words];
        for r in 0..m.rows() {
            for (c, &e) in m.row(r).iter().enumerate() {
                if e != 0 {
                    data[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        PackedRows {
            cols: m.cols(),
            words,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.words
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows()).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Minimum weight over all nonzero XOR-combinations of the rows, by Gray
    /// code walk over `2^rows - 1` combinations. The rows must be independent
    /// for this to be the minimum distance of their row space.
    pub fn min_combination_weight(&self) -> Option<usize> {
        let k = self.rows();
        if k == 0 || k >= 64 {
            return None;
        }
        let mut acc = vec![0u64; self.words];
        let mut best = usize::MAX;
        for step in 1u64..(1u64 << k) {
            let flip = step.trailing_zeros() as usize;
            for (a, b) in acc.iter_mut().zip(self.row(flip)) {
                *a ^= b;
            }
            let w: usize = acc.iter().map(|x| x.count_ones() as usize).sum();
            best = best.min(w);
        }
        Some(best)
    }
}
