use std::collections::HashMap;

use crate::{Error, Result};

pub(crate) type Accumulator = HashMap<(u32, u32), u64>;

/// Square sparse matrix of nonnegative integer weights in compressed rows.
///
/// Rows are stored in ascending column order and no stored value is zero,
/// so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<u64>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, weight)` triples. Duplicates are
    /// summed and zero weights dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, u64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r as usize >= n || c as usize >= n) {
            return Err(Error::param(format!("entry ({r}, {c}) outside a {n}x{n} matrix")));
        }
        // Weights are nonnegative, so a merged entry is zero only if every part is.
        triplets.retain(|&(_, _, w)| w > 0);
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<u64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, w) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += w;
                continue;
            }
            indices.push(c);
            values.push(w);
            indptr[r as usize + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self {
            n,
            indptr,
            indices,
            values,
        })
    }

    pub(crate) fn from_accumulator(n: usize, acc: Accumulator) -> Self {
        let triplets = acc.into_iter().map(|((r, c), w)| (r, c, w)).collect();
        Self::from_triplets(n, triplets).expect("accumulated indices lie inside the vocabulary")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        if row >= self.n {
            return 0;
        }
        let (cols, vals) = self.row_slices(row);
        match cols.binary_search(&(col as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0,
        }
    }

    /// Nonzero `(col, weight)` pairs of `row` in ascending column order.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let (cols, vals) = self.row_slices(row);
        cols.iter().zip(vals).map(|(&c, &w)| (c as usize, w))
    }

    fn row_slices(&self, row: usize) -> (&[u32], &[u64]) {
        let (a, b) = (self.indptr[row], self.indptr[row + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn row_is_empty(&self, row: usize) -> bool {
        self.indptr[row] == self.indptr[row + 1]
    }

    /// All nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.n).flat_map(move |r| self.row(r).map(move |(c, w)| (r, c, w)))
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.iter().map(|(r, c, w)| (c as u32, r as u32, w)).collect();
        Self::from_triplets(self.n, triplets).expect("transpose keeps indices in range")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let triplets = self
            .iter()
            .chain(other.iter())
            .map(|(r, c, w)| (r as u32, c as u32, w))
            .collect();
        Self::from_triplets(self.n, triplets)
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(r, c, w)| self.get(c, r) == w)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| self.row(r).map(|(c, w)| w as f64 * x[c]).sum())
            .collect()
    }
}
