//! Sparse symmetric matrices in canonical form.
//!
//! A [`SparseSym`] keeps the full (both triangles) pattern in compressed
//! sparse row layout with column indices sorted inside each row. It is built
//! from upper-triangle triplets, which are sorted stably and summed in
//! insertion order, so identical input sequences always yield bit-identical
//! matrices. On disk only the upper triangle is written.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlccError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Upper-triangle triplet lists, sorted by `(row, col)` with `row <= col`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triplets {
    pub n: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseSym {
    /// Empty `n x n` matrix.
    pub fn zeros(n: usize) -> Self {
        SparseSym {
            n,
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` entries of the upper triangle.
    ///
    /// Entries with `row > col` are swapped into the upper triangle first.
    /// Duplicates are summed in the order they appear.
    pub fn from_upper_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        for e in entries.iter_mut() {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
            assert!(e.1 < n, "triplet index {} out of range for n={n}", e.1);
        }
        entries.sort_by_key(|e| (e.0, e.1));

        let mut upper: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match upper.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => upper.push((r, c, v)),
            }
        }

        let mut counts = vec![0usize; n];
        for &(r, c, _) in &upper {
            counts[r] += 1;
            if r != c {
                counts[c] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let nnz = row_ptr[n];
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut next = row_ptr.clone();
        // Lower-triangle entries of row r come from upper entries (c, r) with
        // c < r; visiting in (row, col) order fills every row in ascending
        // column order.
        for &(r, c, v) in &upper {
            if r != c {
                let slot = next[c];
                cols[slot] = r;
                vals[slot] = v;
                next[c] += 1;
            }
            let slot = next[r];
            cols[slot] = c;
            vals[slot] = v;
            next[r] += 1;
        }
        let mut m = SparseSym {
            n,
            row_ptr,
            cols,
            vals,
        };
        m.sort_rows();
        m
    }

    fn sort_rows(&mut self) {
        for i in 0..self.n {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let row_sorted = self.cols[s..e].windows(2).all(|w| w[0] < w[1]);
            if !row_sorted {
                let mut pairs: Vec<(usize, f64)> = self.cols[s..e]
                    .iter()
                    .copied()
                    .zip(self.vals[s..e].iter().copied())
                    .collect();
                pairs.sort_by_key(|p| p.0);
                for (k, (c, v)) in pairs.into_iter().enumerate() {
                    self.cols[s + k] = c;
                    self.vals[s + k] = v;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries counting both triangles.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[s..e]
            .iter()
            .copied()
            .zip(self.vals[s..e].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[s..e].binary_search(&j) {
            Ok(k) => self.vals[s + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// Adds `scale * self` into a dense matrix.
    pub fn add_scaled_to_dense(&self, scale: f64, target: &mut DMatrix<f64>) {
        assert_eq!(target.nrows(), self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                target[(i, j)] += scale * v;
            }
        }
    }

    /// `self * x` for a dense `n x c` matrix.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.n);
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for col in 0..x.ncols() {
            let xc = x.column(col);
            for i in 0..self.n {
                let mut acc = 0.0;
                for (j, v) in self.row(i) {
                    acc += v * xc[j];
                }
                out[(i, col)] = acc;
            }
        }
        out
    }

    /// `Σ_k Σ_ij |M_ij| |F_ik| |F_jk|`, the magnitude that bounds the
    /// rounding error of [`SparseSym::trace_quad`].
    pub fn abs_trace_quad(&self, f: &DMatrix<f64>) -> f64 {
        assert_eq!(f.nrows(), self.n);
        let mut total = 0.0;
        for col in 0..f.ncols() {
            let fc = f.column(col);
            for i in 0..self.n {
                let acc: f64 = self.row(i).map(|(j, v)| (v * fc[j]).abs()).sum();
                total += fc[i].abs() * acc;
            }
        }
        total
    }

    /// Largest number of stored entries in a row.
    pub fn max_row_len(&self) -> usize {
        self.row_ptr
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    /// `Tr(Fᵀ M F)` for a dense `n x c` matrix `F`.
    pub fn trace_quad(&self, f: &DMatrix<f64>) -> f64 {
        assert_eq!(f.nrows(), self.n);
        let mut total = 0.0;
        for col in 0..f.ncols() {
            let fc = f.column(col);
            for i in 0..self.n {
                let mut acc = 0.0;
                for (j, v) in self.row(i) {
                    acc += v * fc[j];
                }
                total += fc[i] * acc;
            }
        }
        total
    }

    /// Sum of `weight_k * M_k`; all matrices must share `n`.
    pub fn weighted_sum<'a>(
        n: usize,
        terms: impl IntoIterator<Item = (f64, &'a SparseSym)>,
    ) -> Self {
        let mut entries = Vec::new();
        for (w, m) in terms {
            assert_eq!(m.n, n);
            for i in 0..n {
                for (j, v) in m.row(i) {
                    if i <= j {
                        entries.push((i, j, w * v));
                    }
                }
            }
        }
        SparseSym::from_upper_triplets(n, entries)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol))
    }

    pub fn all_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }

    pub fn to_triplets(&self) -> Triplets {
        let mut t = Triplets {
            n: self.n,
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
        };
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if i <= j {
                    t.rows.push(i);
                    t.cols.push(j);
                    t.vals.push(v);
                }
            }
        }
        t
    }

    pub fn from_triplets(t: &Triplets) -> Result<Self> {
        if t.rows.len() != t.cols.len() || t.rows.len() != t.vals.len() {
            return Err(GlccError::Data(format!(
                "triplet arrays differ in length: {} rows, {} cols, {} vals",
                t.rows.len(),
                t.cols.len(),
                t.vals.len()
            )));
        }
        let mut entries = Vec::with_capacity(t.rows.len());
        for k in 0..t.rows.len() {
            let (r, c, v) = (t.rows[k], t.cols[k], t.vals[k]);
            if r > c || c >= t.n {
                return Err(GlccError::Data(format!(
                    "triplet {k} ({r}, {c}) is not in the upper triangle of a {n}x{n} matrix",
                    n = t.n
                )));
            }
            if !v.is_finite() {
                return Err(GlccError::Data(format!(
                    "triplet {k} ({r}, {c}) is not finite"
                )));
            }
            entries.push((r, c, v));
        }
        Ok(SparseSym::from_upper_triplets(t.n, entries))
    }
}
