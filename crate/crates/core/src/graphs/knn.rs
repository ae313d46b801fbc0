//! Exhaustive k-nearest-neighbor search.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GlccError, Result};

/// Distance used for neighbor search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Euclidean => f.write_str("euclidean"),
        }
    }
}

/// Row-major copy of a sample matrix, rejecting non-finite cells.
pub(crate) struct Rows {
    pub n: usize,
    pub d: usize,
    data: Vec<f64>,
}

impl Rows {
    pub fn new(x: &DMatrix<f64>) -> Result<Self> {
        let (n, d) = x.shape();
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            for j in 0..d {
                let v = x[(i, j)];
                if !v.is_finite() {
                    return Err(GlccError::Data(format!(
                        "sample row {i} has a non-finite value in column {j}"
                    )));
                }
                data.push(v);
            }
        }
        Ok(Rows { n, d, data })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn distance(&self, metric: Metric, a: usize, b: usize) -> f64 {
        match metric {
            // Squared distance gives the same ordering and keeps ties exact.
            Metric::Euclidean => self
                .row(a)
                .iter()
                .zip(self.row(b))
                .map(|(p, q)| (p - q) * (p - q))
                .sum(),
        }
    }
}

/// The `k` nearest other samples of every row of `x`.
///
/// Each list is ordered by increasing distance; equal distances are broken
/// by the lower sample index.
pub fn nearest_neighbors(x: &DMatrix<f64>, k: usize, metric: Metric) -> Result<Vec<Vec<usize>>> {
    let rows = Rows::new(x)?;
    if rows.n < 2 {
        return Err(GlccError::Param(format!(
            "neighbor search needs at least 2 samples, got {}",
            rows.n
        )));
    }
    if k == 0 || k > rows.n - 1 {
        return Err(GlccError::Param(format!(
            "neighbor count k={k} must lie in [1, {}]",
            rows.n - 1
        )));
    }
    Ok(neighbors_of_rows(&rows, k, metric))
}

pub(crate) fn neighbors_of_rows(rows: &Rows, k: usize, metric: Metric) -> Vec<Vec<usize>> {
    (0..rows.n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<(f64, usize)> = (0..rows.n)
                .filter(|&j| j != i)
                .map(|j| (rows.distance(metric, i, j), j))
                .collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, cmp);
                cand.truncate(k);
            }
            cand.sort_by(cmp);
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_lower_index() {
        let x = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 2.0]);
        let nn = nearest_neighbors(&x, 1, Metric::Euclidean).unwrap();
        assert_eq!(nn, vec![vec![1], vec![0], vec![1]]);
    }

    #[test]
    fn rejects_bad_k_and_nan() {
        let x = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 2.0]);
        assert!(matches!(
            nearest_neighbors(&x, 0, Metric::Euclidean),
            Err(GlccError::Param(_))
        ));
        assert!(matches!(
            nearest_neighbors(&x, 3, Metric::Euclidean),
            Err(GlccError::Param(_))
        ));
        let y = DMatrix::from_column_slice(3, 1, &[0.0, f64::NAN, 2.0]);
        let err = nearest_neighbors(&y, 1, Metric::Euclidean).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }
}
