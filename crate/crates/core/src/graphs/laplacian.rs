use nalgebra::DMatrix;

use super::knn::{nearest_neighbors, Metric};
use crate::error::Result;
use crate::sparse::SparseSym;

/// Symmetrized binary k-NN adjacency: `A[i][j] = 1` when either sample is
/// among the other's `k` nearest neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    matrix: SparseSym,
    k: usize,
}

impl AdjacencyMatrix {
    pub fn matrix(&self) -> &SparseSym {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self, i: usize) -> usize {
        self.matrix.row(i).count()
    }
}

/// Builds the symmetrized k-NN adjacency of the rows of `x`.
pub fn build_adjacency(x: &DMatrix<f64>, k: usize, metric: Metric) -> Result<AdjacencyMatrix> {
    let n = x.nrows();
    let neighbors = nearest_neighbors(x, k, metric)?;
    let mut entries = Vec::with_capacity(n * k);
    for (i, list) in neighbors.iter().enumerate() {
        for &j in list {
            entries.push((i.min(j), i.max(j), 1.0));
        }
    }
    // Mutual neighbors show up twice; keep the pattern binary.
    entries.sort_by_key(|e| (e.0, e.1));
    entries.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    Ok(AdjacencyMatrix {
        matrix: SparseSym::from_upper_triplets(n, entries),
        k,
    })
}

/// Unnormalized graph Laplacian `L = D - A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(pub(crate) SparseSym);

impl LaplacianMatrix {
    pub fn matrix(&self) -> &SparseSym {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// Wraps an already assembled matrix, e.g. one read from a graph cache.
    pub fn from_matrix(m: SparseSym) -> Self {
        LaplacianMatrix(m)
    }
}

pub fn build_laplacian(adjacency: &AdjacencyMatrix) -> LaplacianMatrix {
    let a = adjacency.matrix();
    let n = a.n();
    let mut entries = Vec::with_capacity(a.nnz() / 2 + n);
    for i in 0..n {
        let mut degree = 0.0;
        for (j, v) in a.row(i) {
            degree += v;
            if i < j {
                entries.push((i, j, -v));
            }
        }
        entries.push((i, i, degree));
    }
    LaplacianMatrix(SparseSym::from_upper_triplets(n, entries))
}
