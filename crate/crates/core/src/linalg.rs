//! Dense linear-algebra helpers shared by the update operators.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{GlccError, Result};

/// Residual-correction passes after the Cholesky solve.
const REFINE_STEPS: usize = 2;

/// Solves `A X = B` for symmetric positive definite `A` by Cholesky, followed
/// by iterative refinement. The label systems mix a unit diagonal with
/// `w_large`-sized entries, and the plain solve then leaves enough forward
/// error to show up in the objective.
///
/// Returns `None` when the factorization breaks down.
pub fn spd_solve(a: DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let chol = Cholesky::new(a.clone())?;
    let mut x = chol.solve(b);
    for _ in 0..REFINE_STEPS {
        let residual = b - &a * &x;
        x += chol.solve(&residual);
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Like [`spd_solve`] but turns a breakdown into a numerical error naming
/// `what`.
pub fn spd_solve_or_err(a: DMatrix<f64>, b: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    spd_solve(a, b).ok_or_else(|| {
        GlccError::Numerical(format!("{what}: system matrix is not positive definite"))
    })
}

/// Ridge solution `(XᵀX + γI)⁻¹ Xᵀ T`.
pub fn ridge_solve(x: &DMatrix<f64>, target: &DMatrix<f64>, gamma: f64) -> Result<DMatrix<f64>> {
    let mut gram = x.transpose() * x;
    for k in 0..gram.nrows() {
        gram[(k, k)] += gamma;
    }
    let rhs = x.transpose() * target;
    spd_solve_or_err(gram, &rhs, "ridge normal equations")
}

/// Column means of `m` as a row vector of length `ncols`.
pub fn column_means(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows().max(1) as f64;
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n))
}

/// Eigenpairs of a symmetric matrix sorted by decreasing eigenvalue, ties
/// kept in index order.
pub fn sorted_symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&o| eig.eigenvalues[o]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Moore-Penrose pseudoinverse `(MᵀM)⁺ Mᵀ`, with eigenvalues of `MᵀM`
/// below `rel_tol * λ_max` treated as zero.
///
/// nalgebra's SVD occasionally fails to converge to an accurate
/// factorization on rank-deficient input, while its symmetric eigensolver
/// does not; squaring the condition number is harmless for the small, well
/// scaled systems this is used on.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (values, vectors) = sorted_symmetric_eigen(m.transpose() * m);
    let top = values.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let inv = if v > rel_tol * top { 1.0 / v } else { 0.0 };
        scaled.column_mut(c).scale_mut(inv);
    }
    scaled * vectors.transpose() * m.transpose()
}
