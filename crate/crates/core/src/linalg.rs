//! Dense symmetric eigensolver shared by the spectral and SDP code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen(m: &DMatrix<f64>) -> SortedEigen {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = m.nrows();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SortedEigen {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors,
    }
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Largest eigenvalue and a unit eigenvector for it.
pub fn max_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = symmetric_eigen(m);
    let last = eig.values.len() - 1;
    (eig.values[last], eig.vectors.column(last).into_owned())
}

/// Projection onto the positive semidefinite cone (negative eigenvalues clipped to zero).
/// Returns the projection and the full decomposition used to form it.
pub fn psd_part(m: &DMatrix<f64>) -> (DMatrix<f64>, SortedEigen) {
    let eig = symmetric_eigen(m);
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (i, &lambda) in eig.values.iter().enumerate() {
        if lambda > 0.0 {
            let v = eig.vectors.column(i);
            out.ger(lambda, &v, &v, 1.0);
        }
    }
    (out, eig)
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}
