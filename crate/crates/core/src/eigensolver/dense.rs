use nalgebra::DMatrix;

use super::block::sorted_eigen;
use crate::sparse::SparseSymMatrix;

/// Full symmetric eigendecomposition, truncated to the `k` smallest pairs.
pub(super) fn smallest(a: &SparseSymMatrix, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.dim();
    let mut dense = DMatrix::zeros(n, n);
    for (r, c, v) in a.triplets() {
        dense[(r, c)] = v;
    }
    let (values, vectors) = sorted_eigen(dense);
    (values[..k].to_vec(), vectors.columns(0, k).into_owned())
}
