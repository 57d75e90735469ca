//! Shared test helpers: a dense full-spectrum oracle for small pencils.

use nalgebra::DMatrix;
use symmspec::assembly::OperatorMatrices;

/// All eigenvalues of K u = lambda M u by dense reduction to standard form
/// (L^-1 K L^-T with M = L L^T), ascending. Independent of the sparse
/// iterative path; only valid for small systems.
pub fn dense_generalized_eigenvalues(ops: &OperatorMatrices) -> Vec<f64> {
    let n = ops.reduced_dim();
    let to_dmatrix = |rows: Vec<Vec<f64>>| {
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    };
    let k = to_dmatrix(ops.stiffness.to_dense());
    let m = to_dmatrix(ops.mass.to_dense());
    let chol = m.cholesky().expect("mass matrix must be positive definite");
    let l = chol.l();
    let y = l
        .solve_lower_triangular(&k)
        .expect("lower solve");
    let z = l
        .solve_lower_triangular(&y.transpose())
        .expect("lower solve");
    let sym = (z.clone() + z.transpose()) * 0.5;
    let mut vals: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}
