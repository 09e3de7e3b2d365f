//! The mixing parameter on the zero-sum subspace.

use crate::bp::BranchingProgram;
use crate::matrix::Mat;

use super::layered::LayeredFunction;

/// Orthonormal basis of `{x : Σ x_i = 0}` in `R^w`, one basis vector per row.
pub fn helmert_basis(w: usize) -> Mat {
    let mut h = Mat::zeros(w.saturating_sub(1), w);
    for j in 1..w {
        let norm = ((j * (j + 1)) as f64).sqrt();
        for i in 0..j {
            h[(j - 1, i)] = 1.0 / norm;
        }
        h[(j - 1, j)] = -(j as f64) / norm;
    }
    h
}

/// `max_{Σx=0} ‖x·E‖₂ / ‖x‖₂`; zero when `E` has a single row.
pub fn lambda_of_matrix(e: &Mat) -> f64 {
    if e.rows() <= 1 {
        return 0.0;
    }
    (&helmert_basis(e.rows()) * e).spectral_norm()
}

/// `λ(D)` of the expectation matrix `E_U[D[U]]`.
pub fn lambda(d: &BranchingProgram) -> f64 {
    lambda_of_matrix(&LayeredFunction::from_bp(d).expectation())
}

pub fn lambda_layered(f: &LayeredFunction) -> f64 {
    lambda_of_matrix(&f.expectation())
}
