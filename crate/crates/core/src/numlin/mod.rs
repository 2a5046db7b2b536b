//! Sparse complex linear algebra: compressed-row matrices, a band LU with
//! partial pivoting behind a reverse Cuthill–McKee reordering, and a
//! shift-invert eigensolver for quadratic eigenvalue problems
//! `(λ²M + λC + K)x = 0`.

mod band;
mod qep;
mod sparse;

pub use band::{lu_solve, rcm_ordering, BandLu};
pub use qep::{qep_backward_error, qep_solve, EigenPair, QepOptions};
pub use sparse::{SparseMatrix, TripletBuilder};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular: zero pivot in column {pivot}")]
    SingularPivot { pivot: usize },
    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error(
        "requested {requested} eigenpairs but the linearized problem has dimension {dimension}"
    )]
    TooManyEigenpairs { requested: usize, dimension: usize },
}

pub(crate) fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
