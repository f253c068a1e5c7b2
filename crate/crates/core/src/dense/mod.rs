//! Dense real linear algebra kernels.

mod approx;
mod matrix;
mod qr;
mod svd;

pub use approx::{pseudoinverse, pseudoinverse_with_tol, truncate, truncate_with_tol, RankKApprox};
pub use matrix::DenseMatrix;
pub use qr::{
    complement_basis, householder_qr, orthonormalize, orthonormalize_with_tol, OrthonormalBasis,
    ORTHONORMAL_TOL,
};
pub use svd::{default_rank_tol, singular_values, svd, SvdFactors, MAX_SWEEPS, ORTHOGONALITY_TOL};
