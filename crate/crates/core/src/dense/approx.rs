//! Best rank-k truncation and the Moore–Penrose pseudoinverse.

use crate::dense::matrix::DenseMatrix;
use crate::dense::qr::OrthonormalBasis;
use crate::dense::svd::{default_rank_tol, scale_columns, svd, SvdFactors};
use crate::error::{Error, Result};

/// `A_k = U_k Σ_k V_kᵀ` together with the factors it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct RankKApprox {
    k: usize,
    a_k: DenseMatrix,
    basis: OrthonormalBasis,
    right: DenseMatrix,
    sigmas: Vec<f64>,
}

impl RankKApprox {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a_k(&self) -> &DenseMatrix {
        &self.a_k
    }

    /// `U_k`, the dominant left singular vectors.
    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    /// `V_k`.
    pub fn right_vectors(&self) -> &DenseMatrix {
        &self.right
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// `A_k† = V_k Σ_k⁻¹ U_kᵀ`.
    pub fn pinv(&self) -> DenseMatrix {
        let inv: Vec<f64> = self.sigmas.iter().map(|s| 1.0 / s).collect();
        scale_columns(&self.right, &inv)
            .matmul(&self.basis.matrix().transpose())
            .expect("pinv shapes")
    }
}

/// Best rank-k approximation from precomputed factors.
///
/// Fails when `k` exceeds the numerical rank under the default tolerance.
pub fn truncate(f: &SvdFactors, k: usize) -> Result<RankKApprox> {
    truncate_with_tol(f, k, f.default_rank_tol())
}

pub fn truncate_with_tol(f: &SvdFactors, k: usize, rank_tol: f64) -> Result<RankKApprox> {
    let rank = f.numerical_rank(rank_tol);
    if k == 0 {
        return Err(Error::InvalidArgument("truncation rank must be positive".into()));
    }
    if k > rank {
        return Err(Error::RankTooLow { requested: k, rank });
    }
    let u_k = f.u().columns(0, k);
    let v_k = f.v().columns(0, k);
    let sigmas = f.singular_values()[..k].to_vec();
    let a_k = scale_columns(&u_k, &sigmas).matmul(&v_k.transpose())?;
    Ok(RankKApprox {
        k,
        a_k,
        basis: OrthonormalBasis::trusted(u_k),
        right: v_k,
        sigmas,
    })
}

/// Moore–Penrose pseudoinverse; singular values `≤ rank_tol` count as zero.
pub fn pseudoinverse_with_tol(a: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    if rank_tol.is_nan() || rank_tol < 0.0 {
        return Err(Error::InvalidArgument(format!("rank_tol must be >= 0, got {rank_tol}")));
    }
    let f = svd(a)?;
    Ok(pinv_from_factors(&f, rank_tol))
}

/// Pseudoinverse with the default tolerance `max(m,n)·eps·σ₁`.
pub fn pseudoinverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    let f = svd(a)?;
    let tol = default_rank_tol(a.rows(), a.cols(), f.sigma(1));
    Ok(pinv_from_factors(&f, tol))
}

pub(crate) fn pinv_from_factors(f: &SvdFactors, rank_tol: f64) -> DenseMatrix {
    let r = f.numerical_rank(rank_tol);
    let inv: Vec<f64> = f.singular_values()[..r].iter().map(|s| 1.0 / s).collect();
    scale_columns(&f.v().columns(0, r), &inv)
        .matmul(&f.u().columns(0, r).transpose())
        .expect("pinv shapes")
}
