//! Householder QR, orthonormal bases and orthogonal complements.

use crate::dense::matrix::{dot, norm2, DenseMatrix};
use crate::dense::svd::{default_rank_tol, singular_values};
use crate::error::{Error, Result};

/// Largest `‖ZᵀZ − I‖_max` accepted for an orthonormal basis.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// An m×k matrix with orthonormal columns (k may be 0).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis(DenseMatrix);

impl OrthonormalBasis {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if matrix.cols() > matrix.rows() {
            return Err(Error::InvalidArgument(format!(
                "basis with {} columns in R^{}",
                matrix.cols(),
                matrix.rows()
            )));
        }
        let residual = matrix.orthonormality_residual();
        if residual > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self(matrix))
    }

    pub(crate) fn trusted(matrix: DenseMatrix) -> Self {
        debug_assert!(matrix.orthonormality_residual() <= 1e-10);
        Self(matrix)
    }

    /// Span of the first `k` standard basis vectors of R^m.
    pub fn standard(m: usize, k: usize) -> Self {
        assert!(k <= m);
        Self(DenseMatrix::identity(m).columns(0, k))
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    /// Ambient dimension m.
    pub fn ambient(&self) -> usize {
        self.0.rows()
    }

    /// Subspace dimension k.
    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    /// `ZZᵀ` as an m×m matrix.
    pub fn projector_matrix(&self) -> DenseMatrix {
        self.0.gram_outer()
    }

    /// `(I − ZZᵀ)X` computed as `X − Z(ZᵀX)`.
    pub fn project_out(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let coeff = self.0.t_matmul(x)?;
        x.try_sub(&self.0.matmul(&coeff)?)
    }

    /// `ZZᵀX`.
    pub fn project(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.0.matmul(&self.0.t_matmul(x)?)
    }
}

/// Thin Householder QR `A = QR` with non-negative diagonal of `R`.
///
/// Returns `(Q, R)` with `Q` m×k, `R` k×k. Requires `m ≥ k`.
pub fn householder_qr(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, k) = a.shape();
    if k > m {
        return Err(Error::InvalidArgument(format!("thin QR needs rows >= cols, got {m}x{k}")));
    }
    let mut r = a.as_col_major().to_vec();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let x = &r[j * m + j..(j + 1) * m];
        let xnorm = norm2(x);
        let mut v = x.to_vec();
        if xnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        v[0] -= alpha;
        let vnorm = norm2(&v);
        v.iter_mut().for_each(|t| *t /= vnorm);
        for c in j..k {
            let col = &mut r[c * m + j..(c + 1) * m];
            let proj = 2.0 * dot(&v, col);
            col.iter_mut().zip(&v).for_each(|(t, vi)| *t -= proj * vi);
        }
        reflectors.push(v);
    }
    // Q = H₀ H₁ … H_{k−1} applied to the first k columns of I.
    let mut q = DenseMatrix::identity(m).columns(0, k).into_raw();
    for c in 0..k {
        let col = &mut q[c * m..(c + 1) * m];
        for (j, v) in reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let seg = &mut col[j..];
            let proj = 2.0 * dot(v, seg);
            seg.iter_mut().zip(v).for_each(|(t, vi)| *t -= proj * vi);
        }
    }
    let mut r_out = vec![0.0; k * k];
    for c in 0..k {
        for i in 0..=c {
            r_out[i + c * k] = r[i + c * m];
        }
    }
    // sign fix: diag(R) ≥ 0
    for i in 0..k {
        if r_out[i + i * k] < 0.0 {
            q[i * m..(i + 1) * m].iter_mut().for_each(|t| *t = -*t);
            for c in i..k {
                r_out[i + c * k] = -r_out[i + c * k];
            }
        }
    }
    Ok((DenseMatrix::from_raw(m, k, q), DenseMatrix::from_raw(k, k, r_out)))
}

/// Orthonormal basis of `range(a)`; `a` must have full column rank with
/// respect to the default tolerance `max(m,n)·eps·σ₁`.
pub fn orthonormalize(a: &DenseMatrix) -> Result<OrthonormalBasis> {
    let s = singular_values(a)?;
    let tol = default_rank_tol(a.rows(), a.cols(), s.first().copied().unwrap_or(0.0));
    orthonormalize_with_tol_impl(a, &s, tol)
}

pub fn orthonormalize_with_tol(a: &DenseMatrix, rank_tol: f64) -> Result<OrthonormalBasis> {
    let s = singular_values(a)?;
    orthonormalize_with_tol_impl(a, &s, rank_tol)
}

fn orthonormalize_with_tol_impl(a: &DenseMatrix, sigmas: &[f64], tol: f64) -> Result<OrthonormalBasis> {
    let rank = sigmas.iter().filter(|&&s| s > tol).count();
    if rank < a.cols() {
        return Err(Error::RankDeficient {
            expected: a.cols(),
            detected: rank,
        });
    }
    let (q, _) = householder_qr(a)?;
    Ok(OrthonormalBasis(q))
}

/// Basis of `range(Z)^⊥`, size m×(m−k).
pub fn complement_basis(z: &OrthonormalBasis) -> Result<OrthonormalBasis> {
    let (m, k) = z.matrix().shape();
    if k == m {
        return Err(Error::EmptyComplement { dim: m });
    }
    let known: Vec<Vec<f64>> = (0..k).map(|j| z.matrix().col(j).to_vec()).collect();
    let cols = complete_orthonormal(m, &known, m - k);
    Ok(OrthonormalBasis(DenseMatrix::from_columns(m, &cols)?))
}

/// Extends the orthonormal vectors `known` by `count` further orthonormal
/// vectors of R^m. Candidates are standard basis vectors; at each step the one
/// with the largest residual after two Gram–Schmidt passes is taken, which is
/// at least `1/√m` in norm, so the choice is always well conditioned.
pub(crate) fn complete_orthonormal(m: usize, known: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    assert!(known.len() + count <= m, "cannot complete beyond dimension");
    let mut basis: Vec<Vec<f64>> = known.to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            for _pass in 0..2 {
                for b in &basis {
                    let c = dot(b, &e);
                    e.iter_mut().zip(b).for_each(|(t, bi)| *t -= c * bi);
                }
            }
            let nrm = norm2(&e);
            if best.as_ref().is_none_or(|(bn, _)| nrm > *bn) {
                best = Some((nrm, e));
            }
        }
        let (nrm, mut e) = best.expect("m > 0");
        e.iter_mut().for_each(|t| *t /= nrm);
        basis.push(e.clone());
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_reconstructs_with_positive_diagonal() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, -4.0], [0.5, 6.0]]).unwrap();
        let (q, r) = householder_qr(&a).unwrap();
        assert!(q.orthonormality_residual() < 1e-14);
        assert!(r.get(0, 0) > 0.0 && r.get(1, 1) > 0.0);
        assert_eq!(r.get(1, 0), 0.0);
        assert!((&q * &r).max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn normalizes_single_vector() {
        let a = DenseMatrix::from_rows(&[[1.0], [1.0]]).unwrap();
        let z = orthonormalize(&a).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.matrix().get(0, 0).abs() - h).abs() < 1e-15);
        assert!((z.matrix().get(1, 0).abs() - h).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_input_is_kept_up_to_sign() {
        let z = OrthonormalBasis::standard(4, 2);
        let q = orthonormalize(z.matrix()).unwrap();
        for j in 0..2 {
            for i in 0..4 {
                assert!((q.matrix().get(i, j).abs() - z.matrix().get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rank_deficient_reports_rank() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        assert_eq!(
            orthonormalize(&a).unwrap_err(),
            Error::RankDeficient {
                expected: 2,
                detected: 1
            }
        );
    }

    #[test]
    fn complements() {
        let e1 = OrthonormalBasis::standard(2, 1);
        let c = complement_basis(&e1).unwrap();
        assert_eq!(c.matrix().get(0, 0), 0.0);
        assert_eq!(c.matrix().get(1, 0).abs(), 1.0);

        let e12 = OrthonormalBasis::standard(3, 2);
        let c = complement_basis(&e12).unwrap();
        assert_eq!(c.matrix().col(0), &[0.0, 0.0, 1.0]);

        assert_eq!(
            complement_basis(&OrthonormalBasis::standard(3, 3)).unwrap_err(),
            Error::EmptyComplement { dim: 3 }
        );
        let full = complement_basis(&OrthonormalBasis::standard(3, 0)).unwrap();
        assert_eq!(full.dim(), 3);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(OrthonormalBasis::new(a), Err(Error::NotOrthonormal { .. })));
    }
}
