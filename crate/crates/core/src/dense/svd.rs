//! Full singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Column pairs of the working matrix are rotated until every pair is
//! numerically orthogonal; the column norms are then the singular values and
//! the accumulated rotations form `V`. No bidiagonalization and no RNG are
//! involved, so the factors are a pure function of the input.

use crate::dense::matrix::{dot, norm2, DenseMatrix};
use crate::dense::qr::complete_orthonormal;
use crate::error::{Error, Result};

/// Sweep budget before reporting non-convergence.
pub const MAX_SWEEPS: usize = 60;

/// A column pair counts as orthogonal once `|cos| < ORTHOGONALITY_TOL`.
pub const ORTHOGONALITY_TOL: f64 = 1e-14;

/// Full SVD `A = U Σ Vᵀ` with `U` m×m, `V` n×n and `min(m, n)` singular
/// values in non-ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    u: DenseMatrix,
    singular_values: Vec<f64>,
    v: DenseMatrix,
}

impl SvdFactors {
    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `σ_j` with 1-based index; zero past `min(m, n)`.
    pub fn sigma(&self, j: usize) -> f64 {
        assert!(j >= 1, "singular values are 1-indexed");
        self.singular_values.get(j - 1).copied().unwrap_or(0.0)
    }

    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    /// `max(m, n) · eps · σ₁`.
    pub fn default_rank_tol(&self) -> f64 {
        default_rank_tol(self.rows(), self.cols(), self.sigma(1))
    }

    pub fn numerical_rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn rank(&self) -> usize {
        self.numerical_rank(self.default_rank_tol())
    }

    /// `U Σ Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let r = self.singular_values.len();
        let us = scale_columns(&self.u.columns(0, r), &self.singular_values);
        us.matmul(&self.v.columns(0, r).transpose())
            .expect("reconstruct shapes")
    }
}

pub fn default_rank_tol(m: usize, n: usize, sigma1: f64) -> f64 {
    m.max(n) as f64 * f64::EPSILON * sigma1
}

pub(crate) fn scale_columns(a: &DenseMatrix, s: &[f64]) -> DenseMatrix {
    let m = a.rows();
    let mut data = a.as_col_major().to_vec();
    for (j, &sj) in s.iter().enumerate() {
        for x in &mut data[j * m..(j + 1) * m] {
            *x *= sj;
        }
    }
    DenseMatrix::from_raw(m, s.len(), data)
}

/// Full SVD of `a`.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    if m >= n {
        let (u, s, v) = svd_tall(a.clone())?;
        Ok(finish(u, s, v))
    } else {
        // Aᵀ = U' Σ V'ᵀ  ⇒  A = V' Σ U'ᵀ
        let (u_t, s, v_t) = svd_tall(a.transpose())?;
        Ok(finish(v_t, s, u_t))
    }
}

/// Singular values only (no vector accumulation), non-ascending.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    let work = if m >= n { a.clone() } else { a.transpose() };
    let (rows, cols) = work.shape();
    let mut w = work.into_raw();
    rotate_to_orthogonal(&mut w, rows, cols, None)?;
    let mut s: Vec<f64> = (0..cols).map(|j| norm2(&w[j * rows..(j + 1) * rows])).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// One-sided Jacobi on a matrix with at least as many rows as columns.
/// Returns (U m×m, σ, V n×n) with σ sorted, before sign normalization.
fn svd_tall(a: DenseMatrix) -> Result<(DenseMatrix, Vec<f64>, DenseMatrix)> {
    let (m, n) = a.shape();
    let mut w = a.into_raw();
    let mut v = DenseMatrix::identity(n).into_raw();
    rotate_to_orthogonal(&mut w, m, n, Some(&mut v))?;

    let norms: Vec<f64> = (0..n).map(|j| norm2(&w[j * m..(j + 1) * m])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep their column order
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigmas: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma1 = sigmas.first().copied().unwrap_or(0.0);
    // Columns at or below this level carry no usable direction.
    let cutoff = sigma1 * 1e-100;

    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(m);
    for (pos, &j) in order.iter().enumerate() {
        let s = sigmas[pos];
        if s > cutoff && s > 0.0 {
            u_cols.push(Some(w[j * m..(j + 1) * m].iter().map(|x| x / s).collect()));
        } else {
            u_cols.push(None);
        }
    }
    u_cols.resize(m, None);
    let known: Vec<Vec<f64>> = u_cols.iter().flatten().cloned().collect();
    let mut fill = complete_orthonormal(m, &known, m - known.len()).into_iter();
    let u_data: Vec<f64> = u_cols
        .into_iter()
        .flat_map(|c| c.unwrap_or_else(|| fill.next().expect("completion count")))
        .collect();

    let mut v_data = Vec::with_capacity(n * n);
    for &j in &order {
        v_data.extend_from_slice(&v[j * n..(j + 1) * n]);
    }
    Ok((
        DenseMatrix::from_raw(m, m, u_data),
        sigmas,
        DenseMatrix::from_raw(n, n, v_data),
    ))
}

/// Makes the first non-negligible entry of each left singular vector
/// non-negative, flipping the paired right vector with it.
fn finish(u: DenseMatrix, s: Vec<f64>, v: DenseMatrix) -> SvdFactors {
    let (m, n) = (u.rows(), v.rows());
    let mut u = u.into_raw();
    let mut v = v.into_raw();
    for j in 0..m {
        let col = &u[j * m..(j + 1) * m];
        let lead = col
            .iter()
            .find(|x| x.abs() > 1e-10)
            .or_else(|| col.iter().find(|x| **x != 0.0))
            .copied()
            .unwrap_or(0.0);
        if lead < 0.0 {
            u[j * m..(j + 1) * m].iter_mut().for_each(|x| *x = -*x);
            if j < n {
                v[j * n..(j + 1) * n].iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    SvdFactors {
        u: DenseMatrix::from_raw(m, m, u),
        singular_values: s,
        v: DenseMatrix::from_raw(n, n, v),
    }
}

/// Cyclic sweeps of plane rotations over all column pairs of `w` (m×n,
/// column-major) until each pair's cosine drops below [`ORTHOGONALITY_TOL`].
fn rotate_to_orthogonal(w: &mut [f64], m: usize, n: usize, mut v: Option<&mut Vec<f64>>) -> Result<()> {
    if n < 2 {
        return Ok(());
    }
    let mut worst = f64::INFINITY;
    for _sweep in 0..MAX_SWEEPS {
        worst = 0.0;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (ci, cj) = column_pair(w, m, i, j);
                let a = dot(ci, ci);
                let b = dot(cj, cj);
                let d = dot(ci, cj);
                if a == 0.0 || b == 0.0 || d == 0.0 {
                    continue;
                }
                let cos = d.abs() / (a.sqrt() * b.sqrt());
                worst = worst.max(cos);
                if cos < ORTHOGONALITY_TOL {
                    continue;
                }
                let zeta = (b - a) / (2.0 * d);
                let t = zeta.signum() / (zeta.abs() + 1.0_f64.hypot(zeta));
                let c = 1.0 / 1.0_f64.hypot(t);
                let s = c * t;
                rotate(ci, cj, c, s);
                if let Some(v) = v.as_deref_mut() {
                    let (vi, vj) = column_pair(v, n, i, j);
                    rotate(vi, vj, c, s);
                }
            }
        }
        if worst < ORTHOGONALITY_TOL {
            return Ok(());
        }
    }
    Err(Error::NotConverged {
        sweeps: MAX_SWEEPS,
        residual: worst,
    })
}

#[inline]
fn column_pair(w: &mut [f64], m: usize, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(i < j);
    let (head, tail) = w.split_at_mut(j * m);
    (&mut head[i * m..(i + 1) * m], &mut tail[..m])
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}
