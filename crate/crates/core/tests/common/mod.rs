//! Reference computations for the integration tests. Nothing here calls the
//! library's kernels: matrices are plain row vectors and singular values come
//! from a cyclic Jacobi eigensolver applied to the symmetric embedding
//! `[[0, A], [Aᵀ, 0]]`.
#![allow(dead_code)]

use lowrank_perturb::dense::DenseMatrix;

pub type Mat = Vec<Vec<f64>>;

pub fn rows(a: &DenseMatrix) -> Mat {
    a.to_rows()
}

pub fn to_dense(a: &Mat) -> DenseMatrix {
    DenseMatrix::from_rows(a).unwrap()
}

pub fn zeros(m: usize, n: usize) -> Mat {
    vec![vec![0.0; n]; m]
}

pub fn eye(m: usize) -> Mat {
    let mut out = zeros(m, m);
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    out
}

pub fn shape(a: &Mat) -> (usize, usize) {
    (a.len(), a.first().map_or(0, Vec::len))
}

pub fn transpose(a: &Mat) -> Mat {
    let (m, n) = shape(a);
    (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (m, k) = shape(a);
    let n = shape(b).1;
    assert_eq!(k, b.len(), "inner dimensions");
    let mut out = zeros(m, n);
    for i in 0..m {
        for l in 0..k {
            let x = a[i][l];
            for j in 0..n {
                out[i][j] += x * b[l][j];
            }
        }
    }
    out
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `QQᵀ` for a matrix with orthonormal columns.
pub fn projector(q: &Mat) -> Mat {
    mul(q, &transpose(q))
}

pub fn complement_projector(q: &Mat) -> Mat {
    sub(&eye(q.len()), &projector(q))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut a = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// All `min(m, n)` singular values, descending.
pub fn sigmas(a: &Mat) -> Vec<f64> {
    let (m, n) = shape(a);
    let r = m.min(n);
    if r == 0 {
        return Vec::new();
    }
    let mut big = zeros(m + n, m + n);
    for i in 0..m {
        for j in 0..n {
            big[i][m + j] = a[i][j];
            big[m + j][i] = a[i][j];
        }
    }
    symmetric_eigenvalues(&big).into_iter().take(r).map(|x| x.max(0.0)).collect()
}

pub fn sigmas_of(a: &DenseMatrix) -> Vec<f64> {
    sigmas(&rows(a))
}

/// Schatten norm from singular values; `p = None` is the spectral norm.
pub fn schatten_sv(s: &[f64], p: Option<u32>) -> f64 {
    match p {
        None => s.iter().fold(0.0, |acc: f64, x| acc.max(*x)),
        Some(p) => s.iter().map(|x| x.powi(p as i32)).sum::<f64>().powf(1.0 / p as f64),
    }
}

pub fn schatten(a: &Mat, p: Option<u32>) -> f64 {
    schatten_sv(&sigmas(a), p)
}

pub fn two_norm(a: &Mat) -> f64 {
    schatten(a, None)
}

pub fn fro(a: &Mat) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Modified Gram–Schmidt, applied twice, on the columns of `a`.
pub fn gram_schmidt(a: &Mat) -> Mat {
    let (m, n) = shape(a);
    let mut cols: Vec<Vec<f64>> = transpose(a);
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let d: f64 = (0..m).map(|r| cols[i][r] * cols[j][r]).sum();
                for r in 0..m {
                    cols[j][r] -= d * cols[i][r];
                }
            }
        }
        let nrm = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(nrm > 1e-10, "dependent columns");
        for x in &mut cols[j] {
            *x /= nrm;
        }
    }
    transpose(&cols)
}

/// Sines of the principal angles between orthonormal column sets
/// (`q1` has at most as many columns as `q2`), ascending by angle.
pub fn angle_sines(q1: &Mat, q2: &Mat) -> Vec<f64> {
    let k = shape(q1).1;
    let cos = sigmas(&mul(&transpose(q1), q2));
    let mut out: Vec<f64> = cos.iter().take(k).map(|c| (1.0 - c.min(1.0).powi(2)).max(0.0).sqrt()).collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Relative comparison scaled by `max(1, |expected|)`.
pub fn close(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol * expected.abs().max(1.0)
}

#[test]
fn oracle_sigmas_of_known_matrix() {
    let a = vec![vec![3.0, 0.0], vec![0.0, -4.0], vec![0.0, 0.0]];
    let s = sigmas(&a);
    assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    let r = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
    let s = sigmas(&r);
    assert!((s[0] - 2.0).abs() < 1e-14 && s[1].abs() < 1e-14);
}
