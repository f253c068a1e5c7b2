//! Orthogonal projectors, principal angles and CS-decomposition block sizes.
//!
//! Projectors are carried by an orthonormal basis of their range; the m×m
//! matrix is only formed on request.

use crate::checkers::{BoundReport, Inequality};
use crate::dense::{complement_basis, singular_values, svd, DenseMatrix, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::schatten::{schatten_norm_of_singular_values, SchattenIndex};

/// Default threshold for classifying a cosine as 1 (intersection) or 0.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-8;

/// Largest admissible rounding excess of a cosine over 1.
pub const CLAMP_LIMIT: f64 = 1e-12;

/// Orthogonal projector `P = ZZᵀ` onto `range(Z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    basis: OrthonormalBasis,
}

impl Projector {
    pub fn from_orthonormal(z: OrthonormalBasis) -> Self {
        Self { basis: z }
    }

    /// `ẐẐ†` for a full-column-rank `Ẑ`, carried by the left singular
    /// vectors of `Ẑ` (which span the same range).
    pub fn from_full_rank(z_hat: &DenseMatrix) -> Result<Self> {
        let f = svd(z_hat)?;
        let rank = f.rank();
        if rank < z_hat.cols() {
            return Err(Error::RankDeficient {
                expected: z_hat.cols(),
                detected: rank,
            });
        }
        let u = f.u().columns(0, rank);
        Ok(Self {
            basis: OrthonormalBasis::new(u)?,
        })
    }

    /// The zero projector on R^m.
    pub fn zero(m: usize) -> Self {
        Self {
            basis: OrthonormalBasis::standard(m, 0),
        }
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.dim()
    }

    pub fn ambient(&self) -> usize {
        self.basis.ambient()
    }

    /// `P` as an m×m matrix.
    pub fn matrix(&self) -> DenseMatrix {
        self.basis.projector_matrix()
    }

    /// `(I − P)X`.
    pub fn apply_complement(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.basis.project_out(x)
    }

    /// `PX`.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.basis.project(x)
    }

    /// Orthonormal basis of `range(I − P)`; m×0 when `P = I`.
    pub fn complement_basis(&self) -> OrthonormalBasis {
        if self.rank() == self.ambient() {
            OrthonormalBasis::standard(self.ambient(), 0)
        } else {
            complement_basis(&self.basis).expect("rank < ambient")
        }
    }
}

/// Principal angles between a k-dimensional and an ℓ-dimensional subspace,
/// `ℓ ≥ k`: cosines non-ascending, sines non-descending.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    pub cosines: Vec<f64>,
    pub sines: Vec<f64>,
    /// How far the largest raw cosine exceeded 1 before clamping.
    pub clamp_excess: f64,
}

impl PrincipalAngles {
    pub fn angles(&self) -> Vec<f64> {
        self.cosines
            .iter()
            .zip(&self.sines)
            .map(|(c, s)| s.atan2(*c))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cosines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosines.is_empty()
    }

    pub fn sin_norm(&self, p: SchattenIndex) -> f64 {
        schatten_norm_of_singular_values(&self.sines, p).expect("sines are in [0,1]")
    }

    pub fn cos_norm(&self, p: SchattenIndex) -> f64 {
        schatten_norm_of_singular_values(&self.cosines, p).expect("cosines are in [0,1]")
    }
}

/// Cosines are the singular values of `ZᵀẐ`. Sines of angles whose cosine
/// exceeds `1/√2` are taken from the singular values of `(I − ẐẐᵀ)Z`
/// instead of `√(1 − cos²)`, which would cancel for small angles.
pub fn principal_angles(z: &OrthonormalBasis, z_hat: &OrthonormalBasis) -> Result<PrincipalAngles> {
    if z.ambient() != z_hat.ambient() {
        return Err(Error::ShapeMismatch {
            op: "principal_angles",
            left: z.matrix().shape(),
            right: z_hat.matrix().shape(),
        });
    }
    let (k, l) = (z.dim(), z_hat.dim());
    if l < k {
        return Err(Error::InvalidArgument(format!(
            "principal_angles expects dim(z) <= dim(z_hat), got {k} > {l}; swap the arguments"
        )));
    }
    if k == 0 {
        return Ok(PrincipalAngles {
            cosines: Vec::new(),
            sines: Vec::new(),
            clamp_excess: 0.0,
        });
    }
    let raw = singular_values(&z.matrix().t_matmul(z_hat.matrix())?)?;
    let clamp_excess = raw.iter().map(|c| (c - 1.0).max(0.0)).fold(0.0, f64::max);
    let cosines: Vec<f64> = raw.iter().map(|c| c.clamp(0.0, 1.0)).collect();

    let threshold = std::f64::consts::FRAC_1_SQRT_2;
    let mut sines: Vec<f64> = cosines.iter().map(|c| (1.0 - c * c).max(0.0).sqrt()).collect();
    if cosines.iter().any(|&c| c > threshold) {
        let residual = z_hat.project_out(z.matrix())?;
        let mut small = singular_values(&residual)?;
        small.reverse();
        for (j, c) in cosines.iter().enumerate() {
            if *c > threshold {
                sines[j] = small[j].clamp(0.0, 1.0);
            }
        }
    }
    Ok(PrincipalAngles {
        cosines,
        sines,
        clamp_excess,
    })
}

/// `‖sinΘ(Z, Ẑ)‖_p`, requires `dim(Ẑ) ≥ dim(Z)`.
pub fn sin_theta_norm(z: &OrthonormalBasis, z_hat: &OrthonormalBasis, p: SchattenIndex) -> Result<f64> {
    Ok(principal_angles(z, z_hat)?.sin_norm(p))
}

/// `‖P₁ − P₂‖₂` for projectors of equal rank.
pub fn projector_distance(p1: &Projector, p2: &Projector) -> Result<f64> {
    if p1.rank() != p2.rank() {
        return Err(Error::UnequalRanks {
            left: p1.rank(),
            right: p2.rank(),
        });
    }
    if p1.ambient() != p2.ambient() {
        return Err(Error::ShapeMismatch {
            op: "projector_distance",
            left: (p1.ambient(), p1.rank()),
            right: (p2.ambient(), p2.rank()),
        });
    }
    let diff = p1.matrix().try_sub(&p2.matrix())?;
    Ok(singular_values(&diff)?.first().copied().unwrap_or(0.0))
}

/// Block sizes of the CS decomposition of `(Z Z_⊥)ᵀ(Ẑ Ẑ_⊥)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsBlockDims {
    /// `dim(range Z ∩ range Ẑ)`.
    pub r: usize,
    /// Number of angles strictly between 0 and π/2.
    pub s: usize,
    /// `k − (r + s) = dim(range Z ∩ range Ẑ_⊥)`.
    pub k_minus: usize,
    /// `ℓ − (r + s) = dim(range Z_⊥ ∩ range Ẑ)`.
    pub l_minus: usize,
    /// `m − (k + ℓ) + r = dim(range Z_⊥ ∩ range Ẑ_⊥)`.
    pub m_rem: usize,
}

impl CsBlockDims {
    /// The arithmetic relations between the blocks for given `(k, ℓ, m)`.
    pub fn consistent_with(&self, k: usize, l: usize, m: usize) -> bool {
        self.r + self.s + self.k_minus == k
            && self.r + self.s + self.l_minus == l
            && self.r + self.s + self.k_minus + self.m_rem + self.s + self.l_minus == m
    }
}

fn check_cs_window(bound_id: &'static str, k: usize, l: usize, m: usize) -> Result<()> {
    if !(k < l) {
        return Err(Error::hypothesis(bound_id, format!("k < l violated (k={k}, l={l})")));
    }
    if !(l + k < m) {
        return Err(Error::hypothesis(bound_id, format!("l < m - k violated (k={k}, l={l}, m={m})")));
    }
    Ok(())
}

/// Requires `k < ℓ < m − k`.
pub fn cs_block_dims(z: &OrthonormalBasis, z_hat: &OrthonormalBasis, angle_tol: f64) -> Result<CsBlockDims> {
    let (k, l, m) = (z.dim(), z_hat.dim(), z.ambient());
    check_cs_window("cs_a1", k, l, m)?;
    let angles = principal_angles(z, z_hat)?;
    let r = angles.cosines.iter().filter(|&&c| c >= 1.0 - angle_tol).count();
    let k_minus = angles.cosines.iter().filter(|&&c| c <= angle_tol).count();
    let s = k - r - k_minus;
    Ok(CsBlockDims {
        r,
        s,
        k_minus,
        l_minus: l - (r + s),
        m_rem: m - (k + l) + r,
    })
}

/// Checks, in the two-norm, the Frobenius norm and `p`:
///
/// - `‖sinΘ(Z,Ẑ)‖ = ‖ZᵀẐ_⊥‖`
/// - `‖cosΘ(Z,Ẑ)‖ = ‖ZᵀẐ‖`
/// - `‖cosΘ(Z_⊥,Ẑ_⊥)‖ = ‖diag(I_{m−(k+ℓ)}, cosΘ(Z,Ẑ))‖`
///
/// The report's `lhs` is the largest absolute discrepancy (target 0).
pub fn verify_cs_identities(
    z: &OrthonormalBasis,
    z_hat: &OrthonormalBasis,
    p: SchattenIndex,
) -> Result<BoundReport> {
    const TOL: f64 = 1e-10;
    let (k, l, m) = (z.dim(), z_hat.dim(), z.ambient());
    check_cs_window("cs_a2", k, l, m)?;

    let angles = principal_angles(z, z_hat)?;
    let z_perp = complement_basis(z)?;
    let zh_perp = complement_basis(z_hat)?;

    let sin_side = singular_values(&z.matrix().t_matmul(zh_perp.matrix())?)?;
    let cos_side = singular_values(&z.matrix().t_matmul(z_hat.matrix())?)?;
    let perp_side = singular_values(&z_perp.matrix().t_matmul(zh_perp.matrix())?)?;
    let mut padded = vec![1.0; m - (k + l)];
    padded.extend_from_slice(&angles.cosines);

    let mut norms = vec![SchattenIndex::Inf, SchattenIndex::FROBENIUS];
    if !norms.contains(&p) {
        norms.push(p);
    }
    let sv = |s: &[f64], q| schatten_norm_of_singular_values(s, q).expect("non-negative");
    let mut worst: f64 = 0.0;
    let mut report_checks = Vec::new();
    for q in norms {
        let d1 = (angles.sin_norm(q) - sv(&sin_side, q)).abs();
        let d2 = (angles.cos_norm(q) - sv(&cos_side, q)).abs();
        let d3 = (sv(&perp_side, q) - sv(&padded, q)).abs();
        report_checks.push(Inequality::upper(format!("sin_identity_p{q}"), d1, 0.0, TOL));
        report_checks.push(Inequality::upper(format!("cos_identity_p{q}"), d2, 0.0, TOL));
        report_checks.push(Inequality::upper(format!("perp_cos_identity_p{q}"), d3, 0.0, TOL));
        worst = worst.max(d1).max(d2).max(d3);
    }
    let dims = cs_block_dims(z, z_hat, DEFAULT_ANGLE_TOL)?;
    let mut report = BoundReport::new("cs_a2", (m, l), Inequality::upper("cs_a2", worst, 0.0, TOL))
        .with_k(k)
        .with_p(p)
        .scalar("l", l as f64)
        .scalar("r", dims.r as f64)
        .scalar("s", dims.s as f64)
        .scalar("k_minus", dims.k_minus as f64)
        .scalar("l_minus", dims.l_minus as f64)
        .scalar("m_rem", dims.m_rem as f64);
    for c in report_checks {
        report = report.sub_check(c);
    }
    Ok(report)
}
