use super::{norm, two_norm, BoundReport, Inequality, ToleranceModel};
use crate::dense::{pseudoinverse, svd, truncate, DenseMatrix, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::schatten::SchattenIndex;
use crate::subspaces::Projector;

/// `ε = ‖Ẑ†‖₂ ‖Z − Ẑ‖₂` and `‖Z − Ẑ‖₂`.
fn eps_and_distance(z: &DenseMatrix, z_hat: &DenseMatrix) -> Result<(f64, f64)> {
    let dist = two_norm(&z.try_sub(z_hat)?)?;
    let pinv_norm = two_norm(&pseudoinverse(z_hat)?)?;
    Ok((pinv_norm * dist, dist))
}

fn check_shapes(op: &'static str, a: &DenseMatrix, z: (usize, usize), z_hat: &DenseMatrix) -> Result<()> {
    if z != z_hat.shape() || a.rows() != z.0 {
        return Err(Error::ShapeMismatch {
            op,
            left: z,
            right: if a.rows() != z.0 { a.shape() } else { z_hat.shape() },
        });
    }
    Ok(())
}

/// `‖(I−ZZᵀ)A‖ − ε_Z‖A‖ ≤ ‖(I−ẐẐ†)A‖ ≤ ‖(I−ZZᵀ)A‖ + ε_Z‖A‖` in the
/// Schatten p-norm, plus `ε_Z ≤ 2‖Z−Ẑ‖₂` whenever `‖Z−Ẑ‖₂ ≤ 1/2`
/// (up to rounding).
pub fn check_basis_perturbation(
    a: &DenseMatrix,
    z: &OrthonormalBasis,
    z_hat: &DenseMatrix,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    check_shapes("thm1", a, z.matrix().shape(), z_hat)?;
    let (m, n) = a.shape();
    let rank_hat = svd(z_hat)?.rank();
    if rank_hat != z.dim() {
        return Err(Error::hypothesis(
            "thm1",
            format!("rank(Z_hat) = rank(Z) violated: rank(Z_hat) = {rank_hat}, rank(Z) = {}", z.dim()),
        ));
    }
    let (eps_z, dist) = eps_and_distance(z.matrix(), z_hat)?;
    let a_p = norm(a, p)?;
    let a_2 = two_norm(a)?;
    let exact = norm(&z.project_out(a)?, p)?;
    let middle = norm(&Projector::from_full_rank(z_hat)?.apply_complement(a)?, p)?;
    let t = tol.linear(a_2, m, n);

    let mut report = BoundReport::new(
        "thm1",
        (m, n),
        Inequality::two_sided("thm1", exact - eps_z * a_p, middle, exact + eps_z * a_p, t),
    )
    .with_k(z.dim())
    .with_p(p)
    .scalar("eps_z", eps_z)
    .scalar("z_distance_2", dist)
    .scalar("residual_exact_p", exact)
    .scalar("a_norm_p", a_p)
    .scalar("a_norm_2", a_2);
    let t_eps = tol.linear(1.0, m, z.dim());
    // Realized distances land on either side of 1/2 by rounding.
    if dist <= 0.5 + t_eps {
        report = report.sub_check(Inequality::upper("eps_z_le_2dist", eps_z, 2.0 * dist, t_eps));
    }
    Ok(report)
}

/// `‖(I−U_kU_kᵀ)A‖ ≤ ‖(I−ẐẐ†)A‖ ≤ ‖(I−U_kU_kᵀ)A‖ + ε_U‖A‖` for a perturbation
/// `Ẑ` of the k dominant left singular vectors.
pub fn check_dominant_basis_perturbation(
    a: &DenseMatrix,
    k: usize,
    z_hat: &DenseMatrix,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    let (m, n) = a.shape();
    if z_hat.cols() != k {
        return Err(Error::hypothesis(
            "cor1",
            format!("Z_hat must have k = {k} columns, got {}", z_hat.cols()),
        ));
    }
    let u_k = truncate(&svd(a)?, k)?.basis().clone();
    check_shapes("cor1", a, u_k.matrix().shape(), z_hat)?;
    let (eps_u, dist) = eps_and_distance(u_k.matrix(), z_hat)?;
    let rank_hat = svd(z_hat)?.rank();
    if rank_hat != k && dist > 0.5 {
        return Err(Error::hypothesis(
            "cor1",
            format!("rank(Z_hat) = k or ||U_k - Z_hat||_2 <= 1/2 violated: rank {rank_hat}, distance {dist}"),
        ));
    }
    let a_p = norm(a, p)?;
    let a_2 = two_norm(a)?;
    let exact = norm(&u_k.project_out(a)?, p)?;
    let middle = norm(&Projector::from_full_rank(z_hat)?.apply_complement(a)?, p)?;
    let t = tol.linear(a_2, m, n);
    Ok(BoundReport::new(
        "cor1",
        (m, n),
        Inequality::two_sided("cor1", exact, middle, exact + eps_u * a_p, t),
    )
    .with_k(k)
    .with_p(p)
    .scalar("eps_u", eps_u)
    .scalar("u_distance_2", dist)
    .scalar("residual_dominant_p", exact)
    .scalar("a_norm_p", a_p)
    .scalar("a_norm_2", a_2))
}
