use super::{norm, two_norm, BoundReport, Inequality, ToleranceModel};
use crate::dense::{singular_values, svd, truncate, DenseMatrix};
use crate::error::{Error, Result};
use crate::schatten::SchattenIndex;
use crate::subspaces::Projector;

/// `|‖(I−P)(A+E)‖_p − ‖(I−P)A‖_p| ≤ ‖E‖_p` for any orthogonal projector `P`.
pub fn check_matrix_additive(
    a: &DenseMatrix,
    e: &DenseMatrix,
    projector: &Projector,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    if a.shape() != e.shape() || projector.ambient() != a.rows() {
        return Err(Error::ShapeMismatch {
            op: "thm2",
            left: a.shape(),
            right: if a.shape() != e.shape() { e.shape() } else { (projector.ambient(), projector.rank()) },
        });
    }
    let (m, n) = a.shape();
    let perturbed = a.try_add(e)?;
    let before = norm(&projector.apply_complement(a)?, p)?;
    let after = norm(&projector.apply_complement(&perturbed)?, p)?;
    let e_p = norm(e, p)?;
    let scale = two_norm(a)?.max(two_norm(&perturbed)?);
    let t = tol.linear(scale, m, n);
    Ok(BoundReport::new("thm2", (m, n), Inequality::upper("thm2", (after - before).abs(), e_p, t))
        .with_p(p)
        .scalar("residual_a_p", before)
        .scalar("residual_a_plus_e_p", after)
        .scalar("e_norm_p", e_p)
        .scalar("projector_rank", projector.rank() as f64))
}

/// `σ_{k+1}(A) ≤ ‖(I−Û_kÛ_kᵀ)A‖₂ ≤ σ_{k+1}(A) + 2‖E‖₂` with `Û_k` the dominant
/// left singular vectors of `A + E`, plus Weyl's inequality at `k+1` and at
/// every index.
pub fn check_additive_svd_transfer(
    a: &DenseMatrix,
    e: &DenseMatrix,
    k: usize,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    if a.shape() != e.shape() {
        return Err(Error::ShapeMismatch {
            op: "cor2",
            left: a.shape(),
            right: e.shape(),
        });
    }
    let (m, n) = a.shape();
    let perturbed = a.try_add(e)?;
    let fa = svd(a)?;
    if k == 0 || k > fa.rank() {
        return Err(Error::hypothesis("cor2", format!("1 <= k <= rank(A) violated: k = {k}, rank(A) = {}", fa.rank())));
    }
    let fp = svd(&perturbed)?;
    if k > fp.rank() {
        return Err(Error::hypothesis(
            "cor2",
            format!("k <= rank(A + E) violated: k = {k}, rank(A + E) = {}", fp.rank()),
        ));
    }
    let u_hat = truncate(&fp, k)?.basis().clone();
    let lhs = two_norm(&u_hat.project_out(a)?)?;

    let sa = singular_values(a)?;
    let sp = singular_values(&perturbed)?;
    let at = |s: &[f64], j: usize| s.get(j).copied().unwrap_or(0.0);
    let sigma_next = at(&sa, k);
    let e_2 = two_norm(e)?;
    let scale = at(&sa, 0).max(at(&sp, 0));
    let t = tol.linear(scale, m, n);

    let weyl_next = (at(&sp, k) - sigma_next).abs();
    let weyl_all = sa.iter().zip(&sp).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(BoundReport::new(
        "cor2",
        (m, n),
        Inequality::two_sided("cor2", sigma_next, lhs, sigma_next + 2.0 * e_2, t),
    )
    .with_k(k)
    .with_p(SchattenIndex::Inf)
    .scalar("sigma_k1_a", sigma_next)
    .scalar("sigma_k1_a_plus_e", at(&sp, k))
    .scalar("e_norm_2", e_2)
    .sub_check(Inequality::upper("weyl_k1", weyl_next, e_2, t))
    .sub_check(Inequality::upper("weyl_all", weyl_all, e_2, t)))
}
