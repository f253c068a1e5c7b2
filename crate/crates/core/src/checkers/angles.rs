use serde::{Deserialize, Serialize};

use super::{norm, two_norm, BoundReport, Inequality, ToleranceModel};
use crate::dense::{complement_basis, svd, truncate, DenseMatrix, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::schatten::SchattenIndex;
use crate::subspaces::{principal_angles, PrincipalAngles, Projector};

/// Which norm the upper angle bound is stated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleNorm {
    Two,
    Fro,
}

/// The dominant k-dimensional subspace of `A` and the quantities the angle
/// bounds need.
struct Dominant {
    u_k: OrthonormalBasis,
    sigma_k: f64,
    sigma_next: f64,
    a_two: f64,
    /// `A − A_k`.
    tail: DenseMatrix,
}

fn dominant(bound_id: &'static str, a: &DenseMatrix, k: usize, tol: &ToleranceModel) -> Result<Dominant> {
    let (m, n) = a.shape();
    let f = svd(a)?;
    if k == 0 || k > m.min(n) {
        return Err(Error::hypothesis(bound_id, format!("1 <= k <= min(m, n) violated: k = {k}")));
    }
    let sigma_k = f.sigma(k);
    let sigma_next = f.sigma(k + 1);
    let gap_tol = tol.linear(f.sigma(1), m, n);
    if !(sigma_k - sigma_next > gap_tol) {
        return Err(Error::hypothesis(
            bound_id,
            format!("spectral gap sigma_k > sigma_(k+1) violated: sigma_{k} = {sigma_k}, sigma_{} = {sigma_next}", k + 1),
        ));
    }
    let approx = truncate(&f, k)?;
    Ok(Dominant {
        u_k: approx.basis().clone(),
        sigma_k,
        sigma_next,
        a_two: f.sigma(1),
        tail: a.try_sub(approx.a_k())?,
    })
}

fn require_rank(bound_id: &'static str, projector: &Projector, a: &DenseMatrix, k: usize) -> Result<()> {
    if projector.ambient() != a.rows() {
        return Err(Error::ShapeMismatch {
            op: bound_id,
            left: a.shape(),
            right: (projector.ambient(), projector.rank()),
        });
    }
    if projector.rank() < k {
        return Err(Error::hypothesis(
            bound_id,
            format!("rank(P) >= k violated: rank(P) = {}, k = {k}", projector.rank()),
        ));
    }
    Ok(())
}

/// Angles between the dominant subspace and `range(P)`.
fn sin_theta(d: &Dominant, projector: &Projector) -> Result<PrincipalAngles> {
    principal_angles(&d.u_k, projector.basis())
}

/// Cosines between `range(I − P)` and `range(I − P_U)`, from explicit
/// complement bases.
fn gamma(d: &Dominant, projector: &Projector) -> Result<PrincipalAngles> {
    let p_perp = projector.complement_basis();
    let m = d.u_k.ambient();
    let u_perp = if d.u_k.dim() == m {
        OrthonormalBasis::standard(m, 0)
    } else {
        complement_basis(&d.u_k)?
    };
    principal_angles(&p_perp, &u_perp)
}

/// `‖(I−P)A‖_p ≥ σ_k(A) ‖sinΘ(P, P_U)‖_p` for `p ∈ {2, ∞}` (Frobenius and
/// two-norm), with `rank(P) ≥ k` and a gap after `σ_k`.
pub fn check_angle_lower(
    a: &DenseMatrix,
    k: usize,
    projector: &Projector,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    if !matches!(p, SchattenIndex::Inf | SchattenIndex::Finite(2)) {
        return Err(Error::hypothesis("thm_lau", format!("p in {{2, inf}} required (p = {p})")));
    }
    require_rank("thm_lau", projector, a, k)?;
    let d = dominant("thm_lau", a, k, tol)?;
    let (m, n) = a.shape();
    let residual = norm(&projector.apply_complement(a)?, p)?;
    let sin = sin_theta(&d, projector)?.sin_norm(p);
    let t = tol.linear(d.a_two, m, n);
    Ok(BoundReport::new("thm_lau", (m, n), Inequality::lower("thm_lau", residual, d.sigma_k * sin, t))
        .with_k(k)
        .with_p(p)
        .scalar("sigma_k", d.sigma_k)
        .scalar("sigma_k1", d.sigma_next)
        .scalar("sin_theta_p", sin)
        .scalar("projector_rank", projector.rank() as f64))
}

/// Upper bounds through `sinΘ(P, P_U)` and `Γ = cosΘ(I−P, I−P_U)`.
///
/// Two-norm (`thm_lal1`): `‖(I−P)A‖₂ ≤ ‖A‖₂‖sinΘ‖₂ + ‖A−A_k‖₂‖Γ‖₂`.
/// Frobenius (`thm_lal2`): `‖(I−P)A‖_F ≤ ‖A‖₂‖sinΘ‖_F +
/// min{‖A−A_k‖₂‖Γ‖_F, ‖A−A_k‖_F‖Γ‖₂}`; the same right-hand side against
/// `‖(I−P)A‖₂` is recorded as the ungated sub-check `two_norm_reading`.
///
/// When `k < rank(P) + k < m`, `‖Γ‖₂ = 1` and the simplified bound with `‖Γ‖`
/// dropped are added as gated sub-checks.
pub fn check_angle_upper(
    a: &DenseMatrix,
    k: usize,
    projector: &Projector,
    which: AngleNorm,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    let id = match which {
        AngleNorm::Two => "thm_lal1",
        AngleNorm::Fro => "thm_lal2",
    };
    require_rank(id, projector, a, k)?;
    let d = dominant(id, a, k, tol)?;
    let (m, n) = a.shape();
    let l = projector.rank();
    let t = tol.linear(d.a_two, m, n);
    let residual_p = |p| -> Result<f64> { norm(&projector.apply_complement(a)?, p) };
    let angles = sin_theta(&d, projector)?;
    let g = gamma(&d, projector)?;
    let g_two = g.cos_norm(SchattenIndex::Inf);
    let g_fro = g.cos_norm(SchattenIndex::FROBENIUS);
    let tail_two = two_norm(&d.tail)?;
    let window = k < l + k && l + k < m;

    let mut report = match which {
        AngleNorm::Two => {
            let lhs = residual_p(SchattenIndex::Inf)?;
            let sin = angles.sin_norm(SchattenIndex::Inf);
            let rhs = d.a_two * sin + tail_two * g_two;
            let mut r = BoundReport::new(id, (m, n), Inequality::upper(id, lhs, rhs, t))
                .with_p(SchattenIndex::Inf)
                .scalar("sin_theta_2", sin);
            if window {
                r = r.sub_check(Inequality::upper("simplified", lhs, d.a_two * sin + tail_two, t));
            }
            r
        }
        AngleNorm::Fro => {
            let lhs = residual_p(SchattenIndex::FROBENIUS)?;
            let sin = angles.sin_norm(SchattenIndex::FROBENIUS);
            let tail_fro = norm(&d.tail, SchattenIndex::FROBENIUS)?;
            let rhs = d.a_two * sin + (tail_two * g_fro).min(tail_fro * g_two);
            let lhs_two = residual_p(SchattenIndex::Inf)?;
            let mut r = BoundReport::new(id, (m, n), Inequality::upper(id, lhs, rhs, t))
                .with_p(SchattenIndex::FROBENIUS)
                .scalar("sin_theta_fro", sin)
                .scalar("tail_norm_fro", tail_fro)
                .scalar("residual_2", lhs_two)
                .sub_check(Inequality::upper("two_norm_reading", lhs_two, rhs, t).ungated());
            if window {
                r = r.sub_check(Inequality::upper("simplified", lhs, d.a_two * sin + tail_fro, t));
            }
            r
        }
    };
    if window {
        report = report.sub_check(Inequality::equality("gamma_two_norm_is_one", g_two, 1.0, 1e-10));
    }
    Ok(report
        .with_k(k)
        .label("simplified_window", if window { "yes" } else { "no" })
        .scalar("gamma_2", g_two)
        .scalar("gamma_fro", g_fro)
        .scalar("tail_norm_2", tail_two)
        .scalar("a_norm_2", d.a_two)
        .scalar("sigma_k", d.sigma_k)
        .scalar("sigma_k1", d.sigma_next)
        .scalar("projector_rank", l as f64))
}

/// `σ_k(A)‖sinΘ(P,P_U)‖_p ≤ ‖(I−P)A‖_p ≤ ‖A‖₂‖sinΘ(P,P_U)‖_p + ‖A−A_k‖_p`
/// for `k ≤ rank(P) < m − k`. The label `proven_norm` says whether `p` is one
/// of the norms (2 or ∞) with a written argument; other `p` are evaluated the
/// same way.
pub fn check_combined_theorem6(
    a: &DenseMatrix,
    k: usize,
    projector: &Projector,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    let (m, n) = a.shape();
    let l = projector.rank();
    if projector.ambient() != m {
        return Err(Error::ShapeMismatch {
            op: "thm6",
            left: a.shape(),
            right: (projector.ambient(), l),
        });
    }
    if !(k <= l && l + k < m) {
        return Err(Error::hypothesis(
            "thm6",
            format!("k <= rank(P) < m - k violated: k = {k}, rank(P) = {l}, m = {m}"),
        ));
    }
    let d = dominant("thm6", a, k, tol)?;
    let residual = norm(&projector.apply_complement(a)?, p)?;
    let sin = sin_theta(&d, projector)?.sin_norm(p);
    let tail = norm(&d.tail, p)?;
    let t = tol.linear(d.a_two, m, n);
    let proven = matches!(p, SchattenIndex::Inf | SchattenIndex::Finite(2));
    Ok(BoundReport::new(
        "thm6",
        (m, n),
        Inequality::two_sided("thm6", d.sigma_k * sin, residual, d.a_two * sin + tail, t),
    )
    .with_k(k)
    .with_p(p)
    .label("proven_norm", if proven { "yes" } else { "no" })
    .scalar("sigma_k", d.sigma_k)
    .scalar("sigma_k1", d.sigma_next)
    .scalar("a_norm_2", d.a_two)
    .scalar("sin_theta_p", sin)
    .scalar("tail_norm_p", tail)
    .scalar("projector_rank", l as f64))
}
