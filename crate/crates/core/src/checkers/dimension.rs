use super::{norm, two_norm, BoundReport, Inequality, ToleranceModel};
use crate::dense::{singular_values, svd, truncate, DenseMatrix};
use crate::error::{Error, Result};
use crate::schatten::{schatten_norm_of_singular_values, SchattenIndex};
use crate::subspaces::Projector;

fn require_rows(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

/// Rejects odd finite `p`; the Gram-matrix bounds need a Q-norm.
fn require_even(bound_id: &'static str, p: SchattenIndex) -> Result<SchattenIndex> {
    p.half()
        .ok_or_else(|| Error::hypothesis(bound_id, format!("p even required (p = {p})")))
}

/// Both terms of `min{‖M‖_{p/2}, (m−d)^{1/p}‖M‖_p}`; for `p = ∞` both are `‖M‖₂`.
fn gram_terms(gram_diff: &DenseMatrix, p: SchattenIndex, half: SchattenIndex, codim: usize) -> Result<(f64, f64)> {
    if p.is_inf() {
        let two = two_norm(gram_diff)?;
        return Ok((two, two));
    }
    let first = norm(gram_diff, half)?;
    let second = p.root_of_dim(codim) * norm(gram_diff, p)?;
    Ok((first, second))
}

fn variant(p: SchattenIndex) -> &'static str {
    match p {
        SchattenIndex::Inf => "two",
        SchattenIndex::Finite(2) => "fro",
        SchattenIndex::Finite(_) => "schatten_p",
    }
}

fn scale_of(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    Ok(two_norm(a)?.max(two_norm(b)?))
}

/// `|‖(I−P)A‖_p² − ‖(I−P)Ã‖_p²| ≤ min{‖M‖_{p/2}, (m−s)^{1/p}‖M‖_p}` with
/// `M = AAᵀ − ÃÃᵀ` and `s = rank(P)`; `Ã` may have any number of columns.
pub fn check_dimension_change(
    a: &DenseMatrix,
    a_tilde: &DenseMatrix,
    projector: &Projector,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    let half = require_even("thm3/4/5", p)?;
    require_rows("thm3/4/5", a, a_tilde)?;
    if projector.ambient() != a.rows() {
        return Err(Error::ShapeMismatch {
            op: "thm3/4/5",
            left: a.shape(),
            right: (projector.ambient(), projector.rank()),
        });
    }
    let (m, n) = a.shape();
    let s = projector.rank();
    let res_a = norm(&projector.apply_complement(a)?, p)?;
    let res_t = norm(&projector.apply_complement(a_tilde)?, p)?;
    let lhs = (res_a * res_a - res_t * res_t).abs();
    let gram_diff = a.gram_outer().try_sub(&a_tilde.gram_outer())?;
    let (first, second) = gram_terms(&gram_diff, p, half, m - s)?;
    let t = tol.squared(scale_of(a, a_tilde)?, m, n.max(a_tilde.cols()));
    Ok(BoundReport::new("thm3/4/5", (m, n), Inequality::upper("thm3/4/5", lhs, first.min(second), t))
        .with_c(a_tilde.cols())
        .with_p(p)
        .label("variant", variant(p))
        .scalar("projector_rank", s as f64)
        .scalar("residual_a_p", res_a)
        .scalar("residual_a_tilde_p", res_t)
        .scalar("gram_term_half", first)
        .scalar("gram_term_codim", second))
}

fn projector_of_full_rank(bound_id: &'static str, c: &DenseMatrix) -> Result<Projector> {
    Projector::from_full_rank(c).map_err(|e| match e {
        Error::RankDeficient { expected, detected } => Error::hypothesis(
            bound_id,
            format!("rank(C) = c violated: c = {expected}, rank(C) = {detected}"),
        ),
        other => other,
    })
}

/// `‖(I−CC†)A‖_p² ≤ min{‖AAᵀ−CCᵀ‖_{p/2}, (m−c)^{1/p}‖AAᵀ−CCᵀ‖_p}` for `C`
/// of full column rank `c`.
pub fn check_error_matrix(a: &DenseMatrix, c_mat: &DenseMatrix, p: SchattenIndex, tol: &ToleranceModel) -> Result<BoundReport> {
    let half = require_even("thm_lc", p)?;
    require_rows("thm_lc", a, c_mat)?;
    let (m, n) = a.shape();
    let c = c_mat.cols();
    let proj = projector_of_full_rank("thm_lc", c_mat)?;
    let res = norm(&proj.apply_complement(a)?, p)?;
    let gram_diff = a.gram_outer().try_sub(&c_mat.gram_outer())?;
    let (first, second) = gram_terms(&gram_diff, p, half, m - c)?;
    let t = tol.squared(scale_of(a, c_mat)?, m, n.max(c));
    Ok(BoundReport::new("thm_lc", (m, n), Inequality::upper("thm_lc", res * res, first.min(second), t))
        .with_c(c)
        .with_p(p)
        .label("variant", variant(p))
        .scalar("gram_term_half", first)
        .scalar("gram_term_codim", second))
}

/// `‖(I−C_kC_k†)A‖_p² ≤ ‖A−A_k‖_p² + 2 min{‖M‖_{p/2}, (m−c)^{1/p}‖M‖_p}`,
/// `M = AAᵀ − CCᵀ`, with Mirsky's inequality for `(AAᵀ, CCᵀ)` at
/// `q ∈ {1, 2, ∞}` as gated sub-checks.
///
/// The codimension factor is evaluated as stated, `(m−c)^{1/p}`. The
/// argument through `P = C_kC_k†` (rank k) supports only `(m−k)^{1/p}`; that
/// right-hand side is recorded as `rhs_upper_codim_k` and as an ungated
/// sub-check. The stated form fails when `c = m`, see the tests.
pub fn check_error_matrix_rank_k(
    a: &DenseMatrix,
    c_mat: &DenseMatrix,
    k: usize,
    p: SchattenIndex,
    tol: &ToleranceModel,
) -> Result<BoundReport> {
    let half = require_even("thm_lck", p)?;
    require_rows("thm_lck", a, c_mat)?;
    let (m, n) = a.shape();
    let c = c_mat.cols();
    let fc = svd(c_mat)?;
    if fc.rank() != c {
        return Err(Error::hypothesis(
            "thm_lck",
            format!("rank(C) = c violated: c = {c}, rank(C) = {}", fc.rank()),
        ));
    }
    if k == 0 || k > c {
        return Err(Error::hypothesis("thm_lck", format!("1 <= k <= c violated: k = {k}, c = {c}")));
    }
    let fa = svd(a)?;
    if k > fa.rank() {
        return Err(Error::hypothesis("thm_lck", format!("rank(A) >= k violated: k = {k}, rank(A) = {}", fa.rank())));
    }
    let c_k = truncate(&fc, k)?;
    let res = norm(&c_k.basis().project_out(a)?, p)?;
    let a_k = truncate(&fa, k)?;
    let tail = norm(&a.try_sub(a_k.a_k())?, p)?;
    let gram_diff = a.gram_outer().try_sub(&c_mat.gram_outer())?;
    let (first, second) = gram_terms(&gram_diff, p, half, m - c)?;
    let (_, second_k) = gram_terms(&gram_diff, p, half, m - k)?;
    let rhs = tail * tail + 2.0 * first.min(second);
    let rhs_k = tail * tail + 2.0 * first.min(second_k);
    let scale = scale_of(a, c_mat)?;
    let t = tol.squared(scale, m, n.max(c));

    let mut report = BoundReport::new("thm_lck", (m, n), Inequality::upper("thm_lck", res * res, rhs, t))
        .with_k(k)
        .with_c(c)
        .with_p(p)
        .label("variant", variant(p))
        .scalar("tail_norm_p", tail)
        .scalar("gram_term_half", first)
        .scalar("gram_term_codim", second)
        .scalar("rhs_upper_codim_k", rhs_k)
        .sub_check(Inequality::upper("codim_k_form", res * res, rhs_k, t).ungated());
    for q in [SchattenIndex::NUCLEAR, SchattenIndex::FROBENIUS, SchattenIndex::Inf] {
        let (lhs_q, rhs_q) = mirsky_gap(a, c_mat, q)?;
        report = report.sub_check(Inequality::upper(format!("mirsky_q{q}"), lhs_q, rhs_q, t));
    }
    Ok(report)
}

/// Both sides of Mirsky's inequality for the Gram matrices of `a` and `h`:
/// `(‖σ(AAᵀ) − σ(HHᵀ)‖_q, ‖AAᵀ − HHᵀ‖_q)`.
pub fn mirsky_gap(a: &DenseMatrix, h: &DenseMatrix, q: SchattenIndex) -> Result<(f64, f64)> {
    require_rows("mirsky", a, h)?;
    let ga = a.gram_outer();
    let gh = h.gram_outer();
    let sa = singular_values(&ga)?;
    let sh = singular_values(&gh)?;
    let diffs: Vec<f64> = sa.iter().zip(&sh).map(|(x, y)| (x - y).abs()).collect();
    let lhs = schatten_norm_of_singular_values(&diffs, q)?;
    let rhs = norm(&ga.try_sub(&gh)?, q)?;
    Ok((lhs, rhs))
}
