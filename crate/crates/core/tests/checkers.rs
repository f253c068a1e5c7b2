mod common;

use common::*;
use lowrank_perturb::checkers::{
    check_additive_svd_transfer, check_angle_lower, check_angle_upper, check_basis_perturbation,
    check_combined_theorem6, check_dimension_change, check_dominant_basis_perturbation, check_error_matrix,
    check_error_matrix_rank_k, AngleNorm, BoundReport, ToleranceModel,
};
use lowrank_perturb::dense::{svd, truncate, DenseMatrix, OrthonormalBasis};
use lowrank_perturb::generate::{
    column_sample, column_sample_rescale, gaussian_matrix, haar_basis, matrix_with_spectrum, norm_controlled_noise,
    perturb_basis, SpectrumSpec,
};
use lowrank_perturb::schatten::SchattenIndex;
use lowrank_perturb::subspaces::Projector;
use lowrank_perturb::Error;

fn tol() -> ToleranceModel {
    ToleranceModel::default()
}

fn oracle_p(p: SchattenIndex) -> Option<u32> {
    match p {
        SchattenIndex::Finite(p) => Some(p),
        SchattenIndex::Inf => None,
    }
}

/// `‖(I − QQᵀ)A‖_p` with `Q` orthonormalized by the oracle.
fn residual(a: &Mat, range: &Mat, p: SchattenIndex) -> f64 {
    let q = gram_schmidt(range);
    schatten(&mul(&complement_projector(&q), a), oracle_p(p))
}

fn spectrum(m: usize, n: usize, s: &[f64], seed: u64) -> DenseMatrix {
    matrix_with_spectrum(&SpectrumSpec::new(m, n, s.to_vec(), seed).unwrap()).unwrap()
}

fn haar_projector(m: usize, l: usize, seed: u64) -> Projector {
    Projector::from_orthonormal(haar_basis(m, l, seed).unwrap())
}

fn dominant(a: &DenseMatrix, k: usize) -> OrthonormalBasis {
    truncate(&svd(a).unwrap(), k).unwrap().basis().clone()
}

fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "{label}: {got} vs {want}");
}

fn assert_tight_upper(r: &BoundReport, tol: f64) {
    assert!(r.holds, "{r:?}");
    assert!((r.rhs_upper.unwrap() - r.lhs).abs() <= tol, "{r:?}");
}

#[test]
fn basis_perturbation_seed_4_matches_oracle() {
    let a = gaussian_matrix(8, 6, 4);
    let z = haar_basis(8, 2, 4).unwrap();
    let pb = perturb_basis(&z, 0.3, 4).unwrap();
    let p = SchattenIndex::FROBENIUS;
    let r = check_basis_perturbation(&a, &z, &pb.z_hat, p, &tol()).unwrap();
    assert!(r.holds, "{r:?}");

    let (ar, zr, zh) = (rows(&a), rows(z.matrix()), rows(&pb.z_hat));
    let scale = 1e-9 * two_norm(&ar).max(1.0).powi(2);
    let exact = residual(&ar, &zr, p);
    let middle = residual(&ar, &zh, p);
    let s_hat = sigmas(&zh);
    let eps = two_norm(&sub(&zr, &zh)) / s_hat[s_hat.len() - 1];
    let a_p = fro(&ar);
    assert_close("lhs", r.lhs, middle, scale);
    assert_close("lower", r.rhs_lower.unwrap(), exact - eps * a_p, scale);
    assert_close("upper", r.rhs_upper.unwrap(), exact + eps * a_p, scale);
    assert!(exact - eps * a_p <= middle + scale && middle <= exact + eps * a_p + scale);
}

#[test]
fn basis_perturbation_half_boundary_bounds_eps() {
    let a = gaussian_matrix(8, 6, 40);
    let z = haar_basis(8, 3, 40).unwrap();
    let pb = perturb_basis(&z, 0.5, 40).unwrap();
    let r = check_basis_perturbation(&a, &z, &pb.z_hat, SchattenIndex::Inf, &tol()).unwrap();
    let sub_check = r.sub("eps_z_le_2dist").expect("recorded at the boundary");
    assert!(sub_check.holds() && r.context.scalars["eps_z"] <= 1.0 + 1e-12, "{r:?}");
}

#[test]
fn basis_perturbation_holds_along_a_magnitude_sweep() {
    let a = gaussian_matrix(8, 6, 41);
    let z = haar_basis(8, 2, 41).unwrap();
    let mut slacks = Vec::new();
    for mag in [0.0, 0.1, 0.2, 0.3] {
        let pb = perturb_basis(&z, mag, 41).unwrap();
        for p in [SchattenIndex::NUCLEAR, SchattenIndex::FROBENIUS, SchattenIndex::Inf] {
            let r = check_basis_perturbation(&a, &z, &pb.z_hat, p, &tol()).unwrap();
            assert!(r.holds, "magnitude {mag}: {r:?}");
            slacks.push(r.slack);
        }
    }
    assert!(slacks.iter().all(|s| s.is_finite()));
}

#[test]
fn dominant_basis_seed_10_two_norm() {
    let a = gaussian_matrix(8, 6, 10);
    let u = dominant(&a, 2);
    let pb = perturb_basis(&u, 0.2, 10).unwrap();
    let r = check_dominant_basis_perturbation(&a, 2, &pb.z_hat, SchattenIndex::Inf, &tol()).unwrap();
    assert!(r.holds, "{r:?}");
    let s = sigmas_of(&a);
    assert_close("lower side is sigma_3", r.rhs_lower.unwrap(), s[2], 1e-10);
    assert_close("lhs", r.lhs, residual(&rows(&a), &rows(&pb.z_hat), SchattenIndex::Inf), 1e-10);
}

#[test]
fn matrix_additive_seed_6_nuclear() {
    let a = gaussian_matrix(8, 6, 6);
    let e = norm_controlled_noise(8, 6, 0.3, 6).unwrap();
    let proj = haar_projector(8, 3, 6);
    let r = check_matrix_additive_once(&a, &e, &proj);
    assert!(r.holds && r.slack >= 0.0, "{r:?}");
    let q = rows(proj.basis().matrix());
    let before = residual(&rows(&a), &q, SchattenIndex::NUCLEAR);
    let after = residual(&add(&rows(&a), &rows(&e)), &q, SchattenIndex::NUCLEAR);
    assert_close("lhs", r.lhs, (after - before).abs(), 1e-10);
    assert_close("rhs", r.rhs_upper.unwrap(), schatten(&rows(&e), Some(1)), 1e-10);
}

fn check_matrix_additive_once(a: &DenseMatrix, e: &DenseMatrix, proj: &Projector) -> BoundReport {
    lowrank_perturb::checkers::check_matrix_additive(a, e, proj, SchattenIndex::NUCLEAR, &tol()).unwrap()
}

#[test]
fn svd_transfer_seed_12_gapped() {
    let a = spectrum(6, 4, &[3.0, 2.0, 0.5, 0.1], 12);
    let e = norm_controlled_noise(6, 4, 0.05, 12).unwrap();
    let r = check_additive_svd_transfer(&a, &e, 2, &tol()).unwrap();
    assert!(r.holds, "{r:?}");
    assert_close("sigma_3", r.rhs_lower.unwrap(), 0.5, 1e-12);
    assert_close("upper", r.rhs_upper.unwrap(), 0.5 + 0.1, 1e-12);
    let s_a = sigmas_of(&a);
    let s_p = sigmas(&add(&rows(&a), &rows(&e)));
    for (x, y) in s_a.iter().zip(&s_p) {
        assert!((x - y).abs() <= 0.05 + 1e-12);
    }
}

#[test]
fn svd_transfer_when_the_tail_is_cancelled() {
    let a = spectrum(6, 4, &[3.0, 2.0, 0.5, 0.1], 13);
    let a2 = truncate(&svd(&a).unwrap(), 2).unwrap();
    let e = a2.a_k().try_sub(&a).unwrap();
    let r = check_additive_svd_transfer(&a, &e, 2, &tol()).unwrap();
    assert!(r.holds, "{r:?}");
    // Û_k spans U_k, so the middle term sits on the lower side.
    assert_close("lhs", r.lhs, 0.5, 1e-10);
    assert!(r.lhs >= r.rhs_lower.unwrap() - r.tolerance);
}

#[test]
fn dimension_change_seed_14_schatten_4() {
    let a = gaussian_matrix(8, 6, 14);
    let at = column_sample_rescale(&a, 8, 14).unwrap();
    let proj = haar_projector(8, 3, 14);
    let p = SchattenIndex::Finite(4);
    let r = check_dimension_change(&a, &at, &proj, p, &tol()).unwrap();
    assert!(r.holds, "{r:?}");

    let (ar, tr, q) = (rows(&a), rows(&at), rows(proj.basis().matrix()));
    let res_a = residual(&ar, &q, p);
    let res_t = residual(&tr, &q, p);
    let m = sub(&mul(&ar, &transpose(&ar)), &mul(&tr, &transpose(&tr)));
    let rhs = schatten(&m, Some(2)).min((8.0f64 - 3.0).powf(0.25) * schatten(&m, Some(4)));
    let scale = 1e-9 * two_norm(&ar).max(two_norm(&tr)).max(1.0).powi(2);
    assert_close("lhs", r.lhs, (res_a * res_a - res_t * res_t).abs(), scale);
    assert_close("rhs", r.rhs_upper.unwrap(), rhs, scale);
}

#[test]
fn dimension_change_with_zero_projector_is_norm_gap() {
    let a = gaussian_matrix(6, 5, 44);
    let at = column_sample_rescale(&a, 7, 44).unwrap();
    let r = check_dimension_change(&a, &at, &Projector::zero(6), SchattenIndex::Inf, &tol()).unwrap();
    assert!(r.holds, "{r:?}");
    let (ar, tr) = (rows(&a), rows(&at));
    let direct = (two_norm(&ar).powi(2) - two_norm(&tr).powi(2)).abs();
    let gram = two_norm(&sub(&mul(&ar, &transpose(&ar)), &mul(&tr, &transpose(&tr))));
    assert_close("lhs", r.lhs, direct, 1e-10);
    assert_close("rhs", r.rhs_upper.unwrap(), gram, 1e-10);
    assert!(direct <= gram + 1e-10);
}

#[test]
fn error_matrix_spanning_dominant_range() {
    let a = spectrum(7, 5, &[5.0, 3.0, 1.0, 0.5, 0.2], 15);
    let a2 = truncate(&svd(&a).unwrap(), 2).unwrap();
    let c = a2.basis().matrix().matmul(&DenseMatrix::from_diag(2, 2, a2.sigmas()).unwrap()).unwrap();
    for p in [SchattenIndex::FROBENIUS, SchattenIndex::Finite(4), SchattenIndex::Inf] {
        let r = check_error_matrix(&a, &c, p, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
        let tail = sub(&rows(&a), &rows(a2.a_k()));
        assert_close("lhs", r.lhs, schatten(&tail, oracle_p(p)).powi(2), 1e-9);
    }
}

#[test]
fn error_matrix_sketch_seed_15() {
    let a = gaussian_matrix(8, 6, 15);
    let c = column_sample(&a, 5, 15).unwrap().merge_duplicates();
    let r = check_error_matrix(&a, &c, SchattenIndex::Inf, &tol()).unwrap();
    assert!(r.holds, "{r:?}");
    let lhs = residual(&rows(&a), &rows(&c), SchattenIndex::Inf).powi(2);
    assert_close("lhs", r.lhs, lhs, 1e-9);
}

#[test]
fn error_matrix_rank_k_seed_16() {
    let a = gaussian_matrix(8, 6, 16);
    let c = column_sample(&a, 6, 16).unwrap().merge_duplicates();
    let r = check_error_matrix_rank_k(&a, &c, 2, SchattenIndex::FROBENIUS, &tol()).unwrap();
    assert!(r.holds, "{r:?}");
    for q in ["mirsky_q1", "mirsky_q2", "mirsky_qinf", "codim_k_form"] {
        assert!(r.sub(q).unwrap().holds(), "{q}");
    }
}

#[test]
fn stated_codimension_factor_against_square_sketch() {
    // With c = m the factor (m - c)^{1/p} vanishes and the stated right-hand
    // side collapses to ‖A − A_k‖²; the rank-k reading (m - k)^{1/p} does not.
    let a = DenseMatrix::from_diag(2, 2, &[1.0, 0.0]).unwrap();
    let c = DenseMatrix::from_diag(2, 2, &[0.1, 10.0]).unwrap();
    let r = check_error_matrix_rank_k(&a, &c, 1, SchattenIndex::FROBENIUS, &tol()).unwrap();
    assert!(!r.holds);
    assert_eq!((r.lhs, r.rhs_upper), (1.0, Some(0.0)));
    assert!(r.sub("codim_k_form").unwrap().holds());
}

#[test]
fn angle_lower_is_tight_for_flat_rank_k() {
    let a = spectrum(8, 6, &[2.0, 2.0, 0.0, 0.0, 0.0, 0.0], 17);
    let proj = haar_projector(8, 3, 17);
    for p in [SchattenIndex::FROBENIUS, SchattenIndex::Inf] {
        let r = check_angle_lower(&a, 2, &proj, p, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.lhs - r.rhs_lower.unwrap()).abs() <= 1e-8 * 2.0, "{r:?}");
    }
}

#[test]
fn angle_lower_seed_18() {
    let a = spectrum(8, 4, &[4.0, 3.0, 1.0, 0.5], 18);
    let proj = haar_projector(8, 3, 18);
    for p in [SchattenIndex::FROBENIUS, SchattenIndex::Inf] {
        let r = check_angle_lower(&a, 2, &proj, p, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
        let u = rows(dominant(&a, 2).matrix());
        let sines = angle_sines(&u, &rows(proj.basis().matrix()));
        let rhs = 3.0 * schatten_sv(&sines, oracle_p(p));
        assert_close("rhs", r.rhs_lower.unwrap(), rhs, 1e-9);
    }
}

#[test]
fn angle_upper_is_tight_at_the_dominant_projector() {
    let a = spectrum(8, 4, &[4.0, 3.0, 1.0, 0.5], 19);
    let proj = Projector::from_orthonormal(dominant(&a, 2));
    for which in [AngleNorm::Two, AngleNorm::Fro] {
        let r = check_angle_upper(&a, 2, &proj, which, &tol()).unwrap();
        assert_tight_upper(&r, 1e-10);
        let expect = match which {
            AngleNorm::Two => 1.0,
            AngleNorm::Fro => (1.0f64 + 0.25).sqrt(),
        };
        assert_close("tail", r.lhs, expect, 1e-10);
    }
}

#[test]
fn angle_upper_rank_k_reduces_to_sine_term() {
    let a = spectrum(8, 6, &[3.0, 1.0, 0.0, 0.0, 0.0, 0.0], 20);
    let proj = haar_projector(8, 3, 20);
    for which in [AngleNorm::Two, AngleNorm::Fro] {
        let r = check_angle_upper(&a, 2, &proj, which, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
        let sin_key = if which == AngleNorm::Two { "sin_theta_2" } else { "sin_theta_fro" };
        assert_close("reduced", r.rhs_upper.unwrap(), 3.0 * r.context.scalars[sin_key], 1e-10);
    }
}

#[test]
fn angle_upper_seed_19_full_and_simplified() {
    let a = spectrum(9, 4, &[4.0, 3.0, 1.0, 0.5], 19);
    let proj = haar_projector(9, 3, 19);
    for which in [AngleNorm::Two, AngleNorm::Fro] {
        let r = check_angle_upper(&a, 2, &proj, which, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.context.labels["simplified_window"], "yes");
        assert!(r.sub("simplified").unwrap().holds());
        assert!(r.sub("gamma_two_norm_is_one").unwrap().holds());
    }
}

#[test]
fn combined_bounds_at_the_dominant_projector() {
    let a = spectrum(8, 5, &[4.0, 3.0, 1.0, 0.5, 0.1], 21);
    let proj = Projector::from_orthonormal(dominant(&a, 2));
    for p in [SchattenIndex::NUCLEAR, SchattenIndex::FROBENIUS, SchattenIndex::Finite(4), SchattenIndex::Inf] {
        let r = check_combined_theorem6(&a, 2, &proj, p, &tol()).unwrap();
        assert!(r.rhs_lower.unwrap().abs() < 1e-12);
        assert_tight_upper(&r, 1e-9);
    }
}

#[test]
fn combined_bounds_coincide_for_flat_rank_k() {
    let a = spectrum(8, 6, &[1.5, 1.5, 0.0, 0.0, 0.0, 0.0], 22);
    let proj = haar_projector(8, 3, 22);
    for p in [SchattenIndex::NUCLEAR, SchattenIndex::FROBENIUS, SchattenIndex::Finite(4), SchattenIndex::Inf] {
        let r = check_combined_theorem6(&a, 2, &proj, p, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
        let (lo, hi) = (r.rhs_lower.unwrap(), r.rhs_upper.unwrap());
        assert!((lo - r.lhs).abs() <= 1e-8 * 1.5 && (hi - r.lhs).abs() <= 1e-8 * 1.5, "{r:?}");
    }
}

#[test]
fn combined_bounds_seed_20_are_strict() {
    let a = gaussian_matrix(8, 6, 20);
    let proj = haar_projector(8, 3, 20);
    let r = check_combined_theorem6(&a, 2, &proj, SchattenIndex::FROBENIUS, &tol()).unwrap();
    assert!(r.holds && r.slack > 0.0, "{r:?}");
    assert!(r.lhs > r.rhs_lower.unwrap() && r.lhs < r.rhs_upper.unwrap());
    assert_eq!(r.context.labels["proven_norm"], "yes");
}

#[test]
fn combined_bounds_reject_rank_window() {
    let a = gaussian_matrix(6, 5, 23);
    for l in [1, 4, 5] {
        let err = check_combined_theorem6(&a, 2, &haar_projector(6, l, 23), SchattenIndex::Inf, &tol()).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { bound_id: "thm6", .. }), "{err}");
        assert!(err.to_string().contains("k <= rank(P) < m - k"), "{err}");
    }
}
