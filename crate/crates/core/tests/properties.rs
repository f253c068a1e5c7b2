mod common;

use common::*;
use lowrank_perturb::checkers::{check_matrix_additive, mirsky_gap, ToleranceModel};
use lowrank_perturb::dense::{pseudoinverse, svd, DenseMatrix};
use lowrank_perturb::generate::{gaussian_matrix, haar_basis, norm_controlled_noise};
use lowrank_perturb::schatten::{schatten_norm, SchattenIndex};
use lowrank_perturb::subspaces::{cs_block_dims, principal_angles, sin_theta_norm, Projector, DEFAULT_ANGLE_TOL};
use proptest::prelude::*;

const PS: [SchattenIndex; 5] = [
    SchattenIndex::Finite(1),
    SchattenIndex::Finite(2),
    SchattenIndex::Finite(3),
    SchattenIndex::Finite(4),
    SchattenIndex::Inf,
];

fn shape_and_seed() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..9, 1usize..9, any::<u64>())
}

fn norm(a: &DenseMatrix, p: SchattenIndex) -> f64 {
    schatten_norm(a, p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_is_a_factorization((m, n, seed) in shape_and_seed(), amp in -3i32..3) {
        let a = gaussian_matrix(m, n, seed).scale(10f64.powi(amp));
        let f = svd(&a).unwrap();
        let s = f.singular_values();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let scale = s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        prop_assert!(f.reconstruct().max_abs_diff(&a) <= 1e-12 * scale * (m.max(n) as f64));
        prop_assert!(f.u().orthonormality_residual() < 1e-12);
        prop_assert!(f.v().orthonormality_residual() < 1e-12);
        for (x, y) in s.iter().zip(sigmas_of(&a)) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn pseudoinverse_satisfies_penrose((m, n, seed) in shape_and_seed(), rank in 1usize..5) {
        let r = rank.min(m).min(n);
        let a = gaussian_matrix(m, r, seed).matmul(&gaussian_matrix(r, n, seed ^ 1)).unwrap();
        let (ar, x) = (rows(&a), rows(&pseudoinverse(&a).unwrap()));
        let s = sigmas(&ar)[0].max(1.0);
        let ax = mul(&ar, &x);
        let xa = mul(&x, &ar);
        prop_assert!(max_abs(&sub(&mul(&ax, &ar), &ar)) <= 1e-9 * s);
        prop_assert!(max_abs(&sub(&mul(&xa, &x), &x)) <= 1e-9 * max_abs(&x).max(1.0));
        prop_assert!(max_abs(&sub(&ax, &transpose(&ax))) <= 1e-9);
        prop_assert!(max_abs(&sub(&xa, &transpose(&xa))) <= 1e-9);
    }

    #[test]
    fn schatten_norms_decrease_in_p((m, n, seed) in shape_and_seed()) {
        let a = gaussian_matrix(m, n, seed);
        let vals: Vec<f64> = PS.iter().map(|&p| norm(&a, p)).collect();
        prop_assert!(vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn schatten_norms_are_unitarily_invariant((m, n, seed) in shape_and_seed(), extra in 0usize..3) {
        let a = gaussian_matrix(m, n, seed);
        let q1 = haar_basis(m + extra, m, seed ^ 7).unwrap();
        let q2 = haar_basis(n + extra, n, seed ^ 9).unwrap();
        let b = q1.matrix().matmul(&a).unwrap().matmul(&q2.matrix().transpose()).unwrap();
        for p in PS {
            let (x, y) = (norm(&a, p), norm(&b, p));
            prop_assert!((x - y).abs() <= 1e-10 * x.max(1.0));
        }
    }

    #[test]
    fn schatten_norms_are_submultiplicative((m, n, seed) in shape_and_seed(), k in 1usize..6) {
        let a = gaussian_matrix(m, k, seed);
        let b = gaussian_matrix(k, n, seed ^ 3);
        let c = gaussian_matrix(4, m, seed ^ 5);
        let ab = a.matmul(&b).unwrap();
        let cab = c.matmul(&ab).unwrap();
        for p in PS {
            let scale = 1e-10 * (norm(&a, p) * norm(&b, p)).max(1.0);
            prop_assert!(norm(&ab, p) <= norm(&a, p) * norm(&b, p) + scale);
            let strong = norm(&c, SchattenIndex::Inf) * norm(&b, SchattenIndex::Inf) * norm(&a, p);
            prop_assert!(norm(&cab, p) <= strong + 1e-10 * strong.max(1.0));
        }
    }

    #[test]
    fn even_schatten_norm_is_a_q_norm((m, n, seed) in shape_and_seed()) {
        let a = gaussian_matrix(m, n, seed);
        let gram = a.gram_outer();
        for p in [2u32, 4, 6] {
            let lhs = norm(&a, SchattenIndex::Finite(p)).powi(2);
            let rhs = norm(&gram, SchattenIndex::Finite(p / 2));
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
        }
    }

    #[test]
    fn equal_rank_sines_are_symmetric(m in 2usize..9, k_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let k = 1 + ((m - 1) as f64 * k_frac) as usize;
        let k = k.min(m - 1);
        let z = haar_basis(m, k, seed).unwrap();
        let zh = haar_basis(m, k, seed ^ 11).unwrap();
        let (pz, pzh) = (projector(&rows(z.matrix())), projector(&rows(zh.matrix())));
        let cross = mul(&sub(&eye(m), &pz), &pzh);
        let back = mul(&sub(&eye(m), &pzh), &pz);
        for p in PS {
            let op = match p { SchattenIndex::Finite(p) => Some(p), SchattenIndex::Inf => None };
            let s = sin_theta_norm(&z, &zh, p).unwrap();
            prop_assert!((s - schatten(&cross, op)).abs() <= 1e-10);
            prop_assert!((s - schatten(&back, op)).abs() <= 1e-10);
        }
        let ab = principal_angles(&z, &zh).unwrap().angles();
        let ba = principal_angles(&zh, &z).unwrap().angles();
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn larger_subspace_sines_bound(m in 3usize..10, seed in any::<u64>()) {
        let k = 1 + (seed as usize % (m - 2));
        let l = k + 1 + ((seed >> 8) as usize % (m - k - 1));
        let z = haar_basis(m, k, seed).unwrap();
        let zh = haar_basis(m, l, seed ^ 13).unwrap();
        let (pz, pzh) = (projector(&rows(z.matrix())), projector(&rows(zh.matrix())));
        let small = mul(&sub(&eye(m), &pzh), &pz);
        let large = mul(&sub(&eye(m), &pz), &pzh);
        for op in [Some(1), Some(2), Some(4), None] {
            let p = op.map_or(SchattenIndex::Inf, SchattenIndex::Finite);
            let s = sin_theta_norm(&z, &zh, p).unwrap();
            prop_assert!((s - schatten(&small, op)).abs() <= 1e-10);
            prop_assert!(s <= schatten(&large, op) + 1e-10);
        }
    }

    #[test]
    fn cs_block_dims_are_consistent(m in 4usize..12, seed in any::<u64>()) {
        // k < l < m - k needs m >= 4.
        let k = 1 + (seed as usize % ((m - 2) / 2));
        let l = k + 1 + ((seed >> 8) as usize % (m - 2 * k - 1));
        prop_assume!(k < l && l + k < m);
        let z = haar_basis(m, k, seed).unwrap();
        let zh = haar_basis(m, l, seed ^ 17).unwrap();
        let d = cs_block_dims(&z, &zh, DEFAULT_ANGLE_TOL).unwrap();
        prop_assert!(d.consistent_with(k, l, m));
    }

    #[test]
    fn weyl_and_mirsky((m, n, seed) in shape_and_seed(), mag in 0.0f64..2.0) {
        let a = gaussian_matrix(m, n, seed);
        let e = norm_controlled_noise(m, n, mag, seed ^ 19).unwrap();
        let s_a = sigmas_of(&a);
        let s_p = sigmas_of(&a.try_add(&e).unwrap());
        for (x, y) in s_a.iter().zip(&s_p) {
            prop_assert!((x - y).abs() <= mag + 1e-10 * s_a[0].max(1.0));
        }
        let h = a.try_add(&e).unwrap();
        for q in [SchattenIndex::NUCLEAR, SchattenIndex::FROBENIUS, SchattenIndex::Inf] {
            let (lhs, rhs) = mirsky_gap(&a, &h, q).unwrap();
            prop_assert!(lhs <= rhs + 1e-10 * s_a[0].max(1.0).powi(2));
        }
    }

    #[test]
    fn additive_residual_bound_holds_for_any_projector((m, n, seed) in shape_and_seed(), l_frac in 0.0f64..1.0, mag in 0.0f64..3.0) {
        let a = gaussian_matrix(m, n, seed);
        let e = norm_controlled_noise(m, n, mag, seed ^ 23).unwrap();
        let l = ((m as f64) * l_frac) as usize;
        let proj = Projector::from_orthonormal(haar_basis(m, l, seed ^ 29).unwrap());
        for p in PS {
            let r = check_matrix_additive(&a, &e, &proj, p, &ToleranceModel::default()).unwrap();
            prop_assert!(r.holds, "{:?}", r);
        }
    }
}
