use mpgabor_core::symplectic::{
    euler_decompose, free_factorization, free_particle_euler, free_particle_flow, free_particle_sigma,
    is_symplectic_rotation, random_symplectic, random_symplectic_with_sigma, symplectic_residual,
};
use mpgabor_core::{Matrix, SymplecticMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn euler_round_trip(seed in any::<u64>(), d in 1usize..=3, smax in 1.0f64..16.0) {
        let (s, drawn) = random_symplectic_with_sigma(seed, d, smax).unwrap();
        let dec = euler_decompose(&s).unwrap();
        prop_assert!(dec.reconstruction_residual(&s) <= 1e-9);
        prop_assert!(dec.rotation_residual() <= 1e-9);
        prop_assert!(dec.sigma().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(dec.sigma().iter().all(|&x| x >= 1.0 - 1e-12));
        for (a, b) in dec.sigma().iter().zip(&drawn) {
            prop_assert!((a - b).abs() <= 1e-8 * b);
        }
    }

    #[test]
    fn sigma_matches_independent_svd(seed in any::<u64>(), d in 1usize..=3) {
        let s = random_symplectic(seed, d, 16.0).unwrap();
        let dec = euler_decompose(&s).unwrap();
        let sv = to_na(s.matrix()).singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        for (k, x) in dec.sigma().iter().enumerate() {
            prop_assert!((x - sv[k]).abs() <= 1e-9 * sv[k]);
            // reciprocal pairs
            prop_assert!((sv[2 * d - 1 - k] * x - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn determinant_is_one(seed in any::<u64>(), d in 1usize..=3) {
        let s = random_symplectic(seed, d, 8.0).unwrap();
        prop_assert!((to_na(s.matrix()).determinant() - 1.0).abs() <= 1e-9);
        prop_assert!((s.matrix().determinant().unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn products_and_inverses_stay_symplectic(a in any::<u64>(), b in any::<u64>(), d in 1usize..=3) {
        let s = random_symplectic(a, d, 4.0).unwrap();
        let t = random_symplectic(b, d, 4.0).unwrap();
        let st = s.compose(&t).unwrap();
        prop_assert!(symplectic_residual(st.matrix()).unwrap() <= 1e-9);
        let prod = &to_na(s.matrix()) * &to_na(t.matrix());
        prop_assert!((&prod - to_na(st.matrix())).amax() <= 1e-12 * (1.0 + prod.amax()));
        let inv = to_na(s.matrix()).try_inverse().unwrap();
        let ours = to_na(s.inverse().matrix());
        prop_assert!((inv - ours).amax() <= 1e-9);
    }

    #[test]
    fn free_factorization_recomposes(seed in any::<u64>(), d in 1usize..=3) {
        let s = random_symplectic(seed, d, 8.0).unwrap();
        let f = free_factorization(&s).unwrap();
        prop_assert!(f.recompose().unwrap().max_abs_diff(s.matrix()) <= 1e-9 * s.matrix().max_abs().max(1.0));
    }
}

#[test]
fn free_particle_closed_form() {
    for t in [0.0, 0.5, 1.0, 2.0, 8.0, -3.0] {
        let s = free_particle_flow(t, 2);
        let dec = euler_decompose(&s).unwrap();
        let sg = (1.0 + t * t).sqrt() + t.abs();
        assert!(dec.sigma().iter().all(|x| (x - sg).abs() <= 1e-8), "t={t}: {:?}", dec.sigma());
        assert_eq!(free_particle_sigma(t), sg);
        let closed = free_particle_euler(t, 2).unwrap();
        assert!(closed.reconstruction_residual(&s) <= 1e-10);
        assert!(is_symplectic_rotation(closed.u(), 1e-12).unwrap());
        assert!(is_symplectic_rotation(closed.v(), 1e-12).unwrap());
    }
}

#[test]
fn rejects_non_symplectic() {
    let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
    assert!(SymplecticMatrix::new(m).is_err());
}
