mod common;

use common::{congruence_perturb, random_orthogonal, random_spd};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use relsin_core::angles::{chol_correction_block, sin_theta_euclid, sin_theta_m, sin_theta_m_corrected};
use relsin_core::bounds::{check_dichotomy, rel_gap, rel_gap_p, sylvester_diag_solve, Dichotomy, PNorm};
use relsin_core::matpair::{m_orthonormalize, pair_eigendecompose, partition, singular_values, spd_sqrt, SymMatrix};
use relsin_core::perturb::{measure, psi_bound_from_eta};

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn random_basis(n: usize, k: usize, rng: &mut ChaCha20Rng) -> DMatrix<f64> {
    random_orthogonal(n, rng).columns(0, k).into_owned()
}

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e3, 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sines_lie_in_unit_interval_and_norms_are_ordered(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let k = 1 + (seed as usize) % (n - 1);
        let m = random_spd(n, 1.0, &mut r);
        let x = m_orthonormalize(&DMatrix::from_fn(n, k, |_, _| rand::Rng::random_range(&mut r, -1.0..1.0)), &m).unwrap();
        let y = m_orthonormalize(&DMatrix::from_fn(n, k, |_, _| rand::Rng::random_range(&mut r, -1.0..1.0)), &m).unwrap();
        let a = sin_theta_m(&x, &y, &m).unwrap();
        prop_assert_eq!(a.sines.len(), k);
        prop_assert!(a.sines.iter().all(|s| (-1e-15..=1.0 + 1e-12).contains(s)));
        prop_assert!(a.norm2 <= a.norm_f + 1e-14);
        prop_assert!(a.norm_f <= (k as f64).sqrt() * a.norm2 + 1e-14);
    }

    #[test]
    fn weighted_angles_are_symmetric(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let k = 1 + (seed as usize) % (n - 1);
        let m = random_spd(n, 1.0, &mut r);
        let x = m_orthonormalize(&random_basis(n, k, &mut r), &m).unwrap();
        let y = m_orthonormalize(&random_basis(n, k, &mut r), &m).unwrap();
        let xy = sin_theta_m(&x, &y, &m).unwrap();
        let yx = sin_theta_m(&y, &x, &m).unwrap();
        for (a, b) in xy.sines.iter().zip(&yx.sines) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn euclidean_angles_obey_the_triangle_inequality(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let k = 1 + (seed as usize) % (n - 1);
        let x = random_basis(n, k, &mut r);
        let y = random_basis(n, k, &mut r);
        let z = random_basis(n, k, &mut r);
        let xz = sin_theta_euclid(&x, &z).unwrap();
        let xy = sin_theta_euclid(&x, &y).unwrap();
        let yz = sin_theta_euclid(&y, &z).unwrap();
        prop_assert!(xz.norm2 <= xy.norm2 + yz.norm2 + 1e-12);
        prop_assert!(xz.norm_f <= xy.norm_f + yz.norm_f + 1e-12);
    }

    #[test]
    fn psi_is_dominated_by_eta(seed in any::<u64>(), n in 2usize..9, eta in 0.0f64..0.95) {
        let mut r = rng(seed);
        let a = random_spd(n, 1.5, &mut r);
        let at = congruence_perturb(&a, eta, &mut r);
        let m = measure(&a, &at).unwrap();
        prop_assert!((m.eta - eta).abs() < 1e-10);
        prop_assert!(m.psi2 <= psi_bound_from_eta(m.eta).unwrap() + 1e-12);
        prop_assert!(m.psi_f <= m.phi_f / (1.0 - m.eta).sqrt() + 1e-12);
        prop_assert!(m.phi2 <= m.phi_f + 1e-14);
    }

    #[test]
    fn relative_gap_is_invariant_under_inversion(a in spectrum(), b in spectrum()) {
        let inv = |v: &[f64]| v.iter().map(|x| 1.0 / x).collect::<Vec<_>>();
        let g = rel_gap(&a, &b).unwrap();
        let gi = rel_gap(&inv(&a), &inv(&b)).unwrap();
        prop_assert!((g - gi).abs() <= 1e-12 * g.max(1.0));
    }

    #[test]
    fn separation_ratio_bounds_every_p_gap(low in spectrum(), high in spectrum(), shift in 1.0f64..10.0) {
        let top = low.iter().cloned().fold(f64::MIN, f64::max);
        let high: Vec<f64> = high.iter().map(|h| top * shift + h).collect();
        for (hat2, tilde1) in [(&low, &high), (&high, &low)] {
            let d = check_dichotomy(hat2, tilde1).unwrap();
            prop_assert!(d.dichotomy != Dichotomy::Interlaced);
            let ratio = d.separation_ratio().unwrap();
            for p in PNorm::ALL {
                prop_assert!(ratio >= rel_gap_p(hat2, tilde1, p).unwrap() - 1e-12);
            }
        }
    }

    #[test]
    fn sylvester_solution_has_small_residual(
        hat in prop::collection::vec(1.0f64..10.0, 1..5),
        tilde in prop::collection::vec(20.0f64..40.0, 1..5),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let c = DMatrix::from_fn(hat.len(), tilde.len(), |_, _| rand::Rng::random_range(&mut r, -1.0..1.0));
        let z = sylvester_diag_solve(&hat, &tilde, &c).unwrap();
        let dh = DMatrix::from_diagonal(&DVector::from_column_slice(&hat));
        let dt = DMatrix::from_diagonal(&DVector::from_column_slice(&tilde));
        let residual = &dh * &z - &z * &dt + &c * &dt;
        prop_assert!(residual.amax() < 1e-12 * (c.amax() * 40.0).max(1.0));
        let comp = relsin_core::bounds::rel_gap_comp(&hat, &tilde).unwrap();
        prop_assert!(z.norm() <= c.norm() / comp + 1e-12);
    }

    #[test]
    fn pair_decomposition_reconstructs(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let h = random_spd(n, 1.5, &mut r);
        let m = random_spd(n, 1.0, &mut r);
        let e = pair_eigendecompose(&h, &m).unwrap();
        let xtmx = e.x.transpose() * m.as_matrix() * &e.x;
        let xthx = e.x.transpose() * h.as_matrix() * &e.x;
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&e.lambda));
        prop_assert!((xtmx - DMatrix::identity(n, n)).amax() < 1e-10);
        prop_assert!((&xthx - &lambda).amax() < 1e-10 * e.lambda.iter().cloned().fold(1.0, f64::max));
        prop_assert!(e.lambda.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn correction_does_not_depend_on_the_factor(seed in any::<u64>(), n in 2usize..8, eta in 0.0f64..0.4) {
        let mut r = rng(seed);
        let k = 1 + (seed as usize) % (n - 1);
        let h = random_spd(n, 1.0, &mut r);
        let m = random_spd(n, 1.0, &mut r);
        let mt = congruence_perturb(&m, eta, &mut r);
        let hat = partition(&pair_eigendecompose(&h, &m).unwrap(), k).unwrap();
        let tilde = partition(&pair_eigendecompose(&h, &mt).unwrap(), k).unwrap();
        let delta = &mt - &m;
        let corr = chol_correction_block(&tilde.x1, &delta).unwrap();
        let lower = sin_theta_m_corrected(&hat.x2, &m, &tilde.x1, &corr).unwrap();

        // Symmetric square root in place of the Cholesky factor.
        let block = SymMatrix::symmetrize(
            &(DMatrix::identity(k, k) - tilde.x1.transpose() * delta.as_matrix() * &tilde.x1),
        ).unwrap();
        let root = spd_sqrt(&block).unwrap();
        let coupling = hat.x2.transpose() * m.as_matrix() * &tilde.x1;
        let alt = singular_values(&(coupling * root.as_matrix().clone().try_inverse().unwrap())).unwrap();
        for (a, b) in lower.sines.iter().zip(&alt) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        // The corrected sines equal the exact angle to the rescaled basis.
        let exact = sin_theta_m(&hat.x1, &m_orthonormalize(&tilde.x1, &m).unwrap(), &m).unwrap();
        prop_assert!((exact.norm2 - lower.norm2).abs() < 1e-9);
    }
}
