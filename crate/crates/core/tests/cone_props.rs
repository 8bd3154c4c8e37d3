use mhessian::cone::{self, binomial, DirectionSample, EigenVector, HermitianForm};
use mhessian::oracle;
use mhessian::rng::SeededRng;
use mhessian::suite::{random_cone_form, random_cone_vector, random_hermitian, run_cone_suite};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 1..=n))
}

fn scale(lambda: &[f64], k: usize) -> f64 {
    let top = lambda.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    binomial(lambda.len(), k) * top.powi(k as i32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn recurrence_matches_subset_enumeration(
        lambda in prop::collection::vec(-3.0f64..3.0, 1..=8),
        k in 1usize..=8,
    ) {
        prop_assume!(k <= lambda.len());
        let all = cone::elementary_symmetric_all(&lambda, k);
        let oracle = oracle::sk_enumerate(&lambda, k).unwrap().value;
        prop_assert!((all[k] - oracle).abs() <= 1e-12 * scale(&lambda, k));
    }

    #[test]
    fn cones_are_nested((n, k) in dims(), lambda in prop::collection::vec(-1.0f64..2.0, 6)) {
        prop_assume!(k >= 2);
        let v = EigenVector::new(&lambda[..n]).unwrap();
        if cone::in_gamma_k(&v, k).unwrap() {
            prop_assert!(cone::in_gamma_k(&v, k - 1).unwrap());
        }
    }

    #[test]
    fn positive_orthant_lies_in_every_cone((n, k) in dims(), lambda in prop::collection::vec(0.01f64..3.0, 6)) {
        let v = EigenVector::new(&lambda[..n]).unwrap();
        prop_assert!(cone::in_gamma_k(&v, k).unwrap());
    }

    #[test]
    fn root_is_concave_on_the_cone((n, k) in dims(), seed in any::<u64>(), t in 0.0f64..=1.0) {
        let mut rng = SeededRng::new(seed);
        let a = random_cone_vector(n, k, &mut rng);
        let b = random_cone_vector(n, k, &mut rng);
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        let r = |v: &[f64]| cone::sk_root(&EigenVector::new(v).unwrap(), k).unwrap();
        prop_assert!(r(&mix) >= t * r(&a) + (1.0 - t) * r(&b) - 1e-10);
    }

    #[test]
    fn minors_match_eigenvalues((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_hermitian(n, &mut rng);
        let spec = cone::eigenvalues(&a).unwrap();
        let via_eig = cone::hessian_symmetric(&a, k).unwrap();
        let via_minors = oracle::minor_enumerate(&a, k).unwrap().value;
        prop_assert!((via_eig - via_minors).abs() <= 1e-10 * scale(spec.as_slice(), k));
    }

    #[test]
    fn eigenvalues_are_unitarily_invariant(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_hermitian(n, &mut rng);
        let u = cone::random_unitary(n, &mut rng);
        let e1 = cone::eigenvalues(&a).unwrap();
        let e2 = cone::eigenvalues(&a.conjugate_by(&u)).unwrap();
        for (x, y) in e1.as_slice().iter().zip(e2.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!((e1.as_slice().iter().sum::<f64>() - a.trace()).abs() <= 1e-10);
    }

    #[test]
    fn euler_identity((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_cone_form(n, k, &mut rng);
        let t = cone::garding_gradient(&a, k).unwrap();
        let spec = cone::eigenvalues(&a).unwrap();
        let lhs = t.trace_product(&a);
        let rhs = k as f64 * cone::hessian_symmetric(&a, k).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale(spec.as_slice(), k));
    }

    #[test]
    fn gradient_is_positive_on_the_cone((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_cone_form(n, k, &mut rng);
        let t = cone::garding_gradient(&a, k).unwrap();
        let spec = cone::eigenvalues(&a).unwrap();
        let low = cone::eigenvalues(&t).unwrap().as_slice().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(low >= -1e-10 * scale(spec.as_slice(), k.saturating_sub(1)));
    }

    #[test]
    fn gradient_matches_finite_differences((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_hermitian(n, &mut rng);
        let fd = oracle::fd_gradient(|x| cone::hessian_symmetric(x, k).unwrap(), &a, 1e-5).unwrap().value;
        let g = cone::garding_gradient(&a, k).unwrap();
        for (x, y) in fd.iter().zip(g.entries()) {
            prop_assert!((x - y).norm() <= 1e-6);
        }
    }

    #[test]
    fn density_is_homogeneous((n, k) in dims(), seed in any::<u64>(), s in 0.0f64..3.0) {
        let mut rng = SeededRng::new(seed);
        let a = random_hermitian(n, &mut rng);
        let spec = cone::eigenvalues(&a).unwrap();
        let lhs = cone::hessian_density(&a.scale(s), k).unwrap();
        let rhs = s.powi(k as i32) * cone::hessian_density(&a, k).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale(spec.as_slice(), k) * s.max(1.0).powi(k as i32));
    }

    #[test]
    fn identity_has_unit_density((n, k) in dims()) {
        let d = cone::hessian_density(&HermitianForm::identity(n), k).unwrap();
        prop_assert!((d - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn sampled_infimum_bounds_the_root((n, k) in dims(), seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_cone_form(n, k, &mut rng);
        let target = cone::hessian_density(&a, k).unwrap().powf(1.0 / k as f64);
        let plain = DirectionSample::generate(n, k, 16, rng.next_u64(), None).unwrap();
        prop_assert!(cone::garding_infimum(&a, k, &plain.directions).unwrap() >= target - 1e-9);
        let with_self = DirectionSample::generate(n, k, 16, rng.next_u64(), Some(&a)).unwrap();
        let inf = cone::garding_infimum(&a, k, &with_self.directions).unwrap();
        prop_assert!((inf - target).abs() <= 1e-9);
    }

    #[test]
    fn directions_have_unit_density((n, k) in dims(), seed in any::<u64>()) {
        let sample = DirectionSample::generate(n, k, 12, seed, None).unwrap();
        for d in &sample.directions {
            prop_assert!((cone::hessian_density(d, k).unwrap() - 1.0).abs() <= 1e-9);
            prop_assert!(cone::is_m_positive(d, k).unwrap());
        }
    }
}

#[test]
fn boundary_vectors_clamp_to_zero() {
    // S_2(1, 1, -1/2) = 0 and S_1 > 0
    let v = EigenVector::new(&[1.0, 1.0, -0.5]).unwrap();
    assert!(cone::in_gamma_k(&v, 2).unwrap());
    assert!(cone::sk_root(&v, 2).unwrap() <= 1e-6);
    let outside = EigenVector::new(&[1.0, 1.0, -0.6]).unwrap();
    assert!(!cone::in_gamma_k(&outside, 2).unwrap());
}

#[test]
fn quick_suite_reports_no_violations() {
    let r = run_cone_suite(6, None, 500, 17).unwrap();
    assert!(r.passed(), "{r}");
    let (_, _, lhs, rhs) = r.euler_spot_check.unwrap();
    assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
}

#[test]
fn orders_out_of_range_are_rejected() {
    let a = HermitianForm::identity(3);
    assert!(cone::hessian_density(&a, 4).is_err());
    assert!(DirectionSample::generate(3, 0, 4, 1, None).is_err());
}
