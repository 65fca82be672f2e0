use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use symctl::feedback::{generic_system, pairs, place_poles, FeedbackProblem, GenericParams, SkewFeedback, Variant};
use symctl::fixtures;
use symctl::purbhoo::{purbhoo_transfer, reality_experiment_on};
use symctl::schubert::{
    annihilator, dm, geometry_identity_check, intersection_test, isotropic_check, subspace_distance, FormKind,
    PlaneBasis,
};
use symctl::sysreal::{transfer_eval, TransferProbe};
use symctl::feedback::SolverOptions;
use symctl::{CMatrix, Error, Tolerances};

fn kind_strategy() -> impl Strategy<Value = FormKind> {
    prop::sample::select(vec![FormKind::Symplectic, FormKind::SplitOrthogonal])
}

/// `d_m` as a product of rationals `k!/(2k−1)!`-style factors, without
/// integer division.
fn dm_rational(m: u32) -> BigRational {
    let fact = |k: u32| -> BigRational {
        BigRational::from_integer((1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
    };
    let mut q = fact(m * (m - 1) / 2);
    for k in 1..m.saturating_sub(1) {
        q *= fact(k);
    }
    for k in 1..m {
        q /= fact(2 * k - 1);
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn annihilator_is_an_involution(seed in any::<u64>(), kind in kind_strategy(), m in 1usize..6, k in 0usize..11) {
        let k = k % (2 * m + 1);
        let mut rng = fixtures::rng(seed);
        let tol = Tolerances::default();
        let h = PlaneBasis::new(fixtures::complex_matrix(&mut rng, k, 2 * m), &tol).unwrap();
        let ann = annihilator(&h, kind, &tol);
        prop_assert_eq!(ann.rows(), 2 * m - k);
        let back = annihilator(&ann, kind, &tol);
        prop_assert!(subspace_distance(&back, &h, &tol) <= 1e-8);
    }

    #[test]
    fn graph_isotropy_characterizes_symmetry(seed in any::<u64>(), m in 1usize..6, shape in 0u8..3) {
        let mut rng = fixtures::rng(seed);
        let f = match shape {
            0 => fixtures::symmetric_matrix(&mut rng, m),
            1 => fixtures::skew_matrix(&mut rng, m),
            _ => fixtures::complex_matrix(&mut rng, m, m),
        };
        let h = PlaneBasis::graph(&f);
        let tol = 1e-8;
        let scale = f.norm().max(1.0);
        let skew = (&f + f.transpose()).norm() <= tol * scale;
        let sym = (&f - f.transpose()).norm() <= tol * scale;
        prop_assert_eq!(isotropic_check(&h, FormKind::SplitOrthogonal, tol), skew);
        prop_assert_eq!(isotropic_check(&h, FormKind::Symplectic, tol), sym);
    }

    #[test]
    fn graph_annihilators_have_closed_form(seed in any::<u64>(), m in 1usize..6) {
        let mut rng = fixtures::rng(seed);
        let tol = Tolerances::default();
        let f = fixtures::complex_matrix(&mut rng, m, m);
        let h = PlaneBasis::graph(&f);
        let j = annihilator(&h, FormKind::Symplectic, &tol);
        prop_assert!(subspace_distance(&j, &PlaneBasis::graph(&f.transpose()), &tol) <= 1e-8);
        let o = annihilator(&h, FormKind::SplitOrthogonal, &tol);
        prop_assert!(subspace_distance(&o, &PlaneBasis::graph(&-f.transpose()), &tol) <= 1e-8);
    }

    #[test]
    fn isotropic_planes_are_fixed_points(seed in any::<u64>(), m in 1usize..6) {
        let mut rng = fixtures::rng(seed);
        let tol = Tolerances::default();
        let skew = PlaneBasis::graph(&fixtures::skew_matrix(&mut rng, m));
        prop_assert!(subspace_distance(&annihilator(&skew, FormKind::SplitOrthogonal, &tol), &skew, &tol) <= 1e-8);
        let sym = PlaneBasis::graph(&fixtures::symmetric_matrix(&mut rng, m));
        prop_assert!(subspace_distance(&annihilator(&sym, FormKind::Symplectic, &tol), &sym, &tol) <= 1e-8);
    }

    #[test]
    fn geometry_identity(seed in any::<u64>(), n in 1usize..9, m in 2usize..5) {
        let mut rng = fixtures::rng(seed);
        let r = fixtures::realization(&mut rng, n, m, false);
        let f = SkewFeedback::new(m, (0..pairs(m)).map(|_| fixtures::complex_normal(&mut rng)).collect()).unwrap();
        let probe = TransferProbe::random(&r, 5, 1e-8, seed);
        let report = geometry_identity_check(&r, &f, &probe.sample_points).unwrap();
        prop_assert!(report.max_deviation <= 1e-8);
    }

    #[test]
    fn random_planes_miss_random_graphs(seed in any::<u64>(), m in 2usize..6) {
        let mut rng = fixtures::rng(seed);
        let tol = Tolerances::default();
        let k = PlaneBasis::new(fixtures::complex_matrix(&mut rng, m, 2 * m), &tol).unwrap();
        let f = SkewFeedback::new(m, (0..pairs(m)).map(|_| fixtures::complex_normal(&mut rng)).collect()).unwrap();
        prop_assume!(fixtures::condition_number(k.basis()) < 1e4);
        prop_assert!(!intersection_test(&k, &f, 1e-8).unwrap().meets);
    }
}

#[test]
fn dm_matches_rational_evaluation() {
    for m in 2..=20u32 {
        let exact = BigInt::from(dm(m as usize).unwrap());
        let q = dm_rational(m);
        assert!(q.is_integer(), "m = {m}");
        assert!(exact > BigInt::zero());
        assert_eq!(q.to_integer(), exact, "m = {m}");
    }
    assert!(matches!(dm(1), Err(Error::InvalidParams(_))));
}

#[test]
fn geometry_at_a_pole_is_singular() {
    let mut rng = fixtures::rng(3);
    let r = fixtures::realization(&mut rng, 3, 2, false);
    let pole = r.a.clone().eigenvalues().unwrap()[0];
    let f = SkewFeedback::zero(2);
    assert!(matches!(geometry_identity_check(&r, &f, &[pole]), Err(Error::SingularAtSample(_))));
}

#[test]
fn unit_determinant_stack_does_not_meet() {
    let tol = Tolerances::default();
    let g = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i * 3 + j) as f64, 0.0));
    let k = PlaneBasis::new(PlaneBasis::graph(&g).basis().clone(), &tol).unwrap();
    let result = intersection_test(&k, &SkewFeedback::zero(3), 1e-8).unwrap();
    assert!(!result.meets);
    assert!(result.margin > 1e-3);
}

#[test]
fn solver_solutions_meet_every_pole_plane() {
    let tol = Tolerances::default();
    let params = GenericParams::standard(3, 3);
    let r = generic_system(3, 6, Variant::SkewSymmetric, &params).unwrap();
    let mut rng = fixtures::rng(11);
    let poles: Vec<Complex64> = (0..3)
        .map(|_| Complex64::new(rng.random_range(-3.0..-0.5), rng.random_range(-1.0..1.0)))
        .collect();
    let problem = FeedbackProblem::new(r.clone(), Variant::SkewSymmetric, poles.clone(), &tol).unwrap();
    let set = place_poles(&problem, 5, None, &tol).unwrap();
    assert!(!set.is_empty());
    for f in &set.solutions {
        for &s in &poles {
            let k = PlaneBasis::graph(&transfer_eval(&r, s).unwrap());
            assert!(intersection_test(&k, f, 1e-8).unwrap().meets);
        }
    }

    let sys = purbhoo_transfer(3, &tol, 2).unwrap();
    let real_poles = [-1.0, -2.0, -3.0];
    let set = reality_experiment_on(&sys, &real_poles, &SolverOptions::default()).unwrap();
    assert_eq!(set.len(), 1);
    for f in &set.solutions {
        for &p in &real_poles {
            let s = Complex64::new(p, 0.0);
            let k = PlaneBasis::new(sys.k.eval(s), &tol).unwrap();
            assert!(intersection_test(&k, f, 1e-8).unwrap().meets);
        }
    }
}
