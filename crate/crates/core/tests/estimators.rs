use packpress_core::oracles::{forced_cylinder_length, multi_generator_identical_shift_alpha, shift_oracle_alpha, ShiftOracleSpec};
use packpress_core::packing::Weighting;
use packpress_core::pressure::{critical_exponent, critical_exponent_of, Bisection};
use packpress_core::{Closedness, DisjointMode, PackingProblem, Point, Potential, SampleSet, Scale, Strategy, System};
use proptest::prelude::*;

fn shift_alpha(m: u8, k: usize, n: usize, eps: f64, f: &Potential) -> f64 {
    let sys = System::full_shift(m, m as f64, k).unwrap();
    let z = SampleSet::cylinder_complete(&sys, forced_cylinder_length(n, eps, m as f64, Closedness::Closed)).unwrap();
    critical_exponent(&sys, &z, Scale::new(n, n, eps).unwrap(), f, DisjointMode::Triangle, Strategy::Greedy, Bisection::default())
        .unwrap()
        .alpha
}

#[test]
fn potential_oracle_on_two_shift() {
    for &(n, eps) in &[(4, 0.1), (6, 0.2), (8, 0.15)] {
        let table = vec![0.0, 0.7];
        let expected = shift_oracle_alpha(&ShiftOracleSpec::new(2, 2.0, eps, n).with_potential(table.clone())).unwrap();
        let got = shift_alpha(2, 1, n, eps, &Potential::first_symbol(table));
        assert!((got - expected).abs() < 1e-6, "n={n} eps={eps}: {got} vs {expected}");
    }
}

#[test]
fn identical_generators_decay() {
    let mut last = f64::INFINITY;
    for n in 2..=6 {
        let got = shift_alpha(2, 2, n, 0.2, &Potential::zero());
        let expected = multi_generator_identical_shift_alpha(2, 2.0, 0.2, 2, n).unwrap();
        assert!((got - expected).abs() < 1e-6);
        assert!(got < last);
        last = got;
    }
}

#[test]
fn shared_sample_mode_on_the_circle_is_finite() {
    let sys = System::circle_maps(&[2, 3]).unwrap();
    let z = SampleSet::random(&sys, 80, 5, 0).unwrap();
    let p = PackingProblem::new(&sys, &z, Scale::new(3, 4, 0.3).unwrap(), &Potential::zero(), DisjointMode::SharedSample, Weighting::Pointwise)
        .unwrap();
    let r = critical_exponent_of(&p, Strategy::Greedy, Bisection::default()).unwrap();
    assert!(r.alpha.is_finite());
    assert!(r.ln_m_lo >= 0.0 && r.ln_m_hi <= 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bowen_distance_is_symmetric_on_the_circle(x in 0.0f64..1.0, y in 0.0f64..1.0, n in 1usize..5) {
        let sys = System::circle_maps(&[2, 3]).unwrap();
        let (p, q) = (Point::torus(vec![x]), Point::torus(vec![y]));
        let a = packpress_core::bowen::bowen_distance(&sys, &p, &q, n, None).unwrap().value;
        let b = packpress_core::bowen::bowen_distance(&sys, &q, &p, n, None).unwrap().value;
        prop_assert_eq!(a, b);
        prop_assert!(a <= 0.5);
    }

    #[test]
    fn forced_length_matches_the_closed_form(n in 1usize..20, eps in 0.01f64..1.0) {
        let s = forced_cylinder_length(n, eps, 2.0, Closedness::Closed);
        let x = n as f64 * eps / std::f64::consts::LN_2;
        // away from integer boundaries the length is n - 1 + ceil(x)
        prop_assume!((x - x.round()).abs() > 1e-9);
        prop_assert_eq!(s, n - 1 + x.ceil() as usize);
    }

    #[test]
    fn shift_alpha_is_linear_in_constants(c in -2.0f64..2.0, n in 2usize..6) {
        let a = shift_alpha(2, 1, n, 0.2, &Potential::zero());
        let b = shift_alpha(2, 1, n, 0.2, &Potential::constant(c));
        prop_assert!((b - a - c).abs() <= 2e-6);
    }
}
