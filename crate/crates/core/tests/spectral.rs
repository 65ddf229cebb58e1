use pathsum::spectral::{check_generalized_axioms, product_measure, GeneralizedConfig, MAX_SYMMETRIZE_N};
use pathsum::{eval_spectral, pn_amplitude, quantum_spectrum, symmetrize, Atom, Error, InvariantVector, SpectralMeasure};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Random measure on `n` arguments: each atom's frequencies are centred so
/// they sum to zero.
fn measure(n: usize, atoms: usize) -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((-3.0..3.0f64, prop::collection::vec(-2.0..2.0f64, n)), 1..=atoms).prop_map(move |raw| {
        let atoms = raw
            .into_iter()
            .map(|(w, mut alpha)| {
                let mean = alpha.iter().sum::<f64>() / n as f64;
                alpha.iter_mut().for_each(|a| *a -= mean);
                Atom::new(w, alpha)
            })
            .collect();
        SpectralMeasure::new(n, atoms).unwrap()
    })
}

fn measure_and_point(max_n: usize) -> impl Strategy<Value = (SpectralMeasure, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| (measure(n, 6), prop::collection::vec(-10.0..10.0f64, n)))
}

proptest! {
    #[test]
    fn quantum_spectrum_is_the_amplitude(
        phis in prop::collection::vec(-10.0..10.0f64, 1..=16),
        kappa in prop_oneof![Just(0.1), Just(1.0), Just(7.0)],
    ) {
        let m = quantum_spectrum(phis.len(), kappa);
        prop_assert_eq!(m.atoms.len(), 1 + phis.len() * (phis.len() - 1) / 2);
        let p = pn_amplitude(&InvariantVector::new(phis.clone(), kappa).unwrap()).unwrap();
        prop_assert!(rel(eval_spectral(&m, &phis).unwrap(), p) < 1e-10);
    }

    #[test]
    fn every_measure_is_even((m, phis) in measure_and_point(8)) {
        let neg: Vec<f64> = phis.iter().map(|p| -p).collect();
        prop_assert_eq!(eval_spectral(&m, &phis).unwrap(), eval_spectral(&m, &neg).unwrap());
    }

    #[test]
    fn every_measure_ignores_common_shifts((m, phis) in measure_and_point(8), c in -20.0..20.0f64) {
        let shifted: Vec<f64> = phis.iter().map(|p| p + c).collect();
        prop_assert!(rel(eval_spectral(&m, &phis).unwrap(), eval_spectral(&m, &shifted).unwrap()) < 1e-10);
    }

    #[test]
    fn symmetrized_measure_is_permutation_invariant(
        (m, phis) in measure_and_point(5),
        perm_seed in any::<u64>(),
    ) {
        let s = symmetrize(&m).unwrap();
        let mut perm: Vec<usize> = (0..phis.len()).collect();
        let mut state = perm_seed;
        for i in (1..perm.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let permuted: Vec<f64> = perm.iter().map(|&i| phis[i]).collect();
        prop_assert!(rel(eval_spectral(&s, &phis).unwrap(), eval_spectral(&s, &permuted).unwrap()) < 1e-12);
    }

    #[test]
    fn symmetrizing_twice_changes_nothing((m, phis) in measure_and_point(4)) {
        let once = symmetrize(&m).unwrap();
        let twice = symmetrize(&once).unwrap();
        prop_assert!((eval_spectral(&once, &phis).unwrap() - eval_spectral(&twice, &phis).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn product_measures_compose(
        (a, x) in measure_and_point(3),
        (b, y) in measure_and_point(3),
    ) {
        let p = product_measure(&a, &b).unwrap();
        let composite: Vec<f64> = x.iter().flat_map(|xi| y.iter().map(move |yj| xi + yj)).collect();
        let lhs = eval_spectral(&p, &composite).unwrap();
        let rhs = eval_spectral(&a, &x).unwrap() * eval_spectral(&b, &y).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(rhs.abs()).max(1.0));
    }
}

#[test]
fn symmetrized_quantum_spectrum_evaluates_the_same() {
    let m = quantum_spectrum(3, 1.7);
    let s = symmetrize(&m).unwrap();
    for k in 0..100 {
        let phis = [0.37 * k as f64, -1.1 + 0.05 * k as f64, (k as f64).sin() * 4.0];
        assert!((eval_spectral(&m, &phis).unwrap() - eval_spectral(&s, &phis).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn generalized_axioms() {
    let cfg = GeneralizedConfig::default();
    let q = check_generalized_axioms(&quantum_spectrum(4, 1.0), &cfg).unwrap();
    assert!(q.all_hold());

    let triple = SpectralMeasure::new(
        3,
        vec![Atom::new(3.0, vec![0.0; 3]), Atom::new(1.0, vec![1.0, 1.0, -2.0])],
    )
    .unwrap();
    let r = check_generalized_axioms(&triple, &cfg).unwrap();
    assert!(r.time_symmetric && r.shift_invariant);
    assert!(!r.pairwise_additive);
    assert!(r.pairwise_additivity.max_abs_residual > 0.1);

    let constant = SpectralMeasure::new(2, vec![Atom::new(4.0, vec![0.0, 0.0])]).unwrap();
    assert!(check_generalized_axioms(&constant, &cfg).unwrap().all_hold());
}

/// The triple atom's mixed third difference, computed by hand:
/// `prod_k (exp(i h a_k) - 1)` applied to `cos(a . phi)`.
#[test]
fn triple_atom_defect_by_hand() {
    let f = |p: [f64; 3]| (p[0] + p[1] - 2.0 * p[2]).cos();
    let (phi, h) = ([0.3, -0.8, 1.1], 1.0);
    let mut defect = 0.0;
    for mask in 0..8u32 {
        let mut p = phi;
        let mut sign = -1.0;
        for (k, pk) in p.iter_mut().enumerate() {
            if mask >> k & 1 == 1 {
                *pk += h;
                sign = -sign;
            }
        }
        defect += sign * f(p);
    }
    assert!(defect.abs() > 0.1, "{defect}");
}

#[test]
fn worked_examples() {
    let m = SpectralMeasure::new(2, vec![Atom::new(4.0, vec![0.0, 0.0])]).unwrap();
    assert_eq!(eval_spectral(&m, &[3.0, -8.0]).unwrap(), 4.0);

    let q2 = quantum_spectrum(2, 1.0);
    assert_eq!(q2.atoms, vec![Atom::new(2.0, vec![0.0, 0.0]), Atom::new(2.0, vec![1.0, -1.0])]);
    let q1 = quantum_spectrum(1, 5.0);
    assert_eq!(eval_spectral(&q1, &[123.0]).unwrap(), 1.0);

    let orbit = symmetrize(&SpectralMeasure::new(3, vec![Atom::new(1.0, vec![0.5, -0.5, 0.0])]).unwrap()).unwrap();
    assert_eq!(orbit.atoms.len(), 6);
    assert!(orbit.atoms.iter().all(|a| (a.w - 1.0 / 6.0).abs() < 1e-15));

    let big = quantum_spectrum(MAX_SYMMETRIZE_N + 1, 1.0);
    assert!(matches!(symmetrize(&big), Err(Error::TooLarge { .. })));

    let bad = SpectralMeasure {
        n: 2,
        atoms: vec![Atom::new(1.0, vec![1.0, 0.5])],
    };
    assert!(matches!(eval_spectral(&bad, &[0.0, 0.0]), Err(Error::HyperplaneViolation { .. })));
    assert!(matches!(
        eval_spectral(&q2, &[0.0]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn json_round_trip() {
    let m = quantum_spectrum(3, 0.5);
    let text = serde_json::to_string(&m).unwrap();
    assert!(text.starts_with("{\"n\":3,\"atoms\":[{\"w\":"));
    let back: SpectralMeasure = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
}
