use fredent_core::bipartite::{gram_operators, gramian_paths, log_gramian, fen_pure, operator_schmidt, PureBipartiteState};
use fredent_core::channels::{apply_channel, mixed_unitary};
use fredent_core::claims::{random_separable, replay, run_claim, REGISTRY};
use fredent_core::entropy::{entropy_operator, fen, fen_of_values, Sign};
use fredent_core::fredholm::{
    det_direct, det_grothendieck, det_plemelj, det_spectral, wedge_trace, PLEMELJ_DEFAULT_ORDER,
};
use fredent_core::linalg::{
    c, frobenius_norm, hermitian_eig, identity, operator_norm, reconstruct, trace_norm, ComplexMatrix, DensityMatrix,
    TraceClassOperator,
};
use fredent_core::majorization::{
    additive_majorizes, construct_conversion_channel, fen_interpolation_second_derivative, gram_numbers,
    multiplicative_majorizes, OrderedSequence,
};
use fredent_core::random;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), d in 1usize..=16) {
        let mut rng = random::rng(seed, 0);
        let m = random::hermitian(&mut rng, d);
        let (s, u) = hermitian_eig(&m).unwrap();
        let err = frobenius_norm(&(reconstruct(s.values(), &u) - &m));
        prop_assert!(err <= 1e-9 * frobenius_norm(&m));
    }

    #[test]
    fn density_spectrum_is_a_distribution(seed in any::<u64>(), d in 1usize..=16) {
        let mut rng = random::rng(seed, 0);
        let rank = rng.random_range(1..=d);
        let q = random::density_with_rank(&mut rng, d, rank);
        prop_assert!((q.spectrum().sum() - 1.0).abs() <= 1e-10);
        prop_assert!(q.spectrum().iter().all(|x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn trace_norm_submultiplicative(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = random::rng(seed, 0);
        let a = random::psd(&mut rng, d, 2.0);
        let b = random::psd(&mut rng, d, 3.0);
        let lhs = trace_norm(&(a.matrix() * b.matrix())).unwrap();
        prop_assert!(lhs <= operator_norm(a.matrix()) * b.trace_norm() * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn determinant_routes_agree(seed in any::<u64>(), d in 1usize..=16) {
        let mut rng = random::rng(seed, 0);
        let q = random::density(&mut rng, d);
        let one = c(1.0, 0.0);
        let s = det_spectral(q.operator(), one).value;
        let g = det_grothendieck(q.operator(), one, d).value;
        let l = det_direct(q.matrix(), one).unwrap().value;
        prop_assert!((s - g).norm() <= 1e-9 * s.norm());
        prop_assert!((s - l).norm() <= 1e-9 * s.norm());
        if q.operator().spectral_radius() <= 0.9 {
            let p = det_plemelj(q.operator(), one, PLEMELJ_DEFAULT_ORDER).unwrap().value;
            prop_assert!((s - p).norm() <= 1e-8 * s.norm());
        }
        let v = s.re;
        prop_assert!((2.0 - 1e-10..=std::f64::consts::E + 1e-10).contains(&v));
    }

    #[test]
    fn entire_function_bound(seed in any::<u64>(), d in 1usize..=8, r in 0.0f64..=10.0, phase in 0.0f64..std::f64::consts::TAU) {
        let mut rng = random::rng(seed, 0);
        let a = random::psd(&mut rng, d, 1.5);
        let z = num_complex::Complex64::from_polar(r, phase);
        let det = det_spectral(&a, z).value;
        prop_assert!(det.norm().ln() <= z.norm() * a.trace_norm() + 1e-12);
    }

    #[test]
    fn determinant_is_lipschitz(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = random::rng(seed, 0);
        let a = random::psd(&mut rng, d, 1.0);
        let b = random::psd(&mut rng, d, 1.0);
        let one = c(1.0, 0.0);
        let diff = (det_spectral(&a, one).value - det_spectral(&b, one).value).norm();
        let bound = trace_norm(&(a.matrix() - b.matrix())).unwrap() * (a.trace_norm() + b.trace_norm()).exp();
        prop_assert!(diff <= bound + 1e-12);
    }

    #[test]
    fn wedge_traces_of_states_are_bounded(seed in any::<u64>(), d in 1usize..=10) {
        let mut rng = random::rng(seed, 0);
        let q = random::density(&mut rng, d);
        for n in 0..=d {
            prop_assert!(wedge_trace(q.operator(), n).unwrap() <= 1.0 / factorial(n) + 1e-12);
        }
    }

    #[test]
    fn fen_range_and_entropy_operator_norms(seed in any::<u64>(), d in 1usize..=12) {
        let mut rng = random::rng(seed, 0);
        let rank = rng.random_range(1..=d);
        let q = random::density_with_rank(&mut rng, d, rank);
        let f = fen(&q).plus;
        prop_assert!(f > 0.0 && f <= 2.0);
        let t1 = q.spectrum().max();
        let sp = entropy_operator(&q, Sign::Plus);
        prop_assert!((sp.operator_norm() - ((1.0 + t1).powf(1.0 + t1) - 1.0)).abs() <= 1e-10);
        prop_assert!(sp.trace_norm() <= 8.0 * q.spectrum().iter().map(f64::ln_1p).sum::<f64>() + 1e-12);
    }

    #[test]
    fn fen_is_schur_convex(seed in any::<u64>(), d in 2usize..=8, steps in 1usize..6) {
        // a is obtained from b by T-transforms, hence a ⪯ b; (1+x)ln(1+x) is
        // convex, so the more mixed spectrum has the smaller FEN
        let mut rng = random::rng(seed, 0);
        let b = random::probability_vector(&mut rng, d);
        let mut a = b.clone();
        for _ in 0..steps {
            let i = rng.random_range(0..d);
            let j = rng.random_range(0..d);
            let t: f64 = rng.random();
            let (x, y) = (a[i], a[j]);
            a[i] = (1.0 - t) * x + t * y;
            a[j] = t * x + (1.0 - t) * y;
        }
        let sa = OrderedSequence::new(a.clone()).unwrap();
        let sb = OrderedSequence::new(b.clone()).unwrap();
        prop_assert!(additive_majorizes(&sa, &sb).holds);
        prop_assert!(fen_of_values(a) <= fen_of_values(b) + 1e-12);
    }

    #[test]
    fn multiplicative_is_additive_on_logs(
        a in prop::collection::vec(0.0f64..5.0, 1..8),
        b in prop::collection::vec(0.0f64..5.0, 1..8),
    ) {
        let (sa, sb) = (OrderedSequence::new(a.clone()).unwrap(), OrderedSequence::new(b.clone()).unwrap());
        let la = OrderedSequence::new(a.iter().map(|x| x.ln_1p()).collect()).unwrap();
        let lb = OrderedSequence::new(b.iter().map(|x| x.ln_1p()).collect()).unwrap();
        let m = multiplicative_majorizes(&sa, &sb);
        let l = additive_majorizes(&la, &lb);
        prop_assert_eq!(m.holds, l.holds);
        prop_assert_eq!(m.first_violation, l.first_violation);
        prop_assert_eq!(m.margins, l.margins);
        if m.holds {
            prop_assert!(additive_majorizes(&sa, &sb).holds);
        }
    }

    #[test]
    fn gram_numbers_are_unitarily_invariant(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = random::rng(seed, 0);
        let q = random::density(&mut rng, d);
        let u = random::unitary(&mut rng, d);
        let moved = DensityMatrix::new(&u * q.matrix() * u.adjoint()).unwrap();
        for (x, y) in gram_numbers(&q).iter().zip(gram_numbers(&moved)) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn interpolation_is_convex(seed in any::<u64>(), d in 1usize..=8, t in 0.0f64..=1.0) {
        let mut rng = random::rng(seed, 0);
        let q1 = random::density(&mut rng, d);
        let q2 = random::density(&mut rng, d);
        prop_assert!(fen_interpolation_second_derivative(&q1, &q2, t).unwrap() >= 0.0);
        let u = random::unitary(&mut rng, d);
        let same = DensityMatrix::new(&u * q1.matrix() * u.adjoint()).unwrap();
        prop_assert!(fen_interpolation_second_derivative(&q1, &same, t).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn conversion_channels_are_bistochastic(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = random::rng(seed, 0);
        let b = random::probability_vector(&mut rng, d);
        let source = random::density_with_spectrum(&mut rng, &b);
        // a target spectrum majorized by b: mix b with the uniform vector
        let s: f64 = rng.random();
        let a: Vec<f64> = source.spectrum().iter().map(|x| s * x + (1.0 - s) / d as f64).collect();
        let plan = construct_conversion_channel(
            &OrderedSequence::new(a.clone()).unwrap(),
            &OrderedSequence::from_spectrum(source.spectrum()),
        ).unwrap();
        let total: f64 = plan.permutations.iter().map(|p| p.weight).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for p in &plan.permutations {
            prop_assert!(p.weight >= 0.0);
            let mut seen = p.perm.clone();
            seen.sort();
            prop_assert_eq!(seen, (0..d).collect::<Vec<_>>());
        }
        let phi = fredent_core::channels::conversion_channel(&plan, source.eigenbasis()).unwrap();
        prop_assert!(phi.is_bistochastic());
        let out = apply_channel(&phi, &source).unwrap();
        let mut target = a;
        target.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in out.spectrum().iter().zip(&target) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn mixed_unitary_channels_mix(seed in any::<u64>(), d in 1usize..=6, k in 1usize..=4) {
        let mut rng = random::rng(seed, 0);
        let w = random::probability_vector(&mut rng, k);
        let us: Vec<ComplexMatrix> = (0..k).map(|_| random::unitary(&mut rng, d)).collect();
        let phi = mixed_unitary(&w, &us).unwrap();
        let q = random::density(&mut rng, d);
        let out = apply_channel(&phi, &q).unwrap();
        prop_assert!((out.trace_norm() - 1.0).abs() <= 1e-10);
        let v = additive_majorizes(
            &OrderedSequence::from_spectrum(out.spectrum()),
            &OrderedSequence::from_spectrum(q.spectrum()),
        );
        prop_assert!(v.min_margin() >= -1e-10);
    }

    #[test]
    fn gramian_invariants(seed in any::<u64>(), da in 1usize..=8, db in 1usize..=12) {
        let mut rng = random::rng(seed, 0);
        let psi = PureBipartiteState::random(&mut rng, da, db);
        let g = gram_operators(&psi);
        let k = da.min(db);
        for n in 0..k {
            prop_assert!((g.delta_a.spectrum().values()[n] - g.delta_b.spectrum().values()[n]).abs() <= 1e-10);
        }
        let [p, a, b] = gramian_paths(&psi);
        prop_assert!((p - a).abs() <= 1e-10 && (p - b).abs() <= 1e-10);
        prop_assert!((2.0 - 1e-10..=std::f64::consts::E + 1e-10).contains(&p));
        prop_assert!((2f64.ln() - 1e-10..=1.0 + 1e-10).contains(&log_gramian(&psi)));
        let f = fen_pure(&psi);
        prop_assert!(f > 0.0 && f <= 2.0 + 1e-10);
    }

    #[test]
    fn operator_schmidt_reconstruction(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let mut rng = random::rng(seed, 0);
        let q = random::density(&mut rng, da * db);
        let os = operator_schmidt(&q, (da, db)).unwrap();
        prop_assert!(frobenius_norm(&(os.reconstruct() - q.matrix())) <= 1e-9);
    }

    #[test]
    fn separable_mixtures_pass_realignment(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = random::rng(seed, 0);
        let q = random_separable(&mut rng, da, db).unwrap();
        prop_assert!(operator_schmidt(&q, (da, db)).unwrap().sum() <= 1.0 + 1e-10);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn witnesses_replay_bit_exactly(seed in any::<u64>()) {
        for spec in REGISTRY {
            let report = run_claim(spec.id, 4, seed, 3).unwrap();
            prop_assert!(report.violations <= report.trials);
            prop_assert_eq!(report.witness.is_some(), report.violations > 0);
            let text = report.to_json();
            let back: fredent_core::ClaimReport = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(replay(&back).unwrap(), report.witness_margin());
        }
    }
}

#[test]
fn pure_state_determinant_is_two() {
    for d in [1, 2, 7, 16] {
        let mut psi = vec![c(0.0, 0.0); d];
        psi[0] = c(1.0, 0.0);
        let q = DensityMatrix::pure(&psi).unwrap();
        assert_eq!(det_spectral(q.operator(), c(1.0, 0.0)).value.re, 2.0);
    }
    let z = TraceClassOperator::new(identity(3).scale(0.0)).unwrap();
    assert_eq!(det_spectral(&z, c(1.0, 0.0)).value.re, 1.0);
}
