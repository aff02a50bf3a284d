use pqec::codes::{build_code, build_stabilizers, CodeParams};
use pqec::decoder::Decoder;
use pqec::metrology::*;
use pqec::noise::PauliChannel;
use pqec::{ratio, Error, Exact};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn small_codes() -> Vec<CodeParams> {
    vec![
        CodeParams::Ghz { n: 8 },
        CodeParams::ToricSquare { lx: 2, ly: 2 },
        CodeParams::ToricSquare { lx: 2, ly: 4 },
        CodeParams::ToricSquare { lx: 1, ly: 5 },
        CodeParams::honeycomb(2, 2),
        CodeParams::ToricHoneycomb { lx: 2, ly: 2, twist: 1 },
        CodeParams::BaconShor { m: 4, n: 3 },
    ]
}

#[test]
fn pair_oracle_matches_enumeration() {
    for params in small_codes() {
        let g = build_stabilizers(params).unwrap();
        for p in [0.0, 0.05, 0.1, 0.2, 0.3, 0.5] {
            let a = fqx_pair_oracle(&g, &p).unwrap();
            let b = fqx_enumeration_oracle(&g, &p).unwrap();
            assert!(rel(a, b) < 1e-12, "{params:?} p={p}: {a} vs {b}");
        }
    }
}

#[test]
fn oracles_agree_exactly_over_rationals() {
    for params in [CodeParams::ToricSquare { lx: 2, ly: 3 }, CodeParams::Ghz { n: 6 }] {
        let g = build_stabilizers(params).unwrap();
        for p in [ratio(1, 10), ratio(3, 7)] {
            assert_eq!(fqx_pair_oracle::<Exact>(&g, &p).unwrap(), fqx_enumeration_oracle(&g, &p).unwrap());
        }
    }
}

#[test]
fn closed_forms_match_pair_oracle_on_valid_geometry() {
    for params in [
        CodeParams::ToricSquare { lx: 3, ly: 3 },
        CodeParams::ToricSquare { lx: 4, ly: 5 },
        CodeParams::honeycomb(3, 3),
        CodeParams::honeycomb(4, 3),
        CodeParams::Ghz { n: 9 },
        CodeParams::BaconShor { m: 5, n: 4 },
    ] {
        let g = build_stabilizers(params).unwrap();
        for p in [0.0, 0.01, 0.1, 0.25, 0.4, 0.5] {
            let a = fqx_analytic(&params, p).unwrap();
            assert!(a.geometry_valid);
            let b = fqx_pair_oracle(&g, &p).unwrap();
            assert!(rel(a.value, b) < 1e-12, "{params:?} p={p}");
        }
    }
}

#[test]
fn stripe_closed_form_is_flagged_and_off() {
    let params = CodeParams::ToricSquare { lx: 2, ly: 4 };
    let a = fqx_analytic(&params, 0.1).unwrap();
    assert!(!a.geometry_valid);
    let g = build_stabilizers(params).unwrap();
    assert!(rel(a.value, fqx_pair_oracle(&g, &0.1).unwrap()) > 1e-6);
}

#[test]
fn closed_form_values() {
    let ghz = fqx_analytic(&CodeParams::Ghz { n: 10 }, 0.25).unwrap().value;
    assert!(rel(ghz, 130.0) < 1e-14);
    let sq = CodeParams::ToricSquare { lx: 4, ly: 4 };
    assert_eq!(fqx_analytic(&sq, 0.0).unwrap().value, 4.0 * 256.0);
    assert_eq!(fqx_analytic(&sq, 0.5).unwrap().value, 4.0 * 16.0);
    assert!(matches!(fqx_analytic(&sq, 1.5), Err(Error::OutOfRange(_))));
    let w2 = fqx_weight_two(10, 0.1f64).unwrap();
    let q2 = 0.64f64;
    assert!(rel(w2, 4.0 * q2 * q2 * 100.0 + 4.0 * (1.0 + 2.0 * q2 - 3.0 * q2 * q2) * 10.0) < 1e-14);
}

#[test]
fn closed_forms_are_nonincreasing() {
    for params in [
        CodeParams::Ghz { n: 12 },
        CodeParams::ToricSquare { lx: 5, ly: 5 },
        CodeParams::honeycomb(4, 4),
        CodeParams::BaconShor { m: 6, n: 4 },
    ] {
        let mut prev = f64::INFINITY;
        for i in 0..=500 {
            let v = fqx_analytic(&params, i as f64 * 1e-3).unwrap().value;
            assert!(v <= prev * (1.0 + 1e-12), "{params:?} at step {i}");
            prev = v;
        }
    }
}

#[test]
fn enumeration_refuses_large_codes() {
    let g = build_stabilizers(CodeParams::ToricSquare { lx: 2, ly: 5 }).unwrap();
    assert!(fqx_enumeration_oracle(&g, &0.1).is_ok());
    let big = build_stabilizers(CodeParams::ToricSquare { lx: 3, ly: 4 }).unwrap();
    assert!(matches!(fqx_enumeration_oracle(&big, &0.1), Err(Error::TooLarge { n: 24, limit: 20 })));
}

#[test]
fn float_widths_agree() {
    let g = build_stabilizers(CodeParams::ToricSquare { lx: 2, ly: 3 }).unwrap();
    let a = fqx_pair_oracle(&g, &0.1f32).unwrap() as f64;
    let b = fqx_pair_oracle(&g, &0.1f64).unwrap();
    assert!(rel(a, b) < 1e-5);
}

#[test]
fn noiseless_monte_carlo_is_exact() {
    let code = build_code(CodeParams::ToricSquare { lx: 2, ly: 4 }).unwrap();
    let dec = Decoder::new(&code).unwrap();
    let est: QfiEstimate<f64> =
        fqz_monte_carlo(&dec, &PauliChannel::dephasing(0.0).unwrap(), 500, 1, 3).unwrap();
    assert_eq!(est.value, 4.0 * 64.0);
    assert_eq!(est.contrast_d, 1.0);
    assert_eq!(est.stderr, 0.0);
    assert_eq!(est.n_kept + est.n_logical, est.n_samples);
}

#[test]
fn monte_carlo_is_deterministic_and_shard_sensitive() {
    let code = build_code(CodeParams::ToricSquare { lx: 3, ly: 4 }).unwrap();
    let dec = Decoder::new(&code).unwrap();
    let ch = PauliChannel::dephasing(0.08).unwrap();
    let a: QfiEstimate<f64> = fqz_monte_carlo(&dec, &ch, 4000, 11, 4).unwrap();
    let b: QfiEstimate<f64> = fqz_monte_carlo(&dec, &ch, 4000, 11, 4).unwrap();
    assert_eq!(a, b);
    let c: QfiEstimate<f64> = fqz_monte_carlo(&dec, &ch, 4000, 11, 5).unwrap();
    assert_eq!(c.n_samples, 4000);
    assert_ne!((a.n_plus, a.n_minus), (c.n_plus, c.n_minus));
}

#[test]
fn monte_carlo_tracks_exhaustive_contrast() {
    let code = build_code(CodeParams::ToricSquare { lx: 2, ly: 3 }).unwrap();
    let dec = Decoder::new(&code).unwrap();
    let tally = sign_tally(&dec).unwrap();
    for p in [0.03, 0.1] {
        let exact = tally.contrast(&p).unwrap();
        let est: QfiEstimate<f64> =
            fqz_monte_carlo(&dec, &PauliChannel::dephasing(p).unwrap(), 40_000, 5, 4).unwrap();
        let z = (est.contrast_d - exact) / est.contrast_stderr();
        assert!(z.abs() < 4.0, "p={p} z={z}");
        let (_, _, lg) = tally.probabilities(&p).unwrap();
        let sd = (lg * (1.0 - lg) / 40_000.0).sqrt();
        assert!((est.n_logical as f64 / 40_000.0 - lg).abs() < 4.0 * sd);
    }
}

#[test]
fn exhaustive_tally_is_a_distribution() {
    let code = build_code(CodeParams::ToricSquare { lx: 2, ly: 3 }).unwrap();
    let tally = sign_tally(&Decoder::new(&code).unwrap()).unwrap();
    let p = ratio(1, 20);
    let (a, b, c) = tally.probabilities::<Exact>(&p).unwrap();
    assert_eq!(a + b + c, ratio(1, 1));
    assert_eq!(tally.contrast::<Exact>(&ratio(0, 1)).unwrap(), ratio(1, 1));
}

#[test]
fn ghz_contrast_is_exact_power() {
    let code = build_code(CodeParams::Ghz { n: 6 }).unwrap();
    let tally = sign_tally(&Decoder::new(&code).unwrap()).unwrap();
    let p = ratio(1, 10);
    let q = ratio(4, 5);
    assert_eq!(tally.contrast::<Exact>(&p).unwrap(), pqec::scalar::powi(&q, 6));
}

#[test]
fn model_values() {
    assert_eq!(fqz_model(1.0, 2.0, 0.0, 8).unwrap(), 256.0);
    let v = fqz_model(1.0, 2.0, 0.1f64, 8).unwrap();
    assert!(rel(v, 4.0 * 0.98f64.powi(16) * 64.0) < 1e-14);
    let ghz = fqz_model(1.0, 1.0, 0.1f64, 6).unwrap();
    assert!(rel(ghz, 4.0 * 0.8f64.powi(12) * 36.0) < 1e-14);
    assert!(matches!(fqz_model(2.0, 1.0, 0.4f64, 6), Err(Error::OutOfRange(_))));
}

proptest! {
    #[test]
    fn fit_recovers_model_parameters(c in 0.3f64..3.0, delta in 1.0f64..3.5, n_z in 2usize..40) {
        let pts: Vec<ContrastPoint<f64>> = (1..=10)
            .map(|i| i as f64 * 0.01)
            .filter(|&p| c * p.powf(delta) < 0.5)
            .map(|p| ContrastPoint { p, n_z, contrast_d: model_contrast(c, delta, p, n_z) })
            .collect();
        prop_assume!(pts.len() >= 3);
        let fit = fit_delta(&pts, DEFAULT_FIT_WINDOW).unwrap();
        prop_assert!((fit.delta - delta).abs() < 1e-6);
        prop_assert!((fit.c - c).abs() / c < 1e-6);
        prop_assert!(fit.residual_norm < 1e-6);
    }

    #[test]
    fn derivative_matches_finite_difference(d in -1.0f64..1.0, n_z in 1usize..30) {
        let theta = 1e-3;
        let h = 1e-6;
        let fd = (expectation_tx(d, n_z, theta + h) - expectation_tx(d, n_z, theta - h)) / (2.0 * h);
        let an = expectation_tx_derivative(d, n_z, theta);
        prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-9));
    }

    #[test]
    fn pair_oracle_matches_enumeration_anywhere(p in 0.0f64..=0.5, which in 0usize..7) {
        let g = build_stabilizers(small_codes()[which]).unwrap();
        let a = fqx_pair_oracle(&g, &p).unwrap();
        let b = fqx_enumeration_oracle(&g, &p).unwrap();
        prop_assert!(rel(a, b) < 1e-12);
    }
}

#[test]
fn fit_delta_rejects_thin_data() {
    let pts = [
        ContrastPoint { p: 0.02, n_z: 4, contrast_d: 0.99 },
        ContrastPoint { p: 0.05, n_z: 4, contrast_d: 0.95 },
        ContrastPoint { p: 0.05, n_z: 8, contrast_d: 1.0 },
        ContrastPoint { p: 0.5, n_z: 8, contrast_d: 0.1 },
    ];
    assert!(matches!(fit_delta(&pts, DEFAULT_FIT_WINDOW), Err(Error::InsufficientData(_))));
}

#[test]
fn fit_window_is_recorded() {
    let pts: Vec<ContrastPoint<f64>> = [0.01, 0.02, 0.04]
        .iter()
        .map(|&p| ContrastPoint { p, n_z: 4, contrast_d: model_contrast(1.0, 2.0, p, 4) })
        .collect();
    let fit = fit_delta(&pts, (0.005, 0.05)).unwrap();
    assert_eq!(fit.fit_window, (0.005, 0.05));
    assert_eq!(fit.sizes_used, vec![4]);
}

#[test]
fn expectation_values() {
    assert_eq!(expectation_tx(1.0, 8, 0.0), 1.0);
    let theta = std::f64::consts::PI / 32.0;
    assert!(expectation_tx(0.7, 8, theta).abs() < 1e-15);
    assert!((expectation_tx(0.9, 8, 0.01) - 0.9 * (0.16f64).cos()).abs() < 1e-15);
}

#[test]
fn propagated_error_values() {
    // pure contrast saturates 4 n^2 near zero phase
    let v = propagated_error(1.0, 8, 1e-5).unwrap();
    assert!(rel(v, 256.0) < 1e-6);
    assert!(matches!(propagated_error(1.0, 8, 0.0), Err(Error::SingularPoint(_))));
    assert_eq!(propagated_error(0.0, 8, 0.3).unwrap(), 0.0);
    // at a zero of the cosine the mixture gives exactly 4 D^2 n^2
    let theta = std::f64::consts::PI / 32.0;
    assert!(rel(propagated_error(0.5, 8, theta).unwrap(), 4.0 * 0.25 * 64.0) < 1e-12);
    // below unit contrast the sensitivity vanishes as theta goes to zero
    assert!(propagated_error(0.5, 8, 1e-4).unwrap() < 1e-3);
    let pp = PhaseParams { theta, n_imprinters: 8 };
    assert_eq!(pp.propagated_error(0.5).unwrap(), propagated_error(0.5, 8, theta).unwrap());
}

#[test]
fn bit_flips_do_not_change_the_contrast() {
    let code = build_code(CodeParams::ToricSquare { lx: 2, ly: 4 }).unwrap();
    let dec = Decoder::new(&code).unwrap();
    let ch = PauliChannel::new(0.1, 0.0, 0.0).unwrap();
    let r: Theorem1Comparison<f64> = theorem1_compare(&dec, &ch, 2000, 3, 2).unwrap();
    assert_eq!(r.contrast_pauli, 1.0);
    assert_eq!(r.contrast_dephasing, 1.0);
    assert_eq!(r.z_score, 0.0);
}

#[test]
fn exhaustive_pauli_contrast_equals_dephasing() {
    for params in [CodeParams::Ghz { n: 5 }, CodeParams::ToricSquare { lx: 2, ly: 2 }] {
        let code = build_code(params).unwrap();
        let dec = Decoder::new(&code).unwrap();
        let ch = PauliChannel::new(ratio(1, 10), ratio(1, 25), ratio(3, 50)).unwrap();
        let (a, b) = theorem1_exhaustive::<Exact>(&dec, &ch).unwrap();
        assert_eq!(a, b, "{params:?}");
    }
}

#[test]
fn theorem1_rejects_x_imprinters() {
    let code = build_code(CodeParams::Ghz { n: 13 }).unwrap();
    let dec = Decoder::new(&code).unwrap();
    let ch = PauliChannel::new(0.1, 0.0, 0.0).unwrap();
    assert!(matches!(theorem1_exhaustive(&dec, &ch), Err(Error::TooLarge { n: 13, limit: 12 })));
}
