//! Property tests for the channel, wavepacket and protocol invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use fcqkd::channel::FiberChannel;
use fcqkd::protocol::{run_session, EveConfig, ProtocolConfig};
use fcqkd::wavepacket::{self, PulseParams, TimeGrid};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn survival_is_multiplicative(
        loss in 0.0f64..2.0,
        x1 in 0.0f64..1e5,
        x2 in 0.0f64..1e5,
    ) {
        let ch = FiberChannel::new(2e5, 5e-9, 1e-27, 0.0, loss).unwrap();
        let combined = ch.survival_probability(x1 + x2);
        let product = ch.survival_probability(x1) * ch.survival_probability(x2);
        prop_assert!((combined - product).abs() <= 1e-12 * product.max(1e-300));
    }

    #[test]
    fn broadening_is_monotone_in_distance(
        log_sigma in 8.0f64..12.5,
        beta in 1e-28f64..1e-26,
        x1 in 0.0f64..1e7,
        dx in 1.0f64..1e7,
    ) {
        let sigma = 10f64.powf(log_sigma);
        let b = Complex64::new(beta, 0.0);
        let w1 = wavepacket::broadening_factor(sigma, b, x1).unwrap();
        let w2 = wavepacket::broadening_factor(sigma, b, x1 + dx).unwrap();
        prop_assert!(w2 >= w1);
    }

    #[test]
    fn time_bandwidth_product_never_below_half(
        log_sigma in 8.0f64..12.5,
        beta_re in 0.0f64..1e-26,
        beta_im in 0.0f64..1e-28,
        x in 0.0f64..1e6,
    ) {
        let sigma = 10f64.powf(log_sigma);
        let p = PulseParams::new(1e15, sigma).unwrap();
        let b = Complex64::new(beta_re, beta_im);
        let product = wavepacket::spectral_width(&p)
            * wavepacket::temporal_width(&p, b, x).unwrap();
        prop_assert!(product >= 0.5 * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_is_conserved_for_random_lossless_pulses(
        log_sigma in 9.0f64..11.0,
        x in 0.0f64..1e5,
    ) {
        let sigma = 10f64.powf(log_sigma);
        let p = PulseParams::new(1e15, sigma).unwrap();
        let beta = Complex64::new(1e-27, 0.0);
        let grid = TimeGrid::auto(&p, beta, 5e-9, x, 10.0, 32.0).unwrap();
        let f = wavepacket::propagate_pulse(&p, beta, 5e-9, x, &grid).unwrap();
        let norm2 = f.l2_norm().powi(2);
        prop_assert!((norm2 - 1.0).abs() < 1e-9, "norm^2 = {norm2}");
    }

    #[test]
    fn sessions_yield_paired_keys_and_reproduce(
        seed in 0u64..1_000_000,
        eve in any::<bool>(),
        intercept in 0.1f64..1.0,
    ) {
        let cfg = ProtocolConfig {
            eve: EveConfig {
                enabled: eve,
                position: 0.0,
                intercept_probability: intercept,
            },
            channel: FiberChannel {
                loss_db_per_km: 0.0,
                ..ProtocolConfig::default().channel
            },
            ..ProtocolConfig::default()
        };
        let a = run_session(&cfg, 300, seed).unwrap();
        let b = run_session(&cfg, 300, seed).unwrap();
        prop_assert_eq!(a.sifted_key_a.len(), a.sifted_key_b.len());
        prop_assert_eq!(&a, &b);
    }
}
