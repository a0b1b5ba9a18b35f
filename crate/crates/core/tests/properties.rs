use std::sync::Arc;

use proptest::prelude::*;

use ghdlab::bits::{hamming_distance, BitString};
use ghdlab::bounds::{corruption_lower_bound, ghd_joker_certificate, CorruptionCertificate};
use ghdlab::cube::CubeSet;
use ghdlab::cubexform::{cube_inequality_margin, distance_histogram, xi_measure};
use ghdlab::error::Error;
use ghdlab::fraction::Fraction;
use ghdlab::gauss::{sign_map, sign_map_inverse};
use ghdlab::laws::distance_law;
use ghdlab::problem::GhdParams;
use ghdlab::protocols::{
    apply_reduction, hyperplane_gip_protocol, run_seeded, sampling_protocol, trivial_protocol, Protocol, Reduction,
};
use ghdlab::rng::stream_rng;
use ghdlab::streams::{kmv_f0, streaming_to_protocol, StreamingEstimator};

fn random_pair(n: usize, seed: u64) -> (BitString, BitString) {
    let mut rng = stream_rng(seed, 0);
    (BitString::random(n, &mut rng), BitString::random(n, &mut rng))
}

fn random_sets(n: usize, da: f64, db: f64, seed: u64) -> (CubeSet, CubeSet) {
    let mut rng = stream_rng(seed, 1);
    (CubeSet::random(n, da, &mut rng).unwrap(), CubeSet::random(n, db, &mut rng).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_law_is_normalized(n in 1usize..=10_000, p in -1.0f64..=1.0) {
        let law = distance_law(n, p).unwrap();
        prop_assert!((law.pmf.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hamming_symmetry_and_complement(n in 1usize..300, seed in any::<u64>()) {
        let (x, y) = random_pair(n, seed);
        let d = hamming_distance(&x, &y).unwrap();
        prop_assert_eq!(d, hamming_distance(&y, &x).unwrap());
        prop_assert_eq!(n - d, hamming_distance(&x.complement(), &y).unwrap());
    }

    #[test]
    fn histogram_mass_and_flip_symmetry(
        n in 1usize..=10, da in 0.0f64..1.0, db in 0.0f64..1.0, rho in -0.99f64..0.99, seed in any::<u64>()
    ) {
        let (a, b) = random_sets(n, da, db, seed);
        let h = distance_histogram(&a, &b).unwrap();
        prop_assert_eq!(h.total(), (a.len() * b.len()) as u64);
        let direct = xi_measure(&a, &b, rho).unwrap();
        let flipped = xi_measure(&a, &b.flip_all(), -rho).unwrap();
        prop_assert!((direct - flipped).abs() <= 1e-14 * direct.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn full_product_has_unit_mass(n in 1usize..=16, rho in -1.0f64..=1.0) {
        let full = CubeSet::full(n).unwrap();
        prop_assert!((xi_measure(&full, &full, rho).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn cosh_reformulation(n in 1usize..=10, da in 0.05f64..1.0, db in 0.05f64..1.0, rho in -0.95f64..0.95, seed in any::<u64>()) {
        let (a, b) = random_sets(n, da, db, seed);
        prop_assume!(!a.is_empty() && !b.is_empty());
        let r = cube_inequality_margin(&a, &b, rho, 0.0).unwrap();
        let cosh = r.cosh_form.unwrap();
        prop_assert!((cosh * r.xi0 - r.lhs).abs() <= 1e-9 * r.lhs);
        let direct = r.cosh_form_direct.unwrap();
        prop_assert!((direct - cosh).abs() <= 1e-9 * cosh);
    }

    #[test]
    fn certificate_invariants(
        a0 in 1i64..20, a1 in 1i64..20, ap in 0i64..20, e in 0i64..40, m in 0.0f64..200.0
    ) {
        let mut cert: CorruptionCertificate = ghd_joker_certificate(64, 1.0, m).unwrap();
        cert.alpha0 = Fraction::new(a0, 12);
        cert.alpha1 = Fraction::new(a1, 12);
        cert.alphaplus = Fraction::new(ap, 12);
        cert.eps = Fraction::new(e, 240);
        let (a0f, a1f, apf, ef) = (a0 as f64 / 12.0, a1 as f64 / 12.0, ap as f64 / 12.0, e as f64 / 240.0);
        let threshold = (a1f - apf) / (a0f + a1f);
        match corruption_lower_bound(&cert) {
            Ok(b) => {
                let sum = cert.alpha0 + cert.alpha1;
                let slack0 = cert.alpha1 - cert.alphaplus - sum * cert.eps;
                prop_assert_eq!(b.slack0, slack0);
                prop_assert!(b.eps_prime.is_positive());
                prop_assert_eq!(b.two_pow_beta, slack0 - sum * b.eps_prime);
                prop_assert!(b.two_pow_beta.is_positive());
                prop_assert!((b.bound - (m + b.two_pow_beta.to_f64().log2())).abs() <= 1e-12 * m.max(1.0));
                prop_assert!(ef < threshold);
            }
            Err(Error::Infeasible(_)) => prop_assert!(ef >= threshold - 1e-15),
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }

    #[test]
    fn sign_map_round_trips(u in -1.0f64..=1.0) {
        let rho = sign_map(u).unwrap();
        prop_assert!((sign_map(u + 1e-6).map_or(1.0, |r| r) >= rho) || u + 1e-6 > 1.0);
        prop_assert!((sign_map_inverse(rho).unwrap() - u).abs() <= 1e-12 || u.abs() > 0.999);
        let inner = u.clamp(-0.999, 0.999);
        prop_assert!((sign_map(sign_map_inverse(inner).unwrap()).unwrap() - inner).abs() <= 1e-12);
    }

    #[test]
    fn transcript_bits_equal_declared_cost(n in 2usize..80, k_frac in 0.01f64..1.0, seed in any::<u64>()) {
        let params = GhdParams::standard(n).unwrap();
        let k = ((k_frac * n as f64).ceil() as usize).clamp(1, n);
        let protocols: Vec<Arc<dyn Protocol>> = vec![
            Arc::new(trivial_protocol(params)),
            Arc::new(sampling_protocol(params, k).unwrap()),
            Arc::new(hyperplane_gip_protocol(n, k, 0.1).unwrap()),
            Arc::new(streaming_to_protocol(&kmv_f0(8).unwrap(), 1 + (seed % 3) as usize, params).unwrap().0),
        ];
        let (x, y) = random_pair(n, seed);
        for p in protocols {
            let (_, t) = run_seeded(p.as_ref(), &x, &y, seed).unwrap();
            prop_assert_eq!(t.total_bits, p.declared_cost(), "{}", p.name());
            prop_assert_eq!(t.total_bits, t.messages.iter().map(|m| m.bits).sum::<usize>());
        }
    }

    #[test]
    fn widening_the_gap_only_removes_inputs(
        n in 8usize..64, g in 0.0f64..4.0, extra in 0.0f64..6.0, k in 1usize..8, seed in any::<u64>()
    ) {
        let params = GhdParams::new(n, n as f64 / 2.0, g).unwrap();
        let inner: Arc<dyn Protocol> = Arc::new(sampling_protocol(params, k.min(n)).unwrap());
        let outer = apply_reduction(Reduction::WidenGap { g: g + extra }, inner.clone()).unwrap();
        let (mut err_inner, mut err_outer) = (0u32, 0u32);
        let mut rng = stream_rng(seed, 2);
        for s in 0..40 {
            let x = BitString::random(n, &mut rng);
            let mut y = x.clone();
            // Distances concentrated around the threshold.
            for i in 0..n {
                if rand::Rng::random_bool(&mut rng, 0.5) {
                    y.flip(i);
                }
            }
            let (out_i, _) = run_seeded(inner.as_ref(), &x, &y, s).unwrap();
            let (out_o, _) = run_seeded(&outer, &x, &y, s).unwrap();
            prop_assert_eq!(out_i, out_o);
            err_inner += u32::from(inner.problem().label(&x, &y).unwrap().is_error(out_i));
            err_outer += u32::from(outer.problem().label(&x, &y).unwrap().is_error(out_o));
        }
        prop_assert!(err_outer <= err_inner);
    }

    #[test]
    fn sketch_state_size_is_constant(k in 2usize..200, len in 0usize..2_000, seed in any::<u64>()) {
        let mut s = StreamingEstimator::new(k, seed).unwrap();
        let before = s.state_bits();
        let mut rng = stream_rng(seed, 3);
        for _ in 0..len {
            s.insert(rand::Rng::random_range(&mut rng, 0..500u64));
        }
        prop_assert_eq!(s.state_bits(), before);
        prop_assert_eq!(s.to_state().len(), before);
        let restored = s.from_state(&s.to_state()).unwrap();
        prop_assert_eq!(restored.estimate(), s.estimate());
    }
}
