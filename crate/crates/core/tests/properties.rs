use proptest::prelude::*;

use sneakpath::bounds::{asymptotic_bound, ber_lower_bound, q_function, thresholds};
use sneakpath::channel::{ChannelParams, Readout, SfCountDistribution};
use sneakpath::detector::{detect_array, log_mixture_density, pair_llr, sp_type_step1, sp_type_step2, SfPatternKind};
use sneakpath::structure::SpType;
use sneakpath::SquareMatrix;

fn params(sigma: f64) -> ChannelParams {
    ChannelParams::default().with_sigma(sigma)
}

fn level(p: &ChannelParams, k: usize) -> f64 {
    [p.r1, p.r0_prime(), p.r0][k]
}

fn sigma_strategy() -> impl Strategy<Value = f64> {
    (-6.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Readings up to a thousand standard deviations from any level keep
    /// every log ratio finite.
    #[test]
    fn ratios_stay_finite(sigma in sigma_strategy(), k in 0usize..3, z in -1000.0f64..1000.0, k2 in 0usize..3, z2 in -1000.0f64..1000.0) {
        let p = params(sigma);
        let y = level(&p, k) + z * sigma;
        let y2 = level(&p, k2) + z2 * sigma;
        prop_assert!(sp_type_step1(&[y, y2], &p).is_finite());
        prop_assert!(sp_type_step2(&[y, y2], &[true, true], &p).is_finite());
        for (a, b, c) in [(0.5, 0.25, 0.25), (0.5, 0.5, 0.0), (0.5, 0.0, 0.5), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)] {
            let v = log_mixture_density(y, a, b, c, &p).unwrap();
            prop_assert!(v.is_finite(), "weights ({a},{b},{c}) at {y}");
        }
        for (t1, t2) in [(SpType::NonSp, SpType::Complete), (SpType::Complete, SpType::Complete)] {
            prop_assert!(pair_llr(y, y2, t1, t2, &p).is_finite());
        }
    }

    /// Swapping the two readings and their line types negates the pair ratio.
    #[test]
    fn pair_ratio_antisymmetric(sigma in 1.0f64..500.0, y in 0.0f64..1200.0, y2 in 0.0f64..1200.0, a in any::<bool>(), b in any::<bool>()) {
        let p = params(sigma);
        let t = |c: bool| if c { SpType::Complete } else { SpType::NonSp };
        let fwd = pair_llr(y, y2, t(a), t(b), &p);
        let back = pair_llr(y2, y, t(b), t(a), &p);
        prop_assert!((fwd + back).abs() <= 1e-9 * fwd.abs().max(1.0));
    }

    /// The full detector accepts any finite readout, small or large.
    #[test]
    fn detector_total_on_arbitrary_readouts(n in 2usize..9, sigma in sigma_strategy(), vals in prop::collection::vec((0usize..3, -50.0f64..50.0), 64)) {
        let p = params(sigma);
        let y = Readout::new(SquareMatrix::from_fn(n, |r, c| {
            let (k, z) = vals[(r * n + c) % vals.len()];
            level(&p, k) + z * sigma
        })).unwrap();
        let res = detect_array(&y, &p);
        prop_assert_eq!(res.x_hat.n(), n);
        prop_assert_eq!(res.hypothesis.locations.len(), res.hypothesis.pattern.count());
        for l in res.estimate.step1_rows.iter().chain(&res.estimate.step1_cols).chain(&res.estimate.step2_rows).chain(&res.estimate.step2_cols) {
            prop_assert!(l.is_finite());
        }
        if res.hypothesis.pattern == SfPatternKind::Double {
            let [a, b] = [res.hypothesis.locations[0], res.hypothesis.locations[1]];
            prop_assert!(!a.shares_line_with(&b));
        }
    }

    /// The equivalent parallel resistance grows with the failure resistance
    /// and stays between both levels.
    #[test]
    fn sneak_level_monotone(rs in 101.0f64..5000.0, d in 1.0f64..1000.0) {
        let lo = ChannelParams { rs, ..ChannelParams::default() };
        let hi = ChannelParams { rs: rs + d, ..ChannelParams::default() };
        prop_assert!(lo.r0_prime() < hi.r0_prime());
        prop_assert!(hi.r0_prime() < hi.r0 && lo.r0_prime() > lo.r1 * 0.5);
    }

    /// Without failures the bound is the plain tail at the non-SP threshold,
    /// and it grows with the failure probability.
    #[test]
    fn bound_specialisations(sigma in 10.0f64..500.0, q in 0.05f64..0.95, n in 3usize..512) {
        let p = ChannelParams { q, ..params(sigma) };
        let (gamma, _) = thresholds(&p);
        let none = SfCountDistribution::new(1.0, 0.0, 0.0).unwrap();
        let b0 = ber_lower_bound(n, &none, &p).unwrap();
        prop_assert!((b0 - q_function((gamma - p.r1) / sigma)).abs() < 1e-12);
        // for q <= 1/2 the sneak-path tail is the larger one, so failures
        // can only raise the limit
        if q <= 0.5 {
            let one = SfCountDistribution::new(0.0, 1.0, 0.0).unwrap();
            prop_assert!(asymptotic_bound(&one, &p).unwrap() >= asymptotic_bound(&none, &p).unwrap());
        }
    }
}
