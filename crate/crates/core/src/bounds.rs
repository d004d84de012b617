//! Decision thresholds and analytical BER bounds for detection with perfectly
//! known failure rows and columns.

use crate::channel::{ChannelParams, SfCountDistribution};
use crate::{Error, Result};

/// Upper tail of the standard normal distribution, `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// MAP thresholds `(gamma, gamma')` for cells that cannot and can carry a
/// sneak path.
///
/// `gamma = sigma^2 / (R0 - R1) * ln(q / (1 - q)) + (R0 + R1) / 2`, and
/// `gamma'` is the same with `R0` replaced by `R0'`.
pub fn thresholds(params: &ChannelParams) -> (f64, f64) {
    let prior = (params.q / (1.0 - params.q)).ln();
    let s2 = params.sigma * params.sigma;
    let r0p = params.r0_prime();
    let gamma = s2 / (params.r0 - params.r1) * prior + (params.r0 + params.r1) / 2.0;
    let gamma_p = s2 / (r0p - params.r1) * prior + (r0p + params.r1) / 2.0;
    (gamma, gamma_p)
}

/// Lower bound on the BER of any detector, for an `n x n` array.
///
/// `sum_k p_k (1 - (2kN - k^2) / N^2) [(1-q^2)^k Q((gamma-R1)/sigma)
///  + (1 - (1-q^2)^k) Q((gamma'-R1)/sigma)]`
pub fn ber_lower_bound(n: usize, dist: &SfCountDistribution, params: &ChannelParams) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    dist.validate()?;
    let (qa, qb) = tail_terms(params);
    let miss = 1.0 - params.q * params.q;
    let nn = n as f64;
    let v = (0..3)
        .map(|k| {
            let kf = k as f64;
            let frac = 1.0 - (2.0 * kf * nn - kf * kf) / (nn * nn);
            let clean = miss.powi(k);
            dist.p[k as usize] * frac * (clean * qa + (1.0 - clean) * qb)
        })
        .sum();
    Ok(v)
}

/// Limit of [`ber_lower_bound`] as `N` grows:
/// `(1 - P_sp) Q((gamma-R1)/sigma) + P_sp Q((gamma'-R1)/sigma)`.
pub fn asymptotic_bound(dist: &SfCountDistribution, params: &ChannelParams) -> Result<f64> {
    dist.validate()?;
    let (qa, qb) = tail_terms(params);
    let psp = dist.sp_potential_probability(params.q);
    Ok((1.0 - psp) * qa + psp * qb)
}

/// Per-cell error rate of the two-threshold rule counting both bit values
/// with their priors. Reported for comparison only; it is not the bound.
pub fn two_sided_error_rate(dist: &SfCountDistribution, params: &ChannelParams) -> Result<f64> {
    dist.validate()?;
    let (g, gp) = thresholds(params);
    let q = params.q;
    let s = params.sigma;
    let psp = dist.sp_potential_probability(q);
    let plain = q * q_function((g - params.r1) / s) + (1.0 - q) * q_function((params.r0 - g) / s);
    let sneak =
        q * q_function((gp - params.r1) / s) + (1.0 - q) * q_function((params.r0_prime() - gp) / s);
    Ok((1.0 - psp) * plain + psp * sneak)
}

fn tail_terms(params: &ChannelParams) -> (f64, f64) {
    let (g, gp) = thresholds(params);
    (
        q_function((g - params.r1) / params.sigma),
        q_function((gp - params.r1) / params.sigma),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson integration of the standard normal density over
    /// `[x, x + 40]`.
    fn q_by_quadrature(x: f64) -> f64 {
        let steps = 200_000;
        let h = 40.0 / steps as f64;
        let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(x) + f(x + 40.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(x + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn q_function_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-12);
        assert!((q_function(-10.0) - 1.0).abs() < 1e-12);
        assert!((q_function(1.6667) - 0.04779).abs() < 5e-6);
        for x in [0.3, 1.0, 5.0 / 3.0, 3.0, 6.0] {
            let r = q_by_quadrature(x);
            assert!(((q_function(x) - r) / r).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn symmetric_prior_thresholds() {
        for sigma in [1.0, 30.0, 400.0] {
            let (g, gp) = thresholds(&ChannelParams::default().with_sigma(sigma));
            assert!((g - 550.0).abs() < 1e-9);
            assert!((gp - 150.0).abs() < 1e-9);
        }
    }

    #[test]
    fn prior_on_ones_raises_thresholds() {
        let p = ChannelParams {
            q: 0.7,
            ..ChannelParams::default()
        };
        let (g, gp) = thresholds(&p);
        assert!(g > 550.0);
        assert!(gp > 150.0);
        let p = ChannelParams {
            q: 0.3,
            ..ChannelParams::default()
        };
        let (g, gp) = thresholds(&p);
        assert!(g < 550.0 && gp < 150.0);
    }

    #[test]
    fn threshold_ordering() {
        for sigma in [30.0, 150.0, 420.0] {
            let p = ChannelParams::default().with_sigma(sigma);
            let (g, gp) = thresholds(&p);
            assert!(p.r1 < gp && gp < p.r0_prime() && p.r0_prime() < g && g < p.r0);
        }
    }

    #[test]
    fn no_failures_reduces_to_plain_tail() {
        let p = ChannelParams::default().with_sigma(200.0);
        let d = SfCountDistribution::new(1.0, 0.0, 0.0).unwrap();
        let want = q_function((550.0 - 100.0) / 200.0);
        assert!((ber_lower_bound(128, &d, &p).unwrap() - want).abs() < 1e-15);
        assert!((asymptotic_bound(&d, &p).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn low_noise_bound_dominated_by_sneak_term() {
        let p = ChannelParams::default();
        let d = SfCountDistribution::PA;
        let a = asymptotic_bound(&d, &p).unwrap();
        let want = 0.85625 * q_function(15.0) + 0.14375 * q_function(5.0 / 3.0);
        assert!((a - want).abs() < 1e-15);
        assert!((a / (0.14375 * q_by_quadrature(5.0 / 3.0)) - 1.0).abs() < 1e-6);
        let b = ber_lower_bound(128, &d, &p).unwrap();
        assert!(b < a && b > 0.9 * a);
    }

    #[test]
    fn finite_bound_converges() {
        let p = ChannelParams::default().with_sigma(250.0);
        for d in [SfCountDistribution::PA, SfCountDistribution::PB] {
            // the failure-line fraction removed is 2k/N - k^2/N^2, so the
            // gap shrinks like 1/N
            let a = asymptotic_bound(&d, &p).unwrap();
            let scaled: Vec<f64> = [10_000usize, 1_000_000]
                .iter()
                .map(|&n| (a - ber_lower_bound(n, &d, &p).unwrap()) * n as f64)
                .collect();
            assert!(scaled[0] > 0.0);
            assert!((scaled[1] / scaled[0] - 1.0).abs() < 1e-3, "{scaled:?}");
        }
    }

    #[test]
    fn bounds_monotone_in_sigma() {
        let d = SfCountDistribution::PA;
        let mut last = (0.0, 0.0);
        for k in 1..=14 {
            let p = ChannelParams::default().with_sigma(30.0 * k as f64);
            let cur = (ber_lower_bound(128, &d, &p).unwrap(), asymptotic_bound(&d, &p).unwrap());
            assert!(cur.0 >= last.0 && cur.1 >= last.1);
            last = cur;
        }
    }

    #[test]
    fn symmetric_prior_two_sided_equals_asymptotic() {
        let p = ChannelParams::default().with_sigma(250.0);
        let d = SfCountDistribution::PB;
        let a = asymptotic_bound(&d, &p).unwrap();
        let t = two_sided_error_rate(&d, &p).unwrap();
        assert!((a - t).abs() < 1e-15);
    }
}
