//! Three-component Gaussian mixture with means `R1`, `R0`, `R0'` and a shared
//! variance, evaluated in the log domain.

use crate::channel::ChannelParams;
use crate::{Error, Result};

/// Log Gaussian kernels `-(y - R)^2 / (2 sigma^2)` for `R = R1, R0, R0'`, in
/// that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels(pub [f64; 3]);

impl Kernels {
    #[inline]
    pub fn at(y: f64, means: &Means) -> Self {
        let k = |r: f64| {
            let d = y - r;
            -d * d * means.inv_two_var
        };
        Kernels([k(means.r1), k(means.r0), k(means.r0p)])
    }
}

/// Component means and the precomputed `1 / (2 sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Means {
    pub r1: f64,
    pub r0: f64,
    pub r0p: f64,
    pub inv_two_var: f64,
}

impl Means {
    pub fn new(params: &ChannelParams) -> Self {
        Means {
            r1: params.r1,
            r0: params.r0,
            r0p: params.r0_prime(),
            inv_two_var: 1.0 / (2.0 * params.sigma * params.sigma),
        }
    }
}

/// Mixture weights `(a, b, c)` on `(R1, R0, R0')` stored as logarithms; a zero
/// weight becomes negative infinity and drops out of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWeights(pub [f64; 3]);

impl LogWeights {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        LogWeights([a.ln(), b.ln(), c.ln()])
    }

    /// `ln rho_y(a, b, c)`.
    #[inline]
    pub fn log_density(&self, k: &Kernels) -> f64 {
        log_sum_exp3([self.0[0] + k.0[0], self.0[1] + k.0[1], self.0[2] + k.0[2]])
    }
}

/// `ln(e^a + e^b + e^c)` with the maximum factored out; `-inf` terms are
/// ignored.
#[inline]
pub fn log_sum_exp3(t: [f64; 3]) -> f64 {
    let m = t[0].max(t[1]).max(t[2]);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((t[0] - m).exp() + (t[1] - m).exp() + (t[2] - m).exp()).ln()
}

/// `ln(e^a + e^b)` with the maximum factored out.
#[inline]
pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn check_weights(a: f64, b: f64, c: f64) -> Result<()> {
    let ok = [a, b, c].iter().all(|w| w.is_finite() && *w >= 0.0) && (a + b + c - 1.0).abs() <= 1e-9;
    if ok {
        Ok(())
    } else {
        Err(Error::param(format!(
            "mixture weights must be non-negative and sum to 1, got ({a}, {b}, {c})"
        )))
    }
}

/// `rho_y(a, b, c) = a e^{-(y-R1)^2/2s^2} + b e^{-(y-R0)^2/2s^2} + c e^{-(y-R0')^2/2s^2}`.
///
/// Underflows to 0 far from every mean; use [`log_mixture_density`] there.
pub fn mixture_density(y: f64, a: f64, b: f64, c: f64, params: &ChannelParams) -> Result<f64> {
    Ok(log_mixture_density(y, a, b, c, params)?.exp())
}

/// `ln rho_y(a, b, c)`, finite for every finite `y`.
pub fn log_mixture_density(y: f64, a: f64, b: f64, c: f64, params: &ChannelParams) -> Result<f64> {
    check_weights(a, b, c)?;
    let means = Means::new(params);
    Ok(LogWeights::new(a, b, c).log_density(&Kernels::at(y, &means)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_components_peak_at_one() {
        let p = ChannelParams::default();
        assert!((mixture_density(100.0, 1.0, 0.0, 0.0, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((mixture_density(1000.0, 0.0, 1.0, 0.0, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((mixture_density(200.0, 0.0, 0.0, 1.0, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_value() {
        let p = ChannelParams::default();
        let v = log_mixture_density(550.0, 0.5, 0.5, 0.0, &p).unwrap();
        // 0.5 e^-112.5 + 0.5 e^-112.5 = e^-112.5
        assert!((v + 112.5).abs() < 1e-12);
        let d = mixture_density(550.0, 0.5, 0.5, 0.0, &p).unwrap();
        let want = 0.5 * (-112.5f64).exp() + 0.5 * (-112.5f64).exp();
        assert!(((d - want) / want).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights_rejected() {
        let p = ChannelParams::default();
        assert!(mixture_density(0.0, 0.5, 0.6, 0.0, &p).is_err());
        assert!(mixture_density(0.0, -0.1, 1.1, 0.0, &p).is_err());
        assert!(mixture_density(0.0, f64::NAN, 1.0, 0.0, &p).is_err());
    }

    #[test]
    fn log_domain_survives_far_tails() {
        let p = ChannelParams::default().with_sigma(1e-3);
        let v = log_mixture_density(1e6, 0.2, 0.3, 0.5, &p).unwrap();
        assert!(v.is_finite() && v < -1e15);
        assert_eq!(mixture_density(1e6, 0.2, 0.3, 0.5, &p).unwrap(), 0.0);
    }

    #[test]
    fn log_sum_exp_edge_cases() {
        assert_eq!(log_sum_exp2(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((log_sum_exp2(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp3([1e300, f64::NEG_INFINITY, 0.0]) - 1e300).abs() < 1e285);
    }
}
