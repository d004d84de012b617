//! Single-threshold detector that treats sneak-path interference as noise.

use crate::bounds::q_function;
use crate::channel::{ChannelParams, DataArray, Readout, SfCountDistribution};
use crate::matrix::SquareMatrix;
use crate::Result;

/// Expected per-cell error of reading 0 iff `y > t`, when a 1 reads `R1`, a
/// 0 on a sneak-path-potential cell (probability `p_sp`) reads `R0'` and any
/// other 0 reads `R0`.
pub fn single_threshold_error(t: f64, params: &ChannelParams, p_sp: f64) -> f64 {
    let q = params.q;
    let s = params.sigma;
    q * q_function((t - params.r1) / s)
        + (1.0 - q) * p_sp * q_function((params.r0_prime() - t) / s)
        + (1.0 - q) * (1.0 - p_sp) * q_function((params.r0 - t) / s)
}

/// Threshold in `[R1, R0]` minimising [`single_threshold_error`].
///
/// A uniform grid locates the basin and a golden-section search polishes it.
pub fn optimal_threshold(params: &ChannelParams, p_sp: f64) -> f64 {
    let f = |t: f64| single_threshold_error(t, params, p_sp);
    let (lo, hi) = (params.r1, params.r0);
    const GRID: usize = 4000;
    let step = (hi - lo) / GRID as f64;
    let mut best = 0;
    let mut best_v = f(lo);
    for k in 1..=GRID {
        let v = f(lo + k as f64 * step);
        if v < best_v {
            best = k;
            best_v = v;
        }
    }
    let mut a = lo + best.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best + 1) as f64 * step).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-10 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    if f(t) <= best_v {
        t
    } else {
        lo + best as f64 * step
    }
}

/// Threshold the baseline uses for a failure-count distribution.
pub fn baseline_threshold(params: &ChannelParams, dist: &SfCountDistribution) -> Result<f64> {
    dist.validate()?;
    Ok(optimal_threshold(params, dist.sp_potential_probability(params.q)))
}

/// Reads every cell as 0 iff `y > t*`.
pub fn detect_baseline(y: &Readout, params: &ChannelParams, dist: &SfCountDistribution) -> Result<DataArray> {
    let t = baseline_threshold(params, dist)?;
    Ok(detect_with_threshold(y, t))
}

pub fn detect_with_threshold(y: &Readout, t: f64) -> DataArray {
    DataArray::from_matrix(SquareMatrix::from_fn(y.n(), |r, c| y.get(r, c) <= t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_pdf(x: f64) -> f64 {
        (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn symmetric_two_level_case() {
        for sigma in [30.0, 150.0, 400.0] {
            let p = ChannelParams::default().with_sigma(sigma);
            assert!((optimal_threshold(&p, 0.0) - 550.0).abs() < 1e-6);
        }
        let p = ChannelParams::default();
        let d = SfCountDistribution::new(1.0, 0.0, 0.0).unwrap();
        assert!((baseline_threshold(&p, &d).unwrap() - 550.0).abs() < 1e-6);
    }

    #[test]
    fn threshold_is_stationary() {
        for sigma in [90.0, 150.0, 250.0, 350.0] {
            let p = ChannelParams::default().with_sigma(sigma);
            let psp = SfCountDistribution::PB.sp_potential_probability(0.5);
            let t = optimal_threshold(&p, psp);
            // derivative of the error in closed form
            let s = p.sigma;
            let d = -p.q * gaussian_pdf((t - p.r1) / s) / s
                + (1.0 - p.q) * psp * gaussian_pdf((p.r0_prime() - t) / s) / s
                + (1.0 - p.q) * (1.0 - psp) * gaussian_pdf((p.r0 - t) / s) / s;
            assert!(d.abs() < 1e-9, "sigma {sigma}: derivative {d}");
            // and it beats every point of an independent coarse grid
            let e = single_threshold_error(t, &p, psp);
            for k in 0..=900 {
                assert!(e <= single_threshold_error(100.0 + k as f64, &p, psp) + 1e-15);
            }
        }
    }

    #[test]
    fn noiseless_sneak_cells_read_as_one() {
        let y = Readout::new(SquareMatrix::from_fn(2, |r, c| [[100.0, 200.0], [1000.0, 1000.0]][r][c])).unwrap();
        let x = detect_with_threshold(&y, 550.0);
        assert!(x.get(0, 0) && x.get(0, 1));
        assert!(!x.get(1, 0) && !x.get(1, 1));
    }
}
