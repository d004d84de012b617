//! Monte Carlo runner.
//!
//! Trial `t` draws everything from its own stream (`seed`, stream `t`), so
//! its data do not depend on how trials are scheduled. Each trial generates
//! one instance and one standard-normal noise matrix and reuses them at
//! every noise level and for every detector. Results are integer counters
//! merged by addition, so totals are identical under any execution order.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{DetectorKind, ExperimentConfig};
use super::output::ExperimentRecord;
use crate::baseline::{baseline_threshold, detect_with_threshold};
use crate::bounds::{asymptotic_bound, ber_lower_bound};
use crate::channel::{ChannelInstance, ChannelParams};
use crate::detector::{detect_array, detect_with_known_sfs};
use crate::matrix::Cell;
use crate::Result;

/// How trials are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Data-parallel over trials; `threads = None` uses the global pool.
    #[cfg(feature = "parallel")]
    Parallel { threads: Option<usize> },
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel { threads: None }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

/// Integer tallies for one (noise level, detector) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub trials: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub sf_loc_trials: u64,
    pub sf_loc_errors: u64,
    pub sfrc_bits: u64,
    pub sfrc_errors: u64,
    /// Pairing decisions taken on a zero statistic.
    pub ties: u64,
}

impl Counters {
    fn add(&mut self, o: &Counters) {
        self.trials += o.trials;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.sf_loc_trials += o.sf_loc_trials;
        self.sf_loc_errors += o.sf_loc_errors;
        self.sfrc_bits += o.sfrc_bits;
        self.sfrc_errors += o.sfrc_errors;
        self.ties += o.ties;
    }
}

/// Per-trial bit-error sums and cross products across detectors at one
/// noise level, for standard errors and paired comparisons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorMoments {
    pub trials: u64,
    pub bits_per_trial: u64,
    pub sum: Vec<u128>,
    /// Row-major `d x d` sums of `e_a * e_b`.
    pub cross: Vec<u128>,
}

impl ErrorMoments {
    fn zero(d: usize, bits_per_trial: u64) -> Self {
        ErrorMoments {
            trials: 0,
            bits_per_trial,
            sum: vec![0; d],
            cross: vec![0; d * d],
        }
    }

    fn add(&mut self, o: &ErrorMoments) {
        self.trials += o.trials;
        for (a, b) in self.sum.iter_mut().zip(&o.sum) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&o.cross) {
            *a += b;
        }
    }

    fn d(&self) -> usize {
        self.sum.len()
    }

    /// Mean and standard error, in BER units, of `e_a - e_b` (or of `e_a`
    /// alone when `b` is `None`).
    pub fn mean_se(&self, a: usize, b: Option<usize>) -> (f64, f64) {
        let t = self.trials as f64;
        let d = self.d();
        let (s, ss) = match b {
            None => (self.sum[a] as f64, self.cross[a * d + a] as f64),
            Some(b) => {
                let s = self.sum[a] as f64 - self.sum[b] as f64;
                let ss = self.cross[a * d + a] as f64 + self.cross[b * d + b] as f64
                    - 2.0 * self.cross[a * d + b] as f64;
                (s, ss)
            }
        };
        let mean = s / t;
        let var = if self.trials > 1 {
            ((ss - s * mean) / (t - 1.0)).max(0.0)
        } else {
            0.0
        };
        let scale = self.bits_per_trial as f64;
        (mean / scale, (var / t).sqrt() / scale)
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub records: Vec<ExperimentRecord>,
    pub detectors: Vec<DetectorKind>,
    /// Indexed `[sigma][detector]`.
    pub counters: Vec<Vec<Counters>>,
    /// One per noise level.
    pub moments: Vec<ErrorMoments>,
    /// Baseline threshold per noise level.
    pub baseline_thresholds: Vec<f64>,
}

impl ExperimentResults {
    pub fn detector_index(&self, d: DetectorKind) -> Option<usize> {
        self.detectors.iter().position(|&k| k == d)
    }

    pub fn record(&self, sigma_idx: usize, d: DetectorKind) -> Option<&ExperimentRecord> {
        let di = self.detector_index(d)?;
        self.records.get(sigma_idx * self.detectors.len() + di)
    }
}

struct Plan {
    params: Vec<ChannelParams>,
    thresholds: Vec<f64>,
    detectors: Vec<DetectorKind>,
}

#[derive(Clone)]
struct Acc {
    counters: Vec<Counters>,
    moments: Vec<ErrorMoments>,
}

impl Acc {
    fn zero(plan: &Plan, bits: u64) -> Self {
        let d = plan.detectors.len();
        Acc {
            counters: vec![Counters::default(); plan.params.len() * d],
            moments: (0..plan.params.len()).map(|_| ErrorMoments::zero(d, bits)).collect(),
        }
    }

    fn merge(mut self, o: Acc) -> Self {
        for (a, b) in self.counters.iter_mut().zip(&o.counters) {
            a.add(b);
        }
        for (a, b) in self.moments.iter_mut().zip(&o.moments) {
            a.add(b);
        }
        self
    }
}

fn run_trial(cfg: &ExperimentConfig, plan: &Plan, t: u64) -> Result<Acc> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(t);
    let inst = ChannelInstance::generate(cfg.n, cfg.q, &cfg.dist, &mut rng)?;
    let n = cfg.n;
    let bits = (n * n) as u64;
    let covered: Vec<Cell> = (0..n)
        .flat_map(|r| (0..n).map(move |c| Cell::new(r, c)))
        .filter(|&c| inst.sfs.covers(c))
        .collect();

    let d = plan.detectors.len();
    let mut acc = Acc::zero(plan, bits);
    let mut errs = vec![0u64; d];
    for (si, params) in plan.params.iter().enumerate() {
        let y = inst.readout(params)?;
        for (di, &det) in plan.detectors.iter().enumerate() {
            let c = &mut acc.counters[si * d + di];
            let x_hat = match det {
                DetectorKind::Proposed => {
                    let res = detect_array(&y, params);
                    let h = &res.hypothesis;
                    let located = h.pattern.count() == inst.sfs.len() && inst.sfs.same_locations(&h.locations);
                    c.sf_loc_trials += 1;
                    c.sf_loc_errors += u64::from(!located);
                    c.ties += u64::from(h.tie);
                    res.x_hat
                }
                DetectorKind::Baseline => detect_with_threshold(&y, plan.thresholds[si]),
                DetectorKind::Oracle => detect_with_known_sfs(&y, &inst.data, &inst.sfs, params),
            };
            let e = x_hat.hamming(&inst.data) as u64;
            c.trials += 1;
            c.bits += bits;
            c.bit_errors += e;
            c.sfrc_bits += covered.len() as u64;
            c.sfrc_errors += covered
                .iter()
                .filter(|p| x_hat.get(p.row, p.col) != inst.data.get(p.row, p.col))
                .count() as u64;
            errs[di] = e;
        }
        let m = &mut acc.moments[si];
        m.trials += 1;
        for a in 0..d {
            m.sum[a] += errs[a] as u128;
            for b in 0..d {
                m.cross[a * d + b] += errs[a] as u128 * errs[b] as u128;
            }
        }
    }
    Ok(acc)
}

/// Runs every trial at every noise level for every configured detector.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentResults> {
    cfg.validate()?;
    let start = Instant::now();
    let params: Vec<ChannelParams> = cfg.sigmas.iter().map(|&s| cfg.channel(s)).collect::<Result<_>>()?;
    let thresholds = params
        .iter()
        .map(|p| baseline_threshold(p, &cfg.dist))
        .collect::<Result<Vec<_>>>()?;
    let plan = Plan {
        params,
        thresholds,
        detectors: cfg.detector_list(),
    };
    let bits = (cfg.n * cfg.n) as u64;

    let acc = super::fold_trials(
        cfg.trials,
        exec,
        || Acc::zero(&plan, bits),
        |t| run_trial(cfg, &plan, t),
        Acc::merge,
    )?;

    let elapsed_ms = if cfg.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let d = plan.detectors.len();
    let mut records = Vec::with_capacity(plan.params.len() * d);
    let mut counters = Vec::with_capacity(plan.params.len());
    for (si, p) in plan.params.iter().enumerate() {
        let bound_finite = ber_lower_bound(cfg.n, &cfg.dist, p)?;
        let bound_asymptotic = asymptotic_bound(&cfg.dist, p)?;
        let row: Vec<Counters> = acc.counters[si * d..(si + 1) * d].to_vec();
        for (di, c) in row.iter().enumerate() {
            records.push(ExperimentRecord::from_counters(
                cfg,
                p.sigma,
                plan.detectors[di],
                c,
                bound_finite,
                bound_asymptotic,
                elapsed_ms,
            ));
        }
        counters.push(row);
    }
    Ok(ExperimentResults {
        records,
        detectors: plan.detectors,
        counters,
        moments: acc.moments,
        baseline_thresholds: plan.thresholds,
    })
}
