//! Seeded Monte Carlo experiments, configuration and CSV output.

pub mod config;
pub mod lemmas;
pub mod output;
pub mod run;

pub use config::{ConfigOverrides, DetectorKind, ExperimentConfig};
pub use lemmas::{
    lemma_curve, verify_lemmas, write_lemma_curve, write_lemma_report, CheckKind, LemmaCheck, LemmaConfig, REPORT_HEADER,
};
pub use output::{
    print_csv, read_results, write_bounds, write_csv, write_results, BoundsRecord, ExperimentRecord, BOUNDS_HEADER, RESULTS_HEADER,
};
pub use run::{run_experiment, Counters, ErrorMoments, Execution, ExperimentResults};

use crate::bounds::{asymptotic_bound, ber_lower_bound, thresholds, two_sided_error_rate};
use crate::channel::{ChannelParams, SfCountDistribution};
use crate::Result;

/// Maps trials `0..count` through `f` and merges the results. The merge must
/// be associative and commutative for the outcome to be schedule-free.
pub(crate) fn fold_trials<A, F, M>(count: u64, exec: Execution, zero: impl Fn() -> A + Sync, f: F, merge: M) -> Result<A>
where
    A: Send,
    F: Fn(u64) -> Result<A> + Sync,
    M: Fn(A, A) -> A + Sync,
{
    match exec {
        Execution::Sequential => (0..count).try_fold(zero(), |acc, t| Ok(merge(acc, f(t)?))),
        #[cfg(feature = "parallel")]
        Execution::Parallel { threads } => {
            use rayon::prelude::*;
            let job = || {
                (0..count)
                    .into_par_iter()
                    .map(&f)
                    .try_reduce(&zero, |a, b| Ok(merge(a, b)))
            };
            match threads {
                Some(k) => rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| crate::Error::Config(format!("cannot build a {k}-thread pool: {e}")))?
                    .install(job),
                None => job(),
            }
        }
    }
}

/// Analytical thresholds and bounds over a noise sweep.
pub fn bounds_table(
    n: usize,
    dist: &SfCountDistribution,
    base: &ChannelParams,
    sigmas: &[f64],
) -> Result<Vec<BoundsRecord>> {
    sigmas
        .iter()
        .map(|&s| {
            let p = ChannelParams::new(base.r0, base.r1, base.rs, s, base.q)?;
            let (gamma, gamma_prime) = thresholds(&p);
            Ok(BoundsRecord {
                sigma: s,
                n,
                q: p.q,
                p0: dist.p[0],
                p1: dist.p[1],
                p2: dist.p[2],
                gamma,
                gamma_prime,
                bound_finite: ber_lower_bound(n, dist, &p)?,
                bound_asymptotic: asymptotic_bound(dist, &p)?,
                two_sided_diagnostic: two_sided_error_rate(dist, &p)?,
            })
        })
        .collect()
}
