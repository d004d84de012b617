//! Statistical behaviour of the detector stages on generated arrays.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sneakpath::channel::{ChannelInstance, ChannelParams, SfCountDistribution};
use sneakpath::detector::{detect_array_with, estimate_sp_types, CrossingCase, DetectorOptions};
use sneakpath::structure::classify_row_col_types;
use sneakpath::Cell;

fn instances(n: usize, dist: SfCountDistribution, count: u64, seed: u64) -> Vec<ChannelInstance> {
    (0..count)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            ChannelInstance::generate(n, 0.5, &dist, &mut rng).unwrap()
        })
        .collect()
}

#[test]
fn line_types_are_estimated_reliably_at_moderate_noise() {
    let p = ChannelParams::default().with_sigma(60.0);
    let dist = SfCountDistribution::new(0.0, 0.5, 0.5).unwrap();
    let (mut right, mut total) = (0usize, 0usize);
    for inst in instances(128, dist, 40, 7) {
        let truth = classify_row_col_types(&inst.data, &inst.sp, &inst.sfs);
        let est = estimate_sp_types(&inst.readout(&p).unwrap(), &p);
        for (a, b) in est.rows.iter().chain(&est.cols).zip(truth.rows.iter().chain(&truth.cols)) {
            right += usize::from(a == b);
            total += 1;
        }
    }
    let acc = right as f64 / total as f64;
    assert!(acc > 0.99, "accuracy {acc}");
}

#[test]
fn crossing_refinement_reduces_failure_line_errors() {
    let p = ChannelParams::default().with_sigma(150.0);
    let dist = SfCountDistribution::new(0.0, 0.0, 1.0).unwrap();
    let (mut with, mut without, mut used) = (0usize, 0usize, 0usize);
    for inst in instances(128, dist, 300, 9) {
        let y = inst.readout(&p).unwrap();
        let on = detect_array_with(&y, &p, DetectorOptions { refine: true });
        if on.hypothesis.case != Some(CrossingCase::AllComplete) {
            continue;
        }
        let off = detect_array_with(&y, &p, DetectorOptions { refine: false });
        let n = inst.data.n();
        let line_errors = |x: &sneakpath::channel::DataArray| {
            (0..n)
                .flat_map(|r| (0..n).map(move |c| Cell::new(r, c)))
                .filter(|&c| inst.sfs.covers(c) && x.get(c.row, c.col) != inst.data.get(c.row, c.col))
                .count()
        };
        with += line_errors(&on.x_hat);
        without += line_errors(&off.x_hat);
        used += 1;
    }
    assert!(used >= 30, "only {used} all-complete arrays");
    assert!(with < without, "refined {with} vs first-step {without} over {used} arrays");
}
