//! Localisation and line recovery when two failures are declared.
//!
//! Two candidate rows and two candidate columns are picked first. Entries
//! of the candidate rows under an incomplete column are known to hold one 1
//! and one 0, and a pairwise likelihood ratio decides which (likewise for
//! the candidate columns). The line types of the four candidates then fix
//! how rows pair with columns, and, when all four are complete, the
//! uncertain entries are refined with messages from the crossing cells.

use super::mixture::{log_sum_exp2, Kernels, LogWeights, Means};
use super::sp_type::{SfPatternKind, SpTypeEstimate};
use super::{hrs_for, DetectorOptions, RecoveredSf, SfHypothesis};
use crate::channel::{ChannelParams, Readout};
use crate::matrix::Cell;
use crate::structure::SpType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

/// Candidate failure rows and columns, each pair in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidates {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    /// Fewer than two lines were eligible on some axis, so all lines competed.
    pub widened: bool,
}

/// Which way the candidate rows pair with the candidate columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// Failures at `(i1, j1)` and `(i2, j2)`.
    Direct,
    /// Failures at `(i1, j2)` and `(i2, j1)`.
    Crossed,
}

/// Line-type pattern of the four candidate lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossingCase {
    /// All four lines non-SP: both crossings store 0.
    AllNonSp,
    /// One complete and one non-SP row, and likewise for columns: exactly
    /// one crossing stores 1.
    Mixed,
    /// All four lines complete: both crossings store 1.
    AllComplete,
    /// Any other pattern; resolved like [`CrossingCase::AllComplete`].
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub case: CrossingCase,
    pub pairing: Pairing,
    pub l_h: Option<f64>,
    pub tie: bool,
}

/// Bits of a pair of lines along one axis, in candidate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstStep {
    pub first: Vec<bool>,
    pub second: Vec<bool>,
}

impl FirstStep {
    /// `(0,0)` under non-SP, `(1,1)` under complete, and under incomplete
    /// `(0,1)` if the pair ratio is positive, `(1,0)` otherwise.
    pub fn from_llr(llr: &[f64], orthogonal: &[SpType]) -> Self {
        let (first, second) = llr
            .iter()
            .zip(orthogonal)
            .map(|(&l, &t)| match t {
                SpType::NonSp => (false, false),
                SpType::Complete => (true, true),
                SpType::Incomplete => (l <= 0.0, l > 0.0),
            })
            .unzip();
        FirstStep { first, second }
    }
}

/// Top two rows and columns by the likelihood of reading the estimated
/// orthogonal types as the sum of two failure lines.
///
/// Rows typed incomplete are excluded unless that leaves fewer than two.
/// Higher score wins; equal scores go to the lower index.
pub fn double_sf_candidates(y: &Readout, est: &SpTypeEstimate, params: &ChannelParams) -> Candidates {
    let n = y.n();
    let means = Means::new(params);
    let half_sneak = LogWeights::new(0.5, 0.0, 0.5);
    let half_plain = LogWeights::new(0.5, 0.5, 0.0);
    let cell_score = |v: f64, orth: SpType, own: SpType| -> f64 {
        let k = Kernels::at(v, &means);
        match orth {
            SpType::NonSp => k.0[1],
            SpType::Complete => k.0[0],
            SpType::Incomplete if own == SpType::Complete => half_sneak.log_density(&k),
            SpType::Incomplete => half_plain.log_density(&k),
        }
    };

    let row_scores: Vec<f64> = (0..n)
        .map(|m| {
            y.row(m)
                .iter()
                .zip(&est.cols)
                .map(|(&v, &t)| cell_score(v, t, est.rows[m]))
                .sum()
        })
        .collect();
    let mut col_scores = vec![0.0; n];
    for m in 0..n {
        for (c, acc) in col_scores.iter_mut().enumerate() {
            *acc += cell_score(y.get(m, c), est.rows[m], est.cols[c]);
        }
    }

    let (rows, wr) = max2(&row_scores, &est.rows);
    let (cols, wc) = max2(&col_scores, &est.cols);
    Candidates {
        rows,
        cols,
        widened: wr || wc,
    }
}

fn max2(scores: &[f64], types: &[SpType]) -> ((usize, usize), bool) {
    let eligible: Vec<usize> = (0..scores.len()).filter(|&k| types[k] != SpType::Incomplete).collect();
    let widened = eligible.len() < 2;
    let mut pool = if widened { (0..scores.len()).collect() } else { eligible };
    // stable sort keeps ascending index among equal scores
    pool.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (a, b) = (pool[0], pool[1]);
    ((a.min(b), a.max(b)), widened)
}

/// Log ratio of `(x1, x2) = (0, 1)` against `(1, 0)` for two readings on a
/// pair of failure lines with the given types.
pub fn pair_llr(y1: f64, y2: f64, t1: SpType, t2: SpType, params: &ChannelParams) -> f64 {
    let r1 = params.r1;
    let a = hrs_for(t1, params);
    let b = hrs_for(t2, params);
    (2.0 * y1 * (a - r1) - 2.0 * y2 * (b - r1) + b * b - a * a) / (2.0 * params.sigma * params.sigma)
}

/// [`pair_llr`] along a pair of candidate lines at every index whose
/// orthogonal line is incomplete; 0 at every other index.
pub fn intersection_llr(
    y: &Readout,
    axis: Axis,
    pair: (usize, usize),
    est: &SpTypeEstimate,
    params: &ChannelParams,
) -> Vec<f64> {
    let n = y.n();
    let (a, b) = pair;
    match axis {
        Axis::Rows => (0..n)
            .map(|c| match est.cols[c] {
                SpType::Incomplete => pair_llr(y.get(a, c), y.get(b, c), est.rows[a], est.rows[b], params),
                _ => 0.0,
            })
            .collect(),
        Axis::Cols => (0..n)
            .map(|m| match est.rows[m] {
                SpType::Incomplete => pair_llr(y.get(m, a), y.get(m, b), est.cols[a], est.cols[b], params),
                _ => 0.0,
            })
            .collect(),
    }
}

/// Decides the pairing from the candidate line types.
///
/// * all non-SP: compares the four crossing readings, `L_H = (y11 + y22 -
///   y12 - y21)(R1 - R0) / sigma^2`;
/// * mixed: each failure sits where a complete line meets a non-SP line;
/// * otherwise: counts, for each pairing, the cells outside the candidate
///   lines that read nearest to `R0` although the first-step bits of their
///   failure row and column would make them sneak-path cells, and `L_H` is
///   the crossed count minus the direct count.
///
/// Direct wins iff `L_H > 0`.
pub fn resolve_hypothesis(
    y: &Readout,
    cands: &Candidates,
    rows_fs: &FirstStep,
    cols_fs: &FirstStep,
    est: &SpTypeEstimate,
    params: &ChannelParams,
) -> Resolution {
    let (i1, i2) = cands.rows;
    let (j1, j2) = cands.cols;
    let types = [est.rows[i1], est.rows[i2], est.cols[j1], est.cols[j2]];
    let all = |t: SpType| types.iter().all(|&x| x == t);
    let is_pair = |a: SpType, b: SpType| {
        (a == SpType::Complete && b == SpType::NonSp) || (a == SpType::NonSp && b == SpType::Complete)
    };

    let case = if all(SpType::NonSp) {
        CrossingCase::AllNonSp
    } else if is_pair(types[0], types[1]) && is_pair(types[2], types[3]) {
        CrossingCase::Mixed
    } else if all(SpType::Complete) {
        CrossingCase::AllComplete
    } else {
        CrossingCase::Irregular
    };

    let decide = |l_h: f64| Resolution {
        case,
        pairing: if l_h > 0.0 { Pairing::Direct } else { Pairing::Crossed },
        l_h: Some(l_h),
        tie: l_h == 0.0,
    };

    match case {
        CrossingCase::AllNonSp => {
            let l_h = (y.get(i1, j1) + y.get(i2, j2) - y.get(i1, j2) - y.get(i2, j1)) * (params.r1 - params.r0)
                / (params.sigma * params.sigma);
            decide(l_h)
        }
        CrossingCase::Mixed => Resolution {
            case,
            pairing: if types[0] != types[2] {
                Pairing::Direct
            } else {
                Pairing::Crossed
            },
            l_h: None,
            tie: false,
        },
        CrossingCase::AllComplete | CrossingCase::Irregular => {
            decide(contradiction_difference(y, cands, rows_fs, cols_fs, params) as f64)
        }
    }
}

fn contradiction_difference(
    y: &Readout,
    cands: &Candidates,
    rows_fs: &FirstStep,
    cols_fs: &FirstStep,
    params: &ChannelParams,
) -> i64 {
    let n = y.n();
    let (i1, i2) = cands.rows;
    let (j1, j2) = cands.cols;
    let r0p = params.r0_prime();
    let nearest_hrs = |v: f64| {
        let d0 = (v - params.r0).abs();
        d0 < (v - params.r1).abs() && d0 <= (v - r0p).abs()
    };
    let a: Vec<i64> = (0..n)
        .map(|c| rows_fs.first[c] as i64 - rows_fs.second[c] as i64)
        .collect();
    let active_cols: Vec<usize> = (0..n).filter(|&c| c != j1 && c != j2 && a[c] != 0).collect();
    let mut total = 0;
    for m in (0..n).filter(|&m| m != i1 && m != i2) {
        let b = cols_fs.second[m] as i64 - cols_fs.first[m] as i64;
        if b == 0 {
            continue;
        }
        for &c in &active_cols {
            if nearest_hrs(y.get(m, c)) {
                total += a[c] * b;
            }
        }
    }
    total
}

/// Final bits of the candidate lines after refining every uncertain entry
/// with messages from the crossings of uncertain rows and columns.
///
/// For an uncertain column index `n`, the row-pair ratio gains
/// `sum_m ln[(e^{L(m)} rho(q,0,1-q) + rho(q,1-q,0)) / (e^{L(m)} rho(q,1-q,0) + rho(q,0,1-q))]`
/// over uncertain rows `m` off the failure rows, where `L(m)` is the
/// first-step column-pair ratio aligned with the pairing; columns are
/// refined symmetrically with the row-pair ratios. Certain entries follow
/// the estimated types. Results are in candidate order.
#[allow(clippy::too_many_arguments)]
pub fn refine_uncertain_entries(
    y: &Readout,
    cands: &Candidates,
    pairing: Pairing,
    row_llr: &[f64],
    col_llr: &[f64],
    est: &SpTypeEstimate,
    params: &ChannelParams,
) -> (FirstStep, FirstStep) {
    let n = y.n();
    let (i1, i2) = cands.rows;
    let (j1, j2) = cands.cols;
    let (jh, jh_p) = match pairing {
        Pairing::Direct => (j1, j2),
        Pairing::Crossed => (j2, j1),
    };
    // column-pair ratios re-expressed as (x[m][jh], x[m][jh']) = (0,1) against (1,0)
    let col_hat: Vec<f64> = match pairing {
        Pairing::Direct => col_llr.to_vec(),
        Pairing::Crossed => col_llr.iter().map(|v| -v).collect(),
    };

    let q = params.q;
    let means = Means::new(params);
    let sneak = LogWeights::new(q, 0.0, 1.0 - q);
    let plain = LogWeights::new(q, 1.0 - q, 0.0);
    let message = |prior: f64, v: f64| {
        let k = Kernels::at(v, &means);
        let (ls, lp) = (sneak.log_density(&k), plain.log_density(&k));
        log_sum_exp2(prior + ls, lp) - log_sum_exp2(prior + lp, ls)
    };

    let unc_rows: Vec<usize> = (0..n)
        .filter(|&m| m != i1 && m != i2 && est.rows[m] == SpType::Incomplete)
        .collect();
    let unc_cols: Vec<usize> = (0..n)
        .filter(|&c| c != jh && c != jh_p && est.cols[c] == SpType::Incomplete)
        .collect();

    let mut row_l2 = row_llr.to_vec();
    for c in (0..n).filter(|&c| est.cols[c] == SpType::Incomplete) {
        row_l2[c] += unc_rows.iter().map(|&m| message(col_hat[m], y.get(m, c))).sum::<f64>();
    }
    let mut col_l2 = col_hat;
    for m in (0..n).filter(|&m| est.rows[m] == SpType::Incomplete) {
        col_l2[m] += unc_cols.iter().map(|&c| message(row_llr[c], y.get(m, c))).sum::<f64>();
    }

    let rows = FirstStep::from_llr(&row_l2, &est.cols);
    let hat = FirstStep::from_llr(&col_l2, &est.rows);
    let cols = match pairing {
        Pairing::Direct => hat,
        Pairing::Crossed => FirstStep {
            first: hat.second,
            second: hat.first,
        },
    };
    (rows, cols)
}

pub(super) fn detect_double_sf(
    y: &Readout,
    est: &SpTypeEstimate,
    params: &ChannelParams,
    opts: DetectorOptions,
) -> (SfHypothesis, Vec<RecoveredSf>) {
    let cands = double_sf_candidates(y, est, params);
    let (i1, i2) = cands.rows;
    let (j1, j2) = cands.cols;
    let row_llr = intersection_llr(y, Axis::Rows, cands.rows, est, params);
    let col_llr = intersection_llr(y, Axis::Cols, cands.cols, est, params);
    let rows_fs = FirstStep::from_llr(&row_llr, &est.cols);
    let cols_fs = FirstStep::from_llr(&col_llr, &est.rows);
    let res = resolve_hypothesis(y, &cands, &rows_fs, &cols_fs, est, params);

    let (rows, cols) = if res.case == CrossingCase::AllComplete && opts.refine {
        refine_uncertain_entries(y, &cands, res.pairing, &row_llr, &col_llr, est, params)
    } else {
        (rows_fs, cols_fs)
    };

    let (ih, ih_p) = (i1, i2);
    let (jh, jh_p, mut col_h, mut col_h_p) = match res.pairing {
        Pairing::Direct => (j1, j2, cols.first, cols.second),
        Pairing::Crossed => (j2, j1, cols.second, cols.first),
    };
    let (mut row_h, mut row_h_p) = (rows.first, rows.second);

    // a crossing stores 1 iff its row or column is complete
    let complete = |t: SpType| t == SpType::Complete;
    let cross = complete(est.rows[ih]) || complete(est.cols[jh_p]);
    let cross_p = complete(est.rows[ih_p]) || complete(est.cols[jh]);
    row_h[jh] = true;
    row_h[jh_p] = cross;
    row_h_p[jh_p] = true;
    row_h_p[jh] = cross_p;
    col_h[ih] = true;
    col_h[ih_p] = cross_p;
    col_h_p[ih_p] = true;
    col_h_p[ih] = cross;

    let a = Cell::new(ih, jh);
    let b = Cell::new(ih_p, jh_p);
    let hyp = SfHypothesis {
        pattern: SfPatternKind::Double,
        locations: vec![a, b],
        candidate_rows: Some(cands.rows),
        candidate_cols: Some(cands.cols),
        case: Some(res.case),
        pairing: Some(res.pairing),
        l_h: res.l_h,
        tie: res.tie,
        widened: cands.widened,
    };
    let recovered = vec![
        RecoveredSf {
            cell: a,
            row_bits: row_h,
            col_bits: col_h,
        },
        RecoveredSf {
            cell: b,
            row_bits: row_h_p,
            col_bits: col_h_p,
        },
    ];
    (hyp, recovered)
}
