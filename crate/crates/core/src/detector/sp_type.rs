//! Two-step likelihood-ratio estimate of every row and column type, and the
//! failure-pattern declaration that follows from it.

use super::mixture::{Kernels, LogWeights, Means};
use crate::channel::{ChannelParams, Readout};
use crate::matrix::SquareMatrix;
use crate::structure::SpType;

/// Estimated line types with the likelihood ratios behind them.
///
/// Second-step ratios are only evaluated for lines flagged by the first step
/// and are 0 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpTypeEstimate {
    pub rows: Vec<SpType>,
    pub cols: Vec<SpType>,
    pub step1_rows: Vec<f64>,
    pub step1_cols: Vec<f64>,
    pub step2_rows: Vec<f64>,
    pub step2_cols: Vec<f64>,
}

/// Number of failures the detector believes the array carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SfPatternKind {
    None,
    Single,
    Double,
}

impl SfPatternKind {
    pub fn count(self) -> usize {
        match self {
            SfPatternKind::None => 0,
            SfPatternKind::Single => 1,
            SfPatternKind::Double => 2,
        }
    }
}

/// Per-cell log-likelihood-ratio terms for both steps.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellTerms {
    means: Means,
    s1_num: LogWeights,
    s1_den: LogWeights,
    s2_num: LogWeights,
    s2_den: LogWeights,
}

impl CellTerms {
    pub(crate) fn new(params: &ChannelParams) -> Self {
        let q = params.q;
        let p = 1.0 - q;
        CellTerms {
            means: Means::new(params),
            s1_num: LogWeights::new(q, p * p, p * q),
            s1_den: LogWeights::new(q, p, 0.0),
            s2_num: LogWeights::new(q, 0.0, p),
            s2_den: LogWeights::new(q, p / 2.0, p / 2.0),
        }
    }

    /// `ln rho(q, (1-q)^2, (1-q)q) - ln rho(q, 1-q, 0)`.
    #[inline]
    pub(crate) fn step1(&self, y: f64) -> f64 {
        let k = Kernels::at(y, &self.means);
        self.s1_num.log_density(&k) - self.s1_den.log_density(&k)
    }

    /// `ln rho(q, 0, 1-q) - ln rho(q, (1-q)/2, (1-q)/2)`.
    #[inline]
    pub(crate) fn step2(&self, y: f64) -> f64 {
        let k = Kernels::at(y, &self.means);
        self.s2_num.log_density(&k) - self.s2_den.log_density(&k)
    }
}

/// First-step ratio of one line: incomplete against non-SP.
pub fn sp_type_step1(y_line: &[f64], params: &ChannelParams) -> f64 {
    let t = CellTerms::new(params);
    y_line.iter().map(|&y| t.step1(y)).sum()
}

/// Second-step ratio of one line: complete against incomplete, summed over
/// the cells whose orthogonal line was flagged by the first step.
pub fn sp_type_step2(y_line: &[f64], flagged_orthogonal: &[bool], params: &ChannelParams) -> f64 {
    let t = CellTerms::new(params);
    y_line
        .iter()
        .zip(flagged_orthogonal)
        .filter(|(_, &f)| f)
        .map(|(&y, _)| t.step2(y))
        .sum()
}

/// `0` if `l1 < 0`; otherwise `1/2` if `l2 < 0` and `1` if `l2 >= 0`.
pub fn decide_sp_type(l1: f64, l2: f64) -> SpType {
    if l1 < 0.0 {
        SpType::NonSp
    } else if l2 < 0.0 {
        SpType::Incomplete
    } else {
        SpType::Complete
    }
}

/// Applies [`decide_sp_type`] to every row and column.
pub fn decide_sp_types(
    step1_rows: Vec<f64>,
    step1_cols: Vec<f64>,
    step2_rows: Vec<f64>,
    step2_cols: Vec<f64>,
) -> SpTypeEstimate {
    let rows = step1_rows
        .iter()
        .zip(&step2_rows)
        .map(|(&a, &b)| decide_sp_type(a, b))
        .collect();
    let cols = step1_cols
        .iter()
        .zip(&step2_cols)
        .map(|(&a, &b)| decide_sp_type(a, b))
        .collect();
    SpTypeEstimate {
        rows,
        cols,
        step1_rows,
        step1_cols,
        step2_rows,
        step2_cols,
    }
}

/// Runs both steps on the whole readout, evaluating each per-cell term once.
pub fn estimate_sp_types(y: &Readout, params: &ChannelParams) -> SpTypeEstimate {
    let n = y.n();
    let terms = CellTerms::new(params);
    let t1 = SquareMatrix::from_fn(n, |r, c| terms.step1(y.get(r, c)));

    let step1_rows: Vec<f64> = (0..n).map(|r| t1.row(r).iter().sum()).collect();
    let mut step1_cols = vec![0.0; n];
    for r in 0..n {
        for (acc, v) in step1_cols.iter_mut().zip(t1.row(r)) {
            *acc += v;
        }
    }
    let row_flag: Vec<bool> = step1_rows.iter().map(|&l| l >= 0.0).collect();
    let col_flag: Vec<bool> = step1_cols.iter().map(|&l| l >= 0.0).collect();

    // second-step terms are needed only where a flagged row meets a flagged column
    let mut step2_rows = vec![0.0; n];
    let mut step2_cols = vec![0.0; n];
    for r in (0..n).filter(|&r| row_flag[r]) {
        for c in (0..n).filter(|&c| col_flag[c]) {
            let v = terms.step2(y.get(r, c));
            step2_rows[r] += v;
            step2_cols[c] += v;
        }
    }
    decide_sp_types(step1_rows, step1_cols, step2_rows, step2_cols)
}

/// Double if either axis carries an incomplete line, otherwise single if
/// either axis carries a complete line, otherwise none.
pub fn classify_sf_pattern(est: &SpTypeEstimate) -> SfPatternKind {
    let any = |t: SpType| est.rows.contains(&t) || est.cols.contains(&t);
    if any(SpType::Incomplete) {
        SfPatternKind::Double
    } else if any(SpType::Complete) {
        SfPatternKind::Single
    } else {
        SfPatternKind::None
    }
}
