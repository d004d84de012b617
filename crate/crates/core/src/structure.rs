//! Ground-truth combinatorics of sneak-path rows and columns: supports,
//! critical cells, line types and the closed-form probabilities that tie
//! support counts to line types.

use std::fmt;
use std::str::FromStr;

use crate::channel::{DataArray, SfPattern, SpIndicators};
use crate::matrix::Cell;
use crate::{Error, Result};

/// Sneak-path type of a row or column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpType {
    /// Contains no sneak-path cell.
    NonSp,
    /// Contains a sneak-path cell and some HRS critical cell.
    Incomplete,
    /// Contains a sneak-path cell and no HRS critical cell.
    Complete,
}

impl SpType {
    /// Numeric level `0`, `1/2` or `1`.
    pub fn level(self) -> f64 {
        match self {
            SpType::NonSp => 0.0,
            SpType::Incomplete => 0.5,
            SpType::Complete => 1.0,
        }
    }
}

impl fmt::Display for SpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpType::NonSp => "0",
            SpType::Incomplete => "1/2",
            SpType::Complete => "1",
        })
    }
}

/// Per-row and per-column sneak-path types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpTypeVector {
    pub rows: Vec<SpType>,
    pub cols: Vec<SpType>,
}

impl SpTypeVector {
    pub fn all_non_sp(n: usize) -> Self {
        SpTypeVector {
            rows: vec![SpType::NonSp; n],
            cols: vec![SpType::NonSp; n],
        }
    }

    pub fn any(&self, t: SpType) -> bool {
        self.rows.contains(&t) || self.cols.contains(&t)
    }
}

/// A logical-1 entry of a failure row or column, other than the failure
/// itself, together with the failure that owns it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    pub cell: Cell,
    /// Index of the owning failure in [`SfPattern::cells`].
    pub sf: usize,
}

/// All supports of a failure pattern with per-line counts.
///
/// A cell on a failure row that is also on the other failure's column is
/// listed once per owning failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMap {
    pub supports: Vec<Support>,
    pub row_counts: Vec<usize>,
    pub col_counts: Vec<usize>,
}

impl SupportMap {
    pub fn row_supported(&self, row: usize) -> bool {
        self.row_counts[row] > 0
    }

    pub fn col_supported(&self, col: usize) -> bool {
        self.col_counts[col] > 0
    }

    /// Failures owning a support in `row`.
    pub fn row_owners(&self, row: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .supports
            .iter()
            .filter(|s| s.cell.row == row)
            .map(|s| s.sf)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Failures owning a support in `col`.
    pub fn col_owners(&self, col: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .supports
            .iter()
            .filter(|s| s.cell.col == col)
            .map(|s| s.sf)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Collects the supports of every failure in `sf`.
pub fn sp_supports(x: &DataArray, sf: &SfPattern) -> SupportMap {
    let n = x.n();
    let mut supports = Vec::new();
    for (k, c) in sf.cells().iter().enumerate() {
        for col in (0..n).filter(|&col| col != c.col && x.get(c.row, col)) {
            supports.push(Support {
                cell: Cell::new(c.row, col),
                sf: k,
            });
        }
        for row in (0..n).filter(|&row| row != c.row && x.get(row, c.col)) {
            supports.push(Support {
                cell: Cell::new(row, c.col),
                sf: k,
            });
        }
    }
    let mut row_counts = vec![0; n];
    let mut col_counts = vec![0; n];
    for s in &supports {
        row_counts[s.cell.row] += 1;
        col_counts[s.cell.col] += 1;
    }
    SupportMap {
        supports,
        row_counts,
        col_counts,
    }
}

/// Ground-truth line types.
///
/// A line without sneak-path cells is non-SP. Otherwise it is incomplete
/// when one of its critical cells (crossings with supported orthogonal lines)
/// stores a 0 without being a sneak-path cell, and complete when none does.
pub fn classify_row_col_types(x: &DataArray, e: &SpIndicators, sf: &SfPattern) -> SpTypeVector {
    let n = x.n();
    let map = sp_supports(x, sf);
    let hrs = |r: usize, c: usize| !x.get(r, c) && !e.get(r, c);

    let rows = (0..n)
        .map(|r| {
            if !(0..n).any(|c| e.get(r, c)) {
                SpType::NonSp
            } else if map.row_supported(r) && (0..n).any(|c| map.col_supported(c) && hrs(r, c)) {
                SpType::Incomplete
            } else {
                SpType::Complete
            }
        })
        .collect();
    let cols = (0..n)
        .map(|c| {
            if !(0..n).any(|r| e.get(r, c)) {
                SpType::NonSp
            } else if map.col_supported(c) && (0..n).any(|r| map.row_supported(r) && hrs(r, c)) {
                SpType::Incomplete
            } else {
                SpType::Complete
            }
        })
        .collect();
    SpTypeVector { rows, cols }
}

/// Closed-form probabilities linking support counts, line types and the
/// crossings of two failure lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaForm {
    /// One failure: a supported non-failure line is complete,
    /// `1 - (1 - (1-q) q)^(N-1)`.
    SingleSupportedComplete,
    /// Two failures: a double-supported non-failure line is complete,
    /// `1 - (q + (1-q)^3)^(N-2)`.
    DoubleSupportedComplete,
    /// Two failures: a complete non-failure line is double-supported, at
    /// least `1 - 2 (1 - q (1-q)^2)^(N-2) / q^2`.
    CompleteIsDoubleSupported,
    /// Two failures: a single-supported line is incomplete, at least
    /// `1 - 2 (1 - q (1-q)^2)^(N-2)`.
    SingleSupportedIncomplete,
    /// Two failures at `(i, j)`, `(i', j')`: row `i` is complete given
    /// `x[i][j'] = 1`, `1 - (q + (1-q)^2)^(N-2)`.
    FailureLineComplete,
    /// Two failures: `x[i][j'] = 0` given row `i` and column `j'` are both
    /// non-SP, at least `1 - q (q + (1-q)^2)^(2N-4) / (1-q)`.
    CrossingZeroGivenNonSp,
}

impl LemmaForm {
    pub const ALL: [LemmaForm; 6] = [
        LemmaForm::SingleSupportedComplete,
        LemmaForm::DoubleSupportedComplete,
        LemmaForm::CompleteIsDoubleSupported,
        LemmaForm::SingleSupportedIncomplete,
        LemmaForm::FailureLineComplete,
        LemmaForm::CrossingZeroGivenNonSp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaForm::SingleSupportedComplete => "single-supported-complete",
            LemmaForm::DoubleSupportedComplete => "double-supported-complete",
            LemmaForm::CompleteIsDoubleSupported => "complete-is-double-supported",
            LemmaForm::SingleSupportedIncomplete => "single-supported-incomplete",
            LemmaForm::FailureLineComplete => "failure-line-complete",
            LemmaForm::CrossingZeroGivenNonSp => "crossing-zero-given-non-sp",
        }
    }

    /// Whether the closed form is only a lower bound on the probability.
    pub fn is_lower_bound(self) -> bool {
        matches!(
            self,
            LemmaForm::CompleteIsDoubleSupported
                | LemmaForm::SingleSupportedIncomplete
                | LemmaForm::CrossingZeroGivenNonSp
        )
    }
}

impl fmt::Display for LemmaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaForm::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

/// Evaluates a closed form at bit probability `q` and dimension `n`.
pub fn lemma_probability(lemma: LemmaForm, q: f64, n: usize) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::param(format!("need 0 < q < 1, got {q}")));
    }
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let p = 1.0 - q;
    let m = (n - 2) as i32;
    let v = match lemma {
        LemmaForm::SingleSupportedComplete => 1.0 - (1.0 - p * q).powi(n as i32 - 1),
        LemmaForm::DoubleSupportedComplete => 1.0 - (q + p.powi(3)).powi(m),
        LemmaForm::CompleteIsDoubleSupported => 1.0 - 2.0 * (1.0 - q * p * p).powi(m) / (q * q),
        LemmaForm::SingleSupportedIncomplete => 1.0 - 2.0 * (1.0 - q * p * p).powi(m),
        LemmaForm::FailureLineComplete => 1.0 - (q + p * p).powi(m),
        LemmaForm::CrossingZeroGivenNonSp => 1.0 - q * (q + p * p).powi(2 * m) / p,
    };
    Ok(v)
}

/// Outcome of checking the deterministic crossing rules on a two-failure
/// instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntersectionReport {
    /// Number of (crossing, rule) pairs examined.
    pub checks: usize,
    pub violations: Vec<String>,
}

impl IntersectionReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For failures `(i, j)` and `(i', j')`, checks both crossings `(i, j')`
/// and `(i', j)`: a 0 there forces its row and column to be non-SP, and a
/// complete row or column forces a 1.
pub fn verify_intersection_correspondence(
    x: &DataArray,
    sf: &SfPattern,
    types: &SpTypeVector,
) -> Result<IntersectionReport> {
    let [a, b] = sf.cells() else {
        return Err(Error::Precondition(format!(
            "crossing rules need two failures, got {}",
            sf.len()
        )));
    };
    let mut report = IntersectionReport::default();
    for cross in [Cell::new(a.row, b.col), Cell::new(b.row, a.col)] {
        let bit = x.get(cross.row, cross.col);
        let row_t = types.rows[cross.row];
        let col_t = types.cols[cross.col];
        report.checks += 2;
        if !bit && (row_t != SpType::NonSp || col_t != SpType::NonSp) {
            report.violations.push(format!(
                "crossing {cross} stores 0 but row type is {row_t} and column type is {col_t}"
            ));
        }
        if (row_t == SpType::Complete || col_t == SpType::Complete) && !bit {
            report
                .violations
                .push(format!("crossing {cross} stores 0 next to a complete line"));
        }
    }
    Ok(report)
}
