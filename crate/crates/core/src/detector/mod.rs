//! Joint data and sneak-path detector.
//!
//! The pipeline estimates every row and column type, declares how many
//! failures the array carries, locates them and recovers their rows and
//! columns, and finally reads every other cell with one of two thresholds
//! depending on whether the recovered failure lines make it sneak-path
//! potential.

mod double;
pub mod mixture;
mod non_sf;
mod single;
mod sp_type;

pub use double::{
    double_sf_candidates, intersection_llr, pair_llr, refine_uncertain_entries, resolve_hypothesis,
    Axis, Candidates, CrossingCase, FirstStep, Pairing, Resolution,
};
pub use mixture::{log_mixture_density, mixture_density};
pub use non_sf::{detect_non_sf, detect_with_known_sfs};
pub use single::detect_single_sf;
pub use sp_type::{
    classify_sf_pattern, decide_sp_type, decide_sp_types, estimate_sp_types, sp_type_step1,
    sp_type_step2, SfPatternKind, SpTypeEstimate,
};

use crate::channel::{ChannelParams, DataArray, Readout};
use crate::matrix::Cell;

/// A located failure with its recovered row and column bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredSf {
    pub cell: Cell,
    /// Recovered bits of row `cell.row`, indexed by column.
    pub row_bits: Vec<bool>,
    /// Recovered bits of column `cell.col`, indexed by row.
    pub col_bits: Vec<bool>,
}

/// What the detector concluded about the failures.
#[derive(Debug, Clone, PartialEq)]
pub struct SfHypothesis {
    pub pattern: SfPatternKind,
    pub locations: Vec<Cell>,
    /// Candidate failure rows `(i1, i2)`, ascending, when two failures are declared.
    pub candidate_rows: Option<(usize, usize)>,
    /// Candidate failure columns `(j1, j2)`, ascending, when two failures are declared.
    pub candidate_cols: Option<(usize, usize)>,
    pub case: Option<CrossingCase>,
    pub pairing: Option<Pairing>,
    /// Pairing statistic when the case uses one.
    pub l_h: Option<f64>,
    /// The pairing statistic was exactly zero.
    pub tie: bool,
    /// A candidate search had to look beyond the lines its rule allows.
    pub widened: bool,
}

impl SfHypothesis {
    pub(crate) fn none() -> Self {
        SfHypothesis {
            pattern: SfPatternKind::None,
            locations: Vec::new(),
            candidate_rows: None,
            candidate_cols: None,
            case: None,
            pairing: None,
            l_h: None,
            tie: false,
            widened: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub x_hat: DataArray,
    pub hypothesis: SfHypothesis,
    pub estimate: SpTypeEstimate,
    pub recovered: Vec<RecoveredSf>,
}

/// Switches for pipeline variants used in comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorOptions {
    /// Refine uncertain failure-line entries with messages from crossing
    /// cells when all four failure lines are complete.
    pub refine: bool,
}

impl Default for DetectorOptions {
    fn default() -> Self {
        DetectorOptions { refine: true }
    }
}

/// Full detection of one readout array.
pub fn detect_array(y: &Readout, params: &ChannelParams) -> DetectionResult {
    detect_array_with(y, params, DetectorOptions::default())
}

pub fn detect_array_with(y: &Readout, params: &ChannelParams, opts: DetectorOptions) -> DetectionResult {
    let estimate = estimate_sp_types(y, params);
    let (hypothesis, recovered) = match classify_sf_pattern(&estimate) {
        SfPatternKind::None => (SfHypothesis::none(), Vec::new()),
        SfPatternKind::Single => {
            let (h, r) = detect_single_sf(y, &estimate, params);
            (h, vec![r])
        }
        SfPatternKind::Double => double::detect_double_sf(y, &estimate, params, opts),
    };
    let x_hat = detect_non_sf(y, &recovered, params);
    DetectionResult {
        x_hat,
        hypothesis,
        estimate,
        recovered,
    }
}

/// Resistance a line type predicts for a stored 0 on a failure line: `R0'`
/// for a complete line and `R0` otherwise.
pub(crate) fn hrs_for(t: crate::structure::SpType, params: &ChannelParams) -> f64 {
    params.hrs(t == crate::structure::SpType::Complete)
}
