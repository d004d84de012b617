//! Localisation and line recovery when one failure is declared.

use super::sp_type::{SfPatternKind, SpTypeEstimate};
use super::{RecoveredSf, SfHypothesis};
use crate::channel::{ChannelParams, Readout};
use crate::matrix::Cell;
use crate::structure::SpType;

/// Picks the failure row as the non-SP row closest in squared distance to
/// the resistances the column types predict (`R1` for complete, `R0`
/// otherwise), and the failure column symmetrically.
///
/// The recovered row copies the column types with the failure column forced
/// to 1, and the recovered column copies the row types with the failure row
/// forced to 1. When no row (column) is non-SP every row (column) is
/// searched. Ties go to the lower index.
pub fn detect_single_sf(y: &Readout, est: &SpTypeEstimate, params: &ChannelParams) -> (SfHypothesis, RecoveredSf) {
    let n = y.n();
    let level = |t: SpType| if t == SpType::Complete { params.r1 } else { params.r0 };
    let col_levels: Vec<f64> = est.cols.iter().map(|&t| level(t)).collect();
    let row_levels: Vec<f64> = est.rows.iter().map(|&t| level(t)).collect();

    let (i_hat, wide_r) = argmin_eligible(&est.rows, |m| {
        y.row(m)
            .iter()
            .zip(&col_levels)
            .map(|(v, r)| (v - r) * (v - r))
            .sum()
    });
    let (j_hat, wide_c) = argmin_eligible(&est.cols, |c| {
        (0..n)
            .map(|m| {
                let d = y.get(m, c) - row_levels[m];
                d * d
            })
            .sum()
    });

    let mut row_bits: Vec<bool> = est.cols.iter().map(|&t| t == SpType::Complete).collect();
    row_bits[j_hat] = true;
    let mut col_bits: Vec<bool> = est.rows.iter().map(|&t| t == SpType::Complete).collect();
    col_bits[i_hat] = true;

    let cell = Cell::new(i_hat, j_hat);
    let hyp = SfHypothesis {
        pattern: SfPatternKind::Single,
        locations: vec![cell],
        widened: wide_r || wide_c,
        ..SfHypothesis::none()
    };
    (
        hyp,
        RecoveredSf {
            cell,
            row_bits,
            col_bits,
        },
    )
}

/// Lowest-index minimiser of `score` over non-SP lines, or over all lines
/// when none is non-SP. The flag reports the widening.
fn argmin_eligible(types: &[SpType], score: impl Fn(usize) -> f64) -> (usize, bool) {
    let eligible: Vec<usize> = (0..types.len()).filter(|&k| types[k] == SpType::NonSp).collect();
    let widened = eligible.is_empty();
    let pool: Vec<usize> = if widened { (0..types.len()).collect() } else { eligible };
    let mut best = pool[0];
    let mut best_score = score(best);
    for &k in &pool[1..] {
        let s = score(k);
        if s < best_score {
            best = k;
            best_score = s;
        }
    }
    (best, widened)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;

    fn est(rows: Vec<SpType>, cols: Vec<SpType>) -> SpTypeEstimate {
        let n = rows.len();
        SpTypeEstimate {
            rows,
            cols,
            step1_rows: vec![0.0; n],
            step1_cols: vec![0.0; n],
            step2_rows: vec![0.0; n],
            step2_cols: vec![0.0; n],
        }
    }

    #[test]
    fn minimum_sits_on_the_matching_row() {
        use SpType::*;
        let p = ChannelParams::default();
        // row 2 reads exactly the resistances the column types predict
        let cols = vec![Complete, NonSp, Complete, NonSp];
        let rows = vec![NonSp, NonSp, NonSp, Complete];
        let y = SquareMatrix::from_fn(4, |r, c| match (r, c) {
            (2, _) => [100.0, 1000.0, 100.0, 1000.0][c],
            (3, 1) | (_, 3) => 100.0,
            _ => 1000.0,
        });
        let y = Readout::new(y).unwrap();
        let (h, rec) = detect_single_sf(&y, &est(rows, cols), &p);
        assert_eq!(h.locations[0].row, 2);
        assert_eq!(h.locations[0].col, 1);
        assert_eq!(rec.row_bits, vec![true, true, true, false]);
        assert_eq!(rec.col_bits, vec![false, false, true, true]);
        assert!(!h.widened);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let (k, w) = argmin_eligible(&[SpType::NonSp; 4], |_| 1.0);
        assert_eq!((k, w), (0, false));
        let (k, w) = argmin_eligible(&[SpType::Complete; 3], |k| (k as f64 - 1.0).abs());
        assert_eq!((k, w), (1, true));
    }
}
