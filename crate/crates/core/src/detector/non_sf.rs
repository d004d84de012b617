//! Two-threshold MAP reading of the cells outside the failure lines.

use super::RecoveredSf;
use crate::bounds::thresholds;
use crate::channel::{ChannelParams, DataArray, Readout, SfPattern};
use crate::matrix::SquareMatrix;

/// Completes the bit array from recovered failure lines.
///
/// Cells on a recovered failure row or column take the recovered bits. Any
/// other cell `(m, n)` is sneak-path potential when some failure `(i, j)` has
/// recovered `x[i][n] = x[m][j] = 1`; it reads 0 iff `y > gamma'` if so and
/// iff `y > gamma` otherwise.
pub fn detect_non_sf(y: &Readout, recovered: &[RecoveredSf], params: &ChannelParams) -> DataArray {
    let n = y.n();
    let (gamma, gamma_p) = thresholds(params);
    let bits = SquareMatrix::from_fn(n, |m, c| {
        for sf in recovered {
            if sf.cell.row == m {
                return sf.row_bits[c];
            }
            if sf.cell.col == c {
                return sf.col_bits[m];
            }
        }
        let potential = recovered.iter().any(|sf| sf.row_bits[c] && sf.col_bits[m]);
        let t = if potential { gamma_p } else { gamma };
        y.get(m, c) <= t
    });
    DataArray::from_matrix(bits)
}

/// Genie-aided reading: the true failure rows and columns are handed to the
/// two-threshold rule.
pub fn detect_with_known_sfs(y: &Readout, x: &DataArray, sf: &SfPattern, params: &ChannelParams) -> DataArray {
    let recovered: Vec<RecoveredSf> = sf
        .cells()
        .iter()
        .map(|c| RecoveredSf {
            cell: *c,
            row_bits: x.matrix().row(c.row).to_vec(),
            col_bits: x.matrix().col_vec(c.col),
        })
        .collect();
    detect_non_sf(y, &recovered, params)
}
