//! Shared oracles and instance builders for the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sneakpath::channel::{
    compute_sp_indicators, place_active_sfs, readout_from_noise, resistance_matrix, sample_data, ChannelParams,
    DataArray, Readout, SfPattern, SpIndicators,
};
use sneakpath::structure::{classify_row_col_types, sp_supports, verify_intersection_correspondence, SpType, SpTypeVector};
use sneakpath::{Cell, SquareMatrix};

/// Enumerates the defining conditions literally: `x[m][n] = 0`, some
/// `(i, j)` with `x[m][j] = x[i][j] = x[i][n] = 1`, and a failed selector at
/// `(i, j)`.
pub fn brute_force_sp(x: &DataArray, failed: &[Cell]) -> Vec<Vec<bool>> {
    let n = x.n();
    let mut e = vec![vec![false; n]; n];
    for (m, row) in e.iter_mut().enumerate() {
        for (col, out) in row.iter_mut().enumerate() {
            if x.get(m, col) {
                continue;
            }
            'search: for i in 0..n {
                for j in 0..n {
                    let path = x.get(m, j) && x.get(i, j) && x.get(i, col);
                    if path && failed.iter().any(|f| f.row == i && f.col == j) {
                        *out = true;
                        break 'search;
                    }
                }
            }
        }
    }
    e
}

/// Random data with `k` active failures, or `None` when they do not fit.
pub fn random_instance<R: Rng>(n: usize, q: f64, k: usize, rng: &mut R) -> Option<(DataArray, SfPattern)> {
    let x = sample_data(n, q, rng).unwrap();
    let sf = place_active_sfs(&x, k, rng).ok()?;
    Some((x, sf))
}

pub fn noiseless_params() -> ChannelParams {
    ChannelParams::default().with_sigma(1e-6)
}

pub fn noiseless_readout(x: &DataArray, sf: &SfPattern, params: &ChannelParams) -> Readout {
    let e = compute_sp_indicators(x, sf);
    readout_from_noise(x, &e, &SquareMatrix::filled(x.n(), 0.0), params).unwrap()
}

/// Failure configurations of the noiseless library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LibCase {
    NoFailure,
    Single,
    /// Two failures, both crossings store 0: all four failure lines non-SP.
    CrossingsZero,
    /// Only the crossing on the first failure's row stores 1.
    FirstCrossingOne,
    /// Only the crossing on the second failure's row stores 1.
    SecondCrossingOne,
    /// Both crossings store 1: all four failure lines complete.
    CrossingsOne,
}

impl LibCase {
    pub const ALL: [LibCase; 6] = [
        LibCase::NoFailure,
        LibCase::Single,
        LibCase::CrossingsZero,
        LibCase::FirstCrossingOne,
        LibCase::SecondCrossingOne,
        LibCase::CrossingsOne,
    ];

    fn crossings(self) -> Option<(bool, bool)> {
        match self {
            LibCase::CrossingsZero => Some((false, false)),
            LibCase::FirstCrossingOne => Some((true, false)),
            LibCase::SecondCrossingOne => Some((false, true)),
            LibCase::CrossingsOne => Some((true, true)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LibEntry {
    pub case: LibCase,
    pub x: DataArray,
    pub sf: SfPattern,
}

/// Types the noiseless two-step estimate produces: a line is flagged when
/// it holds a sneak-path cell or no zero at all, and a flagged line is
/// complete unless it has an `R0` cell where a flagged orthogonal line
/// crosses it.
pub fn visible_types(x: &DataArray, e: &SpIndicators) -> SpTypeVector {
    let n = x.n();
    let hrs = |r: usize, c: usize| !x.get(r, c) && !e.get(r, c);
    let row_flag: Vec<bool> = (0..n)
        .map(|r| (0..n).any(|c| e.get(r, c)) || (0..n).all(|c| x.get(r, c)))
        .collect();
    let col_flag: Vec<bool> = (0..n)
        .map(|c| (0..n).any(|r| e.get(r, c)) || (0..n).all(|r| x.get(r, c)))
        .collect();
    let kind = |flag: bool, bad: bool| match (flag, bad) {
        (false, _) => SpType::NonSp,
        (true, true) => SpType::Incomplete,
        (true, false) => SpType::Complete,
    };
    SpTypeVector {
        rows: (0..n)
            .map(|r| kind(row_flag[r], (0..n).any(|c| col_flag[c] && hrs(r, c))))
            .collect(),
        cols: (0..n)
            .map(|c| kind(col_flag[c], (0..n).any(|r| row_flag[r] && hrs(r, c))))
            .collect(),
    }
}

/// Non-failure lines follow the support-count table: no support means
/// non-SP; one support means complete under one failure and incomplete
/// under two; two supports mean complete.
pub fn support_table_holds(x: &DataArray, sf: &SfPattern, t: &SpTypeVector) -> bool {
    let map = sp_supports(x, sf);
    let k = sf.len();
    let expect = |count: usize| match (k, count) {
        (_, 0) => SpType::NonSp,
        (1, _) => SpType::Complete,
        (_, 1) => SpType::Incomplete,
        _ => SpType::Complete,
    };
    (0..x.n()).all(|m| {
        (sf.is_sf_row(m) || t.rows[m] == expect(map.row_counts[m]))
            && (sf.is_sf_col(m) || t.cols[m] == expect(map.col_counts[m]))
    })
}

/// Squared distance of a line from the nearest level two failure lines
/// would produce, given the orthogonal types and the line's own type. In
/// the noiseless limit the candidate score is this penalty scaled by
/// `-1 / (2 sigma^2)`.
fn penalty(vals: &[f64], orth: &[SpType], own: SpType, p: &ChannelParams) -> f64 {
    vals.iter()
        .zip(orth)
        .map(|(&v, &t)| {
            let allowed: &[f64] = match t {
                SpType::NonSp => &[p.r0],
                SpType::Complete => &[p.r1],
                SpType::Incomplete if own == SpType::Complete => &[p.r1, p.r0_prime()],
                SpType::Incomplete => &[p.r1, p.r0],
            };
            allowed.iter().map(|r| (v - r).powi(2)).fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// The true failure lines are the unique best candidates under a
/// noiseless score: least squared residual among non-SP lines for one
/// failure, the two least penalties among non-incomplete lines for two.
pub fn failure_lines_unique(x: &DataArray, sf: &SfPattern, t: &SpTypeVector, p: &ChannelParams) -> bool {
    let n = x.n();
    let e = compute_sp_indicators(x, sf);
    let r = resistance_matrix(x, &e, p);
    let rt = r.transpose();
    let lines = |m: &SquareMatrix<f64>, own: &[SpType], orth: &[SpType], truth: Vec<usize>| -> bool {
        match truth.len() {
            1 => {
                let level = |s: SpType| if s == SpType::Complete { p.r1 } else { p.r0 };
                let res = |k: usize| -> f64 { m.row(k).iter().zip(orth).map(|(&v, &s)| (v - level(s)).powi(2)).sum() };
                let best = res(truth[0]);
                (0..n).all(|k| k == truth[0] || own[k] != SpType::NonSp || res(k) > best)
            }
            _ => {
                if truth.iter().any(|&k| own[k] == SpType::Incomplete) {
                    return false;
                }
                let worst_true = truth.iter().map(|&k| penalty(m.row(k), orth, own[k], p)).fold(0.0, f64::max);
                (0..n)
                    .filter(|&k| own[k] != SpType::Incomplete && !truth.contains(&k))
                    .all(|k| penalty(m.row(k), orth, own[k], p) > worst_true)
            }
        }
    };
    let rows: Vec<usize> = sf.cells().iter().map(|c| c.row).collect();
    let cols: Vec<usize> = sf.cells().iter().map(|c| c.col).collect();
    lines(&r, &t.rows, &t.cols, rows) && lines(&rt, &t.cols, &t.rows, cols)
}

/// Contradiction count of a pairing: cells off the four failure lines that
/// store a plain 0 although the pairing makes them critical cells.
pub fn contradictions(x: &DataArray, e: &SpIndicators, pairs: [(usize, usize); 2], lines: ([usize; 2], [usize; 2])) -> usize {
    let n = x.n();
    let mut count = 0;
    for m in (0..n).filter(|m| !lines.0.contains(m)) {
        for c in (0..n).filter(|c| !lines.1.contains(c)) {
            if x.get(m, c) || e.get(m, c) {
                continue;
            }
            for (r, k) in pairs {
                count += usize::from(x.get(r, c) && x.get(m, k));
            }
        }
    }
    count
}

/// Every condition under which noiseless detection is exact.
pub fn identifiable(case: LibCase, x: &DataArray, sf: &SfPattern, p: &ChannelParams) -> bool {
    let n = x.n();
    let e = compute_sp_indicators(x, sf);
    let truth = classify_row_col_types(x, &e, sf);
    let all_ones = (0..n).any(|k| (0..n).all(|c| x.get(k, c)) || (0..n).all(|r| x.get(r, k)));
    if all_ones || visible_types(x, &e) != truth || !support_table_holds(x, sf, &truth) {
        return false;
    }
    match case {
        LibCase::NoFailure => true,
        LibCase::Single => truth.any(SpType::Complete) && failure_lines_unique(x, sf, &truth, p),
        _ => {
            let [a, b] = [sf.cells()[0], sf.cells()[1]];
            let fig = |bit: bool| if bit { SpType::Complete } else { SpType::NonSp };
            let (c1, c2) = (x.get(a.row, b.col), x.get(b.row, a.col));
            let pattern_ok = truth.rows[a.row] == fig(c1)
                && truth.cols[b.col] == fig(c1)
                && truth.rows[b.row] == fig(c2)
                && truth.cols[a.col] == fig(c2);
            let cross_ok = verify_intersection_correspondence(x, sf, &truth).unwrap().is_consistent();
            let lines = ([a.row, b.row], [a.col, b.col]);
            let pairing_ok = case != LibCase::CrossingsOne || {
                let right = contradictions(x, &e, [(a.row, a.col), (b.row, b.col)], lines);
                let wrong = contradictions(x, &e, [(a.row, b.col), (b.row, a.col)], lines);
                right == 0 && wrong > 0
            };
            pattern_ok
                && cross_ok
                && pairing_ok
                && truth.any(SpType::Incomplete)
                && failure_lines_unique(x, sf, &truth, p)
        }
    }
}

/// One attempt at an instance of `case`; the crossing bits are forced.
fn draw_case<R: Rng>(case: LibCase, n: usize, rng: &mut R) -> Option<(DataArray, SfPattern)> {
    let mut x = sample_data(n, 0.5, rng).unwrap();
    let cells = match case {
        LibCase::NoFailure => vec![],
        LibCase::Single => vec![Cell::new(rng.random_range(0..n), rng.random_range(0..n))],
        _ => {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            let (i2, j2) = (rng.random_range(0..n), rng.random_range(0..n));
            if i == i2 || j == j2 {
                return None;
            }
            let (c1, c2) = case.crossings().unwrap();
            x.set(i, j2, c1);
            x.set(i2, j, c2);
            vec![Cell::new(i, j), Cell::new(i2, j2)]
        }
    };
    for c in &cells {
        x.set(c.row, c.col, true);
    }
    let sf = SfPattern::new(cells, &x).ok()?;
    Some((x, sf))
}

/// `per_case` identifiable instances of every case at dimension `n`.
pub fn build_library(n: usize, per_case: usize, seed: u64) -> Vec<LibEntry> {
    let p = noiseless_params();
    let mut out = Vec::new();
    for (k, case) in LibCase::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64 * 1000 + n as u64);
        let mut found = 0;
        let mut attempts = 0;
        while found < per_case {
            attempts += 1;
            assert!(attempts < 200_000, "case {case:?} at N={n} is too rare");
            let Some((x, sf)) = draw_case(case, n, &mut rng) else { continue };
            if identifiable(case, &x, &sf, &p) {
                out.push(LibEntry { case, x, sf });
                found += 1;
            }
        }
    }
    out
}
