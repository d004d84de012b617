//! Crossbar channel model: stored data, active selector failures, sneak-path
//! indicators and the Gaussian readout.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::{Cell, SquareMatrix};
use crate::{Error, Result};

/// Physical and statistical constants of the crossbar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// High-resistance state (logical 0), in ohms.
    pub r0: f64,
    /// Low-resistance state (logical 1), in ohms.
    pub r1: f64,
    /// Parasitic resistance of a sneak path, in ohms.
    pub rs: f64,
    /// Standard deviation of the additive readout noise, in ohms.
    pub sigma: f64,
    /// Probability that a stored bit is 1.
    pub q: f64,
}

impl Default for ChannelParams {
    /// R0 = 1000, R1 = 100, Rs = 250, sigma = 30, q = 1/2.
    fn default() -> Self {
        ChannelParams {
            r0: 1000.0,
            r1: 100.0,
            rs: 250.0,
            sigma: 30.0,
            q: 0.5,
        }
    }
}

impl ChannelParams {
    pub fn new(r0: f64, r1: f64, rs: f64, sigma: f64, q: f64) -> Result<Self> {
        let p = ChannelParams {
            r0,
            r1,
            rs,
            sigma,
            q,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.r0, self.r1, self.rs, self.sigma, self.q]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::param("channel parameters must be finite"));
        }
        if !(self.r0 > self.r1 && self.r1 > 0.0) {
            return Err(Error::param(format!(
                "need r0 > r1 > 0, got r0={} r1={}",
                self.r0, self.r1
            )));
        }
        if self.rs <= 0.0 {
            return Err(Error::param(format!("need rs > 0, got {}", self.rs)));
        }
        if self.sigma <= 0.0 {
            return Err(Error::param(format!("need sigma > 0, got {}", self.sigma)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::param(format!("need 0 < q < 1, got {}", self.q)));
        }
        Ok(())
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        ChannelParams { sigma, ..self }
    }

    /// Sneak-path-degraded HRS resistance `(1/R0 + 1/Rs)^-1`.
    pub fn r0_prime(&self) -> f64 {
        1.0 / (1.0 / self.r0 + 1.0 / self.rs)
    }

    /// HRS resistance seen by a cell of the given sneak-path status.
    pub fn hrs(&self, sneak: bool) -> f64 {
        if sneak {
            self.r0_prime()
        } else {
            self.r0
        }
    }
}

/// Readout resistance of a cell storing `bit` with sneak-path indicator `sp`.
///
/// LRS cells are unaffected by sneak paths.
pub fn resistance(bit: bool, sp: bool, params: &ChannelParams) -> f64 {
    if bit {
        params.r1
    } else {
        params.hrs(sp)
    }
}

/// Stored binary data array `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataArray(SquareMatrix<bool>);

impl DataArray {
    pub fn new(bits: SquareMatrix<bool>) -> Result<Self> {
        if bits.n() < 2 {
            return Err(Error::InvalidDimension(bits.n()));
        }
        Ok(DataArray(bits))
    }

    /// Parses rows of `0`/`1` integers.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let bits: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&b| b != 0).collect())
            .collect();
        let m = SquareMatrix::from_rows(&bits).ok_or_else(|| Error::param("data rows are not square"))?;
        DataArray::new(m)
    }

    pub(crate) fn from_matrix(bits: SquareMatrix<bool>) -> Self {
        DataArray(bits)
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.0.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix<bool> {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix<bool> {
        self.0
    }

    pub fn set(&mut self, row: usize, col: usize, bit: bool) {
        self.0.set(row, col, bit);
    }

    pub fn count_ones(&self) -> usize {
        self.0.as_slice().iter().filter(|&&b| b).count()
    }

    /// Number of positions where the two arrays differ.
    pub fn hamming(&self, other: &DataArray) -> usize {
        self.0
            .as_slice()
            .iter()
            .zip(other.0.as_slice())
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Set of active selector failures: at most two, on logical-1 cells, and
/// never sharing a row or column.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SfPattern {
    sfs: Vec<Cell>,
}

impl SfPattern {
    pub fn empty() -> Self {
        SfPattern { sfs: Vec::new() }
    }

    /// Validates `sfs` against the data array.
    pub fn new(sfs: Vec<Cell>, data: &DataArray) -> Result<Self> {
        if sfs.len() > 2 {
            return Err(Error::param(format!(
                "at most two active selector failures are modelled, got {}",
                sfs.len()
            )));
        }
        for c in &sfs {
            if c.row >= data.n() || c.col >= data.n() {
                return Err(Error::param(format!("failure {c} lies outside the array")));
            }
            if !data.get(c.row, c.col) {
                return Err(Error::param(format!(
                    "failure {c} is not active: the cell stores a 0"
                )));
            }
        }
        if let [a, b] = sfs.as_slice() {
            if a.shares_line_with(b) {
                return Err(Error::param(format!(
                    "failures {a} and {b} share a row or column"
                )));
            }
        }
        Ok(SfPattern { sfs })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.sfs
    }

    pub fn len(&self) -> usize {
        self.sfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sfs.is_empty()
    }

    pub fn is_sf_row(&self, row: usize) -> bool {
        self.sfs.iter().any(|c| c.row == row)
    }

    pub fn is_sf_col(&self, col: usize) -> bool {
        self.sfs.iter().any(|c| c.col == col)
    }

    /// True when `cell` lies in any failure row or column.
    pub fn covers(&self, cell: Cell) -> bool {
        self.is_sf_row(cell.row) || self.is_sf_col(cell.col)
    }

    /// Same failure locations, order-insensitive.
    pub fn same_locations(&self, other: &[Cell]) -> bool {
        let mut a = self.sfs.clone();
        let mut b = other.to_vec();
        a.sort();
        b.sort();
        a == b
    }
}

/// Boolean sneak-path cell indicators `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpIndicators(SquareMatrix<bool>);

impl SpIndicators {
    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.0.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix<bool> {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.as_slice().iter().filter(|&&b| b).count()
    }
}

/// Real-valued readout signals `Y`, in ohms.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout(SquareMatrix<f64>);

impl Readout {
    pub fn new(y: SquareMatrix<f64>) -> Result<Self> {
        if y.n() < 2 {
            return Err(Error::InvalidDimension(y.n()));
        }
        if y.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::param("readout contains non-finite values"));
        }
        Ok(Readout(y))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.0
    }

    pub fn row(&self, row: usize) -> &[f64] {
        self.0.row(row)
    }

    pub fn col_vec(&self, col: usize) -> Vec<f64> {
        self.0.col_vec(col)
    }
}

/// Probabilities `(p0, p1, p2)` of an array carrying 0, 1 or 2 active failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfCountDistribution {
    pub p: [f64; 3],
}

impl SfCountDistribution {
    /// `(0.5, 0.4, 0.1)`
    pub const PA: SfCountDistribution = SfCountDistribution { p: [0.5, 0.4, 0.1] };
    /// `(1/3, 1/3, 1/3)`
    pub const PB: SfCountDistribution = SfCountDistribution {
        p: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    };

    pub fn new(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        let d = SfCountDistribution { p: [p0, p1, p2] };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::param(format!(
                "failure-count probabilities must be non-negative, got {:?}",
                self.p
            )));
        }
        let sum: f64 = self.p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!(
                "failure-count distribution sums to {sum}, not 1"
            )));
        }
        Ok(())
    }

    /// Draws a failure count.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        if u < self.p[0] {
            0
        } else if u < self.p[0] + self.p[1] {
            1
        } else {
            2
        }
    }

    /// Probability that a non-failure cell is sneak-path-potential:
    /// `1 - sum_k p_k (1 - q^2)^k`.
    pub fn sp_potential_probability(&self, q: f64) -> f64 {
        let miss = 1.0 - q * q;
        1.0 - (0..3).map(|k| self.p[k] * miss.powi(k as i32)).sum::<f64>()
    }
}

/// Samples an `n x n` array of independent Bernoulli(`q`) bits.
///
/// `q = 1` is accepted and yields the all-ones array; `q <= 0` is rejected.
pub fn sample_data<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<DataArray> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::param(format!("bit probability must lie in (0, 1], got {q}")));
    }
    let bits = SquareMatrix::from_fn(n, |_, _| rng.random_bool(q));
    DataArray::new(bits)
}

/// Whether `k` failures can be placed on the one-bits of `data`.
pub fn placement_feasible(data: &DataArray, k: usize) -> bool {
    let ones: Vec<Cell> = one_cells(data);
    match k {
        0 => true,
        1 => !ones.is_empty(),
        2 => {
            // two ones in distinct rows and columns exist unless every one
            // shares a single row or a single column
            let Some(first) = ones.first() else {
                return false;
            };
            let same_row = ones.iter().all(|c| c.row == first.row);
            let same_col = ones.iter().all(|c| c.col == first.col);
            ones.len() >= 2 && !same_row && !same_col
        }
        _ => false,
    }
}

fn one_cells(data: &DataArray) -> Vec<Cell> {
    let n = data.n();
    (0..n)
        .flat_map(|r| (0..n).map(move |c| Cell::new(r, c)))
        .filter(|c| data.get(c.row, c.col))
        .collect()
}

/// Places `k` active failures uniformly on one-bits, with distinct rows and
/// columns when `k = 2`.
pub fn place_active_sfs<R: Rng + ?Sized>(
    data: &DataArray,
    k: usize,
    rng: &mut R,
) -> Result<SfPattern> {
    if k > 2 {
        return Err(Error::param(format!("cannot place {k} failures")));
    }
    if !placement_feasible(data, k) {
        return Err(Error::Infeasible(format!(
            "{k} failure(s) cannot be placed on {} one-bit(s)",
            data.count_ones()
        )));
    }
    let ones = one_cells(data);
    let sfs = match k {
        0 => Vec::new(),
        1 => vec![ones[rng.random_range(0..ones.len())]],
        _ => {
            // rejection over ordered pairs gives the uniform unordered pair
            let mut pair = None;
            for _ in 0..10_000 {
                let a = ones[rng.random_range(0..ones.len())];
                let b = ones[rng.random_range(0..ones.len())];
                if !a.shares_line_with(&b) {
                    pair = Some(vec![a, b]);
                    break;
                }
            }
            match pair {
                Some(p) => p,
                None => {
                    let valid: Vec<(Cell, Cell)> = ones
                        .iter()
                        .enumerate()
                        .flat_map(|(ia, a)| ones[ia + 1..].iter().map(move |b| (*a, *b)))
                        .filter(|(a, b)| !a.shares_line_with(b))
                        .collect();
                    let (a, b) = valid[rng.random_range(0..valid.len())];
                    vec![a, b]
                }
            }
        }
    };
    SfPattern::new(sfs, data)
}

/// Draws a failure count from `dist` and places that many active failures.
///
/// Returns [`Error::Infeasible`] when `data` cannot host the drawn count;
/// callers that need a sample regardless resample the data (see
/// [`ChannelInstance::generate`]).
pub fn sample_sf_pattern<R: Rng + ?Sized>(
    data: &DataArray,
    dist: &SfCountDistribution,
    rng: &mut R,
) -> Result<SfPattern> {
    dist.validate()?;
    let k = dist.sample(rng);
    place_active_sfs(data, k, rng)
}

/// `e[m][n] = 1` iff `x[m][n] = 0` and some failure `(i, j)` has
/// `x[i][n] = x[m][j] = 1`.
pub fn compute_sp_indicators(data: &DataArray, sf: &SfPattern) -> SpIndicators {
    let n = data.n();
    let mut e = SquareMatrix::filled(n, false);
    for c in sf.cells() {
        let (i, j) = (c.row, c.col);
        for m in 0..n {
            if !data.get(m, j) {
                continue;
            }
            for col in 0..n {
                if data.get(i, col) && !data.get(m, col) {
                    e.set(m, col, true);
                }
            }
        }
    }
    SpIndicators(e)
}

/// Noiseless readout resistances `r`.
pub fn resistance_matrix(data: &DataArray, sp: &SpIndicators, params: &ChannelParams) -> SquareMatrix<f64> {
    SquareMatrix::from_fn(data.n(), |r, c| resistance(data.get(r, c), sp.get(r, c), params))
}

/// Standard-normal noise matrix, drawn in row-major order.
pub fn standard_noise<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SquareMatrix<f64> {
    SquareMatrix::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// `y = r + sigma * z` for a pre-drawn standard-normal matrix `z`.
pub fn readout_from_noise(
    data: &DataArray,
    sp: &SpIndicators,
    noise: &SquareMatrix<f64>,
    params: &ChannelParams,
) -> Result<Readout> {
    if sp.n() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            actual: sp.n(),
        });
    }
    if noise.n() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            actual: noise.n(),
        });
    }
    let y = SquareMatrix::from_fn(data.n(), |r, c| {
        resistance(data.get(r, c), sp.get(r, c), params) + params.sigma * noise.get(r, c)
    });
    Readout::new(y)
}

/// Noisy readout: each cell's resistance plus independent `N(0, sigma^2)` noise.
pub fn sample_readout<R: Rng + ?Sized>(
    data: &DataArray,
    sp: &SpIndicators,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Readout> {
    let z = standard_noise(data.n(), rng);
    readout_from_noise(data, sp, &z, params)
}

/// One generated crossbar: data, failures, sneak-path cells and the
/// standard-normal noise realisation shared by every noise level.
#[derive(Debug, Clone)]
pub struct ChannelInstance {
    pub data: DataArray,
    pub sfs: SfPattern,
    pub sp: SpIndicators,
    pub noise: SquareMatrix<f64>,
}

impl ChannelInstance {
    /// Draws the failure count first, then resamples data until that count
    /// can be placed.
    pub fn generate<R: Rng + ?Sized>(
        n: usize,
        q: f64,
        dist: &SfCountDistribution,
        rng: &mut R,
    ) -> Result<Self> {
        dist.validate()?;
        let k = dist.sample(rng);
        const MAX_ATTEMPTS: usize = 10_000;
        for _ in 0..MAX_ATTEMPTS {
            let data = sample_data(n, q, rng)?;
            match place_active_sfs(&data, k, rng) {
                Ok(sfs) => {
                    let sp = compute_sp_indicators(&data, &sfs);
                    let noise = standard_noise(n, rng);
                    return Ok(ChannelInstance {
                        data,
                        sfs,
                        sp,
                        noise,
                    });
                }
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Infeasible(format!(
            "no {n}x{n} array with q={q} could host {k} failures after {MAX_ATTEMPTS} draws"
        )))
    }

    pub fn readout(&self, params: &ChannelParams) -> Result<Readout> {
        readout_from_noise(&self.data, &self.sp, &self.noise, params)
    }
}
