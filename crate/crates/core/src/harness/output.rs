//! CSV persistence of experiment and bound records.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{DetectorKind, ExperimentConfig};
use super::run::Counters;
use crate::{Error, Result};

pub const RESULTS_HEADER: &str = "sigma,N,q,p0,p1,p2,detector,trials,bits,bit_errors,ber,sf_loc_trials,sf_loc_errors,sf_loc_err_rate,sfrc_bits,sfrc_errors,sfrc_ber,bound_finite,bound_asymptotic,seed,elapsed_ms";

pub const BOUNDS_HEADER: &str = "sigma,N,q,p0,p1,p2,gamma,gamma_prime,bound_finite,bound_asymptotic,two_sided_diagnostic";

/// One output row: a (noise level, detector) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub sigma: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: f64,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub detector: String,
    pub trials: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub sf_loc_trials: u64,
    pub sf_loc_errors: u64,
    pub sf_loc_err_rate: f64,
    pub sfrc_bits: u64,
    pub sfrc_errors: u64,
    pub sfrc_ber: f64,
    pub bound_finite: f64,
    pub bound_asymptotic: f64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

fn rate(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ExperimentRecord {
    pub fn from_counters(
        cfg: &ExperimentConfig,
        sigma: f64,
        detector: DetectorKind,
        c: &Counters,
        bound_finite: f64,
        bound_asymptotic: f64,
        elapsed_ms: u64,
    ) -> Self {
        ExperimentRecord {
            sigma,
            n: cfg.n,
            q: cfg.q,
            p0: cfg.dist.p[0],
            p1: cfg.dist.p[1],
            p2: cfg.dist.p[2],
            detector: detector.label().to_string(),
            trials: c.trials,
            bits: c.bits,
            bit_errors: c.bit_errors,
            ber: rate(c.bit_errors, c.bits),
            sf_loc_trials: c.sf_loc_trials,
            sf_loc_errors: c.sf_loc_errors,
            sf_loc_err_rate: rate(c.sf_loc_errors, c.sf_loc_trials),
            sfrc_bits: c.sfrc_bits,
            sfrc_errors: c.sfrc_errors,
            sfrc_ber: rate(c.sfrc_errors, c.sfrc_bits),
            bound_finite,
            bound_asymptotic,
            seed: cfg.seed,
            elapsed_ms,
        }
    }
}

/// Analytical values at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub sigma: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: f64,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub bound_finite: f64,
    pub bound_asymptotic: f64,
    /// Two-threshold error with both bit values weighted by their priors;
    /// shown for comparison and not part of the bound.
    pub two_sided_diagnostic: f64,
}

/// Writes `header` followed by one line per record. An empty slice yields a
/// header-only file.
pub fn write_csv<T: Serialize>(records: &[T], header: &str, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_csv_to(records, header, BufWriter::new(file)).map_err(|e| match e {
        CsvWriteError::Io(source) => io_err(source),
        CsvWriteError::Csv(source) => Error::Csv {
            path: path.to_path_buf(),
            source,
        },
    })
}

/// Same as [`write_csv`] but to standard output.
pub fn print_csv<T: Serialize>(records: &[T], header: &str) -> Result<()> {
    let stdout = std::io::stdout();
    write_csv_to(records, header, stdout.lock()).map_err(|e| match e {
        CsvWriteError::Io(source) => Error::Io {
            path: "<stdout>".into(),
            source,
        },
        CsvWriteError::Csv(source) => Error::Csv {
            path: "<stdout>".into(),
            source,
        },
    })
}

enum CsvWriteError {
    Io(std::io::Error),
    Csv(csv::Error),
}

fn write_csv_to<T: Serialize, W: Write>(records: &[T], header: &str, mut out: W) -> std::result::Result<(), CsvWriteError> {
    writeln!(out, "{header}").map_err(CsvWriteError::Io)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in records {
        w.serialize(r).map_err(CsvWriteError::Csv)?;
    }
    w.flush().map_err(CsvWriteError::Io)
}

pub fn write_results(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    write_csv(records, RESULTS_HEADER, path)
}

pub fn write_bounds(records: &[BoundsRecord], path: &Path) -> Result<()> {
    write_csv(records, BOUNDS_HEADER, path)
}

pub fn read_results(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|rec| rec.map_err(csv_err)).collect()
}
