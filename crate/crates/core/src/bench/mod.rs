//! Benchmark harness: random low-rank dual matrices, the two experiments,
//! PGM ingestion and CSV/JSON reporting.

mod experiments;
mod generate;
pub mod pgm;
mod report;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use experiments::{aggregate_means, run_exp1, run_exp1_trials, run_exp2, run_exp2_on, Exp1Config, Exp2Config};
pub use generate::{gen_independent_dual, gen_lowrank_dual};
pub use pgm::{read_pgm, write_pgm};
pub use report::{emit_report, gnuplot_script, read_csv, read_json, write_csv, write_json, Format, Metadata, CSV_HEADER};

/// Entry field of generated matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "real" => Ok(Self::Real),
            "complex" => Ok(Self::Complex),
            _ => Err(format!("unknown field {s:?} (expected real|complex)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "CCDSVD")]
    Ccdsvd,
    /// Randomized with a complex test matrix.
    #[serde(rename = "RCCDSVD")]
    Rccdsvd,
    /// Randomized with a dual test matrix.
    #[serde(rename = "RCCDSVD2")]
    Rccdsvd2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ccdsvd => "CCDSVD",
            Self::Rccdsvd => "RCCDSVD",
            Self::Rccdsvd2 => "RCCDSVD2",
        })
    }
}

/// One line of an experiment report. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    pub size: usize,
    pub r: usize,
    pub p: usize,
    pub q: usize,
    pub re1: f64,
    pub re2: f64,
    pub time_s: f64,
    pub seed: u64,
}

/// SplitMix64 step: decorrelated child seeds from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic natural-looking grayscale test image in `[0, 1]`, quantized
/// to 8 bits: a gradient, Gaussian blobs, an oriented texture and pixel noise.
pub fn synthetic_image(size: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<[f64; 4]> = (0..12)
        .map(|_| {
            [
                rng.random::<f64>(),
                rng.random::<f64>(),
                0.02 + 0.15 * rng.random::<f64>(),
                rng.random::<f64>() - 0.3,
            ]
        })
        .collect();
    let freq = 3.0 + 5.0 * rng.random::<f64>();
    let phase = 6.0 * rng.random::<f64>();
    let tau = std::f64::consts::TAU;
    let mut img = DMatrix::from_fn(size, size, |i, j| {
        let (y, x) = (i as f64 / size as f64, j as f64 / size as f64);
        let mut v = 0.3 * x + 0.2 * y;
        for [cx, cy, s, amp] in &blobs {
            v += amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp();
        }
        v + 0.05 * (tau * freq * x + phase).sin() * (tau * 4.0 * y).cos()
    });
    img.iter_mut().for_each(|v| *v += 0.02 * rng.sample::<f64, _>(StandardNormal));
    let (lo, hi) = (img.min(), img.max());
    img.map(|v| (((v - lo) / (hi - lo)) * 255.0).round() / 255.0)
}
