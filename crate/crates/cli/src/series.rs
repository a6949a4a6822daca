//! Grid series for CSV output: a utility and its concave envelope.

use std::fs::File;
use std::path::{Path, PathBuf};

use persuade_core::envelope::UpperHull;
use persuade_core::PiecewiseUtility;

use crate::error::{CliError, Result};

/// `points` equally spaced beliefs on `[0, 1]`.
pub fn grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

/// The envelope of `utility`, sampled once at `resolution` and evaluated anywhere.
pub struct Envelope {
    hull: UpperHull,
}

impl Envelope {
    pub fn new(utility: &PiecewiseUtility, resolution: usize) -> Self {
        Self {
            hull: UpperHull::from_sorted(&utility.sample(resolution)),
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.hull.evaluate(x).map_or(f64::NAN, |(v, _)| v)
    }
}

/// Formats a number for CSV cells; fixed width keeps golden files stable.
pub fn cell(x: f64) -> String {
    format!("{x:.9}")
}

pub fn writer(dir: &Path, name: &str) -> Result<(csv::Writer<File>, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    Ok((csv::Writer::from_writer(file), path))
}
