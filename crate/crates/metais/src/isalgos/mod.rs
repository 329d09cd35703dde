//! Reference instance selection algorithms.
//!
//! Each algorithm maps a dataset to a boolean keep/remove mask over its rows.
//! All of them are deterministic: every tie is broken explicitly (equal
//! distances toward the smaller row index, equal votes toward the smaller
//! class id), so repeated runs and different neighbor-search backends give
//! identical masks.

mod ccis;
mod drop3;
mod enn;
mod hmnei;
mod icf;

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nng::raw_sq_dist;

pub use ccis::ccis;
pub use drop3::drop3;
pub use enn::enn;
pub use hmnei::hmnei;
pub use icf::{icf, local_sets, LocalSetInfo};

/// Keep/remove decision per row of the dataset an algorithm ran on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMask {
    keep: Vec<bool>,
    algorithm: String,
    k: Option<usize>,
}

impl SelectionMask {
    pub fn new(keep: Vec<bool>, algorithm: impl Into<String>, k: Option<usize>) -> Self {
        SelectionMask {
            keep,
            algorithm: algorithm.into(),
            k,
        }
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn n(&self) -> usize {
        self.keep.len()
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&b| b).count()
    }

    pub fn kept_indices(&self) -> Vec<usize> {
        (0..self.keep.len()).filter(|&i| self.keep[i]).collect()
    }

    /// Fraction of instances removed: `(n - n') / n`.
    pub fn reduction_rate(&self) -> f64 {
        if self.keep.is_empty() {
            return 0.0;
        }
        let n = self.keep.len() as f64;
        (n - self.kept_count() as f64) / n
    }
}

/// Summary numbers for a selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStats {
    pub algorithm: String,
    pub k: Option<usize>,
    pub n: usize,
    pub n_kept: usize,
    pub reduction_rate: f64,
}

pub fn reduction_stats(mask: &SelectionMask) -> ReductionStats {
    ReductionStats {
        algorithm: mask.algorithm().to_string(),
        k: mask.k(),
        n: mask.n(),
        n_kept: mask.kept_count(),
        reduction_rate: mask.reduction_rate(),
    }
}

/// The available reference algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Enn,
    Drop3,
    Icf,
    Hmnei,
    Ccis,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Enn,
        Algorithm::Drop3,
        Algorithm::Icf,
        Algorithm::Hmnei,
        Algorithm::Ccis,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Enn => "enn",
            Algorithm::Drop3 => "drop3",
            Algorithm::Icf => "icf",
            Algorithm::Hmnei => "hmnei",
            Algorithm::Ccis => "ccis",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "enn" => Ok(Algorithm::Enn),
            "drop3" => Ok(Algorithm::Drop3),
            "icf" => Ok(Algorithm::Icf),
            "hmnei" => Ok(Algorithm::Hmnei),
            "ccis" => Ok(Algorithm::Ccis),
            other => Err(Error::invalid(format!("unknown algorithm `{}`", other))),
        }
    }
}

/// Run an algorithm by id. `k` is the neighborhood size for the algorithms
/// that take one; `hmnei` ignores it.
pub fn run(algo: Algorithm, d: &Dataset, k: usize) -> Result<SelectionMask> {
    match algo {
        Algorithm::Enn => enn(d, k),
        Algorithm::Drop3 => drop3(d, k),
        Algorithm::Icf => icf(d, k),
        Algorithm::Hmnei => hmnei(d),
        Algorithm::Ccis => ccis(d, k),
    }
}

/// Class with the most votes; ties go to the smallest class id.
pub(crate) fn majority_class(counts: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (class, &c) in counts.iter().enumerate() {
        if c > 0 && best.map_or(true, |(_, bc)| c > bc) {
            best = Some((class, c));
        }
    }
    best.map(|(class, _)| class)
}

/// 1-nearest-neighbor accuracy over all rows of `d`, classifying each row by
/// the nearest retained row other than itself. Rows with no available
/// neighbor count as misclassified.
pub(crate) fn nn1_accuracy_against(d: &Dataset, retained: &[bool]) -> f64 {
    let n = d.n_rows();
    let mut correct = 0usize;
    for x in 0..n {
        let mut best: Option<(f64, usize)> = None;
        for r in 0..n {
            if !retained[r] || r == x {
                continue;
            }
            let raw = raw_sq_dist(d.row(x), d.row(r));
            if best.map_or(true, |(bd, bi)| raw < bd || (raw == bd && r < bi)) {
                best = Some((raw, r));
            }
        }
        if let Some((_, provider)) = best {
            if d.label(provider) == d.label(x) {
                correct += 1;
            }
        }
    }
    correct as f64 / n as f64
}

/// Write a mask as CSV with columns `index,keep` (keep is 0/1).
pub fn write_mask_csv(mask: &SelectionMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    writeln!(out, "index,keep").map_err(|e| Error::io(path, e))?;
    for (i, &keep) in mask.keep().iter().enumerate() {
        writeln!(out, "{},{}", i, u8::from(keep)).map_err(|e| Error::io(path, e))?;
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a mask written by [`write_mask_csv`]. Algorithm metadata is not part
/// of the CSV; supply it from the JSON sidecar if needed.
pub fn read_mask_csv(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "index,keep" => {}
        _ => return Err(Error::parse(&path_str, 1, "expected header `index,keep`")),
    }
    let mut keep = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (i_str, k_str) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(&path_str, line_no, "expected `index,keep` row"))?;
        let i: usize = i_str
            .trim()
            .parse()
            .map_err(|_| Error::parse(&path_str, line_no, "bad index"))?;
        if i != keep.len() {
            return Err(Error::parse(
                &path_str,
                line_no,
                format!("index {} out of order (expected {})", i, keep.len()),
            ));
        }
        match k_str.trim() {
            "0" => keep.push(false),
            "1" => keep.push(true),
            other => {
                return Err(Error::parse(
                    &path_str,
                    line_no,
                    format!("keep flag must be 0 or 1, got `{}`", other),
                ))
            }
        }
    }
    if keep.is_empty() {
        return Err(Error::parse(&path_str, 1, "no mask rows"));
    }
    Ok(keep)
}
