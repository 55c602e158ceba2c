//! Distribution files.
//!
//! JSON: `{"kind": "range" | "bitstring", "n": int, "weights": [float]}` where
//! `n` is the number of elements for `range` and the number of bits for
//! `bitstring`.
//!
//! CSV: rows `index,weight` with 0-based indices and an optional
//! `index,weight` header; unlisted indices below the largest one get weight 0.
//! The result is a range distribution.
//!
//! Weights whose sum lies within 1e−6 of 1 are renormalised; anything else
//! is rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::oracles::{Distribution, SampleSpace};
use crate::{Error, Result};

pub const RENORMALISE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Range,
    Bitstring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub kind: FileKind,
    pub n: usize,
    pub weights: Vec<f64>,
}

impl DistributionFile {
    pub fn from_distribution(d: &Distribution) -> Self {
        match d.space() {
            SampleSpace::Range { size } => DistributionFile {
                kind: FileKind::Range,
                n: size,
                weights: d.weights().to_vec(),
            },
            SampleSpace::Bitstring { bits } => DistributionFile {
                kind: FileKind::Bitstring,
                n: bits as usize,
                weights: d.weights().to_vec(),
            },
        }
    }
}

fn renormalise(weights: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidDistribution(format!("weight {w}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > RENORMALISE_TOL {
        return Err(Error::InvalidDistribution(format!(
            "weights sum to {sum}, outside 1 ± {RENORMALISE_TOL}"
        )));
    }
    Ok(weights.into_iter().map(|w| w / sum).collect())
}

pub fn parse_json(text: &str) -> Result<Distribution> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let weights = renormalise(file.weights)?;
    let space = match file.kind {
        FileKind::Range => SampleSpace::Range { size: file.n },
        FileKind::Bitstring => SampleSpace::Bitstring {
            bits: u32::try_from(file.n).map_err(|_| Error::Parse("n too large".into()))?,
        },
    };
    if space.len() != weights.len() {
        return Err(Error::Parse(format!(
            "`n` = {} implies {} weights, found {}",
            file.n,
            space.len(),
            weights.len()
        )));
    }
    Distribution::new(space, weights)
}

pub fn parse_csv(text: &str) -> Result<Distribution> {
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse(format!(
                "line {}: expected `index,weight`",
                lineno + 1
            )));
        };
        if entries.is_empty() && a.eq_ignore_ascii_case("index") {
            continue;
        }
        let idx = a
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("line {}: index: {e}", lineno + 1)))?;
        let w = b
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("line {}: weight: {e}", lineno + 1)))?;
        entries.push((idx, w));
    }
    let len = entries
        .iter()
        .map(|&(i, _)| i + 1)
        .max()
        .ok_or_else(|| Error::Parse("no rows".into()))?;
    let mut weights = vec![0.0; len];
    let mut seen = vec![false; len];
    for (i, w) in entries {
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Parse(format!("index {i} listed twice")));
        }
        weights[i] = w;
    }
    Distribution::over_range(renormalise(weights)?)
}

/// Loads a `.json` or `.csv` distribution file.
pub fn load(path: &Path) -> Result<Distribution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_csv(&text),
        _ => parse_json(&text),
    }
}

pub fn to_json(d: &Distribution) -> String {
    serde_json::to_string(&DistributionFile::from_distribution(d)).expect("plain data")
}
