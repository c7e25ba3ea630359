//! Coefficient files: JSON with the basis metadata next to the entries.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every coefficient bit for bit.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use spectral_bayes::{BasisKind, BasisSpec, CoefficientVector, Domain};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub format_version: u32,
    pub basis: BasisMeta,
    /// `[re, im]` pairs from the lowest index upward.
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisMeta {
    pub kind: String,
    pub domain: DomainMeta,
    #[serde(rename = "K")]
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainMeta {
    Bounds { lo: f64, hi: f64 },
    Named(String),
}

const REAL_LINE: &str = "real-line";

fn kind_name(kind: BasisKind) -> &'static str {
    match kind {
        BasisKind::Fourier => "fourier",
        BasisKind::Cosine => "cosine",
        BasisKind::Hermite => "hermite",
    }
}

impl CoefficientFile {
    pub fn from_coefficients(c: &CoefficientVector) -> Self {
        let spec = c.spec();
        let domain = match spec.domain().bounds() {
            Some((lo, hi)) => DomainMeta::Bounds { lo, hi },
            None => DomainMeta::Named(REAL_LINE.into()),
        };
        CoefficientFile {
            format_version: FORMAT_VERSION,
            basis: BasisMeta {
                kind: kind_name(spec.kind()).into(),
                domain,
                k: spec.max_wavenumber(),
            },
            entries: c.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_coefficients(&self) -> Result<CoefficientVector, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Io(format!("unsupported format_version {}", self.format_version)));
        }
        let domain = match (&self.basis.domain, self.basis.kind.as_str()) {
            (DomainMeta::Bounds { lo, hi }, "fourier") => Domain::periodic(*lo, *hi)?,
            (DomainMeta::Bounds { lo, hi }, "cosine") => Domain::interval(*lo, *hi)?,
            (DomainMeta::Named(name), "hermite") if name == REAL_LINE => Domain::RealLine,
            (_, "fourier" | "cosine" | "hermite") => {
                return Err(CliError::Io(format!("domain does not fit a {} basis", self.basis.kind)))
            }
            (_, other) => return Err(CliError::Io(format!("unknown basis kind {other:?}"))),
        };
        let kind = match self.basis.kind.as_str() {
            "fourier" => BasisKind::Fourier,
            "cosine" => BasisKind::Cosine,
            _ => BasisKind::Hermite,
        };
        let spec = BasisSpec::new(kind, domain, self.basis.k)?;
        if self.entries.len() != spec.mode_count() {
            return Err(CliError::Io(format!(
                "{} entries but a {} basis with K = {} has {}",
                self.entries.len(),
                self.basis.kind,
                self.basis.k,
                spec.mode_count()
            )));
        }
        let entries = self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(CoefficientVector::new(spec, entries)?)
    }
}

pub fn read(path: &Path) -> Result<CoefficientVector, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: CoefficientFile =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    file.to_coefficients().map_err(|e| e.in_file(path))
}

pub fn render(c: &CoefficientVector) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(&CoefficientFile::from_coefficients(c))
        .map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write(path: &Path, c: &CoefficientVector) -> Result<(), CliError> {
    fs::write(path, render(c)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
