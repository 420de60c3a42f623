//! JSONL manifest rows shared by generation, evaluation and inspection.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::ShapeKind;
use crate::lang::{ComplexityLevel, LengthBand};
use crate::scene::{ElementId, TargetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpiBand {
    High,
    Low,
}

impl DpiBand {
    pub fn as_str(self) -> &'static str {
        match self {
            DpiBand::High => "high",
            DpiBand::Low => "low",
        }
    }
}

impl FromStr for DpiBand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "high" => Ok(DpiBand::High),
            "low" => Ok(DpiBand::Low),
            _ => Err(format!("unknown dpi band {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionRecord {
    pub text: String,
    pub level: ComplexityLevel,
    pub template_id: usize,
    pub length_band: LengthBand,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub element_id: ElementId,
    pub target_kind: TargetKind,
    /// Paths are relative to the manifest's directory.
    pub mask: String,
    pub mask_dilated: String,
    pub expressions: Vec<ExpressionRecord>,
    /// `<seg>` sequence of the dilated mask.
    pub tokens: String,
    pub token_count: usize,
    pub rle_token_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub index: u64,
    pub split: Split,
    /// Key of the RNG stream that produced the accepted sample.
    pub seed: u64,
    pub attempts: u32,
    pub shape: ShapeKind,
    pub dpi: u32,
    pub dpi_band: DpiBand,
    pub width: usize,
    pub height: usize,
    pub image: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tikz: Option<String>,
    pub draw_diagonals: bool,
    pub dilation_radius: usize,
    pub targets: Vec<TargetRecord>,
}

impl SampleRecord {
    pub fn target(&self, id: &ElementId) -> Option<&TargetRecord> {
        self.targets.iter().find(|t| &t.element_id == id)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: String, line: usize, source: serde_json::Error },
}

pub fn read_manifest(path: &Path) -> Result<Vec<SampleRecord>, ManifestError> {
    let io = |source| ManifestError::Io { path: path.display().to_string(), source };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|source| ManifestError::Parse { path: path.display().to_string(), line: n + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, records: &[SampleRecord]) -> Result<(), ManifestError> {
    let io = |source| ManifestError::Io { path: path.display().to_string(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for r in records {
        serde_json::to_writer(&mut w, r).expect("manifest rows serialize");
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}
