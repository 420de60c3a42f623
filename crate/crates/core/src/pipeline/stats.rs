use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{PhaseTimes, PipelineError};
use crate::geom::ShapeKind;
use crate::manifest::{read_manifest, SampleRecord, Split};

/// Histograms and totals derived from manifest rows only, so the file is
/// reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub samples: usize,
    pub targets: usize,
    pub by_shape: BTreeMap<String, usize>,
    pub by_split: BTreeMap<String, usize>,
    pub by_dpi_band: BTreeMap<String, usize>,
    pub by_target_kind: BTreeMap<String, usize>,
    pub by_dilation_radius: BTreeMap<String, usize>,
    pub by_length_band: BTreeMap<String, usize>,
    pub dpi_min: u32,
    pub dpi_max: u32,
    /// Samples that needed more than one RNG stream.
    pub resampled: usize,
    pub mean_token_count: f64,
    pub median_rle_ratio: f64,
}

impl DatasetStats {
    pub fn from_records(records: &[SampleRecord]) -> Self {
        let mut by_shape: BTreeMap<String, usize> = ShapeKind::ALL.iter().map(|k| (k.as_str().to_string(), 0)).collect();
        let mut by_split: BTreeMap<String, usize> = Split::ALL.iter().map(|s| (s.as_str().to_string(), 0)).collect();
        let mut by_dpi_band = BTreeMap::new();
        let mut by_target_kind = BTreeMap::new();
        let mut by_dilation_radius = BTreeMap::new();
        let mut by_length_band = BTreeMap::new();
        let mut ratios = Vec::new();
        let mut tokens = 0usize;
        for r in records {
            *by_shape.entry(r.shape.as_str().to_string()).or_default() += 1;
            *by_split.entry(r.split.as_str().to_string()).or_default() += 1;
            *by_dpi_band.entry(r.dpi_band.as_str().to_string()).or_default() += 1;
            *by_dilation_radius.entry(r.dilation_radius.to_string()).or_default() += 1;
            for t in &r.targets {
                *by_target_kind.entry(t.target_kind.as_str().to_string()).or_default() += 1;
                tokens += t.token_count;
                ratios.push(t.rle_token_count as f64 / t.token_count.max(1) as f64);
                for e in &t.expressions {
                    *by_length_band.entry(format!("{}/{}", e.level, e.length_band.as_str())).or_default() += 1;
                }
            }
        }
        ratios.sort_by(f64::total_cmp);
        let targets = ratios.len();
        Self {
            samples: records.len(),
            targets,
            by_shape,
            by_split,
            by_dpi_band,
            by_target_kind,
            by_dilation_radius,
            by_length_band,
            dpi_min: records.iter().map(|r| r.dpi).min().unwrap_or(0),
            dpi_max: records.iter().map(|r| r.dpi).max().unwrap_or(0),
            resampled: records.iter().filter(|r| r.attempts > 1).count(),
            mean_token_count: tokens as f64 / targets.max(1) as f64,
            median_rle_ratio: if targets == 0 { 0.0 } else { ratios[targets / 2] },
        }
    }
}

/// Wall-clock and per-phase CPU time of a run. Phase times are summed over
/// workers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub workers: usize,
    pub samples: usize,
    pub wall_seconds: f64,
    pub solve_seconds: f64,
    pub render_seconds: f64,
    pub mask_seconds: f64,
    pub samples_per_second: f64,
}

impl Timing {
    pub(super) fn new(p: PhaseTimes, wall: Duration, samples: usize, workers: usize) -> Self {
        let w = wall.as_secs_f64();
        Self {
            workers,
            samples,
            wall_seconds: w,
            solve_seconds: p.solve.as_secs_f64(),
            render_seconds: p.render.as_secs_f64(),
            mask_seconds: p.masks.as_secs_f64(),
            samples_per_second: if w > 0.0 { samples as f64 / w } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectReport {
    pub stats: DatasetStats,
    pub timing: Option<Timing>,
}

fn histogram(s: &mut String, title: &str, h: &BTreeMap<String, usize>) {
    let total: usize = h.values().sum();
    let _ = writeln!(s, "{title} (total {total})");
    for (k, v) in h {
        let _ = writeln!(s, "  {k:<24} {v:>8} {:>6.1}%", 100.0 * *v as f64 / total.max(1) as f64);
    }
}

impl InspectReport {
    pub fn to_text(&self) -> String {
        let st = &self.stats;
        let mut s = String::new();
        let _ = writeln!(s, "samples {}  targets {}  resampled {}", st.samples, st.targets, st.resampled);
        let _ = writeln!(s, "dpi {}..{}  mean tokens {:.1}  median rle/poly {:.2}", st.dpi_min, st.dpi_max, st.mean_token_count, st.median_rle_ratio);
        histogram(&mut s, "shape", &st.by_shape);
        histogram(&mut s, "split", &st.by_split);
        histogram(&mut s, "dpi band", &st.by_dpi_band);
        histogram(&mut s, "target kind", &st.by_target_kind);
        histogram(&mut s, "dilation radius", &st.by_dilation_radius);
        histogram(&mut s, "expression length", &st.by_length_band);
        if let Some(t) = &self.timing {
            let _ = writeln!(
                s,
                "timing: {} samples on {} workers in {:.2}s ({:.2}/s); solve {:.2}s render {:.2}s masks {:.2}s",
                t.samples, t.workers, t.wall_seconds, t.samples_per_second, t.solve_seconds, t.render_seconds, t.mask_seconds
            );
        }
        s
    }
}

/// Reads a manifest (and `timing.json` beside it, if present).
pub fn inspect(manifest: &Path) -> Result<InspectReport, PipelineError> {
    let records = read_manifest(manifest).map_err(|e| PipelineError::Io { path: manifest.display().to_string(), msg: e.to_string() })?;
    let timing_path = manifest.with_file_name("timing.json");
    let timing = match std::fs::read_to_string(&timing_path) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| PipelineError::Io { path: timing_path.display().to_string(), msg: e.to_string() })?),
        Err(_) => None,
    };
    Ok(InspectReport { stats: DatasetStats::from_records(&records), timing })
}
