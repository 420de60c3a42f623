//! Batch evaluation of predictions against a generated manifest.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{biou_pixel, iou};
use crate::codec::decode_mask_tokens;
use crate::lang::ComplexityLevel;
use crate::manifest::{read_manifest, DpiBand, ManifestError, SampleRecord, TargetRecord};
use crate::raster::BinaryMask;
use crate::scene::TargetKind;

/// One line of a predictions file. `id` is `<sample id>/<element id>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<ComplexityLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_seq: Option<String>,
}

pub fn prediction_id(sample: &SampleRecord, target: &TargetRecord) -> String {
    format!("{}/{}", sample.id, target.element_id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Malformed,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub id: String,
    pub target_kind: TargetKind,
    pub level: Option<ComplexityLevel>,
    pub dpi_band: DpiBand,
    pub iou: f64,
    pub biou: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_iou: f64,
    pub mean_biou: f64,
    pub count: usize,
}

impl Aggregate {
    fn of<'a>(rows: impl Iterator<Item = &'a EvalRow>) -> Self {
        let (mut si, mut sb, mut n) = (0.0, 0.0, 0usize);
        for r in rows {
            si += r.iou;
            sb += r.biou;
            n += 1;
        }
        let d = n.max(1) as f64;
        Self { mean_iou: si / d, mean_biou: sb / d, count: n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub beta: f64,
    pub rows: Vec<EvalRow>,
    pub overall: Aggregate,
    pub by_target_kind: BTreeMap<String, Aggregate>,
    pub by_level: BTreeMap<String, Aggregate>,
    pub by_dpi_band: BTreeMap<String, Aggregate>,
    pub malformed: usize,
    pub missing: usize,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("prediction {0:?} does not match any manifest target")]
    ManifestMismatch(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl EvalReport {
    /// Aggregates recomputed from `rows`.
    pub fn from_rows(rows: Vec<EvalRow>, beta: f64) -> Self {
        let strat = |key: &dyn Fn(&EvalRow) -> String| {
            let mut groups: BTreeMap<String, Vec<&EvalRow>> = BTreeMap::new();
            for r in &rows {
                groups.entry(key(r)).or_default().push(r);
            }
            groups.into_iter().map(|(k, v)| (k, Aggregate::of(v.into_iter()))).collect::<BTreeMap<_, _>>()
        };
        let by_target_kind = strat(&|r| r.target_kind.as_str().to_string());
        let by_level = strat(&|r| r.level.map_or("unspecified", |l| l.as_str()).to_string());
        let by_dpi_band = strat(&|r| r.dpi_band.as_str().to_string());
        Self {
            beta,
            overall: Aggregate::of(rows.iter()),
            malformed: rows.iter().filter(|r| r.status == RowStatus::Malformed).count(),
            missing: rows.iter().filter(|r| r.status == RowStatus::Missing).count(),
            by_target_kind,
            by_level,
            by_dpi_band,
            rows,
        }
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<28} {:>8} {:>8} {:>7}", "group", "IoU", "BIoU", "n");
        let mut line = |name: &str, a: &Aggregate| {
            let _ = writeln!(s, "{:<28} {:>8.4} {:>8.4} {:>7}", name, a.mean_iou, a.mean_biou, a.count);
        };
        line("overall", &self.overall);
        for (k, a) in &self.by_target_kind {
            line(&format!("target_kind={k}"), a);
        }
        for (k, a) in &self.by_level {
            line(&format!("level={k}"), a);
        }
        for (k, a) in &self.by_dpi_band {
            line(&format!("dpi_band={k}"), a);
        }
        let _ = writeln!(s, "malformed={} missing={} beta={}", self.malformed, self.missing, self.beta);
        s
    }
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>, EvalError> {
    let err = |msg: String| EvalError::Io { path: path.display().to_string(), msg };
    let reader = BufReader::new(File::open(path).map_err(|e| err(e.to_string()))?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| err(format!("line {}: {e}", n + 1)))?);
    }
    Ok(out)
}

fn load_prediction(p: &Prediction, base: &Path, w: usize, h: usize) -> Option<BinaryMask> {
    if let Some(seq) = &p.token_seq {
        return decode_mask_tokens(seq, w, h).ok();
    }
    let m = BinaryMask::load_png(&base.join(p.mask_path.as_ref()?)).ok()?;
    ((m.width, m.height) == (w, h)).then_some(m)
}

/// Scores every prediction against the manifest's masks. Manifest targets
/// without any prediction score 0 and are reported as missing; unreadable or
/// malformed predictions score 0 and are reported as malformed.
pub fn evaluate(
    samples: &[SampleRecord],
    manifest_dir: &Path,
    predictions: &[Prediction],
    predictions_dir: &Path,
    beta: f64,
) -> Result<EvalReport, EvalError> {
    let mut index: HashMap<String, (&SampleRecord, &TargetRecord)> = HashMap::new();
    for s in samples {
        for t in &s.targets {
            index.insert(prediction_id(s, t), (s, t));
        }
    }
    for p in predictions {
        if !index.contains_key(&p.id) {
            return Err(EvalError::ManifestMismatch(p.id.clone()));
        }
    }
    let predicted: HashSet<&str> = predictions.iter().map(|p| p.id.as_str()).collect();

    let scored: Vec<Result<EvalRow, EvalError>> = predictions
        .par_iter()
        .map(|p| {
            let (s, t) = index[&p.id];
            let gt_path = manifest_dir.join(&t.mask);
            let gt = BinaryMask::load_png(&gt_path).map_err(|e| EvalError::Io { path: gt_path.display().to_string(), msg: e.to_string() })?;
            let (iou_v, biou_v, status) = match load_prediction(p, predictions_dir, gt.width, gt.height) {
                Some(m) => (iou(&gt, &m).unwrap_or(0.0), biou_pixel(&gt, &m, beta).unwrap_or(0.0), RowStatus::Ok),
                None => (0.0, 0.0, RowStatus::Malformed),
            };
            Ok(EvalRow { id: p.id.clone(), target_kind: t.target_kind, level: p.level, dpi_band: s.dpi_band, iou: iou_v, biou: biou_v, status })
        })
        .collect();
    let mut rows = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    for s in samples {
        for t in &s.targets {
            let id = prediction_id(s, t);
            if !predicted.contains(id.as_str()) {
                rows.push(EvalRow { id, target_kind: t.target_kind, level: None, dpi_band: s.dpi_band, iou: 0.0, biou: 0.0, status: RowStatus::Missing });
            }
        }
    }
    Ok(EvalReport::from_rows(rows, beta))
}

/// File-level wrapper: manifest and predictions paths resolve their relative
/// paths against their own directories.
pub fn evaluate_batch(manifest: &Path, predictions: &Path, beta: f64) -> Result<EvalReport, EvalError> {
    let samples = read_manifest(manifest)?;
    let preds = read_predictions(predictions)?;
    let dir = |p: &Path| p.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    evaluate(&samples, &dir(manifest), &preds, &dir(predictions), beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(kind: TargetKind, band: DpiBand, iou: f64, biou: f64) -> EvalRow {
        EvalRow { id: "x".into(), target_kind: kind, level: Some(ComplexityLevel::Direct), dpi_band: band, iou, biou, status: RowStatus::Ok }
    }

    #[test]
    fn aggregates_match_rows() {
        let rows = vec![
            row(TargetKind::Side, DpiBand::High, 0.5, 0.9),
            row(TargetKind::Side, DpiBand::Low, 0.25, 0.5),
            row(TargetKind::Polygon, DpiBand::High, 1.0, 1.0),
        ];
        let r = EvalReport::from_rows(rows, 3.0);
        assert_eq!(r.overall.count, 3);
        assert!((r.overall.mean_iou - 1.75 / 3.0).abs() < 1e-12);
        assert_eq!(r.by_target_kind["side"].count, 2);
        assert!((r.by_target_kind["side"].mean_biou - 0.7).abs() < 1e-12);
        assert_eq!(r.by_dpi_band["high"].count, 2);
        assert_eq!(r.by_level["direct"].count, 3);
        assert!(r.to_table().contains("target_kind=polygon"));
    }

    #[test]
    fn prediction_json_shapes() {
        let p: Prediction = serde_json::from_str(r#"{"id":"s/side:AB","token_seq":"<seg> 1,2, 3,4, 5,6 </seg>"}"#).unwrap();
        assert!(p.mask_path.is_none() && p.level.is_none());
        let q: Prediction = serde_json::from_str(r#"{"id":"s/incircle","level":"topological","mask_path":"m.png"}"#).unwrap();
        assert_eq!(q.level, Some(ComplexityLevel::Topological));
    }
}
