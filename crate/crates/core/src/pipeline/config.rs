use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;

/// Environment variable that overrides `master_seed`.
pub const SEED_ENV: &str = "GEOMFORGE_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DpiPolicy {
    pub high_fraction: f64,
    pub high_range: [u32; 2],
    pub low_range: [u32; 2],
}

impl Default for DpiPolicy {
    fn default() -> Self {
        Self { high_fraction: 0.8, high_range: [250, 300], low_range: [72, 150] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, val: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || ((parts.iter().sum::<f64>() - 1.0).abs() > 1e-9) {
            return Err(PipelineError::Config(format!("split ratios {parts:?} must be non-negative and sum to 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodecConfig {
    pub epsilon: f64,
    pub refine_radius: u8,
    pub refine_passes: usize,
}

impl Default for CodecConfig {
    fn default() -> Self {
        let o = crate::codec::EncodeOptions::default();
        Self { epsilon: o.epsilon, refine_radius: o.refine_radius, refine_passes: o.refine_passes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenConfig {
    pub sample_count: u64,
    #[serde(deserialize_with = "de_seed")]
    pub master_seed: u64,
    pub tau: f64,
    pub draw_diagonals_prob: f64,
    pub p_drop: f64,
    pub dilation_choices: Vec<usize>,
    pub output_dir: PathBuf,
    /// 0 picks the number of available cores.
    pub workers: usize,
    pub emit_tikz: bool,
    pub dpi: DpiPolicy,
    pub split: SplitRatios,
    pub codec: CodecConfig,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            sample_count: 100,
            master_seed: 0,
            tau: crate::render::DEFAULT_TAU,
            draw_diagonals_prob: 0.3,
            p_drop: 0.0,
            dilation_choices: vec![2, 3, 4],
            output_dir: PathBuf::from("geomforge-out"),
            workers: 0,
            emit_tikz: false,
            dpi: DpiPolicy::default(),
            split: SplitRatios::default(),
            codec: CodecConfig::default(),
        }
    }
}

fn range_ok(r: [u32; 2]) -> bool {
    r[0] <= r[1] && r[0] >= crate::render::DPI_RANGE.0 && r[1] <= crate::render::DPI_RANGE.1
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        self.split.validate()?;
        if !(0.0..=1.0).contains(&self.dpi.high_fraction) {
            return bad(format!("dpi.high_fraction {} outside [0, 1]", self.dpi.high_fraction));
        }
        if !range_ok(self.dpi.high_range) || !range_ok(self.dpi.low_range) {
            return bad(format!("dpi ranges {:?} / {:?} must be ordered and within {:?}", self.dpi.high_range, self.dpi.low_range, crate::render::DPI_RANGE));
        }
        if !(0.0..=1.0).contains(&self.draw_diagonals_prob) || !(0.0..=1.0).contains(&self.p_drop) {
            return bad("probabilities must lie in [0, 1]".into());
        }
        if self.dilation_choices.is_empty() {
            return bad("dilation_choices is empty".into());
        }
        if !(self.tau.is_finite() && self.codec.epsilon.is_finite() && self.codec.epsilon >= 0.0) {
            return bad("tau and codec.epsilon must be finite".into());
        }
        Ok(())
    }

    pub fn encode_options(&self) -> crate::codec::EncodeOptions {
        crate::codec::EncodeOptions { epsilon: self.codec.epsilon, refine_radius: self.codec.refine_radius, refine_passes: self.codec.refine_passes }
    }
}

/// Parses an override value as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), PipelineError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().unwrap();
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| PipelineError::Config(format!("{key}: {p} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Builds a config from an optional TOML file, then the seed environment
/// variable, then `key=value` overrides (dotted keys address sections).
pub fn load_config(path: Option<&Path>, env_seed: Option<&str>, overrides: &[(String, String)]) -> Result<GenConfig, PipelineError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| PipelineError::Io { path: p.display().to_string(), msg: e.to_string() })?;
            toml::from_str::<toml::Table>(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    if let Some(seed) = env_seed {
        let seed: u64 = seed.trim().parse().map_err(|_| PipelineError::Config(format!("{SEED_ENV}={seed:?} is not an unsigned integer")))?;
        table.insert("master_seed".into(), seed_value(seed));
    }
    for (k, v) in overrides {
        let value = if k == "master_seed" {
            seed_value(v.parse().map_err(|_| PipelineError::Config(format!("master_seed {v:?} is not an unsigned integer")))?)
        } else {
            parse_value(v)
        };
        set_dotted(&mut table, k, value)?;
    }
    let cfg: GenConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| PipelineError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn de_seed<'de, D: serde::Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(u64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(v) => Ok(v),
        Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
    }
}

/// TOML integers are signed; seeds above `i64::MAX` travel as strings.
fn seed_value(seed: u64) -> toml::Value {
    match i64::try_from(seed) {
        Ok(v) => toml::Value::Integer(v),
        Err(_) => toml::Value::String(seed.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GenConfig::default().validate().unwrap();
    }

    #[test]
    fn precedence_file_env_flag() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "sample_count = 12\nmaster_seed = 1\n[dpi]\nhigh_fraction = 0.5\n").unwrap();
        let c = load_config(Some(&p), None, &[]).unwrap();
        assert_eq!((c.sample_count, c.master_seed, c.dpi.high_fraction), (12, 1, 0.5));
        assert_eq!(c.dpi.low_range, [72, 150]);
        let c = load_config(Some(&p), Some("5"), &[]).unwrap();
        assert_eq!(c.master_seed, 5);
        let c = load_config(Some(&p), Some("5"), &[("master_seed".into(), "9".into()), ("dpi.high_range".into(), "[260, 280]".into())]).unwrap();
        assert_eq!((c.master_seed, c.dpi.high_range), (9, [260, 280]));
        let c = load_config(None, None, &[("output_dir".into(), "some/where".into())]).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("some/where"));
        let c = load_config(None, Some(&u64::MAX.to_string()), &[]).unwrap();
        assert_eq!(c.master_seed, u64::MAX);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(load_config(None, None, &[("split.train".into(), "0.9".into())]).is_err());
        assert!(load_config(None, None, &[("dpi.low_range".into(), "[150, 72]".into())]).is_err());
        assert!(load_config(None, None, &[("no_such_key".into(), "1".into())]).is_err());
        assert!(load_config(None, Some("abc"), &[]).is_err());
    }
}
