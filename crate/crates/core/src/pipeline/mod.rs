//! Deterministic batch generation of diagram, mask and expression triplets.

mod config;
mod stats;

pub use config::{load_config, CodecConfig, DpiPolicy, GenConfig, SplitRatios, SEED_ENV};
pub use stats::{inspect, DatasetStats, InspectReport, Timing};

use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{encode_mask, encode_tokens, rle_encode, token_count};
use crate::geom::{sample_kind, sample_shape, GeomError, ShapeInstance};
use crate::lang::TemplateStore;
use crate::manifest::{write_manifest, DpiBand, ExpressionRecord, SampleRecord, Split, TargetRecord};
use crate::morph::dilate;
use crate::raster::BinaryMask;
use crate::render::{emit_tikz, render_mask, render_scene, RenderStyle};
use crate::scene::{build_scene, drop_non_target, enumerate_targets, ElementId, Scene, SceneOptions, Target};

/// Fresh streams tried per sample before giving up.
pub const MAX_RESAMPLES: u32 = 32;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("sample {index}: {msg}")]
    Sample { index: u64, msg: String },
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the `attempt`-th stream family under `master_seed`.
pub fn stream_key(master_seed: u64, attempt: u32) -> u64 {
    splitmix64(master_seed.wrapping_add((attempt as u64).wrapping_mul(GOLDEN)))
}

/// Per-sample generator: keyed by (master seed, attempt), stream = index.
/// Independent of how samples are scheduled across workers.
pub fn sample_rng(master_seed: u64, index: u64, attempt: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_key(master_seed, attempt));
    rng.set_stream(index);
    rng
}

/// Hash-based split: a golden-ratio Weyl sequence over the id, compared
/// against the cumulative ratios.
pub fn split_assign(id: u64, ratios: &SplitRatios) -> Split {
    let u = (id.wrapping_add(1).wrapping_mul(GOLDEN) >> 11) as f64 / (1u64 << 53) as f64;
    if u < ratios.train {
        Split::Train
    } else if u < ratios.train + ratios.val {
        Split::Val
    } else if ratios.test > 0.0 || ratios.val == 0.0 {
        Split::Test
    } else {
        Split::Val
    }
}

pub fn sample_id(index: u64) -> String {
    format!("gf{index:07}")
}

/// File-name form of an element id (`side:AB` → `side-AB`).
pub fn element_slug(id: &ElementId) -> String {
    id.to_string().replace(':', "-")
}

/// Everything drawn from a sample's stream before rendering.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub index: u64,
    pub seed: u64,
    pub attempts: u32,
    pub shape: ShapeInstance<f64>,
    pub draw_diagonals: bool,
    pub dpi_band: DpiBand,
    pub dpi: u32,
    pub dilation_radius: usize,
    pub scene: Scene,
    pub targets: Vec<Target>,
    /// Stream state after planning; expression sampling continues from it.
    pub rng: ChaCha8Rng,
}

/// Draws kind, shape, diagonals, DPI band, DPI, dilation radius and element
/// dropout, in that order. Exhausted shape sampling moves to the next
/// attempt's stream.
pub fn plan_sample(cfg: &GenConfig, index: u64) -> Result<SamplePlan, PipelineError> {
    for attempt in 0..MAX_RESAMPLES {
        let mut rng = sample_rng(cfg.master_seed, index, attempt);
        let kind = sample_kind(&mut rng);
        let shape = match sample_shape::<f64, _>(kind, &mut rng) {
            Ok(s) => s,
            Err(GeomError::GenerationExhausted { .. }) => {
                log::warn!("sample {index}: {kind:?} exhausted on attempt {attempt}, resampling");
                continue;
            }
            Err(e) => return Err(PipelineError::Sample { index, msg: e.to_string() }),
        };
        let draw_diagonals = rng.random_bool(cfg.draw_diagonals_prob);
        let dpi_band = if rng.random_bool(cfg.dpi.high_fraction) { DpiBand::High } else { DpiBand::Low };
        let [lo, hi] = match dpi_band {
            DpiBand::High => cfg.dpi.high_range,
            DpiBand::Low => cfg.dpi.low_range,
        };
        let dpi = rng.random_range(lo..=hi);
        let dilation_radius = cfg.dilation_choices[rng.random_range(0..cfg.dilation_choices.len())];
        let mut scene = build_scene(&shape, &SceneOptions { draw_diagonals, ..SceneOptions::default() });
        if cfg.p_drop > 0.0 {
            let all = enumerate_targets(&scene);
            let keep = all[rng.random_range(0..all.len())].clone();
            scene = drop_non_target(&scene, &keep, cfg.p_drop, &mut rng).map_err(|e| PipelineError::Sample { index, msg: e.to_string() })?;
        }
        let targets = enumerate_targets(&scene);
        return Ok(SamplePlan {
            index,
            seed: stream_key(cfg.master_seed, attempt),
            attempts: attempt + 1,
            shape,
            draw_diagonals,
            dpi_band,
            dpi,
            dilation_radius,
            scene,
            targets,
            rng,
        });
    }
    Err(PipelineError::Sample { index, msg: format!("shape sampling exhausted on {MAX_RESAMPLES} streams") })
}

/// Rendered outputs for one target.
#[derive(Debug, Clone)]
pub struct TargetOutput {
    pub target: Target,
    pub mask: BinaryMask,
    pub dilated: BinaryMask,
    pub record: TargetRecord,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimes {
    pub solve: Duration,
    pub render: Duration,
    pub masks: Duration,
}

/// Renders the image and all target products of a planned sample. Paths in
/// the records follow the on-disk layout of [`generate`].
pub fn realize_sample(
    cfg: &GenConfig,
    store: &TemplateStore,
    mut plan: SamplePlan,
    times: &mut PhaseTimes,
) -> Result<(SampleRecord, crate::raster::RasterImage, Vec<TargetOutput>, Scene), PipelineError> {
    let index = plan.index;
    let fail = |e: &dyn std::fmt::Display| PipelineError::Sample { index, msg: e.to_string() };
    let id = sample_id(index);
    let style = RenderStyle::at_dpi(plan.dpi);
    let t0 = Instant::now();
    let image = render_scene(&plan.scene, &style).map_err(|e| fail(&e))?;
    times.render += t0.elapsed();

    let t1 = Instant::now();
    let opts = cfg.encode_options();
    let mut outputs = Vec::with_capacity(plan.targets.len());
    for target in &plan.targets {
        let mask = render_mask(&plan.scene, target, &style, cfg.tau).map_err(|e| fail(&e))?;
        let dilated = dilate(&mask, plan.dilation_radius);
        let polys = encode_mask(&dilated, &opts);
        let expressions = store
            .describe_all(target, &plan.scene, &mut plan.rng)
            .map_err(|e| fail(&e))?
            .into_iter()
            .map(|e| ExpressionRecord { length_band: e.length_band(), text: e.text, level: e.level, template_id: e.template_id })
            .collect();
        let slug = element_slug(&target.element_id);
        let record = TargetRecord {
            element_id: target.element_id.clone(),
            target_kind: target.target_kind,
            mask: format!("masks/{id}_{slug}.png"),
            mask_dilated: format!("masks/{id}_{slug}_dil.png"),
            expressions,
            tokens: encode_tokens(&polys),
            token_count: token_count(&polys),
            rle_token_count: rle_encode(&dilated).token_count(),
        };
        outputs.push(TargetOutput { target: target.clone(), mask, dilated, record });
    }
    times.masks += t1.elapsed();

    let record = SampleRecord {
        id: id.clone(),
        index,
        split: split_assign(index, &cfg.split),
        seed: plan.seed,
        attempts: plan.attempts,
        shape: plan.shape.kind,
        dpi: plan.dpi,
        dpi_band: plan.dpi_band,
        width: image.width,
        height: image.height,
        image: format!("images/{id}.png"),
        tikz: cfg.emit_tikz.then(|| format!("tikz/{id}.tex")),
        draw_diagonals: plan.draw_diagonals,
        dilation_radius: plan.dilation_radius,
        targets: outputs.iter().map(|o| o.record.clone()).collect(),
    };
    Ok((record, image, outputs, plan.scene))
}

fn write_sample(dir: &Path, record: &SampleRecord, image: &crate::raster::RasterImage, outputs: &[TargetOutput], scene: &Scene) -> Result<(), PipelineError> {
    let p = dir.join(&record.image);
    image.save_png(&p).map_err(|e| io_err(&p, e))?;
    for o in outputs {
        for (rel, m) in [(&o.record.mask, &o.mask), (&o.record.mask_dilated, &o.dilated)] {
            let p = dir.join(rel);
            m.save_png(&p).map_err(|e| io_err(&p, e))?;
        }
    }
    if let Some(t) = &record.tikz {
        let p = dir.join(t);
        std::fs::write(&p, emit_tikz(scene)).map_err(|e| io_err(&p, e))?;
    }
    Ok(())
}

/// Result of a [`generate`] run.
#[derive(Debug, Clone)]
pub struct GenerateSummary {
    pub records: Vec<SampleRecord>,
    pub stats: DatasetStats,
    pub timing: Timing,
}

impl GenerateSummary {
    /// Fraction of samples that needed more than one stream.
    pub fn exhausted_fraction(&self) -> f64 {
        self.stats.resampled as f64 / self.records.len().max(1) as f64
    }
}

/// Generates `cfg.sample_count` samples into `cfg.output_dir`: images,
/// masks, optional TikZ, `manifest.jsonl` and `stats.json`. Output bytes do
/// not depend on `cfg.workers`.
pub fn generate(cfg: &GenConfig) -> Result<GenerateSummary, PipelineError> {
    cfg.validate()?;
    let dir = cfg.output_dir.as_path();
    for sub in ["images", "masks"].into_iter().chain(cfg.emit_tikz.then_some("tikz")) {
        let p = dir.join(sub);
        std::fs::create_dir_all(&p).map_err(|e| io_err(&p, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| PipelineError::Config(e.to_string()))?;
    let store = TemplateStore::builtin();
    let started = Instant::now();
    let results: Vec<Result<(SampleRecord, PhaseTimes), PipelineError>> = pool.install(|| {
        (0..cfg.sample_count)
            .into_par_iter()
            .map(|i| {
                let mut times = PhaseTimes::default();
                let t0 = Instant::now();
                let plan = plan_sample(cfg, i)?;
                times.solve += t0.elapsed();
                let (record, image, outputs, scene) = realize_sample(cfg, &store, plan, &mut times)?;
                write_sample(dir, &record, &image, &outputs, &scene)?;
                Ok((record, times))
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut total = PhaseTimes::default();
    for r in results {
        let (rec, t) = r?;
        total.solve += t.solve;
        total.render += t.render;
        total.masks += t.masks;
        records.push(rec);
    }
    let manifest = dir.join("manifest.jsonl");
    write_manifest(&manifest, &records).map_err(|e| io_err(&manifest, e))?;
    let stats = DatasetStats::from_records(&records);
    let p = dir.join("stats.json");
    std::fs::write(&p, serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n").map_err(|e| io_err(&p, e))?;
    let timing = Timing::new(total, started.elapsed(), records.len(), pool.current_num_threads());
    Ok(GenerateSummary { records, stats, timing })
}

/// Plans sample `index` under `cfg` and renders it with `target` (or the
/// first target) drawn in the highlight colour.
pub fn preview(cfg: &GenConfig, index: u64, target: Option<&ElementId>) -> Result<(crate::raster::RasterImage, Scene, Target), PipelineError> {
    let plan = plan_sample(cfg, index)?;
    let fail = |msg: String| PipelineError::Sample { index, msg };
    let t = match target {
        Some(id) => plan.targets.iter().find(|t| &t.element_id == id).cloned().ok_or_else(|| fail(format!("no target {id}")))?,
        None => plan.targets.first().cloned().ok_or_else(|| fail("no targets".into()))?,
    };
    let img = crate::render::render_highlight(&plan.scene, &t, &RenderStyle::at_dpi(plan.dpi)).map_err(|e| fail(e.to_string()))?;
    Ok((img, plan.scene, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_fractions_and_determinism() {
        let r = SplitRatios::default();
        let n = 10_000;
        let mut counts = [0usize; 3];
        for id in 0..n {
            let s = split_assign(id, &r);
            assert_eq!(s, split_assign(id, &r));
            counts[Split::ALL.iter().position(|&x| x == s).unwrap()] += 1;
        }
        assert!((counts[0] as i64 - 8000).abs() <= 100, "{counts:?}");
        assert!((counts[1] as i64 - 1000).abs() <= 100, "{counts:?}");
        assert!((counts[2] as i64 - 1000).abs() <= 100, "{counts:?}");
        let all_train = SplitRatios { train: 1.0, val: 0.0, test: 0.0 };
        assert!((0..1000).all(|i| split_assign(i, &all_train) == Split::Train));
        let no_test = SplitRatios { train: 0.5, val: 0.5, test: 0.0 };
        assert!((0..1000).all(|i| split_assign(i, &no_test) != Split::Test));
    }

    #[test]
    fn streams_are_independent_of_order() {
        let cfg = GenConfig { master_seed: 3, ..GenConfig::default() };
        let a: Vec<_> = (0..6).map(|i| plan_sample(&cfg, i).unwrap()).collect();
        let b: Vec<_> = (0..6).rev().map(|i| plan_sample(&cfg, i).unwrap()).collect();
        for (x, y) in a.iter().zip(b.iter().rev()) {
            assert_eq!((x.shape.vertices, x.dpi, x.seed), (y.shape.vertices, y.dpi, y.seed));
        }
        assert_ne!(a[0].shape.vertices, a[1].shape.vertices);
    }

    #[test]
    fn plan_respects_policy() {
        let cfg = GenConfig { master_seed: 11, ..GenConfig::default() };
        for i in 0..200 {
            let p = plan_sample(&cfg, i).unwrap();
            match p.dpi_band {
                DpiBand::High => assert!((250..=300).contains(&p.dpi)),
                DpiBand::Low => assert!((72..=150).contains(&p.dpi)),
            }
            assert!([2, 3, 4].contains(&p.dilation_radius));
            assert!(p.targets.len() >= 5);
        }
    }

    #[test]
    fn slugs() {
        assert_eq!(element_slug(&ElementId::side("A", "B")), "side-AB");
        assert_eq!(element_slug(&ElementId::incircle()), "incircle");
        assert_eq!(sample_id(42), "gf0000042");
    }
}
