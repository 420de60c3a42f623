use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use geomforge::codec::{decode_mask_tokens, encode_mask_tokens, EncodeOptions};
use geomforge::metrics::{evaluate_batch, DEFAULT_BETA};
use geomforge::pipeline::{self, load_config, SEED_ENV};
use geomforge::raster::BinaryMask;
use geomforge::render::emit_tikz_highlight;
use geomforge::scene::ElementId;

#[derive(Parser)]
#[command(name = "geomforge", version, about = "Synthetic geometry diagrams with masks and referring expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset directory.
    Generate(GenerateArgs),
    /// Score predictions against a manifest.
    Eval(EvalArgs),
    /// Mask PNG to a `<seg>` token sequence.
    Encode(EncodeArgs),
    /// Token sequence back to a mask PNG.
    Decode(DecodeArgs),
    /// Render one seeded sample with a target highlighted.
    Preview(PreviewArgs),
    /// Print manifest statistics.
    Inspect(InspectArgs),
}

/// Shared generator settings. Each flag overrides the matching config key.
#[derive(Args)]
struct ConfigArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "count", alias = "sample-count")]
    sample_count: Option<u64>,
    #[arg(long = "seed", alias = "master-seed")]
    master_seed: Option<u64>,
    #[arg(long = "out", alias = "output-dir")]
    output_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    draw_diagonals_prob: Option<f64>,
    #[arg(long)]
    p_drop: Option<f64>,
    /// e.g. "[2, 3, 4]".
    #[arg(long)]
    dilation_choices: Option<String>,
    #[arg(long)]
    high_fraction: Option<f64>,
    /// e.g. "[250, 300]".
    #[arg(long)]
    high_range: Option<String>,
    #[arg(long)]
    low_range: Option<String>,
    #[arg(long)]
    train: Option<f64>,
    #[arg(long)]
    val: Option<f64>,
    #[arg(long)]
    test: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    refine_radius: Option<u8>,
    #[arg(long)]
    emit_tikz: bool,
    /// Any other key, as `dotted.key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let mut o: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        let q = |p: &Option<PathBuf>| p.as_ref().map(|p| format!("{:?}", p.display().to_string()));
        put("sample_count", self.sample_count.map(|v| v.to_string()));
        put("master_seed", self.master_seed.map(|v| v.to_string()));
        put("output_dir", q(&self.output_dir));
        put("workers", self.workers.map(|v| v.to_string()));
        put("tau", self.tau.map(|v| v.to_string()));
        put("draw_diagonals_prob", self.draw_diagonals_prob.map(|v| v.to_string()));
        put("p_drop", self.p_drop.map(|v| v.to_string()));
        put("dilation_choices", self.dilation_choices.clone());
        put("dpi.high_fraction", self.high_fraction.map(|v| v.to_string()));
        put("dpi.high_range", self.high_range.clone());
        put("dpi.low_range", self.low_range.clone());
        put("split.train", self.train.map(|v| v.to_string()));
        put("split.val", self.val.map(|v| v.to_string()));
        put("split.test", self.test.map(|v| v.to_string()));
        put("codec.epsilon", self.epsilon.map(|v| v.to_string()));
        put("codec.refine_radius", self.refine_radius.map(|v| v.to_string()));
        put("emit_tikz", self.emit_tikz.then(|| "true".to_string()));
        for s in &self.set {
            let (k, v) = s.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got {s:?}"))?;
            o.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(o)
    }

    fn load(&self) -> Result<pipeline::GenConfig> {
        let env = std::env::var(SEED_ENV).ok();
        Ok(load_config(self.config.as_deref(), env.as_deref(), &self.overrides()?)?)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Also write timing.json (not reproducible across runs).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Write the full JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    mask: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Skip lattice refinement.
    #[arg(long)]
    plain: bool,
}

#[derive(Args)]
struct DecodeArgs {
    /// File holding the token sequence ("-" for stdin).
    tokens: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct PreviewArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Sample index within the seeded run.
    #[arg(long, default_value_t = 0)]
    index: u64,
    /// Element id such as `side:AB`, `polygon:ABCD` or `incircle`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, short)]
    output: PathBuf,
    /// Also write the highlighted TikZ source here.
    #[arg(long)]
    tikz: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    manifest: PathBuf,
    #[arg(long)]
    json: bool,
}

/// Runs above this resample fraction exit with status 2.
const EXHAUSTION_LIMIT: f64 = 0.01;

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(a) => {
            let cfg = a.config.load()?;
            let summary = pipeline::generate(&cfg)?;
            if a.timing {
                let p = cfg.output_dir.join("timing.json");
                std::fs::write(&p, serde_json::to_string_pretty(&summary.timing)? + "\n").with_context(|| p.display().to_string())?;
            }
            println!(
                "wrote {} samples ({} targets) to {} in {:.1}s",
                summary.records.len(),
                summary.stats.targets,
                cfg.output_dir.display(),
                summary.timing.wall_seconds
            );
            if summary.exhausted_fraction() > EXHAUSTION_LIMIT {
                eprintln!("resampled {} of {} samples (> {:.0}%)", summary.stats.resampled, summary.records.len(), EXHAUSTION_LIMIT * 100.0);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Eval(a) => {
            let report = evaluate_batch(&a.manifest, &a.predictions, a.beta)?;
            print!("{}", report.to_table());
            if let Some(p) = a.json {
                std::fs::write(&p, serde_json::to_string_pretty(&report)? + "\n").with_context(|| p.display().to_string())?;
            }
        }
        Command::Encode(a) => {
            let m = BinaryMask::load_png(&a.mask).with_context(|| a.mask.display().to_string())?;
            let opts = if a.plain { EncodeOptions { epsilon: a.epsilon, ..EncodeOptions::plain() } } else { EncodeOptions { epsilon: a.epsilon, ..EncodeOptions::default() } };
            let text = encode_mask_tokens(&m, &opts);
            match a.output {
                Some(p) => std::fs::write(&p, text + "\n").with_context(|| p.display().to_string())?,
                None => println!("{text}"),
            }
        }
        Command::Decode(a) => {
            let text = if a.tokens == Path::new("-") {
                std::io::read_to_string(std::io::stdin())?
            } else {
                std::fs::read_to_string(&a.tokens).with_context(|| a.tokens.display().to_string())?
            };
            let m = decode_mask_tokens(text.trim(), a.width, a.height)?;
            m.save_png(&a.output).with_context(|| a.output.display().to_string())?;
        }
        Command::Preview(a) => {
            let cfg = a.config.load()?;
            let target: Option<ElementId> = a.target.as_deref().map(str::parse).transpose()?;
            let (img, scene, t) = pipeline::preview(&cfg, a.index, target.as_ref())?;
            img.save_png(&a.output).with_context(|| a.output.display().to_string())?;
            if let Some(p) = a.tikz {
                std::fs::write(&p, emit_tikz_highlight(&scene, &t.element_id)).with_context(|| p.display().to_string())?;
            }
            println!("{} {} {}x{}", scene.kind.as_str(), t.element_id, img.width, img.height);
        }
        Command::Inspect(a) => {
            let report = pipeline::inspect(&a.manifest)?;
            if a.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.to_text());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
