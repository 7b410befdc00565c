use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use blursynth::dataset::{load_manifest, run_batch, BatchOptions};
use blursynth::io::{list_image_files, read_raw, BitDepth};
use blursynth::noise::{calibrate_beta1_with, calibrate_beta2, calibrate::DEFAULT_PATCH};
use blursynth::pipeline::{preset, IspSource, PRESET_NAMES};
use blursynth::{IspConfig, PipelineConfig};
use clap::{Args, Parser, Subcommand};
use log::info;

#[derive(Parser)]
#[command(name = "blursynth", version, about = "Synthesize realistic blurred/sharp training pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate blurred images for every scene in a dataset manifest.
    Synth(SynthArgs),
    /// Estimate sensor noise parameters from flat-field and dark RAW frames.
    Calibrate(CalibrateArgs),
    /// Inspect the built-in presets.
    #[command(subcommand)]
    Presets(PresetsCommand),
}

#[derive(Args)]
struct SynthArgs {
    /// Dataset manifest (TOML).
    #[arg(long)]
    manifest: PathBuf,
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// Pipeline config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Camera ISP config (TOML), used by Poisson-Gaussian noise.
    #[arg(long)]
    isp_config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "BLURSYNTH_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16, value_parser = parse_bit_depth)]
    bit_depth: u8,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Directory of flat-field RAW PNGs at several exposure levels.
    #[arg(long)]
    flat_dir: PathBuf,
    /// Directory of dark RAW PNGs.
    #[arg(long)]
    dark_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PATCH)]
    patch: usize,
}

#[derive(Subcommand)]
enum PresetsCommand {
    /// Print the preset names.
    List,
    /// Print a preset as a pipeline config file.
    Dump { name: String },
}

fn parse_bit_depth(s: &str) -> Result<u8, String> {
    match s {
        "8" => Ok(8),
        "16" => Ok(16),
        _ => Err("must be 8 or 16".into()),
    }
}

fn synth(args: SynthArgs) -> Result<bool> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => PipelineConfig::load(path)?,
        (None, None) => bail!("either --preset or --config is required"),
    };
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    let isp = match (&args.isp_config, cfg.isp_source) {
        (Some(path), _) => Some(IspConfig::load(path)?),
        (None, IspSource::Default) => Some(IspConfig::default()),
        (None, IspSource::Provided) => bail!(
            "config `{}` needs a camera ISP; pass --isp-config",
            cfg.preset.as_deref().unwrap_or("<file>")
        ),
    };
    let manifest = load_manifest(&args.manifest)?;
    let options = BatchOptions {
        workers: args.workers,
        bit_depth: BitDepth::try_from(args.bit_depth)?,
    };
    info!("{} scenes, {} workers", manifest.len(), args.workers);
    let report = run_batch(&manifest, &cfg, isp.as_ref(), &args.out, options)?;
    for f in &report.failures {
        eprintln!("failed: {}: {}", f.scene_id, f.message);
    }
    println!(
        "{} written, {} failed -> {}",
        report.records.len(),
        report.failures.len(),
        args.out.display()
    );
    Ok(report.is_success())
}

fn read_raw_dir(dir: &Path) -> Result<Vec<blursynth::Image<blursynth::BayerRaw>>> {
    let files = list_image_files(dir)?;
    if files.is_empty() {
        bail!("no images in {}", dir.display());
    }
    files
        .iter()
        .map(|p| read_raw(p).with_context(|| format!("reading {}", p.display())))
        .collect()
}

fn calibrate(args: CalibrateArgs) -> Result<()> {
    let flats = read_raw_dir(&args.flat_dir)?;
    let darks = read_raw_dir(&args.dark_dir)?;
    let beta1 = calibrate_beta1_with(&flats, args.patch)?;
    let beta2 = calibrate_beta2(&darks)?;
    println!("beta1 = {beta1:e}");
    println!("beta2 = {beta2:e}");
    Ok(())
}

fn presets(cmd: PresetsCommand) -> Result<()> {
    match cmd {
        PresetsCommand::List => {
            for name in PRESET_NAMES {
                println!("{name:<20} {}", preset(name)?.table_row());
            }
        }
        PresetsCommand::Dump { name } => print!("{}", preset(&name)?.to_toml_string()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => synth(args),
        Command::Calibrate(args) => calibrate(args).map(|()| true),
        Command::Presets(cmd) => presets(cmd).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
