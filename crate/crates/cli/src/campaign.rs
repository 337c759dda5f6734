//! Campaign settings: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use ldpc_osd::{Beta, DecoderConfig, OsdConfig, SourceMode, StopRule, Variant};

/// Decoder and OSD flags shared by `simulate` and `decode-one`.
#[derive(Args, Debug, Clone, Default)]
pub struct DecoderArgs {
    /// Iterative decoder: bp-llr, bp-prob, nms or oms.
    #[arg(long)]
    pub decoder: Option<String>,
    /// Maximum number of iterations I_m.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Weight factor of the accumulated reliability metric.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Normalization factor of normalized min-sum.
    #[arg(long = "norm-factor")]
    pub norm_factor: Option<f64>,
    /// Offset of offset min-sum.
    #[arg(long)]
    pub offset: Option<f64>,
    /// OSD order p, or "none" to disable the OSD stage.
    #[arg(long = "osd-order")]
    pub osd_order: Option<String>,
    /// Number of W_s survivors, or "all".
    #[arg(long = "osd-beta")]
    pub osd_beta: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SimulateArgs {
    /// TOML file with the same keys as the flags (underscores for dashes).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parity-check matrix in alist format.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// Eb/N0 grid in dB as START:STOP:STEP (inclusive).
    #[arg(long)]
    pub snr: Option<String>,
    #[arg(long = "min-frame-errors")]
    pub min_frame_errors: Option<u64>,
    #[arg(long = "max-frames")]
    pub max_frames: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Transmitted words: zero or random.
    #[arg(long)]
    pub source: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Append CSV rows to an existing file, writing the header only if the
    /// file is empty.
    #[arg(long)]
    pub append: bool,
    /// Write 0 in the wall_seconds column so reruns are byte-identical.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
}

/// Keys accepted in a campaign file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    code: Option<PathBuf>,
    decoder: Option<String>,
    iters: Option<usize>,
    alpha: Option<f64>,
    norm_factor: Option<f64>,
    offset: Option<f64>,
    osd_order: Option<toml::Value>,
    osd_beta: Option<toml::Value>,
    snr: Option<String>,
    min_frame_errors: Option<u64>,
    max_frames: Option<u64>,
    seed: Option<u64>,
    source: Option<String>,
    out: Option<PathBuf>,
    format: Option<String>,
    threads: Option<usize>,
}

fn value_to_string(v: toml::Value) -> String {
    match v {
        toml::Value::String(s) => s,
        other => other.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A fully resolved simulation campaign.
#[derive(Clone, Debug)]
pub struct Campaign {
    pub code: PathBuf,
    pub decoder: DecoderConfig,
    pub osd: Option<OsdConfig>,
    pub grid: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub source: SourceMode,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: usize,
    pub append: bool,
    pub timing: bool,
}

/// Parses `START:STOP:STEP` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("invalid SNR grid {spec:?}"))?;
    let (start, stop, step) = match nums[..] {
        [single] => (single, single, 1.0),
        [start, stop, step] => (start, stop, step),
        _ => bail!("SNR grid must be START:STOP:STEP, got {spec:?}"),
    };
    if step.is_nan() || step <= 0.0 {
        bail!("SNR grid step must be positive, got {step}");
    }
    if stop < start {
        bail!("SNR grid is empty: stop {stop} < start {start}");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // round away accumulation noise so grid values print cleanly
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

pub fn parse_source(s: &str) -> Result<SourceMode> {
    match s {
        "zero" => Ok(SourceMode::AllZero),
        "random" => Ok(SourceMode::RandomCodeword),
        other => bail!("unknown source {other:?}; expected zero or random"),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => bail!("unknown format {other:?}; expected csv or json"),
    }
}

/// Resolves decoder/OSD settings; `file` values fill gaps left by flags.
pub fn resolve_decoder(
    args: &DecoderArgs,
    file_decoder: Option<String>,
    file: DecoderFileValues,
) -> Result<(DecoderConfig, Option<OsdConfig>)> {
    let defaults = DecoderConfig::default();
    let variant = match args.decoder.clone().or(file_decoder) {
        Some(v) => v.parse::<Variant>()?,
        None => defaults.variant,
    };
    let decoder = DecoderConfig {
        variant,
        max_iterations: args.iters.or(file.iters).unwrap_or(defaults.max_iterations),
        alpha: args.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        normalization_factor: args
            .norm_factor
            .or(file.norm_factor)
            .unwrap_or(defaults.normalization_factor),
        offset: args.offset.or(file.offset).unwrap_or(defaults.offset),
    };
    decoder.validate()?;

    let order = args.osd_order.clone().or(file.osd_order);
    let osd = match order.as_deref() {
        None | Some("none") | Some("off") => None,
        Some(p) => {
            let order: usize = p.parse().with_context(|| format!("invalid OSD order {p:?}"))?;
            let beta = match args.osd_beta.clone().or(file.osd_beta) {
                Some(b) => b.parse::<Beta>()?,
                None => Beta::Count(1),
            };
            let cfg = OsdConfig::new(order, beta);
            cfg.validate()?;
            Some(cfg)
        }
    };
    Ok((decoder, osd))
}

/// Decoder-related values read from a campaign file.
#[derive(Default)]
pub struct DecoderFileValues {
    pub iters: Option<usize>,
    pub alpha: Option<f64>,
    pub norm_factor: Option<f64>,
    pub offset: Option<f64>,
    pub osd_order: Option<String>,
    pub osd_beta: Option<String>,
}

impl SimulateArgs {
    pub fn resolve(&self) -> Result<Campaign> {
        let file = match &self.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let (decoder, osd) = resolve_decoder(
            &self.decoder,
            file.decoder,
            DecoderFileValues {
                iters: file.iters,
                alpha: file.alpha,
                norm_factor: file.norm_factor,
                offset: file.offset,
                osd_order: file.osd_order.map(value_to_string),
                osd_beta: file.osd_beta.map(value_to_string),
            },
        )?;
        let code = self
            .code
            .clone()
            .or(file.code)
            .context("no code given; pass --code PATH or set `code` in the config file")?;
        let grid_spec = self
            .snr
            .clone()
            .or(file.snr)
            .context("no SNR grid given; pass --snr START:STOP:STEP")?;
        let defaults = StopRule::default();
        let stop = StopRule {
            min_frame_errors: self
                .min_frame_errors
                .or(file.min_frame_errors)
                .unwrap_or(defaults.min_frame_errors),
            max_frames: self.max_frames.or(file.max_frames).unwrap_or(defaults.max_frames),
        };
        if stop.max_frames == 0 {
            bail!("max-frames must be positive");
        }
        let threads = self
            .threads
            .or(file.threads)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if threads == 0 {
            bail!("threads must be positive");
        }
        Ok(Campaign {
            code,
            decoder,
            osd,
            grid: parse_grid(&grid_spec)?,
            stop,
            seed: self.seed.or(file.seed).unwrap_or(1),
            source: parse_source(self.source.as_deref().or(file.source.as_deref()).unwrap_or("zero"))?,
            out: self.out.clone().or(file.out),
            format: parse_format(self.format.as_deref().or(file.format.as_deref()).unwrap_or("csv"))?,
            threads,
            append: self.append,
            timing: !self.no_timing,
        })
    }
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
