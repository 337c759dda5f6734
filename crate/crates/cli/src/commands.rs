use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use ldpc_osd::channel::CascadeConfig;
use ldpc_osd::{
    eliminate, osd_decode, parse_alist, rank_by_reliability, run_point, sigma2_from_ebn0, BinaryMatrix, ChannelConfig,
    Decoder, Permutation, PointResult, SoftInput,
};

use crate::campaign::{resolve_decoder, Campaign, DecoderFileValues, OutputFormat, SimulateArgs};
use crate::{CodeInfoArgs, DecodeOneArgs};

/// One output row; field order is the CSV column order.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Row {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub avg_iterations: f64,
    pub osd_invocations: u64,
    pub osd_rescues: u64,
    pub wall_seconds: f64,
}

impl Row {
    fn new(point: &PointResult, timing: bool) -> Self {
        let s = &point.stats;
        Self {
            ebn0_db: point.ebn0_db,
            frames: s.frames,
            frame_errors: s.frame_errors,
            bit_errors: s.bit_errors,
            fer: s.fer(),
            ber: s.ber(),
            avg_iterations: s.avg_iterations(),
            osd_invocations: s.osd_invocations,
            osd_rescues: s.osd_rescues,
            wall_seconds: if timing { point.wall_seconds } else { 0.0 },
        }
    }
}

fn load_code(path: &Path) -> Result<BinaryMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading code {}", path.display()))?;
    parse_alist(&text).with_context(|| format!("parsing alist {}", path.display()))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let campaign = args.resolve()?;
    let h = load_code(&campaign.code)?;
    if h.rows() >= h.cols() {
        bail!(
            "code has no information bits: {} checks for {} bits",
            h.rows(),
            h.cols()
        );
    }
    let rate = (h.cols() - h.rows()) as f64 / h.cols() as f64;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(campaign.threads)
        .build()
        .context("building worker pool")?;

    let cascade = CascadeConfig {
        decoder: campaign.decoder,
        osd: campaign.osd,
    };
    let mut grid = campaign.grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut writer = RowWriter::open(&campaign)?;
    for ebn0_db in grid {
        let channel = ChannelConfig {
            ebn0_db,
            code_rate: rate,
            seed: campaign.seed,
            source_mode: campaign.source,
        };
        let point = pool.install(|| run_point(&h, &cascade, &channel, &campaign.stop))?;
        log::info!(
            "{:.3} dB: {} frames, {} errors, fer {:.3e}",
            ebn0_db,
            point.stats.frames,
            point.stats.frame_errors,
            point.stats.fer()
        );
        writer.push(Row::new(&point, campaign.timing))?;
    }
    writer.finish()
}

/// Streams CSV rows as points finish; JSON is written once at the end.
struct RowWriter {
    format: OutputFormat,
    csv: Option<csv::Writer<Box<dyn Write>>>,
    json_rows: Vec<Row>,
    json_out: Option<Box<dyn Write>>,
}

impl RowWriter {
    fn open(c: &Campaign) -> Result<Self> {
        let (sink, had_content): (Box<dyn Write>, bool) = match &c.out {
            Some(path) => {
                let had_content = c.append && std::fs::metadata(path).map(|m| m.len() > 0).unwrap_or(false);
                let file = OpenOptions::new()
                    .create(true)
                    .write(true)
                    .append(c.append)
                    .truncate(!c.append)
                    .open(path)
                    .with_context(|| format!("opening output {}", path.display()))?;
                (Box::new(file), had_content)
            }
            None => (Box::new(io::stdout()), false),
        };
        Ok(match c.format {
            OutputFormat::Csv => Self {
                format: c.format,
                csv: Some(csv::WriterBuilder::new().has_headers(!had_content).from_writer(sink)),
                json_rows: Vec::new(),
                json_out: None,
            },
            OutputFormat::Json => Self {
                format: c.format,
                csv: None,
                json_rows: Vec::new(),
                json_out: Some(sink),
            },
        })
    }

    fn push(&mut self, row: Row) -> Result<()> {
        match self.format {
            OutputFormat::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.serialize(&row)?;
                w.flush()?;
            }
            OutputFormat::Json => self.json_rows.push(row),
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        if let Some(mut out) = self.json_out.take() {
            serde_json::to_writer_pretty(&mut out, &self.json_rows)?;
            writeln!(out)?;
            out.flush()?;
        }
        if let Some(mut w) = self.csv.take() {
            w.flush()?;
        }
        Ok(())
    }
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .with_context(|| format!("invalid number {tok:?} in {}", path.display()))
        })
        .collect()
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn decode_one(args: &DecodeOneArgs) -> Result<()> {
    let h = load_code(&args.code)?;
    let y = read_vector(&args.y)?;
    if y.len() != h.cols() {
        bail!(
            "received vector has {} values but the code length is {}",
            y.len(),
            h.cols()
        );
    }
    let (decoder_cfg, osd_cfg) = resolve_decoder(&args.decoder, None, DecoderFileValues::default())?;
    let sigma2 = match (args.sigma2, args.ebn0) {
        (Some(s), _) => s,
        (None, Some(db)) => sigma2_from_ebn0(db, (h.cols() - h.rows()) as f64 / h.cols() as f64)?,
        (None, None) if decoder_cfg.variant.needs_noise_variance() => {
            bail!(
                "{} needs the noise variance: pass --sigma2 or --ebn0",
                decoder_cfg.variant
            )
        }
        (None, None) => 1.0,
    };

    let mut decoder = Decoder::new(&h, decoder_cfg)?;
    let outcome = decoder.decode(SoftInput::new(&y, sigma2))?;
    let mut out = io::stdout().lock();
    writeln!(out, "decoder: {}", decoder_cfg.variant)?;
    writeln!(out, "converged: {}", outcome.converged)?;
    writeln!(out, "iterations: {}", outcome.iterations_used)?;

    let codeword = match (osd_cfg, outcome.converged) {
        (Some(cfg), false) => {
            let ordering = rank_by_reliability(&outcome.reliability);
            let osd = osd_decode(&h, &y, &outcome.hard_decision, &ordering, &cfg)?;
            writeln!(out, "osd_invoked: true")?;
            writeln!(out, "osd_order: {}", osd.order)?;
            writeln!(out, "osd_beta: {}", cfg.beta)?;
            writeln!(out, "osd_rank: {}", osd.rank)?;
            writeln!(out, "osd_candidates: {}", osd.selection.candidates)?;
            writeln!(out, "osd_selected_index: {}", osd.selection.index)?;
            writeln!(out, "osd_weight_metric: {}", osd.selection.weight_metric)?;
            writeln!(out, "osd_discrepancy: {}", osd.selection.discrepancy)?;
            osd.codeword
        }
        _ => {
            writeln!(out, "osd_invoked: false")?;
            outcome.tentative
        }
    };
    writeln!(out, "syndrome_zero: {}", h.is_codeword(&codeword))?;
    writeln!(out, "codeword: {}", bits(&codeword))?;
    Ok(())
}

fn profile(degrees: &[usize]) -> String {
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in degrees {
        *hist.entry(d).or_default() += 1;
    }
    hist.iter()
        .map(|(d, n)| format!("{d}:{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn code_info(args: &CodeInfoArgs) -> Result<()> {
    let h = load_code(&args.code)?;
    let rank = eliminate(&h, &Permutation::identity(h.cols())).rank();
    let mut out = io::stdout().lock();
    writeln!(out, "N: {}", h.cols())?;
    writeln!(out, "M: {}", h.rows())?;
    writeln!(out, "K: {}", h.cols().saturating_sub(h.rows()))?;
    writeln!(out, "rank: {rank}")?;
    writeln!(out, "dimension: {}", h.cols() - rank)?;
    writeln!(out, "edges: {}", h.nnz())?;
    writeln!(out, "column degrees (degree:count): {}", profile(&h.col_degrees()))?;
    writeln!(out, "row degrees (degree:count): {}", profile(&h.row_degrees()))?;
    if rank < h.rows() {
        writeln!(out, "warning: H is rank deficient ({rank} < {} rows)", h.rows())?;
        log::warn!("rank-deficient parity-check matrix: rank {rank} < {}", h.rows());
    }
    Ok(())
}
