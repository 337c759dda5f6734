//! Acceptance suite: prints one PASS / FAIL / SKIP line per criterion.
//!
//! A failing criterion is reported but, so that `cargo test --workspace`
//! still runs every other suite, only turns into a non-zero exit status when
//! `ACCEPTANCE_STRICT=1` is set.
//!
//! Criteria 1-5 are Monte-Carlo measurements on the (504, 252) regular code
//! in `codes/`; expect a runtime of tens of minutes on one core. Criteria 6-8
//! are exact property checks.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use ldpc_osd::channel::CascadeConfig;
use ldpc_osd::codes::{random_column_weight, random_dense};
use ldpc_osd::osd::{discrepancy, enumerate_candidates};
use ldpc_osd::{
    build_lrb, eliminate, ml_oracle, modulate, osd_decode, parse_alist, rank_by_reliability, run_point,
    sigma2_from_ebn0, transmit, Beta, BinaryMatrix, ChannelConfig, Decoder, DecoderConfig, OsdConfig, Permutation,
    PointResult, SoftInput, SourceMode, StopRule, SystematicEncoder, Variant,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20080;
const MIN_FRAME_ERRORS: u64 = 100;
const MAX_FRAMES: u64 = 3_000_000;
const FER_TARGET: f64 = 1e-3;
const BER_TARGET: f64 = 1e-4;
const STEP_DB: f64 = 0.25;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Pass,
    Fail,
    Skip,
}

struct Report {
    lines: Vec<(Verdict, String)>,
}

impl Report {
    fn record(&mut self, verdict: Verdict, id: &str, text: String) {
        let tag = match verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        };
        let line = format!("{tag} {id}: {text}");
        println!("{line}");
        self.lines.push((verdict, line));
    }

    fn check(&mut self, id: &str, ok: bool, text: String) {
        self.record(if ok { Verdict::Pass } else { Verdict::Fail }, id, text);
    }
}

/// Memoised simulation points; every curve shares the seed, so identical
/// (cascade, Eb/N0) requests are simulated once.
struct Lab {
    h: BinaryMatrix,
    rate: f64,
    cache: HashMap<String, PointResult>,
}

fn label(c: &CascadeConfig) -> String {
    let osd = match c.osd {
        Some(o) => format!("osd p={} beta={}", o.order, o.beta),
        None => "no osd".into(),
    };
    format!("{} I_m={} + {osd}", c.decoder.variant, c.decoder.max_iterations)
}

impl Lab {
    fn point(&mut self, cascade: &CascadeConfig, ebn0_db: f64) -> PointResult {
        let ebn0_db = (ebn0_db * 1e6).round() / 1e6;
        let key = format!("{cascade:?}@{ebn0_db}");
        if let Some(p) = self.cache.get(&key) {
            return *p;
        }
        let channel = ChannelConfig {
            ebn0_db,
            code_rate: self.rate,
            seed: SEED,
            source_mode: SourceMode::AllZero,
        };
        let stop = StopRule {
            min_frame_errors: MIN_FRAME_ERRORS,
            max_frames: MAX_FRAMES,
        };
        let p = run_point(&self.h, cascade, &channel, &stop).expect("simulation point");
        let s = &p.stats;
        println!(
            "  [{:<36}] {:>5.2} dB  frames {:>8}  fe {:>4}  fer {:.3e}  ber {:.3e}  A_ni {:>6.3}  osd {:>5}  {:>6.1}s",
            label(cascade),
            ebn0_db,
            s.frames,
            s.frame_errors,
            s.fer(),
            s.ber(),
            s.avg_iterations(),
            s.osd_invocations,
            p.wall_seconds
        );
        self.cache.insert(key, p);
        p
    }

    /// Steps along the Eb/N0 axis until the FER target is bracketed.
    fn curve(&mut self, cascade: &CascadeConfig, start_db: f64) -> Vec<PointResult> {
        let mut pts = vec![self.point(cascade, start_db)];
        while pts[0].stats.fer() < FER_TARGET && pts.len() < 12 {
            let x = pts[0].ebn0_db - STEP_DB;
            pts.insert(0, self.point(cascade, x));
        }
        while pts.last().unwrap().stats.fer() >= FER_TARGET && pts.len() < 12 {
            let x = pts.last().unwrap().ebn0_db + STEP_DB;
            pts.push(self.point(cascade, x));
        }
        pts
    }
}

/// Eb/N0 where `metric` crosses `target`, by linear interpolation of
/// log10(metric) between the bracketing grid points.
fn crossing(points: &[PointResult], metric: impl Fn(&PointResult) -> f64, target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (metric(&w[0]), metric(&w[1]));
        if a >= target && b < target && b > 0.0 {
            let (la, lb, lt) = (a.log10(), b.log10(), target.log10());
            Some(w[0].ebn0_db + (w[1].ebn0_db - w[0].ebn0_db) * (la - lt) / (la - lb))
        } else {
            None
        }
    })
}

fn under_sampled(points: &[PointResult]) -> usize {
    points
        .iter()
        .filter(|p| p.stats.frame_errors < MIN_FRAME_ERRORS)
        .count()
}

fn cascade(variant: Variant, iters: usize, order: Option<usize>) -> CascadeConfig {
    CascadeConfig {
        decoder: DecoderConfig::new(variant, iters),
        osd: order.map(|p| OsdConfig::new(p, Beta::Count(1))),
    }
}

fn gap_text(base: Option<f64>, cand: Option<f64>) -> (Option<f64>, String) {
    match (base, cand) {
        (Some(b), Some(c)) => (
            Some(b - c),
            format!("{:.3} dB (baseline {b:.3} dB, cascade {c:.3} dB)", b - c),
        ),
        _ => (
            None,
            format!("crossing not bracketed (baseline {base:?}, cascade {cand:?})"),
        ),
    }
}

fn monte_carlo(report: &mut Report) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../codes/regular_504_252.alist");
    let h = parse_alist(&std::fs::read_to_string(&path).expect("code file")).expect("alist");
    let rate = (h.cols() - h.rows()) as f64 / h.cols() as f64;
    println!(
        "code: {} ({}x{}), rate {rate}, seed {SEED}, >= {MIN_FRAME_ERRORS} frame errors per point",
        path.file_name().unwrap().to_string_lossy(),
        h.rows(),
        h.cols()
    );
    let mut lab = Lab {
        h,
        rate,
        cache: HashMap::new(),
    };

    let bp20 = cascade(Variant::BpLlr, 20, None);
    let bp100 = cascade(Variant::BpLlr, 100, None);
    let osd: Vec<CascadeConfig> = (0..=2).map(|p| cascade(Variant::BpLlr, 20, Some(p))).collect();

    let c_bp20 = lab.curve(&bp20, 3.0);
    let c_bp100 = lab.curve(&bp100, 2.75);
    let c_osd: Vec<Vec<PointResult>> = osd
        .iter()
        .zip([2.75, 2.5, 2.25])
        .map(|(c, start)| lab.curve(c, start))
        .collect();
    let fer = |p: &PointResult| p.stats.fer();
    let sparse =
        under_sampled(&c_bp20) + under_sampled(&c_bp100) + c_osd.iter().map(|c| under_sampled(c)).sum::<usize>();
    if sparse > 0 {
        println!("note: {sparse} point(s) hit the frame cap before {MIN_FRAME_ERRORS} errors");
    }

    // 1: order-0 cascade vs BP(20)
    let (gap, text) = gap_text(crossing(&c_bp20, fer, FER_TARGET), crossing(&c_osd[0], fer, FER_TARGET));
    report.check(
        "C1 order-0 gain over BP(I_m=20) at FER 1e-3",
        gap.is_some_and(|g| (0.35..=0.65).contains(&g)),
        format!("{text}; accept [0.35, 0.65]"),
    );

    // 2: order-1 / order-2 vs BP(100)
    let x100 = crossing(&c_bp100, fer, FER_TARGET);
    for (p, min_gap) in [(1usize, 0.2), (2, 0.3)] {
        let (gap, text) = gap_text(x100, crossing(&c_osd[p], fer, FER_TARGET));
        report.check(
            &format!("C2 order-{p} gain over BP(I_m=100) at FER 1e-3"),
            gap.is_some_and(|g| g >= min_gap),
            format!("{text}; accept >= {min_gap}"),
        );
    }

    // 3: the four metric variants agree for p = 0 and p = 2
    let variants = [
        Variant::BpLlr,
        Variant::BpProb,
        Variant::MinSumNormalized,
        Variant::MinSumOffset,
    ];
    let mut iteration_checks: Vec<(CascadeConfig, f64)> = Vec::new();
    for (p, grid) in [(0usize, [2.25, 2.5, 2.75]), (2, [2.0, 2.25, 2.5])] {
        let mut worst = String::new();
        let mut ok = true;
        for &x in &grid {
            let pts: Vec<(Variant, PointResult)> = variants
                .iter()
                .map(|&v| (v, lab.point(&cascade(v, 20, Some(p)), x)))
                .collect();
            let cis: Vec<(f64, f64)> = pts.iter().map(|(_, pt)| pt.stats.fer_interval(Z95)).collect();
            let max_lo = cis.iter().map(|c| c.0).fold(0.0, f64::max);
            let min_hi = cis.iter().map(|c| c.1).fold(1.0, f64::min);
            // pairwise overlap of intervals <=> max lower bound <= min upper bound
            if max_lo > min_hi {
                ok = false;
                worst += &format!(" {x} dB: max lower {max_lo:.3e} > min upper {min_hi:.3e};");
            }
            for &v in &variants {
                iteration_checks.push((cascade(v, 20, Some(p)), x));
            }
        }
        let detail = if ok {
            "all 95% Wilson intervals overlap".to_string()
        } else {
            worst
        };
        report.check(
            &format!("C3 metric-variant equivalence, p={p}"),
            ok,
            format!("grid {grid:?} dB: {detail}"),
        );
    }

    // 4: average iterations of every I_m=20 cascade below BP(100) wherever FER <= 1e-2
    for (c, pts) in osd.iter().zip(&c_osd) {
        for pt in pts {
            iteration_checks.push((*c, pt.ebn0_db));
        }
    }
    let mut compared = 0;
    let mut violations = Vec::new();
    for (c, x) in iteration_checks {
        let pt = lab.point(&c, x);
        if pt.stats.fer() > 1e-2 {
            continue;
        }
        let base = lab.point(&bp100, x);
        compared += 1;
        if pt.stats.avg_iterations() >= base.stats.avg_iterations() {
            violations.push(format!(
                "{} at {x} dB: {:.3} vs {:.3}",
                label(&c),
                pt.stats.avg_iterations(),
                base.stats.avg_iterations()
            ));
        }
    }
    report.check(
        "C4 cascade A_ni below BP(I_m=100) where FER <= 1e-2",
        compared > 0 && violations.is_empty(),
        if violations.is_empty() {
            format!("{compared} (cascade, Eb/N0) points compared, all strictly below")
        } else {
            format!("{} of {compared} violate: {}", violations.len(), violations.join("; "))
        },
    );

    // 5: BER gap (optional)
    let ber = |p: &PointResult| p.stats.ber();
    let (b20, b2) = (crossing(&c_bp20, ber, BER_TARGET), crossing(&c_osd[2], ber, BER_TARGET));
    match (b20, b2) {
        (Some(_), Some(_)) => {
            let (gap, text) = gap_text(b20, b2);
            report.check(
                "C5 order-2 BER gain over BP(I_m=20) at BER 1e-4",
                gap.is_some_and(|g| g >= 0.3),
                format!("{text}; accept >= 0.3"),
            );
        }
        _ => report.record(
            Verdict::Skip,
            "C5 order-2 BER gain over BP(I_m=20) at BER 1e-4",
            "BER 1e-4 not bracketed by the FER-driven grids".into(),
        ),
    }
}

fn full_rank_code(rows: usize, cols: usize, mut seed: u64) -> BinaryMatrix {
    loop {
        let h = random_dense(rows, cols, seed);
        if eliminate(&h, &Permutation::identity(cols)).rank() == rows {
            return h;
        }
        seed += 1;
    }
}

fn ml_equivalence(report: &mut Report) {
    let h = full_rank_code(8, 16, 16);
    let enc = SystematicEncoder::new(&h).unwrap();
    let sigma2 = sigma2_from_ebn0(2.0, 0.5).unwrap();
    let cfg = OsdConfig::new(8, Beta::All);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    let frames = 10_000;
    for _ in 0..frames {
        let msg: Vec<u8> = (0..8).map(|_| rng.gen_range(0..2)).collect();
        let y = transmit(&modulate(&enc.encode(&msg).unwrap()), sigma2, &mut rng);
        // I_m = 0: the reliability is the channel value itself
        let hd: Vec<u8> = y.iter().map(|&v| (v > 0.0) as u8).collect();
        let ordering = rank_by_reliability(&y);
        let osd = osd_decode(&h, &y, &hd, &ordering, &cfg).unwrap();
        if osd.codeword != ml_oracle(&h, &y).unwrap() {
            mismatches += 1;
        }
    }
    report.check(
        "C6 OSD(p=8, beta=all) equals ML on a (16,8) code",
        mismatches == 0,
        format!("{mismatches} mismatches in {frames} frames at 2 dB"),
    );
}

fn selection_equivalence(report: &mut Report) {
    let h = full_rank_code(16, 32, 32);
    let sigma2 = sigma2_from_ebn0(1.0, 0.5).unwrap();
    let mut decoder = Decoder::new(&h, DecoderConfig::new(Variant::BpLlr, 5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = modulate(&[0; 32]);
    let frames = 1000;
    let mut mismatches = 0;
    for f in 0..frames {
        let y = transmit(&x, sigma2, &mut rng);
        let out = decoder.decode(SoftInput::new(&y, sigma2)).unwrap();
        let ordering = rank_by_reliability(&out.reliability);
        let cfg = OsdConfig::new(1 + f % 3, Beta::All);
        let lrb = build_lrb(&h, &ordering, &out.hard_decision).unwrap();
        // direct argmin of D over every candidate, first index on ties
        let mut best: Option<(f64, Vec<u8>)> = None;
        for cand in enumerate_candidates(&lrb, &ordering, &cfg) {
            let e = lrb.error_pattern(&cand.info_support, &cand.dependent_part);
            let d = discrepancy(&y, &e);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, e));
            }
        }
        let osd = osd_decode(&h, &y, &out.hard_decision, &ordering, &cfg).unwrap();
        if osd.selection.error_pattern != best.unwrap().1 {
            mismatches += 1;
        }
    }
    report.check(
        "C7 two-stage selection with beta=all equals direct argmin D on a (32,16) code",
        mismatches == 0,
        format!("{mismatches} mismatches in {frames} frames, p in 1..=3"),
    );
}

fn structural(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures: Vec<String> = Vec::new();

    // osd_decode output always satisfies every check
    let codes: Vec<BinaryMatrix> = (0..20)
        .map(|s| random_column_weight(rng.gen_range(8..32), 48, 3, 100 + s))
        .collect();
    let mut bad = 0;
    for i in 0..10_000 {
        let h = &codes[i % codes.len()];
        let n = h.cols();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let hd: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let rel: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let beta = if rng.gen_bool(0.5) {
            Beta::All
        } else {
            Beta::Count(rng.gen_range(1..5))
        };
        let cfg = OsdConfig::new(rng.gen_range(0..3), beta);
        let out = osd_decode(h, &y, &hd, &rank_by_reliability(&rel), &cfg).unwrap();
        bad += usize::from(!h.is_codeword(&out.codeword));
    }
    if bad > 0 {
        failures.push(format!("{bad}/10000 OSD outputs with nonzero syndrome"));
    }

    // elimination identity block and permutation round trip
    let mut bad = 0;
    for trial in 0..1000u64 {
        let m = rng.gen_range(1..=64);
        let n = rng.gen_range(m..=128);
        let h = random_dense(m, n, 5000 + trial);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let order = Permutation::new(order).unwrap();
        let res = eliminate(&h, &order);
        let r = res.rank();
        let identity_ok = res
            .reduced_rows()
            .iter()
            .enumerate()
            .all(|(i, row)| (0..r).all(|t| row.get(t) == (i == t)));
        let v: Vec<usize> = (0..n).collect();
        let round_trip =
            res.combined().unapply(&res.combined().apply(&v)) == v && res.combined() == &order.then(res.fixup());
        bad += usize::from(!(identity_ok && round_trip));
    }
    if bad > 0 {
        failures.push(format!("{bad}/1000 eliminations break an invariant"));
    }

    // decoder equivalences on a small code
    let h = ldpc_osd::codes::regular_without_4_cycles(96, 3, 6, 7, 10_000).expect("small code");
    let sigma2 = sigma2_from_ebn0(2.0, 0.5).unwrap();
    let x = modulate(&[0; 96]);
    let mut llr = Decoder::new(&h, DecoderConfig::new(Variant::BpLlr, 20)).unwrap();
    let mut prob = Decoder::new(&h, DecoderConfig::new(Variant::BpProb, 20)).unwrap();
    let zero_alpha = |v| DecoderConfig {
        alpha: 0.0,
        ..DecoderConfig::new(v, 20)
    };
    let mut llr0 = Decoder::new(&h, zero_alpha(Variant::BpLlr)).unwrap();
    let mut nms0 = Decoder::new(&h, zero_alpha(Variant::MinSumNormalized)).unwrap();
    let mut nms = Decoder::new(&h, DecoderConfig::new(Variant::MinSumNormalized, 20)).unwrap();
    let (mut bp_bad, mut alpha_bad, mut scale_bad) = (0, 0, 0);
    for _ in 0..1000 {
        let y = transmit(&x, sigma2, &mut rng);
        let a = llr.decode(SoftInput::new(&y, sigma2)).unwrap();
        let b = prob.decode(SoftInput::new(&y, sigma2)).unwrap();
        bp_bad += usize::from((a.tentative, a.iterations_used) != (b.tentative, b.iterations_used));

        for dec in [&mut llr0, &mut nms0] {
            let o = dec.decode_traced(SoftInput::new(&y, sigma2)).unwrap();
            alpha_bad += usize::from(o.trace.as_ref().unwrap().last() != Some(&o.accumulated));
        }

        let c = rng.gen_range(0.1..10.0);
        let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
        let s0 = nms.decode(SoftInput::new(&y, 1.0)).unwrap();
        let s1 = nms.decode(SoftInput::new(&scaled, 1.0)).unwrap();
        scale_bad += usize::from((s0.hard_decision, s0.iterations_used) != (s1.hard_decision, s1.iterations_used));
    }
    for (n, what) in [
        (bp_bad, "bp-llr/bp-prob decision"),
        (alpha_bad, "alpha=0 accumulation"),
        (scale_bad, "min-sum scale"),
    ] {
        if n > 0 {
            failures.push(format!("{n} {what} mismatches"));
        }
    }

    report.check(
        "C8 structural suite",
        failures.is_empty(),
        if failures.is_empty() {
            "1e4 OSD syndromes, 1e3 eliminations, 1e3 frames each of bp-llr/bp-prob, alpha=0 and min-sum scaling".into()
        } else {
            failures.join("; ")
        },
    );
}

fn main() {
    let started = Instant::now();
    let mut report = Report { lines: Vec::new() };
    ml_equivalence(&mut report);
    selection_equivalence(&mut report);
    structural(&mut report);
    monte_carlo(&mut report);

    println!("\n== acceptance summary ({:.0} s) ==", started.elapsed().as_secs_f64());
    let mut lines = report.lines.clone();
    lines.sort_by(|a, b| a.1[5..].cmp(&b.1[5..]));
    for (_, line) in &lines {
        println!("{line}");
    }
    let failed = report.lines.iter().filter(|(v, _)| *v == Verdict::Fail).count();
    println!("acceptance: {failed} of {} criteria failed", report.lines.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
