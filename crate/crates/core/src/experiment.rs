//! Occlusion-rate sweep comparing bidirectional and single-direction matching.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{evaluate, trajectories_from_outputs, EvalReport, DEFAULT_IOU_THRESHOLD};
use crate::simulator::{apply_occlusion, generate, perturb, NoiseConfig, OcclusionConfig, ScenarioConfig};
use crate::tracker::track_sequence;
use crate::types::{MatchMode, TrackerConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// The scenario seed is replaced by each entry of `seeds`.
    pub scenario: ScenarioConfig,
    pub noise: NoiseConfig,
    pub duration_range: (u32, u32),
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
    /// `mode` is overridden per run.
    pub tracker: TrackerConfig,
    pub iou_threshold: f64,
}

impl SweepConfig {
    pub fn new(scenario: ScenarioConfig, noise: NoiseConfig, duration_range: (u32, u32)) -> Self {
        Self {
            scenario,
            noise,
            duration_range,
            rates: vec![0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
            seeds: (1..=10).collect(),
            tracker: TrackerConfig::default(),
            iou_threshold: DEFAULT_IOU_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rate: f64,
    pub mode: MatchMode,
    /// Micro-averaged over seeds.
    pub report: EvalReport,
    /// Masked fraction of GT boxes over all seeds.
    pub realized_rate: f64,
}

/// Mixes a seed so the noise and occlusion streams differ from the scene's.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct SeedResult {
    /// Indexed `[rate][mode]`, bidirectional first.
    reports: Vec<[EvalReport; 2]>,
    masked: Vec<usize>,
    gt_boxes: usize,
}

fn run_seed(cfg: &SweepConfig, seed: u64) -> Result<SeedResult> {
    let scenario = generate(&ScenarioConfig {
        seed,
        ..cfg.scenario.clone()
    })?;
    let noisy = perturb(&scenario.stream, &cfg.noise, derive_seed(seed, 1))?;
    let occlusion_seed = derive_seed(seed, 2);
    let mut reports = Vec::with_capacity(cfg.rates.len());
    let mut masked = Vec::with_capacity(cfg.rates.len());
    let mut gt_boxes = 0;
    for &rate in &cfg.rates {
        let occ = apply_occlusion(
            &noisy,
            &scenario.gt,
            &OcclusionConfig {
                target_rate: rate,
                duration_range: cfg.duration_range,
                seed: occlusion_seed,
            },
        )?;
        gt_boxes = occ.total_gt_frames;
        masked.push(occ.masked.len());
        let run = |mode| -> Result<EvalReport> {
            let tracker = TrackerConfig {
                mode,
                ..cfg.tracker.clone()
            };
            let outputs = track_sequence(&tracker, &occ.stream)?;
            evaluate(&scenario.gt, &trajectories_from_outputs(&outputs), cfg.iou_threshold)
        };
        reports.push([run(MatchMode::Bidirectional)?, run(MatchMode::SingleDirection)?]);
    }
    Ok(SeedResult {
        reports,
        masked,
        gt_boxes,
    })
}

/// One row per `(rate, mode)`, rates in the given order and bidirectional
/// before single-direction. Seeds run in parallel; aggregation is in seed
/// order so the output does not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.seeds.is_empty() || cfg.rates.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one seed and one rate".into()));
    }
    cfg.tracker.validate()?;
    let per_seed: Vec<SeedResult> = cfg
        .seeds
        .par_iter()
        .map(|&s| run_seed(cfg, s))
        .collect::<Result<_>>()?;
    let total_gt: usize = per_seed.iter().map(|s| s.gt_boxes).sum();
    let mut rows = Vec::with_capacity(cfg.rates.len() * 2);
    for (ri, &rate) in cfg.rates.iter().enumerate() {
        let masked: usize = per_seed.iter().map(|s| s.masked[ri]).sum();
        let realized_rate = if total_gt == 0 { 0.0 } else { masked as f64 / total_gt as f64 };
        for (mi, mode) in [MatchMode::Bidirectional, MatchMode::SingleDirection].into_iter().enumerate() {
            let reports: Vec<EvalReport> = per_seed.iter().map(|s| s.reports[ri][mi].clone()).collect();
            rows.push(SweepRow {
                rate,
                mode,
                report: EvalReport::combine(&reports)?,
                realized_rate,
            });
        }
    }
    Ok(rows)
}

fn mode_name(mode: MatchMode) -> &'static str {
    match mode {
        MatchMode::Bidirectional => "bidir",
        MatchMode::SingleDirection => "single",
    }
}

pub const REPORT_HEADER: &str = "rate,mode,realized_rate,mota,idf1,ids,ids_ratio,fm,fm_ratio,mt,ml,fp,fn";

/// CSV table, one line per row after a header.
pub fn write_sweep_report(rows: &[SweepRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in rows {
        let e = &r.report;
        writeln!(
            w,
            "{:.2},{},{:.4},{:.4},{:.4},{},{:.5},{},{:.5},{:.4},{:.4},{},{}",
            r.rate,
            mode_name(r.mode),
            r.realized_rate,
            e.mota,
            e.idf1,
            e.ids,
            e.ids_ratio,
            e.fm,
            e.fm_ratio,
            e.mt,
            e.ml,
            e.fp,
            e.fn_
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `"1..10"` (inclusive) or `"1,2,5"`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidConfig(format!("bad seed list {text:?}"));
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().trim_start_matches('=');
        let b: u64 = b.parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let seeds: Vec<u64> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    Ok(seeds)
}

/// Comma-separated occlusion rates, each in `[0, 1)`.
pub fn parse_rates(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let r: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad rate {s:?}")))?;
            if !(0.0..1.0).contains(&r) {
                return Err(Error::InvalidConfig(format!("rate {r} outside [0, 1)")));
            }
            Ok(r)
        })
        .collect()
}
