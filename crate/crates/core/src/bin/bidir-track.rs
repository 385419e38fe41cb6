use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use bidir_track::experiment::{parse_rates, parse_seeds, run_sweep, write_sweep_report, SweepConfig};
use bidir_track::io::{
    attach_motion, parse_mot_detections, parse_mot_gt, parse_motion_sidecar, report_to_json,
    report_to_text, write_detections, write_gt, write_motion_sidecar, write_results, SimConfigFile,
};
use bidir_track::metrics::{evaluate, DEFAULT_IOU_THRESHOLD};
use bidir_track::simulator::{apply_occlusion, generate, perturb, OcclusionConfig};
use bidir_track::tracker::track_sequence;
use bidir_track::{ForwardFallback, FrameInput, MatchMode, TrackerConfig};

#[derive(Parser)]
#[command(name = "bidir-track", version, about = "Motion-vector multi-object tracker and evaluation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bidir,
    Single,
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    NegatedBackward,
    Zero,
}

#[derive(Subcommand)]
enum Command {
    /// Track a MOT detection file and write MOT results.
    Track {
        #[arg(long)]
        dets: PathBuf,
        /// Motion sidecar: frame,det_index,bvx,bvy,fvx,fvy
        #[arg(long)]
        motion: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        conf_thresh: f64,
        #[arg(long, default_value_t = 20)]
        life: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Bidir)]
        mode: ModeArg,
        /// Forward motion used when a detection carries none.
        #[arg(long, value_enum, default_value_t = FallbackArg::NegatedBackward)]
        forward_fallback: FallbackArg,
    },
    /// Score a results file against ground truth.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        res: PathBuf,
        #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
        iou: f64,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Simulate a scene and write ground truth and detections.
    Sim {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_gt: PathBuf,
        #[arg(long)]
        out_dets: PathBuf,
        #[arg(long)]
        out_motion: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
    },
    /// Hide detections of ground-truth objects for contiguous stretches.
    Occlude {
        #[arg(long)]
        dets: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Sidecar for `--dets`; rewritten for the kept detections to `--out-motion`.
        #[arg(long, requires = "out_motion")]
        motion: Option<PathBuf>,
        #[arg(long, requires = "motion")]
        out_motion: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        min_dur: u32,
        #[arg(long, default_value_t = 30)]
        max_dur: u32,
    },
    /// Compare both matching modes over occlusion rates and seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "0,0.05,0.10,0.15,0.20,0.25,0.30")]
        rates: String,
        #[arg(long, default_value = "1..10")]
        seeds: String,
        #[arg(long)]
        report: PathBuf,
    },
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn read_detections(dets: &Path, motion: Option<&Path>) -> anyhow::Result<Vec<FrameInput>> {
    let mut stream =
        parse_mot_detections(open(dets)?).with_context(|| format!("reading {}", dets.display()))?;
    if let Some(m) = motion {
        let table = parse_motion_sidecar(open(m)?).with_context(|| format!("reading {}", m.display()))?;
        attach_motion(&mut stream, &table).with_context(|| format!("applying {}", m.display()))?;
    }
    Ok(stream)
}

fn read_config(path: &Path) -> anyhow::Result<SimConfigFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    SimConfigFile::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Track {
            dets,
            motion,
            out,
            conf_thresh,
            life,
            mode,
            forward_fallback,
        } => {
            let config = TrackerConfig {
                conf_threshold: conf_thresh,
                life_max: life,
                mode: match mode {
                    ModeArg::Bidir => MatchMode::Bidirectional,
                    ModeArg::Single => MatchMode::SingleDirection,
                },
                forward_fallback: match forward_fallback {
                    FallbackArg::NegatedBackward => ForwardFallback::NegatedBackward,
                    FallbackArg::Zero => ForwardFallback::Zero,
                },
            };
            let stream = read_detections(&dets, motion.as_deref())?;
            let outputs = track_sequence(&config, &stream)?;
            write_results(&outputs, create(&out)?)?;
        }
        Command::Eval { gt, res, iou, json } => {
            if !(iou > 0.0 && iou <= 1.0) {
                bail!("--iou must be in (0, 1], got {iou}");
            }
            let gt = parse_mot_gt(open(&gt)?).context("reading ground truth")?;
            let pred = parse_mot_gt(open(&res)?).context("reading results")?;
            let report = evaluate(&gt, &pred, iou)?;
            print!("{}", report_to_text(&report));
            if let Some(path) = json {
                fs::write(&path, report_to_json(&report) + "\n")
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        Command::Sim {
            config,
            out_gt,
            out_dets,
            out_motion,
            seed,
        } => {
            let cfg = read_config(&config)?;
            let mut scenario_cfg = cfg.scenario();
            scenario_cfg.seed = seed;
            let scenario = generate(&scenario_cfg)?;
            let stream = perturb(&scenario.stream, &cfg.noise(), seed)?;
            write_gt(&scenario.gt, create(&out_gt)?)?;
            write_detections(&stream, create(&out_dets)?)?;
            if let Some(path) = out_motion {
                write_motion_sidecar(&stream, create(&path)?)?;
            }
        }
        Command::Occlude {
            dets,
            gt,
            rate,
            seed,
            out,
            motion,
            out_motion,
            min_dur,
            max_dur,
        } => {
            let stream = read_detections(&dets, motion.as_deref())?;
            let gt = parse_mot_gt(open(&gt)?).context("reading ground truth")?;
            let cfg = OcclusionConfig {
                target_rate: rate,
                duration_range: (min_dur, max_dur),
                seed,
            };
            let occ = apply_occlusion(&stream, &gt, &cfg)?;
            write_detections(&occ.stream, create(&out)?)?;
            if let Some(path) = out_motion {
                write_motion_sidecar(&occ.stream, create(&path)?)?;
            }
            eprintln!(
                "masked {} of {} ground-truth boxes ({:.4})",
                occ.masked.len(),
                occ.total_gt_frames,
                occ.realized_rate()
            );
        }
        Command::Sweep {
            config,
            rates,
            seeds,
            report,
        } => {
            let cfg = read_config(&config)?;
            let mut sweep = SweepConfig::new(cfg.scenario(), cfg.noise(), cfg.occlusion().duration_range);
            sweep.rates = parse_rates(&rates)?;
            sweep.seeds = parse_seeds(&seeds)?;
            let rows = run_sweep(&sweep)?;
            write_sweep_report(&rows, create(&report)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
