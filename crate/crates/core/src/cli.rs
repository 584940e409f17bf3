//! The `ptl-fusion` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
//! invariant violation. All randomness flows from `--seed`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::audio_dsp::DeltaMode;
use crate::dataset_io::{
    load_detections, load_manifest, read_image, read_wav, split_stratified, ConditionFilter,
};
use crate::eval::{
    calibration_regions, corpus_streams, emit_report, evaluate, grid_search, infer_window,
    train_audio, train_fusion, ClassifierKind, FusionTrainConfig, GridConfig, Mode, PipelineModel,
    Report, ReportFormat, TrainAudioConfig, WindowInput,
};
use crate::synth::{manifest_hash, synth_corpus, CorpusConfig, MANIFEST_NAME};
use crate::vision::{calibrate_hue_ranges, CalibrationConfig, Detector, HueRange, HueThresholds};
use crate::{Decision, Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "ptl-fusion",
    version,
    about = "Audio-visual pedestrian traffic light classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corpus (WAVs, PPM frames, manifest).
    Synth(SynthArgs),
    /// Derive red and green hue ranges from a labelled corpus.
    CalibrateHue(CalibrateArgs),
    /// Train an audio-only pipeline.
    TrainAudio(TrainAudioArgs),
    /// Train the feature-level fusion pipeline (plus its audio-only forest).
    TrainFusion(TrainFusionArgs),
    /// Classify one window.
    Classify(ClassifyArgs),
    /// Score a pipeline on a corpus.
    Evaluate(EvaluateArgs),
    /// Sweep classifier, MFCC count and frame length.
    GridSearch(GridArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    windows_per_condition: usize,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 30.0)]
    fps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Conditions to generate, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "clean,occluded,moving")]
    conditions: Vec<crate::dataset_io::Condition>,
    /// Extra windows without any PTL in view.
    #[arg(long, default_value_t = 0)]
    no_ptl: usize,
    #[arg(long, default_value_t = 16_000)]
    sample_rate: u32,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 0.10)]
    peak_fraction: f64,
    /// Truncate the larger class to the size of the smaller one.
    #[arg(long)]
    balance: bool,
}

#[derive(Debug, Args)]
struct TrainAudioArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "rf")]
    model: ClassifierKind,
    #[arg(long, default_value_t = 24)]
    n_mfcc: usize,
    #[arg(long, default_value_t = 250)]
    frame_ms: u32,
    #[arg(long, default_value = "none")]
    delta: DeltaMode,
    /// Neighbours for k-NN.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainFusionArgs {
    #[arg(long)]
    audio_corpus: PathBuf,
    #[arg(long)]
    vision_corpus: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 24)]
    n_mfcc: usize,
    /// Red hue range `lo-hi` on the 0-180 scale.
    #[arg(long, value_parser = parse_range)]
    red_range: Option<HueRange>,
    /// Green hue range `lo-hi` on the 0-180 scale.
    #[arg(long, value_parser = parse_range)]
    green_range: Option<HueRange>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    window: PathBuf,
    #[arg(long, num_args = 0..)]
    frames: Vec<PathBuf>,
    /// JSON Lines detections keyed by frame file name; replaces the built-in detector.
    #[arg(long)]
    detections: Option<PathBuf>,
    #[arg(long, default_value = "decision")]
    mode: Mode,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "all")]
    condition: ConditionFilter,
    /// A mode, or `all` for every mode the model supports.
    #[arg(long, default_value = "all")]
    mode: String,
    #[arg(long, default_value = "csv")]
    report: ReportFormat,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Delta modes to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "none")]
    delta: Vec<DeltaMode>,
    #[arg(long, default_value_t = 0.3)]
    test_fraction: f64,
    #[arg(long, default_value_t = 5)]
    k: usize,
}

fn parse_range(s: &str) -> std::result::Result<HueRange, String> {
    let (lo, hi) = s.split_once('-').ok_or("expected lo-hi")?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound `{hi}`"))?;
    HueRange::new(lo, hi).map_err(|e| e.to_string())
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Invariant(_) => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Synth(a) => synth(a, out),
        Command::CalibrateHue(a) => calibrate(a, out),
        Command::TrainAudio(a) => {
            let corpus = load_manifest(&a.corpus)?;
            let cfg = TrainAudioConfig {
                kind: a.model,
                n_mfcc: a.n_mfcc,
                frame_ms: a.frame_ms,
                deltas: a.delta,
                k: a.k,
                seed: a.seed,
                ..TrainAudioConfig::default()
            };
            let model = train_audio(&corpus, &cfg)?;
            model.save(&a.out)?;
            say(
                out,
                format_args!(
                    "wrote {} ({} features)\n",
                    a.out.display(),
                    model.audio_dim()
                ),
            )
        }
        Command::TrainFusion(a) => {
            let audio = load_manifest(&a.audio_corpus)?;
            let vision = load_manifest(&a.vision_corpus)?;
            let defaults = HueThresholds::default();
            let cfg = FusionTrainConfig {
                n_mfcc: a.n_mfcc,
                thresholds: HueThresholds {
                    red: a.red_range.unwrap_or(defaults.red),
                    green: a.green_range.unwrap_or(defaults.green),
                    ..defaults
                },
                seed: a.seed,
                ..FusionTrainConfig::default()
            };
            let model = train_fusion(&audio, &vision, &cfg)?;
            model.save(&a.out)?;
            say(
                out,
                format_args!(
                    "wrote {} ({} fused features)\n",
                    a.out.display(),
                    a.n_mfcc + 2
                ),
            )
        }
        Command::Classify(a) => classify(a, out),
        Command::Evaluate(a) => evaluate_cmd(a, out, err),
        Command::GridSearch(a) => grid(a, out),
    }
}

fn say(out: &mut dyn Write, args: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(args).map_err(|e| {
        Error::Format(crate::dataset_io::FormatError::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        })
    })
}

fn synth(a: SynthArgs, out: &mut dyn Write) -> Result<()> {
    let count = |c| {
        if a.conditions.contains(&c) {
            a.windows_per_condition
        } else {
            0
        }
    };
    use crate::dataset_io::Condition;
    let cfg = CorpusConfig {
        clean: count(Condition::Clean),
        occluded: count(Condition::Occluded),
        moving: count(Condition::Moving),
        no_ptl: a.no_ptl,
        snr_db: a.snr_db,
        fps: a.fps,
        sample_rate: a.sample_rate,
        seed: a.seed,
        ..CorpusConfig::default()
    };
    let corpus = synth_corpus(&cfg, &a.out)?;
    let manifest = a.out.join(MANIFEST_NAME);
    say(
        out,
        format_args!(
            "wrote {} windows to {}\nsha256 {}\n",
            corpus.items.len(),
            manifest.display(),
            manifest_hash(&manifest)?
        ),
    )
}

fn calibrate(a: CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_manifest(&a.corpus)?;
    let defaults = HueThresholds::default();
    let regions = calibration_regions(&corpus, &Default::default(), &Default::default())?;
    let cfg = CalibrationConfig {
        balance: a.balance,
        peak_fraction: a.peak_fraction,
        min_sat: defaults.min_sat,
        min_val: defaults.min_val,
    };
    let r = calibrate_hue_ranges(&regions, &cfg)?;
    say(out, format_args!("green {}\nred {}\n", r.green, r.red))
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<()> {
    let model = PipelineModel::load(&a.model)?;
    let stream = read_wav(&a.window)?;
    let audio =
        stream
            .slice_ms(0, model.frame_ms)
            .ok_or_else(|| crate::eval::EvalError::ShortAudio {
                id: a.window.display().to_string(),
                have_ms: stream.duration_ms().floor() as u32,
                need_ms: model.frame_ms,
            })?;
    let frames = a
        .frames
        .iter()
        .map(|p| {
            let id = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, read_image(p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let input = WindowInput { audio, frames };
    let external;
    let detector: &dyn Detector = match &a.detections {
        Some(path) => {
            external = load_detections(path)?.detector();
            &external
        }
        None => &model.detector,
    };
    let o = infer_window(&model, a.mode, &input, detector)?;
    let label = match o.decision {
        Decision::Red => "red",
        Decision::Green => "green",
        Decision::Unavailable => "unavailable",
    };
    say(
        out,
        format_args!(
            "{label}\nred {:.4}\ngreen {:.4}\n",
            o.scores[0], o.scores[1]
        ),
    )
}

fn evaluate_cmd(a: EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let model = PipelineModel::load(&a.model)?;
    let corpus = load_manifest(&a.corpus)?;
    let modes: Vec<Mode> = if a.mode == "all" {
        Mode::ALL
            .into_iter()
            .filter(|&m| m != Mode::Feature || model.fused.is_some())
            .collect()
    } else {
        vec![a.mode.parse()?]
    };
    let mut report = Report::default();
    for m in modes {
        let row = evaluate(&model, m, &corpus, a.condition)?;
        let _ = writeln!(
            err,
            "{}: {:.3} ms per window",
            row.method, row.mean_window_ms
        );
        report.rows.push(row);
    }
    say(out, format_args!("{}", emit_report(&report, a.report)))
}

fn grid(a: GridArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_manifest(&a.corpus)?;
    let streams = corpus_streams(&corpus, ConditionFilter::All)?;
    // Whole recordings go to one side so no clip leaks across the split.
    let (train, test) = split_stratified(&streams, |s| s.label, a.test_fraction, a.seed)?;
    let cfg = GridConfig {
        deltas: a.delta,
        k: a.k,
        seed: a.seed,
        ..GridConfig::default()
    };
    let report = grid_search(&train, &test, &cfg)?;
    crate::dataset_io::write_text(&a.out, &report.to_csv())?;
    match report.best() {
        Some(b) => say(
            out,
            format_args!(
                "{} cells; best {} n_mfcc={} frame_ms={} delta={} accuracy={:.4}\n",
                report.cells.len(),
                b.classifier,
                b.n_mfcc,
                b.frame_ms,
                b.deltas,
                b.accuracy
            ),
        ),
        None => say(out, format_args!("0 cells\n")),
    }
}
