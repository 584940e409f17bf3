//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptl_fusion::audio_dsp::{compute_mfcc, AudioClip, MfccConfig};
use ptl_fusion::dataset_io::{
    decode_wav, encode_wav, parse_detections, split_stratified, write_detections, Condition,
    ConditionFilter, DetectionRecord, DetectionSet,
};
use ptl_fusion::eval::{
    corpus_streams, evaluate, grid_search, train_fusion, FusionTrainConfig, GridConfig, Mode,
};
use ptl_fusion::fusion::{build_fused_vector, select_frames, SyncConfig};
use ptl_fusion::synth::{synth_corpus, CorpusConfig};
use ptl_fusion::vision::{classify_hue, BoundingBox, VisionFeatures};
use ptl_fusion::Decision;

use common::{diagnose, malformed_fixtures, max_rel_err, oracle_mfcc, random_clip};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 mfcc oracle equivalence", mfcc_oracle),
        ("2 condition orderings", condition_orderings),
        ("3 hue rule exhaustiveness", hue_rule),
        ("4 frame selection and fused length", sync_shape),
        ("5 grid search", grid),
        ("6 bit-exact io", io_roundtrips),
        ("7 end-to-end determinism", end_to_end),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1} s): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    if t.elapsed() > limit {
        Err(format!(
            "took {:.1} s, limit {} s",
            t.elapsed().as_secs_f64(),
            limit.as_secs()
        ))
    } else {
        Ok(())
    }
}

fn mfcc_oracle() -> Outcome {
    let t = Instant::now();
    let mut worst = 0f64;
    for seed in 0..10u64 {
        let x = random_clip(1000 + seed, 250, 16_000);
        let fast = compute_mfcc(&AudioClip::new(x.clone(), 16_000), &MfccConfig::default())
            .map_err(|e| e.to_string())?;
        worst = worst.max(max_rel_err(&fast.values, &oracle_mfcc(&x, 16_000, 24)));
    }
    within(t, Duration::from_secs(10))?;
    if worst < 1e-6 {
        Ok(format!("max relative error {worst:.2e} over 10 clips"))
    } else {
        Err(format!("max relative error {worst:.2e} exceeds 1e-6"))
    }
}

const WINDOWS: usize = 400;

/// Overall accuracy per mode (vision, audio, feature, decision) per condition.
fn condition_accuracies(seed: u64, dir: &Path) -> Result<[[f64; 4]; 3], String> {
    let e = |e: ptl_fusion::Error| e.to_string();
    let audio = synth_corpus(
        &CorpusConfig {
            clean: WINDOWS,
            occluded: 0,
            moving: 0,
            ..CorpusConfig::default()
        }
        .with_seed(seed * 3 + 1),
        &dir.join("audio"),
    )
    .map_err(|e| e.to_string())?;
    let vision = synth_corpus(
        &CorpusConfig {
            occluded: 0,
            no_ptl: WINDOWS / 4,
            ..CorpusConfig::per_condition(WINDOWS / 2)
        }
        .with_seed(seed * 3 + 2),
        &dir.join("vision"),
    )
    .map_err(|e| e.to_string())?;
    let test = synth_corpus(
        &CorpusConfig::per_condition(WINDOWS).with_seed(seed * 3 + 3),
        &dir.join("test"),
    )
    .map_err(|e| e.to_string())?;
    let model = train_fusion(
        &audio,
        &vision,
        &FusionTrainConfig {
            seed,
            ..Default::default()
        },
    )
    .map_err(e)?;
    let mut acc = [[0.0; 4]; 3];
    for (ci, c) in Condition::ALL.into_iter().enumerate() {
        for (mi, m) in Mode::ALL.into_iter().enumerate() {
            let row = evaluate(&model, m, &test, ConditionFilter::Only(c)).map_err(e)?;
            acc[ci][mi] = row.overall_accuracy().ok_or("empty condition")?;
        }
    }
    Ok(acc)
}

fn condition_orderings() -> Outcome {
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for seed in 1..=3u64 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let acc = condition_accuracies(seed, dir.path())?;
        let [clean, occ, moving] = acc;
        let (v, a, f, d) = (0, 1, 2, 3);
        let mut check = |ok: bool, what: &str| {
            if !ok {
                problems.push(format!("seed {seed}: {what}"));
            }
        };
        check(
            clean[f] >= clean[v].max(clean[a]) - 0.01,
            "clean feature below best unimodal - 1 pt",
        );
        check(
            clean[v] >= 0.9 && clean[a] >= 0.9 && clean[f] >= 0.9,
            "clean accuracy below 90%",
        );
        check(occ[v] <= 0.10, "occluded vision above 10%");
        check(
            occ[a] >= 0.9 && occ[d] >= 0.9,
            "occluded audio or decision below 90%",
        );
        check(occ[d] >= occ[f], "occluded decision below feature");
        check(
            moving[f] >= moving[v] && moving[f] >= moving[a],
            "moving feature below a unimodal pipeline",
        );
        let pct = |r: [f64; 4]| {
            format!(
                "{:.1}/{:.1}/{:.1}/{:.1}",
                r[v] * 100.0,
                r[a] * 100.0,
                r[f] * 100.0,
                r[d] * 100.0
            )
        };
        summary.push(format!(
            "seed {seed} clean {} occluded {} moving {}",
            pct(clean),
            pct(occ),
            pct(moving)
        ));
    }
    within(t, Duration::from_secs(300))?;
    let summary = format!("{} (vision/audio/feature/decision %)", summary.join("; "));
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", problems.join("; ")))
    }
}

/// Independent statement of the rule, written against orderings.
fn expected_rule(f: &VisionFeatures) -> Decision {
    use std::cmp::Ordering::*;
    match (f.detected, f.p_red.partial_cmp(&f.p_green)) {
        (false, _) => Decision::Unavailable,
        (true, Some(Greater)) => Decision::Red,
        (true, Some(Less)) => Decision::Green,
        (true, _) => Decision::Unavailable,
    }
}

fn hue_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = [0usize; 3];
    for _ in 0..10_000 {
        let f = match rng.random_range(0..4) {
            0 => VisionFeatures::UNDETECTED,
            1 => {
                let p = rng.random_range(0..=50) as f64;
                VisionFeatures::detected(p, p)
            }
            2 => VisionFeatures::from_counts(rng.random_range(0..20), rng.random_range(0..20)),
            _ => {
                let r = rng.random_range(0.0..=100.0);
                VisionFeatures::detected(r, 100.0 - r)
            }
        };
        let got = classify_hue(&f);
        if got != expected_rule(&f) {
            return Err(format!("{f:?} gave {got:?}"));
        }
        seen[match got {
            Decision::Red => 0,
            Decision::Green => 1,
            Decision::Unavailable => 2,
        }] += 1;
    }
    if seen.contains(&0) {
        return Err(format!("an outcome never occurred: {seen:?}"));
    }
    Ok(format!(
        "10000 cases: red {} green {} unavailable {}",
        seen[0], seen[1], seen[2]
    ))
}

fn sync_shape() -> Outcome {
    let frames = select_frames(30.0, 250, &SyncConfig::default()).map_err(|e| e.to_string())?;
    if frames != [0, 2, 4, 6] {
        return Err(format!("selected {frames:?}"));
    }
    let clip = AudioClip::new(random_clip(4, 250, 16_000), 16_000);
    let mfcc = compute_mfcc(&clip, &MfccConfig::default()).map_err(|e| e.to_string())?;
    let fused = build_fused_vector(&mfcc, mfcc.len(), (40.0, 2.0)).map_err(|e| e.to_string())?;
    if fused.len() != 26 {
        return Err(format!("fused length {}", fused.len()));
    }
    Ok("frames [0, 2, 4, 6], fused length 26".into())
}

fn grid() -> Outcome {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = synth_corpus(&CorpusConfig::per_condition(100).with_seed(5), dir.path())
        .map_err(|e| e.to_string())?;
    let streams = corpus_streams(&corpus, ConditionFilter::All).map_err(|e| e.to_string())?;
    let (train, test) =
        split_stratified(&streams, |s| s.label, 0.3, 5).map_err(|e| e.to_string())?;
    let cfg = GridConfig {
        seed: 5,
        ..GridConfig::default()
    };
    let first = grid_search(&train, &test, &cfg).map_err(|e| e.to_string())?;
    let second = grid_search(&train, &test, &cfg).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(600))?;
    if first.cells.len() != 64 {
        return Err(format!("{} cells", first.cells.len()));
    }
    let (a, b) = (first.best().unwrap(), second.best().unwrap());
    if a != b || first.to_csv() != second.to_csv() {
        return Err("best cell differs between identical runs".into());
    }
    Ok(format!(
        "64 cells; best {} n_mfcc={} frame_ms={} accuracy {:.4}, identical on rerun",
        a.classifier, a.n_mfcc, a.frame_ms, a.accuracy
    ))
}

fn io_roundtrips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let n = rng.random_range(1..2000);
        let sr = [8_000, 16_000, 22_050, 44_100, 48_000][i % 5];
        let samples = (0..n)
            .map(|_| rng.random::<i16>() as f64 / 32768.0)
            .collect();
        let bytes = encode_wav(&AudioClip::new(samples, sr));
        let again = encode_wav(&decode_wav(&bytes).map_err(|e| e.to_string())?);
        if again != bytes {
            return Err(format!("wav case {i} not byte-identical"));
        }

        let set = DetectionSet {
            records: (0..rng.random_range(0..8))
                .map(|k| DetectionRecord {
                    frame: format!("clip{i}/f{k:05}.ppm"),
                    boxes: (0..rng.random_range(0..4))
                        .map(|_| {
                            BoundingBox::new(
                                rng.random_range(0.2..0.8),
                                rng.random_range(0.2..0.8),
                                rng.random_range(0.01..0.3),
                                rng.random_range(0.01..0.3),
                            )
                            .with_confidence(rng.random_range(0.0..=1.0))
                        })
                        .collect(),
                })
                .collect(),
        };
        let text = write_detections(&set);
        let again = write_detections(&parse_detections(&text).map_err(|e| e.to_string())?);
        if again != text {
            return Err(format!("detections case {i} not byte-identical"));
        }
    }
    let fixtures = malformed_fixtures();
    for (name, reader, bytes) in &fixtures {
        match catch_unwind(AssertUnwindSafe(|| diagnose(*reader, bytes))) {
            Ok(Ok(_)) => {}
            Ok(Err(why)) => return Err(format!("fixture `{name}`: {why}")),
            Err(_) => return Err(format!("fixture `{name}` crashed the reader")),
        }
    }
    Ok(format!(
        "200 wav and 200 detection round-trips; {} malformed fixtures diagnosed",
        fixtures.len()
    ))
}

fn cli(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_ptl-fusion"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr).trim()
        ));
    }
    String::from_utf8(o.stdout).map_err(|e| e.to_string())
}

fn pipeline_report(root: &Path) -> Result<String, String> {
    let p = |r: &str| root.join(r).to_str().unwrap().to_owned();
    cli(&[
        "synth",
        "--out",
        &p("audio"),
        "--conditions",
        "clean",
        "--windows-per-condition",
        "80",
        "--seed",
        "11",
    ])?;
    cli(&[
        "synth",
        "--out",
        &p("vision"),
        "--conditions",
        "clean,moving",
        "--windows-per-condition",
        "40",
        "--no-ptl",
        "20",
        "--seed",
        "12",
    ])?;
    cli(&[
        "synth",
        "--out",
        &p("test"),
        "--windows-per-condition",
        "60",
        "--seed",
        "13",
    ])?;
    cli(&[
        "train-fusion",
        "--audio-corpus",
        &p("audio/manifest.jsonl"),
        "--vision-corpus",
        &p("vision/manifest.jsonl"),
        "--seed",
        "14",
        "--out",
        &p("model.ptl"),
    ])?;
    cli(&[
        "evaluate",
        "--model",
        &p("model.ptl"),
        "--corpus",
        &p("test/manifest.jsonl"),
    ])
}

fn end_to_end() -> Outcome {
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    let first = pipeline_report(a.path())?;
    let second = pipeline_report(b.path())?;
    if first != second {
        return Err(format!("reports differ:\n{first}\n{second}"));
    }
    Ok(format!(
        "{} report lines byte-identical across two runs",
        first.lines().count()
    ))
}
