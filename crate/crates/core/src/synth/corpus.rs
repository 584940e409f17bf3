use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::audio::{synth_audio_with, AudioOptions};
use super::frame::{render_frame, FrameSpec};
use super::SynthError;
use crate::dataset_io::{
    encode_ppm, encode_wav, read_bytes, write_bytes, write_manifest, Condition, Corpus, CorpusItem,
    FormatError, ManifestHeader,
};
use crate::Light;

pub const MANIFEST_NAME: &str = "manifest.jsonl";

/// Occlusion draw for windows of the occluded condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcclusionModel {
    /// Probability that a window is fully covered.
    pub full_probability: f64,
    /// Otherwise the covered fraction is uniform in this range.
    pub partial: (f64, f64),
}

impl Default for OcclusionModel {
    fn default() -> Self {
        Self {
            full_probability: 0.95,
            partial: (0.5, 0.9),
        }
    }
}

/// Camera and view effects of a walking robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingModel {
    /// Per-window covered fraction is uniform in `[0, max_occlusion]`.
    pub max_occlusion: f64,
    /// Chance that the PTL is out of frame for a whole window.
    pub out_of_view: f64,
    /// Per-frame shake, in pixels along each axis.
    pub shake_px: i32,
}

impl Default for MovingModel {
    fn default() -> Self {
        Self {
            max_occlusion: 0.3,
            out_of_view: 0.06,
            shake_px: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    /// Labelled windows per condition.
    pub clean: usize,
    pub occluded: usize,
    pub moving: usize,
    /// Extra windows without any PTL, tagged clean.
    pub no_ptl: usize,
    pub snr_db: f64,
    pub fps: f64,
    pub sample_rate: u32,
    pub window_ms: u32,
    /// Consecutive windows sharing one light state (and one WAV file).
    pub windows_per_phase: usize,
    pub width: usize,
    pub height: usize,
    pub hue_jitter: f64,
    pub occlusion: OcclusionModel,
    pub moving_model: MovingModel,
    pub audio: AudioOptions,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            clean: 100,
            occluded: 100,
            moving: 100,
            no_ptl: 0,
            snr_db: 10.0,
            fps: 30.0,
            sample_rate: 16_000,
            window_ms: 250,
            windows_per_phase: 8,
            width: 64,
            height: 64,
            hue_jitter: 2.0,
            occlusion: OcclusionModel::default(),
            moving_model: MovingModel::default(),
            audio: AudioOptions {
                random_phase: true,
                ..AudioOptions::default()
            },
            seed: 0,
        }
    }
}

impl CorpusConfig {
    pub fn per_condition(n: usize) -> Self {
        Self {
            clean: n,
            occluded: n,
            moving: n,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.clean + self.occluded + self.moving + self.no_ptl == 0 {
            return Err(SynthError::EmptyCorpus);
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(SynthError::Config(format!(
                "fps must be positive, got {}",
                self.fps
            )));
        }
        if self.window_ms < 250 || self.windows_per_phase == 0 {
            return Err(SynthError::Config(
                "window_ms must be at least 250 and windows_per_phase positive".into(),
            ));
        }
        let o = self.occlusion;
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !in_unit(o.full_probability)
            || !in_unit(o.partial.0)
            || !in_unit(o.partial.1)
            || o.partial.0 > o.partial.1
        {
            return Err(SynthError::Config("occlusion model out of range".into()));
        }
        let m = self.moving_model;
        if !in_unit(m.max_occlusion) || !in_unit(m.out_of_view) || m.shake_px < 0 {
            return Err(SynthError::Config("moving model out of range".into()));
        }
        Ok(())
    }
}

/// Everything needed to render one phase, drawn up front so rendering can
/// run in parallel without changing the result.
struct PhasePlan {
    condition: Condition,
    index: usize,
    label: Option<Light>,
    transition: bool,
    windows: Vec<WindowPlan>,
    audio_seed: u64,
    frame_seed: u64,
}

#[derive(Clone, Copy)]
struct WindowPlan {
    occlusion: f64,
    visible: bool,
}

/// Writes a corpus below `out_dir`: one WAV per phase under `audio/`, PPM
/// frames under `frames/` and [`MANIFEST_NAME`].
pub fn synth_corpus(cfg: &CorpusConfig, out_dir: &Path) -> Result<Corpus, SynthError> {
    cfg.validate()?;
    let plans = plan(cfg);
    let header = ManifestHeader::new(cfg.fps, cfg.window_ms, cfg.sample_rate);

    let items: Vec<Vec<CorpusItem>> = plans
        .par_iter()
        .map(|p| render_phase(cfg, p, out_dir))
        .collect::<Result<_, _>>()?;
    let items: Vec<CorpusItem> = items.into_iter().flatten().collect();
    write_bytes(
        &out_dir.join(MANIFEST_NAME),
        write_manifest(&header, &items).as_bytes(),
    )?;
    Ok(Corpus {
        root: out_dir.to_path_buf(),
        header,
        items,
    })
}

fn plan(cfg: &CorpusConfig) -> Vec<PhasePlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut plans = Vec::new();
    let groups = [
        (Condition::Clean, cfg.clean, true),
        (Condition::Occluded, cfg.occluded, true),
        (Condition::Moving, cfg.moving, true),
        (Condition::Clean, cfg.no_ptl, false),
    ];
    for (condition, count, lit) in groups {
        let mut label = if rng.random_bool(0.5) {
            Light::Red
        } else {
            Light::Green
        };
        let mut previous: Option<Light> = None;
        let mut left = count;
        while left > 0 {
            let n = left.min(cfg.windows_per_phase);
            left -= n;
            let windows = (0..n)
                .map(|_| match condition {
                    Condition::Clean => WindowPlan {
                        occlusion: 0.0,
                        visible: true,
                    },
                    Condition::Occluded => {
                        let o = cfg.occlusion;
                        let occlusion = if rng.random_bool(o.full_probability) {
                            1.0
                        } else {
                            rng.random_range(o.partial.0..=o.partial.1)
                        };
                        WindowPlan {
                            occlusion,
                            visible: true,
                        }
                    }
                    Condition::Moving => {
                        let m = cfg.moving_model;
                        WindowPlan {
                            occlusion: rng.random_range(0.0..=m.max_occlusion),
                            visible: !rng.random_bool(m.out_of_view),
                        }
                    }
                })
                .collect();
            let this = lit.then_some(label);
            plans.push(PhasePlan {
                condition,
                index: plans
                    .iter()
                    .filter(|p: &&PhasePlan| p.condition == condition)
                    .count(),
                label: this,
                transition: this == Some(Light::Green) && previous == Some(Light::Red),
                windows,
                audio_seed: rng.random(),
                frame_seed: rng.random(),
            });
            previous = this;
            label = label.other();
        }
    }
    plans
}

fn render_phase(
    cfg: &CorpusConfig,
    p: &PhasePlan,
    out_dir: &Path,
) -> Result<Vec<CorpusItem>, SynthError> {
    let stem = format!("{}-p{:03}", p.condition, p.index);
    let duration_ms = cfg.window_ms * p.windows.len() as u32;
    let opts = AudioOptions {
        transition: p.transition,
        ..cfg.audio
    };
    let motion = p.condition == Condition::Moving;
    let clip = synth_audio_with(
        p.label,
        duration_ms,
        cfg.sample_rate,
        cfg.snr_db,
        motion,
        p.audio_seed,
        &opts,
    )?;
    let audio_rel = format!("audio/{stem}.wav");
    write_bytes(&out_dir.join(&audio_rel), &encode_wav(&clip))?;

    let mut frame_rng = ChaCha8Rng::seed_from_u64(p.frame_seed);
    let mut items = Vec::with_capacity(p.windows.len());
    let mut k = 0usize;
    for (w, wp) in p.windows.iter().enumerate() {
        let start = (w as u32 * cfg.window_ms) as f64;
        let end = start + cfg.window_ms as f64;
        let mut frames = Vec::new();
        while (k as f64 * 1000.0 / cfg.fps) < end - 1e-9 {
            let t = k as f64 * 1000.0 / cfg.fps;
            debug_assert!(t >= start - 1e-9);
            let shake = if motion {
                let s = cfg.moving_model.shake_px;
                (
                    frame_rng.random_range(-s..=s),
                    frame_rng.random_range(-s..=s),
                )
            } else {
                (0, 0)
            };
            let spec = FrameSpec {
                label: if wp.visible { p.label } else { None },
                width: cfg.width,
                height: cfg.height,
                occlusion: wp.occlusion,
                hue_jitter: cfg.hue_jitter,
                offset: shake,
                seed: frame_rng.random(),
            };
            let (img, _) = render_frame(&spec)?;
            let rel = format!("frames/{stem}/f{k:05}.ppm");
            write_bytes(&out_dir.join(&rel), &encode_ppm(&img))?;
            frames.push(rel);
            k += 1;
        }
        items.push(CorpusItem {
            id: format!("{stem}-w{w:02}"),
            condition: p.condition,
            label: p.label,
            audio: audio_rel.clone(),
            offset_ms: w as u32 * cfg.window_ms,
            frames,
        });
    }
    Ok(items)
}

/// Hex SHA-256 of a file, used to compare regenerated corpora.
pub fn manifest_hash(path: &Path) -> Result<String, FormatError> {
    let bytes = read_bytes(path)?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}
