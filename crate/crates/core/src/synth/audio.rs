use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SynthError;
use crate::audio_dsp::AudioClip;
use crate::Light;

pub const RED_TONE_HZ: f64 = 2000.0;
pub const GREEN_TONE_HZ: f64 = 2500.0;
pub const RED_PULSE_MS: f64 = 50.0;
pub const GREEN_PULSE_MS: f64 = 30.0;
pub const RED_RATE_HZ: f64 = 1.0;
pub const GREEN_RATE_HZ: f64 = 8.0;
pub const CHIRP_MS: f64 = 400.0;

const TONE_AMPLITUDE: f64 = 0.5;
/// Attack/release ramp of each pulse, in milliseconds.
const RAMP_MS: f64 = 3.0;

/// Extra knobs beyond the basic generator arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AudioOptions {
    /// Start a green clip with a rising chirp, as heard right after a change
    /// from red.
    pub transition: bool,
    /// Randomise where in its period the first pulse falls.
    pub random_phase: bool,
    /// Gain of the footstep bursts relative to the tone amplitude.
    pub footstep_gain: f64,
    /// Standard deviation of the continuous motor noise relative to the tone
    /// amplitude.
    pub motor_gain: f64,
}

impl Default for AudioOptions {
    fn default() -> Self {
        Self {
            transition: false,
            random_phase: false,
            footstep_gain: 4.0,
            motor_gain: 0.3,
        }
    }
}

/// PTL audio for one label with white noise at `snr_db` (infinite means
/// noiseless) and, optionally, robot motion noise.
///
/// `label == None` yields a clip holding only the noise terms.
pub fn synth_audio(
    label: Option<Light>,
    duration_ms: u32,
    sample_rate: u32,
    snr_db: f64,
    motion_noise: bool,
    seed: u64,
) -> Result<AudioClip, SynthError> {
    synth_audio_with(
        label,
        duration_ms,
        sample_rate,
        snr_db,
        motion_noise,
        seed,
        &AudioOptions::default(),
    )
}

pub fn synth_audio_with(
    label: Option<Light>,
    duration_ms: u32,
    sample_rate: u32,
    snr_db: f64,
    motion_noise: bool,
    seed: u64,
    opts: &AudioOptions,
) -> Result<AudioClip, SynthError> {
    if duration_ms < 250 {
        return Err(SynthError::Duration(duration_ms));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(SynthError::Snr(snr_db));
    }
    if sample_rate < crate::audio_dsp::MIN_SAMPLE_RATE {
        return Err(SynthError::SampleRate(sample_rate));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sr = sample_rate as f64;
    let n = (sample_rate as u64 * duration_ms as u64 / 1000) as usize;
    let mut x = vec![0.0; n];

    let signal_power = match label {
        Some(light) => {
            let (f0, pulse_ms, rate) = match light {
                Light::Red => (RED_TONE_HZ, RED_PULSE_MS, RED_RATE_HZ),
                Light::Green => (GREEN_TONE_HZ, GREEN_PULSE_MS, GREEN_RATE_HZ),
            };
            let period = sr / rate;
            let phase = if opts.random_phase {
                rng.random_range(0.0..period)
            } else {
                0.0
            };
            let f = f0 + rng.random_range(-15.0..15.0);
            let gain = TONE_AMPLITUDE * rng.random_range(0.8..1.0);
            let mut start_at = 0usize;
            if light == Light::Green && opts.transition {
                let len = ((CHIRP_MS / 1000.0 * sr) as usize).min(n);
                chirp(&mut x[..len], 800.0, GREEN_TONE_HZ, sr, gain);
                start_at = len;
            }
            let pulse_len = pulse_ms / 1000.0 * sr;
            // First pulse onset at or after `phase`, shifted into the period.
            let mut onset = phase - period * (phase / period).floor();
            while onset < n as f64 {
                let a = onset as usize;
                let b = ((onset + pulse_len) as usize).min(n);
                for (i, s) in x.iter_mut().enumerate().take(b).skip(a.max(start_at)) {
                    let t = (i - a) as f64 / sr * 1000.0;
                    let env = ramp(t, pulse_ms);
                    *s += gain * env * (2.0 * PI * f * i as f64 / sr).sin();
                }
                onset += period;
            }
            mean_power(&x)
        }
        None => 0.0,
    };
    // Noise is referenced to the clean signal; a silent clip borrows the
    // nominal power of a green clip so noise levels stay comparable.
    let reference = if signal_power > 0.0 {
        signal_power
    } else {
        nominal_power(Light::Green)
    };
    if snr_db.is_finite() {
        let sigma = (reference / 10f64.powf(snr_db / 10.0)).sqrt();
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        for s in x.iter_mut() {
            *s += normal.sample(&mut rng);
        }
    }
    if motion_noise {
        add_motion_noise(&mut x, sr, opts, &mut rng);
    }
    Ok(AudioClip::new(x, sample_rate))
}

/// Mean power of a noiseless, chirp-free clip of the given light.
pub fn nominal_power(light: Light) -> f64 {
    let (pulse_ms, rate) = match light {
        Light::Red => (RED_PULSE_MS, RED_RATE_HZ),
        Light::Green => (GREEN_PULSE_MS, GREEN_RATE_HZ),
    };
    let gain = TONE_AMPLITUDE * 0.9;
    gain * gain / 2.0 * pulse_ms / 1000.0 * rate
}

fn ramp(t_ms: f64, len_ms: f64) -> f64 {
    let up = (t_ms / RAMP_MS).min(1.0);
    let down = ((len_ms - t_ms) / RAMP_MS).clamp(0.0, 1.0);
    up.min(down)
}

fn chirp(out: &mut [f64], f_start: f64, f_end: f64, sr: f64, gain: f64) {
    let len = out.len() as f64 / sr;
    if len == 0.0 {
        return;
    }
    let k = (f_end - f_start) / len;
    for (i, s) in out.iter_mut().enumerate() {
        let t = i as f64 / sr;
        let env = (t / 0.01).min(1.0) * 0.6;
        *s += gain * env * (2.0 * PI * (f_start * t + 0.5 * k * t * t)).sin();
    }
}

fn mean_power(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Footsteps: 100-400 Hz bursts twice a second. Motors: continuous white
/// noise.
fn add_motion_noise(x: &mut [f64], sr: f64, opts: &AudioOptions, rng: &mut ChaCha8Rng) {
    const STEP_RATE_HZ: f64 = 2.0;
    const STEP_MS: f64 = 120.0;
    const PARTIALS: usize = 12;
    let period = sr / STEP_RATE_HZ;
    let step_len = STEP_MS / 1000.0 * sr;
    let mut onset = rng.random_range(0.0..period);
    onset -= period;
    while onset < x.len() as f64 {
        let freqs: Vec<(f64, f64)> = (0..PARTIALS)
            .map(|_| {
                (
                    rng.random_range(100.0..400.0),
                    rng.random_range(0.0..2.0 * PI),
                )
            })
            .collect();
        let gain = opts.footstep_gain * TONE_AMPLITUDE * rng.random_range(0.6..1.0)
            / (PARTIALS as f64).sqrt();
        let a = onset.max(0.0) as usize;
        let b = ((onset + step_len).max(0.0) as usize).min(x.len());
        for (i, s) in x.iter_mut().enumerate().take(b).skip(a) {
            let t = (i as f64 - onset) / step_len;
            // Sharp heel strike, exponential decay.
            let env = (-5.0 * t).exp();
            let v: f64 = freqs
                .iter()
                .map(|&(f, p)| (2.0 * PI * f * i as f64 / sr + p).sin())
                .sum();
            *s += gain * env * v;
        }
        onset += period * rng.random_range(0.9..1.1);
    }
    if opts.motor_gain > 0.0 {
        let normal = Normal::new(0.0, opts.motor_gain * TONE_AMPLITUDE).expect("finite sigma");
        for s in x.iter_mut() {
            *s += normal.sample(rng);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pulse rate from the autocorrelation peak of the squared signal.
    fn pulse_rate(clip: &AudioClip, min_hz: f64, max_hz: f64) -> f64 {
        let sr = clip.sample_rate as f64;
        // Envelope at 1 kHz resolution.
        let hop = (sr / 1000.0) as usize;
        let env: Vec<f64> = clip
            .samples
            .chunks(hop)
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .collect();
        let mean = env.iter().sum::<f64>() / env.len() as f64;
        let e: Vec<f64> = env.iter().map(|v| v - mean).collect();
        let lo = (1000.0 / max_hz) as usize;
        let hi = ((1000.0 / min_hz) as usize).min(e.len() - 1);
        let r: Vec<f64> = (lo..=hi)
            .map(|lag| {
                e.iter().zip(&e[lag..]).map(|(x, y)| x * y).sum::<f64>() / (e.len() - lag) as f64
            })
            .collect();
        let peak = r.iter().copied().fold(f64::MIN, f64::max);
        // Multiples of the period score about as high; take the first lag
        // that comes close to the peak.
        let best = lo + r.iter().position(|&v| v >= 0.9 * peak).unwrap();
        1000.0 / best as f64
    }

    #[test]
    fn green_pulses_at_eight_hertz() {
        let c = synth_audio(Some(Light::Green), 1000, 44_100, f64::INFINITY, false, 7).unwrap();
        let r = pulse_rate(&c, 2.0, 20.0);
        assert!((r - 8.0).abs() <= 0.5, "{r}");
    }

    #[test]
    fn red_pulses_at_one_hertz() {
        // One period per second: several seconds are needed to see repetition.
        let c = synth_audio(Some(Light::Red), 4000, 44_100, f64::INFINITY, false, 7).unwrap();
        let r = pulse_rate(&c, 0.5, 4.0);
        assert!((r - 1.0).abs() <= 0.2, "{r}");
    }

    #[test]
    fn deterministic() {
        let a = synth_audio(Some(Light::Red), 500, 16_000, 10.0, true, 3).unwrap();
        let b = synth_audio(Some(Light::Red), 500, 16_000, 10.0, true, 3).unwrap();
        assert_eq!(a, b);
        let c = synth_audio(Some(Light::Red), 500, 16_000, 10.0, true, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn snr_is_respected() {
        let clean = synth_audio(Some(Light::Green), 2000, 16_000, f64::INFINITY, false, 1).unwrap();
        let noisy = synth_audio(Some(Light::Green), 2000, 16_000, 10.0, false, 1).unwrap();
        let ps = mean_power(&clean.samples);
        let noise: Vec<f64> = noisy
            .samples
            .iter()
            .zip(&clean.samples)
            .map(|(a, b)| a - b)
            .collect();
        let snr = 10.0 * (ps / mean_power(&noise)).log10();
        assert!((snr - 10.0).abs() < 0.3, "{snr}");
    }

    #[test]
    fn invalid_arguments() {
        assert_eq!(
            synth_audio(Some(Light::Red), 100, 16_000, 10.0, false, 0),
            Err(SynthError::Duration(100))
        );
        assert!(matches!(
            synth_audio(Some(Light::Red), 500, 16_000, f64::NAN, false, 0),
            Err(SynthError::Snr(_))
        ));
    }

    #[test]
    fn transition_chirp_precedes_pulses() {
        let opts = AudioOptions {
            transition: true,
            ..AudioOptions::default()
        };
        let c = synth_audio_with(
            Some(Light::Green),
            1000,
            16_000,
            f64::INFINITY,
            false,
            2,
            &opts,
        )
        .unwrap();
        // The chirp is continuous: no silent gaps in its first 400 ms apart
        // from the zero crossings.
        let first = &c.samples[160..6400];
        let loud = first.chunks(80).filter(|w| mean_power(w) > 1e-4).count();
        assert_eq!(loud, first.chunks(80).count());
    }
}
