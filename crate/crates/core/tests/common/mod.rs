//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook MFCC: O(n^2) DFT per analysis window, triangular HTK mel filters
/// over 0..sr/2, natural log with a 1e-10 floor, orthonormal DCT-II, c1..cN
/// averaged over the windows.
pub fn oracle_mfcc(x: &[f64], sr: u32, n_mfcc: usize) -> Vec<f64> {
    let frames = oracle_mfcc_frames(x, sr, n_mfcc);
    let mut mean = vec![0.0; n_mfcc];
    for f in &frames {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v / frames.len() as f64;
        }
    }
    mean
}

pub fn oracle_mfcc_frames(x: &[f64], sr: u32, n_mfcc: usize) -> Vec<Vec<f64>> {
    let fs = sr as f64;
    let win = (0.025 * fs).round() as usize;
    let hop = (0.010 * fs).round() as usize;
    let mut nfft = 1;
    while nfft < win {
        nfft *= 2;
    }
    let n_mels = 40;
    // cos/sin table indexed by (k * n) mod nfft.
    let cos: Vec<f64> = (0..nfft)
        .map(|i| (2.0 * PI * i as f64 / nfft as f64).cos())
        .collect();
    let sin: Vec<f64> = (0..nfft)
        .map(|i| (2.0 * PI * i as f64 / nfft as f64).sin())
        .collect();

    let mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let imel = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let top = mel(fs / 2.0);
    let pts: Vec<f64> = (0..n_mels + 2)
        .map(|i| imel(top * i as f64 / (n_mels + 1) as f64))
        .collect();

    let mut out = Vec::new();
    let mut start = 0;
    while start + win <= x.len() {
        let seg: Vec<f64> = (0..win)
            .map(|n| x[start + n] * (0.5 - 0.5 * (2.0 * PI * n as f64 / win as f64).cos()))
            .collect();
        let power: Vec<f64> = (0..=nfft / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (n, v) in seg.iter().enumerate() {
                    let idx = (k * n) % nfft;
                    re += v * cos[idx];
                    im -= v * sin[idx];
                }
                re * re + im * im
            })
            .collect();
        let logmel: Vec<f64> = (0..n_mels)
            .map(|m| {
                let mut e = 0.0;
                for (k, p) in power.iter().enumerate() {
                    let f = k as f64 * fs / nfft as f64;
                    let w = if f > pts[m] && f <= pts[m + 1] {
                        (f - pts[m]) / (pts[m + 1] - pts[m])
                    } else if f > pts[m + 1] && f < pts[m + 2] {
                        (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1])
                    } else {
                        0.0
                    };
                    e += w * p;
                }
                e.max(1e-10).ln()
            })
            .collect();
        let coeffs: Vec<f64> = (1..=n_mfcc)
            .map(|q| {
                let mut s = 0.0;
                for (i, v) in logmel.iter().enumerate() {
                    s += v * (PI * q as f64 * (i as f64 + 0.5) / n_mels as f64).cos();
                }
                s * (2.0 / n_mels as f64).sqrt()
            })
            .collect();
        out.push(coeffs);
        start += hop;
    }
    out
}

/// Seeded random clip: noise plus a few random tones.
pub fn random_clip(seed: u64, ms: u32, sr: u32) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (sr as u64 * ms as u64 / 1000) as usize;
    let tones: Vec<(f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(100.0..sr as f64 / 2.5),
                rng.random_range(0.05..0.4),
            )
        })
        .collect();
    (0..n)
        .map(|i| {
            let t = i as f64 / sr as f64;
            let tone: f64 = tones
                .iter()
                .map(|&(f, a)| a * (2.0 * PI * f * t).sin())
                .sum();
            tone + rng.random_range(-0.1..0.1)
        })
        .collect()
}

/// Worst per-element `|a - b| / |b|`, with the denominator floored at 1e-3
/// so coefficients sitting at zero do not blow up.
pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-3))
        .fold(0.0, f64::max)
}

/// Which reader a malformed fixture is fed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reader {
    Wav,
    Ppm,
    Yolo,
    Detections,
    Manifest,
    Bundle,
}

fn le16(v: u16) -> [u8; 2] {
    v.to_le_bytes()
}

fn le32(v: u32) -> [u8; 4] {
    v.to_le_bytes()
}

/// Canonical 44-byte header for a PCM WAV with the given fields.
pub fn wav_header(format: u16, channels: u16, rate: u32, bits: u16, data_len: u32) -> Vec<u8> {
    let mut h = Vec::new();
    h.extend_from_slice(b"RIFF");
    h.extend_from_slice(&le32(36 + data_len));
    h.extend_from_slice(b"WAVEfmt ");
    h.extend_from_slice(&le32(16));
    h.extend_from_slice(&le16(format));
    h.extend_from_slice(&le16(channels));
    h.extend_from_slice(&le32(rate));
    let block = channels * bits / 8;
    h.extend_from_slice(&le32(rate * block as u32));
    h.extend_from_slice(&le16(block));
    h.extend_from_slice(&le16(bits));
    h.extend_from_slice(b"data");
    h.extend_from_slice(&le32(data_len));
    h
}

/// Hand-built broken inputs; every one must yield an error, never a panic.
pub fn malformed_fixtures() -> Vec<(&'static str, Reader, Vec<u8>)> {
    let mut ok_wav = wav_header(1, 1, 16_000, 16, 4);
    ok_wav.extend_from_slice(&[0, 0, 1, 0]);
    let mut fx: Vec<(&'static str, Reader, Vec<u8>)> = vec![
        ("empty wav", Reader::Wav, vec![]),
        ("riff only", Reader::Wav, b"RIFF".to_vec()),
        ("not riff", Reader::Wav, b"RIFX\0\0\0\0WAVE".to_vec()),
        ("not wave", Reader::Wav, b"RIFF\x04\0\0\0AVI ".to_vec()),
        ("truncated header", Reader::Wav, ok_wav[..30].to_vec()),
        ("8-bit pcm", Reader::Wav, {
            let mut v = wav_header(1, 1, 8000, 8, 2);
            v.extend_from_slice(&[1, 2]);
            v
        }),
        ("float wav", Reader::Wav, {
            let mut v = wav_header(3, 1, 8000, 32, 4);
            v.extend_from_slice(&[0; 4]);
            v
        }),
        ("six channels", Reader::Wav, {
            let mut v = wav_header(1, 6, 8000, 16, 12);
            v.extend_from_slice(&[0; 12]);
            v
        }),
        ("zero sample rate", Reader::Wav, {
            let mut v = wav_header(1, 1, 0, 16, 2);
            v.extend_from_slice(&[0; 2]);
            v
        }),
        ("data past end", Reader::Wav, wav_header(1, 1, 8000, 16, 1000)),
        ("empty data", Reader::Wav, wav_header(1, 1, 8000, 16, 0)),
        ("odd data length", Reader::Wav, {
            let mut v = wav_header(1, 1, 8000, 16, 3);
            v.extend_from_slice(&[0; 3]);
            v
        }),
        ("missing data chunk", Reader::Wav, ok_wav[..36].to_vec()),
        ("huge chunk size", Reader::Wav, {
            let mut v = ok_wav[..36].to_vec();
            v.extend_from_slice(b"LIST");
            v.extend_from_slice(&le32(u32::MAX));
            v
        }),
        ("empty ppm", Reader::Ppm, vec![]),
        ("p3 ascii", Reader::Ppm, b"P3\n1 1\n255\n0 0 0\n".to_vec()),
        ("ppm maxval 65535", Reader::Ppm, b"P6\n1 1\n65535\n\0\0\0\0\0\0".to_vec()),
        ("ppm short pixels", Reader::Ppm, b"P6\n2 2\n255\n\0\0\0".to_vec()),
        ("ppm zero width", Reader::Ppm, b"P6\n0 2\n255\n".to_vec()),
        ("ppm garbage dims", Reader::Ppm, b"P6\nab 2\n255\n".to_vec()),
        ("ppm giant dims", Reader::Ppm, b"P6\n99999999 99999999\n255\n".to_vec()),
        ("yolo four fields", Reader::Yolo, b"0 0.5 0.5 0.1\n".to_vec()),
        ("yolo class 7", Reader::Yolo, b"7 0.5 0.5 0.1 0.1\n".to_vec()),
        ("yolo nan", Reader::Yolo, b"0 nan 0.5 0.1 0.1\n".to_vec()),
        ("yolo outside image", Reader::Yolo, b"1 1.5 0.5 0.1 0.1\n".to_vec()),
        ("yolo not utf8", Reader::Yolo, vec![0xff, 0xfe, b'0']),
        ("detections not json", Reader::Detections, b"{frame: 1}\n".to_vec()),
        ("detections missing boxes", Reader::Detections, b"{\"frame\":\"a\"}\n".to_vec()),
        ("detections duplicate frame", Reader::Detections, b"{\"frame\":\"a\",\"boxes\":[]}\n{\"frame\":\"a\",\"boxes\":[]}\n".to_vec()),
        ("detections negative width", Reader::Detections, b"{\"frame\":\"a\",\"boxes\":[{\"cx\":0.5,\"cy\":0.5,\"w\":-0.1,\"h\":0.1,\"confidence\":0.5}]}\n".to_vec()),
        ("detections confidence 2", Reader::Detections, b"{\"frame\":\"a\",\"boxes\":[{\"cx\":0.5,\"cy\":0.5,\"w\":0.1,\"h\":0.1,\"confidence\":2.0}]}\n".to_vec()),
        ("manifest empty", Reader::Manifest, vec![]),
        ("manifest wrong format", Reader::Manifest, b"{\"format\":\"other\",\"version\":1,\"fps\":30,\"window_ms\":250,\"sample_rate\":16000}\n".to_vec()),
        ("manifest version 9", Reader::Manifest, b"{\"format\":\"ptl-corpus\",\"version\":9,\"fps\":30,\"window_ms\":250,\"sample_rate\":16000}\n".to_vec()),
        ("manifest bad label", Reader::Manifest, b"{\"format\":\"ptl-corpus\",\"version\":1,\"fps\":30,\"window_ms\":250,\"sample_rate\":16000}\n{\"id\":\"a\",\"condition\":\"clean\",\"label\":\"amber\",\"audio\":\"a.wav\",\"offset_ms\":0,\"frames\":[]}\n".to_vec()),
        ("manifest bad condition", Reader::Manifest, b"{\"format\":\"ptl-corpus\",\"version\":1,\"fps\":30,\"window_ms\":250,\"sample_rate\":16000}\n{\"id\":\"a\",\"condition\":\"foggy\",\"label\":\"red\",\"audio\":\"a.wav\",\"offset_ms\":0,\"frames\":[]}\n".to_vec()),
        ("manifest zero fps", Reader::Manifest, b"{\"format\":\"ptl-corpus\",\"version\":1,\"fps\":0,\"window_ms\":250,\"sample_rate\":16000}\n".to_vec()),
        ("bundle empty", Reader::Bundle, vec![]),
        ("bundle bad magic", Reader::Bundle, b"PTLM\x01\0\0\0\0".to_vec()),
        ("bundle version 2", Reader::Bundle, b"PTLP\x02".to_vec()),
        ("bundle truncated meta", Reader::Bundle, b"PTLP\x01\xff\0\0\0{}".to_vec()),
        ("bundle bad json", Reader::Bundle, b"PTLP\x01\x02\0\0\0{]".to_vec()),
    ];
    // Every prefix of a valid file except the full file.
    for cut in [1, 4, 8, 12, 20, 24, 35, 40, 43, 44] {
        fx.push(("wav prefix", Reader::Wav, ok_wav[..cut].to_vec()));
    }
    fx
}

/// Runs the reader for a fixture; `Ok(message)` means it produced an error
/// diagnostic, `Err` that it unexpectedly accepted the input.
pub fn diagnose(reader: Reader, bytes: &[u8]) -> Result<String, String> {
    use ptl_fusion::dataset_io::{
        decode_ppm, decode_wav, parse_detections, parse_manifest, parse_yolo_annotation,
    };
    use ptl_fusion::eval::PipelineModel;
    let text = || String::from_utf8(bytes.to_vec());
    let msg = match reader {
        Reader::Wav => decode_wav(bytes).err().map(|e| e.to_string()),
        Reader::Ppm => decode_ppm(bytes).err().map(|e| e.to_string()),
        Reader::Yolo => match text() {
            Ok(t) => parse_yolo_annotation(&t).err().map(|e| e.to_string()),
            Err(e) => Some(e.to_string()),
        },
        Reader::Detections => parse_detections(&text().map_err(|e| e.to_string())?)
            .err()
            .map(|e| e.to_string()),
        Reader::Manifest => parse_manifest(
            &text().map_err(|e| e.to_string())?,
            std::path::Path::new("."),
        )
        .err()
        .map(|e| e.to_string()),
        Reader::Bundle => PipelineModel::from_bytes(bytes)
            .err()
            .map(|e| e.to_string()),
    };
    match msg {
        Some(m) if !m.is_empty() => Ok(m),
        Some(_) => Err("empty diagnostic".into()),
        None => Err("input accepted".into()),
    }
}
