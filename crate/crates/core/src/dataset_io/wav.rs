use std::path::Path;

use super::{read_bytes, write_bytes, FormatError};
use crate::audio_dsp::AudioClip;

const PCM: u16 = 0x0001;
const EXTENSIBLE: u16 = 0xFFFE;

fn err(offset: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Wav {
        offset,
        reason: reason.into(),
    }
}

fn u16_at(b: &[u8], at: usize) -> Result<u16, FormatError> {
    b.get(at..at + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| err(at, "unexpected end of file"))
}

fn u32_at(b: &[u8], at: usize) -> Result<u32, FormatError> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| err(at, "unexpected end of file"))
}

/// Decodes a RIFF/WAVE PCM16 file. Samples are scaled by 1/32768 and stereo
/// is averaged to mono.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, FormatError> {
    if bytes.get(0..4) != Some(b"RIFF") {
        return Err(err(0, "missing RIFF tag"));
    }
    if bytes.get(8..12) != Some(b"WAVE") {
        return Err(err(8, "missing WAVE tag"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u32)> = None; // (channels, sample rate)
    while pos < bytes.len() {
        let id = bytes
            .get(pos..pos + 4)
            .ok_or_else(|| err(pos, "truncated chunk header"))?;
        let size = u32_at(bytes, pos + 4)? as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(err(pos + 4, format!("fmt chunk too small ({size} bytes)")));
                }
                let mut tag = u16_at(bytes, body)?;
                let channels = u16_at(bytes, body + 2)?;
                let rate = u32_at(bytes, body + 4)?;
                let bits = u16_at(bytes, body + 14)?;
                if tag == EXTENSIBLE && size >= 40 {
                    tag = u16_at(bytes, body + 24)?;
                }
                if tag != PCM || bits != 16 {
                    return Err(FormatError::UnsupportedEncoding {
                        format_tag: tag,
                        bits,
                    });
                }
                if !(1..=2).contains(&channels) {
                    return Err(err(
                        body + 2,
                        format!("{channels} channels; only mono and stereo are read"),
                    ));
                }
                if rate == 0 {
                    return Err(err(body + 4, "zero sample rate"));
                }
                fmt = Some((channels, rate));
            }
            b"data" => {
                let (channels, rate) =
                    fmt.ok_or_else(|| err(pos, "data chunk before fmt chunk"))?;
                let data = bytes.get(body..body + size).ok_or_else(|| {
                    err(
                        pos + 4,
                        format!("data chunk claims {size} bytes, file ends first"),
                    )
                })?;
                if data.is_empty() {
                    return Err(FormatError::EmptyData);
                }
                let frame = 2 * channels as usize;
                if data.len() % frame != 0 {
                    return Err(err(
                        body + data.len() - data.len() % frame,
                        "partial sample frame",
                    ));
                }
                let samples = data
                    .chunks_exact(frame)
                    .map(|f| {
                        let ch: Vec<f64> = f
                            .chunks_exact(2)
                            .map(|s| i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0)
                            .collect();
                        ch.iter().sum::<f64>() / ch.len() as f64
                    })
                    .collect();
                return Ok(AudioClip::new(samples, rate));
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(err(bytes.len(), "no data chunk"))
}

fn to_pcm16(x: f64) -> i16 {
    (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Encodes a mono PCM16 file with a canonical 44-byte header.
pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &clip.samples {
        out.extend_from_slice(&to_pcm16(s).to_le_bytes());
    }
    out
}

pub fn read_wav(path: &Path) -> Result<AudioClip, FormatError> {
    decode_wav(&read_bytes(path)?)
}

pub fn write_wav(clip: &AudioClip, path: &Path) -> Result<(), FormatError> {
    write_bytes(path, &encode_wav(clip))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcm_file(tag: u16, channels: u16, bits: u16, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&((36 + data.len()) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&tag.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&16_000u32.to_le_bytes());
        out.extend_from_slice(&(16_000u32 * channels as u32 * bits as u32 / 8).to_le_bytes());
        out.extend_from_slice(&(channels * bits / 8).to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
        out.extend_from_slice(data);
        out
    }

    fn le(samples: &[i16]) -> Vec<u8> {
        samples.iter().flat_map(|s| s.to_le_bytes()).collect()
    }

    #[test]
    fn normalisation() {
        let clip = decode_wav(&pcm_file(PCM, 1, 16, &le(&[0, 16384, -32768]))).unwrap();
        assert_eq!(clip.samples, vec![0.0, 0.5, -1.0]);
        assert_eq!(clip.sample_rate, 16_000);
    }

    #[test]
    fn stereo_downmix() {
        let clip = decode_wav(&pcm_file(PCM, 2, 16, &le(&[16384, -16384]))).unwrap();
        assert_eq!(clip.samples, vec![0.0]);
    }

    #[test]
    fn mu_law_rejected() {
        let r = decode_wav(&pcm_file(7, 1, 8, &[1, 2, 3]));
        assert_eq!(
            r,
            Err(FormatError::UnsupportedEncoding {
                format_tag: 7,
                bits: 8
            })
        );
    }

    #[test]
    fn empty_and_truncated_data() {
        assert_eq!(
            decode_wav(&pcm_file(PCM, 1, 16, &[])),
            Err(FormatError::EmptyData)
        );
        let mut f = pcm_file(PCM, 1, 16, &le(&[1, 2, 3]));
        f.truncate(f.len() - 2);
        assert!(matches!(
            decode_wav(&f),
            Err(FormatError::Wav { offset: 40, .. })
        ));
        assert!(matches!(
            decode_wav(b"RIFX"),
            Err(FormatError::Wav { offset: 0, .. })
        ));
    }

    #[test]
    fn clipping_saturates() {
        let bytes = encode_wav(&AudioClip::new(vec![1.5, -2.0, 1.0], 8000));
        let back = decode_wav(&bytes).unwrap();
        assert_eq!(
            back.samples,
            vec![32767.0 / 32768.0, -1.0, 32767.0 / 32768.0]
        );
    }

    #[test]
    fn empty_clip_writes_valid_header() {
        let bytes = encode_wav(&AudioClip::new(vec![], 8000));
        assert_eq!(bytes.len(), 44);
        assert_eq!(decode_wav(&bytes), Err(FormatError::EmptyData));
    }

    #[test]
    fn skips_unknown_chunks() {
        let mut f = pcm_file(PCM, 1, 16, &le(&[100]));
        // splice a LIST chunk (odd size, padded) before data
        let data_at = f.len() - 10;
        let list = [b"LIST".as_slice(), &3u32.to_le_bytes(), &[1, 2, 3, 0]].concat();
        f.splice(data_at..data_at, list);
        assert_eq!(decode_wav(&f).unwrap().samples, vec![100.0 / 32768.0]);
    }
}
