use std::path::Path;

use super::{read_bytes, write_bytes, FormatError};
use crate::vision::ImageRGB;

fn err(offset: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Image {
        offset,
        reason: reason.into(),
    }
}

/// Reads one whitespace-delimited header token, skipping `#` comments.
fn token(b: &[u8], pos: &mut usize) -> Result<(usize, u32), FormatError> {
    loop {
        while *pos < b.len() && b[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < b.len() && b[*pos] == b'#' {
            while *pos < b.len() && b[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < b.len() && b[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(err(start, "expected a decimal header field"));
    }
    std::str::from_utf8(&b[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .map(|v| (start, v))
        .ok_or_else(|| err(start, "header field out of range"))
}

/// Decodes a binary PPM (`P6`) with maxval 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<ImageRGB, FormatError> {
    if bytes.get(0..2) != Some(b"P6") {
        return Err(err(0, "bad magic; expected P6"));
    }
    let mut pos = 2;
    let (_, width) = token(bytes, &mut pos)?;
    let (_, height) = token(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err(err(3, "image has zero width or height"));
    }
    let (at, maxval) = token(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(FormatError::UnsupportedImage(format!(
            "PPM maxval {maxval} at byte {at}; only 255 is supported"
        )));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(err(pos, "missing whitespace after maxval"));
    }
    pos += 1;
    let (w, h) = (width as usize, height as usize);
    let need = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| err(3, "image dimensions overflow"))?;
    let data = &bytes[pos..];
    if data.len() < need {
        return Err(err(
            pos + data.len(),
            format!("truncated pixel data: {} of {need} bytes", data.len()),
        ));
    }
    let pixels = data[..need]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Ok(ImageRGB {
        width: w,
        height: h,
        pixels,
    })
}

pub fn encode_ppm(img: &ImageRGB) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.reserve(img.pixels.len() * 3);
    for p in &img.pixels {
        out.extend_from_slice(p);
    }
    out
}

pub fn write_ppm(img: &ImageRGB, path: &Path) -> Result<(), FormatError> {
    write_bytes(path, &encode_ppm(img))
}

/// Reads a PPM frame, or a PNG when built with the `png` feature.
pub fn read_image(path: &Path) -> Result<ImageRGB, FormatError> {
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        return read_png(path);
    }
    decode_ppm(&read_bytes(path)?)
}

#[cfg(feature = "png")]
fn read_png(path: &Path) -> Result<ImageRGB, FormatError> {
    let img = image::open(path)
        .map_err(|e| FormatError::UnsupportedImage(format!("{}: {e}", path.display())))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    Ok(ImageRGB {
        width: w as usize,
        height: h as usize,
        pixels: img.pixels().map(|p| p.0).collect(),
    })
}

#[cfg(not(feature = "png"))]
fn read_png(path: &Path) -> Result<ImageRGB, FormatError> {
    Err(FormatError::UnsupportedImage(format!(
        "{}: PNG support requires the `png` feature",
        path.display()
    )))
}
