use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SynthError;
use crate::vision::{BoundingBox, BoxLabel, ImageRGB};
use crate::Light;

pub const RED_HUE: f64 = 175.0;
pub const GREEN_HUE: f64 = 90.0;
pub const MIN_DIM: usize = 64;

const HOUSING_RGB: [u8; 3] = [28, 28, 30];
const OCCLUDER_RGB: [u8; 3] = [128, 126, 122];
const SPECKLE_SIGMA: f64 = 5.0;

/// Full description of one synthetic camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSpec {
    /// `None` renders the street background without a PTL.
    pub label: Option<Light>,
    pub width: usize,
    pub height: usize,
    /// Share of the housing width hidden behind a grey occluder.
    pub occlusion: f64,
    /// Maximum hue deviation of the lit disc, in hue units.
    pub hue_jitter: f64,
    /// Housing displacement from the frame centre, in pixels.
    pub offset: (i32, i32),
    pub seed: u64,
}

impl FrameSpec {
    pub fn new(label: Option<Light>, seed: u64) -> Self {
        Self {
            label,
            width: MIN_DIM,
            height: MIN_DIM,
            occlusion: 0.0,
            hue_jitter: 2.0,
            offset: (0, 0),
            seed,
        }
    }
}

/// A frame showing one lit PTL and the housing's truth box.
pub fn synth_frame(
    label: Light,
    width: usize,
    height: usize,
    occlusion_fraction: f64,
    jitter: f64,
    seed: u64,
) -> Result<(ImageRGB, BoundingBox), SynthError> {
    let spec = FrameSpec {
        width,
        height,
        occlusion: occlusion_fraction,
        hue_jitter: jitter,
        ..FrameSpec::new(Some(label), seed)
    };
    let (img, truth) = render_frame(&spec)?;
    Ok((img, truth.expect("labelled frames carry a truth box")))
}

pub fn render_frame(spec: &FrameSpec) -> Result<(ImageRGB, Option<BoundingBox>), SynthError> {
    let (w, h) = (spec.width, spec.height);
    if w < MIN_DIM || h < MIN_DIM {
        return Err(SynthError::Dims {
            width: w,
            height: h,
        });
    }
    if !(0.0..=1.0).contains(&spec.occlusion) {
        return Err(SynthError::Occlusion(spec.occlusion));
    }
    if !(spec.hue_jitter >= 0.0 && spec.hue_jitter < 10.0) {
        return Err(SynthError::Jitter(spec.hue_jitter));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base: u8 = rng.random_range(95..150);
    let mut img = ImageRGB::filled(w, h, [base, base, base.saturating_sub(6)]);

    let mut truth = None;
    if let Some(light) = spec.label {
        let hw = (w as f64 * 0.34).round() as i64;
        let hh = (h as f64 * 0.56).round() as i64;
        let x0 = (w as i64 - hw) / 2 + spec.offset.0 as i64;
        let y0 = (h as i64 - hh) / 2 + spec.offset.1 as i64;
        fill_rect(&mut img, x0, y0, hw, hh, HOUSING_RGB);

        let hue = match light {
            Light::Red => RED_HUE,
            Light::Green => GREEN_HUE,
        } + rng.random_range(-1.0..=1.0) * spec.hue_jitter;
        let sat = rng.random_range(0.85..=1.0);
        let val = rng.random_range(0.8..=1.0);
        let rgb = hsv_to_rgb(hue.rem_euclid(180.0), sat, val);
        // Red above, green below, as on a two-aspect signal head.
        let r = hw as f64 * 0.36;
        let cx = x0 as f64 + hw as f64 / 2.0;
        let cy = match light {
            Light::Red => y0 as f64 + hh as f64 * 0.27,
            Light::Green => y0 as f64 + hh as f64 * 0.73,
        };
        for y in (cy - r).floor() as i64..=(cy + r).ceil() as i64 {
            for x in (cx - r).floor() as i64..=(cx + r).ceil() as i64 {
                let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                if dx * dx + dy * dy <= r * r {
                    put(&mut img, x, y, rgb);
                }
            }
        }

        let covered = (hw as f64 * spec.occlusion).round() as i64;
        if covered > 0 {
            // Grey pole or pedestrian entering from the left, one pixel of
            // margin so a full occlusion leaves no lit edge.
            fill_rect(
                &mut img,
                x0 - 1,
                y0 - 1,
                covered + 1 + i64::from(covered == hw),
                hh + 2,
                OCCLUDER_RGB,
            );
        }

        let (cx0, cy0) = (x0.clamp(0, w as i64), y0.clamp(0, h as i64));
        let (cx1, cy1) = ((x0 + hw).clamp(0, w as i64), (y0 + hh).clamp(0, h as i64));
        if cx1 > cx0 && cy1 > cy0 {
            let b = BoundingBox::new(
                (cx0 + cx1) as f64 / 2.0 / w as f64,
                (cy0 + cy1) as f64 / 2.0 / h as f64,
                (cx1 - cx0) as f64 / w as f64,
                (cy1 - cy0) as f64 / h as f64,
            )
            .with_label(match light {
                Light::Red => BoxLabel::Red,
                Light::Green => BoxLabel::Green,
            });
            truth = Some(b);
        }
    }

    // Luminance speckle: the same offset on all channels keeps grey pixels
    // grey and barely moves the hue of saturated ones.
    let speckle = Normal::new(0.0, SPECKLE_SIGMA).expect("finite sigma");
    for p in img.pixels.iter_mut() {
        let d = speckle.sample(&mut rng);
        for c in p.iter_mut() {
            *c = (*c as f64 + d).round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok((img, truth))
}

fn put(img: &mut ImageRGB, x: i64, y: i64, rgb: [u8; 3]) {
    if x >= 0 && y >= 0 && (x as usize) < img.width && (y as usize) < img.height {
        img.set(x as usize, y as usize, rgb);
    }
}

fn fill_rect(img: &mut ImageRGB, x0: i64, y0: i64, w: i64, h: i64, rgb: [u8; 3]) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            put(img, x, y, rgb);
        }
    }
}

/// Inverse of the hexcone conversion; `h` on the 0-180 scale, `s`, `v` in [0,1].
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = h / 30.0;
    let c = v * s;
    let x = c * (1.0 - (h6 % 2.0 - 1.0).abs());
    let (r, g, b) = match h6 as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}
