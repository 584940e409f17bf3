/// HSV triple on the OpenCV 8-bit scales: hue in `[0, 180)` half-degrees,
/// saturation and value in `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl Hsv {
    /// Histogram bin of the hue.
    pub fn bin(&self) -> usize {
        (self.h as usize).min(179)
    }
}

/// Hexcone RGB to HSV. Achromatic pixels (`s == 0`) get hue 0.
pub fn rgb_to_hsv([r, g, b]: [u8; 3]) -> Hsv {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = (max - min) as f64;
    let v = max as f64;
    if max == 0 || delta == 0.0 {
        return Hsv { h: 0.0, s: 0.0, v };
    }
    let s = 255.0 * delta / max as f64;
    let (r, g, b) = (r as f64, g as f64, b as f64);
    let mut deg = if max as f64 == r {
        60.0 * (g - b) / delta
    } else if max as f64 == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if deg < 0.0 {
        deg += 360.0;
    }
    let mut h = deg / 2.0;
    if h >= 180.0 {
        h -= 180.0;
    }
    Hsv { h, s, v }
}
