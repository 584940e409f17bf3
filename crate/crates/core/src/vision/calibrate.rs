use super::{gated_hue_histogram, HueRange, ImageRGB, VisionError, HUE_BINS};
use crate::Light;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    /// Truncate the larger class to the size of the smaller one.
    pub balance: bool,
    /// Bins at or above this fraction of the peak extend the range.
    pub peak_fraction: f64,
    pub min_sat: f64,
    pub min_val: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            balance: true,
            peak_fraction: 0.10,
            min_sat: 80.0,
            min_val: 80.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalibratedRanges {
    pub green: HueRange,
    pub red: HueRange,
}

/// Derives one hue range per light from labelled box crops.
///
/// Each class's gated hue histograms are averaged; the range grows outward
/// from the peak bin while neighbouring bins stay at or above
/// `peak_fraction * peak`.
pub fn calibrate_hue_ranges(
    regions: &[(Light, ImageRGB)],
    cfg: &CalibrationConfig,
) -> Result<CalibratedRanges, VisionError> {
    let of = |l: Light| {
        regions
            .iter()
            .filter(move |(lab, _)| *lab == l)
            .map(|(_, img)| img)
    };
    let (n_red, n_green) = (of(Light::Red).count(), of(Light::Green).count());
    for (l, n) in [(Light::Red, n_red), (Light::Green, n_green)] {
        if n == 0 {
            return Err(VisionError::MissingLabel(l.to_string()));
        }
    }
    let take = if cfg.balance {
        n_red.min(n_green)
    } else {
        usize::MAX
    };

    let range_for = |l: Light| -> Result<HueRange, VisionError> {
        let mut mean = [0.0f64; HUE_BINS];
        let mut n = 0usize;
        for img in of(l).take(take) {
            let h = gated_hue_histogram(img, cfg.min_sat, cfg.min_val)?;
            for (m, c) in mean.iter_mut().zip(h) {
                *m += c as f64;
            }
            n += 1;
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        peak_range(&mean, cfg.peak_fraction).ok_or_else(|| VisionError::NoEvidence(l.to_string()))
    };

    let red = range_for(Light::Red)?;
    let green = range_for(Light::Green)?;
    if red.overlaps(&green) {
        return Err(VisionError::Overlap { red, green });
    }
    Ok(CalibratedRanges { green, red })
}

fn peak_range(hist: &[f64; HUE_BINS], fraction: f64) -> Option<HueRange> {
    let (peak_bin, &peak) =
        hist.iter().enumerate().fold(
            (0, &0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    if peak <= 0.0 {
        return None;
    }
    let floor = fraction * peak;
    let mut lo = peak_bin;
    while lo > 0 && hist[lo - 1] >= floor && hist[lo - 1] > 0.0 {
        lo -= 1;
    }
    let mut hi = peak_bin + 1;
    while hi < HUE_BINS && hist[hi] >= floor && hist[hi] > 0.0 {
        hi += 1;
    }
    Some(HueRange {
        lo: lo as u16,
        hi: hi as u16,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_region_per_class() {
        let red = ImageRGB::filled(4, 4, [255, 0, 42]);
        let green = ImageRGB::filled(4, 4, [0, 255, 255]);
        let r = calibrate_hue_ranges(
            &[(Light::Red, red), (Light::Green, green)],
            &CalibrationConfig::default(),
        )
        .unwrap();
        assert!(r.red.contains(175.06));
        assert!(r.green.contains(90.0));
        assert!(!r.red.overlaps(&r.green));
    }

    #[test]
    fn missing_label() {
        let red = ImageRGB::filled(4, 4, [255, 0, 42]);
        assert_eq!(
            calibrate_hue_ranges(&[(Light::Red, red)], &CalibrationConfig::default()),
            Err(VisionError::MissingLabel("green".into()))
        );
    }

    #[test]
    fn overlap_reported() {
        let a = ImageRGB::filled(4, 4, [0, 255, 255]);
        let r = calibrate_hue_ranges(
            &[(Light::Red, a.clone()), (Light::Green, a)],
            &CalibrationConfig::default(),
        );
        assert!(matches!(r, Err(VisionError::Overlap { .. })));
    }

    #[test]
    fn peak_expansion_stops_below_fraction() {
        let mut h = [0.0; HUE_BINS];
        h[88] = 5.0;
        h[89] = 20.0;
        h[90] = 100.0;
        h[91] = 10.0;
        h[92] = 9.0;
        let r = peak_range(&h, 0.10).unwrap();
        assert_eq!((r.lo, r.hi), (89, 92));
    }

    #[test]
    fn balance_truncates_larger_class() {
        // First green region is hue 90, later ones hue 60; balancing to one
        // region keeps only the first.
        let mut regions = vec![
            (Light::Red, ImageRGB::filled(2, 2, [255, 0, 42])),
            (Light::Green, ImageRGB::filled(2, 2, [0, 255, 255])),
        ];
        for _ in 0..3 {
            regions.push((Light::Green, ImageRGB::filled(2, 2, [0, 255, 0])));
        }
        let balanced = calibrate_hue_ranges(&regions, &CalibrationConfig::default()).unwrap();
        assert!(balanced.green.contains(90.0));
        let unbalanced = calibrate_hue_ranges(
            &regions,
            &CalibrationConfig {
                balance: false,
                ..CalibrationConfig::default()
            },
        )
        .unwrap();
        assert!(unbalanced.green.contains(60.0));
    }
}
