use proptest::prelude::*;

use ptl_fusion::classifiers::{ForestModel, ForestParams, KnnModel, LabeledDataset, Prediction};
use ptl_fusion::fusion::{
    average_vision_features, decision_level_fuse, select_frames, FrameEvidence, SyncConfig,
};
use ptl_fusion::vision::{
    classify_hue, hue_histogram, pixel_percentages, rgb_to_hsv, HueThresholds, ImageRGB,
    VisionFeatures,
};
use ptl_fusion::{Decision, Light};

/// Hue in degrees from the textbook formula, independent of the crate.
fn hue_degrees(r: f64, g: f64, b: f64) -> Option<f64> {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    if max == min {
        return None;
    }
    let d = max - min;
    let h = if max == r {
        ((g - b) / d).rem_euclid(6.0)
    } else if max == g {
        (b - r) / d + 2.0
    } else {
        (r - g) / d + 4.0
    };
    Some(60.0 * h)
}

fn features() -> impl Strategy<Value = VisionFeatures> {
    prop_oneof![
        Just(VisionFeatures::UNDETECTED),
        (0.0..100.0f64).prop_map(|p| VisionFeatures::detected(p, p)),
        (0.0..100.0f64).prop_map(|p| VisionFeatures::detected(p, 100.0 - p)),
        (0.0..100.0f64, 0.0..100.0f64).prop_map(|(r, g)| VisionFeatures::detected(r, g)),
    ]
}

fn image() -> impl Strategy<Value = ImageRGB> {
    (1usize..6, 1usize..6).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<[u8; 3]>(), w * h)
            .prop_map(move |px| ImageRGB::new(w, h, px).unwrap())
    })
}

fn dataset() -> impl Strategy<Value = LabeledDataset> {
    (4usize..30, 1usize..5).prop_flat_map(|(n, d)| {
        (
            proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, d), n),
            proptest::collection::vec(0usize..2, n),
        )
            .prop_map(|(rows, labels)| {
                LabeledDataset::new(rows, labels, Light::class_names()).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hue_rule_is_three_way(f in features()) {
        let d = classify_hue(&f);
        let expect = if !f.detected || f.p_red == f.p_green {
            Decision::Unavailable
        } else if f.p_red > f.p_green {
            Decision::Red
        } else {
            Decision::Green
        };
        prop_assert_eq!(d, expect);
    }

    #[test]
    fn hsv_matches_closed_form(px in any::<[u8; 3]>()) {
        let [r, g, b] = px.map(f64::from);
        let hsv = rgb_to_hsv(px);
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        prop_assert!((hsv.v - max).abs() < 1e-9);
        let s = if max == 0.0 { 0.0 } else { 255.0 * (max - min) / max };
        prop_assert!((hsv.s - s).abs() < 1e-9);
        match hue_degrees(r, g, b) {
            None => prop_assert_eq!(hsv.h, 0.0),
            Some(deg) => {
                let h = (deg / 2.0) % 180.0;
                prop_assert!((hsv.h - h).abs() < 1e-9, "{} vs {}", hsv.h, h);
            }
        }
        prop_assert!(hsv.h >= 0.0 && hsv.h < 180.0);
    }

    #[test]
    fn histogram_matches_naive_count(img in image()) {
        let h = hue_histogram(&img).unwrap();
        let mut naive = [0u64; 180];
        for y in 0..img.height {
            for x in 0..img.width {
                let [r, g, b] = img.get(x, y).map(f64::from);
                let bin = hue_degrees(r, g, b).map_or(0, |d| ((d / 2.0) % 180.0).floor() as usize).min(179);
                naive[bin] += 1;
            }
        }
        prop_assert_eq!(h.to_vec(), naive.to_vec());
        prop_assert_eq!(h.iter().sum::<u64>(), (img.width * img.height) as u64);
    }

    #[test]
    fn percentages_sum_to_hundred_or_zero(img in image()) {
        let f = pixel_percentages(&img, &HueThresholds::default()).unwrap();
        let s = f.p_red + f.p_green;
        prop_assert!(f.p_red >= 0.0 && f.p_green >= 0.0);
        prop_assert!(s == 0.0 || (s - 100.0).abs() < 1e-9, "{}", s);
    }

    #[test]
    fn frame_selection_shape(fps in 1.0..120.0f64, ms in 1u32..2000) {
        let cfg = SyncConfig::default();
        let picks = select_frames(fps, ms, &cfg).unwrap();
        let available = (fps * ms as f64 / 1000.0 + 1e-9).floor() as usize;
        prop_assert!(picks.len() <= 4);
        prop_assert!(picks.iter().all(|&i| i < available.min(7)));
        prop_assert!(picks.iter().enumerate().all(|(j, &i)| i == 2 * j));
        prop_assert_eq!(picks.len(), available.min(7).div_ceil(2).min(4));
    }

    #[test]
    fn averaging_counts_undetected_frames(fs in proptest::collection::vec(features(), 1..8)) {
        let (r, g) = average_vision_features(&fs);
        let n = fs.len() as f64;
        let er: f64 = fs.iter().filter(|f| f.detected).map(|f| f.p_red).sum::<f64>() / n;
        let eg: f64 = fs.iter().filter(|f| f.detected).map(|f| f.p_green).sum::<f64>() / n;
        prop_assert!((r - er).abs() < 1e-9 && (g - eg).abs() < 1e-9);
    }

    #[test]
    fn decision_fusion_is_monotone_in_audio(
        frames in proptest::collection::vec((prop_oneof![Just(Decision::Red), Just(Decision::Green), Just(Decision::Unavailable)], proptest::option::of(0.0..1.0f64)), 0..5),
        green in 0.0..1.0f64,
        bump in 0.0..1.0f64,
    ) {
        let frames: Vec<FrameEvidence> = frames.into_iter().map(|(label, confidence)| FrameEvidence { label, confidence }).collect();
        let before = decision_level_fuse(&frames, &Prediction::from_confidences(vec![1.0 - green, green]));
        let g2 = (green + bump).min(1.0);
        let after = decision_level_fuse(&frames, &Prediction::from_confidences(vec![1.0 - g2, g2]));
        if before.light == Light::Green {
            prop_assert_eq!(after.light, Light::Green);
        }
        if !before.used_vision {
            prop_assert_eq!(before.light, if green > 0.5 { Light::Green } else { Light::Red });
        }
    }

    #[test]
    fn forest_confidences_are_distributions(data in dataset(), seed in any::<u64>(), q in proptest::collection::vec(-10.0..10.0f64, 4)) {
        let params = ForestParams { n_trees: 15, ..ForestParams::default() }.with_seed(seed);
        let m = ForestModel::fit(&data, params).unwrap();
        let p = m.predict(&q[..data.n_features()]).unwrap();
        prop_assert!((p.confidences.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.confidences.iter().all(|&c| (0.0..=1.0).contains(&c)));
        // Same seed, same forest.
        prop_assert_eq!(ForestModel::fit(&data, params).unwrap(), m);
    }

    #[test]
    fn knn_respects_label_permutation(data in dataset(), q in proptest::collection::vec(-10.0..10.0f64, 4), k in 0usize..2) {
        let k = (2 * k + 1).min(data.len() | 1).min(data.len());
        let swapped = LabeledDataset::new(
            data.rows.clone(),
            data.labels.iter().map(|&l| 1 - l).collect(),
            data.class_names.clone(),
        ).unwrap();
        let a = KnnModel::fit(&data, k).unwrap().predict(&q[..data.n_features()]).unwrap();
        let b = KnnModel::fit(&swapped, k).unwrap().predict(&q[..data.n_features()]).unwrap();
        prop_assert!((a.confidences.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((a.confidences[0] - b.confidences[1]).abs() < 1e-12);
        if a.confidences[0] != a.confidences[1] {
            prop_assert_eq!(a.class, 1 - b.class);
        }
    }
}
