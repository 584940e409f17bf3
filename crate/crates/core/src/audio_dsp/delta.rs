use super::{AudioError, FeatureVector};

/// Regression deltas over a frame sequence:
/// `d_t = sum_{n=1..M} n (c_{t+n} - c_{t-n}) / (2 sum n^2)`, with the first and
/// last frame replicated past the edges. `order == 2` applies it twice.
pub fn compute_deltas(
    frames: &[FeatureVector],
    order: u8,
    half_window: usize,
) -> Result<Vec<FeatureVector>, AudioError> {
    if !(1..=2).contains(&order) || half_window == 0 {
        return Err(AudioError::InvalidConfig(format!(
            "delta order must be 1 or 2 and half window positive (got order {order}, M={half_window})"
        )));
    }
    let needed = 2 * half_window + 1;
    if frames.len() < needed {
        return Err(AudioError::TooFewFrames {
            needed,
            got: frames.len(),
        });
    }
    let dim = frames[0].len();
    if let Some((index, f)) = frames.iter().enumerate().find(|(_, f)| f.len() != dim) {
        return Err(AudioError::RaggedFrames {
            index,
            expected: dim,
            got: f.len(),
        });
    }

    let mut out = regression(frames, half_window);
    if order == 2 {
        out = regression(&out, half_window);
    }
    Ok(out)
}

fn regression(frames: &[FeatureVector], m: usize) -> Vec<FeatureVector> {
    let last = frames.len() as isize - 1;
    let denom = 2.0 * (1..=m).map(|n| (n * n) as f64).sum::<f64>();
    let at = |t: isize| &frames[t.clamp(0, last) as usize].values;

    (0..frames.len() as isize)
        .map(|t| {
            let mut d = vec![0.0; frames[0].len()];
            for n in 1..=m as isize {
                let (fwd, back) = (at(t + n), at(t - n));
                for (k, slot) in d.iter_mut().enumerate() {
                    *slot += n as f64 * (fwd[k] - back[k]);
                }
            }
            d.iter_mut().for_each(|x| *x /= denom);
            FeatureVector::new(d, frames[0].layout)
        })
        .collect()
}
