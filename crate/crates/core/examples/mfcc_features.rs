//! MFCC vectors of a synthetic red and green window, with and without deltas.

use std::error::Error;

use ptl_fusion::audio_dsp::{DeltaMode, MfccConfig, MfccExtractor};
use ptl_fusion::synth::synth_audio;
use ptl_fusion::Light;

fn main() -> Result<(), Box<dyn Error>> {
    for light in Light::ALL {
        let clip = synth_audio(Some(light), 250, 16_000, 20.0, false, 7)?;
        for deltas in DeltaMode::ALL {
            let cfg = MfccConfig::default().with_n_mfcc(13).with_deltas(deltas);
            let v = MfccExtractor::new(&cfg, clip.sample_rate)?.features(&clip)?;
            let head: Vec<String> = v
                .values
                .iter()
                .take(4)
                .map(|x| format!("{x:8.3}"))
                .collect();
            println!(
                "{light:5} {deltas:10}: dim {:2}, first {}",
                v.len(),
                head.join(" ")
            );
        }
    }
    Ok(())
}
