//! Writes a small synthetic corpus and shows that the manifest is a pure
//! function of the seed.
//!
//! ```text
//! cargo run --example synth_corpus -- [out-dir] [seed]
//! ```

use std::error::Error;
use std::path::PathBuf;

use ptl_fusion::dataset_io::{load_manifest, Condition, ConditionFilter};
use ptl_fusion::synth::{manifest_hash, synth_corpus, CorpusConfig, MANIFEST_NAME};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("ptl-corpus"));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let cfg = CorpusConfig {
        no_ptl: 8,
        ..CorpusConfig::per_condition(24)
    }
    .with_seed(seed);
    synth_corpus(&cfg, &out)?;
    let manifest = out.join(MANIFEST_NAME);
    let first = manifest_hash(&manifest)?;
    synth_corpus(&cfg, &out)?;
    println!(
        "{} sha256 {first} (regenerated identical: {})",
        manifest.display(),
        manifest_hash(&manifest)? == first
    );

    let corpus = load_manifest(&manifest)?;
    for c in Condition::ALL {
        let n = corpus.labelled(ConditionFilter::Only(c)).count();
        println!("{c:8} {n} labelled windows");
    }
    let no_ptl = corpus.items.iter().filter(|i| i.label.is_none()).count();
    println!("no PTL   {no_ptl} windows");
    if let Some(item) = corpus.items.first() {
        println!(
            "first item {} -> {} at {} ms, {} frames",
            item.id,
            item.audio,
            item.offset_ms,
            item.frames.len()
        );
    }
    Ok(())
}
