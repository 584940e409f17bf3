//! Corpus manifests.
//!
//! A manifest is a JSON Lines file. The first line is a header, every later
//! line one window; paths are relative to the manifest's directory:
//!
//! ```text
//! {"format":"ptl-corpus","version":1,"fps":30.0,"window_ms":250,"sample_rate":44100}
//! {"id":"clean-00000","condition":"clean","label":"green","audio":"audio/clean-p000.wav","offset_ms":0,"frames":["frames/clean-p000/f00000.ppm",...]}
//! ```
//!
//! `label` is `red`, `green` or `none` (no PTL in view; vision training only).

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{read_bytes, FormatError};
use crate::Light;

pub const MANIFEST_FORMAT: &str = "ptl-corpus";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// Stationary robot, unobstructed view.
    Clean,
    /// View fully or partially blocked.
    Occluded,
    /// Robot walking: locomotion noise and camera shake.
    Moving,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Clean, Condition::Occluded, Condition::Moving];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Condition::Clean => "clean",
            Condition::Occluded => "occluded",
            Condition::Moving => "moving",
        })
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(Condition::Clean),
            "occluded" => Ok(Condition::Occluded),
            "moving" => Ok(Condition::Moving),
            other => Err(format!("unknown condition `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionFilter {
    #[default]
    All,
    Only(Condition),
}

impl ConditionFilter {
    pub fn accepts(self, c: Condition) -> bool {
        match self {
            ConditionFilter::All => true,
            ConditionFilter::Only(x) => x == c,
        }
    }
}

impl fmt::Display for ConditionFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionFilter::All => f.pad("all"),
            ConditionFilter::Only(c) => c.fmt(f),
        }
    }
}

impl FromStr for ConditionFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            Ok(ConditionFilter::All)
        } else {
            s.parse().map(ConditionFilter::Only)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format: String,
    pub version: u32,
    pub fps: f64,
    pub window_ms: u32,
    pub sample_rate: u32,
}

impl ManifestHeader {
    pub fn new(fps: f64, window_ms: u32, sample_rate: u32) -> Self {
        Self {
            format: MANIFEST_FORMAT.to_string(),
            version: MANIFEST_VERSION,
            fps,
            window_ms,
            sample_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusItem {
    pub id: String,
    pub condition: Condition,
    #[serde(serialize_with = "ser_label", deserialize_with = "de_label")]
    pub label: Option<Light>,
    pub audio: String,
    pub offset_ms: u32,
    pub frames: Vec<String>,
}

fn ser_label<S: Serializer>(l: &Option<Light>, s: S) -> Result<S::Ok, S::Error> {
    match l {
        Some(l) => s.serialize_str(&l.to_string()),
        None => s.serialize_str("none"),
    }
}

fn de_label<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Light>, D::Error> {
    let s = String::deserialize(d)?;
    if s == "none" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

/// Loaded manifest; item paths resolve against `root`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub root: PathBuf,
    pub header: ManifestHeader,
    pub items: Vec<CorpusItem>,
}

impl Corpus {
    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    /// Items carrying a light label and passing the condition filter.
    pub fn labelled(&self, filter: ConditionFilter) -> impl Iterator<Item = (&CorpusItem, Light)> {
        self.items
            .iter()
            .filter(move |it| filter.accepts(it.condition))
            .filter_map(|it| it.label.map(|l| (it, l)))
    }
}

/// Parses manifest text without touching the filesystem.
pub fn parse_manifest(text: &str, root: &Path) -> Result<Corpus, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| FormatError::line(1, "empty manifest"))?;
    let header: ManifestHeader = serde_json::from_str(first)
        .map_err(|e| FormatError::line(1, format!("bad header: {e}")))?;
    if header.format != MANIFEST_FORMAT {
        return Err(FormatError::line(
            1,
            format!("not a corpus manifest (format `{}`)", header.format),
        ));
    }
    if header.version != MANIFEST_VERSION {
        return Err(FormatError::line(
            1,
            format!("unsupported manifest version {}", header.version),
        ));
    }
    if !(header.fps.is_finite() && header.fps > 0.0)
        || header.window_ms == 0
        || header.sample_rate == 0
    {
        return Err(FormatError::line(
            1,
            "fps, window_ms and sample_rate must be positive",
        ));
    }
    let mut ids = HashSet::new();
    let mut items = Vec::new();
    for (i, raw) in lines {
        let item: CorpusItem =
            serde_json::from_str(raw).map_err(|e| FormatError::line(i + 1, e.to_string()))?;
        if !ids.insert(item.id.clone()) {
            return Err(FormatError::line(
                i + 1,
                format!("duplicate id `{}`", item.id),
            ));
        }
        items.push(item);
    }
    Ok(Corpus {
        root: root.to_path_buf(),
        header,
        items,
    })
}

/// Loads a manifest and checks that every referenced file exists.
pub fn load_manifest(path: &Path) -> Result<Corpus, FormatError> {
    let bytes = read_bytes(path)?;
    let text =
        String::from_utf8(bytes).map_err(|_| FormatError::line(1, "manifest is not UTF-8"))?;
    let root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let corpus = parse_manifest(&text, &root)?;
    let mut checked = HashSet::new();
    for (n, it) in corpus.items.iter().enumerate() {
        for rel in std::iter::once(&it.audio).chain(&it.frames) {
            if checked.insert(rel.as_str()) && !corpus.resolve(rel).is_file() {
                return Err(FormatError::line(
                    n + 2,
                    format!("referenced file `{rel}` does not exist"),
                ));
            }
        }
    }
    Ok(corpus)
}

pub fn write_manifest(header: &ManifestHeader, items: &[CorpusItem]) -> String {
    let mut out = serde_json::to_string(header).expect("header serialises");
    out.push('\n');
    for it in items {
        out.push_str(&serde_json::to_string(it).expect("item serialises"));
        out.push('\n');
    }
    out
}
