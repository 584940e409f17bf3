//! Binary model format.
//!
//! ```text
//! magic    b"PTLM"
//! version  u8 (currently 1)
//! kind     u8 (1 = forest, 2 = knn)
//! n_feat   u32
//! n_class  u16, then per class: u16 byte length + UTF-8 name
//! payload  kind-specific, see `write_forest` / `write_knn`
//! ```
//! All integers and floats are little-endian. Trailing bytes are an error.

use super::{Classifier, ForestModel, ForestParams, KnnModel, MaxFeatures, ModelError, Node, Tree};

pub const MAGIC: &[u8; 4] = b"PTLM";
pub const FORMAT_VERSION: u8 = 1;

const KIND_FOREST: u8 = 1;
const KIND_KNN: u8 = 2;
const NODE_LEAF: u8 = 0;
const NODE_SPLIT: u8 = 1;

pub fn model_save(model: &Classifier) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);
    out.push(match model {
        Classifier::Forest(_) => KIND_FOREST,
        Classifier::Knn(_) => KIND_KNN,
    });
    put_u32(&mut out, model.n_features() as u32);
    put_u16(&mut out, model.class_names().len() as u16);
    for name in model.class_names() {
        put_u16(&mut out, name.len() as u16);
        out.extend_from_slice(name.as_bytes());
    }
    match model {
        Classifier::Forest(m) => write_forest(&mut out, m),
        Classifier::Knn(m) => write_knn(&mut out, m),
    }
    out
}

fn write_forest(out: &mut Vec<u8>, m: &ForestModel) {
    let p = &m.params;
    put_u32(out, p.n_trees as u32);
    put_u32(out, p.max_depth.map_or(u32::MAX, |d| d as u32));
    let (tag, count) = match p.max_features {
        MaxFeatures::Sqrt => (0u8, 0u32),
        MaxFeatures::All => (1, 0),
        MaxFeatures::Count(c) => (2, c as u32),
    };
    out.push(tag);
    put_u32(out, count);
    out.push(p.bootstrap as u8);
    put_u32(out, p.min_samples_split as u32);
    put_u64(out, p.seed);
    put_u32(out, m.trees.len() as u32);
    for t in &m.trees {
        put_u32(out, t.nodes.len() as u32);
        for node in &t.nodes {
            match node {
                Node::Leaf { dist } => {
                    out.push(NODE_LEAF);
                    dist.iter().for_each(|&d| put_f64(out, d));
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(NODE_SPLIT);
                    put_u32(out, *feature as u32);
                    put_f64(out, *threshold);
                    put_u32(out, *left as u32);
                    put_u32(out, *right as u32);
                }
            }
        }
    }
}

fn write_knn(out: &mut Vec<u8>, m: &KnnModel) {
    put_u32(out, m.k as u32);
    put_u32(out, m.rows.len() as u32);
    for (row, &label) in m.rows.iter().zip(&m.labels) {
        put_u16(out, label as u16);
        row.iter().for_each(|&x| put_f64(out, x));
    }
}

pub fn model_load(bytes: &[u8]) -> Result<Classifier, ModelError> {
    if bytes.len() < MAGIC.len() || &bytes[..4] != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let mut r = Reader { buf: bytes, pos: 4 };
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(ModelError::Version {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let kind = r.u8()?;
    let n_features = r.u32()? as usize;
    let n_classes = r.u16()? as usize;
    let mut class_names = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let len = r.u16()? as usize;
        let at = r.pos;
        let raw = r.take(len)?;
        let name =
            std::str::from_utf8(raw).map_err(|_| r.corrupt_at(at, "class name is not UTF-8"))?;
        class_names.push(name.to_string());
    }
    if n_classes == 0 {
        return Err(r.corrupt("model has no classes"));
    }
    let model = match kind {
        KIND_FOREST => Classifier::Forest(read_forest(&mut r, n_features, class_names)?),
        KIND_KNN => Classifier::Knn(read_knn(&mut r, n_features, class_names)?),
        other => return Err(r.corrupt_at(5, &format!("unknown model kind {other}"))),
    };
    if r.pos != bytes.len() {
        return Err(r.corrupt("trailing bytes after model payload"));
    }
    Ok(model)
}

fn read_forest(
    r: &mut Reader<'_>,
    n_features: usize,
    class_names: Vec<String>,
) -> Result<ForestModel, ModelError> {
    let n_trees = r.u32()? as usize;
    let max_depth = match r.u32()? {
        u32::MAX => None,
        d => Some(d as usize),
    };
    let at = r.pos;
    let tag = r.u8()?;
    let count = r.u32()? as usize;
    let max_features = match tag {
        0 => MaxFeatures::Sqrt,
        1 => MaxFeatures::All,
        2 => MaxFeatures::Count(count),
        _ => return Err(r.corrupt_at(at, "unknown max_features tag")),
    };
    let bootstrap = r.u8()? != 0;
    let min_samples_split = r.u32()? as usize;
    let seed = r.u64()?;
    let stored = r.u32()? as usize;
    if stored != n_trees || n_trees == 0 {
        return Err(r.corrupt("tree count does not match header"));
    }
    let n_classes = class_names.len();
    let mut trees = Vec::with_capacity(n_trees.min(4096));
    for _ in 0..n_trees {
        let n_nodes = r.u32()? as usize;
        if n_nodes == 0 {
            return Err(r.corrupt("empty tree"));
        }
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 16));
        for idx in 0..n_nodes {
            let at = r.pos;
            match r.u8()? {
                NODE_LEAF => {
                    let dist = (0..n_classes)
                        .map(|_| r.f64())
                        .collect::<Result<Vec<_>, _>>()?;
                    nodes.push(Node::Leaf { dist });
                }
                NODE_SPLIT => {
                    let feature = r.u32()? as usize;
                    let threshold = r.f64()?;
                    let left = r.u32()? as usize;
                    let right = r.u32()? as usize;
                    if feature >= n_features
                        || left <= idx
                        || right <= idx
                        || left >= n_nodes
                        || right >= n_nodes
                    {
                        return Err(r.corrupt_at(at, "split node references out of range"));
                    }
                    nodes.push(Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    });
                }
                _ => return Err(r.corrupt_at(at, "unknown node tag")),
            }
        }
        trees.push(Tree { nodes });
    }
    Ok(ForestModel {
        params: ForestParams {
            n_trees,
            max_depth,
            max_features,
            bootstrap,
            min_samples_split,
            seed,
        },
        n_features,
        class_names,
        trees,
    })
}

fn read_knn(
    r: &mut Reader<'_>,
    n_features: usize,
    class_names: Vec<String>,
) -> Result<KnnModel, ModelError> {
    let k = r.u32()? as usize;
    let n_rows = r.u32()? as usize;
    if k == 0 || k > n_rows {
        return Err(r.corrupt("k outside [1, rows]"));
    }
    let mut rows = Vec::with_capacity(n_rows.min(1 << 20));
    let mut labels = Vec::with_capacity(n_rows.min(1 << 20));
    for _ in 0..n_rows {
        let at = r.pos;
        let label = r.u16()? as usize;
        if label >= class_names.len() {
            return Err(r.corrupt_at(at, "label outside class set"));
        }
        labels.push(label);
        rows.push(
            (0..n_features)
                .map(|_| r.f64())
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(KnnModel {
        k,
        n_features,
        class_names,
        rows,
        labels,
    })
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn corrupt(&self, reason: &str) -> ModelError {
        self.corrupt_at(self.pos, reason)
    }

    fn corrupt_at(&self, offset: usize, reason: &str) -> ModelError {
        ModelError::Corrupt {
            offset,
            reason: reason.to_string(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| self.corrupt("unexpected end of data"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], ModelError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ModelError> {
        self.array().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        self.array().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, ModelError> {
        self.array().map(f64::from_le_bytes)
    }
}

fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::LabeledDataset;
    use crate::Light;

    fn small_forest() -> Classifier {
        let rows = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let labels: Vec<Light> = (0..20)
            .map(|i| if i < 10 { Light::Red } else { Light::Green })
            .collect();
        let data = LabeledDataset::from_lights(rows, &labels).unwrap();
        ForestModel::fit(
            &data,
            ForestParams {
                n_trees: 5,
                ..ForestParams::default()
            },
        )
        .unwrap()
        .into()
    }

    #[test]
    fn truncated_payload_is_corrupt() {
        let bytes = model_save(&small_forest());
        for cut in [6, 12, bytes.len() / 2, bytes.len() - 1] {
            assert!(
                matches!(model_load(&bytes[..cut]), Err(ModelError::Corrupt { .. })),
                "cut {cut}"
            );
        }
    }

    #[test]
    fn wrong_version_byte() {
        let mut bytes = model_save(&small_forest());
        bytes[4] = 9;
        assert_eq!(
            model_load(&bytes),
            Err(ModelError::Version {
                found: 9,
                supported: FORMAT_VERSION
            })
        );
    }

    #[test]
    fn bad_magic_and_trailing_bytes() {
        assert_eq!(model_load(b"NOPE\x01"), Err(ModelError::BadMagic));
        let mut bytes = model_save(&small_forest());
        bytes.push(0);
        assert!(matches!(
            model_load(&bytes),
            Err(ModelError::Corrupt { .. })
        ));
    }

    #[test]
    fn roundtrip_equal() {
        let m = small_forest();
        assert_eq!(model_load(&model_save(&m)).unwrap(), m);
    }
}
