use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FormatError;

/// Seeded stratified split into `(train, test)`.
///
/// Each stratum (items sharing a key) is shuffled independently and
/// `round(len * test_fraction)` of its items go to the test side. Both halves
/// keep the input order.
pub fn split_stratified<T: Clone, K: Ord>(
    items: &[T],
    key: impl Fn(&T) -> K,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>), FormatError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(FormatError::Fraction(test_fraction));
    }
    let mut strata: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        strata.entry(key(it)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; items.len()];
    for idx in strata.values_mut() {
        idx.shuffle(&mut rng);
        let n_test = (idx.len() as f64 * test_fraction).round() as usize;
        for &i in &idx[..n_test] {
            is_test[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (it, t) in items.iter().zip(is_test) {
        if t {
            test.push(it.clone());
        } else {
            train.push(it.clone());
        }
    }
    Ok((train, test))
}
