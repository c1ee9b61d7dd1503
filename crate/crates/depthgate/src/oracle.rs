//! Exhaustive depth-first search for sorting networks on small channel
//! counts. This is the ground truth the encoder and solver are checked
//! against, so it shares no code path with either: it works directly on
//! reachable output sets.

use crate::bits::OutputSet;
use crate::error::{Error, Result};
use crate::layers::{enumerate_layers, first_layer};
use crate::network::{Layer, Network};
use std::collections::HashMap;

pub const MAX_ORACLE_CHANNELS: usize = 7;
pub const MAX_ORACLE_DEPTH: usize = 6;

/// Verified depth bounds for one channel count.
#[derive(Debug, Clone)]
pub struct DepthBound {
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    pub witness: Option<Network>,
}

/// Failure memo: output sets proven unsortable within a remaining depth,
/// bucketed by member count for the subset-dominance scan.
struct FailureMemo {
    exact: HashMap<Vec<u64>, usize>,
    by_len: Vec<Vec<(Vec<u64>, usize)>>,
}

const DOMINANCE_SCAN_CAP: usize = 64;

impl FailureMemo {
    fn new(n: usize) -> Self {
        Self { exact: HashMap::new(), by_len: vec![Vec::new(); (1 << n) + 1] }
    }

    /// Known unsortable within `remaining` layers? True on an exact hit with
    /// at least the remaining depth, or when a recorded failure is a subset
    /// of `set` (sorting a superset would sort the subset too).
    fn is_refuted(&self, set: &OutputSet, remaining: usize) -> bool {
        if let Some(&depth) = self.exact.get(set.words()) {
            if depth >= remaining {
                return true;
            }
        }
        for bucket in &self.by_len[..=set.len()] {
            for (words, depth) in bucket.iter().take(DOMINANCE_SCAN_CAP) {
                if *depth >= remaining
                    && words.iter().zip(set.words()).all(|(a, b)| a & !b == 0)
                {
                    return true;
                }
            }
        }
        false
    }

    fn record(&mut self, set: &OutputSet, remaining: usize) {
        let entry = self.exact.entry(set.words().to_vec()).or_insert(0);
        if remaining > *entry {
            *entry = remaining;
            self.by_len[set.len()].push((set.words().to_vec(), remaining));
        }
    }
}

struct Searcher {
    n: usize,
    layers: Vec<Layer>,
    memo: FailureMemo,
}

impl Searcher {
    fn new(n: usize) -> Result<Self> {
        let layers = enumerate_layers(n)?
            .layers()
            .iter()
            .filter(|l| !l.is_empty())
            .cloned()
            .collect();
        Ok(Self { n, layers, memo: FailureMemo::new(n) })
    }

    fn sorted_only(&self, set: &OutputSet) -> bool {
        set.all_sorted()
    }

    /// Candidate successor sets: the images of `set` under every layer,
    /// deduplicated, with dominated images (supersets of another image)
    /// removed and no-progress images dropped.
    fn successors(&self, set: &OutputSet) -> Vec<(Layer, OutputSet)> {
        let mut images: Vec<(Layer, OutputSet)> = Vec::new();
        'outer: for layer in &self.layers {
            let mut image = OutputSet::empty(self.n).expect("checked n");
            for value in set.iter_values() {
                image.insert_value(layer.apply_bits(value));
            }
            if image == *set {
                continue;
            }
            let mut drop_indices = Vec::new();
            for (idx, (_, existing)) in images.iter().enumerate() {
                if existing.is_subset_of(&image) {
                    continue 'outer; // dominated by an existing image
                }
                if image.is_subset_of(existing) {
                    drop_indices.push(idx);
                }
            }
            for idx in drop_indices.into_iter().rev() {
                images.remove(idx);
            }
            images.push((layer.clone(), image));
        }
        // prefer smaller reachable sets; tie-break on layer code
        images.sort_by_key(|(layer, image)| (image.len(), layer.code()));
        images
    }

    fn search(&mut self, set: &OutputSet, remaining: usize, stack: &mut Vec<Layer>) -> bool {
        if self.sorted_only(set) {
            return true;
        }
        if remaining == 0 || self.memo.is_refuted(set, remaining) {
            return false;
        }
        for (layer, image) in self.successors(set) {
            stack.push(layer);
            if self.search(&image, remaining - 1, stack) {
                return true;
            }
            stack.pop();
        }
        self.memo.record(set, remaining);
        false
    }
}

/// Searches for a sorting network of depth at most `d`, optionally forcing
/// the first layer. Returns a verified witness.
pub fn exists_sorter_with_first(
    n: usize,
    d: usize,
    forced_first: Option<&Layer>,
) -> Result<Option<Network>> {
    if n > MAX_ORACLE_CHANNELS {
        return Err(Error::Unsupported(n, "oracle search supports n <= 7"));
    }
    if d > MAX_ORACLE_DEPTH {
        return Err(Error::Unsupported(d, "oracle search supports depth <= 6"));
    }
    let mut searcher = Searcher::new(n)?;
    let start = OutputSet::full(n)?;
    let mut stack = Vec::new();

    let found = match forced_first {
        Some(layer) => {
            if searcher.sorted_only(&start) {
                true // already sorted without any layer (n = 1)
            } else if d == 0 {
                false
            } else {
                let mut image = OutputSet::empty(n)?;
                for value in start.iter_values() {
                    image.insert_value(layer.apply_bits(value));
                }
                stack.push(layer.clone());
                searcher.search(&image, d - 1, &mut stack)
            }
        }
        None => searcher.search(&start, d, &mut stack),
    };

    if !found {
        return Ok(None);
    }
    let witness = Network::new(n, stack);
    debug_assert!(witness.depth() <= d);
    assert!(witness.is_sorting(), "oracle produced a non-sorting witness");
    Ok(Some(witness))
}

/// Searches for a sorting network of depth at most `d`. With
/// `fix_first_layer` the first layer is pinned to F_n, which loses no
/// solutions and roughly halves the branching at the root.
pub fn exists_sorter(n: usize, d: usize, fix_first_layer: bool) -> Result<Option<Network>> {
    let forced = (fix_first_layer && d >= 1 && n >= 2).then(|| first_layer(n));
    exists_sorter_with_first(n, d, forced.as_ref())
}

/// The minimal depth of any sorting network on `n` channels, with witness.
pub fn compute_v(n: usize) -> Result<DepthBound> {
    if n > MAX_ORACLE_CHANNELS {
        return Err(Error::Unsupported(n, "exhaustive V(n) supports n <= 7"));
    }
    for d in 0..=MAX_ORACLE_DEPTH {
        if let Some(witness) = exists_sorter(n, d, true)? {
            return Ok(DepthBound { n, lower: d, upper: d, witness: Some(witness) });
        }
    }
    unreachable!("every n <= 7 has a sorter within depth 6")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_channel_counts() {
        assert_eq!(compute_v(1).unwrap().upper, 0);
        let bound = compute_v(2).unwrap();
        assert_eq!(bound.upper, 1);
        assert_eq!(bound.witness.unwrap().layers()[0], Layer::from_pairs(&[(1, 2)]));
    }

    #[test]
    fn v3_and_v4() {
        assert_eq!(compute_v(3).unwrap().upper, 3);
        assert!(exists_sorter(4, 3, false).unwrap().is_some());
        assert!(exists_sorter(4, 2, false).unwrap().is_none());
    }

    #[test]
    fn v5() {
        let bound = compute_v(5).unwrap();
        assert_eq!((bound.lower, bound.upper), (5, 5));
        assert!(bound.witness.unwrap().is_sorting());
    }

    #[test]
    fn bounds_refused_outside_supported_range() {
        assert!(exists_sorter(8, 3, false).is_err());
        assert!(exists_sorter(4, 7, false).is_err());
    }

    #[test]
    fn fixed_first_layer_agrees_with_free_search() {
        for n in 2..=5 {
            for d in 0..=5 {
                let free = exists_sorter(n, d, false).unwrap().is_some();
                let fixed = exists_sorter(n, d, true).unwrap().is_some();
                assert_eq!(free, fixed, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn monotone_lower_bounds() {
        let mut prev = 0;
        for n in 1..=5 {
            let bound = compute_v(n).unwrap();
            assert!(bound.lower >= prev);
            prev = bound.lower;
        }
    }
}
