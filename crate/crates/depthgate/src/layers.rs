//! Second-layer candidate machinery: layer (matching) enumeration, the fixed
//! first layer and its stabilizer group, saturated layers, representatives
//! under the group action, and the permuted-outputs preorder with its
//! signature-pruned witness search.

use crate::bits::{OutputSet, MAX_CHANNELS};
use crate::error::{Error, Result};
use crate::network::{reflect_layer, Comparator, Layer, Network};
use crate::perm::Permutation;

/// A deduplicated, lexicographically ordered collection of layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSet {
    n: usize,
    layers: Vec<Layer>,
}

impl LayerSet {
    pub fn from_layers(n: usize, mut layers: Vec<Layer>) -> Self {
        layers.sort_by_key(Layer::code);
        layers.dedup_by_key(|l| l.code());
        Self { n, layers }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.layers.binary_search_by_key(&code, Layer::code).is_ok()
    }
}

/// The permutations fixing the canonical first layer.
#[derive(Debug, Clone)]
pub struct FirstLayerGroup {
    n: usize,
    perms: Vec<Permutation>,
}

impl FirstLayerGroup {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }
}

/// The fixed maximal first layer F_n = { <i, ceil(n/2)+i> }.
pub fn first_layer(n: usize) -> Layer {
    assert!(n >= 1);
    let half = n.div_ceil(2);
    Layer::new((1..=n / 2).map(|i| Comparator::new(i, half + i)).collect())
}

/// All matchings on n channels, including the empty layer.
pub fn enumerate_layers(n: usize) -> Result<LayerSet> {
    if n == 0 || n > MAX_CHANNELS {
        return Err(Error::Unsupported(n, "layer enumeration supports 1..=16"));
    }
    let mut layers = Vec::new();
    let mut pairs = Vec::new();
    fn recurse(n: usize, used: u32, pairs: &mut Vec<Comparator>, out: &mut Vec<Layer>) {
        let free = (!used) & ((1u32 << n) - 1);
        if free == 0 {
            out.push(Layer::new(pairs.clone()));
            return;
        }
        let lowest = free.trailing_zeros() as usize + 1;
        // channel stays unused
        recurse(n, used | 1 << (lowest - 1), pairs, out);
        // or pairs with any higher free channel
        for j in (lowest + 1)..=n {
            if free >> (j - 1) & 1 == 1 {
                pairs.push(Comparator::new(lowest, j));
                recurse(n, used | 1 << (lowest - 1) | 1 << (j - 1), pairs, out);
                pairs.pop();
            }
        }
    }
    recurse(n, 0, &mut pairs, &mut layers);
    Ok(LayerSet::from_layers(n, layers))
}

/// Saturated second-layer candidates share no comparator with F_n and leave
/// no room for a useful extra comparator: for odd n the channels unused by L
/// are exactly the middle channel, or lie entirely on the min side, or
/// entirely on the max side of F_n. For even n disjointness from F_n is the
/// whole condition.
pub fn is_saturated(n: usize, layer: &Layer) -> bool {
    let half_up = n.div_ceil(2);
    let half_down = n / 2;
    for c in layer.comparators() {
        let (lo, hi) = (c.min_channel(), c.max_channel());
        if lo <= half_down && hi == half_up + lo {
            return false; // repeats a comparator of F_n
        }
    }
    if n % 2 == 0 {
        return true;
    }
    let all = (1u32 << n) - 1;
    let unused = !layer.used_mask() & all;
    let min_side = (1u32 << half_down) - 1;
    let middle = 1u32 << (half_up - 1);
    let max_side = all & !min_side & !middle;
    unused == middle || unused & !min_side == 0 || unused & !max_side == 0
}

/// Exactly the permutations that permute F_n's comparator pairs among
/// themselves (min channels to min channels, max channels to max channels),
/// fixing the middle channel for odd n.
pub fn fixing_group(n: usize) -> FirstLayerGroup {
    assert!(n >= 2);
    let half_up = n.div_ceil(2);
    let pairs = n / 2;
    let perms = Permutation::all(pairs)
        .into_iter()
        .map(|sigma| {
            let mut images = vec![0usize; n];
            for i in 1..=pairs {
                images[i - 1] = sigma.apply(i);
                images[half_up + i - 1] = half_up + sigma.apply(i);
            }
            if n % 2 == 1 {
                images[half_up - 1] = half_up;
            }
            Permutation::new(images).expect("constructed bijection")
        })
        .collect();
    FirstLayerGroup { n, perms }
}

/// Image of a layer under a permutation, keeping only images where every
/// comparator stays in min-max form. This is the equivalence Lemma-level
/// rotation arguments use for representative selection.
pub fn strict_image(layer: &Layer, perm: &Permutation) -> Option<Layer> {
    let mut pairs = Vec::with_capacity(layer.len());
    for c in layer.comparators() {
        let (a, b) = (perm.apply(c.i), perm.apply(c.j));
        if a > b {
            return None;
        }
        pairs.push(Comparator::new(a, b));
    }
    Some(Layer::new(pairs))
}

/// Image of a layer as a matching: comparators are re-oriented min-max.
pub fn permuted_matching(layer: &Layer, perm: &Permutation) -> Layer {
    Layer::new(
        layer
            .comparators()
            .iter()
            .map(|c| {
                let (a, b) = (perm.apply(c.i), perm.apply(c.j));
                Comparator::new(a.min(b), a.max(b))
            })
            .collect(),
    )
}

fn strict_orbit_min_code(layer: &Layer, group: &FirstLayerGroup) -> u64 {
    let mut best = layer.code();
    let mut mapped = [(0u8, 0u8); 8];
    let len = layer.len();
    'perm: for perm in &group.perms {
        if perm.is_identity() {
            continue;
        }
        for (slot, c) in layer.comparators().iter().enumerate() {
            let a = perm.apply(c.i) as u8;
            let b = perm.apply(c.j) as u8;
            if a > b {
                continue 'perm;
            }
            mapped[slot] = (a, b);
        }
        // insertion sort by min channel; disjoint pairs have distinct mins
        let slice = &mut mapped[..len];
        for i in 1..len {
            let item = slice[i];
            let mut j = i;
            while j > 0 && slice[j - 1].0 > item.0 {
                slice[j] = slice[j - 1];
                j -= 1;
            }
            slice[j] = item;
        }
        let mut code = 0u64;
        for (slot, &(a, b)) in slice.iter().enumerate() {
            let byte = (((a - 1) as u64) << 4) | (b - 1) as u64;
            code |= byte << (56 - 8 * slot);
        }
        best = best.min(code);
    }
    best
}

fn decode_layer_code(mut code: u64) -> Layer {
    let mut pairs = Vec::new();
    while code != 0 {
        let byte = (code >> 56) as u8;
        pairs.push(Comparator::new((byte >> 4) as usize + 1, (byte & 0xf) as usize + 1));
        code <<= 8;
    }
    Layer::new(pairs)
}

/// Lexicographically smallest member of each orbit under the group, where
/// orbit membership requires the permuted layer to stay a standard layer.
pub fn representatives_under_group(set: &LayerSet, group: &FirstLayerGroup) -> LayerSet {
    let mut codes: Vec<u64> = set
        .layers
        .iter()
        .map(|layer| strict_orbit_min_code(layer, group))
        .collect();
    codes.sort_unstable();
    codes.dedup();
    LayerSet { n: set.n, layers: codes.into_iter().map(decode_layer_code).collect() }
}

/// Orbit representative of a single layer.
pub fn orbit_representative(layer: &Layer, group: &FirstLayerGroup) -> Layer {
    decode_layer_code(strict_orbit_min_code(layer, group))
}

/// Per-channel, per-weight membership counts of an output set, used to prune
/// the permutation search in the permuted-outputs comparison.
#[derive(Debug, Clone)]
pub struct PoSignature {
    pub per_weight: [u16; MAX_CHANNELS + 1],
    pub per_channel_per_weight: [[u16; MAX_CHANNELS + 1]; MAX_CHANNELS],
}

impl PoSignature {
    pub fn of(set: &OutputSet) -> Self {
        let mut per_weight = [0u16; MAX_CHANNELS + 1];
        let mut per_channel_per_weight = [[0u16; MAX_CHANNELS + 1]; MAX_CHANNELS];
        for value in set.iter_values() {
            let w = value.count_ones() as usize;
            per_weight[w] += 1;
            let mut bits = value;
            while bits != 0 {
                let ch = bits.trailing_zeros() as usize;
                per_channel_per_weight[ch][w] += 1;
                bits &= bits - 1;
            }
        }
        Self { per_weight, per_channel_per_weight }
    }
}

/// Cached data for one second-layer candidate: the outputs of F_n followed
/// by the layer, its member list, and its signature.
#[derive(Debug, Clone)]
pub struct LayerProfile {
    pub layer: Layer,
    pub outputs: OutputSet,
    pub members: Vec<u32>,
    pub signature: PoSignature,
}

impl LayerProfile {
    pub fn build(n: usize, layer: &Layer) -> Self {
        let first = first_layer(n);
        let mut outputs = OutputSet::empty(n).expect("n within range");
        for value in 0..(1u32 << n) {
            outputs.insert_value(layer.apply_bits(first.apply_bits(value)));
        }
        let members = outputs.iter_values().collect();
        let signature = PoSignature::of(&outputs);
        Self { layer: layer.clone(), outputs, members, signature }
    }
}

/// Decides `lb <=po la`: does a permutation pi exist with
/// outputs(F;lb) ⊆ pi(outputs(F;la))? Returns a verified witness.
pub fn leq_po(n: usize, lb: &Layer, la: &Layer) -> Option<Permutation> {
    leq_po_profiles(n, &LayerProfile::build(n, lb), &LayerProfile::build(n, la))
}

/// Profile-level version of [`leq_po`]; the returned witness is always
/// re-verified by full membership inclusion before being reported.
pub fn leq_po_profiles(n: usize, b: &LayerProfile, a: &LayerProfile) -> Option<Permutation> {
    // global per-weight counts are a cheap necessary condition
    for k in 0..=n {
        if b.signature.per_weight[k] > a.signature.per_weight[k] {
            return None;
        }
    }

    // identity fast path (covers reflexivity)
    if b.outputs.is_subset_of(&a.outputs) {
        return Some(Permutation::identity(n));
    }

    // candidate images: pi(i) = c needs sig_b[c][k] <= sig_a[i][k] for all k
    let mut domains = [0u32; MAX_CHANNELS];
    for i in 0..n {
        let mut mask = 0u32;
        'cand: for c in 0..n {
            for k in 0..=n {
                if b.signature.per_channel_per_weight[c][k]
                    > a.signature.per_channel_per_weight[i][k]
                {
                    continue 'cand;
                }
            }
            mask |= 1 << c;
        }
        if mask == 0 {
            return None;
        }
        domains[i] = mask;
    }

    let mut images = [0usize; MAX_CHANNELS];
    if search_witness(n, b, a, &domains, 0, 0, &mut images) {
        let perm = Permutation::new(images[..n].iter().map(|&c| c + 1).collect())
            .expect("search assigns distinct images");
        debug_assert!(verify_po_witness(n, b, a, &perm));
        Some(perm)
    } else {
        None
    }
}

/// Backtracking over channel images, most-constrained channel first. A full
/// assignment is only accepted after the exact set-inclusion check.
fn search_witness(
    n: usize,
    b: &LayerProfile,
    a: &LayerProfile,
    domains: &[u32; MAX_CHANNELS],
    assigned: u32,
    used: u32,
    images: &mut [usize; MAX_CHANNELS],
) -> bool {
    if assigned == (1u32 << n) - 1 {
        return check_inclusion(n, b, a, images);
    }
    let mut pick = usize::MAX;
    let mut pick_domain = 0u32;
    let mut best = u32::MAX;
    for i in 0..n {
        if assigned >> i & 1 == 1 {
            continue;
        }
        let avail = domains[i] & !used;
        let count = avail.count_ones();
        if count == 0 {
            return false;
        }
        if count < best {
            best = count;
            pick = i;
            pick_domain = avail;
        }
    }
    let mut avail = pick_domain;
    while avail != 0 {
        let c = avail.trailing_zeros() as usize;
        avail &= avail - 1;
        images[pick] = c;
        if search_witness(n, b, a, domains, assigned | 1 << pick, used | 1 << c, images) {
            return true;
        }
    }
    false
}

/// Exact check of outputs(F;b) ⊆ pi(outputs(F;a)) for the assignment
/// images[i] = pi(i+1)-1.
fn check_inclusion(n: usize, b: &LayerProfile, a: &LayerProfile, images: &[usize; MAX_CHANNELS]) -> bool {
    for &y in &b.members {
        let mut x = 0u32;
        for (i, &c) in images[..n].iter().enumerate() {
            x |= (y >> c & 1) << i;
        }
        if !a.outputs.contains_value(x) {
            return false;
        }
    }
    true
}

fn verify_po_witness(n: usize, b: &LayerProfile, a: &LayerProfile, perm: &Permutation) -> bool {
    let mut images = [0usize; MAX_CHANNELS];
    for i in 0..n {
        images[i] = perm.apply(i + 1) - 1;
    }
    check_inclusion(n, b, a, &images)
}

/// Greedy construction of a minimal covering set under the permuted-outputs
/// preorder: candidates in lexicographic order are kept unless an already
/// kept representative dominates them, then one backwards sweep drops kept
/// items dominated by later kept items. The result has exactly one member
/// per minimal equivalence class, so its cardinality does not depend on the
/// processing order.
pub fn po_representatives(set: &LayerSet) -> LayerSet {
    let n = set.n;
    let profiles: Vec<LayerProfile> =
        set.layers.iter().map(|layer| LayerProfile::build(n, layer)).collect();

    let mut kept: Vec<usize> = Vec::new();
    for idx in 0..profiles.len() {
        let covered = kept
            .iter()
            .any(|&r| leq_po_profiles(n, &profiles[r], &profiles[idx]).is_some());
        if !covered {
            kept.push(idx);
        }
    }

    let survivors: Vec<usize> = kept
        .iter()
        .enumerate()
        .filter(|&(pos, &idx)| {
            !kept[pos + 1..]
                .iter()
                .any(|&later| leq_po_profiles(n, &profiles[later], &profiles[idx]).is_some())
        })
        .map(|(_, &idx)| idx)
        .collect();

    LayerSet {
        n,
        layers: survivors.into_iter().map(|idx| profiles[idx].layer.clone()).collect(),
    }
}

/// Keeps one candidate of each top-to-bottom reflection pair: a candidate is
/// dropped exactly when the fixing-group normalization of its reflection is
/// a lexicographically smaller member of the set. Since reflecting a whole
/// sorting network preserves the sorting property and F_n reflects to
/// itself, the surviving candidates still cover all completions. Candidates
/// whose normalized reflection is absent are kept, making the reduction
/// idempotent.
pub fn reflection_reduce(set: &LayerSet) -> LayerSet {
    let n = set.n;
    let group = fixing_group(n);
    let layers = set
        .layers
        .iter()
        .filter(|layer| {
            let reflected = reflect_layer(n, layer);
            let normalized = orbit_representative(&reflected, &group);
            !set.contains_code(normalized.code()) || layer.code() <= normalized.code()
        })
        .cloned()
        .collect();
    LayerSet { n, layers }
}

/// The saturated subset of a layer set.
pub fn saturated_subset(set: &LayerSet) -> LayerSet {
    LayerSet {
        n: set.n,
        layers: set
            .layers
            .iter()
            .filter(|layer| is_saturated(set.n, layer))
            .cloned()
            .collect(),
    }
}

/// Full second-layer candidate pipeline: representatives of saturated layers
/// for odd n (all layers for even n) under the fixing group, then the
/// permuted-outputs reduction, then optionally the reflection reduction.
pub fn second_layer_candidates(n: usize, reflect: bool) -> Result<LayerSet> {
    if n < 3 {
        return Err(Error::Unsupported(n, "second-layer candidates need n >= 3"));
    }
    let all = enumerate_layers(n)?;
    let group = fixing_group(n);
    let base = if n % 2 == 1 {
        representatives_under_group(&saturated_subset(&all), &group)
    } else {
        representatives_under_group(&all, &group)
    };
    let rpo = po_representatives(&base);
    Ok(if reflect { reflection_reduce(&rpo) } else { rpo })
}

/// `F_n ; layer` as a two-layer network.
pub fn prefix_with_second_layer(n: usize, layer: &Layer) -> Network {
    Network::new(n, vec![first_layer(n), layer.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_layer_examples() {
        assert_eq!(first_layer(4), Layer::from_pairs(&[(1, 3), (2, 4)]));
        assert_eq!(first_layer(5), Layer::from_pairs(&[(1, 4), (2, 5)]));
        assert_eq!(first_layer(2), Layer::from_pairs(&[(1, 2)]));
        assert!(first_layer(1).is_empty());
        for n in 1..=13 {
            let layer = first_layer(n);
            assert!(layer.is_maximal(n));
            if n % 2 == 1 && n > 1 {
                assert!(!layer.uses_channel(n.div_ceil(2)));
            }
        }
    }

    #[test]
    fn layer_counts_match_telephone_numbers() {
        let expected = [1usize, 2, 4, 10, 26, 76, 232, 764];
        for (idx, &count) in expected.iter().enumerate() {
            assert_eq!(enumerate_layers(idx + 1).unwrap().len(), count, "n={}", idx + 1);
        }
        // telephone recurrence T(n) = T(n-1) + (n-1) T(n-2)
        let t9 = enumerate_layers(9).unwrap().len();
        assert_eq!(t9, 764 + 8 * 232);
    }

    #[test]
    fn enumerate_rejects_out_of_range() {
        assert!(enumerate_layers(0).is_err());
        assert!(enumerate_layers(17).is_err());
    }

    #[test]
    fn saturated_counts_small() {
        for (n, expected) in [(3, 2), (4, 7), (5, 10), (6, 51), (7, 74), (8, 513)] {
            let sat = saturated_subset(&enumerate_layers(n).unwrap());
            assert_eq!(sat.len(), expected, "n={n}");
        }
    }

    #[test]
    fn layers_sharing_first_layer_comparators_are_not_saturated() {
        for n in 3..=9 {
            let f = first_layer(n);
            for c in f.comparators() {
                let layer = Layer::new(vec![*c]);
                assert!(!is_saturated(n, &layer));
            }
        }
    }

    #[test]
    fn fixing_group_sizes_and_action() {
        assert_eq!(fixing_group(2).len(), 1);
        assert_eq!(fixing_group(5).len(), 2);
        assert_eq!(fixing_group(13).len(), 720);
        for n in 2..=8 {
            let group = fixing_group(n);
            let f_net = Network::single_layer(n, first_layer(n));
            for perm in group.perms() {
                assert_eq!(f_net.apply_permutation(perm).unwrap(), f_net);
            }
        }
    }

    #[test]
    fn group_closure() {
        let group = fixing_group(7);
        for p in group.perms() {
            assert!(group.perms().contains(&p.inverse()));
            for q in group.perms() {
                assert!(group.perms().contains(&p.compose(q)));
            }
        }
    }

    #[test]
    fn representative_counts_small() {
        for (n, expected) in [(3, 4), (4, 8), (5, 18), (6, 28), (7, 74)] {
            let set = enumerate_layers(n).unwrap();
            let reps = representatives_under_group(&set, &fixing_group(n));
            assert_eq!(reps.len(), expected, "n={n}");
        }
        for (n, expected) in [(3, 2), (5, 8), (7, 29)] {
            let sat = saturated_subset(&enumerate_layers(n).unwrap());
            let reps = representatives_under_group(&sat, &fixing_group(n));
            assert_eq!(reps.len(), expected, "n={n}");
        }
    }

    #[test]
    fn representative_covering_exhaustive() {
        for n in 2..=6 {
            let set = enumerate_layers(n).unwrap();
            let group = fixing_group(n);
            let reps = representatives_under_group(&set, &group);
            for layer in set.layers() {
                let orbit_hits = group
                    .perms()
                    .iter()
                    .filter_map(|perm| strict_image(layer, perm))
                    .filter(|img| reps.contains_code(img.code()))
                    .map(|img| img.code())
                    .collect::<std::collections::BTreeSet<_>>();
                assert_eq!(orbit_hits.len(), 1, "n={n} layer={layer:?}");
            }
        }
    }

    #[test]
    fn leq_po_is_reflexive_with_identity_witness() {
        for layer in enumerate_layers(5).unwrap().layers() {
            let witness = leq_po(5, layer, layer).expect("reflexive");
            assert!(witness.is_identity());
        }
    }

    #[test]
    fn leq_po_group_images_dominate() {
        // L <=po pi(L) for pi in H_n, images taken as matchings
        let set = enumerate_layers(5).unwrap();
        let group = fixing_group(5);
        for layer in set.layers() {
            for perm in group.perms() {
                let image = permuted_matching(layer, perm);
                assert!(
                    leq_po(5, layer, &image).is_some(),
                    "layer={layer:?} perm={perm:?}"
                );
            }
        }
    }

    #[test]
    fn saturated_layer_lemma_n5() {
        let all = enumerate_layers(5).unwrap();
        let sat = saturated_subset(&all);
        for layer in all.layers() {
            assert!(
                sat.layers().iter().any(|s| leq_po(5, s, layer).is_some()),
                "no saturated layer below {layer:?}"
            );
        }
    }

    #[test]
    fn leq_po_witness_is_exact_inclusion() {
        let set = enumerate_layers(4).unwrap();
        for lb in set.layers() {
            for la in set.layers() {
                if let Some(perm) = leq_po(4, lb, la) {
                    let b = LayerProfile::build(4, lb);
                    let a = LayerProfile::build(4, la);
                    let mut permuted = OutputSet::empty(4).unwrap();
                    for &v in &a.members {
                        permuted.insert(
                            perm.apply_to_bits(&crate::bits::BitVector::new(4, v)),
                        )
                        .unwrap();
                    }
                    assert!(b.outputs.is_subset_of(&permuted));
                }
            }
        }
    }

    #[test]
    fn po_representative_counts_small() {
        // via the n-parity pipeline
        for (n, expected) in [(3, 2), (4, 2), (5, 6), (6, 6)] {
            let candidates = second_layer_candidates(n, false).unwrap();
            assert_eq!(candidates.len(), expected, "n={n}");
        }
    }

    #[test]
    fn pipeline_matches_direct_computation_n5() {
        let direct = po_representatives(&enumerate_layers(5).unwrap());
        let staged = second_layer_candidates(5, false).unwrap();
        assert_eq!(direct.len(), staged.len());
        assert_eq!(direct.len(), 6);
    }

    #[test]
    fn reflection_reduce_is_idempotent() {
        for n in [5usize, 6, 7] {
            let candidates = second_layer_candidates(n, false).unwrap();
            let reduced = reflection_reduce(&candidates);
            assert!(reduced.len() <= candidates.len());
            assert_eq!(reflection_reduce(&reduced), reduced);
        }
    }

    #[test]
    fn reflection_symmetric_candidate_maps_to_itself() {
        // the empty layer is reflection symmetric and H-canonical
        let n = 4;
        let set = LayerSet::from_layers(n, vec![Layer::empty()]);
        let reduced = reflection_reduce(&set);
        assert_eq!(reduced.len(), 1);
    }
}
