//! Comparator networks: construction, evaluation, output sets, and the
//! structural operations (composition, permutation, untangling, reflection).

use crate::bits::{BitVector, OutputSet};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A two-channel gate. In a standard network `i < j` and channel `i`
/// receives the minimum; a generalized network also allows `i > j`, in
/// which case the higher-indexed first channel still receives the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Comparator {
    pub i: usize,
    pub j: usize,
}

impl Comparator {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i != j && i >= 1 && j >= 1, "bad comparator <{i},{j}>");
        Self { i, j }
    }

    pub fn min_channel(&self) -> usize {
        self.i.min(self.j)
    }

    pub fn max_channel(&self) -> usize {
        self.i.max(self.j)
    }

    pub fn is_standard(&self) -> bool {
        self.i < self.j
    }

    /// Key used for the canonical in-layer ordering.
    fn sort_key(&self) -> (usize, usize) {
        (self.min_channel(), self.max_channel())
    }
}

/// A set of channel-disjoint comparators applied in parallel, kept sorted
/// ascending by (min, max) channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Layer {
    comparators: Vec<Comparator>,
}

impl Layer {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a layer, sorting comparators into canonical order.
    /// Panics if a channel occurs twice; layers are built from trusted
    /// enumeration or parsing paths that check this first.
    pub fn new(mut comparators: Vec<Comparator>) -> Self {
        comparators.sort_by_key(Comparator::sort_key);
        let layer = Self { comparators };
        debug_assert!(layer.channels_disjoint(), "channel reused in layer");
        layer
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self::new(pairs.iter().map(|&(i, j)| Comparator::new(i, j)).collect())
    }

    pub fn comparators(&self) -> &[Comparator] {
        &self.comparators
    }

    pub fn len(&self) -> usize {
        self.comparators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comparators.is_empty()
    }

    pub fn is_maximal(&self, n: usize) -> bool {
        self.len() == n / 2
    }

    pub fn channels_disjoint(&self) -> bool {
        let mut used = 0u32;
        for c in &self.comparators {
            let mask = (1u32 << (c.i - 1)) | (1u32 << (c.j - 1));
            if used & mask != 0 {
                return false;
            }
            used |= mask;
        }
        true
    }

    /// Bitmask of used channels (channel 1 = bit 0).
    pub fn used_mask(&self) -> u32 {
        self.comparators
            .iter()
            .fold(0, |acc, c| acc | (1 << (c.i - 1)) | (1 << (c.j - 1)))
    }

    pub fn uses_channel(&self, channel: usize) -> bool {
        self.used_mask() >> (channel - 1) & 1 == 1
    }

    pub fn max_channel(&self) -> usize {
        self.comparators.iter().map(Comparator::max_channel).max().unwrap_or(0)
    }

    pub fn is_standard(&self) -> bool {
        self.comparators.iter().all(Comparator::is_standard)
    }

    /// Packed lexicographic key: comparators as (min,max) byte pairs from the
    /// most significant byte down, zero-padded. Integer order equals
    /// lexicographic order on the canonical comparator list (n <= 16).
    pub fn code(&self) -> u64 {
        debug_assert!(self.comparators.len() <= 8);
        let mut code = 0u64;
        for (slot, c) in self.comparators.iter().enumerate() {
            let byte = (((c.min_channel() - 1) as u64) << 4) | (c.max_channel() - 1) as u64;
            code |= byte << (56 - 8 * slot);
        }
        code
    }

    /// Applies the layer to packed Boolean channel values.
    pub fn apply_bits(&self, bits: u32) -> u32 {
        let mut out = bits;
        for c in &self.comparators {
            let min_bit = (out >> (c.i - 1)) & 1;
            let max_bit = (out >> (c.j - 1)) & 1;
            let conj = min_bit & max_bit;
            let disj = min_bit | max_bit;
            out = (out & !(1 << (c.i - 1)) & !(1 << (c.j - 1)))
                | (conj << (c.i - 1))
                | (disj << (c.j - 1));
        }
        out
    }
}

/// An ordered tuple of layers on `n` channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Network {
    n: usize,
    layers: Vec<Layer>,
    generalized: bool,
}

impl Network {
    pub fn new(n: usize, layers: Vec<Layer>) -> Self {
        assert!(n >= 1, "network needs at least one channel");
        for layer in &layers {
            assert!(layer.max_channel() <= n, "comparator channel beyond n={n}");
        }
        let generalized = layers.iter().any(|l| !l.is_standard());
        Self { n, layers, generalized }
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, Vec::new())
    }

    pub fn single_layer(n: usize, layer: Layer) -> Self {
        Self::new(n, vec![layer])
    }

    pub fn channels(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn is_generalized(&self) -> bool {
        self.generalized
    }

    /// Evaluates the value recurrence on an arbitrary integer input.
    pub fn evaluate(&self, input: &[i64]) -> Result<Vec<i64>> {
        if input.len() != self.n {
            return Err(Error::InputShape { expected: self.n, got: input.len() });
        }
        let mut values = input.to_vec();
        for layer in &self.layers {
            for c in layer.comparators() {
                let lo = values[c.i - 1].min(values[c.j - 1]);
                let hi = values[c.i - 1].max(values[c.j - 1]);
                values[c.i - 1] = lo;
                values[c.j - 1] = hi;
            }
        }
        Ok(values)
    }

    pub fn boolean_evaluate(&self, input: &BitVector) -> Result<BitVector> {
        if input.width() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, got: input.width() });
        }
        Ok(BitVector::new(self.n, self.apply_bits(input.value())))
    }

    /// Unchecked Boolean evaluation on packed channel values.
    pub fn apply_bits(&self, bits: u32) -> u32 {
        self.layers.iter().fold(bits, |acc, layer| layer.apply_bits(acc))
    }

    /// Image of `inputs` (all 2^n vectors when omitted).
    pub fn outputs(&self, inputs: Option<&OutputSet>) -> Result<OutputSet> {
        let mut result = OutputSet::empty(self.n)?;
        match inputs {
            Some(set) => {
                if set.width() != self.n {
                    return Err(Error::WidthMismatch { expected: self.n, got: set.width() });
                }
                for value in set.iter_values() {
                    result.insert_value(self.apply_bits(value));
                }
            }
            None => {
                for value in 0..(1u32 << self.n) {
                    result.insert_value(self.apply_bits(value));
                }
            }
        }
        Ok(result)
    }

    /// Zero-one principle check: sorts every Boolean input.
    pub fn is_sorting(&self) -> bool {
        debug_assert!(!self.generalized, "is_sorting expects a standard network");
        self.find_unsorted_input().is_none()
    }

    /// First Boolean input (ascending by packed value) with unsorted output.
    pub fn find_unsorted_input(&self) -> Option<BitVector> {
        (0..(1u32 << self.n))
            .find(|&value| !BitVector::new(self.n, self.apply_bits(value)).is_sorted())
            .map(|value| BitVector::new(self.n, value))
    }

    /// Concatenates layer lists; (C ; D)(x) = D(C(x)).
    pub fn compose(&self, other: &Network) -> Result<Network> {
        if self.n != other.n {
            return Err(Error::ChannelMismatch { left: self.n, right: other.n });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Ok(Network::new(self.n, layers))
    }

    /// Relabels channels: each <i,j> becomes <π(i),π(j)> with tuple order
    /// preserved, so the result may be generalized.
    pub fn apply_permutation(&self, perm: &Permutation) -> Result<Network> {
        if perm.len() != self.n {
            return Err(Error::ChannelMismatch { left: perm.len(), right: self.n });
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                Layer::new(
                    layer
                        .comparators()
                        .iter()
                        .map(|c| Comparator::new(perm.apply(c.i), perm.apply(c.j)))
                        .collect(),
                )
            })
            .collect();
        Ok(Network::new(self.n, layers))
    }

    /// Rewrites max-min comparators into min-max form by swapping the two
    /// channel roles in the current and all later layers. Any standard
    /// prefix is left untouched, and the result sorts iff the input is a
    /// generalized sorting network.
    pub fn untangle(&self) -> Network {
        let mut layers: Vec<Vec<Comparator>> = self
            .layers
            .iter()
            .map(|l| l.comparators().to_vec())
            .collect();
        for k in 0..layers.len() {
            for idx in 0..layers[k].len() {
                let c = layers[k][idx];
                if c.i > c.j {
                    let (hi, lo) = (c.i, c.j);
                    for later in layers.iter_mut().skip(k) {
                        for cmp in later.iter_mut() {
                            cmp.i = swap_channel(cmp.i, hi, lo);
                            cmp.j = swap_channel(cmp.j, hi, lo);
                        }
                    }
                }
            }
        }
        Network::new(self.n, layers.into_iter().map(Layer::new).collect())
    }

    /// Whether a single output permutation sorts every Boolean output.
    pub fn is_generalized_sorting(&self) -> bool {
        self.untangle().is_sorting()
    }

    /// Direct search over output-consistency; exponential in n, used as a
    /// cross-check for `is_generalized_sorting` on small networks.
    pub fn generalized_sorting_witness(&self) -> Option<Permutation> {
        let outputs = self.outputs(None).expect("n within range");
        Permutation::all(self.n)
            .into_iter()
            .find(|perm| outputs.iter().all(|v| perm.apply_to_bits(&v).is_sorted()))
    }

    /// Top-to-bottom reflection: <i,j> becomes <n+1-j, n+1-i>.
    pub fn reflect(&self) -> Network {
        debug_assert!(!self.generalized, "reflect expects a standard network");
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                Layer::new(
                    layer
                        .comparators()
                        .iter()
                        .map(|c| Comparator::new(self.n + 1 - c.j, self.n + 1 - c.i))
                        .collect(),
                )
            })
            .collect();
        Network::new(self.n, layers)
    }
}

fn swap_channel(channel: usize, a: usize, b: usize) -> usize {
    if channel == a {
        b
    } else if channel == b {
        a
    } else {
        channel
    }
}

/// Reflection of a single standard layer on `n` channels.
pub fn reflect_layer(n: usize, layer: &Layer) -> Layer {
    Layer::new(
        layer
            .comparators()
            .iter()
            .map(|c| Comparator::new(n + 1 - c.j, n + 1 - c.i))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::first_layer;

    /// The running 4-channel, depth-3 example network.
    pub fn example_net() -> Network {
        Network::new(
            4,
            vec![
                Layer::from_pairs(&[(1, 2), (3, 4)]),
                Layer::from_pairs(&[(1, 3), (2, 4)]),
                Layer::from_pairs(&[(2, 3)]),
            ],
        )
    }

    #[test]
    fn evaluate_example_network() {
        let net = example_net();
        assert_eq!(net.evaluate(&[0, 1, 0, 1]).unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(net.evaluate(&[7, 5, 0, 2]).unwrap(), vec![0, 2, 5, 7]);
    }

    #[test]
    fn evaluate_depth_zero_is_identity() {
        let net = Network::empty(3);
        assert_eq!(net.evaluate(&[3, 1, 2]).unwrap(), vec![3, 1, 2]);
    }

    #[test]
    fn evaluate_rejects_shape_mismatch() {
        assert!(example_net().evaluate(&[1, 2]).is_err());
    }

    #[test]
    fn boolean_evaluate_matches_integer_embedding() {
        let single = Network::single_layer(2, Layer::from_pairs(&[(1, 2)]));
        let out = single
            .boolean_evaluate(&BitVector::from_bools(&[true, false]))
            .unwrap();
        assert_eq!(out, BitVector::from_bools(&[false, true]));

        let f4 = Network::single_layer(4, first_layer(4));
        let out = f4
            .boolean_evaluate(&BitVector::from_bools(&[true, false, false, false]))
            .unwrap();
        assert_eq!(out, BitVector::from_bools(&[false, false, true, false]));

        let net = example_net();
        let out = net
            .boolean_evaluate(&BitVector::from_bools(&[false, true, false, true]))
            .unwrap();
        assert_eq!(out, BitVector::from_bools(&[false, false, true, true]));

        // agreement with evaluate on the 0/1 embedding, all inputs
        for value in 0..16u32 {
            let bits = BitVector::new(4, value);
            let ints: Vec<i64> = bits.to_bools().iter().map(|&b| b as i64).collect();
            let via_eval: Vec<bool> =
                net.evaluate(&ints).unwrap().iter().map(|&v| v == 1).collect();
            assert_eq!(net.boolean_evaluate(&bits).unwrap().to_bools(), via_eval);
        }
    }

    #[test]
    fn outputs_of_single_comparator() {
        let net = Network::single_layer(2, Layer::from_pairs(&[(1, 2)]));
        let outs = net.outputs(None).unwrap();
        let got: Vec<u32> = outs.iter_values().collect();
        // (0,0), (0,1) = bits 10, (1,1)
        assert_eq!(got, vec![0b00, 0b10, 0b11]);
    }

    #[test]
    fn outputs_of_fixed_first_layers() {
        let f4 = Network::single_layer(4, first_layer(4));
        assert_eq!(f4.outputs(None).unwrap().len(), 9);
        let f5 = Network::single_layer(5, first_layer(5));
        assert_eq!(f5.outputs(None).unwrap().len(), 18);
    }

    #[test]
    fn outputs_composition_law() {
        let front = Network::single_layer(4, Layer::from_pairs(&[(1, 2), (3, 4)]));
        let back = Network::new(
            4,
            vec![Layer::from_pairs(&[(1, 3), (2, 4)]), Layer::from_pairs(&[(2, 3)])],
        );
        let composed = front.compose(&back).unwrap();
        let via_stages = back.outputs(Some(&front.outputs(None).unwrap())).unwrap();
        assert_eq!(composed.outputs(None).unwrap(), via_stages);
    }

    #[test]
    fn sorting_checks() {
        assert!(example_net().is_sorting());
        let f4 = Network::single_layer(4, first_layer(4));
        assert!(!f4.is_sorting());
        assert_eq!(
            f4.find_unsorted_input(),
            Some(BitVector::from_bools(&[true, false, false, false]))
        );
        assert!(Network::empty(1).is_sorting());
    }

    #[test]
    fn compose_properties() {
        let f4 = Network::single_layer(4, first_layer(4));
        assert_eq!(f4.compose(&Network::empty(4)).unwrap(), f4);
        let net = example_net();
        assert_eq!(net.compose(&net).unwrap().depth(), 6);
        assert!(net.compose(&Network::empty(3)).is_err());

        let front = Network::single_layer(4, Layer::from_pairs(&[(1, 2), (3, 4)]));
        let back = Network::new(
            4,
            vec![Layer::from_pairs(&[(1, 3), (2, 4)]), Layer::from_pairs(&[(2, 3)])],
        );
        let whole = front.compose(&back).unwrap();
        assert_eq!(whole.evaluate(&[7, 5, 0, 2]).unwrap(), vec![0, 2, 5, 7]);
    }

    #[test]
    fn permutation_action() {
        let net = example_net();
        let id = Permutation::identity(4);
        assert_eq!(net.apply_permutation(&id).unwrap(), net);

        let swap = Permutation::new(vec![2, 1]).unwrap();
        let single = Network::single_layer(2, Layer::from_pairs(&[(1, 2)]));
        let image = single.apply_permutation(&swap).unwrap();
        assert!(image.is_generalized());
        assert_eq!(image.layers()[0].comparators()[0], Comparator::new(2, 1));
    }

    #[test]
    fn permutation_equivariance_exhaustive_n3() {
        // boolean_evaluate(π(C), π·x) = π·(boolean_evaluate(C, x))
        let layers3 = crate::layers::enumerate_layers(3).unwrap();
        for perm in Permutation::all(3) {
            for layer in layers3.layers() {
                let net = Network::single_layer(3, layer.clone());
                let image = net.apply_permutation(&perm).unwrap();
                for value in 0..8u32 {
                    let x = BitVector::new(3, value);
                    let lhs = image.boolean_evaluate(&perm.apply_to_bits(&x)).unwrap();
                    let rhs = perm.apply_to_bits(&net.boolean_evaluate(&x).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn untangle_basics() {
        let net = example_net();
        assert_eq!(net.untangle(), net);

        let maxmin = Network::single_layer(2, Layer::new(vec![Comparator::new(2, 1)]));
        let untangled = maxmin.untangle();
        assert!(!untangled.is_generalized());
        assert_eq!(untangled.layers()[0].comparators()[0], Comparator::new(1, 2));
    }

    #[test]
    fn untangle_preserves_standard_prefix() {
        // P ; H with standard P untangles to P ; I
        let prefix = Layer::from_pairs(&[(1, 3), (2, 4)]);
        let tangled = Network::new(
            4,
            vec![prefix.clone(), Layer::new(vec![Comparator::new(4, 1), Comparator::new(3, 2)])],
        );
        let untangled = tangled.untangle();
        assert!(!untangled.is_generalized());
        assert_eq!(untangled.layers()[0], prefix);
        assert_eq!(untangled.depth(), 2);
        // idempotent
        assert_eq!(untangled.untangle(), untangled);
    }

    #[test]
    fn generalized_sorting_judgments() {
        assert!(example_net().is_generalized_sorting());

        // single comparator on three channels sorts under no output permutation
        let single = Network::single_layer(3, Layer::from_pairs(&[(1, 2)]));
        assert!(!single.is_generalized_sorting());
        assert!(single.generalized_sorting_witness().is_none());
    }

    #[test]
    fn permuted_sorters_stay_generalized_sorting() {
        let sorter3 = Network::new(
            3,
            vec![
                Layer::from_pairs(&[(1, 2)]),
                Layer::from_pairs(&[(2, 3)]),
                Layer::from_pairs(&[(1, 2)]),
            ],
        );
        assert!(sorter3.is_sorting());
        for perm in Permutation::all(3) {
            let image = sorter3.apply_permutation(&perm).unwrap();
            assert!(image.is_generalized_sorting());
            assert!(image.generalized_sorting_witness().is_some());
            // untangling yields a standard sorting network of equal depth
            let untangled = image.untangle();
            assert!(!untangled.is_generalized());
            assert_eq!(untangled.depth(), image.depth());
            assert!(untangled.is_sorting());
        }
    }

    #[test]
    fn reflection() {
        let net = example_net();
        assert_eq!(net.reflect().reflect(), net);
        assert!(net.reflect().is_sorting());

        let f4 = Network::single_layer(4, first_layer(4));
        assert_eq!(f4.reflect(), f4);
    }

    #[test]
    fn multiset_preservation_spot() {
        let net = example_net();
        let input = [9, -3, 9, 0];
        let mut out = net.evaluate(&input).unwrap();
        let mut sorted_in = input.to_vec();
        sorted_in.sort();
        out.sort();
        assert_eq!(out, sorted_in);
    }

    #[test]
    fn dropping_last_channel_preserves_sorting() {
        // remove channel n and its comparators from a sorting network
        for net in [example_net()] {
            let n = net.channels();
            let trimmed = Network::new(
                n - 1,
                net.layers()
                    .iter()
                    .map(|layer| {
                        Layer::new(
                            layer
                                .comparators()
                                .iter()
                                .filter(|c| c.max_channel() < n)
                                .copied()
                                .collect(),
                        )
                    })
                    .collect(),
            );
            assert!(trimmed.is_sorting());
        }
    }

    #[test]
    fn layer_code_is_lexicographic() {
        let empty = Layer::empty();
        let a = Layer::from_pairs(&[(1, 2)]);
        let ab = Layer::from_pairs(&[(1, 2), (3, 4)]);
        let b = Layer::from_pairs(&[(1, 3)]);
        assert!(empty.code() < a.code());
        assert!(a.code() < ab.code());
        assert!(ab.code() < b.code());
    }
}
