//! Packed Boolean vectors and output sets over `\u{1d539}^n`.
//!
//! Channel 1 lives in the least-significant bit, so a `BitVector` doubles as
//! an index into the flat 2^n membership table of an [`OutputSet`].

use crate::error::{Error, Result};

pub const MAX_CHANNELS: usize = 16;

/// A Boolean input or output vector of a comparator network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    width: usize,
    bits: u32,
}

impl BitVector {
    pub fn new(width: usize, bits: u32) -> Self {
        assert!(width <= 32, "width {width} exceeds 32");
        let mask = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
        Self { width, bits: bits & mask }
    }

    /// Builds from a 0/1 sequence, channel 1 first.
    pub fn from_bools(values: &[bool]) -> Self {
        let mut bits = 0u32;
        for (idx, &bit) in values.iter().enumerate() {
            if bit {
                bits |= 1 << idx;
            }
        }
        Self::new(values.len(), bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn value(&self) -> u32 {
        self.bits
    }

    /// Value of channel `i` (1-based).
    pub fn get(&self, channel: usize) -> bool {
        debug_assert!((1..=self.width).contains(&channel));
        (self.bits >> (channel - 1)) & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Number of leading zeros of the channel sequence x_1, x_2, ...
    pub fn leading_zeros(&self) -> usize {
        (self.bits.trailing_zeros() as usize).min(self.width)
    }

    /// Number of trailing ones of the channel sequence ..., x_{n-1}, x_n.
    pub fn trailing_ones(&self) -> usize {
        let mut count = 0;
        while count < self.width && self.get(self.width - count) {
            count += 1;
        }
        count
    }

    pub fn is_sorted(&self) -> bool {
        *self == self.sorted()
    }

    /// The ascending 0^{n-w} 1^w rearrangement.
    pub fn sorted(&self) -> Self {
        let w = self.weight();
        let bits = if w == 0 {
            0
        } else {
            ((1u32 << w) - 1) << (self.width - w)
        };
        Self { width: self.width, bits }
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (1..=self.width).map(|i| self.get(i)).collect()
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for i in 1..=self.width {
            if i > 1 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

/// The set `outputs(C)` as a flat 2^n-entry bit table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputSet {
    width: usize,
    words: Vec<u64>,
    len: usize,
}

impl OutputSet {
    pub fn empty(width: usize) -> Result<Self> {
        if width > MAX_CHANNELS {
            return Err(Error::Unsupported(width, "OutputSet supports n <= 16"));
        }
        let bits = 1usize << width;
        Ok(Self { width, words: vec![0; bits.div_ceil(64)], len: 0 })
    }

    /// All 2^n vectors.
    pub fn full(width: usize) -> Result<Self> {
        let mut set = Self::empty(width)?;
        for value in 0..(1u32 << width) {
            set.insert_value(value);
        }
        Ok(set)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, v: BitVector) -> Result<()> {
        if v.width() != self.width {
            return Err(Error::WidthMismatch { expected: self.width, got: v.width() });
        }
        self.insert_value(v.value());
        Ok(())
    }

    pub fn insert_value(&mut self, value: u32) {
        let idx = value as usize;
        debug_assert!(idx < 1 << self.width);
        let word = idx / 64;
        let mask = 1u64 << (idx % 64);
        if self.words[word] & mask == 0 {
            self.words[word] |= mask;
            self.len += 1;
        }
    }

    pub fn contains_value(&self, value: u32) -> bool {
        let idx = value as usize;
        idx < (1 << self.width) && self.words[idx / 64] & (1u64 << (idx % 64)) != 0
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        v.width() == self.width && self.contains_value(v.value())
    }

    /// Word-wise subset test.
    pub fn is_subset_of(&self, other: &OutputSet) -> bool {
        self.width == other.width
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn iter_values(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros();
                bits &= bits - 1;
                Some((wi * 64) as u32 + tz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = BitVector> + '_ {
        let width = self.width;
        self.iter_values().map(move |v| BitVector::new(width, v))
    }

    /// True when every member is ascending.
    pub fn all_sorted(&self) -> bool {
        self.iter().all(|v| v.is_sorted())
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl FromIterator<BitVector> for OutputSet {
    fn from_iter<T: IntoIterator<Item = BitVector>>(iter: T) -> Self {
        let mut items = iter.into_iter().peekable();
        let width = items.peek().map(|v| v.width()).unwrap_or(0);
        let mut set = OutputSet::empty(width).expect("width within range");
        for v in items {
            set.insert(v).expect("uniform width");
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvector_packs_channel_one_in_lsb() {
        let v = BitVector::from_bools(&[true, false, false, false]);
        assert_eq!(v.value(), 0b0001);
        assert!(v.get(1));
        assert!(!v.get(4));
    }

    #[test]
    fn prefix_and_suffix_runs() {
        let v = BitVector::from_bools(&[false, false, true, false, true, true]);
        assert_eq!(v.leading_zeros(), 2);
        assert_eq!(v.trailing_ones(), 2);
        assert_eq!(BitVector::new(4, 0).leading_zeros(), 4);
        assert_eq!(BitVector::new(4, 0b1111).trailing_ones(), 4);
    }

    #[test]
    fn sorted_rearrangement() {
        let v = BitVector::from_bools(&[true, false, true, false]);
        assert_eq!(v.sorted(), BitVector::from_bools(&[false, false, true, true]));
        assert!(!v.is_sorted());
        assert!(v.sorted().is_sorted());
        assert!(BitVector::new(3, 0).is_sorted());
    }

    #[test]
    fn output_set_membership_and_subset() {
        let mut a = OutputSet::empty(3).unwrap();
        a.insert_value(0);
        a.insert_value(5);
        a.insert_value(5);
        assert_eq!(a.len(), 2);
        assert!(a.contains_value(5));
        assert!(!a.contains_value(1));

        let mut b = OutputSet::empty(3).unwrap();
        b.insert_value(5);
        assert!(b.is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
        assert_eq!(a.iter_values().collect::<Vec<_>>(), vec![0, 5]);
    }

    #[test]
    fn full_set_has_all_vectors() {
        let full = OutputSet::full(4).unwrap();
        assert_eq!(full.len(), 16);
        assert!(!full.all_sorted());
    }

    #[test]
    fn width_guard() {
        assert!(OutputSet::empty(17).is_err());
        let mut set = OutputSet::empty(3).unwrap();
        assert!(set.insert(BitVector::new(4, 0)).is_err());
    }
}
