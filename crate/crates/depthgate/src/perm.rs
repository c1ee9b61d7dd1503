//! Channel relabelings.

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// A permutation of channels 1..=n; `images[i-1]` is the image of channel `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &img in &images {
            if img == 0 || img > n || seen[img] {
                return Err(Error::NotAPermutation(images));
            }
            seen[img] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(idx, &img)| img == idx + 1)
    }

    /// Image of channel `i` (1-based).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (idx, &img) in self.images.iter().enumerate() {
            images[img - 1] = idx + 1;
        }
        Self { images }
    }

    /// `self` after `other`: (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self { images: other.images.iter().map(|&mid| self.images[mid - 1]).collect() }
    }

    /// Moves the value on channel i to channel π(i).
    pub fn apply_to_bits(&self, v: &BitVector) -> BitVector {
        debug_assert_eq!(self.len(), v.width());
        let mut out = 0u32;
        for i in 1..=self.len() {
            if v.get(i) {
                out |= 1 << (self.apply(i) - 1);
            }
        }
        BitVector::new(v.width(), out)
    }

    /// As `apply_to_bits`, for plain values.
    pub fn apply_to_values(&self, values: &[i64]) -> Vec<i64> {
        debug_assert_eq!(self.len(), values.len());
        let mut out = vec![0; values.len()];
        for (idx, &value) in values.iter().enumerate() {
            out[self.images[idx] - 1] = value;
        }
        out
    }

    /// Every permutation of 1..=n in lexicographic order of image sequence.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut result = Vec::new();
        let mut images: Vec<usize> = (1..=n).collect();
        loop {
            result.push(Permutation { images: images.clone() });
            if !next_permutation(&mut images) {
                break;
            }
        }
        result
    }
}

fn next_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}
