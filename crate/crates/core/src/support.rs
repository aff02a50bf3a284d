//! Fixed-length bit vectors over physical qubits.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Set of physical qubits, stored as a packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Support {
    len: usize,
    words: Vec<u64>,
}

impl Support {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for q in 0..len {
            s.set(q, true);
        }
        s
    }

    /// Builds a support from qubit indices. Repeated indices cancel (XOR),
    /// which is what periodic lattices with wrapped edges need.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = Self::zeros(len);
        for q in indices {
            assert!(q < len, "qubit {q} out of range for length {len}");
            s.flip(q);
        }
        s
    }

    /// Low `len` bits of `mask`; requires `len <= 64`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut s = Self::zeros(len);
        if len > 0 {
            s.words[0] = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        }
        s
    }

    /// Packed form for supports of at most 64 qubits.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, q: usize) -> bool {
        (self.words[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, value: bool) {
        let bit = 1u64 << (q % 64);
        if value {
            self.words[q / 64] |= bit;
        } else {
            self.words[q / 64] &= !bit;
        }
    }

    pub fn flip(&mut self, q: usize) {
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + tz)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &Support) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Support) -> Support {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of `|self ∩ other|` without a length check.
    pub(crate) fn parity_unchecked(&self, other: &Support) -> bool {
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    /// Size of the intersection.
    pub fn overlap(&self, other: &Support) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.indices().next()
    }
}

/// Parity of `|a ∩ b|`, i.e. whether a X-type and a Z-type Pauli with these
/// supports anticommute.
pub fn overlap_parity(a: &Support, b: &Support) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.parity_unchecked(b))
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Support[{}]", self.len)?;
        f.debug_list().entries(self.indices()).finish()
    }
}

// Serialized as the sorted list of qubit indices; the length comes from the
// owning code.
impl Serialize for Support {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.indices())
    }
}

impl<'de> Deserialize<'de> for Support {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let idx = Vec::<usize>::deserialize(deserializer)?;
        let len = idx.iter().max().map_or(0, |m| m + 1);
        Ok(Support::from_indices(len, idx))
    }
}
