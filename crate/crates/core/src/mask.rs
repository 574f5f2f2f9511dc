//! Clause masks.
//!
//! Bit `i` of a left mask is set when the vertex lies outside `A_i`; bit `i`
//! of a right mask is set when it lies outside `B_i`. A pair is an edge iff
//! the two masks share no bit. Masks of up to 64 clauses live inline in a
//! single word; wider masks spill to the heap.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Number of 64-bit words needed for `n` clauses.
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Number of lowercase hex digits used when serializing an `n`-bit mask.
pub fn hex_width(n: usize) -> usize {
    n.div_ceil(4).max(1)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mask(SmallVec<[u64; 1]>);

impl Mask {
    pub fn zero(n: usize) -> Self {
        Mask(SmallVec::from_elem(0, words_for(n)))
    }

    /// Mask with bits `0..n` set.
    pub fn full(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i);
        }
        m
    }

    pub fn from_words(words: &[u64]) -> Self {
        Mask(SmallVec::from_slice(words))
    }

    pub fn from_u64(n: usize, value: u64) -> Self {
        let mut m = Self::zero(n);
        if let Some(w) = m.0.first_mut() {
            *w = value;
        }
        m
    }

    pub fn words(&self) -> &[u64] {
        &self.0
    }

    pub fn set(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        self.0
            .get(bit / 64)
            .is_some_and(|w| (w >> (bit % 64)) & 1 == 1)
    }

    pub fn count_ones(&self) -> u32 {
        count_ones(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// Low word; meaningful only when the mask has at most 64 clauses.
    pub fn as_u64(&self) -> u64 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn union(&self, other: &Mask) -> Mask {
        Mask(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    pub fn is_disjoint(&self, other: &Mask) -> bool {
        disjoint(&self.0, &other.0)
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        ones(&self.0)
    }

    /// Lowercase hex, most-significant nibble first, `hex_width(n)` digits.
    pub fn to_hex(&self, n: usize) -> String {
        let width = hex_width(n);
        let mut s = String::with_capacity(width);
        for digit in (0..width).rev() {
            let bit = digit * 4;
            let word = self.0.get(bit / 64).copied().unwrap_or(0);
            let nibble = (word >> (bit % 64)) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    /// Parses a hex mask, rejecting any bit at position `>= n`.
    pub fn from_hex(s: &str, n: usize) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty mask string".into()));
        }
        let mut m = Self::zero(n);
        for (pos, c) in s.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?} in mask {s:?}")))?;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let bit = pos * 4 + b;
                    if bit >= n {
                        return Err(Error::Parse(format!(
                            "mask {s:?} has bit {bit} set but there are only {n} clauses"
                        )));
                    }
                    m.set(bit);
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mask(")?;
        for w in self.0.iter().rev() {
            write!(f, "{w:016x}")?;
        }
        write!(f, ")")
    }
}

pub fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

pub fn count_ones(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

pub fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let tz = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(wi * 64 + tz)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_roundtrip_wide() {
        let mut m = Mask::zero(70);
        m.set(0);
        m.set(65);
        m.set(69);
        let s = m.to_hex(70);
        assert_eq!(s.len(), 18);
        assert_eq!(s, "220000000000000001");
        assert_eq!(Mask::from_hex(&s, 70).unwrap(), m);
    }

    #[test]
    fn hex_rejects_high_bits() {
        assert!(Mask::from_hex("4", 2).is_err());
        assert_eq!(Mask::from_hex("3", 2).unwrap().as_u64(), 3);
        assert!(Mask::from_hex("g", 8).is_err());
        assert!(Mask::from_hex("", 8).is_err());
    }

    #[test]
    fn zero_clauses() {
        let m = Mask::zero(0);
        assert!(m.is_zero());
        assert_eq!(m.to_hex(0), "0");
        assert_eq!(Mask::from_hex("0", 0).unwrap(), m);
        assert!(m.is_disjoint(&Mask::zero(0)));
    }

    #[test]
    fn ones_ascending() {
        let mut m = Mask::zero(130);
        for b in [3, 64, 129] {
            m.set(b);
        }
        assert_eq!(m.ones().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(m.count_ones(), 3);
        assert_eq!(Mask::full(5).as_u64(), 0b11111);
    }
}
