//! Packed bit storage.
//!
//! Bit `k` of the linear stream lives in byte `k / 8` at bit position
//! `k % 8`, counting from the least significant bit. Trailing pad bits of
//! the last byte are kept at zero so byte images are canonical; this is the
//! packing the trace interchange format relies on.

use crate::error::Error;
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;

/// A fixed-length packed bit string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    bytes: Vec<u8>,
    len: usize,
}

impl BitMatrix {
    /// All-zero matrix of `len` bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            bytes: vec![0u8; (len + 7) / 8],
            len,
        }
    }

    /// Reconstruct from a canonical byte image. Pad bits must be zero.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if bytes.len() != (len + 7) / 8 {
            return Err(Error::LengthMismatch {
                left: bytes.len(),
                right: (len + 7) / 8,
            });
        }
        if len % 8 != 0 {
            let pad_mask = !0u8 << (len % 8);
            if let Some(last) = bytes.last() {
                if last & pad_mask != 0 {
                    return Err(Error::Consistency(alloc::string::String::from(
                        "trailing pad bits must be zero",
                    )));
                }
            }
        }
        Ok(Self { bytes, len })
    }

    /// Collect from a bool iterator.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = Self::zeros(0);
        for bit in bits {
            out.push(bit);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        self.bytes[index >> 3] & (1 << (index & 7)) != 0
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        debug_assert!(index < self.len);
        let mask = 1 << (index & 7);
        if value {
            self.bytes[index >> 3] |= mask;
        } else {
            self.bytes[index >> 3] &= !mask;
        }
    }

    /// Append a bit.
    pub fn push(&mut self, value: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        self.len += 1;
        if value {
            let index = self.len - 1;
            self.bytes[index >> 3] |= 1 << (index & 7);
        }
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Bits differing from `other`; lengths must match.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// In-place union. Lengths must match.
    pub fn union_with(&mut self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        for (a, b) in self.bytes.iter_mut().zip(&other.bytes) {
            *a |= b;
        }
        Ok(())
    }

    /// Population count of the intersection with `other`.
    pub fn intersection_count(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Population count of the union with `other`.
    pub fn union_count(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum())
    }

    /// True if every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self.bytes.iter().zip(&other.bytes).all(|(a, b)| a & !b == 0))
    }

    /// Iterate bits in order.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_round_trip_leaves_other_bits() {
        let mut bits = BitMatrix::zeros(77);
        bits.set(13, true);
        bits.set(76, true);
        for i in 0..77 {
            assert_eq!(bits.get(i), i == 13 || i == 76);
        }
        bits.set(13, false);
        assert!(!bits.get(13));
        assert!(bits.get(76));
        assert_eq!(bits.count_ones(), 1);
    }

    #[test]
    fn packing_is_lsb_first_within_bytes() {
        let mut bits = BitMatrix::zeros(16);
        bits.set(0, true);
        bits.set(9, true);
        assert_eq!(bits.as_bytes(), &[0b0000_0001, 0b0000_0010]);
    }

    #[test]
    fn from_bytes_rejects_dirty_pad_bits() {
        assert!(BitMatrix::from_bytes(vec![0xFF], 5).is_err());
        assert!(BitMatrix::from_bytes(vec![0x1F], 5).is_ok());
    }

    #[test]
    fn hamming_counts_differences() {
        let a = BitMatrix::from_bits([true, false, true, true].into_iter());
        let b = BitMatrix::from_bits([true, true, true, false].into_iter());
        assert_eq!(a.hamming(&b).unwrap(), 2);
        assert!(a.hamming(&BitMatrix::zeros(5)).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = BitMatrix::from_bits([true, true, false, false].into_iter());
        let b = BitMatrix::from_bits([false, true, true, false].into_iter());
        assert_eq!(a.intersection_count(&b).unwrap(), 1);
        assert_eq!(a.union_count(&b).unwrap(), 3);
        assert!(!a.is_subset_of(&b).unwrap());
        let mut u = a.clone();
        u.union_with(&b).unwrap();
        assert!(a.is_subset_of(&u).unwrap());
        assert!(b.is_subset_of(&u).unwrap());
    }
}
