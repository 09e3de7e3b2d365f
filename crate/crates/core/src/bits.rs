//! Fixed-length bit strings.
//!
//! A [`BitSubset`] plays three roles: a Fourier index `s`, a restriction support
//! `t`/`g`, and an input string `x`. Position `i` (0-based) is bit `i % 64` of
//! word `i / 64`, so for `n <= 64` the string is the integer `x` with `x_1` in the
//! least significant bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitSubset {
    len: usize,
    words: Vec<u64>,
}

impl BitSubset {
    pub fn zeros(len: usize) -> Self {
        BitSubset {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        s
    }

    /// Builds a string of length `len <= 64` from the low bits of `bits`.
    /// Bits beyond `len` are discarded.
    pub fn from_u64(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut s = Self::zeros(len);
        if len > 0 {
            s.words[0] = bits;
            s.clear_tail();
        }
        s
    }

    /// Builds a string from packed words; bits beyond `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(64), 0);
        let mut s = BitSubset { len, words };
        s.clear_tail();
        s
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Parses a `0`/`1` string; the first character is position 0.
    pub fn parse_bits(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Hamming weight `|s|`.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        let mut s = BitSubset {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.clear_tail();
        s
    }

    pub fn is_subset_of(&self, other: &BitSubset) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// The low 64 bits as an integer; `None` when the string is longer than 64.
    pub fn as_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the set positions, ascending.
    pub fn ones_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn concat(&self, other: &BitSubset) -> BitSubset {
        let mut out = BitSubset::zeros(self.len + other.len);
        for i in 0..self.len {
            out.set(i, self.get(i));
        }
        for i in 0..other.len {
            out.set(self.len + i, other.get(i));
        }
        out
    }

    /// Hex encoding of the bits, least significant nibble last (the integer value of the mask).
    pub fn to_hex(&self) -> String {
        if self.words.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, w) in self.words.iter().enumerate().rev() {
            if idx + 1 == self.words.len() {
                let digits = (self.len - 64 * idx).div_ceil(4).max(1);
                out.push_str(&format!("{:0width$x}", w, width = digits));
            } else {
                out.push_str(&format!("{w:016x}"));
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSubset({self})")
    }
}

/// `Select(t, y, x)`: positions in `t` come from `y`, all others from `x`.
pub fn select(t: &BitSubset, y: &BitSubset, x: &BitSubset) -> Result<BitSubset> {
    for other in [y, x] {
        if other.len != t.len {
            return Err(Error::LengthMismatch {
                expected: t.len,
                got: other.len,
            });
        }
    }
    let words = t
        .words
        .iter()
        .zip(&y.words)
        .zip(&x.words)
        .map(|((t, y), x)| (t & y) | (!t & x))
        .collect();
    Ok(BitSubset { len: t.len, words })
}

/// `select` on packed strings of at most 64 bits.
#[inline]
pub fn select_u64(t: u64, y: u64, x: u64) -> u64 {
    (t & y) | (!t & x)
}
