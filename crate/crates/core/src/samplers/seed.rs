//! Seed bits with a consumption counter.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSubset;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Kind {
    Bits(BitSubset),
    Stream { rng: ChaCha8Rng, buf: u64, avail: u32 },
}

/// A stream of seed bits. Every bit handed out advances [`SeedSource::consumed`].
#[derive(Clone, Debug)]
pub struct SeedSource {
    kind: Kind,
    consumed: usize,
}

impl SeedSource {
    /// A finite seed; reading past its end is an error.
    pub fn from_bits(bits: BitSubset) -> Self {
        SeedSource {
            kind: Kind::Bits(bits),
            consumed: 0,
        }
    }

    pub fn from_u64(len: usize, bits: u64) -> Self {
        Self::from_bits(BitSubset::from_u64(len, bits))
    }

    /// Parses a hex integer; its lowest bit is seed bit 0 and the length is four bits per digit.
    pub fn from_hex(text: &str) -> Result<Self> {
        let text = text.trim().trim_start_matches("0x");
        if text.is_empty() {
            return Err(Error::Parse("empty hex seed".into()));
        }
        let mut words = vec![0u64; (4 * text.len()).div_ceil(64)];
        for (j, c) in text.chars().rev().enumerate() {
            let v = c.to_digit(16).ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))? as u64;
            words[4 * j / 64] |= v << (4 * j % 64);
        }
        Ok(Self::from_bits(BitSubset::from_words(4 * text.len(), words)))
    }

    /// An unbounded ChaCha8 stream; identical roots replay identically on every platform.
    pub fn stream(root: u64) -> Self {
        Self::from_rng(ChaCha8Rng::seed_from_u64(root))
    }

    pub fn from_rng(rng: ChaCha8Rng) -> Self {
        SeedSource {
            kind: Kind::Stream { rng, buf: 0, avail: 0 },
            consumed: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    /// Bits left, or `None` for an unbounded stream.
    pub fn remaining(&self) -> Option<usize> {
        match &self.kind {
            Kind::Bits(b) => Some(b.len() - self.consumed),
            Kind::Stream { .. } => None,
        }
    }

    fn ensure(&self, n: usize) -> Result<()> {
        match self.remaining() {
            Some(left) if left < n => Err(Error::SeedExhausted {
                requested: n,
                remaining: left,
            }),
            _ => Ok(()),
        }
    }

    /// Next `n <= 64` bits, first bit in the least significant position.
    pub fn take_u64(&mut self, n: usize) -> Result<u64> {
        assert!(n <= 64);
        self.ensure(n)?;
        if n == 0 {
            return Ok(0);
        }
        let out = match &mut self.kind {
            Kind::Bits(b) => {
                let mut v = 0u64;
                for j in 0..n {
                    v |= (b.get(self.consumed + j) as u64) << j;
                }
                v
            }
            Kind::Stream { rng, buf, avail } => {
                let mut v;
                if *avail as usize >= n {
                    v = *buf & low_mask(n);
                    *buf = if n == 64 { 0 } else { *buf >> n };
                    *avail -= n as u32;
                } else {
                    let have = *avail as usize;
                    v = *buf;
                    let fresh = rng.next_u64();
                    let need = n - have;
                    v |= (fresh & low_mask(need)) << have;
                    *buf = if need == 64 { 0 } else { fresh >> need };
                    *avail = (64 - need) as u32;
                }
                v
            }
        };
        self.consumed += n;
        Ok(out)
    }

    pub fn take_bits(&mut self, n: usize) -> Result<BitSubset> {
        self.ensure(n)?;
        let mut words = Vec::with_capacity(n.div_ceil(64));
        let mut left = n;
        while left > 0 {
            let c = left.min(64);
            words.push(self.take_u64(c)?);
            left -= c;
        }
        Ok(BitSubset::from_words(n, words))
    }

    pub fn skip(&mut self, n: usize) -> Result<()> {
        self.ensure(n)?;
        let mut left = n;
        while left > 0 {
            let c = left.min(64);
            self.take_u64(c)?;
            left -= c;
        }
        Ok(())
    }
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_and_exhaustion() {
        let mut s = SeedSource::from_u64(10, 0b11_0110_1001);
        assert_eq!(s.take_u64(4).unwrap(), 0b1001);
        assert_eq!(s.take_bits(3).unwrap().to_string(), "011");
        assert_eq!(s.consumed(), 7);
        assert!(matches!(s.take_u64(4), Err(Error::SeedExhausted { requested: 4, remaining: 3 })));
        assert_eq!(s.consumed(), 7);
        s.skip(3).unwrap();
        assert_eq!(s.remaining(), Some(0));
    }

    #[test]
    fn hex_round_trip() {
        let s = SeedSource::from_hex("0x1f3").unwrap();
        let mut t = s.clone();
        let bits = t.take_bits(12).unwrap();
        assert_eq!(bits.to_hex(), "1f3");
        assert!(SeedSource::from_hex("xyz").is_err());
    }

    #[test]
    fn stream_chunking_does_not_matter() {
        let mut a = SeedSource::stream(5);
        let mut b = SeedSource::stream(5);
        let whole = a.take_bits(300).unwrap();
        let mut parts = Vec::new();
        for c in [1, 7, 64, 63, 100, 65] {
            parts.extend(b.take_bits(c).unwrap().iter());
        }
        assert_eq!(whole, BitSubset::from_bools(&parts));
        assert_eq!(b.consumed(), 300);
    }
}
