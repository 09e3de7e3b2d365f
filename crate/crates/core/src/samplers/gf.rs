//! Arithmetic in GF(2^m) for m ≤ 32.

use crate::error::{Error, Result};

/// Irreducible polynomial for each degree, including the leading term.
/// Changing an entry changes every sampler output for that degree.
pub const IRREDUCIBLE: [u64; 33] = [
    0,
    0x3,
    0x7,
    0xb,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11b,
    0x211,
    0x409,
    0x805,
    0x1053,
    0x201b,
    0x4443,
    0x8003,
    0x1100b,
    0x20009,
    0x40081,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x1000087,
    0x2000009,
    0x4000047,
    0x8000027,
    0x10000009,
    0x20000005,
    0x40000053,
    0x80000009,
    0x10000008d,
];

pub const MAX_DEGREE: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    m: u32,
    poly: u64,
}

impl Field {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::UnsupportedField(m));
        }
        Ok(Field {
            m,
            poly: IRREDUCIBLE[m as usize],
        })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn mask(&self) -> u64 {
        (1u64 << self.m) - 1
    }

    /// Carryless product reduced modulo the field polynomial. Operands must
    /// already be reduced.
    #[inline]
    pub fn mul(&self, mut a: u64, mut b: u64) -> u64 {
        let top = 1u64 << self.m;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn check(&self, a: u64) -> Result<()> {
        if a > self.mask() {
            return Err(Error::OutOfRange(format!("{a:#x} is not an element of GF(2^{})", self.m)));
        }
        Ok(())
    }
}

pub fn gf_mul(a: u64, b: u64, m: u32) -> Result<u64> {
    let f = Field::new(m)?;
    f.check(a)?;
    f.check(b)?;
    Ok(f.mul(a, b))
}

pub fn gf_pow(a: u64, e: u64, m: u32) -> Result<u64> {
    let f = Field::new(m)?;
    f.check(a)?;
    Ok(f.pow(a, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_reduction_m3() {
        assert_eq!(gf_mul(0b010, 0b100, 3).unwrap(), 0b011);
    }

    #[test]
    fn unsupported_degrees() {
        assert!(matches!(gf_mul(1, 1, 0), Err(Error::UnsupportedField(0))));
        assert!(matches!(gf_mul(1, 1, 33), Err(Error::UnsupportedField(33))));
        assert!(gf_mul(8, 1, 3).is_err());
    }

    // x^(2^m - 1) = 1 for every nonzero x only if the polynomial is irreducible
    // (together with x^(2^m) = x on the generator and no smaller field).
    #[test]
    fn small_fields_are_fields() {
        for m in 1..=10u32 {
            let f = Field::new(m).unwrap();
            let order = (1u64 << m) - 1;
            for a in 1..=order {
                assert_eq!(f.pow(a, order), 1, "m={m} a={a}");
                // every nonzero element has an inverse
                let inv = f.pow(a, order - 1);
                assert_eq!(f.mul(a, inv), 1);
            }
        }
    }

    // Rabin's test: x^(2^m) ≡ x and gcd(x^(2^(m/q)) − x, P) = 1 for every prime q | m.
    #[test]
    fn table_passes_rabin_test() {
        fn gcd(mut a: u64, mut b: u64) -> u64 {
            fn deg(v: u64) -> i32 {
                63 - v.leading_zeros() as i32
            }
            while b != 0 {
                while a != 0 && deg(a) >= deg(b) {
                    a ^= b << (deg(a) - deg(b));
                }
                std::mem::swap(&mut a, &mut b);
            }
            a
        }
        for m in 2..=MAX_DEGREE {
            let f = Field::new(m).unwrap();
            let x = 2;
            let frob = |times: u32| (0..times).fold(x, |acc, _| f.mul(acc, acc));
            assert_eq!(frob(m), x, "m={m}");
            for q in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                if m % q == 0 {
                    let h = frob(m / q) ^ x;
                    assert_eq!(gcd(IRREDUCIBLE[m as usize], h), 1, "m={m} q={q}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn field_axioms(m in 1u32..=32, a: u64, b: u64, c: u64) {
            let f = Field::new(m).unwrap();
            let (a, b, c) = (a & f.mask(), b & f.mask(), c & f.mask());
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            prop_assert_eq!(f.mul(a, 1), a);
            prop_assert_eq!(f.mul(a, 0), 0);
        }
    }
}
