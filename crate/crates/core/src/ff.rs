//! Prime-field arithmetic.
//!
//! Elements are stored as canonical residues in `[0, p)`. Products go through
//! a 128-bit intermediate, which is why the modulus is capped at `2^62`.
//! Montgomery form would be the obvious speedup if it is ever needed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 62;

/// A residue modulo the prime of some [`FieldCtx`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Felt(pub(crate) u64);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A validated prime modulus `p` together with an exponent `e | p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    p: u64,
    e: u64,
}

impl FieldCtx {
    /// Checks that `p` is a prime below `2^62` and that `e` divides `p - 1`.
    pub fn new(p: u64, e: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroExponent);
        }
        if !(p - 1).is_multiple_of(e) {
            return Err(Error::ExponentDoesNotDivide { e, order: p - 1 });
        }
        Ok(FieldCtx { p, e })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u64 {
        self.e
    }

    /// Same prime, different exponent.
    pub fn with_exponent(&self, e: u64) -> Result<Self> {
        FieldCtx::new(self.p, e)
    }

    /// Wraps `value` if it is a canonical residue.
    pub fn felt(&self, value: u64) -> Result<Felt> {
        if value < self.p {
            Ok(Felt(value))
        } else {
            Err(Error::OutOfDomain { value, p: self.p })
        }
    }

    #[inline]
    pub fn reduce(&self, value: u64) -> Felt {
        Felt(value % self.p)
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        // p < 2^62 so the sum cannot overflow.
        let s = a.0 + b.0;
        Felt(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        Felt(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        Felt(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        Felt(mul_mod(a.0, b.0, self.p))
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: Felt, exp: u64) -> Felt {
        Felt(pow_mod(a.0, exp, self.p))
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Felt(t0.rem_euclid(self.p as i128) as u64))
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Iterator over every residue `0, 1, ..., p - 1`.
    pub fn elements(&self) -> impl Iterator<Item = Felt> + Clone {
        (0..self.p).map(Felt)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
