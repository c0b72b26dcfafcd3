//! Small exact number-theory helpers shared across the crate.
//!
//! Everything here is trial-division based; inputs are desk scale by
//! contract, so no probabilistic primality or sieving is needed.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Deterministic primality by trial division.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map(|dd| dd <= n).unwrap_or(false) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Decompose `q = p^e` with `p` prime and `e >= 1`, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = q;
    let mut d = 2u64;
    while d.checked_mul(d).map(|dd| dd <= q).unwrap_or(false) {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    let mut rest = q;
    let mut e = 0u32;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest == 1 {
        Some((p, e))
    } else {
        None
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn ord_prime(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero is undefined");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0u32;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Prime factorization by trial division, keys ascending.
///
/// Errors only when a prime factor does not fit in 64 bits, which is outside
/// the intended input range.
pub fn factor(n: &BigUint) -> Result<BTreeMap<u64, u32>> {
    let mut out = BTreeMap::new();
    let mut n = n.clone();
    let one = BigUint::one();
    let mut d = 2u64;
    while n > one {
        let db = BigUint::from(d);
        if &db * &db > n {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = num_integer::Integer::div_rem(&n, &db);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.insert(d, e);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if n > one {
        let p = u64::try_from(&n).map_err(|_| Error::FactorTooLarge(n.to_string()))?;
        *out.entry(p).or_insert(0) += 1;
    }
    Ok(out)
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
