//! Finite abelian groups split into primary components.
//!
//! A `LocalGroupType` is an abelian `l`-group written as
//! `Z/l^(m_1) + ... + Z/l^(m_r)` with ascending exponents; a [`GroupType`]
//! collects one local type per prime. Both are canonical (zero exponents
//! dropped, primes with trivial component absent), so structural equality is
//! `==` and sets of groups can be compared directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::json;

use crate::arith::{factor, is_prime_u64};
use crate::error::{Error, Result};

/// Abelian `l`-group up to isomorphism: ascending positive cyclic exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalGroupType {
    prime: u64,
    parts: Vec<u32>,
}

impl LocalGroupType {
    /// Normalize: zeros dropped, parts sorted ascending. `prime` must be prime.
    pub fn new(prime: u64, parts: &[u32]) -> Result<Self> {
        if !is_prime_u64(prime) {
            return Err(Error::NotPrime(prime));
        }
        let mut parts: Vec<u32> = parts.iter().copied().filter(|&m| m > 0).collect();
        parts.sort_unstable();
        Ok(LocalGroupType { prime, parts })
    }

    pub fn trivial(prime: u64) -> Result<Self> {
        Self::new(prime, &[])
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Ascending positive exponents.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the exponents: the valuation of the order.
    pub fn exponent_sum(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.prime).pow(self.exponent_sum())
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Display for LocalGroupType {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(out, "0");
        }
        let pieces: Vec<String> = self
            .parts
            .iter()
            .map(|&m| format!("Z/{}", BigUint::from(self.prime).pow(m)))
            .collect();
        write!(out, "{}", pieces.join(" + "))
    }
}

/// Finite abelian group up to isomorphism, split by prime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupType {
    components: BTreeMap<u64, LocalGroupType>,
}

impl GroupType {
    pub fn trivial() -> Self {
        GroupType::default()
    }

    /// Assemble from local components; trivial components are dropped.
    pub fn from_locals<I: IntoIterator<Item = LocalGroupType>>(locals: I) -> Result<Self> {
        let mut components: BTreeMap<u64, LocalGroupType> = BTreeMap::new();
        for local in locals {
            if local.is_trivial() {
                continue;
            }
            match components.entry(local.prime()) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(local);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let merged = merge_parts(o.get(), &local);
                    o.insert(merged);
                }
            }
        }
        Ok(GroupType { components })
    }

    /// The cyclic group `Z/n`.
    pub fn cyclic(n: &BigUint) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (p, e) in factor(n)? {
            components.insert(p, LocalGroupType::new(p, &[e])?);
        }
        Ok(GroupType { components })
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    pub fn order(&self) -> BigUint {
        self.components
            .values()
            .fold(BigUint::one(), |acc, c| acc * c.order())
    }

    /// Primes with nontrivial component, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.components.keys().copied()
    }

    /// The `prime`-primary component (trivial when absent).
    pub fn local(&self, prime: u64) -> Result<LocalGroupType> {
        match self.components.get(&prime) {
            Some(c) => Ok(c.clone()),
            None => LocalGroupType::trivial(prime),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &LocalGroupType> {
        self.components.values()
    }

    pub fn direct_sum(&self, other: &GroupType) -> GroupType {
        let mut components = self.components.clone();
        for (p, c) in &other.components {
            match components.entry(*p) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let merged = merge_parts(o.get(), c);
                    o.insert(merged);
                }
            }
        }
        GroupType { components }
    }

    /// Remove one direct summand isomorphic to `summand`, if the cyclic
    /// multiset contains it; `None` otherwise. By Krull-Schmidt this is
    /// exactly "is `summand` a direct summand of `self`".
    pub fn subtract_summand(&self, summand: &GroupType) -> Option<GroupType> {
        let mut components = self.components.clone();
        for (p, sub) in &summand.components {
            let have = components.get(p)?;
            let mut remaining = have.parts.clone();
            for m in &sub.parts {
                let pos = remaining.iter().position(|x| x == m)?;
                remaining.remove(pos);
            }
            if remaining.is_empty() {
                components.remove(p);
            } else {
                components.insert(
                    *p,
                    LocalGroupType {
                        prime: *p,
                        parts: remaining,
                    },
                );
            }
        }
        Some(GroupType { components })
    }

    /// `{"order": "...", "components": {"2": [1, 2], ...}}`
    pub fn to_json(&self) -> serde_json::Value {
        let mut comps = serde_json::Map::new();
        for (p, c) in &self.components {
            comps.insert(p.to_string(), json!(c.parts));
        }
        json!({
            "order": self.order().to_string(),
            "components": comps,
        })
    }
}

fn merge_parts(a: &LocalGroupType, b: &LocalGroupType) -> LocalGroupType {
    let mut parts = a.parts.clone();
    parts.extend(&b.parts);
    parts.sort_unstable();
    LocalGroupType {
        prime: a.prime,
        parts,
    }
}

impl From<LocalGroupType> for GroupType {
    fn from(local: LocalGroupType) -> Self {
        GroupType::from_locals([local]).expect("local component is already validated")
    }
}

impl fmt::Display for GroupType {
    /// Canonical label: cyclic pieces grouped by prime, e.g. `Z/2 + Z/4 + Z/3`;
    /// the trivial group prints as `0`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(out, "0");
        }
        let pieces: Vec<String> = self.components.values().map(|c| c.to_string()).collect();
        write!(out, "{}", pieces.join(" + "))
    }
}

impl FromStr for GroupType {
    type Err = Error;

    /// Parse labels like `Z/8 + Z/16`. Composite moduli are split into their
    /// primary parts, so `Z/12` means `Z/4 + Z/3`.
    fn from_str(s: &str) -> Result<GroupType> {
        let s = s.trim();
        if s == "0" || s == "1" {
            return Ok(GroupType::trivial());
        }
        let mut locals: Vec<LocalGroupType> = Vec::new();
        for piece in s.split('+') {
            let piece = piece.trim();
            let modulus = piece
                .strip_prefix("Z/")
                .or_else(|| piece.strip_prefix("z/"))
                .ok_or_else(|| Error::LabelParse(format!("expected Z/n, found {:?}", piece)))?;
            let n: BigUint = modulus
                .trim()
                .parse()
                .map_err(|_| Error::LabelParse(format!("bad modulus {:?}", modulus)))?;
            if n == BigUint::default() {
                return Err(Error::LabelParse("Z/0 is not finite".into()));
            }
            for (p, e) in factor(&n)? {
                locals.push(LocalGroupType::new(p, &[e])?);
            }
        }
        GroupType::from_locals(locals)
    }
}

/// All partitions of `m` into at most `max_parts` positive parts, each written
/// ascending. Deterministic order: fewer parts first, then lexicographic.
///
/// ```
/// use weilgroups::partitions_bounded;
/// assert_eq!(
///     partitions_bounded(5, 3),
///     vec![vec![5], vec![1, 4], vec![2, 3], vec![1, 1, 3], vec![1, 2, 2]]
/// );
/// ```
pub fn partitions_bounded(m: u32, max_parts: usize) -> Vec<Vec<u32>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for k in 1..=max_parts.min(m as usize) {
        extend_partitions(m, k, 1, &mut buf, &mut out);
    }
    out
}

fn extend_partitions(
    remaining: u32,
    slots: usize,
    min_part: u32,
    buf: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if slots == 1 {
        if remaining >= min_part {
            buf.push(remaining);
            out.push(buf.clone());
            buf.pop();
        }
        return;
    }
    // keep parts ascending: the next part is at most remaining / slots
    let mut part = min_part;
    while part * (slots as u32) <= remaining {
        buf.push(part);
        extend_partitions(remaining - part, slots - 1, part, buf, out);
        buf.pop();
        part += 1;
    }
}

/// Number of partitions of `m` into at most `max_parts` parts, by the
/// generating-function recurrence (partitions with parts of size at most
/// `max_parts`, which is the conjugate count).
pub fn count_partitions_bounded(m: u32, max_parts: usize) -> u64 {
    let m = m as usize;
    let mut dp = vec![0u64; m + 1];
    dp[0] = 1;
    for size in 1..=max_parts.min(m) {
        for j in size..=m {
            dp[j] += dp[j - size];
        }
    }
    dp[m]
}
