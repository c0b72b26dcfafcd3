//! Sturm chains over exact rationals.
//!
//! Root locations are decided without floating point:
//! * build the chain `p, p', -rem(p, p'), ...` down to the gcd,
//! * count sign variations at the interval ends.
//!
//! The variation difference counts *distinct* real roots, which is all the
//! callers need once they work with squarefree parts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Dense polynomial over the rationals, ascending coefficients, trimmed.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial; calling this on zero is a bug.
    pub fn degree(&self) -> usize {
        assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("leading coefficient of zero")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::new(vec![]);
        }
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::new(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    /// Multiply by the variable.
    pub fn mul_x(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        RatPoly::new(coeffs)
    }

    /// Remainder of `self` divided by `divisor` (nonzero).
    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        assert!(!divisor.is_zero());
        let mut r = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = r[k].clone() / lead;
            if !factor.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    let idx = k - dd + j;
                    let sub = &factor * c;
                    r[idx] -= sub;
                }
            }
            r.pop();
        }
        RatPoly::new(r)
    }

    /// Exact quotient by a monic linear factor `x - a`; the caller must know
    /// that `a` is a root.
    pub fn div_linear(&self, a: &BigRational) -> RatPoly {
        assert!(!self.is_zero());
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n - 1];
        let mut carry = BigRational::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry;
            if i == 0 {
                assert!(v.is_zero(), "div_linear requires an exact root");
            } else {
                carry = &v * a;
                out[i - 1] = v;
            }
        }
        RatPoly::new(out)
    }

    /// Monic gcd with `other`.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().clone();
        RatPoly::new(a.coeffs.iter().map(|c| c / &lead).collect())
    }

    /// Squarefree part `self / gcd(self, self')`, monic up to the leading unit.
    pub fn squarefree_part(&self) -> RatPoly {
        assert!(!self.is_zero());
        let g = self.gcd(&self.derivative());
        if g.is_zero() || g.degree() == 0 {
            return self.clone();
        }
        self.div_exact(&g)
    }

    fn div_exact(&self, divisor: &RatPoly) -> RatPoly {
        assert!(!divisor.is_zero());
        let mut r = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = r[k].clone() / lead;
            q[k - dd] = factor.clone();
            if !factor.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    let sub = &factor * c;
                    r[k - dd + j] -= sub;
                }
            }
            r.pop();
        }
        assert!(
            r.iter().all(|c| c.is_zero()),
            "div_exact requires an exact divisor"
        );
        RatPoly::new(q)
    }
}

fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    let mut chain = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(RatPoly::new(r.coeffs.iter().map(|c| -c).collect()));
    }
    chain
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_rational(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn variations_at(chain: &[RatPoly], x: &BigRational) -> usize {
    variations(chain.iter().map(|p| sign_rational(&p.eval(x))))
}

fn variations_at_pos_inf(chain: &[RatPoly]) -> usize {
    variations(chain.iter().map(|p| {
        if p.is_zero() {
            0
        } else {
            sign_rational(p.leading())
        }
    }))
}

fn variations_at_neg_inf(chain: &[RatPoly]) -> usize {
    variations(chain.iter().map(|p| {
        if p.is_zero() {
            0
        } else {
            let s = sign_rational(p.leading());
            if p.degree() % 2 == 0 {
                s
            } else {
                -s
            }
        }
    }))
}

/// Number of distinct real roots of a nonzero polynomial.
pub(crate) fn count_real_roots(p: &RatPoly) -> usize {
    assert!(!p.is_zero());
    if p.degree() == 0 {
        return 0;
    }
    let chain = sturm_chain(p);
    variations_at_neg_inf(&chain) - variations_at_pos_inf(&chain)
}

/// Number of distinct real roots in the open interval `(a, +inf)`.
///
/// Roots exactly at `a` are removed before counting, so the count excludes
/// them regardless of multiplicity.
pub(crate) fn count_real_roots_above(p: &RatPoly, a: &BigRational) -> usize {
    assert!(!p.is_zero());
    let mut p = p.clone();
    while !p.is_zero() && p.degree() >= 1 && p.eval(a).is_zero() {
        p = p.div_linear(a);
    }
    if p.degree() == 0 {
        return 0;
    }
    let chain = sturm_chain(&p);
    variations_at(&chain, a) - variations_at_pos_inf(&chain)
}
