//! Lattice witnesses: an explicit operator certifying that a candidate group
//! is realized, plus the Smith forms that read the group off a matrix.
//!
//! Given `f` with `f(0) != 0` and leading coefficient `(-1)^deg f`, and a
//! partition `m_1 <= ... <= m_d` of `ord_l(f(0))` whose Hodge polygon lies on
//! or below the Newton polygon of `f`, [`witness_matrix`] builds the matrix
//! of multiplication by `x` on the lattice spanned by
//!
//! ```text
//! v_s = (a_d x^s + a_(d-1) x^(s-1) + ... + a_(d-s)) / l^(M(s)),   M(s) = m_1 + ... + m_s
//! ```
//!
//! inside `Q_l[x]/(f)`. The recurrence `x v_(s-1) = l^(m_s) (v_s - u_s)` with
//! `u_s = a_(d-s)/l^(M(s))` makes the matrix sparse: one subdiagonal of
//! `l`-powers and one correction row. Its cokernel is the candidate group,
//! which [`smith_local`] confirms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::abgroup::{GroupType, LocalGroupType};
use crate::arith::{is_prime_u64, ord_prime};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::polygon::rational_to_string;

/// Square matrix over the localization of the integers at `prime`: exact
/// rational entries whose denominators are coprime to `prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMatrix {
    prime: u64,
    entries: Vec<Vec<BigRational>>,
}

impl LocalMatrix {
    pub fn new(prime: u64, entries: Vec<Vec<BigRational>>) -> Result<Self> {
        if !is_prime_u64(prime) {
            return Err(Error::NotPrime(prime));
        }
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::PolyParse("matrix must be square".into()));
            }
            for e in row {
                if !(e.denom() % BigInt::from(prime)).is_zero() {
                    continue;
                }
                return Err(Error::DenominatorNotCoprime(prime));
            }
        }
        Ok(LocalMatrix { prime, entries })
    }

    pub fn from_bigint_rows(prime: u64, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        Self::new(
            prime,
            rows.into_iter()
                .map(|r| r.into_iter().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    /// Monic characteristic polynomial `det(tI - M)`, ascending coefficients.
    pub fn char_poly(&self) -> Vec<BigRational> {
        // Faddeev-LeVerrier: exact, division only by integers
        let n = self.dim();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut aux = identity(n);
        let mut c = BigRational::one();
        for k in 1..=n {
            // aux = M * (aux_prev + c_prev * I) with c folded in below
            if k > 1 {
                for (i, row) in aux.iter_mut().enumerate().take(n) {
                    row[i] += &c;
                }
            }
            aux = mat_mul(&self.entries, &aux);
            let tr: BigRational = (0..n).map(|i| aux[i][i].clone()).sum();
            c = -tr / BigRational::from_integer(BigInt::from(k));
            coeffs[n - k] = c.clone();
        }
        coeffs
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .entries
            .iter()
            .map(|row| row.iter().map(rational_to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>())
    }
}

/// Exponents of the elementary divisors of a matrix over the localization at
/// `prime`, ascending (zeros kept: they are unit divisors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryDivisors {
    pub prime: u64,
    pub exponents: Vec<u32>,
}

impl ElementaryDivisors {
    /// Total exponent; equals the valuation of the determinant.
    pub fn total(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// The cokernel as a group: zero exponents drop out.
    pub fn group(&self) -> LocalGroupType {
        LocalGroupType::new(self.prime, &self.exponents).expect("prime validated on entry")
    }
}

pub(crate) fn identity(n: usize) -> Vec<Vec<BigRational>> {
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub(crate) fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    let add = &a[i][k] * &b[k][j];
                    out[i][j] += add;
                }
            }
        }
    }
    out
}

/// Exact inverse by Gauss-Jordan; `None` for singular input. Test-only: the
/// production paths solve triangular systems instead, and the tests use this
/// as the independent route.
#[cfg(test)]
pub(crate) fn mat_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &pivot;
            inv[col][j] /= &pivot;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let s = &factor * &a[col][j];
                a[r][j] -= s;
                let s = &factor * &inv[col][j];
                inv[r][j] -= s;
            }
        }
    }
    Some(inv)
}

fn val(prime: u64, x: &BigRational) -> u32 {
    debug_assert!(!x.is_zero());
    // denominators are coprime to prime by the LocalMatrix invariant
    ord_prime(x.numer(), prime)
}

/// Build the witness matrix for coefficients `a_0 ... a_d` of `f` and the
/// partition `parts` of `ord_l(a_0)` (at most `d` parts; padded ascending).
///
/// Column `s-1` holds `l^(m_s)` in row `s` (for `s < d`) and the correction
/// `-(-1)^d a_(d-s) / l^(M(s-1))` in row 0. The construction demands
/// `l^(M(s)) | a_(d-s)` for every `s`; that is exactly "the Hodge polygon of
/// `parts` lies on or below the Newton polygon of `f`", and a violation is
/// reported with the offending `s`.
pub fn witness_matrix(coeffs: &[BigInt], parts: &[u32], ell: u64) -> Result<LocalMatrix> {
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    if coeffs.len() < 2 {
        return Err(Error::PolyParse("degree must be at least 1".into()));
    }
    let d = coeffs.len() - 1;
    let a = coeffs;
    if a[0].is_zero() {
        return Err(Error::ConstantTermVanishes);
    }
    let sign = if d % 2 == 0 { 1 } else { -1 };
    if a[d] != BigInt::from(sign) {
        return Err(Error::BadLeadingCoefficient);
    }

    let mut m: Vec<u32> = parts.iter().copied().filter(|&x| x > 0).collect();
    m.sort_unstable();
    if m.len() > d {
        return Err(Error::TooManyParts { r: d, parts: m.len() });
    }
    let mut padded = vec![0u32; d - m.len()];
    padded.extend(m);
    let m = padded;

    let total: u32 = m.iter().sum();
    let ord_a0 = ord_prime(&a[0], ell);
    if total != ord_a0 {
        return Err(Error::PartitionOrderMismatch {
            prime: ell,
            expected: ord_a0,
            actual: total,
        });
    }

    // cumulative M(s); M(0) = 0
    let mut cum = vec![0u32; d + 1];
    for s in 1..=d {
        cum[s] = cum[s - 1] + m[s - 1];
    }
    for s in 1..=d {
        let c = &a[d - s];
        if !c.is_zero() && ord_prime(c, ell) < cum[s] {
            return Err(Error::PolygonCondition {
                s,
                prime: ell,
                exponent: cum[s],
                index: d - s,
            });
        }
    }

    let ell_big = BigInt::from(ell);
    let mut entries = vec![vec![BigRational::zero(); d]; d];
    for s in 1..=d {
        if s < d {
            entries[s][s - 1] = BigRational::from_integer(ell_big.pow(m[s - 1]));
        }
        // -(-1)^d * a_(d-s) / l^(M(s-1))
        let numer = -BigInt::from(sign) * &a[d - s];
        entries[0][s - 1] += BigRational::new(numer, ell_big.pow(cum[s - 1]));
    }
    LocalMatrix::new(ell, entries)
}

/// Elementary divisors over the localization at `prime`.
///
/// Pivoting rule: the entry of minimal `prime`-valuation, ties broken
/// row-major; the pivot row is scaled by the unit part, so each step extracts
/// one exact power of `prime`. Exponents come out ascending because every
/// elimination step preserves the minimal valuation of the remaining block.
pub fn smith_local(matrix: &LocalMatrix) -> Result<ElementaryDivisors> {
    let prime = matrix.prime;
    let n = matrix.dim();
    let mut w = matrix.entries.clone();
    let mut exponents = Vec::with_capacity(n);
    for step in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in w.iter().enumerate().take(n).skip(step) {
            for (j, e) in row.iter().enumerate().take(n).skip(step) {
                if e.is_zero() {
                    continue;
                }
                let v = val(prime, e);
                if best.as_ref().map(|(bv, _, _)| v < *bv).unwrap_or(true) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, pi, pj) = best.ok_or(Error::SingularMatrix)?;
        w.swap(step, pi);
        for row in w.iter_mut() {
            row.swap(step, pj);
        }
        // scale the pivot row by the inverse unit so the pivot is exactly l^v
        let power = BigRational::from_integer(BigInt::from(prime).pow(v));
        let unit = &w[step][step] / &power;
        for j in step..n {
            let scaled = &w[step][j] / &unit;
            w[step][j] = scaled;
        }
        // clear below, then to the right
        for r in step + 1..n {
            if w[r][step].is_zero() {
                continue;
            }
            let factor = &w[r][step] / &power;
            for j in step..n {
                let s = &factor * &w[step][j];
                w[r][j] -= s;
            }
        }
        for c in step + 1..n {
            w[step][c] = BigRational::zero();
        }
        exponents.push(v);
    }
    debug_assert!(exponents.windows(2).all(|p| p[0] <= p[1]));
    Ok(ElementaryDivisors { prime, exponents })
}

/// Smith normal form diagonal of a nonsingular integer matrix: positive, with
/// each entry dividing the next.
pub fn integer_smith_diagonal(rows: &[Vec<BigInt>]) -> Result<Vec<BigInt>> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(Error::PolyParse("matrix must be square".into()));
        }
    }
    let mut w: Vec<Vec<BigInt>> = rows.to_vec();
    for step in 0..n {
        loop {
            let mut best: Option<(BigInt, usize, usize)> = None;
            for i in step..n {
                for j in step..n {
                    if w[i][j].is_zero() {
                        continue;
                    }
                    let a = w[i][j].abs();
                    if best.as_ref().map(|(b, _, _)| a < *b).unwrap_or(true) {
                        best = Some((a, i, j));
                    }
                }
            }
            let (_, pi, pj) = best.ok_or(Error::SingularMatrix)?;
            w.swap(step, pi);
            for row in w.iter_mut() {
                row.swap(step, pj);
            }
            let pivot = w[step][step].clone();
            let mut clean = true;
            for r in step + 1..n {
                if w[r][step].is_zero() {
                    continue;
                }
                let q = div_round(&w[r][step], &pivot);
                for j in step..n {
                    let s = &q * &w[step][j];
                    w[r][j] -= s;
                }
                if !w[r][step].is_zero() {
                    clean = false;
                }
            }
            for c in step + 1..n {
                if w[step][c].is_zero() {
                    continue;
                }
                let q = div_round(&w[step][c], &pivot);
                for i in step..n {
                    let s = &q * &w[i][step];
                    w[i][c] -= s;
                }
                if !w[step][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    let mut diag: Vec<BigInt> = (0..n).map(|i| w[i][i].abs()).collect();
    if diag.iter().any(|d| d.is_zero()) {
        return Err(Error::SingularMatrix);
    }
    // enforce the divisibility chain: replace pairs by (gcd, lcm)
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if (&diag[j] % &diag[i]).is_zero() {
                    continue;
                }
                let g = num_integer::Integer::gcd(&diag[i], &diag[j]);
                let l = &diag[i] / &g * &diag[j];
                diag[i] = g;
                diag[j] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    diag.sort();
    Ok(diag)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer division keeps remainders small, |r| <= |b|/2
    let (q, r) = num_integer::Integer::div_rem(a, b);
    let double = BigInt::from(2) * r.abs();
    if double > b.abs() {
        if (a.sign() == b.sign()) || r.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Cokernel of a nonsingular integer matrix as an abstract group: the columns
/// span a finite-index subgroup of `Z^n` and the quotient is the direct sum of
/// `Z/d_i` over the Smith diagonal.
pub fn cokernel_integer(rows: &[Vec<BigInt>]) -> Result<GroupType> {
    let diag = integer_smith_diagonal(rows)?;
    let mut acc = GroupType::trivial();
    for d in &diag {
        let n = d.to_biguint().expect("diagonal entries are positive");
        acc = acc.direct_sum(&GroupType::cyclic(&n)?);
    }
    Ok(acc)
}

/// Build the witness for `f_shifted` and the partition, run [`smith_local`],
/// and report whether the cokernel is exactly the candidate group.
///
/// `f_shifted` must have nonzero constant term and leading coefficient `+1`
/// or `-1`; the sign is normalized internally to the characteristic
/// polynomial convention `a_d = (-1)^d`.
pub fn verify_witness(f_shifted: &IntPoly, parts: &[u32], ell: u64) -> Result<bool> {
    let d = match f_shifted.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::PolyParse("degree must be at least 1".into())),
    };
    let lead = f_shifted.leading().expect("nonzero polynomial");
    if !lead.abs().is_one() {
        return Err(Error::BadLeadingCoefficient);
    }
    let sign = BigInt::from(if d % 2 == 0 { 1 } else { -1 });
    let f = if *lead == sign {
        f_shifted.clone()
    } else {
        -f_shifted
    };
    let witness = witness_matrix(f.coeffs(), parts, ell)?;
    let divisors = smith_local(&witness)?;

    let mut expected: Vec<u32> = parts.iter().copied().filter(|&m| m > 0).collect();
    expected.sort_unstable();
    let mut padded = vec![0u32; d - expected.len().min(d)];
    padded.extend(expected);
    Ok(divisors.exponents == padded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn matrix_i64(m: &LocalMatrix) -> Vec<Vec<i64>> {
        m.entries()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        assert!(e.denom().is_one());
                        i64::try_from(e.numer()).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn witness_for_split_partition() {
        let w = witness_matrix(poly("t^2+8").coeffs(), &[1, 2], 2).unwrap();
        assert_eq!(matrix_i64(&w), vec![vec![0, -4], vec![2, 0]]);
        let divisors = smith_local(&w).unwrap();
        assert_eq!(divisors.exponents, vec![1, 2]);
        assert_eq!(divisors.total(), 3);
        assert_eq!(divisors.group().to_string(), "Z/2 + Z/4");
    }

    #[test]
    fn witness_for_cyclic_partition() {
        let w = witness_matrix(poly("t^2+8").coeffs(), &[3], 2).unwrap();
        assert_eq!(matrix_i64(&w), vec![vec![0, -8], vec![1, 0]]);
        let divisors = smith_local(&w).unwrap();
        assert_eq!(divisors.exponents, vec![0, 3]);
        assert_eq!(divisors.group().to_string(), "Z/8");
    }

    #[test]
    fn witness_rejects_polygon_violation() {
        let err = witness_matrix(poly("t^2+t+8").coeffs(), &[1, 2], 2).unwrap_err();
        assert_eq!(
            err,
            Error::PolygonCondition {
                s: 1,
                prime: 2,
                exponent: 1,
                index: 1
            }
        );
    }

    #[test]
    fn witness_rejects_wrong_total() {
        let err = witness_matrix(poly("t^2+8").coeffs(), &[1, 1], 2).unwrap_err();
        assert_eq!(
            err,
            Error::PartitionOrderMismatch {
                prime: 2,
                expected: 3,
                actual: 2
            }
        );
    }

    #[test]
    fn witness_rejects_bad_leading_coefficient() {
        // odd degree needs leading -1
        let err = witness_matrix(poly("t^3+8").coeffs(), &[3], 2).unwrap_err();
        assert_eq!(err, Error::BadLeadingCoefficient);
        assert!(witness_matrix(poly("-t^3+8").coeffs(), &[3], 2).is_ok());
    }

    #[test]
    fn witness_characteristic_polynomial_recovers_input() {
        for (f, parts, ell) in [
            (poly("t^2+8"), vec![1u32, 2], 2u64),
            (poly("t^2+8"), vec![3], 2),
            (poly("-t^3+4*t^2-8*t+32"), vec![2, 3], 2),
            (poly("t^4+9"), vec![2], 3),
        ] {
            let w = witness_matrix(f.coeffs(), &parts, ell).unwrap();
            let char_poly = w.char_poly();
            let d = f.degree().unwrap();
            let sign = if d % 2 == 0 { 1 } else { -1 };
            let expected: Vec<BigRational> = f
                .coeffs()
                .iter()
                .map(|c| BigRational::from_integer(c * BigInt::from(sign)))
                .collect();
            assert_eq!(char_poly, expected, "f = {}", f);
        }
    }

    #[test]
    fn local_smith_scales_units_away() {
        // [[6, 0], [0, 20]] at 2: valuations 1 and 2
        let m = LocalMatrix::from_bigint_rows(
            2,
            vec![
                vec![BigInt::from(6), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(20)],
            ],
        )
        .unwrap();
        assert_eq!(smith_local(&m).unwrap().exponents, vec![1, 2]);
    }

    #[test]
    fn local_smith_handles_rational_units() {
        let m = LocalMatrix::new(
            2,
            vec![
                vec![BigRational::new(BigInt::from(2), BigInt::from(3)), rat(1)],
                vec![rat(0), BigRational::new(BigInt::from(4), BigInt::from(9))],
            ],
        )
        .unwrap();
        // min valuation 0 at the off-diagonal 1: divisors are 0 and val(det)
        let div = smith_local(&m).unwrap();
        assert_eq!(div.exponents, vec![0, 3]);
    }

    #[test]
    fn local_smith_rejects_singular() {
        let m = LocalMatrix::from_bigint_rows(
            2,
            vec![
                vec![BigInt::from(2), BigInt::from(4)],
                vec![BigInt::from(1), BigInt::from(2)],
            ],
        )
        .unwrap();
        assert_eq!(smith_local(&m).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn local_matrix_rejects_bad_denominator()
    {
        let err = LocalMatrix::new(2, vec![vec![BigRational::new(BigInt::one(), BigInt::from(2))]])
            .unwrap_err();
        assert_eq!(err, Error::DenominatorNotCoprime(2));
    }

    #[test]
    fn integer_smith_of_known_matrix() {
        // relations 4u1 + 2u3 - u4, 16u3, 4u1 - u2 + 4u3, 8u1 as columns
        let rows: Vec<Vec<BigInt>> = [
            [4, 0, 4, 8],
            [0, 0, -1, 0],
            [2, 16, 4, 0],
            [-1, 0, 0, 0],
        ]
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
        let diag = integer_smith_diagonal(&rows).unwrap();
        let expected: Vec<BigInt> = [1, 1, 8, 16].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(diag, expected);
        let group = cokernel_integer(&rows).unwrap();
        assert_eq!(group.to_string(), "Z/8 + Z/16");
        assert_eq!(group.order().to_string(), "128");
    }

    #[test]
    fn integer_smith_divisibility_chain() {
        let rows: Vec<Vec<BigInt>> = [[2, 0], [0, 3]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let diag = integer_smith_diagonal(&rows).unwrap();
        assert_eq!(diag, vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(cokernel_integer(&rows).unwrap().to_string(), "Z/2 + Z/3");
    }

    #[test]
    fn verifier_accepts_passing_partitions() {
        assert!(verify_witness(&poly("t^2+8"), &[1, 2], 2).unwrap());
        assert!(verify_witness(&poly("t^2+8"), &[3], 2).unwrap());
        // monic odd degree is normalized by sign
        assert!(verify_witness(&poly("t^3-4*t^2+8*t-32"), &[2, 3], 2).unwrap());
        assert!(verify_witness(&poly("-t^3+4*t^2-8*t+32"), &[2, 3], 2).unwrap());
    }

    #[test]
    fn verifier_propagates_polygon_failure() {
        let err = verify_witness(&poly("t^2+t+8"), &[1, 2], 2).unwrap_err();
        assert!(matches!(err, Error::PolygonCondition { s: 1, .. }));
    }

    #[test]
    fn trivial_partition_gives_unit_cokernel() {
        assert!(verify_witness(&poly("t^2+t+1"), &[], 5).unwrap());
        let w = witness_matrix(poly("t^2+t+1").coeffs(), &[], 5).unwrap();
        assert_eq!(smith_local(&w).unwrap().exponents, vec![0, 0]);
    }

    #[test]
    fn inverse_round_trips() {
        let m = vec![
            vec![rat(2), rat(1)],
            vec![rat(7), rat(4)],
        ];
        let inv = mat_inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
        let singular = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert!(mat_inverse(&singular).is_none());
    }
}
