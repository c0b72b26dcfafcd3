//! Brute-force ground truth for the polygon criterion at desk scale.
//!
//! Every sublattice of the standard lattice with `l`-power index has a unique
//! upper-triangular Hermite basis, so the invariant sublattices for an
//! integer operator `E` can be enumerated outright when the index budget is
//! small. The cokernel of `E` restricted to each invariant sublattice is an
//! achievable group; collecting them gives a set to compare against the
//! polygon criterion, with no polygon anywhere in the loop.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::abgroup::LocalGroupType;
use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::lattice::{smith_local, LocalMatrix};

/// Work ceiling for [`enumerate_invariant_sublattices`]: the enumeration is
/// refused when `l^(d*k)` exceeds this.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Canonical basis of a finite-index sublattice of `Z^d`.
///
/// The columns of `hnf` generate the sublattice; the matrix is upper
/// triangular, diagonal entries are powers of the enumeration prime, and each
/// off-diagonal entry is reduced modulo the diagonal entry of its row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublatticeBasis {
    hnf: Vec<Vec<BigInt>>,
    index: BigUint,
}

impl SublatticeBasis {
    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    /// Index in the standard lattice: the determinant of the basis.
    pub fn index(&self) -> &BigUint {
        &self.index
    }
}

/// Matrix of multiplication by `x` on `Z[x]/(f)` in the power basis.
///
/// `f` must have leading coefficient `+1` or `-1`; the sign is normalized
/// away since it does not change the quotient ring.
pub fn companion_matrix(f: &IntPoly) -> Result<Vec<Vec<BigInt>>> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::PolyParse("degree must be at least 1".into())),
    };
    let lead = f.leading().expect("nonzero polynomial");
    if !lead.abs().is_one() {
        return Err(Error::BadLeadingCoefficient);
    }
    let monic = if lead.is_one() { f.clone() } else { -f };
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for j in 0..d - 1 {
        m[j + 1][j] = BigInt::one();
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[d - 1] = -monic.coeff(i);
    }
    Ok(m)
}

/// Solve `H x = b` for upper-triangular `H` with nonzero diagonal.
fn solve_upper_triangular(h: &[Vec<BigInt>], b: &[BigRational]) -> Vec<BigRational> {
    let d = h.len();
    let mut x = vec![BigRational::zero(); d];
    for i in (0..d).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..d {
            let s = BigRational::from_integer(h[i][j].clone()) * &x[j];
            acc -= s;
        }
        x[i] = acc / BigRational::from_integer(h[i][i].clone());
    }
    x
}

/// Matrix of `E` restricted to the sublattice spanned by the columns of `h`,
/// or `None` when the sublattice is not invariant.
///
/// The solve denominators are powers of the enumeration prime, so the
/// restriction is integral over the localization exactly when it is an
/// integer matrix.
fn restricted_action(e: &[Vec<BigInt>], h: &[Vec<BigInt>]) -> Option<Vec<Vec<BigRational>>> {
    let d = h.len();
    let mut x = vec![vec![BigRational::zero(); d]; d];
    for col in 0..d {
        let image: Vec<BigRational> = (0..d)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..d {
                    acc += &e[i][j] * &h[j][col];
                }
                BigRational::from_integer(acc)
            })
            .collect();
        let solved = solve_upper_triangular(h, &image);
        for (i, v) in solved.into_iter().enumerate() {
            if !v.denom().is_one() {
                return None;
            }
            x[i][col] = v;
        }
    }
    Some(x)
}

fn diagonals(d: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    fn rec(d: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for e in 0..=left {
            current.push(e);
            rec(d, left - e, current, out);
            current.pop();
        }
    }
    rec(d, k, &mut current, &mut out);
    out
}

/// All sublattices of `Z^d` of index dividing `l^k` that `E` maps into
/// themselves, as canonical Hermite bases.
///
/// The pre-flight guard refuses runs where `l^(d*k)` exceeds `budget`; pass
/// [`DEFAULT_BUDGET`] unless a caller has measured something better.
pub fn enumerate_invariant_sublattices(
    e: &[Vec<BigInt>],
    ell: u64,
    k: u32,
    budget: u64,
) -> Result<Vec<SublatticeBasis>> {
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    let d = e.len();
    for row in e {
        if row.len() != d {
            return Err(Error::PolyParse("matrix must be square".into()));
        }
    }
    let exponent = (d as u32) * k;
    let within = BigUint::from(ell).pow(exponent) <= BigUint::from(budget);
    if !within {
        return Err(Error::BudgetExceeded {
            prime: ell,
            exponent,
            budget,
        });
    }

    let mut found = Vec::new();
    for diag in diagonals(d, k) {
        // positions above the diagonal, row-major; entries in row i run
        // modulo l^(e_i)
        let positions: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .collect();
        let mut h = vec![vec![BigInt::zero(); d]; d];
        for i in 0..d {
            h[i][i] = BigInt::from(ell).pow(diag[i]);
        }
        let index: BigUint = BigUint::from(ell).pow(diag.iter().sum::<u32>());
        fill(&positions, 0, ell, &diag, &mut h, &mut |h| {
            if restricted_action(e, h).is_some() {
                found.push(SublatticeBasis {
                    hnf: h.to_vec(),
                    index: index.clone(),
                });
            }
        });
    }
    Ok(found)
}

fn fill(
    positions: &[(usize, usize)],
    at: usize,
    ell: u64,
    diag: &[u32],
    h: &mut Vec<Vec<BigInt>>,
    emit: &mut impl FnMut(&Vec<Vec<BigInt>>),
) {
    if at == positions.len() {
        emit(h);
        return;
    }
    let (i, j) = positions[at];
    let bound = u64::pow(ell, diag[i]);
    for v in 0..bound {
        h[i][j] = BigInt::from(v);
        fill(positions, at + 1, ell, diag, h, emit);
    }
    h[i][j] = BigInt::zero();
}

/// Cokernel type of `E` restricted to an enumerated sublattice.
pub fn restricted_cokernel(
    e: &[Vec<BigInt>],
    basis: &SublatticeBasis,
    ell: u64,
) -> Result<LocalGroupType> {
    let action = restricted_action(e, basis.matrix()).ok_or(Error::DenominatorNotCoprime(ell))?;
    let divisors = smith_local(&LocalMatrix::new(ell, action)?)?;
    Ok(divisors.group())
}

/// The achievable cokernel types by exhaustive search: companion matrix of
/// `f_shifted`, every invariant sublattice up to index `l^k`, the elementary
/// divisors of the restriction on each. Sorted by number of parts, then
/// lexicographically, matching the candidate order of the criterion.
pub fn achievable_groups_bruteforce(
    f_shifted: &IntPoly,
    ell: u64,
    k: u32,
    budget: u64,
) -> Result<Vec<LocalGroupType>> {
    if f_shifted.coeff(0).is_zero() {
        return Err(Error::ConstantTermVanishes);
    }
    if !f_shifted.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    let e = companion_matrix(f_shifted)?;
    let mut types: BTreeSet<Vec<u32>> = BTreeSet::new();
    for basis in enumerate_invariant_sublattices(&e, ell, k, budget)? {
        let group = restricted_cokernel(&e, &basis, ell)?;
        types.insert(group.parts().to_vec());
    }
    let mut ordered: Vec<Vec<u32>> = types.into_iter().collect();
    ordered.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    ordered
        .iter()
        .map(|parts| LocalGroupType::new(ell, parts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{mat_inverse, mat_mul};

    fn poly(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn labels(groups: &[LocalGroupType]) -> Vec<String> {
        groups.iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn companion_matrix_shape() {
        let m = companion_matrix(&poly("t^2+8")).unwrap();
        let ints: Vec<Vec<i64>> = m
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect();
        assert_eq!(ints, vec![vec![0, -8], vec![1, 0]]);
        // sign normalization leaves the quotient ring alone
        let neg = companion_matrix(&poly("-t^3+4*t^2-8*t+32")).unwrap();
        let pos = companion_matrix(&poly("t^3-4*t^2+8*t-32")).unwrap();
        assert_eq!(neg, pos);
        assert_eq!(
            companion_matrix(&poly("2*t^2+1")).unwrap_err(),
            Error::BadLeadingCoefficient
        );
    }

    #[test]
    fn zero_bound_gives_standard_lattice_only() {
        let e = companion_matrix(&poly("t^2+8")).unwrap();
        let bases = enumerate_invariant_sublattices(&e, 2, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(bases.len(), 1);
        assert_eq!(bases[0].index(), &BigUint::from(1u32));
        assert!(bases[0]
            .matrix()
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, v)| {
                if i == j {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })));
    }

    #[test]
    fn scalar_operator_keeps_every_sublattice() {
        // index dividing 4: 1 lattice of index 1, 3 of index 2, 7 of index 4
        let e = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
        ];
        let bases = enumerate_invariant_sublattices(&e, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(bases.len(), 11);
    }

    #[test]
    fn enumerated_bases_pass_independent_invariance_check() {
        let e = companion_matrix(&poly("t^2+8")).unwrap();
        let bases = enumerate_invariant_sublattices(&e, 2, 3, DEFAULT_BUDGET).unwrap();
        assert!(!bases.is_empty());
        let e_rat: Vec<Vec<BigRational>> = e
            .iter()
            .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
            .collect();
        for basis in &bases {
            let h_rat: Vec<Vec<BigRational>> = basis
                .matrix()
                .iter()
                .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
                .collect();
            let inv = mat_inverse(&h_rat).expect("bases are nonsingular");
            let x = mat_mul(&inv, &mat_mul(&e_rat, &h_rat));
            for row in &x {
                for entry in row {
                    assert!(entry.denom().is_one(), "restriction must be integral");
                }
            }
        }
    }

    #[test]
    fn bruteforce_set_for_split_example() {
        let groups = achievable_groups_bruteforce(&poly("t^2+8"), 2, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(labels(&groups), ["Z/8", "Z/2 + Z/4"]);
    }

    #[test]
    fn bruteforce_set_for_cyclic_only_example() {
        let groups = achievable_groups_bruteforce(&poly("t^2+t+8"), 2, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(labels(&groups), ["Z/8"]);
    }

    #[test]
    fn unit_constant_term_gives_trivial_group() {
        let groups = achievable_groups_bruteforce(&poly("t^2+t+1"), 2, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(groups.len(), 1);
        assert!(groups[0].is_trivial());
    }

    #[test]
    fn small_cubic_instance() {
        // ord_2 of the constant term is 1: the single partition (1) must
        // appear and nothing else can
        let groups = achievable_groups_bruteforce(&poly("t^3+t+2"), 2, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(labels(&groups), ["Z/2"]);
    }

    #[test]
    fn budget_guard_triggers() {
        let e = companion_matrix(&poly("t^2+8")).unwrap();
        let err = enumerate_invariant_sublattices(&e, 2, 25, DEFAULT_BUDGET).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                prime: 2,
                exponent: 50,
                budget: DEFAULT_BUDGET,
            }
        );
    }

    #[test]
    fn bruteforce_validates_input() {
        assert_eq!(
            achievable_groups_bruteforce(&poly("t^2"), 2, 2, DEFAULT_BUDGET).unwrap_err(),
            Error::ConstantTermVanishes
        );
        assert_eq!(
            achievable_groups_bruteforce(&poly("t^2+4*t+4"), 2, 2, DEFAULT_BUDGET).unwrap_err(),
            Error::NotSquarefree
        );
    }
}
