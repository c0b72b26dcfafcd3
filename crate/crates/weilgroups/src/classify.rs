//! The classification criterion as an algorithm.
//!
//! For a squarefree accepted polynomial `f` the groups of order `f(1)` that
//! occur split into independent questions, one per prime `l` dividing `f(1)`:
//! a candidate `l`-group passes exactly when the Newton polygon of `f(1-t)`
//! at `l` lies on or above the Hodge polygon of the candidate, padded to
//! `deg f` parts. This module enumerates the passing candidates per prime,
//! tests a single group with diagnostics, assembles full groups as a lazy
//! product across primes, handles the quadratic case by direct divisor
//! arithmetic, and computes the conjectural direct-sum set for factored
//! non-squarefree inputs.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::abgroup::{partitions_bounded, GroupType, LocalGroupType};
use crate::arith::{factor, is_prime_u64, ord_prime, prime_power};
use crate::error::{Error, Result};
use crate::intpoly::{validate_weil, IntPoly, Verdict, WeilReport};
use crate::polygon::{
    first_violation, hodge_polygon, lies_on_or_above, newton_polygon, rational_to_string,
    ConvexPolygon,
};

/// A validated input to the classification: the polynomial passed
/// [`validate_weil`] and has no multiple roots.
#[derive(Debug, Clone)]
pub struct IsogenyClass {
    f: IntPoly,
    q: u64,
    report: WeilReport,
    shifted: IntPoly,
    order: BigUint,
}

impl IsogenyClass {
    pub fn new(f: IntPoly, q: u64) -> Result<Self> {
        let report = validate_weil(&f, q);
        if let Verdict::Rejected { reason } = &report.verdict {
            return Err(Error::NotWeil(reason.clone()));
        }
        if !report.squarefree {
            return Err(Error::NotSquarefree);
        }
        let shifted = f.substitute_one_minus_t();
        let order = report
            .order
            .to_biguint()
            .expect("accepted polynomials have positive order");
        Ok(IsogenyClass {
            f,
            q,
            report,
            shifted,
            order,
        })
    }

    pub fn polynomial(&self) -> &IntPoly {
        &self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.report.degree
    }

    pub fn genus(&self) -> usize {
        self.report.g.expect("accepted degrees are even")
    }

    pub fn report(&self) -> &WeilReport {
        &self.report
    }

    /// Common order of every group in the class: `f(1)`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// The substituted polynomial `f(1-t)` whose Newton polygons drive
    /// everything.
    pub fn shifted(&self) -> &IntPoly {
        &self.shifted
    }

    /// All candidate partitions at one prime, passing or not, with their
    /// polygons. Candidates follow the partition enumeration order: fewer
    /// parts first, then lexicographic.
    pub fn classify_prime(&self, ell: u64) -> Result<PrimeClassification> {
        if !is_prime_u64(ell) {
            return Err(Error::NotPrime(ell));
        }
        let order_int = BigInt::from(self.order.clone());
        let exponent = ord_prime(&order_int, ell);
        let newton = newton_polygon(&self.shifted, ell)?;
        let d = self.degree();
        let mut candidates = Vec::new();
        for parts in partitions_bounded(exponent, d) {
            let hodge = hodge_polygon(&parts, d)?;
            let passed = lies_on_or_above(&newton, &hodge)?;
            candidates.push(CandidatePartition {
                parts,
                hodge,
                passed,
            });
        }
        debug_assert!(candidates.iter().any(|c| c.passed));
        Ok(PrimeClassification {
            prime: ell,
            exponent,
            newton,
            candidates,
        })
    }

    /// The groups realized at one prime, in candidate order.
    pub fn realizable_local_groups(&self, ell: u64) -> Result<Vec<LocalGroupType>> {
        Ok(self.classify_prime(ell)?.groups())
    }

    /// Decide one group, reporting which check failed and where.
    pub fn is_realizable(&self, group: &GroupType) -> Realizability {
        if group.order() != self.order {
            return Realizability::WrongOrder {
                expected: self.order.clone(),
                actual: group.order(),
            };
        }
        let d = self.degree();
        for local in group.components() {
            if local.rank() > d {
                return Realizability::TooManyGenerators {
                    prime: local.prime(),
                    rank: local.rank(),
                    max: d,
                };
            }
            let hodge = hodge_polygon(local.parts(), d).expect("rank checked above");
            let newton = newton_polygon(&self.shifted, local.prime())
                .expect("constant term f(1) is nonzero and the prime is valid");
            if let Some((x, nh, hh)) =
                first_violation(&newton, &hodge).expect("both polygons span the degree")
            {
                return Realizability::PolygonFailure {
                    prime: local.prime(),
                    abscissa: x,
                    newton: nh,
                    hodge: hh,
                };
            }
        }
        Realizability::Realizable
    }

    /// Classify at every prime dividing `f(1)` and count the full groups
    /// without materializing them.
    pub fn classify_all(&self) -> Result<ClassificationResult> {
        let primes = factor(&self.order)?;
        let mut per_prime = Vec::new();
        let mut total_count = BigUint::one();
        for &p in primes.keys() {
            let pc = self.classify_prime(p)?;
            total_count *= BigUint::from(pc.passing_count() as u64);
            per_prime.push(pc);
        }
        Ok(ClassificationResult {
            weil: self.report.clone(),
            per_prime,
            total_count,
        })
    }
}

/// One prime's worth of classification: the Newton polygon and every
/// candidate partition with its verdict.
#[derive(Debug, Clone)]
pub struct PrimeClassification {
    pub prime: u64,
    /// `ord_l(f(1))`, the common exponent sum of every candidate.
    pub exponent: u32,
    pub newton: ConvexPolygon,
    pub candidates: Vec<CandidatePartition>,
}

#[derive(Debug, Clone)]
pub struct CandidatePartition {
    pub parts: Vec<u32>,
    pub hodge: ConvexPolygon,
    pub passed: bool,
}

impl PrimeClassification {
    pub fn passing(&self) -> impl Iterator<Item = &CandidatePartition> {
        self.candidates.iter().filter(|c| c.passed)
    }

    pub fn passing_count(&self) -> usize {
        self.passing().count()
    }

    pub fn groups(&self) -> Vec<LocalGroupType> {
        self.passing()
            .map(|c| LocalGroupType::new(self.prime, &c.parts).expect("candidates are valid"))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "prime": self.prime,
            "exponent": self.exponent,
            "newton": self.newton.to_json(),
            "candidates": self.candidates.iter().map(|c| json!({
                "parts": c.parts,
                "group": LocalGroupType::new(self.prime, &c.parts)
                    .expect("candidates are valid").to_string(),
                "hodge": c.hodge.to_json(),
                "passed": c.passed,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Full classification output: per-prime candidate tables and the exact
/// number of realizable groups.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub weil: WeilReport,
    /// Ascending by prime; one entry per prime dividing `f(1)`.
    pub per_prime: Vec<PrimeClassification>,
    pub total_count: BigUint,
}

impl ClassificationResult {
    /// Lazy enumeration of the full groups: the product of per-prime passing
    /// lists, later primes varying fastest. Yields exactly the trivial group
    /// when `f(1) = 1`.
    pub fn groups(&self) -> FullGroups {
        let columns: Vec<Vec<LocalGroupType>> =
            self.per_prime.iter().map(|pc| pc.groups()).collect();
        let done = columns.iter().any(|c| c.is_empty());
        FullGroups {
            indices: vec![0; columns.len()],
            columns,
            done,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "order": self.weil.order.to_string(),
            "total_count": count_json(&self.total_count),
            "per_prime": self.per_prime.iter().map(|pc| pc.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Counts are exact; emit a JSON number while it fits and a string beyond.
fn count_json(count: &BigUint) -> serde_json::Value {
    match count.to_u64() {
        Some(small) => json!(small),
        None => json!(count.to_string()),
    }
}

/// Odometer over per-prime group choices; see [`ClassificationResult::groups`].
pub struct FullGroups {
    columns: Vec<Vec<LocalGroupType>>,
    indices: Vec<usize>,
    done: bool,
}

impl Iterator for FullGroups {
    type Item = GroupType;

    fn next(&mut self) -> Option<GroupType> {
        if self.done {
            return None;
        }
        let locals: Vec<LocalGroupType> = self
            .columns
            .iter()
            .zip(&self.indices)
            .map(|(col, &i)| col[i].clone())
            .collect();
        let group = GroupType::from_locals(locals).expect("per-prime columns have distinct primes");
        let mut pos = self.indices.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.indices[pos] += 1;
            if self.indices[pos] < self.columns[pos].len() {
                break;
            }
            self.indices[pos] = 0;
        }
        Some(group)
    }
}

/// Verdict of [`IsogenyClass::is_realizable`] with the first failure located.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    Realizable,
    /// The group order differs from `f(1)`; nothing else was checked.
    WrongOrder { expected: BigUint, actual: BigUint },
    /// More nonzero invariant factors than the degree allows.
    TooManyGenerators { prime: u64, rank: usize, max: usize },
    /// First abscissa where the Newton polygon dips below the Hodge polygon.
    PolygonFailure {
        prime: u64,
        abscissa: i64,
        newton: BigRational,
        hodge: BigRational,
    },
}

impl Realizability {
    pub fn holds(&self) -> bool {
        matches!(self, Realizability::Realizable)
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Realizability::Realizable => "realizable",
            Realizability::WrongOrder { .. } => "wrong_order",
            Realizability::TooManyGenerators { .. } => "too_many_generators",
            Realizability::PolygonFailure { .. } => "polygon_failure",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = json!({
            "realizable": self.holds(),
            "code": self.code(),
        });
        let obj = value.as_object_mut().expect("object literal");
        match self {
            Realizability::Realizable => {}
            Realizability::WrongOrder { expected, actual } => {
                obj.insert("expected_order".into(), json!(expected.to_string()));
                obj.insert("actual_order".into(), json!(actual.to_string()));
            }
            Realizability::TooManyGenerators { prime, rank, max } => {
                obj.insert("prime".into(), json!(prime));
                obj.insert("rank".into(), json!(rank));
                obj.insert("max".into(), json!(max));
            }
            Realizability::PolygonFailure {
                prime,
                abscissa,
                newton,
                hodge,
            } => {
                obj.insert("prime".into(), json!(prime));
                obj.insert("abscissa".into(), json!(abscissa));
                obj.insert("newton".into(), json!(rational_to_string(newton)));
                obj.insert("hodge".into(), json!(rational_to_string(hodge)));
            }
        }
        value
    }
}

impl fmt::Display for Realizability {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realizability::Realizable => write!(out, "realizable"),
            Realizability::WrongOrder { expected, actual } => write!(
                out,
                "wrong order: group has order {actual}, the class requires {expected}"
            ),
            Realizability::TooManyGenerators { rank, max, .. } => write!(
                out,
                "group not generated by {max} elements ({rank} nonzero invariant factors)"
            ),
            Realizability::PolygonFailure {
                prime,
                abscissa,
                newton,
                hodge,
            } => write!(
                out,
                "newton polygon dips below the hodge polygon at prime {prime}, x = {abscissa}: {} < {}",
                rational_to_string(newton),
                rational_to_string(hodge)
            ),
        }
    }
}

/// Groups for the quadratic class `t^2 - b*t + q` by divisor arithmetic.
///
/// With `N = 1 - b + q`: away from the double-root boundary the groups are
/// exactly `Z/n1 + Z/n2` with `n1 * n2 = N`, `n1 | n2` and `n1 | b - 2`
/// (everything divides zero); on the boundary `b*b = 4q` the single group is
/// `(Z/n1)^2` with `n1^2 = N`. The boundary case is the one place this crate
/// classifies a polynomial with multiple roots.
pub fn elliptic_groups(q: u64, b: i64) -> Result<Vec<GroupType>> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    let qi = i128::from(q);
    let bi = i128::from(b);
    if bi * bi > 4 * qi {
        return Err(Error::NotWeil(format!(
            "trace {b} out of range: b^2 must be at most 4q = {}",
            4 * qi
        )));
    }
    let n = qi + 1 - bi;
    assert!(n > 0, "1 - b + q is positive whenever b^2 <= 4q and q >= 2");
    let n = n as u128;

    if bi * bi == 4 * qi {
        let root = n.sqrt();
        if root * root != n {
            return Ok(Vec::new());
        }
        let half = GroupType::cyclic(&BigUint::from(root))?;
        return Ok(vec![half.direct_sum(&half)]);
    }

    let b_minus_2 = bi - 2;
    let mut out = Vec::new();
    let mut n1: u128 = 1;
    while n1 * n1 <= n {
        let divides_order = n % (n1 * n1) == 0;
        let divides_trace = b_minus_2 == 0 || b_minus_2.unsigned_abs() % n1 == 0;
        if divides_order && divides_trace {
            let a = GroupType::cyclic(&BigUint::from(n1))?;
            let b = GroupType::cyclic(&BigUint::from(n / n1))?;
            out.push(a.direct_sum(&b));
        }
        n1 += 1;
    }
    Ok(out)
}

/// Conjectured groups at `ell` for a factored polynomial `f = f_1 * ... * f_s`
/// with `f_s | ... | f_1`, each factor squarefree.
#[derive(Debug, Clone)]
pub struct ConjectureSet {
    pub prime: u64,
    /// Deduplicated direct sums, sorted by number of parts then
    /// lexicographically.
    pub groups: Vec<LocalGroupType>,
    /// Set unless a proved case applies: a single factor, or every factor of
    /// degree at most 2.
    pub conjectural: bool,
}

impl ConjectureSet {
    pub const CONJECTURAL_NOTE: &'static str = "CONJECTURAL: the direct-sum description is \
        proved only for a single factor or when every factor has degree at most 2; in general \
        the achievable set can be strictly larger";

    pub fn note(&self) -> Option<&'static str> {
        self.conjectural.then_some(Self::CONJECTURAL_NOTE)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "prime": self.prime,
            "groups": self.groups.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "conjectural": self.conjectural,
            "note": self.note(),
        })
    }
}

/// Compute the conjectured set: each `G_j` ranges over the partitions of
/// `ord_l(f_j(1))` into at most `deg f_j` parts passing the polygon test for
/// `f_j(1-t)`, and the output collects the direct sums over all tuples.
pub fn conjecture_local_groups(factors: &[IntPoly], ell: u64) -> Result<ConjectureSet> {
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    if factors.is_empty() {
        return Err(Error::NoFactors);
    }
    for (j, f) in factors.iter().enumerate() {
        if !f.is_squarefree()? {
            return Err(Error::NotSquarefree);
        }
        if j > 0 && !f.divides(&factors[j - 1]) {
            return Err(Error::FactorsNotNested { position: j + 1 });
        }
        if f.eval_at_one().is_zero() {
            return Err(Error::FactorVanishesAtOne { position: j + 1 });
        }
    }

    let mut per_factor: Vec<Vec<Vec<u32>>> = Vec::new();
    for f in factors {
        let d = f.degree().expect("squarefree excludes zero");
        let m = ord_prime(&f.eval_at_one(), ell);
        let np = newton_polygon(&f.substitute_one_minus_t(), ell)?;
        let mut passing = Vec::new();
        for parts in partitions_bounded(m, d) {
            let hp = hodge_polygon(&parts, d)?;
            if lies_on_or_above(&np, &hp)? {
                passing.push(parts);
            }
        }
        per_factor.push(passing);
    }

    let mut sums: Vec<Vec<u32>> = vec![Vec::new()];
    for column in &per_factor {
        let mut next = Vec::new();
        for prefix in &sums {
            for parts in column {
                let mut merged = prefix.clone();
                merged.extend_from_slice(parts);
                next.push(merged);
            }
        }
        sums = next;
    }
    let deduped: BTreeSet<Vec<u32>> = sums
        .into_iter()
        .map(|mut parts| {
            parts.sort_unstable();
            parts
        })
        .collect();
    let mut ordered: Vec<Vec<u32>> = deduped.into_iter().collect();
    ordered.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let groups = ordered
        .iter()
        .map(|parts| LocalGroupType::new(ell, parts))
        .collect::<Result<Vec<_>>>()?;
    let single = factors.len() == 1;
    let all_quadratic_or_less = factors.iter().all(|f| f.degree().unwrap_or(0) <= 2);
    Ok(ConjectureSet {
        prime: ell,
        groups,
        conjectural: !(single || all_quadratic_or_less),
    })
}
