use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Precondition failures carry enough structure for a caller to map them to
/// machine-readable codes; the `Display` strings are stable and tested.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Squarefreeness of the zero polynomial is undefined.
    #[error("squarefreeness is undefined for the zero polynomial")]
    ZeroPolynomial,

    /// Newton polygons need a nonzero constant term.
    #[error("constant term vanishes")]
    ConstantTermVanishes,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    /// A group with `parts` nonzero cyclic invariants cannot be generated by
    /// `r` elements when `parts > r`.
    #[error("group not generated by {r} elements ({parts} nonzero invariant factors)")]
    TooManyParts { r: usize, parts: usize },

    /// Polygon comparison requires equal spans.
    #[error("polygons span different ranges: [0, {left}] vs [0, {right}]")]
    SpanMismatch { left: i64, right: i64 },

    #[error("not a Weil polynomial: {0}")]
    NotWeil(String),

    /// The classification criterion is only available for squarefree inputs.
    #[error("main theorem requires no multiple roots")]
    NotSquarefree,

    /// The basis denominators fail to divide: the candidate invariants do not
    /// sit on or below the Newton polygon.
    #[error("polygon condition violated at s = {s}: {prime}^{exponent} must divide coefficient {index}")]
    PolygonCondition {
        s: usize,
        prime: u64,
        exponent: u32,
        index: usize,
    },

    /// A characteristic polynomial of an integer operator has leading
    /// coefficient (-1)^degree; anything else cannot come from one.
    #[error("leading coefficient must be +1 or -1")]
    BadLeadingCoefficient,

    /// The partition must sum to the valuation of the constant term.
    #[error("partition sums to {actual} but the {prime}-valuation of the constant term is {expected}")]
    PartitionOrderMismatch {
        prime: u64,
        expected: u32,
        actual: u32,
    },

    #[error("elementary divisors require a nonsingular matrix")]
    SingularMatrix,

    /// Entries of a localized matrix must have denominators coprime to the prime.
    #[error("entry denominator is divisible by {0}")]
    DenominatorNotCoprime(u64),

    #[error("factors not nested: factor {position} does not divide factor {}", position - 1)]
    FactorsNotNested { position: usize },

    #[error("factor list is empty")]
    NoFactors,

    /// A factor evaluates to zero at 1, so its local group order is undefined.
    #[error("factor {position} vanishes at 1")]
    FactorVanishesAtOne { position: usize },

    /// The sublattice enumeration would exceed the configured work budget.
    #[error("enumeration budget exceeded: {prime}^{exponent} > {budget}")]
    BudgetExceeded {
        prime: u64,
        exponent: u32,
        budget: u64,
    },

    /// Trial factorization found a prime factor outside the supported range.
    #[error("prime factor {0} exceeds 64 bits")]
    FactorTooLarge(String),

    #[error("cannot parse polynomial: {0}")]
    PolyParse(String),

    #[error("cannot parse group label: {0}")]
    LabelParse(String),

    #[error("cannot parse rational: {0}")]
    RationalParse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short stable identifier for machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "zero_polynomial",
            Error::ConstantTermVanishes => "constant_term_vanishes",
            Error::NotPrime(_) => "not_prime",
            Error::NotPrimePower(_) => "not_prime_power",
            Error::TooManyParts { .. } => "too_many_generators",
            Error::SpanMismatch { .. } => "span_mismatch",
            Error::NotWeil(_) => "not_weil",
            Error::NotSquarefree => "not_squarefree",
            Error::PolygonCondition { .. } => "polygon_condition_violated",
            Error::BadLeadingCoefficient => "bad_leading_coefficient",
            Error::PartitionOrderMismatch { .. } => "partition_order_mismatch",
            Error::SingularMatrix => "singular_matrix",
            Error::DenominatorNotCoprime(_) => "denominator_not_coprime",
            Error::FactorsNotNested { .. } => "factors_not_nested",
            Error::NoFactors => "no_factors",
            Error::FactorVanishesAtOne { .. } => "factor_vanishes_at_one",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::FactorTooLarge(_) => "factor_too_large",
            Error::PolyParse(_) => "poly_parse",
            Error::LabelParse(_) => "label_parse",
            Error::RationalParse(_) => "rational_parse",
        }
    }
}
