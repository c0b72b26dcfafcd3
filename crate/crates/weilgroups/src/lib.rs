//! Which finite abelian groups arise as groups of rational points in a fixed
//! isogeny class over a finite field, decided by a comparison of Newton and
//! Hodge polygons, with explicit lattice witnesses for every positive answer.
//!
//! Start with [`validate_weil`] to check a characteristic polynomial, then
//! [`classify::IsogenyClass`] for the classification and
//! [`lattice::verify_witness`] for certificates.

pub mod abgroup;
pub mod arith;
pub mod classify;
pub mod error;
pub mod intpoly;
pub mod lattice;
pub mod oracle;
pub mod polygon;
mod sturm;

pub use abgroup::{count_partitions_bounded, partitions_bounded, GroupType, LocalGroupType};
pub use classify::{
    conjecture_local_groups, elliptic_groups, ClassificationResult, ConjectureSet, IsogenyClass,
    Realizability,
};
pub use error::{Error, Result};
pub use intpoly::{validate_weil, IntPoly, Verdict, WeilReport};
pub use lattice::{
    cokernel_integer, smith_local, verify_witness, witness_matrix, ElementaryDivisors, LocalMatrix,
};
pub use oracle::{
    achievable_groups_bruteforce, companion_matrix, enumerate_invariant_sublattices,
    restricted_cokernel, SublatticeBasis, DEFAULT_BUDGET,
};
pub use polygon::{
    endpoints_match, first_violation, hodge_polygon, lies_on_or_above, newton_polygon,
    rational_from_str, rational_to_string, ConvexPolygon,
};

/// The guide chapters under `book/src` compile and run here as doc-tests, so
/// every code block in the book is checked on an ordinary test run.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(WeilPolynomials, "../../../book/src/weil-polynomials.md");
    chapter!(Polygons, "../../../book/src/polygons.md");
    chapter!(Groups, "../../../book/src/groups.md");
    chapter!(Classification, "../../../book/src/classification.md");
    chapter!(Witnesses, "../../../book/src/witnesses.md");
    chapter!(Oracle, "../../../book/src/oracle.md");
    chapter!(Cli, "../../../book/src/cli.md");
}
