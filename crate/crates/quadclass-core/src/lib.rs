//! Exact arithmetic for real quadratic orders.
//!
//! Everything here is driven by a single integer parameter `d >= 4` through
//! the discriminant `delta_d = (d+1)(d-3)`. The crate computes, in exact
//! integer arithmetic throughout:
//!
//! * class numbers and class monoids of binary quadratic forms of
//!   discriminant `delta_d`, via reduction cycles ([`qform`]);
//! * the bijection between form classes and conjugacy classes of
//!   trace `d-1` matrices in `SL2(Z)` ([`sl2corr`]);
//! * fundamental units of orders, powers of units satisfying congruence and
//!   sign conditions, and the classification of `d` for which the cube of
//!   the distinguished unit is a square ([`orders`]);
//! * cardinalities of ray class groups of real quadratic orders for moduli
//!   built from `d`, the induced degree predictions, the degeneration
//!   predicate, and density scans ([`rayclass`]).
//!
//! The [`verify`] module packages the consistency checks shared by the test
//! suite and the command line tool, and [`golden`] holds reference tables
//! the computations are compared against.

pub mod arith;
pub mod golden;
pub mod orders;
pub mod qform;
pub mod rayclass;
pub mod sl2corr;
pub mod verify;

use num_bigint::BigInt;

/// Errors reported by the library.
///
/// Domain violations (bad `d`, bad discriminant, bad conductor divisor) are
/// caller errors; [`Error::InexactDivision`] signals that an identity the
/// ray class formula relies on failed, which would falsify the computation
/// and is therefore never silently rounded.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// `d` must be at least 4 for `(d+1)(d-3)` to be a positive nonsquare.
    #[error("d = {d} is not supported: need d >= 4 so that (d+1)(d-3) = {delta} is a positive nonsquare discriminant")]
    UnsupportedD { d: BigInt, delta: BigInt },
    /// An operation expecting a positive integer received something else.
    #[error("{op} requires a positive integer argument; got {value}")]
    NonPositive { op: &'static str, value: BigInt },
    /// A discriminant argument was not a positive nonsquare `0, 1 mod 4`.
    #[error("{0} is not a positive nonsquare integer congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(BigInt),
    /// Two forms expected to share a discriminant did not.
    #[error("forms have different discriminants ({left} vs {right})")]
    DiscriminantMismatch { left: BigInt, right: BigInt },
    /// A conductor divisor argument did not divide the conductor.
    #[error("conductor divisor {fprime} does not divide the conductor {f}")]
    InvalidConductorDivisor { fprime: BigInt, f: BigInt },
    /// A discriminant that must be fundamental was not.
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(BigInt),
    /// Coordinates violating the integrality parity of the maximal order.
    #[error("({x} + {y}*sqrt({delta0}))/2 is not an algebraic integer: x and y*delta0 must agree mod 2")]
    ParityViolation { delta0: BigInt, x: BigInt, y: BigInt },
    /// A unit expected to be a small power of another was not.
    #[error("no exponent k <= {cap} with {base}^k = {target}")]
    UnitPowerNotFound {
        base: String,
        target: String,
        cap: u64,
    },
    /// A congruence unit-group scan exhausted its bound.
    #[error("no unit congruent to 1 mod {modulus} found in the order of conductor {fprime} for d = {d} within the scan bound")]
    GeneratorNotFound {
        d: BigInt,
        modulus: BigInt,
        fprime: BigInt,
    },
    /// The congruence modulus multiplier is limited to 1 or 2.
    #[error("modulus multiplier must be 1 or 2; got {0}")]
    InvalidModulusMultiplier(u32),
    /// A matrix required to have determinant 1 did not.
    #[error("matrix has determinant {det}, expected 1")]
    NotUnimodular { det: BigInt },
    /// The number of ramified infinite places is limited to 0, 1, or 2.
    #[error("number of infinite places must be 0, 1, or 2; got {0}")]
    InvalidPlaceCount(u32),
    /// Modulus doubling is defined only for even `d`.
    #[error("modulus doubling applies only to even d; d = {0} is odd")]
    DoublingRequiresEvenD(BigInt),
    /// An exact-by-construction division left a remainder.
    #[error("expected exact division while computing {context}: {numerator} is not divisible by {denominator}")]
    InexactDivision {
        context: String,
        numerator: BigInt,
        denominator: BigInt,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
