//! Étale cohomology dimensions of marked arithmetic curves over **Q**, and
//! mildness certificates for their pro-p fundamental groups.
//!
//! A *marked arithmetic curve* `(X∖S, T)` is the spectrum of **Z** with a
//! finite set `S` of primes removed and a finite set `T` of primes marked:
//! coverings are required to be unramified outside `S` and completely split
//! at `T`. For an odd prime `p` this crate computes the `F_p`-cohomology
//! dimensions of such curves, searches for auxiliary tame primes whose
//! addition makes the pro-p fundamental group *mild* (a cup-product
//! criterion that forces cohomological dimension 2), and emits
//! machine-checkable certificates of the construction.
//!
//! Everything is exact arithmetic: residue symbols over `F_p`, dense linear
//! algebra over `F_p`, deterministic prime enumeration. Identical inputs
//! produce byte-identical certificates.
//!
//! Module layout:
//!
//! * [`fp_linalg`] — dense matrices over `F_p`, rank and kernel.
//! * [`modarith`] — primality, primitive roots, tame linking symbols, the
//!   wild p-adic p-th-power test, avoidance-aware prime streams.
//! * [`kummer`] — the Kummer group `V_S^T`, its local condition matrix, and
//!   the drop-one redundancy check.
//! * [`cohomology`] — dimension profiles `h⁰..h³`, Euler characteristics,
//!   the independent ray-class-character computation of `h¹`, excision, and
//!   the reduction to non-redundant supports.
//! * [`conditions`] — Frobenius vectors in elementary quotients and the
//!   five-clause admissibility condition for linking primes.
//! * [`seeker`] — the constructive search: first kill the Kummer group with
//!   redundancy to spare, then find one linking prime per auxiliary prime.
//! * [`mildness`] — linking tables, character bases, the cup-product
//!   matrix, shape/rank/mildness verdicts, certificates, verification, and
//!   the enlargement check.
//! * [`cli`] — command-line front end.

pub mod cli;
pub mod cohomology;
pub mod conditions;
pub mod fp_linalg;
pub mod kummer;
pub mod mildness;
pub mod modarith;
pub mod seeker;

/// Errors shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on the inputs failed (overlapping sets, composite
    /// members, even `p`, out-of-range indices, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A linking symbol was requested at a ramified argument.
    #[error("symbol undefined at ramified argument: {a} is divisible by {q}")]
    SymbolUndefined { a: u64, q: u64 },

    /// The wild exponent was requested for a non-unit.
    #[error("not a local unit: {p} divides {a}")]
    NotLocalUnit { a: u64, p: u64 },

    /// A bounded search ran out of candidates.
    #[error("search bound exceeded: {0}")]
    SearchExhausted(String),

    /// A linear system that the pipeline needs has no solution.
    #[error("no solution: {0}")]
    Unsolvable(String),

    /// A certificate failed structural validation.
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
