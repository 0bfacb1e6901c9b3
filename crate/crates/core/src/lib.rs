//! Exact analysis of small quantum circuits: how far a circuit is from
//! being a phase multiple of the identity, whether two circuits agree on an
//! invariant subspace, and the verifier/reduction constructions that tie
//! those questions to witness acceptance probabilities.
//!
//! - [`circuit`]: the gate set, a text format for circuits, inversion,
//!   concatenation, embedding, and single-control compilation.
//! - [`sim`]: dense state vectors and unitaries, operator norms, and
//!   eigensystems of unitary and Hermitian matrices.
//! - [`spectral`]: minimal covering arcs of eigenphase sets, distance to
//!   the nearest phase multiple of the identity, and equivalence decisions
//!   on the full space or on a flagged invariant subspace.
//! - [`verifier`]: witness acceptance semantics, exact maximization over
//!   witnesses, phase-estimation kernels, and a constructive verifier that
//!   tests two circuits for equivalence up to a global phase.
//! - [`reduction`]: the one-extra-qubit circuit whose distance from phase
//!   multiples of the identity encodes a verifier's maximum acceptance
//!   probability, with exact checks of the distance bounds.
//!
//! Everything is computed by exact dense linear algebra under explicit
//! size caps; nothing is sampled or approximated beyond f64 arithmetic.

pub mod circuit;
pub mod error;
pub mod reduction;
pub mod sim;
pub mod spectral;
pub mod verifier;

pub use error::{Error, Result};
