//! Exact combinatorial engine for blocks of graded Lie algebras.
//!
//! Starting from a weighted root datum (a finite multiset of root/weight/
//! dimension data with a Weyl group action), the crate computes
//!
//! * the chambers of the associated affine hyperplane arrangement,
//! * a sesquilinear Gram form with values in Q(v) and its radical,
//! * the rank of the block and a canonical signed basis of the natural
//!   Z[v, v^-1]-lattice, and
//! * the unique triple factorization M = S * T * S' of the rescaled Gram
//!   matrix attached to an orbit labeling, whose S-entries are the
//!   Kazhdan-Lusztig-type P-polynomials, together with parity/positivity
//!   audits.
//!
//! All arithmetic is exact: integers are arbitrary precision and rational
//! functions are kept in canonical form, so every reported identity is a
//! theorem about the input datum, not a floating-point approximation.

pub mod arrangement;
pub mod blockspace;
pub mod datum;
pub mod error;
pub mod exact;
pub mod factorize;
pub mod linalg;
pub mod pairing;
pub mod rootsys;

pub use error::{Error, Result};
