//! Word calculus of the Hawaiian-earring group and the earring space `E(X,D)`.
//!
//! The crate is organized around three layers:
//!
//! * finite and finitely-describable infinitary words over a countable
//!   generator set, with free-group reduction and projection-based
//!   equivalence ([`word`], [`expr`]);
//! * noncrossing inverse pairings, the combinatorial certificates of word
//!   triviality, together with an independent brute-force enumerator
//!   ([`pairing`]);
//! * the metric space `E(X,D)` obtained by attaching a circle of scale `1/n`
//!   at each point of a dense enumeration, proper paths in it, and the
//!   finite decomposition trees that witness null-homotopy of trivial loops
//!   ([`space`], [`path`], [`homotopy`]).
//!
//! [`corpus`] generates reproducible test loops used by the verification
//! suites.

pub mod corpus;
pub mod expr;
pub mod homotopy;
pub mod pairing;
pub mod path;
pub mod rat;
pub mod space;
pub mod word;

pub use rat::Rational;
pub use word::{FiniteWord, Letter, Sign};
