//! Exact-arithmetic construction, classification and verification of
//! twisting maps tau: K^n (x) A -> A (x) K^n for A = K^m.
//!
//! The crate works entirely over exact fields (the rationals or a prime
//! field), represents a twisting map as an n x n grid of endomorphisms of A,
//! and cross-checks three independent routes to the same objects: the
//! pointwise axioms, the quiver-representation dictionary, and a brute-force
//! enumeration oracle.

// index loops over several parallel arrays are the norm in this code
#![allow(clippy::needless_range_loop)]

pub mod absred;
pub mod algebra;
pub mod classify;
pub mod field;
pub mod jsonio;
pub mod linalg;
pub mod oracle;
pub mod quiver;
pub mod twist;
