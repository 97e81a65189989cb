//! Density of error-correcting codes over finite fields.
//!
//! The crate answers one question in several ways: among all codes of a
//! given size (and linearity degree) in `F_{q^m}^n`, what fraction has
//! minimum distance at least `d`? It covers the Hamming, rank and sum-rank
//! metrics and provides
//!
//! * exact combinatorics (binomials, q-binomials, enclosures of the Euler
//!   product `π(q)`, bounded compositions) in [`combinatorics`];
//! * a prime-field tower `F_p ⊆ F_{p^ℓ} ⊆ F_{p^m}` with subspace sampling and
//!   enumeration in [`field`];
//! * weights, minimum distances and exact ball volumes in [`metric`];
//! * Singleton, Gilbert–Varshamov and finite density brackets in [`bounds`];
//! * the asymptotic dense / sparse / not-dense classifier in [`classify`];
//! * exhaustive and Monte Carlo verification in [`experiment`];
//! * the `code-density` command line front end in [`cli`].
//!
//! All quantities are exact: integers are [`BigNat`], densities are [`BigRat`].

pub mod bounds;
pub mod classify;
pub mod cli;
pub mod combinatorics;
pub mod config;
pub mod error;
pub mod experiment;
pub mod field;
pub mod linalg;
pub mod metric;
pub mod stats;

pub use combinatorics::{BigNat, BigRat};
pub use error::{Error, Result};
