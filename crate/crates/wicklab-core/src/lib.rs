//! Workbench for canonical transformations of the canonical commutation
//! relations (CCR) at finite mode count.
//!
//! The library is organized in layers, each usable on its own:
//!
//! * [`scalar`] — coefficient backends: exact arithmetic in ℚ(√2) (real and
//!   complexified) and floating point (`f64`, `Complex64`).
//! * [`index`], [`wick`] — sparse multi-indices and the exact algebra of
//!   Wick-ordered polynomials over Gaussian Q-space: inner products, norms,
//!   pointwise products, derivatives.
//! * [`quadrature`] — an independent Gauss–Hermite tensor-quadrature oracle
//!   for the same integrals, used to cross-check every derived formula.
//! * [`fock`] — ladder and field operators acting on Wick polynomials, and
//!   the unitary identification of the occupation basis with Wick monomials.
//! * [`lambda`] — transformation maps Λ: validity checking, coefficient
//!   tensors, standard form, degree decomposition, band structure.
//! * [`generator`] — construction of the multiplication generator G with
//!   ∂ₖG = ΛJeₖ and truncated-matrix conjugation evidence.
//! * [`symplectic`] — finite-dimensional symplectic linear algebra and
//!   quasifree characteristic functions.
//! * [`equivalence`] — Hilbert–Schmidt summability classifiers for
//!   quasi-equivalence questions on families of modes.
//! * [`truncation`] — dense-matrix realizations of field, multiplication,
//!   and Weyl operators on Hermite-level-truncated bases.
//! * [`model`], [`report`] — JSON model ingestion, named verification
//!   suites, and deterministic machine-readable reports (the `wicklab` CLI).
//!
//! Conventions used throughout: the per-mode Gaussian measure is
//! dμ = π^(−1/2)·e^(−x²)·dx (variance ½); modes are indexed by positive
//! integers; the real test-function space H has basis {e_k, Je_k} with
//! σ(e_k, Je_l) = δ_kl.

pub mod equivalence;
pub mod error;
pub mod fock;
pub mod generator;
pub mod index;
pub mod lambda;
pub mod model;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod symplectic;
pub mod truncation;
pub mod wick;

pub use error::{Error, Result};
pub use index::MultiIndex;
pub use scalar::{Exact, ExactC, Rational, Scalar};
pub use wick::{DirectionVector, WickPolynomial};

/// Default cap on the degree of any polynomial produced by a product.
pub const DEFAULT_DEGREE_CAP: u32 = 12;

/// Default Gauss–Hermite node budget per mode for the quadrature oracle.
pub const DEFAULT_NODE_BUDGET: u32 = 40;

/// Default seed for every randomized suite ("WICK" in ASCII).
pub const DEFAULT_SEED: u64 = 0x5749_434B;
