//! Factorization of unitary matrices into products of symmetries
//! (self-adjoint unitaries), impossibility certificates, and independent
//! certificate verification.
//!
//! The crate is organized around five modules:
//!
//! - [`matcore`]: the dense complex matrix carrier, unitary/symmetry
//!   predicates, spectral decomposition, and seeded Haar sampling;
//! - [`factor`]: the constructive factorizations (conjugate-pair blocks,
//!   two-symmetry, the four-symmetry determinant construction, Weyl
//!   clock/shift scalar products, finite-spectrum assembly, and the
//!   block-reduction lemma steps);
//! - [`obstruct`]: machine-checkable impossibility certificates and the
//!   membership classifier for products of 1..=4 symmetries;
//! - [`centerfun`]: matrix-valued functions on a finite base-point set with
//!   the pointwise (center-valued) determinant;
//! - [`certkit`]: certificate verification, JSON serialization, and the
//!   determinant-distance lower bound.

pub mod centerfun;
pub mod certkit;
pub mod factor;
pub mod matcore;
pub mod obstruct;

pub use matcore::{haar_random_unitary, ComplexMatrix, DetMode, Tolerance};
