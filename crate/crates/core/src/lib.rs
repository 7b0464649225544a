//! Canonical forms of dense real matrices built around the Williamson normal
//! form.
//!
//! - [`linalg`]: QR, Jacobi eigensolver, symmetric square root, polar
//!   decomposition.
//! - [`normal`]: block form of real normal matrices and the symmetric
//!   orthogonal `U` with `U·A·Uᵀ = Aᵀ`.
//! - [`spectral`]: spectral pairs `(E₁, E₂)` on the finite spectrum.
//! - [`skew`]: canonical form of skew-symmetric matrices.
//! - [`williamson`]: symplectic diagonalization of positive definite
//!   matrices and the symplectic spectrum.
//!
//! ```
//! use symspec::{williamson::williamson, Matrix};
//!
//! let a = Matrix::from_diag(&[4.0, 1.0]);
//! let form = williamson(&a, 1e-10).unwrap();
//! assert!((form.d[0] - 2.0).abs() < 1e-14);
//! ```
//!
//! The guide in `book/` walks through each construction; its code listings
//! are compiled and run as doc-tests of this crate.

pub mod error;
pub mod linalg;
pub mod matrix;
pub mod normal;
pub mod random;
pub mod skew;
pub mod spectral;
pub mod williamson;

mod vecops;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Matrix};
pub use num_complex::Complex64;

// Chapters of the guide, so `cargo test --doc` runs their listings.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/dense-core.md")]
    pub mod dense_core {}
    #[doc = include_str!("../../../book/src/normal-form.md")]
    pub mod normal_form {}
    #[doc = include_str!("../../../book/src/spectral-pairs.md")]
    pub mod spectral_pairs {}
    #[doc = include_str!("../../../book/src/skew-canonical.md")]
    pub mod skew_canonical {}
    #[doc = include_str!("../../../book/src/williamson.md")]
    pub mod williamson {}
}
