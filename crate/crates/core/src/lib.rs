//! Higher order interpolatory decompositions (HOID) of dense tensors.
//!
//! A HOID is a Tucker factorization `X ≈ G ×₁ C₁ ⋯ ×_d C_d` whose factor
//! matrices `C_n` are verbatim columns of the mode-`n` unfoldings of `X`, so
//! sparsity, sign and integrality of the data carry over to the factors.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: dense tensors, unfoldings, mode products, Tucker/CP formats.
//! * [`linalg`]: pivoted and strong rank-revealing QR, SVD helpers and the
//!   (randomized) matrix interpolative decomposition.
//! * [`select`]: column-subset selectors working on singular vectors
//!   (DEIM, pivoted QR, strong RRQR, leverage scores).
//! * [`hoid`]: HOSVD, HOID, conversion of existing low-rank forms, ST-HOID,
//!   matrix CUR, and the accompanying error bounds.
//!
//! Indices (modes, columns, rows) are 0-based throughout the API.

pub mod error;
pub mod hoid;
pub mod linalg;
pub mod rng;
pub mod select;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{DenseTensor, Matrix};
