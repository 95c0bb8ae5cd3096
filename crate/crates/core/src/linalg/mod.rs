//! Dense matrix kernels: pivoted and strong rank-revealing QR, thin SVD,
//! pseudo-inverse and (randomized) interpolative decompositions.

mod interp;
mod qr;
mod svd;

pub use interp::{
    interp_decomp, interp_decomp_with, randomized_interp_decomp, select_columns, InterpDecomp,
    Pivoting, DEFAULT_OVERSAMPLING,
};
pub use qr::{default_rank_tol, pivoted_qr, strong_rrqr, thin_qr, PivotedQr, StrongRrqr};
pub use svd::{
    lowrank_svd_from_factors, pseudo_inverse, singular_values, spectral_norm, thin_svd, ThinSvd,
};

pub(crate) use interp::randomized_interp_decomp_stream;
