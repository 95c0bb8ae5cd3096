use super::qr::{check_rank, default_rank_tol, interpolation_block, pivoted_qr, strong_rrqr, PivotedQr};
use super::svd::pseudo_inverse;
use crate::error::{Error, Result};
use crate::rng;
use crate::Matrix;

/// Oversampling used by the randomized decomposition when the caller has no preference.
pub const DEFAULT_OVERSAMPLING: usize = 10;

/// Column pivoting rule behind an interpolative decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pivoting {
    /// Plain greedy column pivoting.
    Greedy,
    /// Strong rank-revealing QR with bound parameter `f ≥ 1`.
    Strong { f: f64 },
}

/// Interpolative decomposition `A ≈ C Fᵀ`.
///
/// `C` holds the columns `indices` of `A` verbatim. `F` is `n × k` and its rows
/// at `indices` form the identity, so `Fᵀ = [I, R11⁻¹R12] Πᵀ`.
#[derive(Clone, Debug)]
pub struct InterpDecomp {
    pub c: Matrix,
    pub f: Matrix,
    pub indices: Vec<usize>,
    /// `‖R22‖_F` for the deterministic variants, measured residual for the randomized one.
    pub est_error: f64,
    pub requested_rank: usize,
}

impl InterpDecomp {
    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn is_rank_deficient(&self) -> bool {
        self.rank() < self.requested_rank
    }

    pub fn reconstruct(&self) -> Matrix {
        &self.c * self.f.transpose()
    }
}

/// Columns `idx` of `a`, copied verbatim.
pub fn select_columns(a: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(a.nrows(), idx.len(), |i, j| a[(i, idx[j])])
}

fn from_factorization(a: &Matrix, qr: &PivotedQr, k: usize, requested: usize) -> Result<InterpDecomp> {
    let n = a.ncols();
    let w = interpolation_block(&qr.r, k)?;
    let indices = qr.perm[..k].to_vec();
    let mut f = Matrix::zeros(n, k);
    for (i, &col) in indices.iter().enumerate() {
        f[(col, i)] = 1.0;
    }
    for j in 0..n - k {
        let col = qr.perm[k + j];
        for i in 0..k {
            f[(col, i)] = w[(i, j)];
        }
    }
    let p = qr.r.nrows();
    let est_error = if k < p { qr.r.view((k, k), (p - k, n - k)).norm() } else { 0.0 };
    Ok(InterpDecomp { c: select_columns(a, &indices), f, indices, est_error, requested_rank: requested })
}

/// Interpolative decomposition of rank `k` from strong RRQR with parameter `f`.
pub fn interp_decomp(a: &Matrix, k: usize, f: f64) -> Result<InterpDecomp> {
    interp_decomp_with(a, k, Pivoting::Strong { f })
}

/// Interpolative decomposition with an explicit pivoting rule.
///
/// When `A` is numerically rank deficient below `k` the decomposition is built at
/// the achievable rank; check [`InterpDecomp::is_rank_deficient`].
pub fn interp_decomp_with(a: &Matrix, k: usize, pivoting: Pivoting) -> Result<InterpDecomp> {
    let (m, n) = a.shape();
    check_rank(k, m, n)?;
    match pivoting {
        Pivoting::Strong { f } => {
            let s = strong_rrqr(a, k, f)?;
            from_factorization(a, &s.qr, s.rank, k)
        }
        Pivoting::Greedy => {
            let qr = pivoted_qr(a);
            let rank = qr.numerical_rank(default_rank_tol(m, n));
            if rank == 0 {
                return Err(Error::Singular("matrix is numerically zero".into()));
            }
            from_factorization(a, &qr, k.min(rank), k)
        }
    }
}

/// Randomized interpolative decomposition.
///
/// A `(k+p) × m` Gaussian sketch `Ω` (ChaCha20 stream 0 of `seed`) compresses
/// the rows, strong RRQR on `Ω A` picks the columns, and `F` is the
/// least-squares fit `Fᵀ = C† A` with its rows at the selected indices set to
/// the identity.
pub fn randomized_interp_decomp(a: &Matrix, k: usize, p: usize, f: f64, seed: u64) -> Result<InterpDecomp> {
    randomized_interp_decomp_stream(a, k, p, f, seed, 0)
}

pub(crate) fn randomized_interp_decomp_stream(
    a: &Matrix,
    k: usize,
    p: usize,
    f: f64,
    seed: u64,
    stream: u64,
) -> Result<InterpDecomp> {
    let (m, n) = a.shape();
    check_rank(k, m, n)?;
    let omega = rng::gaussian_matrix(&mut rng::seeded(seed, stream), k + p, m);
    let y = omega * a;
    let s = strong_rrqr(&y, k, f)?;
    let indices = s.selected().to_vec();
    let c = select_columns(a, &indices);
    let mut f_mat = (pseudo_inverse(&c, 1e-12) * a).transpose();
    for (i, &col) in indices.iter().enumerate() {
        for j in 0..indices.len() {
            f_mat[(col, j)] = if i == j { 1.0 } else { 0.0 };
        }
    }
    let est_error = (a - &c * f_mat.transpose()).norm();
    Ok(InterpDecomp { c, f: f_mat, indices, est_error, requested_rank: k })
}
