//! Householder QR with optional greedy column pivoting, and strong
//! rank-revealing QR (Gu-Eisenstat) built on top of it.

use crate::error::{Error, Result};
use crate::Matrix;

/// Swaps are only performed when the exchange gain exceeds `f·(1 + SWAP_SLACK)`.
const SWAP_SLACK: f64 = 1e-12;

/// `A Π = Q R` with `Π = I(:, perm)`.
///
/// `q` is `m × min(m,n)` with orthonormal columns, `r` is `min(m,n) × n` upper
/// trapezoidal and `perm[i]` is the column of `A` placed at position `i`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    pub q: Matrix,
    pub r: Matrix,
    pub perm: Vec<usize>,
}

impl PivotedQr {
    /// `A Π` rebuilt from the factors.
    pub fn product(&self) -> Matrix {
        &self.q * &self.r
    }

    /// Number of leading diagonal entries of `R` above `tol · |R₀₀|`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let p = self.r.nrows().min(self.r.ncols());
        if p == 0 {
            return 0;
        }
        let scale = self.r[(0, 0)].abs();
        if scale == 0.0 {
            return 0;
        }
        (0..p).take_while(|&i| self.r[(i, i)].abs() > tol * scale).count()
    }
}

/// Default relative threshold on `|R_ii| / |R_00|` below which a pivot is
/// treated as numerically zero.
pub fn default_rank_tol(m: usize, n: usize) -> f64 {
    f64::EPSILON * m.max(n) as f64
}

/// Householder vector for `x`: returns `(v, beta, alpha)` with
/// `(I - beta v vᵀ) x = alpha e₁` and `v[0] = 1`.
fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = x.to_vec();
    if norm == 0.0 {
        v[0] = 1.0;
        return (v, 0.0, 0.0);
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    let v0 = x[0] - alpha;
    for e in v.iter_mut().skip(1) {
        *e /= v0;
    }
    v[0] = 1.0;
    let vtv: f64 = v.iter().map(|e| e * e).sum();
    (v, 2.0 / vtv, alpha)
}

fn factorize(a: &Matrix, pivot: bool) -> PivotedQr {
    let (m, n) = a.shape();
    let p = m.min(n);
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(p);

    for j in 0..p {
        if pivot {
            // residual column norms recomputed from scratch; ties go to the smallest index
            let mut best = j;
            let mut best_norm = -1.0;
            for c in j..n {
                let s: f64 = w.view((j, c), (m - j, 1)).iter().map(|v| v * v).sum();
                if s > best_norm {
                    best_norm = s;
                    best = c;
                }
            }
            if best != j {
                w.swap_columns(j, best);
                perm.swap(j, best);
            }
        }
        let x: Vec<f64> = w.view((j, j), (m - j, 1)).iter().copied().collect();
        let (v, beta, alpha) = householder(&x);
        if beta != 0.0 {
            for c in (j + 1)..n {
                let dot: f64 = (0..m - j).map(|i| v[i] * w[(j + i, c)]).sum();
                let s = beta * dot;
                for i in 0..m - j {
                    w[(j + i, c)] -= s * v[i];
                }
            }
            w[(j, j)] = alpha;
        }
        for i in (j + 1)..m {
            w[(i, j)] = 0.0;
        }
        reflectors.push((v, beta));
    }

    let mut q = Matrix::identity(m, p);
    for (j, (v, beta)) in reflectors.iter().enumerate().rev() {
        if *beta == 0.0 {
            continue;
        }
        for c in 0..p {
            let dot: f64 = (0..m - j).map(|i| v[i] * q[(j + i, c)]).sum();
            let s = beta * dot;
            for i in 0..m - j {
                q[(j + i, c)] -= s * v[i];
            }
        }
    }
    let r = w.rows(0, p).into_owned();
    PivotedQr { q, r, perm }
}

/// Column-pivoted Householder QR with the greedy largest-residual-norm rule.
pub fn pivoted_qr(a: &Matrix) -> PivotedQr {
    factorize(a, true)
}

/// Thin unpivoted QR `A = Q R`, `Q` is `m × min(m,n)`.
pub fn thin_qr(a: &Matrix) -> (Matrix, Matrix) {
    let f = factorize(a, false);
    (f.q, f.r)
}

/// Inverse of a nonsingular upper-triangular matrix by back substitution.
pub(crate) fn upper_triangular_inverse(r: &Matrix) -> Result<Matrix> {
    let k = r.nrows();
    let mut inv = Matrix::zeros(k, k);
    for i in 0..k {
        if r[(i, i)] == 0.0 || !r[(i, i)].is_finite() {
            return Err(Error::Singular(format!("zero pivot at position {i} of R11")));
        }
    }
    for c in 0..k {
        inv[(c, c)] = 1.0 / r[(c, c)];
        for i in (0..c).rev() {
            let s: f64 = ((i + 1)..=c).map(|l| r[(i, l)] * inv[(l, c)]).sum();
            inv[(i, c)] = -s / r[(i, i)];
        }
    }
    Ok(inv)
}

/// Solves `R11 W = R12` for the leading `k × k` upper-triangular block of `r`.
pub(crate) fn interpolation_block(r: &Matrix, k: usize) -> Result<Matrix> {
    let n = r.ncols();
    let r11 = r.view((0, 0), (k, k));
    let mut w = r.view((0, k), (k, n - k)).into_owned();
    for i in 0..k {
        if r11[(i, i)] == 0.0 {
            return Err(Error::Singular(format!("zero pivot at position {i} of R11")));
        }
    }
    for c in 0..n - k {
        for i in (0..k).rev() {
            let s: f64 = ((i + 1)..k).map(|l| r11[(i, l)] * w[(l, c)]).sum();
            w[(i, c)] = (w[(i, c)] - s) / r11[(i, i)];
        }
    }
    Ok(w)
}

/// Strong rank-revealing QR factorization.
///
/// With `W = R11⁻¹ R12` the result satisfies `|W_ij| ≤ f` and
/// `σ_i(R11) ≥ σ_i(A) / √(1 + f² k (n-k))`.
#[derive(Clone, Debug)]
pub struct StrongRrqr {
    pub qr: PivotedQr,
    /// Rank actually used for the partition; below `requested_rank` when `A`
    /// is numerically rank deficient.
    pub rank: usize,
    pub requested_rank: usize,
    pub f: f64,
    pub swaps: usize,
}

impl StrongRrqr {
    pub fn r11(&self) -> Matrix {
        self.qr.r.view((0, 0), (self.rank, self.rank)).into_owned()
    }

    pub fn r12(&self) -> Matrix {
        let n = self.qr.r.ncols();
        self.qr.r.view((0, self.rank), (self.rank, n - self.rank)).into_owned()
    }

    pub fn r22(&self) -> Matrix {
        let (p, n) = self.qr.r.shape();
        self.qr.r.view((self.rank, self.rank), (p - self.rank, n - self.rank)).into_owned()
    }

    /// `R11⁻¹ R12`.
    pub fn interpolation_matrix(&self) -> Result<Matrix> {
        interpolation_block(&self.qr.r, self.rank)
    }

    /// Leading `rank` pivots.
    pub fn selected(&self) -> &[usize] {
        &self.qr.perm[..self.rank]
    }

    pub fn is_rank_deficient(&self) -> bool {
        self.rank < self.requested_rank
    }
}

pub(crate) fn check_rank(k: usize, m: usize, n: usize) -> Result<()> {
    let max = m.min(n);
    if k == 0 || k > max {
        return Err(Error::RankOutOfRange { rank: k, max });
    }
    Ok(())
}

/// Strong RRQR: greedy pivoted QR followed by column exchanges between the
/// leading `k` block and the trailing block while some exchange would grow
/// `|det R11|` by more than `f`.
///
/// The exchange gain for leading column `i` and trailing column `j` is
/// `ρ_ij² = W_ij² + (γ_j(R22) · ‖e_iᵀ R11⁻¹‖)²`, with `γ_j` the norm of column
/// `j` of `R22`. After each exchange the permuted `R` is re-triangularized.
pub fn strong_rrqr(a: &Matrix, k: usize, f: f64) -> Result<StrongRrqr> {
    let (m, n) = a.shape();
    check_rank(k, m, n)?;
    if !(f >= 1.0) {
        return Err(Error::InvalidTolerance(f));
    }
    let mut qr = pivoted_qr(a);
    let achievable = qr.numerical_rank(default_rank_tol(m, n));
    if achievable == 0 {
        return Err(Error::Singular("matrix is numerically zero".into()));
    }
    let rank = k.min(achievable);
    let p = m.min(n);
    let max_swaps = 100 * n.max(10);
    let mut swaps = 0;

    while rank < n && swaps < max_swaps {
        let r11 = qr.r.view((0, 0), (rank, rank)).into_owned();
        let inv = upper_triangular_inverse(&r11)?;
        let w = interpolation_block(&qr.r, rank)?;
        let row_norms: Vec<f64> = (0..rank).map(|i| inv.row(i).norm()).collect();
        let gammas: Vec<f64> = (0..n - rank)
            .map(|j| {
                if rank < p {
                    qr.r.view((rank, rank + j), (p - rank, 1)).norm()
                } else {
                    0.0
                }
            })
            .collect();
        let mut best = (0, 0);
        let mut best_rho = -1.0;
        for j in 0..n - rank {
            for i in 0..rank {
                let g = gammas[j] * row_norms[i];
                let rho = (w[(i, j)] * w[(i, j)] + g * g).sqrt();
                if rho > best_rho {
                    best_rho = rho;
                    best = (i, j);
                }
            }
        }
        if !(best_rho > f * (1.0 + SWAP_SLACK)) {
            break;
        }
        let (i, j) = best;
        let mut r = qr.r.clone();
        r.swap_columns(i, rank + j);
        qr.perm.swap(i, rank + j);
        let (q2, r2) = thin_qr(&r);
        qr.q = &qr.q * q2;
        qr.r = r2;
        swaps += 1;
    }

    Ok(StrongRrqr { qr, rank, requested_rank: k, f, swaps })
}
