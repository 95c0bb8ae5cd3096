
use super::qr::thin_qr;
use crate::error::{Error, Result};
use crate::Matrix;

/// Thin singular value decomposition `A ≈ U diag(s) Vᵀ` with `s` nonincreasing.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl ThinSvd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for (mut col, &s) in us.column_iter_mut().zip(&self.s) {
            col *= s;
        }
        us * self.v.transpose()
    }

    /// Keeps the `r` leading triplets.
    pub fn truncate(mut self, r: usize) -> Self {
        let r = r.min(self.s.len());
        self.s.truncate(r);
        self.u = self.u.columns(0, r).into_owned();
        self.v = self.v.columns(0, r).into_owned();
        self
    }
}

/// Thin SVD, truncated to the `r` largest triplets when `r` is given.
///
/// Backed by nalgebra's Golub-Kahan bidiagonal SVD; triplets are re-sorted by
/// decreasing singular value.
pub fn thin_svd(a: &Matrix, r: Option<usize>) -> ThinSvd {
    let (m, n) = a.shape();
    let p = m.min(n);
    if p == 0 {
        return ThinSvd { u: Matrix::zeros(m, 0), s: Vec::new(), v: Matrix::zeros(n, 0) };
    }
    // nalgebra handles wide inputs, but the tall orientation is the better-tested path
    let (svd, transposed) = if m >= n {
        (a.clone().svd(true, true), false)
    } else {
        (a.transpose().svd(true, true), true)
    };
    let u = svd.u.expect("left singular vectors requested");
    let v = svd.v_t.expect("right singular vectors requested").transpose();
    let (u, v) = if transposed { (v, u) } else { (u, v) };
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let keep = r.unwrap_or(p).min(p);
    let order = &order[..keep];
    ThinSvd {
        u: Matrix::from_fn(m, keep, |i, j| u[(i, order[j])]),
        s: order.iter().map(|&i| s[i].max(0.0)).collect(),
        v: Matrix::from_fn(n, keep, |i, j| v[(i, order[j])]),
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.nrows().min(a.ncols()) == 0 {
        return Vec::new();
    }
    let s = if a.nrows() >= a.ncols() {
        a.clone().singular_values()
    } else {
        a.transpose().singular_values()
    };
    let mut s: Vec<f64> = s.iter().map(|v| v.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Moore-Penrose pseudo-inverse; singular values at or below `tol · σ₁` are treated as zero.
pub fn pseudo_inverse(a: &Matrix, tol: f64) -> Matrix {
    let svd = thin_svd(a, None);
    let cutoff = svd.s.first().copied().unwrap_or(0.0) * tol;
    let inv: Vec<f64> = svd.s.iter().map(|&s| if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 }).collect();
    let mut v = svd.v;
    for (mut col, &w) in v.column_iter_mut().zip(&inv) {
        col *= w;
    }
    v * svd.u.transpose()
}

/// SVD of `A Bᵀ` from the factors, without forming the product:
/// thin QRs `A = Q_A R_A`, `B = Q_B R_B`, SVD of the small `M = R_A R_Bᵀ`,
/// then `U = Q_A U_M`, `V = Q_B V_M`.
pub fn lowrank_svd_from_factors(a: &Matrix, b: &Matrix) -> Result<ThinSvd> {
    if a.ncols() != b.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "factors have {} and {} columns",
            a.ncols(),
            b.ncols()
        )));
    }
    let (qa, ra) = thin_qr(a);
    let (qb, rb) = thin_qr(b);
    let m = &ra * rb.transpose();
    let core = thin_svd(&m, None);
    Ok(ThinSvd { u: qa * core.u, s: core.s, v: qb * core.v })
}

/// `‖A‖₂` via the largest singular value.
pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

#[cfg(test)]
fn diag(s: &[f64]) -> Matrix {
    Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(s))
}
