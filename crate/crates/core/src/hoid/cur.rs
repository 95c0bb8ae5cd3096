use std::time::Instant;

use super::bounds::{q_factors, thm1_bound};
use super::pipelines::{interp_columns, validate_options, validate_ranks};
use super::{ErrorReport, HoidOptions, Selector};
use crate::error::Result;
use crate::linalg::{pseudo_inverse, singular_values};
use crate::select::IndexSet;
use crate::Matrix;

/// `A ≈ C U R` with `C` verbatim columns and `R` verbatim rows of `A`.
#[derive(Clone, Debug)]
pub struct CurDecomp {
    pub c: Matrix,
    pub u: Matrix,
    pub r: Matrix,
    pub col_indices: IndexSet,
    pub row_indices: IndexSet,
}

impl CurDecomp {
    pub fn reconstruct(&self) -> Matrix {
        &self.c * &self.u * &self.r
    }
}

/// Matrix CUR from strong-RRQR interpolative decompositions of `A` and `Aᵀ`,
/// with `U = C† A R†`.
pub fn matrix_cur(a: &Matrix, r: usize, f: f64) -> Result<(CurDecomp, ErrorReport)> {
    matrix_cur_with(a, r, Selector::Rrqr, &HoidOptions::default().with_f(f))
}

/// Matrix CUR with any full-data selector. Columns use stream 0 and rows
/// stream 1 of the seed, matching HOID on the order-2 tensor view.
pub fn matrix_cur_with(
    a: &Matrix,
    r: usize,
    selector: Selector,
    opts: &HoidOptions,
) -> Result<(CurDecomp, ErrorReport)> {
    let start = Instant::now();
    let (m, n) = a.shape();
    validate_ranks(&[m, n], &[r, r])?;
    validate_options(opts, selector)?;

    let cols = interp_columns(a, r, selector, opts, 0)?;
    let at = a.transpose();
    let rows = interp_columns(&at, r, selector, opts, 1)?;
    let c = cols.c;
    let r_mat = rows.c.transpose();
    let u = pseudo_inverse(&c, opts.pinv_tol) * a * pseudo_inverse(&r_mat, opts.pinv_tol);
    let cur = CurDecomp {
        c,
        u,
        r: r_mat,
        col_indices: IndexSet::new(cols.indices, n)?,
        row_indices: IndexSet::new(rows.indices, m)?,
    };

    let achieved = vec![cur.col_indices.len(), cur.row_indices.len()];
    let s = singular_values(a);
    let q = q_factors(&[m, n], &achieved, opts.f);
    let abs = (a - cur.reconstruct()).norm();
    let norm = a.norm();
    let mut report = ErrorReport {
        rel_error: if norm > 0.0 { abs / norm } else { abs },
        abs_error: abs,
        bound: thm1_bound(&q, &[s.clone(), s], &achieved),
        q_factors: q,
        seed: opts.seed,
        ranks: achieved.clone(),
        requested_ranks: vec![r, r],
        ..Default::default()
    };
    if report.is_rank_deficient() {
        report.notes.push(format!("achieved ranks {achieved:?} below requested {r}"));
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((cur, report))
}
