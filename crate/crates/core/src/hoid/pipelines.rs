use std::time::Instant;

use super::bounds::{complement_size, q_factors, thm1_bound, thm2_bound, thm3_bound, thm3_bound_from_residuals};
use super::{relative_error, ErrorReport, HoidDecomp, HoidOptions, Selector};
use crate::error::{Error, Result};
use crate::linalg::{
    interp_decomp, interp_decomp_with, lowrank_svd_from_factors, pseudo_inverse, randomized_interp_decomp_stream,
    select_columns, singular_values, thin_svd, InterpDecomp, Pivoting,
};
use crate::select::{
    deim_select, error_constant, pqr_select, rrqr_select, simple_leverage_select_stream, IndexSet,
};
use crate::tensor::{DenseTensor, LowRank, TuckerDecomp};
use crate::Matrix;

pub(crate) fn validate_ranks(dims: &[usize], ranks: &[usize]) -> Result<()> {
    if ranks.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!("{} ranks for an order-{} tensor", ranks.len(), dims.len())));
    }
    for (n, &r) in ranks.iter().enumerate() {
        let max = dims[n].min(complement_size(dims, n));
        if r == 0 || r > max {
            return Err(Error::RankOutOfRange { rank: r, max });
        }
    }
    Ok(())
}

pub(crate) fn validate_options(opts: &HoidOptions, selector: Selector) -> Result<()> {
    if !(opts.f >= 1.0) {
        return Err(Error::InvalidTolerance(opts.f));
    }
    if selector.needs_seed() && opts.seed.is_none() {
        return Err(Error::InvalidArgument(format!("selector '{selector}' needs a seed")));
    }
    Ok(())
}

/// Truncated HOSVD: `U_n` are the leading left singular vectors of `X_(n)` and
/// `G = X ×₁ U₁ᵀ ⋯ ×_d U_dᵀ`.
pub fn hosvd(x: &DenseTensor, ranks: &[usize]) -> Result<TuckerDecomp> {
    validate_ranks(x.dims(), ranks)?;
    let factors = (0..x.order())
        .map(|n| Ok(thin_svd(&x.unfold(n)?, Some(ranks[n])).u))
        .collect::<Result<Vec<_>>>()?;
    let transposed: Vec<Matrix> = factors.iter().map(Matrix::transpose).collect();
    let core = x.multi_mode_multiply(&transposed.iter().map(Some).collect::<Vec<_>>())?;
    TuckerDecomp::new(core, factors)
}

/// `G = X ×₁ C₁† ⋯ ×_d C_d†`, the Frobenius-optimal core for fixed `C_n`.
/// Singular values below `pinv_tol · σ₁` of each `C_n` are discarded.
pub fn core_tensor(x: &DenseTensor, columns: &[Matrix], pinv_tol: f64) -> Result<DenseTensor> {
    if columns.len() != x.order() {
        return Err(Error::ShapeMismatch(format!("{} column matrices for order {}", columns.len(), x.order())));
    }
    let pinvs: Vec<Matrix> = columns.iter().map(|c| pseudo_inverse(c, pinv_tol)).collect();
    x.multi_mode_multiply(&pinvs.iter().map(Some).collect::<Vec<_>>())
}

/// Column interpolative decomposition of one unfolding with a full-data selector.
pub(crate) fn interp_columns(
    a: &Matrix,
    r: usize,
    selector: Selector,
    opts: &HoidOptions,
    stream: u64,
) -> Result<InterpDecomp> {
    match selector {
        Selector::Rrqr => interp_decomp(a, r, opts.f),
        Selector::Pqr => interp_decomp_with(a, r, Pivoting::Greedy),
        Selector::Randomized => {
            let seed = opts.seed.expect("validated");
            randomized_interp_decomp_stream(a, r, opts.oversampling, opts.f, seed, stream)
        }
        Selector::Deim | Selector::SimpleLeverage => Err(Error::InvalidArgument(format!(
            "selector '{selector}' needs singular vectors; use convert_to_hoid"
        ))),
    }
}

fn finish(
    x: &DenseTensor,
    columns: Vec<Matrix>,
    indices: Vec<IndexSet>,
    opts: &HoidOptions,
    mut report: ErrorReport,
    start: Instant,
) -> Result<(HoidDecomp, ErrorReport)> {
    let core = if opts.with_core { Some(core_tensor(x, &columns, opts.pinv_tol)?) } else { None };
    let h = HoidDecomp { core, columns, indices };
    report.ranks = h.ranks();
    if report.ranks != report.requested_ranks {
        report.notes.push(format!("achieved ranks {:?} below requested {:?}", report.ranks, report.requested_ranks));
    }
    (report.rel_error, report.abs_error) = if opts.with_core {
        relative_error(x, &h.reconstruct()?)?
    } else {
        (f64::NAN, f64::NAN)
    };
    report.seed = opts.seed;
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((h, report))
}

/// HOID from the full tensor: an interpolative decomposition of every
/// unfolding picks `C_n`, then the core is fitted by pseudo-inverses.
///
/// `selector` must be `Rrqr`, `Pqr` or `Randomized`; the randomized sketch of
/// mode `n` uses stream `n` of `opts.seed`. The reported bound is the
/// strong-RRQR one and is only guaranteed for `Rrqr`.
pub fn hoid(
    x: &DenseTensor,
    ranks: &[usize],
    selector: Selector,
    opts: &HoidOptions,
) -> Result<(HoidDecomp, ErrorReport)> {
    let start = Instant::now();
    validate_ranks(x.dims(), ranks)?;
    validate_options(opts, selector)?;
    let mut columns = Vec::new();
    let mut indices = Vec::new();
    let mut spectra = Vec::new();
    for (n, &r) in ranks.iter().enumerate() {
        let xn = x.unfold(n)?;
        let id = interp_columns(&xn, r, selector, opts, n as u64)?;
        spectra.push(singular_values(&xn));
        indices.push(IndexSet::new(id.indices, xn.ncols())?);
        columns.push(id.c);
    }
    let achieved: Vec<usize> = indices.iter().map(IndexSet::len).collect();
    let q = q_factors(x.dims(), &achieved, opts.f);
    let report = ErrorReport {
        bound: thm1_bound(&q, &spectra, &achieved),
        q_factors: q,
        requested_ranks: ranks.to_vec(),
        ..Default::default()
    };
    finish(x, columns, indices, opts, report, start)
}

fn select_from_basis(v: &Matrix, selector: Selector, opts: &HoidOptions, stream: u64) -> Result<IndexSet> {
    match selector {
        Selector::Rrqr => rrqr_select(v, opts.f),
        Selector::Pqr => pqr_select(v),
        Selector::Deim => deim_select(v),
        Selector::SimpleLeverage => {
            simple_leverage_select_stream(v, v.ncols(), opts.f, opts.seed.expect("validated"), stream)
        }
        Selector::Randomized => {
            Err(Error::InvalidArgument("the randomized selector works on the full tensor; use hoid".into()))
        }
    }
}

/// Indices and error constant for basis `v`; a singular pick is retried once with strong RRQR.
fn select_with_fallback(
    v: &Matrix,
    selector: Selector,
    opts: &HoidOptions,
    mode: usize,
    notes: &mut Vec<String>,
) -> Result<(IndexSet, f64)> {
    let attempt = select_from_basis(v, selector, opts, mode as u64)
        .and_then(|p| error_constant(v, &p).map(|c| (p, c)));
    match attempt {
        Err(Error::Singular(msg)) if selector != Selector::Rrqr => {
            notes.push(format!("mode {mode}: {selector} selection singular ({msg}), retried with rrqr"));
            let p = rrqr_select(v, opts.f)?;
            let c = error_constant(v, &p)?;
            Ok((p, c))
        }
        other => other,
    }
}

/// Converts a Tucker, CP or factored representation into HOID format.
///
/// Per mode, the SVD of `A_n B_nᵀ` is formed from the factors and truncated to
/// `ranks[n]` (default: the inner dimension of the factors, capped by the
/// unfolding size). The selector picks columns from the right singular
/// vectors and `C_n` is read from `X`. The bound is `Σ q_n ε_n²` with
/// `ε_n = ‖X_(n) − U_n Σ_n V_nᵀ‖_F` measured directly.
pub fn convert_to_hoid(
    x: &DenseTensor,
    rep: LowRank<'_>,
    ranks: Option<&[usize]>,
    selector: Selector,
    opts: &HoidOptions,
) -> Result<(HoidDecomp, ErrorReport)> {
    let start = Instant::now();
    let d = x.order();
    if rep.order() != d {
        return Err(Error::ShapeMismatch(format!("representation has order {}, tensor {d}", rep.order())));
    }
    validate_options(opts, selector)?;
    let ranks: Vec<usize> = match ranks {
        Some(r) => {
            validate_ranks(x.dims(), r)?;
            for (n, &rn) in r.iter().enumerate() {
                if rn > rep.rank(n) {
                    return Err(Error::RankOutOfRange { rank: rn, max: rep.rank(n) });
                }
            }
            r.to_vec()
        }
        None => (0..d).map(|n| rep.rank(n).min(x.dims()[n]).min(complement_size(x.dims(), n))).collect(),
    };
    let mut report = ErrorReport { requested_ranks: ranks.clone(), ..Default::default() };
    let mut columns = Vec::new();
    let mut indices = Vec::new();
    let mut eps = Vec::new();
    for n in 0..d {
        let xn = x.unfold(n)?;
        let (a, b) = rep.mode_factors(n)?;
        if a.nrows() != xn.nrows() || b.nrows() != xn.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "mode {n}: factors {}x{} and {}x{} do not match unfolding {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                xn.nrows(),
                xn.ncols()
            )));
        }
        let svd = lowrank_svd_from_factors(&a, &b)?.truncate(ranks[n]);
        eps.push((&xn - svd.reconstruct()).norm());
        let (p, c) = select_with_fallback(&svd.v, selector, opts, n, &mut report.notes)?;
        columns.push(select_columns(&xn, p.as_slice()));
        indices.push(p);
        report.error_constants.push(c);
    }
    let achieved: Vec<usize> = indices.iter().map(IndexSet::len).collect();
    report.q_factors = q_factors(x.dims(), &achieved, opts.f);
    report.bound = thm2_bound(&report.q_factors, &eps);
    finish(x, columns, indices, opts, report, start)
}

/// Sequentially truncated HOID.
///
/// Modes are processed in `mode_order` (0-based permutation, default
/// `0..d`). Each step truncates the shrinking tensor `S` with a rank-`r_n` SVD,
/// rebuilds the approximation `X_(n) ≈ Û_n Ŝ_(n)` from the pieces already
/// computed, and applies strong RRQR to its right singular vectors.
///
/// The bound `Σ_n q_n (‖X‖² − ‖X⁽ⁿ⁾‖²)` is evaluated as `Σ_n q_n ‖X − X⁽ⁿ⁾‖²`
/// on the materialized partial projections `X⁽ⁿ⁾`, which costs `O(∏ I_k)`
/// memory per mode.
pub fn st_hoid(
    x: &DenseTensor,
    ranks: &[usize],
    mode_order: Option<&[usize]>,
    opts: &HoidOptions,
) -> Result<(HoidDecomp, ErrorReport)> {
    let start = Instant::now();
    let d = x.order();
    validate_ranks(x.dims(), ranks)?;
    validate_options(opts, Selector::Rrqr)?;
    let order: Vec<usize> = match mode_order {
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != (0..d).collect::<Vec<_>>() {
                return Err(Error::InvalidArgument(format!("{o:?} is not a permutation of 0..{d}")));
            }
            o.to_vec()
        }
        None => (0..d).collect(),
    };

    let mut report = ErrorReport { requested_ranks: ranks.to_vec(), ..Default::default() };
    let mut s = x.clone();
    let mut u_hat: Vec<Option<Matrix>> = vec![None; d];
    let mut columns: Vec<Option<Matrix>> = vec![None; d];
    let mut indices: Vec<Option<IndexSet>> = vec![None; d];
    let mut constants = vec![0.0; d];
    let mut residuals = Vec::with_capacity(d);
    let mut norms = vec![x.frobenius_norm()];

    for (t, &n) in order.iter().enumerate() {
        let svd = thin_svd(&s.unfold(n)?, Some(ranks[n]));
        let u = svd.u;
        s = s.mode_multiply(n, &u.transpose())?;

        let earlier: Vec<Option<&Matrix>> = (0..d).map(|k| if k == n { None } else { u_hat[k].as_ref() }).collect();
        let s_hat = s.multi_mode_multiply(&earlier)?;
        let v = if t == 0 { svd.v } else { lowrank_svd_from_factors(&u, &s_hat.unfold(n)?.transpose())?.v };

        let x_n = s_hat.mode_multiply(n, &u)?;
        residuals.push(x.sub(&x_n)?.frobenius_norm());
        norms.push(x_n.frobenius_norm());

        let (p, c) = select_with_fallback(&v, Selector::Rrqr, opts, n, &mut report.notes)?;
        columns[n] = Some(select_columns(&x.unfold(n)?, p.as_slice()));
        indices[n] = Some(p);
        constants[n] = c;
        u_hat[n] = Some(u);
    }

    let columns: Vec<Matrix> = columns.into_iter().map(|c| c.expect("every mode processed")).collect();
    let indices: Vec<IndexSet> = indices.into_iter().map(|p| p.expect("every mode processed")).collect();
    let achieved: Vec<usize> = indices.iter().map(IndexSet::len).collect();
    let q = q_factors(x.dims(), &achieved, opts.f);
    let q_in_order: Vec<f64> = order.iter().map(|&n| q[n]).collect();
    report.bound = thm3_bound_from_residuals(&q_in_order, &residuals);
    let (_, clamped) = thm3_bound(&q_in_order, &norms);
    if clamped > 0 {
        report.notes.push(format!("{clamped} telescoping norm differences were negative and clamped"));
    }
    report.q_factors = q;
    report.error_constants = constants;
    finish(x, columns, indices, opts, report, start)
}
