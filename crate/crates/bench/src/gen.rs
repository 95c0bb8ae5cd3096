//! Test-tensor generators. Every generator is a pure function of its
//! arguments, so regeneration is bit-identical.

use hoid::tensor::{cp_to_full, CpDecomp};
use hoid::{rng, DenseTensor, Matrix};
use rand::seq::index::sample;
use rand::Rng;

use crate::BenchError;

/// Default cap on the number of tensor entries.
pub const DEFAULT_SIZE_CAP: usize = 100_000_000;

/// Largest nonzero count of a sparse CP factor vector, as a fraction of its length.
const SPARSE_CP_DENSITY: f64 = 0.1;

fn checked_len(dims: &[usize], cap: usize) -> Result<usize, BenchError> {
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| BenchError::Config(format!("dims {dims:?} overflow")))?;
    if len > cap {
        return Err(BenchError::Config(format!("dims {dims:?} give {len} entries, above the cap of {cap}")));
    }
    Ok(len)
}

/// `X[i₁,…,i_d] = 1 / √(i₁² + ⋯ + i_d²)` with 1-based `i_k ≤ N`.
pub fn gen_hilbert(n: usize, d: usize) -> Result<DenseTensor, BenchError> {
    gen_hilbert_capped(n, d, DEFAULT_SIZE_CAP)
}

pub fn gen_hilbert_capped(n: usize, d: usize, cap: usize) -> Result<DenseTensor, BenchError> {
    if n == 0 || d < 2 {
        return Err(BenchError::Config(format!("hilbert tensor needs N >= 1 and d >= 2, got N={n}, d={d}")));
    }
    let dims = vec![n; d];
    checked_len(&dims, cap)?;
    Ok(DenseTensor::from_fn(&dims, |idx| {
        let s: f64 = idx.iter().map(|&i| ((i + 1) * (i + 1)) as f64).sum();
        1.0 / s.sqrt()
    })?)
}

fn sparse_vector<R: Rng>(rng: &mut R, n: usize, nnz: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for pos in sample(rng, n, nnz) {
        // uniform on (0, 1]
        v[pos] = 1.0 - rng.random::<f64>();
    }
    v
}

/// Sparse nonnegative CP tensor of order 3 and rank `n`:
/// weights `1000/j` for `j ≤ 10` and `1/j` beyond, factor vectors with
/// `⌈n/10⌉` nonzeros each, uniform on `(0, 1]` at uniformly drawn positions.
///
/// Vectors are drawn in the order `x₁, y₁, z₁, x₂, …` from ChaCha20 stream 0
/// of `seed`.
pub fn gen_sparse_cp(n: usize, seed: u64) -> Result<(DenseTensor, CpDecomp), BenchError> {
    if n < 11 {
        return Err(BenchError::Config(format!("sparse CP tensor needs n >= 11, got {n}")));
    }
    checked_len(&[n, n, n], DEFAULT_SIZE_CAP)?;
    let nnz = (SPARSE_CP_DENSITY * n as f64).ceil() as usize;
    let mut rng = rng::seeded(seed, 0);
    let mut factors = vec![Matrix::zeros(n, n); 3];
    for j in 0..n {
        for f in factors.iter_mut() {
            let v = sparse_vector(&mut rng, n, nnz);
            f.column_mut(j).copy_from_slice(&v);
        }
    }
    let weights = (1..=n).map(|j| if j <= 10 { 1000.0 / j as f64 } else { 1.0 / j as f64 }).collect();
    let cp = CpDecomp::new(weights, factors)?;
    Ok((cp_to_full(&cp)?, cp))
}

/// Inclusive, evenly spaced grid on `[lo, hi]`; a single point sits at `lo`.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn side_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        vec![0.0]
    } else {
        linspace(-1.0, 1.0, n)
    }
}

/// Heat-kernel Green's function sampled between sources on the plane `z = 2`
/// and receivers on `z = 0`, both on square grids over `[-1, 1]²`, at `nt`
/// times in `[0.1, 1.1]`:
/// `X[s, r, t] = (4πt)^{-3/2} exp(-‖x_s − y_r‖² / 4t)`.
///
/// Planar indices flatten as `s = s_x + ns·s_y` and `r = r_x + nr·r_y`.
pub fn gen_heat3(ns_side: usize, nr_side: usize, nt: usize) -> Result<DenseTensor, BenchError> {
    if ns_side == 0 || nr_side == 0 || nt == 0 {
        return Err(BenchError::Config("heat tensor sizes must be >= 1".into()));
    }
    let (ns, nr) = (ns_side * ns_side, nr_side * nr_side);
    checked_len(&[ns, nr, nt], DEFAULT_SIZE_CAP)?;
    let sg = side_grid(ns_side);
    let rg = side_grid(nr_side);
    let times = linspace(0.1, 1.1, nt);
    let depth = 2.0f64;
    Ok(DenseTensor::from_fn(&[ns, nr, nt], |idx| {
        let (s, r, t) = (idx[0], idx[1], times[idx[2]]);
        let dx = sg[s % ns_side] - rg[r % nr_side];
        let dy = sg[s / ns_side] - rg[r / nr_side];
        let dist2 = dx * dx + dy * dy + depth * depth;
        (4.0 * std::f64::consts::PI * t).powf(-1.5) * (-dist2 / (4.0 * t)).exp()
    })?)
}

/// Order-5 view `(s_x, s_y, r_x, r_y, t)` of [`gen_heat3`]; the storage is identical.
pub fn gen_heat5(ns_side: usize, nr_side: usize, nt: usize) -> Result<DenseTensor, BenchError> {
    let x3 = gen_heat3(ns_side, nr_side, nt)?;
    Ok(x3.reshape(&[ns_side, ns_side, nr_side, nr_side, nt])?)
}

/// Kahan matrix `diag(1, s, …, s^{n-1}) (I − c·U)` with `U` strictly upper
/// triangular ones and `s = √(1 − c²)`, columns scaled by `(1 − 10ε)^j` so
/// that greedy pivoting keeps the natural order.
pub fn kahan_matrix(n: usize, c: f64) -> Matrix {
    let s = (1.0 - c * c).sqrt();
    let tau = 10.0 * f64::EPSILON;
    Matrix::from_fn(n, n, |i, j| {
        let base = match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => -c,
            std::cmp::Ordering::Greater => 0.0,
        };
        base * s.powi(i as i32) * (1.0 - tau).powi(j as i32)
    })
}
