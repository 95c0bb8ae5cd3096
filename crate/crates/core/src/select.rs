//! Column-subset selection from (approximate) right singular vectors.
//!
//! Each selector receives an `n × k` matrix `V` whose columns span the
//! dominant right singular subspace of an unfolding, and returns `k` row
//! indices of `V` (columns of the unfolding). The quality of a set `p` is the
//! error constant `‖(Vᵀ P)⁻¹‖₂`, the norm of the oblique interpolatory
//! projector `P (Vᵀ P)⁻¹ Vᵀ`.
//!
//! All argmax and pivot decisions break ties towards the smallest index.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{pivoted_qr, singular_values, strong_rrqr};
use crate::rng;
use crate::Matrix;

/// Attempts made by [`leverage_sample`] before giving up on an empty draw.
const LEVERAGE_RETRIES: u64 = 10;

/// Distinct 0-based indices into `0..n`, in selection order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::InvalidArgument(format!("index {i} out of range 0..{n}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("index {i} selected twice")));
            }
        }
        Ok(Self { indices })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.indices
    }

    /// Sorted copy, for set comparisons.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

/// Normalized leverage scores `π_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeverageScores {
    pub scores: Vec<f64>,
}

fn argmax_abs(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = -1.0;
    for (i, v) in values.enumerate() {
        if v.abs() > best_val {
            best_val = v.abs();
            best = i;
        }
    }
    best
}

fn check_shape(v: &Matrix) -> Result<()> {
    let (n, k) = v.shape();
    if k == 0 || k > n {
        return Err(Error::ShapeMismatch(format!("selector needs an n×k basis with 1 ≤ k ≤ n, got {n}x{k}")));
    }
    Ok(())
}

/// DEIM point selection: each new index is the largest-magnitude entry of the
/// interpolation residual of the next basis vector.
pub fn deim_select(v: &Matrix) -> Result<IndexSet> {
    check_shape(v)?;
    let (n, k) = v.shape();
    let mut p = vec![argmax_abs(v.column(0).iter().copied())];
    for j in 1..k {
        let vp = Matrix::from_fn(j, j, |a, b| v[(p[a], b)]);
        let rhs = Matrix::from_fn(j, 1, |a, _| v[(p[a], j)]);
        let c = vp
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular(format!("DEIM interpolation system singular at step {j}")))?;
        let residual = v.column(j) - v.columns(0, j) * c;
        let next = argmax_abs(residual.iter().copied());
        if p.contains(&next) || residual[next] == 0.0 {
            return Err(Error::Singular(format!("DEIM residual vanished at step {j}")));
        }
        p.push(next);
    }
    IndexSet::new(p, n)
}

/// Improved DEIM: the first `k` pivots of greedy pivoted QR on `Vᵀ`.
pub fn pqr_select(v: &Matrix) -> Result<IndexSet> {
    check_shape(v)?;
    let (n, k) = v.shape();
    let qr = pivoted_qr(&v.transpose());
    IndexSet::new(qr.perm[..k].to_vec(), n)
}

/// First `k` pivots of strong RRQR on `Vᵀ` with parameter `f`.
pub fn rrqr_select(v: &Matrix, f: f64) -> Result<IndexSet> {
    check_shape(v)?;
    let (n, k) = v.shape();
    let s = strong_rrqr(&v.transpose(), k, f)?;
    if s.rank < k {
        return Err(Error::Singular(format!("basis has numerical rank {} < {k}", s.rank)));
    }
    IndexSet::new(s.selected().to_vec(), n)
}

/// `π_j = (1/k) Σ_l V_jl²`, renormalized by the actual sum so that the scores
/// form a distribution even when `V` is only approximately orthonormal.
pub fn leverage_scores(v: &Matrix) -> LeverageScores {
    let raw: Vec<f64> = v.row_iter().map(|r| r.norm_squared()).collect();
    let total: f64 = raw.iter().sum();
    let scores = if total > 0.0 { raw.iter().map(|x| x / total).collect() } else { raw };
    LeverageScores { scores }
}

/// Bernoulli leverage sampling: index `j` is kept with probability
/// `min(1, c π_j)`. Empty draws are retried on fresh streams up to ten times.
pub fn leverage_sample(v: &Matrix, c: f64, seed: u64) -> Result<IndexSet> {
    if !(c >= 1.0) {
        return Err(Error::InvalidArgument(format!("target count must be >= 1, got {c}")));
    }
    let pi = leverage_scores(v).scores;
    for attempt in 0..LEVERAGE_RETRIES {
        let mut rng = rng::seeded(seed, attempt);
        let picked: Vec<usize> = pi
            .iter()
            .enumerate()
            .filter_map(|(j, &p)| {
                let u: f64 = rng.random();
                (u < (c * p).min(1.0)).then_some(j)
            })
            .collect();
        if !picked.is_empty() {
            return IndexSet::new(picked, pi.len());
        }
    }
    Err(Error::Sampling(format!("no index drawn after {LEVERAGE_RETRIES} attempts")))
}

/// Candidate count for the hybrid selector: `max(4r, ⌈r ln r⌉)`.
pub fn simple_leverage_candidates(r: usize) -> usize {
    let rf = r as f64;
    (4 * r).max((rf * rf.ln()).ceil() as usize)
}

/// Simple-Leverage: draw `max(4r, ⌈r ln r⌉)` candidates without replacement
/// with probability proportional to leverage (renormalized after every draw),
/// then keep `r` of them with strong RRQR on the candidate rows of `V`.
pub fn simple_leverage_select(v: &Matrix, r: usize, f: f64, seed: u64) -> Result<IndexSet> {
    simple_leverage_select_stream(v, r, f, seed, 0)
}

pub(crate) fn simple_leverage_select_stream(v: &Matrix, r: usize, f: f64, seed: u64, stream: u64) -> Result<IndexSet> {
    let (n, k) = v.shape();
    if r == 0 || r > n || r > k {
        return Err(Error::RankOutOfRange { rank: r, max: n.min(k) });
    }
    let pi = leverage_scores(v).scores;
    let positive = pi.iter().filter(|&&p| p > 0.0).count();
    if positive < r {
        return Err(Error::Sampling(format!("only {positive} indices have nonzero leverage, need {r}")));
    }
    let target = simple_leverage_candidates(r).min(positive);
    let mut rng = rng::seeded(seed, stream);
    let mut weights = pi.clone();
    let mut candidates = Vec::with_capacity(target);
    for _ in 0..target {
        let total: f64 = weights.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (j, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            chosen = Some(j);
            if u < acc {
                break;
            }
        }
        let j = chosen.expect("positive weight remains");
        candidates.push(j);
        weights[j] = 0.0;
    }
    let sub = Matrix::from_fn(candidates.len(), k, |i, j| v[(candidates[i], j)]);
    let basis = sub.columns(0, r).into_owned();
    let local = rrqr_select(&basis, f)?;
    IndexSet::new(local.as_slice().iter().map(|&i| candidates[i]).collect(), n)
}

/// `‖(Vᵀ P)⁻¹‖₂` for the rows `p` of `V`; errors when `V(p,:)` is singular.
pub fn error_constant(v: &Matrix, p: &IndexSet) -> Result<f64> {
    let k = v.ncols();
    if p.len() != k {
        return Err(Error::ShapeMismatch(format!("{} indices for a basis of {k} vectors", p.len())));
    }
    let vp = Matrix::from_fn(k, k, |i, j| v[(p.as_slice()[i], j)]);
    let s = singular_values(&vp);
    let (max, min) = (s[0], s[k - 1]);
    if min == 0.0 || min <= f64::EPSILON * max {
        return Err(Error::Singular("V(p,:) is numerically singular".into()));
    }
    Ok(1.0 / min)
}

/// Dense oblique projector `P (Vᵀ P)⁻¹ Vᵀ` (`n × n`).
pub fn interpolatory_projector(v: &Matrix, p: &IndexSet) -> Result<Matrix> {
    let (n, k) = v.shape();
    let vp_t = Matrix::from_fn(k, k, |i, j| v[(p.as_slice()[j], i)]);
    let inv = vp_t.try_inverse().ok_or_else(|| Error::Singular("Vᵀ P is singular".into()))?;
    let mut pm = Matrix::zeros(n, k);
    for (j, &i) in p.as_slice().iter().enumerate() {
        pm[(i, j)] = 1.0;
    }
    Ok(pm * inv * v.transpose())
}

/// Published worst-case bounds on the error constant of each selector.
pub mod bounds {
    /// Original DEIM bound `(1 + √(2n))^{k-1} / ‖v₁‖_∞`.
    pub fn deim_original(n: usize, k: usize, v1_inf: f64) -> f64 {
        (1.0 + (2.0 * n as f64).sqrt()).powi(k as i32 - 1) / v1_inf
    }

    /// Improved DEIM bound `√(nk/3) · 2^k`.
    pub fn deim(n: usize, k: usize) -> f64 {
        (n as f64 * k as f64 / 3.0).sqrt() * 2f64.powi(k as i32)
    }

    /// Pivoted-QR bound `√(n-k+1) · √(4^k + 6n - 1) / 3`.
    pub fn pqr(n: usize, k: usize) -> f64 {
        ((n - k + 1) as f64).sqrt() * (4f64.powi(k as i32) + 6.0 * n as f64 - 1.0).sqrt() / 3.0
    }

    /// Strong RRQR bound `√(1 + f² k (n-k))`.
    pub fn rrqr(n: usize, k: usize, f: f64) -> f64 {
        (1.0 + f * f * k as f64 * (n - k) as f64).sqrt()
    }
}
