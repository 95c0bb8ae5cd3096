//! Dense tensors, mode-n unfoldings and mode products, plus the Tucker and CP
//! low-rank formats.
//!
//! Storage is generalized column-major: the first index varies fastest. The
//! mode-`n` unfolding `X_(n)` is `I_n × ∏_{k≠n} I_k`, and its columns (the
//! mode-`n` fibers) are enumerated with the remaining indices in the same
//! order, first index fastest. With this convention the Tucker unfolding is
//!
//! ```text
//! X_(n) = U_n G_(n) (U_d ⊗ ⋯ ⊗ U_{n+1} ⊗ U_{n-1} ⊗ ⋯ ⊗ U_1)ᵀ
//! ```
//!
//! and the CP unfolding uses the matching Khatri-Rao product.

use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};

/// Dense real matrix, column-major.
pub type Matrix = DMatrix<f64>;

/// A `d`-dimensional array of `f64` stored in generalized column-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidDims("tensor order must be at least 1".into()));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidDims(format!("dimension {pos} is zero")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidDims(format!("element count of {dims:?} overflows")))
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len = check_dims(&dims)?;
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "dims {dims:?} need {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let len = check_dims(dims)?;
        Ok(Self { dims: dims.to_vec(), data: vec![0.0; len] })
    }

    /// Builds a tensor by evaluating `f` at every multi-index, in storage order.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = check_dims(dims)?;
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for (i, d) in idx.iter_mut().zip(dims) {
                *i += 1;
                if *i < *d {
                    break;
                }
                *i = 0;
            }
        }
        Ok(Self { dims: dims.to_vec(), data })
    }

    /// View of a matrix as an order-2 tensor.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        Self::new(vec![m.nrows(), m.ncols()], m.as_slice().to_vec())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Linear storage offset of a multi-index.
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut off = 0;
        let mut stride = 1;
        for (i, d) in idx.iter().zip(&self.dims) {
            debug_assert!(i < d);
            off += i * stride;
            stride *= d;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    /// Same data under new dimensions with the same element count.
    pub fn reshape(&self, dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), self.data.clone())
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n >= self.order() {
            return Err(Error::ModeOutOfRange { mode: n, order: self.order() });
        }
        Ok(())
    }

    /// (product of dims before n, I_n, product of dims after n)
    fn split(&self, n: usize) -> (usize, usize, usize) {
        let left = self.dims[..n].iter().product();
        let right = self.dims[n + 1..].iter().product();
        (left, self.dims[n], right)
    }

    /// Mode-`n` unfolding `X_(n)` (0-based mode).
    pub fn unfold(&self, n: usize) -> Result<Matrix> {
        self.check_mode(n)?;
        let (left, inner, right) = self.split(n);
        if left == 1 {
            return Ok(Matrix::from_column_slice(inner, right, &self.data));
        }
        let mut out = Matrix::zeros(inner, left * right);
        for r in 0..right {
            for j in 0..inner {
                let base = left * (j + inner * r);
                for l in 0..left {
                    out[(j, l + left * r)] = self.data[base + l];
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`unfold`](Self::unfold).
    pub fn fold(m: &Matrix, n: usize, dims: &[usize]) -> Result<Self> {
        let len = check_dims(dims)?;
        if n >= dims.len() {
            return Err(Error::ModeOutOfRange { mode: n, order: dims.len() });
        }
        let inner = dims[n];
        if m.nrows() != inner || m.nrows() * m.ncols() != len {
            return Err(Error::ShapeMismatch(format!(
                "cannot fold a {}x{} matrix along mode {n} into {dims:?}",
                m.nrows(),
                m.ncols()
            )));
        }
        let left: usize = dims[..n].iter().product();
        let right: usize = dims[n + 1..].iter().product();
        if left == 1 {
            return Self::new(dims.to_vec(), m.as_slice().to_vec());
        }
        let mut data = vec![0.0; len];
        for r in 0..right {
            for j in 0..inner {
                let base = left * (j + inner * r);
                for l in 0..left {
                    data[base + l] = m[(j, l + left * r)];
                }
            }
        }
        Self::new(dims.to_vec(), data)
    }

    /// Mode-`n` product `X ×_n U`, i.e. `unfold(result, n) = U · unfold(X, n)`.
    pub fn mode_multiply(&self, n: usize, u: &Matrix) -> Result<Self> {
        self.check_mode(n)?;
        let (left, inner, right) = self.split(n);
        if u.ncols() != inner {
            return Err(Error::ShapeMismatch(format!(
                "mode-{n} product needs {inner} columns, matrix is {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let rows = u.nrows();
        let mut dims = self.dims.clone();
        dims[n] = rows;
        if rows == 0 {
            return Err(Error::InvalidDims(format!("mode-{n} product with an empty matrix")));
        }
        if left == 1 {
            let x = DMatrixView::from_slice(&self.data, inner, right);
            let y = u * x;
            return Self::new(dims, y.data.into());
        }
        // each slab of fixed trailing index is a left × inner matrix; it maps to slab · Uᵀ
        let ut = u.transpose();
        let mut data = vec![0.0; left * rows * right];
        for r in 0..right {
            let slab = DMatrixView::from_slice(&self.data[r * left * inner..(r + 1) * left * inner], left, inner);
            let y = slab * &ut;
            data[r * left * rows..(r + 1) * left * rows].copy_from_slice(y.as_slice());
        }
        Self::new(dims, data)
    }

    /// Applies `mats[k]` along mode `k` for every mode with `Some` matrix.
    pub fn multi_mode_multiply(&self, mats: &[Option<&Matrix>]) -> Result<Self> {
        if mats.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices given for an order-{} tensor",
                mats.len(),
                self.order()
            )));
        }
        let mut out = self.clone();
        for (n, m) in mats.iter().enumerate() {
            if let Some(m) = m {
                out = out.mode_multiply(n, m)?;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dims: self.dims.clone(), data })
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Column-wise Kronecker (Khatri-Rao) product `A ⊙ B`; row `i_a · m_b + i_b`.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "Khatri-Rao needs equal column counts, got {} and {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let (ma, mb) = (a.nrows(), b.nrows());
    Ok(Matrix::from_fn(ma * mb, a.ncols(), |i, j| a[(i / mb, j)] * b[(i % mb, j)]))
}

/// Tucker representation `G ×₁ U₁ ⋯ ×_d U_d`.
#[derive(Clone, Debug)]
pub struct TuckerDecomp {
    pub core: DenseTensor,
    pub factors: Vec<Matrix>,
}

impl TuckerDecomp {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        let t = Self { core, factors };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.core.order() != self.factors.len() {
            return Err(Error::ShapeMismatch(format!(
                "core of order {} with {} factors",
                self.core.order(),
                self.factors.len()
            )));
        }
        for (n, (u, &r)) in self.factors.iter().zip(self.core.dims()).enumerate() {
            if u.ncols() != r || u.nrows() == 0 {
                return Err(Error::ShapeMismatch(format!(
                    "factor {n} is {}x{}, core dim is {r}",
                    u.nrows(),
                    u.ncols()
                )));
            }
        }
        Ok(())
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.core.dims().to_vec()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|u| u.nrows()).collect()
    }
}

/// CP representation `Σ_r λ_r z_r⁽¹⁾ ∘ ⋯ ∘ z_r⁽ᵈ⁾`; column `r` of factor `n` is `z_r⁽ⁿ⁾`.
#[derive(Clone, Debug)]
pub struct CpDecomp {
    pub weights: Vec<f64>,
    pub factors: Vec<Matrix>,
}

impl CpDecomp {
    pub fn new(weights: Vec<f64>, factors: Vec<Matrix>) -> Result<Self> {
        let c = Self { weights, factors };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() || self.weights.is_empty() {
            return Err(Error::InvalidDims("CP needs at least one factor and one term".into()));
        }
        let r = self.weights.len();
        for (n, z) in self.factors.iter().enumerate() {
            if z.ncols() != r || z.nrows() == 0 {
                return Err(Error::ShapeMismatch(format!(
                    "factor {n} is {}x{}, expected {r} columns",
                    z.nrows(),
                    z.ncols()
                )));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|z| z.nrows()).collect()
    }
}

pub fn tucker_to_full(t: &TuckerDecomp) -> Result<DenseTensor> {
    t.validate()?;
    let mats: Vec<Option<&Matrix>> = t.factors.iter().map(Some).collect();
    t.core.multi_mode_multiply(&mats)
}

pub fn cp_to_full(c: &CpDecomp) -> Result<DenseTensor> {
    c.validate()?;
    let (a, b) = cp_mode_factors(c, 0)?;
    DenseTensor::fold(&(a * b.transpose()), 0, &c.dims())
}

/// Tucker form of a CP decomposition: super-diagonal core holding the weights.
pub fn cp_to_tucker(c: &CpDecomp) -> Result<TuckerDecomp> {
    c.validate()?;
    let r = c.rank();
    let d = c.factors.len();
    let mut core = DenseTensor::zeros(&vec![r; d])?;
    for (i, &w) in c.weights.iter().enumerate() {
        let off = core.offset(&vec![i; d]);
        core.data[off] = w;
    }
    TuckerDecomp::new(core, c.factors.clone())
}

/// A low-rank representation that can produce per-mode factor pairs
/// `X_(n) ≈ A_n B_nᵀ`.
#[derive(Clone, Copy, Debug)]
pub enum LowRank<'a> {
    Tucker(&'a TuckerDecomp),
    Cp(&'a CpDecomp),
    /// Explicit `(A_n, B_n)` per mode.
    Factors(&'a [(Matrix, Matrix)]),
}

impl LowRank<'_> {
    pub fn order(&self) -> usize {
        match self {
            LowRank::Tucker(t) => t.factors.len(),
            LowRank::Cp(c) => c.factors.len(),
            LowRank::Factors(f) => f.len(),
        }
    }

    /// Inner dimension of the mode-`n` factor pair.
    pub fn rank(&self, n: usize) -> usize {
        match self {
            LowRank::Tucker(t) => t.core.dims()[n],
            LowRank::Cp(c) => c.rank(),
            LowRank::Factors(f) => f[n].0.ncols(),
        }
    }

    pub fn mode_factors(&self, n: usize) -> Result<(Matrix, Matrix)> {
        lowrank_mode_factors(*self, n)
    }
}

/// Factor pair `(A_n, B_n)` with `A_n B_nᵀ = unfold(full(rep), n)`.
///
/// Tucker: `A_n = U_n`, `B_n = (U_d ⊗ ⋯ ⊗ U_{n+1} ⊗ U_{n-1} ⊗ ⋯ ⊗ U_1) G_(n)ᵀ`, evaluated
/// as the transposed unfolding of `G` multiplied by `U_k` along every mode `k ≠ n`.
/// CP: `A_n = Z_n`, `B_n = (Z_d ⊙ ⋯ ⊙ Z_{n+1} ⊙ Z_{n-1} ⊙ ⋯ ⊙ Z_1) Λ`.
pub fn lowrank_mode_factors(rep: LowRank<'_>, n: usize) -> Result<(Matrix, Matrix)> {
    if n >= rep.order() {
        return Err(Error::ModeOutOfRange { mode: n, order: rep.order() });
    }
    match rep {
        LowRank::Tucker(t) => {
            t.validate()?;
            let mats: Vec<Option<&Matrix>> =
                t.factors.iter().enumerate().map(|(k, u)| (k != n).then_some(u)).collect();
            let h = t.core.multi_mode_multiply(&mats)?;
            Ok((t.factors[n].clone(), h.unfold(n)?.transpose()))
        }
        LowRank::Cp(c) => cp_mode_factors(c, n),
        LowRank::Factors(f) => {
            let (a, b) = &f[n];
            if a.ncols() != b.ncols() {
                return Err(Error::ShapeMismatch(format!(
                    "mode {n}: A has {} columns, B has {}",
                    a.ncols(),
                    b.ncols()
                )));
            }
            Ok((a.clone(), b.clone()))
        }
    }
}

fn cp_mode_factors(c: &CpDecomp, n: usize) -> Result<(Matrix, Matrix)> {
    c.validate()?;
    let mut acc: Option<Matrix> = None;
    for k in (0..c.factors.len()).rev().filter(|&k| k != n) {
        acc = Some(match acc {
            None => c.factors[k].clone(),
            Some(m) => khatri_rao(&m, &c.factors[k])?,
        });
    }
    let mut b = acc.unwrap_or_else(|| Matrix::from_element(1, c.rank(), 1.0));
    for (mut col, &w) in b.column_iter_mut().zip(&c.weights) {
        col *= w;
    }
    Ok((c.factors[n].clone(), b))
}
