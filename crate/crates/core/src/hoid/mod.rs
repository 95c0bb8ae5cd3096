//! Tensor pipelines: HOSVD, HOID, conversion of existing low-rank formats,
//! sequentially truncated HOID and matrix CUR, each with an error report.

pub mod bounds;
mod cur;
mod pipelines;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::select::IndexSet;
use crate::tensor::DenseTensor;
use crate::Matrix;

pub use cur::{matrix_cur, matrix_cur_with, CurDecomp};
pub use pipelines::{convert_to_hoid, core_tensor, hoid, hosvd, st_hoid};

/// How the column indices of each mode are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    /// Strong RRQR.
    Rrqr,
    /// Greedy pivoted QR.
    Pqr,
    /// Gaussian sketch followed by strong RRQR (full-tensor pipelines only).
    Randomized,
    /// DEIM on singular vectors (conversion only).
    Deim,
    /// Leverage-score candidates refined by strong RRQR (conversion only).
    SimpleLeverage,
}

impl Selector {
    pub const ALL: [Selector; 5] =
        [Selector::Rrqr, Selector::Pqr, Selector::Randomized, Selector::Deim, Selector::SimpleLeverage];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Rrqr => "rrqr",
            Selector::Pqr => "pqr",
            Selector::Randomized => "randomized",
            Selector::Deim => "deim",
            Selector::SimpleLeverage => "simple-leverage",
        }
    }

    pub fn needs_seed(self) -> bool {
        matches!(self, Selector::Randomized | Selector::SimpleLeverage)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .into_iter()
            .find(|sel| sel.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown selector '{s}'")))
    }
}

/// Knobs shared by the pipelines.
#[derive(Clone, Debug, PartialEq)]
pub struct HoidOptions {
    /// Strong RRQR parameter, `f ≥ 1`.
    pub f: f64,
    /// Oversampling of the randomized sketch.
    pub oversampling: usize,
    /// Required by the randomized selectors.
    pub seed: Option<u64>,
    /// Relative cutoff for the pseudo-inverses of `C_n`.
    pub pinv_tol: f64,
    /// Compute the core tensor and the reconstruction error.
    pub with_core: bool,
}

impl Default for HoidOptions {
    fn default() -> Self {
        Self { f: 1.0, oversampling: crate::linalg::DEFAULT_OVERSAMPLING, seed: None, pinv_tol: 1e-12, with_core: true }
    }
}

impl HoidOptions {
    pub fn with_f(mut self, f: f64) -> Self {
        self.f = f;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn without_core(mut self) -> Self {
        self.with_core = false;
        self
    }
}

/// `X ≈ G ×₁ C₁ ⋯ ×_d C_d` with `C_n` verbatim columns `indices[n]` of `X_(n)`.
#[derive(Clone, Debug)]
pub struct HoidDecomp {
    /// `None` when the core was skipped.
    pub core: Option<DenseTensor>,
    pub columns: Vec<Matrix>,
    pub indices: Vec<IndexSet>,
}

impl HoidDecomp {
    pub fn ranks(&self) -> Vec<usize> {
        self.indices.iter().map(IndexSet::len).collect()
    }

    /// `G ×₁ C₁ ⋯ ×_d C_d`.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let core = self
            .core
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("decomposition was computed without a core".into()))?;
        if core.dims() != self.ranks().as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "core dims {:?} differ from column counts {:?}",
                core.dims(),
                self.ranks()
            )));
        }
        let mats: Vec<Option<&Matrix>> = self.columns.iter().map(Some).collect();
        core.multi_mode_multiply(&mats)
    }

    /// `‖X − reconstruct()‖_F / ‖X‖_F`.
    pub fn relative_error(&self, x: &DenseTensor) -> Result<f64> {
        Ok(relative_error(x, &self.reconstruct()?)?.0)
    }
}

/// `(‖X − Y‖_F / ‖X‖_F, ‖X − Y‖_F)`; the relative error of a zero `X` is the absolute one.
pub fn relative_error(x: &DenseTensor, y: &DenseTensor) -> Result<(f64, f64)> {
    let abs = x.sub(y)?.frobenius_norm();
    let nx = x.frobenius_norm();
    Ok((if nx > 0.0 { abs / nx } else { abs }, abs))
}

/// Diagnostics attached to every pipeline run.
#[derive(Clone, Debug, Default)]
pub struct ErrorReport {
    /// NaN when the core was skipped.
    pub rel_error: f64,
    /// NaN when the core was skipped.
    pub abs_error: f64,
    /// Theoretical bound on `abs_error²` for the pipeline.
    pub bound: f64,
    pub q_factors: Vec<f64>,
    /// `‖(V_nᵀ P_n)⁻¹‖₂`; empty for pipelines that never form `V_n`.
    pub error_constants: Vec<f64>,
    pub wall_time_s: f64,
    pub seed: Option<u64>,
    pub ranks: Vec<usize>,
    pub requested_ranks: Vec<usize>,
    pub notes: Vec<String>,
}

impl ErrorReport {
    pub fn max_error_constant(&self) -> Option<f64> {
        self.error_constants.iter().copied().reduce(f64::max)
    }

    pub fn is_rank_deficient(&self) -> bool {
        self.ranks != self.requested_ranks
    }

    /// `abs_error² ≤ (1 + slack) · bound`.
    pub fn within_bound(&self, slack: f64) -> bool {
        self.abs_error * self.abs_error <= (1.0 + slack) * self.bound
    }
}
