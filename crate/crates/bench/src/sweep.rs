//! Rank sweeps over methods and selectors.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use hoid::hoid::bounds::{complement_size, hosvd_bound};
use hoid::hoid::{convert_to_hoid, hoid, hosvd, relative_error, st_hoid, ErrorReport, HoidOptions, Selector};
use hoid::linalg::singular_values;
use hoid::tensor::{tucker_to_full, LowRank};
use hoid::DenseTensor;

use crate::gen::{gen_heat3, gen_heat5, gen_hilbert, gen_sparse_cp};
use crate::io::read_tensor;
use crate::BenchError;

/// Where the input tensor comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorSpec {
    Hilbert { n: usize, d: usize },
    SparseCp { n: usize, seed: u64 },
    Heat3 { ns_side: usize, nr_side: usize, nt: usize },
    Heat5 { ns_side: usize, nr_side: usize, nt: usize },
    File(PathBuf),
}

impl TensorSpec {
    pub fn label(&self) -> String {
        match self {
            TensorSpec::Hilbert { n, d } => format!("hilbert-n{n}-d{d}"),
            TensorSpec::SparseCp { n, seed } => format!("sparse-cp-n{n}-s{seed}"),
            TensorSpec::Heat3 { ns_side, nr_side, nt } => format!("heat3-{ns_side}x{nr_side}x{nt}"),
            TensorSpec::Heat5 { ns_side, nr_side, nt } => format!("heat5-{ns_side}x{nr_side}x{nt}"),
            TensorSpec::File(p) => p.display().to_string(),
        }
    }

    pub fn build(&self) -> Result<DenseTensor, BenchError> {
        match *self {
            TensorSpec::Hilbert { n, d } => gen_hilbert(n, d),
            TensorSpec::SparseCp { n, seed } => Ok(gen_sparse_cp(n, seed)?.0),
            TensorSpec::Heat3 { ns_side, nr_side, nt } => gen_heat3(ns_side, nr_side, nt),
            TensorSpec::Heat5 { ns_side, nr_side, nt } => gen_heat5(ns_side, nr_side, nt),
            TensorSpec::File(ref p) => read_tensor(p),
        }
    }
}

/// A decomposition pipeline together with its column selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Hosvd,
    /// HOID on the full tensor (`Rrqr`, `Pqr` or `Randomized`).
    Hoid(Selector),
    StHoid,
    /// Conversion of a rank-`(r,…,r)` HOSVD (`Rrqr`, `Pqr`, `Deim` or `SimpleLeverage`).
    Convert(Selector),
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Hosvd,
        Method::Hoid(Selector::Rrqr),
        Method::Hoid(Selector::Pqr),
        Method::Hoid(Selector::Randomized),
        Method::StHoid,
        Method::Convert(Selector::Deim),
        Method::Convert(Selector::Pqr),
        Method::Convert(Selector::Rrqr),
        Method::Convert(Selector::SimpleLeverage),
    ];

    /// Pipeline name used in the `method` column.
    pub fn family(self) -> &'static str {
        match self {
            Method::Hosvd => "hosvd",
            Method::Hoid(_) => "hoid",
            Method::StHoid => "st-hoid",
            Method::Convert(_) => "convert",
        }
    }

    /// Selector name used in the `selector` column.
    pub fn selector_name(self) -> &'static str {
        match self {
            Method::Hosvd => "none",
            Method::StHoid => "rrqr",
            Method::Hoid(s) | Method::Convert(s) => s.name(),
        }
    }

    pub fn needs_seed(self) -> bool {
        matches!(self, Method::Hoid(s) | Method::Convert(s) if s.needs_seed())
    }

    /// Whether the reported bound is a proven guarantee for this method.
    pub fn bound_is_guaranteed(self) -> bool {
        matches!(self, Method::Hosvd | Method::StHoid | Method::Hoid(Selector::Rrqr) | Method::Convert(Selector::Rrqr))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Hosvd | Method::StHoid => f.write_str(self.family()),
            _ => write!(f, "{}-{}", self.family(), self.selector_name()),
        }
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = Method::ALL.iter().map(Method::to_string).collect();
                BenchError::Config(format!("unknown method '{s}', expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub tensor: TensorSpec,
    pub methods: Vec<Method>,
    /// Inclusive; the same rank is used in every mode.
    pub rank_min: usize,
    pub rank_max: usize,
    pub f: f64,
    pub oversampling: usize,
    pub repetitions: usize,
    /// Base seed; repetition `k` of a randomized method uses `seed + k`.
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(tensor: TensorSpec, methods: Vec<Method>, rank_min: usize, rank_max: usize) -> Self {
        Self {
            tensor,
            methods,
            rank_min,
            rank_max,
            f: 1.0,
            oversampling: hoid::linalg::DEFAULT_OVERSAMPLING,
            repetitions: 1,
            seed: None,
            output: None,
        }
    }

    /// Checks everything that does not need the tensor entries.
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.rank_min == 0 {
            return Err(BenchError::Config("ranks must be >= 1".into()));
        }
        if self.rank_min > self.rank_max {
            return Err(BenchError::Config(format!("empty rank range {}..={}", self.rank_min, self.rank_max)));
        }
        if self.repetitions == 0 {
            return Err(BenchError::Config("repetitions must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("no methods given".into()));
        }
        if !(self.f >= 1.0) {
            return Err(BenchError::Config(format!("f must be >= 1, got {}", self.f)));
        }
        if self.seed.is_none() {
            if let Some(m) = self.methods.iter().find(|m| m.needs_seed()) {
                return Err(BenchError::Config(format!("method {m} needs --seed")));
            }
        }
        Ok(())
    }

    /// Checks the rank range against the tensor dimensions.
    pub fn validate_dims(&self, dims: &[usize]) -> Result<(), BenchError> {
        let max = (0..dims.len()).map(|n| dims[n].min(complement_size(dims, n))).min().unwrap_or(0);
        if self.rank_max > max {
            return Err(BenchError::Config(format!("rank {} exceeds the largest valid rank {max} for dims {dims:?}", self.rank_max)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub tensor: String,
    pub method: String,
    pub selector: String,
    pub rank: usize,
    pub rel_error: f64,
    pub bound: f64,
    pub max_error_constant: Option<f64>,
    pub wall_time_s: f64,
    pub seed: Option<u64>,
    /// Not serialized: absolute error, repetition and failure message.
    pub abs_error: f64,
    pub repetition: usize,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Outcome of one pipeline run at a fixed rank.
#[derive(Clone, Debug)]
pub struct Run {
    pub report: ErrorReport,
    pub indices: Vec<Vec<usize>>,
}

/// Runs `method` at ranks `ranks` on `x`.
pub fn run_method(
    x: &DenseTensor,
    method: Method,
    ranks: &[usize],
    opts: &HoidOptions,
    mode_order: Option<&[usize]>,
) -> Result<Run, BenchError> {
    let out = match method {
        Method::Hosvd => {
            let start = Instant::now();
            let t = hosvd(x, ranks)?;
            let (rel, abs) = relative_error(x, &tucker_to_full(&t)?)?;
            let spectra = (0..x.order()).map(|n| Ok(singular_values(&x.unfold(n)?))).collect::<Result<Vec<_>, BenchError>>()?;
            let report = ErrorReport {
                rel_error: rel,
                abs_error: abs,
                bound: hosvd_bound(&spectra, ranks),
                wall_time_s: start.elapsed().as_secs_f64(),
                ranks: ranks.to_vec(),
                requested_ranks: ranks.to_vec(),
                ..Default::default()
            };
            return Ok(Run { report, indices: Vec::new() });
        }
        Method::Hoid(sel) => hoid(x, ranks, sel, opts)?,
        Method::StHoid => st_hoid(x, ranks, mode_order, opts)?,
        Method::Convert(sel) => {
            let start = Instant::now();
            let t = hosvd(x, ranks)?;
            let (h, mut report) = convert_to_hoid(x, LowRank::Tucker(&t), None, sel, opts)?;
            report.wall_time_s = start.elapsed().as_secs_f64();
            (h, report)
        }
    };
    let (h, report) = out;
    Ok(Run { report, indices: h.indices.iter().map(|p| p.as_slice().to_vec()).collect() })
}

/// One row per (method, rank, repetition), sorted by method, selector, rank
/// and repetition. Failing rows carry NaN numerics and an error message; the
/// sweep continues past them.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, BenchError> {
    cfg.validate()?;
    let x = cfg.tensor.build()?;
    run_sweep_on(cfg, &x)
}

/// [`run_sweep`] on an already built tensor.
pub fn run_sweep_on(cfg: &ExperimentConfig, x: &DenseTensor) -> Result<Vec<ResultRow>, BenchError> {
    cfg.validate()?;
    cfg.validate_dims(x.dims())?;
    let label = cfg.tensor.label();
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for rank in cfg.rank_min..=cfg.rank_max {
            let ranks = vec![rank; x.order()];
            for rep in 0..cfg.repetitions {
                let seed = if method.needs_seed() { cfg.seed.map(|s| s.wrapping_add(rep as u64)) } else { None };
                let opts = HoidOptions { f: cfg.f, oversampling: cfg.oversampling, seed, ..Default::default() };
                let mut row = ResultRow {
                    tensor: label.clone(),
                    method: method.family().to_string(),
                    selector: method.selector_name().to_string(),
                    rank,
                    rel_error: f64::NAN,
                    bound: f64::NAN,
                    max_error_constant: None,
                    wall_time_s: f64::NAN,
                    seed,
                    abs_error: f64::NAN,
                    repetition: rep,
                    error: None,
                };
                match run_method(x, method, &ranks, &opts, None) {
                    Ok(run) => {
                        row.rel_error = run.report.rel_error;
                        row.abs_error = run.report.abs_error;
                        row.bound = run.report.bound;
                        row.max_error_constant = run.report.max_error_constant();
                        row.wall_time_s = run.report.wall_time_s;
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.method, &a.selector, a.rank, a.repetition).cmp(&(&b.method, &b.selector, b.rank, b.repetition))
    });
    Ok(rows)
}
