use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hoid::hoid::{matrix_cur_with, ErrorReport, HoidOptions, Selector};
use hoid::linalg::DEFAULT_OVERSAMPLING;
use hoid::{rng, DenseTensor};
use hoid_bench::io::{format_float, read_tensor, write_csv, write_indices, write_tensor};
use hoid_bench::sweep::{run_method, run_sweep_on, ExperimentConfig, Method, TensorSpec};
use hoid_bench::BenchError;

#[derive(Parser)]
#[command(name = "hoid-bench", version, about = "Generate test tensors, run HOID rank sweeps and check error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test tensor and write it as .dten
    Gen {
        #[command(flatten)]
        tensor: TensorArgs,
        /// Seed for randomized generators
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose one tensor with one method and print the error report
    Decompose {
        #[command(flatten)]
        tensor: TensorArgs,
        #[arg(long, default_value = "hoid-rrqr")]
        method: String,
        #[command(flatten)]
        ranks: RankArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Mode processing order for st-hoid, 1-based and comma separated
        #[arg(long, value_delimiter = ',')]
        mode_order: Option<Vec<usize>>,
        /// Write the selected column indices (1-based) as CSV
        #[arg(long)]
        dump_indices: Option<PathBuf>,
        /// Skip the core tensor (no reconstruction error)
        #[arg(long)]
        no_core: bool,
    },
    /// Sweep ranks r_min..=r_max (equal in every mode) across methods and write CSV
    Sweep {
        #[command(flatten)]
        tensor: TensorArgs,
        #[command(flatten)]
        plan: SweepArgs,
        /// Output CSV; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matrix CUR of an order-2 .dten file or of a seeded Gaussian matrix
    Cur {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        rows: usize,
        #[arg(long, default_value_t = 15)]
        cols: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = CurSelector::Rrqr)]
        selector: CurSelector,
        #[command(flatten)]
        algo: AlgoArgs,
        #[arg(long)]
        dump_indices: Option<PathBuf>,
    },
    /// Run a sweep and check measured errors against the theoretical bounds
    VerifyBounds {
        #[command(flatten)]
        tensor: TensorArgs,
        #[command(flatten)]
        plan: SweepArgs,
        /// Relative slack allowed on the squared bound
        #[arg(long, default_value_t = 1e-6)]
        slack: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TensorKind {
    Hilbert,
    SparseCp,
    Heat3,
    Heat5,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CurSelector {
    Rrqr,
    Pqr,
    Randomized,
}

#[derive(Args)]
struct TensorArgs {
    #[arg(long, value_enum, default_value_t = TensorKind::Hilbert)]
    tensor: TensorKind,
    /// Read the tensor from a .dten file instead of generating it
    #[arg(long, conflicts_with = "tensor")]
    input: Option<PathBuf>,
    /// Grid size (hilbert) or size per mode (sparse-cp)
    #[arg(long)]
    n: Option<usize>,
    /// Order of the hilbert tensor
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Sources per side for heat tensors
    #[arg(long)]
    ns: Option<usize>,
    /// Receivers per side for heat tensors
    #[arg(long)]
    nr: Option<usize>,
    /// Time samples for heat tensors
    #[arg(long)]
    nt: Option<usize>,
    /// Seed of the sparse-cp generator; defaults to --seed
    #[arg(long)]
    tensor_seed: Option<u64>,
    /// Default to the large sizes: Hilbert N=50, heat 20/20/20
    #[arg(long)]
    full_scale: bool,
}

impl TensorArgs {
    fn spec(&self, seed: Option<u64>) -> Result<TensorSpec, BenchError> {
        if let Some(p) = &self.input {
            return Ok(TensorSpec::File(p.clone()));
        }
        let full = self.full_scale;
        Ok(match self.tensor {
            TensorKind::Hilbert => TensorSpec::Hilbert { n: self.n.unwrap_or(if full { 50 } else { 20 }), d: self.d },
            TensorKind::SparseCp => TensorSpec::SparseCp {
                n: self.n.unwrap_or(50),
                seed: self
                    .tensor_seed
                    .or(seed)
                    .ok_or_else(|| BenchError::Config("sparse-cp needs --seed or --tensor-seed".into()))?,
            },
            TensorKind::Heat3 | TensorKind::Heat5 => {
                let side = if full { 20 } else { 6 };
                let (ns_side, nr_side) = (self.ns.unwrap_or(side), self.nr.unwrap_or(side));
                let nt = self.nt.unwrap_or(if full { 20 } else { 10 });
                if matches!(self.tensor, TensorKind::Heat3) {
                    TensorSpec::Heat3 { ns_side, nr_side, nt }
                } else {
                    TensorSpec::Heat5 { ns_side, nr_side, nt }
                }
            }
        })
    }
}

#[derive(Args)]
struct RankArgs {
    /// Same rank in every mode
    #[arg(long, conflicts_with = "ranks")]
    rank: Option<usize>,
    /// Per-mode ranks, comma separated
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
}

#[derive(Args)]
struct AlgoArgs {
    /// Strong RRQR parameter
    #[arg(long, default_value_t = 1.0)]
    f: f64,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    oversampling: usize,
    /// Required by randomized methods
    #[arg(long)]
    seed: Option<u64>,
    /// Relative pseudo-inverse cutoff for the core tensor
    #[arg(long, default_value_t = 1e-12)]
    pinv_tol: f64,
}

impl AlgoArgs {
    fn options(&self) -> HoidOptions {
        HoidOptions { f: self.f, oversampling: self.oversampling, seed: self.seed, pinv_tol: self.pinv_tol, with_core: true }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated methods; all when omitted
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long, default_value_t = 1)]
    rank_min: usize,
    #[arg(long, default_value_t = 10)]
    rank_max: usize,
    #[arg(long, default_value_t = 1.0)]
    f: f64,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    oversampling: usize,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Base seed for randomized methods
    #[arg(long)]
    seed: Option<u64>,
}

impl SweepArgs {
    fn config(&self, tensor: TensorSpec, default_methods: &[Method]) -> Result<ExperimentConfig, BenchError> {
        let methods = match &self.methods {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<Method>, _>>()?,
            None => default_methods.to_vec(),
        };
        let mut cfg = ExperimentConfig::new(tensor, methods, self.rank_min, self.rank_max);
        cfg.f = self.f;
        cfg.oversampling = self.oversampling;
        cfg.repetitions = self.repetitions;
        cfg.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Failure classes that map to distinct exit codes.
enum Outcome {
    Success,
    PartialFailure,
}

fn print_report(out: &mut impl Write, report: &ErrorReport) -> io::Result<()> {
    let list = |v: &[f64]| v.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(",");
    writeln!(out, "rel_error: {}", format_float(report.rel_error))?;
    writeln!(out, "abs_error: {}", format_float(report.abs_error))?;
    writeln!(out, "bound: {}", format_float(report.bound))?;
    writeln!(out, "q_factors: {}", list(&report.q_factors))?;
    writeln!(out, "error_constants: {}", list(&report.error_constants))?;
    writeln!(out, "ranks: {:?}", report.ranks)?;
    writeln!(out, "requested_ranks: {:?}", report.requested_ranks)?;
    writeln!(out, "wall_time_s: {}", format_float(report.wall_time_s))?;
    if let Some(s) = report.seed {
        writeln!(out, "seed: {s}")?;
    }
    for note in &report.notes {
        writeln!(out, "note: {note}")?;
    }
    Ok(())
}

fn load(spec: &TensorSpec) -> Result<DenseTensor> {
    spec.build().with_context(|| format!("building tensor {}", spec.label()))
}

fn cmd_decompose(
    tensor: TensorArgs,
    method: String,
    ranks: RankArgs,
    algo: AlgoArgs,
    mode_order: Option<Vec<usize>>,
    dump_indices: Option<PathBuf>,
    no_core: bool,
) -> Result<Outcome> {
    let method: Method = method.parse()?;
    if method.needs_seed() && algo.seed.is_none() {
        return Err(BenchError::Config(format!("method {method} needs --seed")).into());
    }
    let x = load(&tensor.spec(algo.seed)?)?;
    let ranks = match (ranks.rank, ranks.ranks) {
        (Some(r), None) => vec![r; x.order()],
        (None, Some(r)) => r,
        _ => return Err(BenchError::Config("give --rank or --ranks".into()).into()),
    };
    let order = match mode_order {
        Some(o) if method != Method::StHoid => {
            return Err(BenchError::Config(format!("--mode-order applies to st-hoid only, got {o:?}")).into())
        }
        Some(o) => Some(
            o.iter()
                .map(|&m| m.checked_sub(1).ok_or_else(|| BenchError::Config("mode order is 1-based".into())))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let mut opts = algo.options();
    opts.with_core = !no_core;
    if method == Method::Hosvd && no_core {
        return Err(BenchError::Config("--no-core does not apply to hosvd".into()).into());
    }
    let run = run_method(&x, method, &ranks, &opts, order.as_deref())?;
    let mut out = io::stdout().lock();
    writeln!(out, "tensor dims: {:?}", x.dims())?;
    writeln!(out, "method: {method}")?;
    print_report(&mut out, &run.report)?;
    if let Some(path) = dump_indices {
        write_indices(File::create(&path)?, &run.indices).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::Success)
}

fn cmd_sweep(tensor: TensorArgs, plan: SweepArgs, out: Option<PathBuf>) -> Result<Outcome> {
    let spec = tensor.spec(plan.seed)?;
    let cfg = plan.config(spec, &Method::ALL)?;
    let x = load(&cfg.tensor)?;
    let rows = run_sweep_on(&cfg, &x)?;
    for r in rows.iter().filter(|r| r.failed()) {
        eprintln!("row failed: {}-{} rank {}: {}", r.method, r.selector, r.rank, r.error.as_deref().unwrap_or(""));
    }
    match out {
        Some(path) => write_csv(File::create(&path)?, &rows).with_context(|| format!("writing {}", path.display()))?,
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(if rows.iter().any(|r| r.failed()) { Outcome::PartialFailure } else { Outcome::Success })
}

fn cmd_cur(
    input: Option<PathBuf>,
    rows: usize,
    cols: usize,
    rank: usize,
    selector: CurSelector,
    algo: AlgoArgs,
    dump_indices: Option<PathBuf>,
) -> Result<Outcome> {
    let a = match input {
        Some(path) => {
            let x = read_tensor(&path)?;
            if x.order() != 2 {
                return Err(BenchError::Config(format!("{} has order {}, expected 2", path.display(), x.order())).into());
            }
            x.unfold(0)?
        }
        None => {
            let Some(seed) = algo.seed else {
                return Err(BenchError::Config("a random test matrix needs --seed".into()).into());
            };
            rng::gaussian_matrix(&mut rng::seeded(seed, u64::MAX), rows, cols)
        }
    };
    let selector = match selector {
        CurSelector::Rrqr => Selector::Rrqr,
        CurSelector::Pqr => Selector::Pqr,
        CurSelector::Randomized => Selector::Randomized,
    };
    if selector.needs_seed() && algo.seed.is_none() {
        return Err(BenchError::Config("randomized selection needs --seed".into()).into());
    }
    let (cur, report) = matrix_cur_with(&a, rank, selector, &algo.options())?;
    let mut out = io::stdout().lock();
    writeln!(out, "matrix: {}x{}", a.nrows(), a.ncols())?;
    print_report(&mut out, &report)?;
    if let Some(path) = dump_indices {
        let idx = vec![cur.col_indices.into_vec(), cur.row_indices.into_vec()];
        write_indices(File::create(&path)?, &idx)?;
    }
    Ok(Outcome::Success)
}

fn cmd_verify(tensor: TensorArgs, plan: SweepArgs, slack: f64) -> Result<Outcome> {
    let guaranteed: Vec<Method> = Method::ALL.into_iter().filter(|m| m.bound_is_guaranteed()).collect();
    let spec = tensor.spec(plan.seed)?;
    let cfg = plan.config(spec, &guaranteed)?;
    let x = load(&cfg.tensor)?;
    let rows = run_sweep_on(&cfg, &x)?;
    let mut out = io::stdout().lock();
    let mut bad = 0;
    for r in &rows {
        let method = if r.method == "hosvd" || r.method == "st-hoid" { r.method.clone() } else { format!("{}-{}", r.method, r.selector) };
        let guaranteed = method.parse::<Method>().map(Method::bound_is_guaranteed).unwrap_or(false);
        let status = match &r.error {
            Some(e) => format!("FAILED ({e})"),
            None if r.abs_error * r.abs_error <= (1.0 + slack) * r.bound => "ok".to_string(),
            None if guaranteed => "VIOLATED".to_string(),
            None => "above bound (not guaranteed)".to_string(),
        };
        if status == "VIOLATED" || r.failed() {
            bad += 1;
        }
        writeln!(
            out,
            "{method:<24} rank {:>3}  err^2 {:>24}  bound {:>24}  {status}",
            r.rank,
            format_float(r.abs_error * r.abs_error),
            format_float(r.bound)
        )?;
    }
    writeln!(out, "{} rows, {bad} violations or failures", rows.len())?;
    Ok(if bad > 0 { Outcome::PartialFailure } else { Outcome::Success })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen { tensor, seed, out } => {
            let spec = tensor.spec(seed)?;
            if let TensorSpec::File(_) = spec {
                bail!(BenchError::Config("gen does not take --input".into()));
            }
            let x = load(&spec)?;
            write_tensor(&out, &x).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} {:?} to {}", spec.label(), x.dims(), out.display());
            Ok(Outcome::Success)
        }
        Command::Decompose { tensor, method, ranks, algo, mode_order, dump_indices, no_core } => {
            cmd_decompose(tensor, method, ranks, algo, mode_order, dump_indices, no_core)
        }
        Command::Sweep { tensor, plan, out } => cmd_sweep(tensor, plan, out),
        Command::Cur { input, rows, cols, rank, selector, algo, dump_indices } => {
            cmd_cur(input, rows, cols, rank, selector, algo, dump_indices)
        }
        Command::VerifyBounds { tensor, plan, slack } => cmd_verify(tensor, plan, slack),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::PartialFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
