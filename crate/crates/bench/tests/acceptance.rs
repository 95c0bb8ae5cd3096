//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use hoid::hoid::{
    convert_to_hoid, hoid, hosvd, matrix_cur, matrix_cur_with, relative_error, st_hoid, HoidDecomp, HoidOptions,
    Selector,
};
use hoid::linalg::{select_columns, singular_values, spectral_norm, strong_rrqr, thin_svd};
use hoid::rng::{gaussian_matrix, orthonormal_matrix, seeded};
use hoid::select::{deim_select, error_constant, interpolatory_projector, pqr_select, rrqr_select, IndexSet};
use hoid::tensor::{tucker_to_full, LowRank, TuckerDecomp};
use hoid::{DenseTensor, Matrix};
use hoid_bench::gen::{gen_heat3, gen_heat5, gen_hilbert, gen_sparse_cp, kahan_matrix};
use hoid_bench::io::{decode_tensor, encode_tensor, read_tensor, write_csv, write_tensor, CSV_HEADER};
use hoid_bench::sweep::{run_method, Method, ResultRow};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const BOUND_SLACK: f64 = 1e-6;
const HILBERT_SIZES: [usize; 3] = [6, 10, 20];

fn rrqr_opts() -> HoidOptions {
    HoidOptions::default()
}

fn q(dims: &[usize], n: usize, r: usize, f: f64) -> f64 {
    let cols: usize = dims.iter().enumerate().filter(|&(k, _)| k != n).map(|(_, &d)| d).product();
    1.0 + f * f * r as f64 * (cols as f64 - r as f64)
}

fn tail(s: &[f64], r: usize) -> f64 {
    s[r.min(s.len())..].iter().map(|v| v * v).sum()
}

fn random_tucker(dims: &[usize], ranks: &[usize], seed: u64) -> DenseTensor {
    let mut rng = seeded(seed, 0);
    let core = DenseTensor::new(ranks.to_vec(), gaussian_matrix(&mut rng, ranks.iter().product(), 1).as_slice().to_vec())
        .unwrap();
    let factors = dims.iter().zip(ranks).map(|(&i, &r)| orthonormal_matrix(&mut rng, i, r)).collect();
    tucker_to_full(&TuckerDecomp::new(core, factors).unwrap()).unwrap()
}

fn columns_verbatim(x: &DenseTensor, h: &HoidDecomp) -> bool {
    h.columns.iter().zip(&h.indices).enumerate().all(|(n, (c, p))| {
        let xn = x.unfold(n).unwrap();
        c.ncols() == p.len()
            && p.as_slice().iter().enumerate().all(|(k, &j)| {
                c.column(k).iter().zip(xn.column(j).iter()).all(|(a, b)| a.to_bits() == b.to_bits())
            })
    })
}

fn criterion_01() -> Outcome {
    let start = Instant::now();
    let x = random_tucker(&[10, 10, 10], &[3, 3, 3], 2024);
    let ranks = [3, 3, 3];
    let mut worst: f64 = 0.0;
    let mut check = |name: &str, rel: f64| -> Result<(), String> {
        worst = worst.max(rel);
        ensure!(rel <= 1e-9, "{name}: rel_error {rel:e}");
        Ok(())
    };
    let t = hosvd(&x, &ranks).map_err(|e| e.to_string())?;
    check("hosvd", relative_error(&x, &tucker_to_full(&t).unwrap()).unwrap().0)?;
    let (_, rep) = hoid(&x, &ranks, Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
    check("hoid", rep.rel_error)?;
    let (_, rep) = st_hoid(&x, &ranks, None, &rrqr_opts()).map_err(|e| e.to_string())?;
    check("st_hoid", rep.rel_error)?;
    for sel in [Selector::Rrqr, Selector::Pqr, Selector::Deim, Selector::SimpleLeverage] {
        let opts = rrqr_opts().with_seed(7);
        let (_, rep) = convert_to_hoid(&x, LowRank::Tucker(&t), None, sel, &opts).map_err(|e| e.to_string())?;
        check(&format!("convert-{sel}"), rep.rel_error)?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "runtime {secs:.2} s");
    Ok(format!("worst rel_error {worst:.2e} over 7 pipelines, {secs:.2} s"))
}

fn criterion_02() -> Outcome {
    let start = Instant::now();
    let mut worst_ratio: f64 = 0.0;
    for n in HILBERT_SIZES {
        let x = gen_hilbert(n, 3).unwrap();
        let spectra: Vec<Vec<f64>> = (0..3).map(|k| singular_values(&x.unfold(k).unwrap())).collect();
        for r in 1..=5 {
            let (_, rep) = hoid(&x, &[r; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
            let bound: f64 = (0..3).map(|k| q(x.dims(), k, r, 1.0) * tail(&spectra[k], r)).sum();
            let err2 = rep.abs_error * rep.abs_error;
            ensure!(err2 <= (1.0 + BOUND_SLACK) * bound, "N={n} r={r}: err² {err2:e} > bound {bound:e}");
            worst_ratio = worst_ratio.max(err2 / bound);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "runtime {secs:.2} s");
    Ok(format!("max err²/bound {worst_ratio:.3e}, {secs:.2} s"))
}

fn criterion_03() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    for n in HILBERT_SIZES {
        let x = gen_hilbert(n, 3).unwrap();
        for r in 1..=5 {
            let t = hosvd(&x, &[r; 3]).unwrap();
            let approx = tucker_to_full(&t).unwrap();
            let (_, rep) =
                convert_to_hoid(&x, LowRank::Tucker(&t), None, Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
            let bound: f64 = (0..3)
                .map(|k| {
                    let eps = (x.unfold(k).unwrap() - approx.unfold(k).unwrap()).norm();
                    q(x.dims(), k, r, 1.0) * eps * eps
                })
                .sum();
            let err2 = rep.abs_error * rep.abs_error;
            ensure!(err2 <= (1.0 + BOUND_SLACK) * bound, "N={n} r={r}: err² {err2:e} > bound {bound:e}");
            worst_ratio = worst_ratio.max(err2 / bound);
        }
    }
    Ok(format!("max err²/bound {worst_ratio:.3e}"))
}

/// Squared distances `‖X − X⁽ⁿ⁾‖²` of the partial projections, plus the raw
/// telescoped norm differences for comparison.
fn partial_projection_gaps(x: &DenseTensor, r: usize) -> (Vec<f64>, Vec<f64>) {
    let mut s = x.clone();
    let mut projectors: Vec<Matrix> = Vec::new();
    let (mut direct, mut telescoped) = (Vec::new(), Vec::new());
    for n in 0..x.order() {
        let u = thin_svd(&s.unfold(n).unwrap(), Some(r)).u;
        s = s.mode_multiply(n, &u.transpose()).unwrap();
        projectors.push(&u * u.transpose());
        let mut xn = x.clone();
        for (k, p) in projectors.iter().enumerate() {
            xn = xn.mode_multiply(k, p).unwrap();
        }
        direct.push(x.sub(&xn).unwrap().frobenius_norm().powi(2));
        telescoped.push(x.frobenius_norm().powi(2) - xn.frobenius_norm().powi(2));
    }
    (direct, telescoped)
}

fn criterion_04() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut clamped = 0;
    for n in HILBERT_SIZES {
        let x = gen_hilbert(n, 3).unwrap();
        for r in 1..=5 {
            let (_, rep) = st_hoid(&x, &[r; 3], None, &rrqr_opts()).map_err(|e| e.to_string())?;
            let (direct, telescoped) = partial_projection_gaps(&x, r);
            clamped += telescoped.iter().filter(|&&g| g < 0.0).count();
            let bound: f64 = (0..3).map(|k| q(x.dims(), k, r, 1.0) * direct[k]).sum();
            let err2 = rep.abs_error * rep.abs_error;
            ensure!(err2 <= (1.0 + BOUND_SLACK) * bound, "N={n} r={r}: err² {err2:e} > bound {bound:e}");
            worst_ratio = worst_ratio.max(err2 / bound);
        }
    }
    Ok(format!("max err²/bound {worst_ratio:.3e}, {clamped} negative telescoped gaps"))
}

fn criterion_05() -> Outcome {
    let (m, n, f) = (20, 15, 1.0);
    let mut worst_ratio: f64 = 0.0;
    for seed in 0..30 {
        let a = gaussian_matrix(&mut seeded(500 + seed, 0), m, n);
        let s = singular_values(&a);
        for r in [2, 4, 8] {
            let (cur, _) = matrix_cur(&a, r, f).map_err(|e| e.to_string())?;
            let err2 = (&a - cur.reconstruct()).norm_squared();
            let qq = 2.0 + f * f * r as f64 * (m + n - 2 * r) as f64;
            let bound = qq * tail(&s, r);
            ensure!(err2 <= (1.0 + BOUND_SLACK) * bound, "seed {seed} r={r}: err² {err2:e} > bound {bound:e}");
            worst_ratio = worst_ratio.max(err2 / bound);
        }
    }
    Ok(format!("90 cases, max err²/bound {worst_ratio:.3e}"))
}

fn rrqr_bounds_hold(a: &Matrix, k: usize, f: f64) -> Result<(), String> {
    let s = strong_rrqr(a, k, f).map_err(|e| e.to_string())?;
    let n = a.ncols();
    let c = (1.0 + f * f * (k * (n - k)) as f64).sqrt();
    let sa = singular_values(a);
    let s11 = singular_values(&s.r11());
    let s22 = singular_values(&s.r22());
    let slack = 1e-10;
    for (i, v) in s11.iter().enumerate() {
        ensure!(*v >= sa[i] / c * (1.0 - slack), "σ_{}(R11) = {v:e} < σ(A)/c = {:e}", i + 1, sa[i] / c);
    }
    for (j, v) in s22.iter().enumerate() {
        let target = sa.get(k + j).copied().unwrap_or(0.0);
        ensure!(*v <= c * target * (1.0 + slack) + slack * sa[0] * f64::EPSILON, "σ_{}(R22) = {v:e} > c·σ = {:e}", j + 1, c * target);
    }
    let w = s.interpolation_matrix().map_err(|e| e.to_string())?;
    ensure!(w.amax() <= f * (1.0 + slack), "max |W| = {} > f = {f}", w.amax());
    Ok(())
}

fn criterion_06() -> Outcome {
    let ks = [2, 5, 10];
    let fs = [1.0, 1.05, 2.0];
    let mut cases = 0;
    for seed in 0..100 {
        let a = gaussian_matrix(&mut seeded(600 + seed, 0), 30, 60);
        for k in ks {
            for f in fs {
                rrqr_bounds_hold(&a, k, f).map_err(|e| format!("random seed {seed}, k={k}, f={f}: {e}"))?;
                cases += 1;
            }
        }
    }
    let kahan = kahan_matrix(96, 0.285);
    let mut swaps = 0;
    for k in ks {
        for f in fs {
            rrqr_bounds_hold(&kahan, k, f).map_err(|e| format!("Kahan k={k}, f={f}: {e}"))?;
            swaps += strong_rrqr(&kahan, k, f).unwrap().swaps;
            cases += 1;
        }
    }
    Ok(format!("{cases} factorizations, {swaps} swaps on the Kahan matrix"))
}

/// The (V, p) pairs of the selector suite.
fn selector_cases() -> Vec<(Matrix, &'static str, IndexSet)> {
    let n = 40;
    let mut out = Vec::new();
    for seed in 0..50 {
        for k in 2..=6 {
            let v = orthonormal_matrix(&mut seeded(700 + seed, k as u64), n, k);
            out.push((v.clone(), "deim", deim_select(&v).unwrap()));
            out.push((v.clone(), "pqr", pqr_select(&v).unwrap()));
            out.push((v.clone(), "rrqr", rrqr_select(&v, 1.0).unwrap()));
        }
    }
    out
}

fn criterion_07() -> Outcome {
    let n = 40usize;
    let mut worst = [0.0f64; 3];
    for (v, name, p) in selector_cases() {
        let k = v.ncols();
        let c = error_constant(&v, &p).map_err(|e| e.to_string())?;
        let (bound, slot) = match name {
            "deim" => ((n as f64 * k as f64 / 3.0).sqrt() * 2f64.powi(k as i32), 0),
            "pqr" => (((n - k + 1) as f64).sqrt() * (4f64.powi(k as i32) + 6.0 * n as f64 - 1.0).sqrt() / 3.0, 1),
            _ => ((1.0 + (k * (n - k)) as f64).sqrt(), 2),
        };
        ensure!(c <= bound * (1.0 + 1e-8), "{name} k={k}: constant {c} > bound {bound}");
        worst[slot] = worst[slot].max(c / bound);
    }
    Ok(format!("250 bases; max constant/bound deim {:.3}, pqr {:.3}, rrqr {:.3}", worst[0], worst[1], worst[2]))
}

fn criterion_08() -> Outcome {
    let n = 40;
    let mut worst_idem: f64 = 0.0;
    let mut worst_const: f64 = 0.0;
    for (case, (v, name, p)) in selector_cases().into_iter().enumerate() {
        let pi = interpolatory_projector(&v, &p).map_err(|e| e.to_string())?;
        let scale = spectral_norm(&pi).max(1.0);
        let idem = (&pi * &pi - &pi).norm() / scale;
        ensure!(idem <= 1e-10, "{name} case {case}: ‖Π²−Π‖ = {idem:e}");
        worst_idem = worst_idem.max(idem);
        let pit = pi.transpose();
        for t in 0..100 {
            let x = gaussian_matrix(&mut seeded(case as u64, 1000 + t), n, 1);
            let y = &pit * &x;
            let xmax = x.amax();
            for &i in p.as_slice() {
                ensure!((y[i] - x[i]).abs() <= 1e-12 * xmax.max(1.0) * scale, "{name} case {case}: interpolation at {i}");
            }
        }
        let dense = spectral_norm(&(Matrix::identity(n, n) - &pi));
        let c = error_constant(&v, &p).unwrap();
        let rel = (dense - c).abs() / c;
        ensure!(rel <= 1e-8, "{name} case {case}: ‖I−Π‖ = {dense} vs constant {c}");
        worst_const = worst_const.max(rel);
    }
    Ok(format!("750 projectors; max idempotency defect {worst_idem:.1e}, max constant mismatch {worst_const:.1e}"))
}

fn criterion_09() -> Outcome {
    let x = gen_hilbert(20, 3).unwrap();
    for r in 1..=10 {
        let (h, _) = hoid(&x, &[r; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
        ensure!(
            h.indices[0] == h.indices[1] && h.indices[1] == h.indices[2],
            "r={r}: index sets differ: {:?}",
            h.indices
        );
    }
    Ok("identical index sets in all three modes for r = 1..10".into())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (x, _) = gen_sparse_cp(50, 10).unwrap();
    let (h12, rep12) = hoid(&x, &[12; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
    ensure!(h12.columns.iter().all(|c| c.iter().all(|&v| v >= 0.0)), "negative entry in some C_n");
    ensure!(columns_verbatim(&x, &h12), "C_n differ from the unfolding columns");
    let zeros_x: usize = (0..3)
        .map(|n| {
            let xn = x.unfold(n).unwrap();
            h12.indices[n].as_slice().iter().map(|&j| xn.column(j).iter().filter(|&&v| v == 0.0).count()).sum::<usize>()
        })
        .sum();
    let zeros_c: usize = h12.columns.iter().map(|c| c.iter().filter(|&&v| v == 0.0).count()).sum();
    ensure!(zeros_x == zeros_c, "zero counts differ: {zeros_c} vs {zeros_x}");
    let (_, rep5) = hoid(&x, &[5; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
    ensure!(rep12.rel_error <= rep5.rel_error, "rel(12) {} > rel(5) {}", rep12.rel_error, rep5.rel_error);
    let t = hosvd(&x, &[12; 3]).unwrap();
    let hosvd_rel = relative_error(&x, &tucker_to_full(&t).unwrap()).unwrap().0;
    ensure!(rep12.rel_error <= 10.0 * hosvd_rel, "hoid {} > 10× hosvd {hosvd_rel}", rep12.rel_error);
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "runtime {secs:.2} s");
    Ok(format!(
        "rel(5) {:.3e}, rel(12) {:.3e}, hosvd(12) {hosvd_rel:.3e}, zero fraction of C_n {:.3}, {secs:.2} s",
        rep5.rel_error,
        rep12.rel_error,
        zeros_c as f64 / h12.columns.iter().map(|c| c.len()).sum::<usize>() as f64
    ))
}

fn criterion_11() -> Outcome {
    let x = gen_hilbert(20, 3).unwrap();
    let (_, det) = hoid(&x, &[5; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
    let mut errs: Vec<f64> = (0..10)
        .map(|seed| {
            let opts = HoidOptions { oversampling: 10, ..rrqr_opts().with_seed(seed) };
            hoid(&x, &[5; 3], Selector::Randomized, &opts).map(|(_, r)| r.rel_error).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    errs.sort_by(f64::total_cmp);
    let median = 0.5 * (errs[4] + errs[5]);
    ensure!(median <= 2.0 * det.rel_error, "median {median:e} > 2 × {:e}", det.rel_error);
    Ok(format!("median randomized {median:.3e} vs deterministic {:.3e}", det.rel_error))
}

fn criterion_12() -> Outcome {
    let x = gen_hilbert(20, 3).unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    for r in 1..=10 {
        let ranks = [r; 3];
        let base = run_method(&x, Method::Hosvd, &ranks, &rrqr_opts(), None).map_err(|e| e.to_string())?.report.rel_error;
        for m in Method::ALL.into_iter().filter(|m| *m != Method::Hosvd) {
            let opts = rrqr_opts().with_seed(12);
            let rel = run_method(&x, m, &ranks, &opts, None).map_err(|e| format!("{m} r={r}: {e}"))?.report.rel_error;
            ensure!(base <= rel, "r={r}: hosvd {base:e} > {m} {rel:e}");
            ensure!(rel <= 10.0 * base, "r={r}: {m} {rel:e} > 10 × hosvd {base:e}");
            if rel / base > worst {
                worst = rel / base;
                worst_name = format!("{m} at r={r}");
            }
        }
    }
    Ok(format!("8 variants × 10 ranks; largest ratio to hosvd {worst:.2} ({worst_name})"))
}

fn criterion_13() -> Outcome {
    let start = Instant::now();
    let (ns, nr, nt) = (6, 6, 10);
    let x3 = gen_heat3(ns, nr, nt).unwrap();
    ensure!(x3.dims() == [36, 36, 10], "dims {:?}", x3.dims());
    let (_, r3) = hoid(&x3, &[3; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
    let (_, r10) = hoid(&x3, &[10; 3], Selector::Rrqr, &rrqr_opts()).map_err(|e| e.to_string())?;
    ensure!(r10.rel_error <= r3.rel_error, "rel(10) {} > rel(3) {}", r10.rel_error, r3.rel_error);
    let x5 = gen_heat5(ns, nr, nt).unwrap();
    ensure!(x5.dims() == [ns, ns, nr, nr, nt], "dims {:?}", x5.dims());
    for t in 0..nt {
        for ry in 0..nr {
            for rx in 0..nr {
                for sy in 0..ns {
                    for sx in 0..ns {
                        let a = x5.get(&[sx, sy, rx, ry, t]);
                        let b = x3.get(&[sx + ns * sy, rx + nr * ry, t]);
                        ensure!(a.to_bits() == b.to_bits(), "mismatch at ({sx},{sy},{rx},{ry},{t})");
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "runtime {secs:.2} s");
    Ok(format!("rel(3) {:.3e}, rel(10) {:.3e}, X5 ≡ X3 entrywise, {secs:.2} s", r3.rel_error, r10.rel_error))
}

fn criterion_14() -> Outcome {
    let a = gaussian_matrix(&mut seeded(1400, 0), 25, 18);
    let x = DenseTensor::from_matrix(&a).unwrap();
    for sel in [Selector::Rrqr, Selector::Pqr, Selector::Randomized] {
        for f in [1.0, 2.0] {
            let opts = rrqr_opts().with_f(f).with_seed(14);
            let (h, hr) = hoid(&x, &[6, 6], sel, &opts).map_err(|e| e.to_string())?;
            let (cur, cr) = matrix_cur_with(&a, 6, sel, &opts).map_err(|e| e.to_string())?;
            ensure!(h.indices[0] == cur.col_indices && h.indices[1] == cur.row_indices, "{sel} f={f}: index sets differ");
            ensure!((hr.rel_error - cr.rel_error).abs() <= 1e-12, "{sel} f={f}: errors {} vs {}", hr.rel_error, cr.rel_error);
            let c_ok = h.columns[0] == select_columns(&a, cur.col_indices.as_slice()) && h.columns[0] == cur.c;
            ensure!(c_ok && h.columns[1].transpose() == cur.r, "{sel} f={f}: C or R differ");
        }
    }
    Ok("rrqr, pqr and randomized selections agree for f ∈ {1, 2}".into())
}

fn regenerate_twice(args: &[&str], dir: &std::path::Path, tag: &str) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_hoid-bench");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let path = dir.join(format!("{tag}-{run}.dten"));
        let status = Command::new(bin)
            .arg("gen")
            .args(args)
            .arg("--out")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(status.status.success(), "{tag}: gen failed: {}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(outputs[0] == outputs[1], "{tag}: regenerated files differ");
    let x = decode_tensor(&outputs[0]).map_err(|e| e.to_string())?;
    ensure!(!x.is_empty(), "{tag}: empty tensor");
    Ok(())
}

fn criterion_15() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let x = DenseTensor::new(vec![3, 4, 5], gaussian_matrix(&mut seeded(1500, 0), 60, 1).as_slice().to_vec()).unwrap();
    let path = dir.path().join("x.dten");
    write_tensor(&path, &x).map_err(|e| e.to_string())?;
    let y = read_tensor(&path).map_err(|e| e.to_string())?;
    ensure!(y.dims() == x.dims(), "dims changed");
    ensure!(x.data().iter().zip(y.data()).all(|(a, b)| a.to_bits() == b.to_bits()), "data changed");
    let mut bad = encode_tensor(&x).unwrap();
    bad[..4].copy_from_slice(b"NOPE");
    ensure!(decode_tensor(&bad).is_err(), "wrong magic accepted");

    let rows = vec![
        ResultRow {
            tensor: "hilbert-n20-d3".into(),
            method: "hoid".into(),
            selector: "randomized".into(),
            rank: 3,
            rel_error: 1.0 / 3.0,
            bound: 2e-7,
            max_error_constant: Some(3.5),
            wall_time_s: 0.125,
            seed: Some(42),
            abs_error: 0.1,
            repetition: 0,
            error: None,
        },
        ResultRow {
            tensor: "hilbert-n20-d3".into(),
            method: "hosvd".into(),
            selector: "none".into(),
            rank: 3,
            rel_error: 0.1,
            bound: 0.2,
            max_error_constant: None,
            wall_time_s: 0.5,
            seed: None,
            abs_error: 0.1,
            repetition: 0,
            error: None,
        },
    ];
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    ensure!(header == CSV_HEADER, "header {header:?}");
    ensure!(
        String::from_utf8_lossy(&buf).lines().next() == Some("tensor,method,selector,rank,rel_error,bound,max_error_constant,wall_time_s,seed"),
        "header line differs"
    );
    let records: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().unwrap();
    ensure!(records.len() == 2 && records.iter().all(|r| r.len() == 9), "record shape");
    ensure!(records[0][4].parse::<f64>().unwrap().to_bits() == (1.0f64 / 3.0).to_bits(), "float not round-tripped");
    ensure!(&records[1][6] == "" && &records[1][8] == "", "missing values not empty");

    regenerate_twice(&["--tensor", "hilbert", "--n", "7", "--d", "3"], dir.path(), "hilbert")?;
    regenerate_twice(&["--tensor", "sparse-cp", "--n", "20", "--seed", "99"], dir.path(), "sparse-cp")?;
    regenerate_twice(&["--tensor", "heat3", "--ns", "3", "--nr", "4", "--nt", "5"], dir.path(), "heat3")?;
    regenerate_twice(&["--tensor", "heat5", "--ns", "3", "--nr", "4", "--nt", "5"], dir.path(), "heat5")?;
    Ok("dten bit-exact, CSV schema exact, 4 generators reproduce across processes".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("exact-rank recovery", criterion_01),
        ("HOID bound from full-tensor spectra", criterion_02),
        ("conversion bound with measured truncation errors", criterion_03),
        ("sequentially truncated bound", criterion_04),
        ("matrix CUR bound", criterion_05),
        ("strong RRQR singular-value and entry bounds", criterion_06),
        ("selector error-constant bounds", criterion_07),
        ("interpolatory projector identities", criterion_08),
        ("symmetric-unfolding determinism", criterion_09),
        ("structure preservation on sparse CP", criterion_10),
        ("randomized HOID stability", criterion_11),
        ("method ordering against HOSVD", criterion_12),
        ("heat-kernel compressibility and reshape", criterion_13),
        ("order-2 HOID equals matrix CUR", criterion_14),
        ("I/O round-trips and regeneration", criterion_15),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
