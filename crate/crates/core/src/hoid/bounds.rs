//! Error-bound arithmetic for the HOID pipelines.
//!
//! Everything here is a pure function of spectra, ranks, dimensions and the
//! strong-RRQR parameter `f`. Bounds are on the squared Frobenius error.

/// `∏_{k≠n} I_k`, the column count of the mode-`n` unfolding.
pub fn complement_size(dims: &[usize], n: usize) -> usize {
    dims.iter().enumerate().filter(|&(k, _)| k != n).map(|(_, &i)| i).product()
}

/// `q_n = 1 + f² r_n (∏_{k≠n} I_k − r_n)`.
pub fn q_factor(dims: &[usize], n: usize, rank: usize, f: f64) -> f64 {
    let cols = complement_size(dims, n) as f64;
    let r = rank as f64;
    1.0 + f * f * r * (cols - r)
}

pub fn q_factors(dims: &[usize], ranks: &[usize], f: f64) -> Vec<f64> {
    ranks.iter().enumerate().map(|(n, &r)| q_factor(dims, n, r, f)).collect()
}

/// Corollary form for matrices: `q(m, n; r) = 2 + f² r (m + n − 2r)`.
pub fn cur_q(m: usize, n: usize, r: usize, f: f64) -> f64 {
    let r = r as f64;
    2.0 + f * f * r * (m as f64 + n as f64 - 2.0 * r)
}

/// `Σ_{k>r} σ_k²` for a nonincreasing spectrum.
pub fn spectrum_tail(s: &[f64], r: usize) -> f64 {
    s.iter().skip(r).map(|v| v * v).sum()
}

/// Plain HOSVD bound `Σ_n Σ_{k>r_n} σ_k²(X_(n))`.
pub fn hosvd_bound(spectra: &[Vec<f64>], ranks: &[usize]) -> f64 {
    spectra.iter().zip(ranks).map(|(s, &r)| spectrum_tail(s, r)).sum()
}

/// HOID from the full tensor: `Σ_n q_n Σ_{k>r_n} σ_k²(X_(n))`.
pub fn thm1_bound(q: &[f64], spectra: &[Vec<f64>], ranks: &[usize]) -> f64 {
    q.iter().zip(spectra).zip(ranks).map(|((q, s), &r)| q * spectrum_tail(s, r)).sum()
}

/// Rapid-decay simplification: `Σ_n q_n σ_{r_n+1}²`.
pub fn thm1_fast_decay(q: &[f64], spectra: &[Vec<f64>], ranks: &[usize]) -> f64 {
    q.iter()
        .zip(spectra)
        .zip(ranks)
        .map(|((q, s), &r)| q * s.get(r).map_or(0.0, |v| v * v))
        .sum()
}

/// Slow-decay simplification: `Σ_n q_n (min(I_n, ∏_{k≠n} I_k) − r_n) σ_{r_n+1}²`.
pub fn thm1_slow_decay(q: &[f64], spectra: &[Vec<f64>], ranks: &[usize], dims: &[usize]) -> f64 {
    (0..q.len())
        .map(|n| {
            let width = dims[n].min(complement_size(dims, n)).saturating_sub(ranks[n]) as f64;
            q[n] * width * spectra[n].get(ranks[n]).map_or(0.0, |v| v * v)
        })
        .sum()
}

/// Conversion from an approximate factorization: `Σ_n q_n ε_n²`.
pub fn thm2_bound(q: &[f64], eps: &[f64]) -> f64 {
    q.iter().zip(eps).map(|(q, e)| q * e * e).sum()
}

/// Sequentially truncated bound from the norms `‖X⁽⁰⁾‖, …, ‖X⁽ᵈ⁾‖` of the
/// partially projected tensors: `Σ_n q_n Σ_{k≤n} (‖X⁽ᵏ⁻¹⁾‖² − ‖X⁽ᵏ⁾‖²)`.
///
/// Negative increments (rounding) are clamped at zero; the second value is the
/// number of clamped terms.
pub fn thm3_bound(q: &[f64], norms: &[f64]) -> (f64, usize) {
    assert_eq!(norms.len(), q.len() + 1, "need d+1 norms for d modes");
    let mut clamped = 0;
    let mut acc = 0.0;
    let mut total = 0.0;
    for (n, qn) in q.iter().enumerate() {
        let inc = norms[n] * norms[n] - norms[n + 1] * norms[n + 1];
        if inc < 0.0 {
            clamped += 1;
        } else {
            acc += inc;
        }
        total += qn * acc;
    }
    (total, clamped)
}

/// Same bound from the residuals `‖X − X⁽ⁿ⁾‖_F`, which equal the telescoped
/// sums by orthogonality and avoid cancellation for small errors.
pub fn thm3_bound_from_residuals(q: &[f64], residuals: &[f64]) -> f64 {
    thm2_bound(q, residuals)
}

/// Per-mode truncation tolerances `ε_n = √(ε² / (d q_n))` that make the
/// conversion bound equal `ε²`.
pub fn per_mode_tolerances(eps: f64, q: &[f64]) -> Vec<f64> {
    let d = q.len() as f64;
    q.iter().map(|qn| (eps * eps / (d * qn)).sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(q_factors(&[4, 4, 4], &[2, 2, 2], 1.0), vec![29.0; 3]);
        assert_eq!(cur_q(2, 2, 1, 1.0), 4.0);
        let tol = per_mode_tolerances(0.3, &[29.0, 29.0, 29.0]);
        assert!(tol.iter().all(|&t| (t - (0.09f64 / 87.0).sqrt()).abs() < 1e-16));
        assert!((thm2_bound(&[29.0; 3], &tol) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn cur_q_is_two_mode_sum() {
        for (m, n, r, f) in [(20, 15, 4, 1.0), (7, 9, 3, 2.0)] {
            let q = q_factors(&[m, n], &[r, r], f);
            assert!((q[0] + q[1] - cur_q(m, n, r, f)).abs() < 1e-12);
        }
    }

    #[test]
    fn tails_and_decay_forms() {
        let s = vec![3.0, 2.0, 1.0, 0.5];
        assert_eq!(spectrum_tail(&s, 2), 1.25);
        let spectra = vec![s.clone()];
        assert_eq!(thm1_bound(&[2.0], &spectra, &[2]), 2.5);
        assert_eq!(thm1_fast_decay(&[2.0], &spectra, &[2]), 2.0);
        assert_eq!(thm1_slow_decay(&[2.0], &spectra, &[2], &[4, 4]), 4.0);
        assert!(thm1_fast_decay(&[2.0], &spectra, &[2]) <= thm1_bound(&[2.0], &spectra, &[2]));
        assert!(thm1_bound(&[2.0], &spectra, &[2]) <= thm1_slow_decay(&[2.0], &spectra, &[2], &[4, 4]));
    }

    #[test]
    fn thm3_telescopes() {
        let norms = [5.0, 4.0, 3.0f64];
        let (b, clamped) = thm3_bound(&[1.0, 2.0], &norms);
        assert_eq!(clamped, 0);
        assert_eq!(b, 9.0 + 2.0 * 16.0);
        let (b, clamped) = thm3_bound(&[1.0, 1.0], &[1.0, 1.0 + 1e-12, 1.0]);
        assert_eq!(clamped, 1);
        assert!(b >= 0.0);
    }
}
