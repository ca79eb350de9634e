use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::bits;

/// Lower bound on the smooth max-entropy from truncating a sorted spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(with = "bits")]
    pub lower_bound_bits: f64,
    /// One-based truncation index: entries `1..k-1` are kept, the tail after `k` is dropped.
    pub k: usize,
}

fn check_spectrum(spectrum: &[f64], eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Input(format!("smoothing parameter {eps} outside (0,1)")));
    }
    if spectrum.iter().any(|&r| r < -1e-12 || !r.is_finite()) {
        return Err(Error::Input("spectrum has negative or non-finite entries".into()));
    }
    let total: f64 = spectrum.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::Normalization(format!("spectrum sums to {total}")));
    }
    let mut r: Vec<f64> = spectrum.iter().map(|&x| x.max(0.0)).collect();
    r.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(r)
}

/// `tails[k] = Σ_{j>k} r_j` for one-based `k ∈ 0..=d`.
fn tails(r: &[f64]) -> Vec<f64> {
    let d = r.len();
    let mut t = vec![0.0; d + 1];
    for k in (0..d).rev() {
        t[k] = t[k + 1] + r[k];
    }
    t
}

/// `2 log Σ √r_j` for a descending list, factored as `log r_1 + 2 log Σ √(r_j/r_1)` so a single
/// surviving entry gives `log r_1` without a round trip through the square root.
pub(crate) fn two_log_sqrt_sum(r: &[f64]) -> f64 {
    let top = r.iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let s: f64 = r.iter().map(|&x| (x / top).sqrt()).sum();
    top.log2() + 2.0 * s.log2()
}

/// `2 log min { Σ_{j<k} √r_j : Σ_{j>k} r_j ≤ ε²/2 }`.
///
/// The sum is empty at `k = 1`, giving `−∞`, whenever the first eigenvalue alone carries all but
/// `ε²/2` of the weight.
pub fn smooth_h_max_truncation(spectrum: &[f64], eps: f64) -> Result<Truncation> {
    let r = check_spectrum(spectrum, eps)?;
    if r.is_empty() {
        return Err(Error::Input("empty spectrum".into()));
    }
    let delta = eps * eps / 2.0;
    let t = tails(&r);
    // The prefix sum grows with k, so the smallest admissible k is the minimizer.
    let k = (1..=r.len()).find(|&k| t[k] <= delta).unwrap_or(r.len());
    Ok(Truncation { lower_bound_bits: two_log_sqrt_sum(&r[..k - 1]), k })
}

/// Exact minimum of `2 log Σ √r̄_j` over vectors `r̄ = (r_1, …, r_{j₀−1}, x, 0, …)` with
/// `x ∈ [0, r_{j₀}]` and `‖r − r̄‖₁ ≤ ε²/2`.
pub fn smooth_h_max_oracle(spectrum: &[f64], eps: f64) -> Result<f64> {
    let r = check_spectrum(spectrum, eps)?;
    if r.len() > 64 {
        return Err(Error::Scale(format!("oracle accepts at most 64 eigenvalues, got {}", r.len())));
    }
    let delta = eps * eps / 2.0;
    let t = tails(&r);
    let mut best = f64::INFINITY;
    for j0 in 1..=r.len() {
        if t[j0] <= delta {
            // Spend the remaining budget on shrinking entry j₀.
            let mut kept = r[..j0].to_vec();
            kept[j0 - 1] = (r[j0 - 1] - (delta - t[j0])).max(0.0);
            best = best.min(two_log_sqrt_sum(&kept));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_example() {
        let tr = smooth_h_max_truncation(&[0.5, 0.25, 0.25], 0.5f64.sqrt()).unwrap();
        assert_eq!(tr.k, 2);
        assert_eq!(tr.lower_bound_bits, -1.0);
        let o = smooth_h_max_oracle(&[0.5, 0.25, 0.25], 0.5f64.sqrt()).unwrap();
        // The whole budget goes to dropping one quarter, leaving r̄ = (1/2, 1/4, 0).
        assert!((o - 2.0 * (0.5f64.sqrt() + 0.5).log2()).abs() < 1e-12);
        assert!(tr.lower_bound_bits <= o);
    }

    #[test]
    fn pure_spectrum() {
        let tr = smooth_h_max_truncation(&[1.0], 0.1).unwrap();
        assert_eq!(tr.k, 1);
        assert_eq!(tr.lower_bound_bits, f64::NEG_INFINITY);
        let o = smooth_h_max_oracle(&[1.0], 0.1).unwrap();
        assert!((o - (1.0f64 - 0.005).log2()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(smooth_h_max_truncation(&[0.5], 0.0).is_err());
        assert!(smooth_h_max_truncation(&[0.9, 0.9], 0.1).is_err());
    }
}
