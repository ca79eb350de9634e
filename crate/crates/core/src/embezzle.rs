//! The harmonic-spectrum family `|ψ⟩ = H_d^{-1/2} Σ_j j^{-1/2} |j⟩|ψ_j⟩|j⟩` on `C₁ C₂ R`, its
//! closed-form entropies and the comparison of joint and one-at-a-time merging costs.
//!
//! Every quantity here is computed from the `d × d` Gram matrix of the `ψ_j` or from the
//! harmonic spectrum, so large `d` never requires the `d²(d+1)`-dimensional state vector.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::entropy::{h_max_of_spectrum, smooth_h_max_truncation};
use crate::error::{Error, Result};
use crate::linalg::{re, CVec};
use crate::qstate::{QuantumState, Role, Subsystem, SystemLayout};

/// Largest state vector [`build_embezzling`] will allocate.
pub const MAX_EMBEZZLE_DIM: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `ψ_j = |j⟩` on a `d`-dimensional `C₂`.
    Orthonormal,
    /// `ψ_j = √(1−α)|j⟩ + √α|0⟩` on a `(d+1)`-dimensional `C₂`, so `⟨ψ_i|ψ_j⟩ = α` for `i ≠ j`.
    CommonTilt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbezzleParams {
    pub d: usize,
    pub alpha: f64,
    pub family: Family,
    pub epsilon: f64,
    /// Smoothing parameter of the max-entropy estimate.
    pub delta: f64,
}

impl EmbezzleParams {
    /// Parameters with the smoothing parameter `δ = ε²/256`.
    pub fn new(d: usize, alpha: f64, family: Family, epsilon: f64) -> Result<Self> {
        let p = EmbezzleParams { d, alpha, family, epsilon, delta: epsilon * epsilon / 256.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Input("d must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Input(format!("overlap {} outside [0, 1]", self.alpha)));
        }
        if self.family == Family::Orthonormal && self.alpha != 0.0 {
            return Err(Error::Input("the orthonormal family has zero overlap".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Input(format!("error parameter {} outside (0, 1)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Input(format!("smoothing parameter {} outside (0, 1)", self.delta)));
        }
        Ok(())
    }

    pub fn c2_dim(&self) -> usize {
        match self.family {
            Family::Orthonormal => self.d,
            Family::CommonTilt => self.d + 1,
        }
    }
}

/// `H_d = Σ_{j≤d} 1/j`, summed from the small terms up.
pub fn harmonic(d: usize) -> f64 {
    (1..=d).rev().map(|j| 1.0 / j as f64).sum()
}

/// Schmidt spectrum `1/(j H_d)` of `C₁` against the rest, descending.
pub fn embezzling_spectrum(d: usize) -> Vec<f64> {
    let h = harmonic(d);
    (1..=d).map(|j| 1.0 / (j as f64 * h)).collect()
}

/// `2 log Σ_j (j H_d)^{-1/2}`.
pub fn hmax_formula(d: usize) -> f64 {
    let h = harmonic(d);
    2.0 * (1..=d).map(|j| (j as f64 * h).powf(-0.5)).sum::<f64>().log2()
}

/// Columns are the vectors `ψ_1, …, ψ_d` in `C₂`.
fn family_vectors(p: &EmbezzleParams) -> DMatrix<f64> {
    let d = p.d;
    match p.family {
        Family::Orthonormal => DMatrix::identity(d, d),
        Family::CommonTilt => {
            let (a, b) = ((1.0 - p.alpha).sqrt(), p.alpha.sqrt());
            DMatrix::from_fn(d + 1, d, |i, j| {
                if i == 0 {
                    b
                } else if i == j + 1 {
                    a
                } else {
                    0.0
                }
            })
        }
    }
}

/// `G_{ij} = ⟨ψ_i|ψ_j⟩`.
pub fn gram(p: &EmbezzleParams) -> DMatrix<f64> {
    let v = family_vectors(p);
    v.transpose() * v
}

pub fn build_embezzling(p: &EmbezzleParams) -> Result<QuantumState> {
    p.validate()?;
    let (d, d2) = (p.d, p.c2_dim());
    let total = d.saturating_mul(d2).saturating_mul(d);
    if total > MAX_EMBEZZLE_DIM {
        return Err(Error::Scale(format!("state dimension {total} exceeds {MAX_EMBEZZLE_DIM}")));
    }
    let layout = SystemLayout::new(vec![
        Subsystem::new("C1", d, Role::Sender),
        Subsystem::new("C2", d2, Role::Sender),
        Subsystem::new("R", d, Role::Reference),
    ])?;
    let v = family_vectors(p);
    let h = harmonic(d);
    let mut psi = CVec::zeros(total);
    for j in 0..d {
        let w = 1.0 / ((j + 1) as f64 * h).sqrt();
        for c in 0..d2 {
            psi[(j * d2 + c) * d + j] = re(w * v[(c, j)]);
        }
    }
    QuantumState::pure(layout, psi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GershgorinRecord {
    /// `2αd + 1`.
    pub lambda_bound: f64,
    /// `log(2αd + 1)`.
    pub hmin_upper: f64,
    /// `−H_min(ψ^{C₁R}|ψ^R) = log λ_max(G)`.
    pub hmin_exact: f64,
    /// Smallest eigenvalue of `λ_bound (I ⊗ ψ^R) − ψ^{C₁R}` (it is diagonal off the `|jj⟩` block).
    pub eigencheck_min: f64,
    /// `log(αd) + 2`, meaningful when `αd ≥ 1`.
    pub loose_upper: Option<f64>,
    /// Sufficient `E₁ ≥ log(αd) + 4 log(1/ε) + 14`.
    pub e1_sufficient: Option<f64>,
    /// Exact `E₁` constraint `−H_min(ψ^{C₁R}|ψ^R) + 4 log(1/ε) + 12`.
    pub e1_exact: f64,
}

/// Compare the exact `−H_min(ψ^{C₁R}|ψ^R)` with the diagonal-dominance bound.
///
/// On the span of `|jj⟩` the conjugated operator `(I⊗ψ^R)^{-1/2} ψ^{C₁R} (I⊗ψ^R)^{-1/2}` is the
/// Gram matrix of the family, and it vanishes elsewhere.
pub fn gershgorin_bound(p: &EmbezzleParams) -> Result<GershgorinRecord> {
    p.validate()?;
    let d = p.d as f64;
    let g = gram(p);
    let lambda_exact = g.clone().symmetric_eigen().eigenvalues.max();
    let lambda_bound = 2.0 * p.alpha * d + 1.0;
    // λ(I⊗σ) − ρ on the |jj⟩ block equals H_d^{-1} D (λ I − G) D with D = diag(j^{-1/2}).
    let h = harmonic(p.d);
    let dd = DMatrix::from_fn(p.d, p.d, |i, j| if i == j { ((i + 1) as f64).powf(-0.5) } else { 0.0 });
    let block = &dd * (DMatrix::identity(p.d, p.d) * lambda_bound - &g) * &dd / h;
    let off_min = lambda_bound / (d * h);
    let eigencheck_min = block.symmetric_eigen().eigenvalues.min().min(if p.d > 1 { off_min } else { f64::INFINITY });
    let ad = p.alpha * d;
    let log_eps = (1.0 / p.epsilon).log2();
    Ok(GershgorinRecord {
        lambda_bound,
        hmin_upper: lambda_bound.log2(),
        hmin_exact: lambda_exact.log2(),
        eigencheck_min,
        loose_upper: (ad >= 1.0).then(|| ad.log2() + 2.0),
        e1_sufficient: (p.alpha > 0.0).then(|| ad.log2() + 4.0 * log_eps + 14.0),
        e1_exact: lambda_exact.log2() + 4.0 * log_eps + 12.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingletRecord {
    /// `(d H_d)^{-1} (Σ_j j^{-1/2})²`, the overlap reached by aligning Schmidt bases.
    pub aligned_overlap: f64,
    /// `5 / log d`.
    pub lower_5_over_logd: f64,
    pub overlap_claim_holds: bool,
    /// `log(d · aligned_overlap)`, a lower bound on `−H_min(ψ^{C₁C₂R}|RC₂)`.
    pub hmin_lower_aligned: f64,
    /// `log d − log log d + 2`.
    pub hmin_lower_form: f64,
    /// `H_max(ψ^{C₁})`, equal to `−H_min(ψ^{C₁C₂R}|RC₂)` by duality.
    pub hmax: f64,
}

pub fn singlet_fraction(d: usize) -> Result<SingletRecord> {
    if d < 2 {
        return Err(Error::Input("the singlet-fraction estimate needs d ≥ 2".into()));
    }
    let df = d as f64;
    let s: f64 = (1..=d).map(|j| (j as f64).powf(-0.5)).sum();
    let aligned = s * s / (df * harmonic(d));
    let lower = 5.0 / df.log2();
    Ok(SingletRecord {
        aligned_overlap: aligned,
        lower_5_over_logd: lower,
        overlap_claim_holds: aligned >= lower,
        hmin_lower_aligned: (df * aligned).log2(),
        hmin_lower_form: df.log2() - df.log2().log2() + 2.0,
        hmax: hmax_formula(d),
    })
}

/// Smallest `d₀ ≤ d_max` such that `aligned ≥ 5/log d` for every `d` in `d₀..=d_max`.
pub fn singlet_threshold(d_max: usize) -> Option<usize> {
    let mut first = None;
    for d in (2..=d_max).rev() {
        let r = singlet_fraction(d).ok()?;
        if r.overlap_claim_holds {
            first = Some(d);
        } else {
            break;
        }
    }
    first
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRecord {
    /// `(d+1)^{1−δ²/2} / e`.
    pub k_threshold: f64,
    /// Largest integer `k ≤ k_threshold` (at least 1).
    pub k: usize,
    /// `2 log Σ_{j<k} (j H_d)^{-1/2}`.
    pub bound_bits: f64,
    /// `log k − log log d + log 5`.
    pub form_bits: f64,
    /// Truncation bound of the smoothing lemma on the same spectrum, with its index.
    pub truncation_bits: f64,
    pub truncation_k: usize,
    /// No `k ≤ k_threshold` satisfies the tail condition, so `bound_bits ≤ truncation_bits`.
    pub threshold_consistent: bool,
    /// `ε⁴ log(d+1) / 512`.
    pub savings_bits: f64,
    pub hmax: f64,
}

pub fn smoothing_estimate(p: &EmbezzleParams) -> Result<SmoothingRecord> {
    p.validate()?;
    let d = p.d;
    let df = d as f64;
    let k_threshold = (df + 1.0).powf(1.0 - p.delta * p.delta / 2.0) / std::f64::consts::E;
    let k = (k_threshold.floor() as usize).clamp(1, d);
    let h = harmonic(d);
    let prefix: f64 = (1..k).map(|j| (j as f64 * h).powf(-0.5)).sum();
    let spectrum = embezzling_spectrum(d);
    let tr = smooth_h_max_truncation(&spectrum, p.delta)?;
    Ok(SmoothingRecord {
        k_threshold,
        k,
        bound_bits: 2.0 * prefix.log2(),
        form_bits: (k as f64).log2() - df.log2().log2() + 5f64.log2(),
        truncation_bits: tr.lower_bound_bits,
        truncation_k: tr.k,
        threshold_consistent: tr.k > k,
        savings_bits: p.epsilon.powi(4) * (df + 1.0).log2() / 512.0,
        hmax: h_max_of_spectrum(&spectrum),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub d: usize,
    pub alpha: f64,
    pub eps: f64,
    /// `log(αd) + 4 log(1/ε) + 14` (absent for `α = 0`).
    pub thm4_e1: Option<f64>,
    /// `4 log(1/ε) + 12`.
    pub thm4_e2: f64,
    /// `log d + 4 log(1/ε) + 12`.
    pub thm4_sum: f64,
    /// `log d − log log d + 26 + 8 log(2/ε)`, the unsmoothed one-at-a-time sum bound.
    pub prop5_lower: f64,
    /// `(1 − ε⁴/512) log(d+1) − log log d + 24 + 8 log(2/ε)`, with smoothing.
    pub prop5_lower_smoothed: f64,
    pub difference: f64,
    pub thm4_below: bool,
}

pub fn cost_comparison(p: &EmbezzleParams) -> Result<CostTable> {
    p.validate()?;
    if p.d < 2 {
        return Err(Error::Input("the cost comparison needs d ≥ 2".into()));
    }
    let df = p.d as f64;
    let (ld, lld) = (df.log2(), df.log2().log2());
    let le = (1.0 / p.epsilon).log2();
    let l2e = (2.0 / p.epsilon).log2();
    let thm4_sum = ld + 4.0 * le + 12.0;
    let prop5_lower = ld - lld + 26.0 + 8.0 * l2e;
    Ok(CostTable {
        d: p.d,
        alpha: p.alpha,
        eps: p.epsilon,
        thm4_e1: (p.alpha > 0.0).then(|| (p.alpha * df).log2() + 4.0 * le + 14.0),
        thm4_e2: 4.0 * le + 12.0,
        thm4_sum,
        prop5_lower,
        prop5_lower_smoothed: (1.0 - p.epsilon.powi(4) / 512.0) * (df + 1.0).log2() - lld + 24.0 + 8.0 * l2e,
        difference: prop5_lower - thm4_sum,
        thm4_below: thm4_sum < prop5_lower,
    })
}
