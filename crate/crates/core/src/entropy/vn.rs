use crate::error::{Error, Result};
use crate::linalg::{clamp_eig, spectrum_entropy, Eigh};
use crate::qstate::{QuantumState, StateData};

fn spectrum(state: &QuantumState) -> Vec<f64> {
    match state.data() {
        StateData::Vector(v) => vec![v.norm_squared()],
        StateData::Density(m) => Eigh::new(m).values,
    }
}

pub fn von_neumann(state: &QuantumState) -> f64 {
    spectrum_entropy(&spectrum(state))
}

/// `S` of the reduced state on `labels`; the empty set has entropy 0.
pub fn marginal_entropy<S: AsRef<str>>(state: &QuantumState, labels: &[S]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(spectrum_entropy(&state.marginal_spectrum(labels)?))
}

/// `S(A|B) = S(AB) − S(B)`.
pub fn cond_von_neumann<S: AsRef<str>, T: AsRef<str>>(state: &QuantumState, part: &[S], cond: &[T]) -> Result<f64> {
    if part.is_empty() {
        return Err(Error::Layout("conditional entropy needs a nonempty part".into()));
    }
    let mut joint: Vec<String> = part.iter().map(|s| s.as_ref().to_string()).collect();
    for c in cond {
        if joint.iter().any(|j| j == c.as_ref()) {
            return Err(Error::Layout(format!("label {} in both part and condition", c.as_ref())));
        }
        joint.push(c.as_ref().to_string());
    }
    Ok(marginal_entropy(state, &joint)? - marginal_entropy(state, cond)?)
}

/// `2 log Σ √r_j`. Eigenvalues below 1e-13 of the largest are treated as rounding noise, since
/// their square roots would otherwise inflate the sum by ~1e-8 each.
pub fn h_max_of_spectrum(spectrum: &[f64]) -> f64 {
    let top = spectrum.iter().cloned().fold(0.0, f64::max);
    let kept: Vec<f64> = spectrum.iter().map(|&v| clamp_eig(v)).filter(|&v| v > 1e-13 * top).collect();
    super::smoothing::two_log_sqrt_sum(&kept)
}

pub fn h_max(state: &QuantumState) -> f64 {
    h_max_of_spectrum(&spectrum(state))
}

/// `η(x) = x − x log x` for `x ≤ 1/e` and `x + (log e)/e` above the breakpoint.
pub fn fannes_eta(x: f64) -> f64 {
    let e = std::f64::consts::E;
    if x <= 0.0 {
        0.0
    } else if x <= 1.0 / e {
        x - x * x.log2()
    } else {
        x + std::f64::consts::LOG2_E / e
    }
}

/// Right-hand side `η(‖ρ − σ‖₁) · log d` of the Fannes inequality.
pub fn fannes_bound(trace_norm_diff: f64, dim: usize) -> f64 {
    fannes_eta(trace_norm_diff) * (dim as f64).log2()
}
