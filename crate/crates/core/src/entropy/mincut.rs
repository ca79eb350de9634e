use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::QuantumState;

use super::vn::marginal_entropy;

const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinCut {
    pub value: f64,
    /// The minimizing helper set, sorted by label.
    pub cut: Vec<String>,
    /// Every helper set attaining the minimum within 1e-9, in tie-break order.
    pub ties: Vec<Vec<String>>,
}

/// `min_T S(A T)` over subsets `T` of the helpers, for a pure state on `A`, `B` and helpers.
/// Ties go to the smallest cut, then the lexicographically smallest sorted label list.
pub fn min_cut_entanglement<S: AsRef<str>>(psi: &QuantumState, a: &[S], b: &[S], helpers: &[S]) -> Result<MinCut> {
    psi.pure_vector()?;
    if helpers.len() > 12 {
        return Err(Error::Scale(format!("{} helpers exceed the 12-helper enumeration limit", helpers.len())));
    }
    if a.is_empty() {
        return Err(Error::Layout("empty A".into()));
    }
    let mut all: Vec<&str> = a.iter().chain(b).chain(helpers).map(|s| s.as_ref()).collect();
    psi.layout().positions(&all)?;
    all.clear();

    let h: Vec<String> = helpers.iter().map(|s| s.as_ref().to_string()).collect();
    let mut results: Vec<(f64, Vec<String>)> = Vec::with_capacity(1 << h.len());
    for mask in 0u32..(1 << h.len()) {
        let mut cut: Vec<String> = (0..h.len()).filter(|&i| mask >> i & 1 == 1).map(|i| h[i].clone()).collect();
        let mut keep: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
        keep.extend(cut.iter().cloned());
        let s = marginal_entropy(psi, &keep)?;
        cut.sort();
        results.push((s, cut));
    }
    let value = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let mut ties: Vec<Vec<String>> = results.into_iter().filter(|r| r.0 <= value + TIE_TOL).map(|r| r.1).collect();
    ties.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(MinCut { value, cut: ties[0].clone(), ties })
}
