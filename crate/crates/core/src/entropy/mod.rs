//! Entropic quantities: von Neumann, min-, collision and max-entropies, Lemma-C.1-style smoothing,
//! typical projectors and the min-cut entanglement.

mod bipartite;
mod conditional;
mod mincut;
mod minent;
mod smoothing;
mod typical;
mod vn;

use serde::{Deserialize, Serialize};

use crate::qstate::{bits, MatrixJson};

pub use bipartite::Bipartite;
pub use conditional::{
    h_max_conditional, h_min_conditional, h_min_conditional_on, solve_conditional, CondSolution, SolverOptions,
};
pub use mincut::{min_cut_entanglement, MinCut};
pub use minent::{
    h2_collision, h2_collision_on, h_min_relative, h_min_relative_on, hmin_feasibility_margin, lemma2_sides,
};
pub use smoothing::{smooth_h_max_oracle, smooth_h_max_truncation, Truncation};
pub use typical::{
    typicality, typicality_operator_inequality, typicality_operator_inequality_dense, TypicalityData,
    TYPICALITY_CAP_BITS,
};
pub use vn::{cond_von_neumann, fannes_bound, fannes_eta, h_max, h_max_of_spectrum, marginal_entropy, von_neumann};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Quantity {
    VonNeumann,
    #[serde(rename = "condVN")]
    CondVN,
    HMinRel,
    HMinCond,
    H2Rel,
    HMax,
    HMaxCond,
    SmoothHMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    ClosedForm,
    Converged,
    CertificateGap(f64),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<f64>,
    /// Certified bound (bits) on the distance between the reported and optimal values.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gap_bits: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub quantity: Quantity,
    #[serde(with = "bits")]
    pub value: f64,
    /// Human-readable description of the systems, e.g. `"C1 C2|R"`.
    #[serde(default)]
    pub systems: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub status: SolverStatus,
}

impl EntropyReport {
    pub fn closed(quantity: Quantity, value: f64, systems: String) -> Self {
        EntropyReport { quantity, value, systems, witness: None, status: SolverStatus::ClosedForm }
    }

    /// Certified gap in bits (zero for closed forms).
    pub fn gap(&self) -> f64 {
        match self.status {
            SolverStatus::CertificateGap(g) => g,
            _ => self.witness.as_ref().and_then(|w| w.gap_bits).unwrap_or(0.0),
        }
    }
}

pub(crate) fn systems_label<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> String {
    let j = |v: Vec<&str>| v.join(" ");
    let left = j(a.iter().map(|s| s.as_ref()).collect());
    if b.is_empty() {
        left
    } else {
        format!("{left}|{}", j(b.iter().map(|s| s.as_ref()).collect()))
    }
}
