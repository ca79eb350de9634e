//! Random-measurement merging and split-transfer: instruments, outcome ensembles, quantum
//! errors, decoupling bounds, end-to-end simulation and one-shot entanglement costs.

mod bounds;
mod cost;
mod instrument;
mod sim;
mod split;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{QuantumState, Role};

pub use bounds::{
    coefficients, conjecture_probe, cut_purities, delta_bound, expected_purity, expected_remainder_mass,
    lemma3_residual, lemma3_residual_and_bound, lemma3_rhs, lemma4_bound, lemma4_collision_bound, CutTerm, DeltaBound,
    ProbeRecord,
};
pub use cost::{
    prop8_split_costs, sequential_costs, solve_integral_costs, theorem4_cost, Constraint, CostAssignment, SenderCost,
};
pub use instrument::{
    apply_instruments, attach_entanglement, build_instrument, Instrument, Outcome, OutcomeEnsemble, P_DROP,
};
pub use sim::{quantum_error, run_merging, run_merging_with_cost, SimulationReport, MAX_SIM_DIM};
pub use split::{split_transfer_sim, SplitReport, SplitSetup};

/// Which receiver a sender's share is moved to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::A => "a",
            Side::B => "b",
        }
    }
}

/// Sender's half `C⁰_i` of the pre-shared entanglement.
pub fn sender_ancilla(sender: &str) -> String {
    format!("{sender}.c0")
}

/// Receiver's half (`B⁰_i` or `A⁰_i`) of the pre-shared entanglement.
pub fn receiver_ancilla(sender: &str, side: Side) -> String {
    format!("{sender}.{}0", side.tag())
}

/// Measurement output `C¹_i`.
pub fn output_label(sender: &str) -> String {
    format!("{sender}.c1")
}

/// Receiver's half (`B¹_i` or `A¹_i`) of the entanglement produced by the protocol.
pub fn receiver_output(sender: &str, side: Side) -> String {
    format!("{sender}.{}1", side.tag())
}

/// The receiver-held system (`B_i` or `A_i`) that replaces `C_i` after merging.
pub fn substitute_label(sender: &str, side: Side) -> String {
    format!("{sender}.{}", side.tag())
}

/// Who holds what in a merging task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeSetup {
    pub senders: Vec<String>,
    pub receiver: Vec<String>,
    pub reference: Vec<String>,
}

impl MergeSetup {
    pub fn new<S: AsRef<str>>(senders: &[S], receiver: &[S], reference: &[S]) -> Self {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect();
        MergeSetup { senders: own(senders), receiver: own(receiver), reference: own(reference) }
    }

    /// Read the parties from the layout roles (senders, `receiverB`, reference).
    pub fn from_roles(psi: &QuantumState) -> Result<Self> {
        let l = psi.layout();
        let setup = MergeSetup {
            senders: l.labels_with_role(Role::Sender),
            receiver: l.labels_with_role(Role::ReceiverB),
            reference: l.labels_with_role(Role::Reference),
        };
        setup.check(psi)?;
        Ok(setup)
    }

    pub fn m(&self) -> usize {
        self.senders.len()
    }

    /// Every label of `psi` must belong to exactly one party, and there must be a sender.
    pub fn check(&self, psi: &QuantumState) -> Result<()> {
        if self.senders.is_empty() {
            return Err(Error::Input("no senders".into()));
        }
        if self.senders.len() > 12 {
            return Err(Error::Scale(format!("{} senders exceed the 12-sender limit", self.senders.len())));
        }
        let mut all = self.senders.clone();
        all.extend(self.receiver.iter().cloned());
        all.extend(self.reference.iter().cloned());
        psi.layout().positions(&all)?;
        if all.len() != psi.layout().len() {
            return Err(Error::Layout("every subsystem must be a sender, receiver or reference".into()));
        }
        Ok(())
    }

    pub fn sender_dims(&self, psi: &QuantumState) -> Result<Vec<usize>> {
        self.senders.iter().map(|s| Ok(psi.layout().subsystem(s)?.dim)).collect()
    }

    /// Labels of the senders whose bit is set in `mask`.
    pub fn subset(&self, mask: u32) -> Vec<String> {
        subset_labels(&self.senders, mask)
    }
}

pub(crate) fn subset_labels(labels: &[String], mask: u32) -> Vec<String> {
    (0..labels.len()).filter(|&i| mask >> i & 1 == 1).map(|i| labels[i].clone()).collect()
}

/// Indices of the bits set in `mask`.
pub fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}
