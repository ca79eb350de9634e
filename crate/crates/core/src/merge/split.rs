use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{mixture_vs_pure_trace_norm, QuantumState};

use super::bounds::{cut_purities, delta_bound};
use super::instrument::{apply_instruments, attach_entanglement};
use super::sim::{build_all, check_scale, decode_all, merged_target, quantum_error};
use super::{output_label, receiver_ancilla, substitute_label, Side};

/// Helpers split into `T` (moved to A) and `T̄` (moved to B).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSetup {
    pub t: Vec<String>,
    pub tbar: Vec<String>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub reference: Vec<String>,
}

impl SplitSetup {
    pub fn check(&self, psi: &QuantumState) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::Input("split-transfer needs both receivers".into()));
        }
        if self.t.iter().any(|x| self.tbar.contains(x)) {
            return Err(Error::Input("partition sides overlap".into()));
        }
        let mut all = self.t.clone();
        for v in [&self.tbar, &self.a, &self.b, &self.reference] {
            all.extend(v.iter().cloned());
        }
        psi.layout().positions(&all)?;
        if all.len() != psi.layout().len() {
            return Err(Error::Layout("every subsystem must be a helper, receiver or reference".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub seed: u64,
    pub q1: f64,
    pub q2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub end_error: f64,
    /// `2√Q¹ + 2√Q²`.
    pub bound: f64,
    pub bound_holds: bool,
}

fn concat(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// Simulate a split-transfer: helpers in `T` measure with `(K, L)` and are decoded by A, helpers
/// in `T̄` measure with `(M, N)` and are decoded by B. Decoders are the Uhlmann isometries of the
/// two single-side problems; the reported end error is for the joint protocol.
pub fn split_transfer_sim(
    psi: &QuantumState,
    setup: &SplitSetup,
    (k, l): (&[usize], &[usize]),
    (mm, nn): (&[usize], &[usize]),
    seed: u64,
) -> Result<SplitReport> {
    psi.pure_vector()?;
    setup.check(psi)?;
    if k.len() != setup.t.len()
        || l.len() != setup.t.len()
        || mm.len() != setup.tbar.len()
        || nn.len() != setup.tbar.len()
    {
        return Err(Error::Input("cost vectors must match the partition sizes".into()));
    }
    let sq = |v: &[usize]| {
        let p = v.iter().fold(1usize, |a, &x| a.saturating_mul(x));
        p.saturating_mul(p)
    };
    check_scale("input with entanglement", psi.dim().saturating_mul(sq(k)).saturating_mul(sq(mm)))?;
    check_scale("split target", psi.dim().saturating_mul(sq(l)).saturating_mul(sq(nn)))?;

    // Side 1: T measures on ψ ⊗ Φ^K; A decodes against Φ^L ⊗ ψ(T → A_T).
    let s1 = attach_entanglement(psi, &setup.t, k, Side::A)?;
    let ins_t = build_all(s1.layout(), &setup.t, k, l, seed, 0)?;
    let ens1 = apply_instruments(&s1, &ins_t)?;
    let c1_t: Vec<String> = setup.t.iter().map(|s| output_label(s)).collect();
    let ref1 = concat(&[&setup.tbar, &setup.b, &setup.reference]);
    let q1 = quantum_error(&ens1, &c1_t, &ref1)?;
    let target1 = merged_target(psi, &setup.t, l, Side::A)?;
    let mut mov1: Vec<String> = setup.t.iter().map(|s| receiver_ancilla(s, Side::A)).collect();
    mov1.extend(setup.a.iter().cloned());
    let (_, dec_a) = decode_all(&ens1, &target1, &mov1)?;

    // Side 2: T̄ measures on ψ(T → A_T) ⊗ Γ^M; B decodes against Γ^N ⊗ ψ(T → A_T, T̄ → B_T̄).
    let pairs: Vec<(String, String)> = setup.t.iter().map(|s| (s.clone(), substitute_label(s, Side::A))).collect();
    let psi_at = psi.relabel_many(&pairs)?;
    let a_t: Vec<String> = setup.t.iter().map(|s| substitute_label(s, Side::A)).collect();
    let s2 = attach_entanglement(&psi_at, &setup.tbar, mm, Side::B)?;
    let ins_tbar = build_all(s2.layout(), &setup.tbar, mm, nn, seed, setup.t.len() as u64)?;
    let ens2 = apply_instruments(&s2, &ins_tbar)?;
    let c1_tbar: Vec<String> = setup.tbar.iter().map(|s| output_label(s)).collect();
    let ref2 = concat(&[&a_t, &setup.a, &setup.reference]);
    let q2 = quantum_error(&ens2, &c1_tbar, &ref2)?;
    let target2 = merged_target(&psi_at, &setup.tbar, nn, Side::B)?;
    let mut mov2: Vec<String> = setup.tbar.iter().map(|s| receiver_ancilla(s, Side::B)).collect();
    mov2.extend(setup.b.iter().cloned());
    let (_, dec_b) = decode_all(&ens2, &target2, &mov2)?;

    // Joint protocol: every helper measures at once, then A and B apply their decoders.
    let full = attach_entanglement(&s1, &setup.tbar, mm, Side::B)?;
    let mut all_ins = ins_t.clone();
    all_ins.extend(ins_tbar.iter().cloned());
    let ens = apply_instruments(&full, &all_ins)?;
    let final_target = {
        let mut t = merged_target(psi, &setup.t, l, Side::A)?;
        let pairs: Vec<(String, String)> =
            setup.tbar.iter().map(|s| (s.clone(), substitute_label(s, Side::B))).collect();
        t = t.relabel_many(&pairs)?;
        for (s, &n) in setup.tbar.iter().zip(nn) {
            let g = crate::qstate::max_entangled(n, &output_label(s), &super::receiver_output(s, Side::B))?;
            t = crate::qstate::tensor_product(&g, &t)?;
        }
        t
    };
    let order = final_target.layout().labels();
    let nt = setup.t.len();
    let mut chis = Vec::with_capacity(ens.outcomes.len());
    for o in &ens.outcomes {
        let (Some(ua), Some(vb)) = (dec_a.get(&o.j[..nt]), dec_b.get(&o.j[nt..])) else {
            // Only outcomes of negligible weight lack a decoder; they count as lost mass.
            continue;
        };
        let x = ua.apply(&o.state)?;
        let y = vb.apply(&x)?.permuted(&order)?;
        chis.push((o.p, y.pure_vector()?.clone()));
    }
    let end = mixture_vs_pure_trace_norm(final_target.pure_vector()?, &chis);

    let dims = |v: &[String]| v.iter().map(|s| psi.layout().subsystem(s).map(|x| x.dim)).collect::<Result<Vec<_>>>();
    let delta1 = if setup.t.is_empty() {
        0.0
    } else {
        let pur = cut_purities(psi, &setup.t, &ref1)?;
        delta_bound(&dims(&setup.t)?, k, l, psi.layout().dim_of(&ref1)?, &pur)?.delta
    };
    let delta2 = if setup.tbar.is_empty() {
        0.0
    } else {
        let pur = cut_purities(&psi_at, &setup.tbar, &ref2)?;
        delta_bound(&dims(&setup.tbar)?, mm, nn, psi_at.layout().dim_of(&ref2)?, &pur)?.delta
    };
    let bound = 2.0 * q1.sqrt() + 2.0 * q2.sqrt();
    Ok(SplitReport { seed, q1, q2, delta1, delta2, end_error: end, bound, bound_holds: end <= bound + 1e-6 })
}
