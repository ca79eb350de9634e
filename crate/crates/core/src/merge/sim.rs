use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{re, trace_norm_herm, CMat, CVec};
use crate::qstate::{max_entangled, mixture_vs_pure_trace_norm, tensor_product, uhlmann_isometry, QuantumState};
use crate::rng::derive_seed;

use super::bounds::{cut_purities, delta_bound, expected_remainder_mass, CutTerm};
use super::cost::CostAssignment;
use super::instrument::{apply_instruments, attach_entanglement, build_instrument, Instrument, OutcomeEnsemble};
use super::{output_label, receiver_ancilla, receiver_output, substitute_label, MergeSetup, Side};

/// Largest state dimension a simulation may build (input with entanglement, or target).
pub const MAX_SIM_DIM: usize = 1 << 12;

/// `Q = Σ_J p_J ‖ψ_J^{C¹R} − τ^{C¹} ⊗ ψ^R‖₁`, where `outputs` are the `C¹` labels and `ψ^R` is the
/// ensemble average of the reference marginals (the reference is never touched by the senders).
pub fn quantum_error(ensemble: &OutcomeEnsemble, outputs: &[String], reference: &[String]) -> Result<f64> {
    let Some(first) = ensemble.outcomes.first() else {
        return Err(Error::Input("empty ensemble".into()));
    };
    let l = first.state.layout().dim_of(outputs)?;
    let mut keep = outputs.to_vec();
    keep.extend(reference.iter().cloned());
    let dr = first.state.layout().dim_of(reference)?;
    let total = ensemble.total_probability();
    let mut psi_r = CMat::zeros(dr, dr);
    let mut marginals = Vec::with_capacity(ensemble.outcomes.len());
    for o in &ensemble.outcomes {
        let rho = if keep.is_empty() { CMat::identity(1, 1) } else { o.state.reduced(&keep)?.to_density() };
        // Partial trace over C¹ of ρ^{C¹R}.
        let mut r = CMat::zeros(dr, dr);
        for a in 0..l {
            r += rho.view((a * dr, a * dr), (dr, dr));
        }
        psi_r += r * re(o.p / total);
        marginals.push(rho);
    }
    let target = CMat::identity(l, l).kronecker(&psi_r) * re(1.0 / l as f64);
    let mut q = 0.0;
    for (o, rho) in ensemble.outcomes.iter().zip(&marginals) {
        q += o.p * trace_norm_herm(&(rho - &target));
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub m: usize,
    pub dims: Vec<usize>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub d_ref: usize,
    pub q_error: f64,
    pub delta_bound: f64,
    pub gamma: f64,
    pub per_cut: Vec<CutTerm>,
    pub end_to_end_error: f64,
    pub bound_2sqrt: f64,
    /// `end_to_end_error ≤ 2√Q + 1e-6`.
    pub bound_holds: bool,
    pub outcomes: usize,
    /// Probability of outcomes with at least one remainder branch.
    pub remainder_mass: f64,
    pub expected_remainder_mass: f64,
    /// `Σ_{full-rank J} |p_J − L/(d_{C_M} K)|`.
    pub prob_deviation: f64,
}

/// Pure target `Φ^{L_1} ⊗ … ⊗ Φ^{L_m} ⊗ ψ` with every sender relabeled to the receiver side.
pub(crate) fn merged_target(psi: &QuantumState, senders: &[String], ls: &[usize], side: Side) -> Result<QuantumState> {
    let pairs: Vec<(String, String)> = senders.iter().map(|s| (s.clone(), substitute_label(s, side))).collect();
    let mut out = psi.relabel_many(&pairs)?;
    for (s, &l) in senders.iter().zip(ls) {
        out = tensor_product(&max_entangled(l, &output_label(s), &receiver_output(s, side))?, &out)?;
    }
    Ok(out)
}

pub(crate) type Decoders = HashMap<Vec<usize>, crate::qstate::PartialIsometry>;

/// Uhlmann decoders for every outcome: each acts on `movable` and targets `target`. Returns the
/// decoded, normalized vectors aligned to the factor order of `target`.
pub(crate) fn decode_all(
    ensemble: &OutcomeEnsemble,
    target: &QuantumState,
    movable: &[String],
) -> Result<(Vec<(f64, CVec)>, Decoders)> {
    let order = target.layout().labels();
    let mut chis = Vec::with_capacity(ensemble.outcomes.len());
    let mut decoders = HashMap::new();
    for o in &ensemble.outcomes {
        let dec = uhlmann_isometry(&o.state, target, movable)?;
        let chi = dec.isometry.apply(&o.state)?.permuted(&order)?;
        chis.push((o.p, chi.pure_vector()?.clone()));
        decoders.insert(o.j.clone(), dec.isometry);
    }
    Ok((chis, decoders))
}

pub(crate) fn build_all(
    layout: &crate::qstate::SystemLayout,
    senders: &[String],
    k: &[usize],
    l: &[usize],
    seed: u64,
    offset: u64,
) -> Result<Vec<Instrument>> {
    senders
        .iter()
        .enumerate()
        .map(|(i, s)| build_instrument(layout, s, k[i], l[i], derive_seed(seed, offset + i as u64)))
        .collect()
}

pub(crate) fn check_scale(what: &str, dim: usize) -> Result<()> {
    if dim > MAX_SIM_DIM {
        return Err(Error::Scale(format!("{what} dimension {dim} exceeds {MAX_SIM_DIM}")));
    }
    Ok(())
}

/// Simulate random-measurement merging of the senders of `psi` to the receiver with `Φ^{K_i}`
/// pre-shared and target `Φ^{L_i}`, decoding every outcome with its Uhlmann isometry.
pub fn run_merging(
    psi: &QuantumState,
    setup: &MergeSetup,
    k: &[usize],
    l: &[usize],
    seed: u64,
) -> Result<SimulationReport> {
    psi.pure_vector()?;
    setup.check(psi)?;
    let m = setup.m();
    if k.len() != m || l.len() != m {
        return Err(Error::Input(format!("{m} senders need {m} values of K and L")));
    }
    let kk = k.iter().fold(1usize, |a, &x| a.saturating_mul(x));
    let ll = l.iter().fold(1usize, |a, &x| a.saturating_mul(x));
    check_scale("input with entanglement", psi.dim().saturating_mul(kk).saturating_mul(kk))?;
    check_scale("merged target", psi.dim().saturating_mul(ll).saturating_mul(ll))?;
    let dims = setup.sender_dims(psi)?;

    let state = attach_entanglement(psi, &setup.senders, k, Side::B)?;
    let instruments = build_all(state.layout(), &setup.senders, k, l, seed, 0)?;
    let ens = apply_instruments(&state, &instruments)?;
    let c1: Vec<String> = setup.senders.iter().map(|s| output_label(s)).collect();
    let q = quantum_error(&ens, &c1, &setup.reference)?;

    let d_ref = psi.layout().dim_of(&setup.reference)?;
    let pur = cut_purities(psi, &setup.senders, &setup.reference)?;
    let db = delta_bound(&dims, k, l, d_ref, &pur)?;

    let target = merged_target(psi, &setup.senders, l, Side::B)?;
    let mut movable: Vec<String> = setup.senders.iter().map(|s| receiver_ancilla(s, Side::B)).collect();
    movable.extend(setup.receiver.iter().cloned());
    let (chis, _) = decode_all(&ens, &target, &movable)?;
    let end = mixture_vs_pure_trace_norm(target.pure_vector()?, &chis);

    let d_cm: usize = dims.iter().product();
    let p_full = ll as f64 / (d_cm * kk) as f64;
    let n_full: usize = dims.iter().zip(k).zip(l).map(|((&d, &k), &l)| d * k / l).product();
    let mut remainder_mass = 0.0;
    let mut prob_deviation = 0.0;
    let mut seen_full = 0;
    for o in &ens.outcomes {
        if o.full_rank() {
            prob_deviation += (o.p - p_full).abs();
            seen_full += 1;
        } else {
            remainder_mass += o.p;
        }
    }
    prob_deviation += (n_full - seen_full) as f64 * p_full;
    let bound = 2.0 * q.sqrt();
    Ok(SimulationReport {
        seed,
        m,
        dims: dims.clone(),
        k: k.to_vec(),
        l: l.to_vec(),
        d_ref,
        q_error: q,
        delta_bound: db.delta,
        gamma: db.gamma,
        per_cut: db.per_cut,
        end_to_end_error: end,
        bound_2sqrt: bound,
        bound_holds: end <= bound + 1e-6,
        outcomes: ens.outcomes.len(),
        remainder_mass,
        expected_remainder_mass: expected_remainder_mass(&dims, k, l),
        prob_deviation,
    })
}

/// [`run_merging`] with `K_i`, `L_i` taken from a cost assignment.
pub fn run_merging_with_cost(
    psi: &QuantumState,
    setup: &MergeSetup,
    cost: &CostAssignment,
    seed: u64,
) -> Result<SimulationReport> {
    let (k, l) = cost.k_l(&setup.senders)?;
    run_merging(psi, setup, &k, &l, seed)
}
