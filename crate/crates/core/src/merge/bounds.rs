use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::entropy::{h2_collision_on, h_min_conditional_on, h_min_relative_on, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{re, trace_norm_herm, CMat};
use crate::qstate::{apply_operator, haar_unitary_from, QuantumState, Role, Subsystem};
use crate::rng::stream;

use super::{mask_members, output_label, subset_labels};

/// `(r, s)` with `E[(U⊗U)† F_{C¹C¹'} (U⊗U)] = r I + s F` for a rank-`l` projection after a Haar
/// unitary on a `d`-dimensional space. Matching traces against `I` and `F` gives
/// `s = l(ld − 1)/(d(d² − 1))`, which is at most `l²/d²`.
pub fn coefficients(d: usize, l: usize) -> (f64, f64) {
    if d == 1 {
        return (0.0, 1.0);
    }
    let (d, l) = (d as f64, l as f64);
    let den = d * d - 1.0;
    (l / d * (d - l) / den, l * (l * d - 1.0) / d / den)
}

/// `Tr[(ψ^{R T})²]` for every subset mask `T` of `senders`, including `T = ∅` (`Tr[(ψ^R)²]`).
pub fn cut_purities(psi: &QuantumState, senders: &[String], reference: &[String]) -> Result<BTreeMap<u32, f64>> {
    let m = senders.len();
    let mut out = BTreeMap::new();
    for mask in 0u32..(1 << m) {
        let mut keep = subset_labels(senders, mask);
        keep.extend(reference.iter().cloned());
        let p = if keep.is_empty() { psi.trace().powi(2) } else { psi.purity(&keep)? };
        out.insert(mask, p);
    }
    Ok(out)
}

/// Exact `E[Tr ω²] = Σ_T Π_{i∉T} r_i Π_{i∈T} s_i Tr[(ψ^{RT})²]` over Haar unitaries, for rank-`l_i`
/// projections on senders of dimension `d_i`.
pub fn expected_purity(d: &[usize], l: &[usize], purities: &BTreeMap<u32, f64>) -> Result<f64> {
    let m = d.len();
    let rs: Vec<(f64, f64)> = d.iter().zip(l).map(|(&d, &l)| coefficients(d, l)).collect();
    let mut acc = 0.0;
    for mask in 0u32..(1 << m) {
        let p = purities.get(&mask).ok_or_else(|| Error::Input(format!("missing purity for cut {mask:#b}")))?;
        let c: f64 = (0..m).map(|i| if mask >> i & 1 == 1 { rs[i].1 } else { rs[i].0 }).product();
        acc += c * p;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutTerm {
    /// Sender indices in the cut.
    pub subset: Vec<usize>,
    /// `Tr[(ψ^{RT})²]`.
    pub purity: f64,
    /// `Π_{i∈T} L_i / K_i`.
    pub weight: f64,
    /// `Π_{i∈T} L_i / (d_i K_i)`, the remainder-outcome term.
    pub remainder_term: f64,
    /// `Π_{i∉T} r_i Π_{i∈T} s_i` for the state `ψ ⊗ τ^{C⁰}` on `d_i K_i` dimensions.
    pub rs_coefficient: f64,
}

/// `Δ = 2 Σ_T Π L_i/(d_i K_i) + Γ` with `Γ = 2 √(d_R Σ_T Π (L_i/K_i) Tr[(ψ^{RT})²])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBound {
    pub delta: f64,
    pub gamma: f64,
    pub per_cut: Vec<CutTerm>,
}

/// Evaluate the quantum-error bound from the per-cut purities of the original state (without
/// the entanglement). `purities` must hold every nonempty mask.
pub fn delta_bound(
    d: &[usize],
    k: &[usize],
    l: &[usize],
    d_ref: usize,
    purities: &BTreeMap<u32, f64>,
) -> Result<DeltaBound> {
    let m = d.len();
    if k.len() != m || l.len() != m {
        return Err(Error::Input("d, K and L must have one entry per sender".into()));
    }
    let mut rem = 0.0;
    let mut inner = 0.0;
    let mut per_cut = Vec::with_capacity((1 << m) - 1);
    for mask in 1u32..(1 << m) {
        let p = *purities.get(&mask).ok_or_else(|| Error::Input(format!("missing purity for cut {mask:#b}")))?;
        let members = mask_members(mask);
        let weight: f64 = members.iter().map(|&i| l[i] as f64 / k[i] as f64).product();
        let remainder_term: f64 = members.iter().map(|&i| l[i] as f64 / (d[i] * k[i]) as f64).product();
        let rs_coefficient: f64 = (0..m)
            .map(|i| {
                let (r, s) = coefficients(d[i] * k[i], l[i]);
                if mask >> i & 1 == 1 {
                    s
                } else {
                    r
                }
            })
            .product();
        rem += remainder_term;
        inner += weight * p;
        per_cut.push(CutTerm { subset: members, purity: p, weight, remainder_term, rs_coefficient });
    }
    let gamma = 2.0 * (d_ref as f64 * inner).sqrt();
    Ok(DeltaBound { delta: 2.0 * rem + gamma, gamma, per_cut })
}

/// Expected total probability of outcomes involving at least one remainder branch:
/// `1 − Π N_i L_i / (d_i K_i)`.
pub fn expected_remainder_mass(d: &[usize], k: &[usize], l: &[usize]) -> f64 {
    let full: f64 = d
        .iter()
        .zip(k)
        .zip(l)
        .map(|((&d, &k), &l)| {
            let n = d * k / l;
            (n * l) as f64 / (d * k) as f64
        })
        .product();
    1.0 - full
}

fn dim_product(psi: &QuantumState, labels: &[String]) -> Result<usize> {
    psi.layout().dim_of(labels)
}

/// `(L/d_{C_M}) √(d_R Σ_{T≠∅} L_T Tr[(ψ^{RT})²])`.
pub fn lemma3_rhs(psi: &QuantumState, senders: &[String], reference: &[String], l: &[usize]) -> Result<f64> {
    let pur = cut_purities(psi, senders, reference)?;
    let dc = dim_product(psi, senders)? as f64;
    let dr = dim_product(psi, reference)? as f64;
    let ltot: f64 = l.iter().map(|&x| x as f64).product();
    let mut acc = 0.0;
    for mask in 1u32..(1 << senders.len()) {
        let lt: f64 = mask_members(mask).iter().map(|&i| l[i] as f64).product();
        acc += lt * pur[&mask];
    }
    Ok(ltot / dc * (dr * acc).sqrt())
}

/// `‖ω^{C¹R} − (L/d_{C_M}) τ^{C¹} ⊗ ψ^R‖₁` with `ω` produced by the maps `P_i = Q_i U_i`
/// (each `L_i × d_i` with orthonormal rows) applied to the senders of `psi`.
pub fn lemma3_residual(psi: &QuantumState, senders: &[String], reference: &[String], maps: &[CMat]) -> Result<f64> {
    if maps.len() != senders.len() {
        return Err(Error::Input("one map per sender required".into()));
    }
    let psi_r = if reference.is_empty() {
        CMat::identity(1, 1) * re(psi.trace())
    } else {
        psi.reduced(reference)?.to_density()
    };
    let mut state = psi.clone();
    let mut c1 = Vec::with_capacity(senders.len());
    for (s, p) in senders.iter().zip(maps) {
        let out = output_label(s);
        state = apply_operator(&state, &[s], p, vec![Subsystem::new(out.clone(), p.nrows(), Role::Sender)])?;
        c1.push(out);
    }
    let ltot: usize = maps.iter().map(|p| p.nrows()).product();
    let dc = dim_product(psi, senders)? as f64;
    let mut keep = c1.clone();
    keep.extend(reference.iter().cloned());
    let omega = state.reduced(&keep)?.to_density();
    let target = CMat::identity(ltot, ltot).kronecker(&psi_r) * re(1.0 / dc);
    Ok(trace_norm_herm(&(omega - target)))
}

/// Sample Haar unitaries from `seed`, keep the first `L_i` rows of each, and return the residual
/// together with the closed-form bound.
pub fn lemma3_residual_and_bound(
    psi: &QuantumState,
    senders: &[String],
    reference: &[String],
    l: &[usize],
    seed: u64,
) -> Result<(f64, f64)> {
    if l.len() != senders.len() {
        return Err(Error::Input("one L per sender required".into()));
    }
    let mut maps = Vec::with_capacity(l.len());
    for (i, (s, &li)) in senders.iter().zip(l).enumerate() {
        let d = psi.layout().subsystem(s)?.dim;
        if li == 0 || li > d {
            return Err(Error::Rank(format!("L = {li} outside [1, {d}] for {s}")));
        }
        let u = haar_unitary_from(d, &mut stream(seed, i as u64));
        maps.push(u.rows(0, li).into_owned());
    }
    Ok((lemma3_residual(psi, senders, reference, &maps)?, lemma3_rhs(psi, senders, reference, l)?))
}

fn entropic_bound(
    psi: &QuantumState,
    senders: &[String],
    l: &[usize],
    mut term: impl FnMut(&[String]) -> Result<f64>,
) -> Result<f64> {
    let dc = dim_product(psi, senders)? as f64;
    let ltot: f64 = l.iter().map(|&x| x as f64).product();
    let mut acc = 0.0;
    for mask in 1u32..(1 << senders.len()) {
        let lt: f64 = mask_members(mask).iter().map(|&i| l[i] as f64).product();
        acc += lt * (-term(&subset_labels(senders, mask))?).exp2();
    }
    Ok(ltot / dc * acc.sqrt())
}

/// `(L/d_{C_M}) √(Σ_{T≠∅} 2^{−(H_min(ψ^{TR}|σ^R) − log L_T)})`, with `R` the labels of `sigma`.
pub fn lemma4_bound(psi: &QuantumState, senders: &[String], sigma: &QuantumState, l: &[usize]) -> Result<f64> {
    entropic_bound(psi, senders, l, |t| Ok(h_min_relative_on(psi, t, sigma)?.value))
}

/// The intermediate bound of the same form with `H_2(ψ^{TR}|σ^R)` in place of `H_min`; never
/// larger than [`lemma4_bound`].
pub fn lemma4_collision_bound(
    psi: &QuantumState,
    senders: &[String],
    sigma: &QuantumState,
    l: &[usize],
) -> Result<f64> {
    entropic_bound(psi, senders, l, |t| h2_collision_on(psi, t, sigma))
}

/// Candidate right-hand side with an independently optimized `σ_T` per cut, i.e. with
/// `H_min(ψ^{TR}|R)` in every term. Evidence only: no cost computation relies on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub candidate_rhs: f64,
    /// `(cut, H_min(ψ^{TR}|R), certificate gap)`.
    pub per_cut: Vec<(Vec<usize>, f64, f64)>,
    pub empirical_lhs: f64,
    pub holds_empirically: bool,
}

pub fn conjecture_probe(
    psi: &QuantumState,
    senders: &[String],
    reference: &[String],
    l: &[usize],
    empirical_lhs: f64,
) -> Result<ProbeRecord> {
    let opts = SolverOptions::default();
    let mut per_cut = Vec::new();
    let rhs = entropic_bound(psi, senders, l, |t| {
        let (rep, _) = h_min_conditional_on(psi, t, reference, &opts)?;
        let idx = t.iter().map(|x| senders.iter().position(|s| s == x).unwrap_or(usize::MAX)).collect();
        per_cut.push((idx, rep.value, rep.gap()));
        Ok(rep.value)
    })?;
    Ok(ProbeRecord { candidate_rhs: rhs, per_cut, empirical_lhs, holds_empirically: empirical_lhs <= rhs })
}
