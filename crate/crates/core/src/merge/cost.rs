use serde::{Deserialize, Serialize};

use crate::entropy::{h_min_conditional_on, h_min_relative_on, SolverOptions};
use crate::error::{Error, Result};
use crate::qstate::QuantumState;

use super::split::SplitSetup;
use super::{mask_members, subset_labels, MergeSetup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderCost {
    pub label: String,
    /// `K = 2^log_k`.
    pub log_k: i64,
    /// `L = 2^log_l`.
    pub log_l: i64,
}

impl SenderCost {
    pub fn cost(&self) -> i64 {
        self.log_k - self.log_l
    }
}

/// `Σ_{i∈T} E_i ≥ rhs` over the senders of a [`CostAssignment`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub subset: Vec<usize>,
    pub rhs: f64,
    /// Certificate gap of the entropy entering `rhs` (0 for closed forms).
    pub gap: f64,
}

/// Integral one-shot entanglement costs `E_i = log K_i − log L_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostAssignment {
    pub provenance: String,
    pub senders: Vec<String>,
    pub per_sender: Vec<SenderCost>,
    pub epsilon: f64,
    pub constraints: Vec<Constraint>,
    /// False when some `L_i = 2^{−E_i}` exceeds the sender dimension, so no instrument exists.
    pub integral_feasible: bool,
    /// Whether the entropies are smoothed (`Some(false)` marks the unsmoothed substitute).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub smoothed: Option<bool>,
}

impl CostAssignment {
    pub fn costs(&self) -> Vec<i64> {
        self.per_sender.iter().map(|c| c.cost()).collect()
    }

    /// `(K, L)` in the order of `senders`.
    pub fn k_l(&self, senders: &[String]) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut k = Vec::with_capacity(senders.len());
        let mut l = Vec::with_capacity(senders.len());
        for s in senders {
            let c = self
                .per_sender
                .iter()
                .find(|c| &c.label == s)
                .ok_or_else(|| Error::Input(format!("no cost for sender {s}")))?;
            if c.log_k > 20 || c.log_l > 20 {
                return Err(Error::Scale(format!("cost for {s} needs 2^{} ebits", c.log_k.max(c.log_l))));
            }
            k.push(1usize << c.log_k);
            l.push(1usize << c.log_l);
        }
        Ok((k, l))
    }

    /// Subsets whose constraint fails for the integral costs (tolerance 1e-9).
    pub fn violations(&self) -> Vec<Vec<usize>> {
        let e = self.costs();
        self.constraints
            .iter()
            .filter(|c| (c.subset.iter().map(|&i| e[i]).sum::<i64>() as f64) < c.rhs - 1e-9)
            .map(|c| c.subset.clone())
            .collect()
    }
}

/// Smallest-first integral solution of `Σ_{i∈T} E_i ≥ rhs_T`: start from the rounded-up
/// singleton bounds, then visit subsets by size and spread any integral deficit evenly over the
/// members, the remainder going to the earliest senders. Senders without a singleton constraint
/// start at 0.
pub fn solve_integral_costs(m: usize, constraints: &[(u32, f64)]) -> Vec<i64> {
    let mut e = vec![0i64; m];
    for &(mask, rhs) in constraints {
        if mask.count_ones() == 1 {
            e[mask.trailing_zeros() as usize] = rhs.ceil() as i64;
        }
    }
    let mut order: Vec<&(u32, f64)> = constraints.iter().filter(|c| c.0.count_ones() > 1).collect();
    order.sort_by_key(|c| (c.0.count_ones(), c.0));
    for &&(mask, rhs) in &order {
        let members = mask_members(mask);
        let sum: i64 = members.iter().map(|&i| e[i]).sum();
        let deficit = (rhs - sum as f64).ceil() as i64;
        if deficit > 0 {
            let n = members.len() as i64;
            for (pos, &i) in members.iter().enumerate() {
                e[i] += deficit / n + i64::from((pos as i64) < deficit % n);
            }
        }
    }
    e
}

fn assignment(
    provenance: &str,
    senders: &[String],
    dims: &[usize],
    epsilon: f64,
    constraints: Vec<Constraint>,
    smoothed: Option<bool>,
) -> CostAssignment {
    let masks: Vec<(u32, f64)> =
        constraints.iter().map(|c| (c.subset.iter().fold(0u32, |a, &i| a | 1 << i), c.rhs)).collect();
    let e = solve_integral_costs(senders.len(), &masks);
    let mut feasible = true;
    let per_sender = senders
        .iter()
        .zip(&e)
        .zip(dims)
        .map(|((s, &ei), &d)| {
            let (log_k, log_l) = if ei >= 0 { (ei, 0) } else { (0, -ei) };
            if log_l >= 63 || (1u64 << log_l) > d as u64 {
                feasible = false;
            }
            SenderCost { label: s.clone(), log_k, log_l }
        })
        .collect();
    CostAssignment {
        provenance: provenance.into(),
        senders: senders.to_vec(),
        per_sender,
        epsilon,
        constraints,
        integral_feasible: feasible,
        smoothed,
    }
}

/// `H_min(ψ^{T C}|ψ^C)` with `C = cond`; for empty `cond` this is `H_min(ψ^T)`.
fn hmin_relative_to_marginal(psi: &QuantumState, t: &[String], cond: &[String]) -> Result<f64> {
    if cond.is_empty() {
        let top = psi.marginal_spectrum(t)?.first().copied().unwrap_or(0.0);
        return Ok(-top.log2());
    }
    let sigma = psi.reduced(cond)?;
    Ok(h_min_relative_on(psi, t, &sigma)?.value)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::Input(format!("error parameter {eps} outside (0, 2)")));
    }
    Ok(())
}

fn cut_constraints(psi: &QuantumState, senders: &[String], cond: &[String], additive: f64) -> Result<Vec<Constraint>> {
    let mut out = Vec::with_capacity((1 << senders.len()) - 1);
    for mask in 1u32..(1 << senders.len()) {
        let h = hmin_relative_to_marginal(psi, &subset_labels(senders, mask), cond)?;
        out.push(Constraint { subset: mask_members(mask), rhs: -h + additive, gap: 0.0 });
    }
    Ok(out)
}

fn dims_of(psi: &QuantumState, labels: &[String]) -> Result<Vec<usize>> {
    labels.iter().map(|s| Ok(psi.layout().subsystem(s)?.dim)).collect()
}

/// Costs with `E_T ≥ −H_min(ψ^{TR}|ψ^R) + 4 log(1/ε) + 2m + 8` for every nonempty `T`.
pub fn theorem4_cost(psi: &QuantumState, setup: &MergeSetup, eps: f64) -> Result<CostAssignment> {
    psi.pure_vector()?;
    setup.check(psi)?;
    check_eps(eps)?;
    let m = setup.m() as f64;
    let additive = 4.0 * (1.0 / eps).log2() + 2.0 * m + 8.0;
    let constraints = cut_constraints(psi, &setup.senders, &setup.reference, additive)?;
    Ok(assignment("thm4", &setup.senders, &dims_of(psi, &setup.senders)?, eps, constraints, None))
}

/// One-at-a-time costs for the order `perm` (indices into the senders): sender `π(p)` pays
/// `−H_min(ψ^{C R_p}|R_p) + 4 log(m/ε) + 12` with `R_p = R ⊗ C_{π(p+1)} ⊗ …`. The smooth
/// min-entropy is replaced by the unsmoothed one (`smoothed = false`), which can only raise the cost.
pub fn sequential_costs(psi: &QuantumState, setup: &MergeSetup, eps: f64, perm: &[usize]) -> Result<CostAssignment> {
    psi.pure_vector()?;
    setup.check(psi)?;
    check_eps(eps)?;
    let m = setup.m();
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..m).collect::<Vec<_>>() {
        return Err(Error::Input(format!("{perm:?} is not a permutation of the {m} senders")));
    }
    let additive = 4.0 * (m as f64 / eps).log2() + 12.0;
    let opts = SolverOptions::default();
    let mut constraints = Vec::with_capacity(m);
    for (p, &i) in perm.iter().enumerate() {
        let mut cond = setup.reference.clone();
        cond.extend(perm[p + 1..].iter().map(|&j| setup.senders[j].clone()));
        let c = [setup.senders[i].clone()];
        let (h, gap) = if cond.is_empty() {
            (hmin_relative_to_marginal(psi, &c, &[])?, 0.0)
        } else {
            let (rep, _) = h_min_conditional_on(psi, &c, &cond, &opts)?;
            (rep.value, rep.gap())
        };
        constraints.push(Constraint { subset: vec![i], rhs: -h + additive, gap });
    }
    constraints.sort_by_key(|c| c.subset[0]);
    Ok(assignment("prop5_point", &setup.senders, &dims_of(psi, &setup.senders)?, eps, constraints, Some(false)))
}

/// One-shot split-transfer costs: the `T` side pays
/// `E_S ≥ −H_min(ψ^{S T̄ B R}|ψ^{T̄ B R}) + 4 log(1/ε₁) + 2|T| + 8`, the `T̄` side
/// `E_S' ≥ −H_min(ψ^{S' A_T A R}|ψ^{A_T A R}) + 4 log(1/ε₂) + 2|T̄| + 8`.
pub fn prop8_split_costs(
    psi: &QuantumState,
    setup: &SplitSetup,
    eps1: f64,
    eps2: f64,
) -> Result<(CostAssignment, CostAssignment)> {
    psi.pure_vector()?;
    setup.check(psi)?;
    check_eps(eps1)?;
    check_eps(eps2)?;
    let side = |helpers: &[String], cond: Vec<String>, eps: f64| -> Result<CostAssignment> {
        let additive = 4.0 * (1.0 / eps).log2() + 2.0 * helpers.len() as f64 + 8.0;
        let constraints = cut_constraints(psi, helpers, &cond, additive)?;
        Ok(assignment("prop8", helpers, &dims_of(psi, helpers)?, eps, constraints, None))
    };
    let mut cond1 = setup.tbar.clone();
    cond1.extend(setup.b.iter().cloned());
    cond1.extend(setup.reference.iter().cloned());
    let mut cond2 = setup.t.clone();
    cond2.extend(setup.a.iter().cloned());
    cond2.extend(setup.reference.iter().cloned());
    Ok((side(&setup.t, cond1, eps1)?, side(&setup.tbar, cond2, eps2)?))
}
