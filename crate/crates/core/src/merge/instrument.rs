use crate::error::{Error, Result};
use crate::linalg::{re, CMat};
use crate::qstate::{
    apply_operator, haar_unitary_from, max_entangled, tensor_product, PartialIsometry, QuantumState, Role, Subsystem,
    SystemLayout,
};
use crate::rng::stream;

use super::{output_label, receiver_ancilla, sender_ancilla, Side};

/// Outcomes with probability below this are dropped from ensembles.
pub const P_DROP: f64 = 1e-14;

/// A Haar-random measurement on `C_i C⁰_i`: `N = ⌊dK/L⌋` rank-`L` partial isometries
/// `P_j = Q_j U` into `C¹_i`, plus a rank-`L'` remainder when `dK > NL`.
#[derive(Clone, Debug)]
pub struct Instrument {
    pub sender: String,
    pub d: usize,
    pub k: usize,
    pub l: usize,
    /// `P_1, …, P_N`, each `L × dK` with orthonormal rows.
    pub isometries: Vec<PartialIsometry>,
    /// `P_0`: `L'` orthonormal rows padded with zero rows up to `L`, so every branch shares
    /// the output space `C¹_i`.
    pub remainder: Option<PartialIsometry>,
    pub remainder_rank: usize,
    pub seed: u64,
    /// The Haar unitary the branches were cut from.
    pub unitary: CMat,
}

impl Instrument {
    pub fn count(&self) -> usize {
        self.isometries.len() + usize::from(self.remainder.is_some())
    }

    /// `(index, P)` for every branch: isometries are `1..=N`, the remainder is `0`.
    pub fn branches(&self) -> Vec<(usize, &PartialIsometry)> {
        let mut v: Vec<(usize, &PartialIsometry)> =
            self.isometries.iter().enumerate().map(|(j, p)| (j + 1, p)).collect();
        if let Some(r) = &self.remainder {
            v.push((0, r));
        }
        v
    }

    /// Largest entry of `Σ_j P_j† P_j − I`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.d * self.k;
        let mut acc = CMat::zeros(n, n);
        for (_, p) in self.branches() {
            acc += p.matrix.adjoint() * &p.matrix;
        }
        acc -= CMat::identity(n, n);
        acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn input_labels(&self) -> &[String] {
        &self.isometries[0].input_labels
    }
}

/// Build the random measurement for `sender`. The layout must contain `sender` and, when
/// `k > 1`, the ancilla `sender.c0` of dimension `k`.
pub fn build_instrument(layout: &SystemLayout, sender: &str, k: usize, l: usize, seed: u64) -> Result<Instrument> {
    let d = layout.subsystem(sender)?.dim;
    if k == 0 || l == 0 {
        return Err(Error::Rank("K and L must be positive".into()));
    }
    let anc = sender_ancilla(sender);
    let mut inputs = vec![sender.to_string()];
    match layout.subsystem(&anc) {
        Ok(s) if s.dim == k => inputs.push(anc),
        Ok(s) => return Err(Error::Dimension(format!("{anc} has dimension {} but K = {k}", s.dim))),
        Err(_) if k == 1 => {}
        Err(_) => return Err(Error::Layout(format!("K = {k} requires the ancilla {anc}"))),
    }
    let n_in = d * k;
    if l > n_in {
        return Err(Error::Rank(format!("L = {l} exceeds d·K = {n_in} for sender {sender}")));
    }
    let u = haar_unitary_from(n_in, &mut stream(seed, 0));
    let n = n_in / l;
    let lp = n_in - n * l;
    let out = vec![Subsystem::new(output_label(sender), l, Role::Sender)];
    let rows =
        |start: usize, count: usize| CMat::from_fn(l, n_in, |i, j| if i < count { u[(start + i, j)] } else { re(0.0) });
    let isometries = (0..n)
        .map(|j| PartialIsometry::new(inputs.clone(), out.clone(), rows(j * l, l)))
        .collect::<Result<Vec<_>>>()?;
    let remainder = if lp > 0 { Some(PartialIsometry::new(inputs.clone(), out, rows(n * l, lp))?) } else { None };
    Ok(Instrument { sender: sender.to_string(), d, k, l, isometries, remainder, remainder_rank: lp, seed, unitary: u })
}

/// `ψ ⊗ Φ^{K_1} ⊗ … ⊗ Φ^{K_m}`, with `Φ^{K_i}` on `(C_i.c0, C_i.b0)` (or `.a0` for side A).
pub fn attach_entanglement<S: AsRef<str>>(
    psi: &QuantumState,
    senders: &[S],
    ks: &[usize],
    side: Side,
) -> Result<QuantumState> {
    if senders.len() != ks.len() {
        return Err(Error::Input(format!("{} senders but {} entanglement dimensions", senders.len(), ks.len())));
    }
    let mut out = psi.clone();
    for (s, &k) in senders.iter().zip(ks) {
        let phi = max_entangled(k, &sender_ancilla(s.as_ref()), &receiver_ancilla(s.as_ref(), side))?;
        out = tensor_product(&out, &phi)?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Outcome {
    /// Branch index per instrument (0 = remainder).
    pub j: Vec<usize>,
    pub p: f64,
    /// Normalized post-measurement vector.
    pub state: QuantumState,
}

impl Outcome {
    pub fn full_rank(&self) -> bool {
        self.j.iter().all(|&j| j != 0)
    }
}

/// Post-measurement ensemble. Every state has the instrument outputs first (instrument order),
/// then the untouched factors in their original order.
#[derive(Clone, Debug)]
pub struct OutcomeEnsemble {
    pub outcomes: Vec<Outcome>,
    /// Total probability of the dropped outcomes.
    pub dropped: f64,
}

impl OutcomeEnsemble {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.p).sum()
    }
}

/// Measure every instrument on a vector state. Outcomes with `p < 1e-14` are dropped.
pub fn apply_instruments(state: &QuantumState, instruments: &[Instrument]) -> Result<OutcomeEnsemble> {
    let v = state.pure_vector()?;
    for ins in instruments {
        state.layout().positions(ins.input_labels())?;
    }
    let mut branches: Vec<(Vec<usize>, QuantumState)> = vec![(vec![], state.clone())];
    let mut dropped = 0.0;
    for ins in instruments {
        let mut next = Vec::with_capacity(branches.len() * ins.count());
        for (j, s) in &branches {
            for (idx, p) in ins.branches() {
                let t = apply_operator(s, &p.input_labels, &p.matrix, p.outputs.clone())?;
                let w = t.trace();
                if w < P_DROP {
                    dropped += w;
                    continue;
                }
                let mut jj = j.clone();
                jj.push(idx);
                next.push((jj, t));
            }
        }
        branches = next;
    }
    let total = v.norm_squared();
    let mut order: Vec<String> = instruments.iter().map(|i| output_label(&i.sender)).collect();
    if let Some((_, s)) = branches.first() {
        order.extend(s.layout().complement(&order));
    }
    let mut outcomes = Vec::with_capacity(branches.len());
    for (j, s) in branches {
        let p = s.trace() / total;
        let s = s.permuted(&order)?;
        let n = s.trace().sqrt();
        let unit = s.pure_vector()?.map(|z| z / n);
        outcomes.push(Outcome { j, p, state: QuantumState::pure_unchecked(s.layout().clone(), unit) });
    }
    Ok(OutcomeEnsemble { outcomes, dropped: dropped / total })
}
