use num_complex::Complex64 as C64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frob2, re, trace_norm, trace_norm_herm, CMat, CVec, Eigh};
use crate::rng::{stream, Rng};

use super::layout::{subset_offsets, Role, Subsystem, SystemLayout};
use super::state::{QuantumState, StateData};

pub fn tensor_product(a: &QuantumState, b: &QuantumState) -> Result<QuantumState> {
    let layout = a.layout().concat(b.layout())?;
    Ok(match (a.data(), b.data()) {
        (StateData::Vector(x), StateData::Vector(y)) => QuantumState::pure_unchecked(layout, x.kronecker(y)),
        _ => QuantumState::density_unchecked(layout, a.to_density().kronecker(&b.to_density())),
    })
}

/// Tensor product of several states, left to right.
pub fn tensor_all(states: &[QuantumState]) -> Result<QuantumState> {
    let mut it = states.iter();
    let mut acc = it.next().ok_or_else(|| Error::Input("empty tensor product".into()))?.clone();
    for s in it {
        acc = tensor_product(&acc, s)?;
    }
    Ok(acc)
}

pub fn partial_trace<S: AsRef<str>>(state: &QuantumState, discard: &[S]) -> Result<QuantumState> {
    state.layout().positions(discard)?;
    let keep = state.layout().complement(discard);
    if keep.is_empty() {
        return Err(Error::Layout("cannot discard every subsystem".into()));
    }
    state.reduced(&keep)
}

/// Purify a normalized density matrix onto a reference of dimension `rank(ρ)`.
pub fn purify(rho: &QuantumState, ref_label: &str) -> Result<QuantumState> {
    let m = rho.to_density();
    let tr = crate::linalg::real_trace(&m);
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(format!("purify needs trace 1, got {tr}")));
    }
    let e = Eigh::new(&m);
    let rank = e.rank(1e-12).max(1);
    let d = m.nrows();
    let mut v = CVec::zeros(d * rank);
    for k in 0..rank {
        let s = e.values[k].max(0.0).sqrt();
        for i in 0..d {
            v[i * rank + k] = e.vectors[(i, k)] * s;
        }
    }
    let layout = rho.layout().concat(&SystemLayout::new(vec![Subsystem::new(ref_label, rank, Role::Reference)])?)?;
    Ok(QuantumState::pure_unchecked(layout, v))
}

#[derive(Clone, Debug)]
pub struct Schmidt {
    /// Nonnegative, descending; squares sum to the squared norm.
    pub coefficients: Vec<f64>,
    /// Columns are left Schmidt vectors on the cut labels (in the order given).
    pub left: CMat,
    /// Columns are right Schmidt vectors on the remaining labels (layout order).
    pub right: CMat,
}

impl Schmidt {
    pub fn reconstruct(&self) -> CMat {
        let mut acc = CMat::zeros(self.left.nrows(), self.right.nrows());
        for (k, &c) in self.coefficients.iter().enumerate() {
            acc += self.left.column(k) * self.right.column(k).transpose() * re(c);
        }
        acc
    }
}

pub fn schmidt_decomposition<S: AsRef<str>>(psi: &QuantumState, cut: &[S]) -> Result<Schmidt> {
    let m = psi.reshape(cut)?;
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let scale = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    order.retain(|&k| svd.singular_values[k] > 1e-12 * scale.max(1e-300));
    let coefficients = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left = CMat::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    // M = Σ s_k u_k v_k†, so ψ = Σ s_k |u_k⟩ ⊗ |conj(v_k)⟩ with v_k† the rows of v_t.
    let right = CMat::from_fn(vt.ncols(), order.len(), |i, j| vt[(order[j], i)]);
    Ok(Schmidt { coefficients, left, right })
}

pub fn ginibre(n: usize, m: usize, rng: &mut Rng) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(n, m, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        C64::new(a * s, b * s)
    })
}

/// Haar-distributed unitary from QR of a Ginibre matrix, phases fixed so diag(R) > 0.
pub fn haar_unitary_from(dim: usize, rng: &mut Rng) -> CMat {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_unitary(dim: usize, seed: u64) -> CMat {
    haar_unitary_from(dim, &mut stream(seed, 0))
}

pub fn random_pure(layout: SystemLayout, rng: &mut Rng) -> QuantumState {
    let d = layout.total_dim();
    let g = ginibre(d, 1, rng);
    let v = CVec::from_fn(d, |i, _| g[(i, 0)]);
    let n = v.norm();
    QuantumState::pure_unchecked(layout, v / re(n))
}

/// Random density matrix `G G† / Tr` with a Ginibre `G` of the given rank.
pub fn random_density(layout: SystemLayout, rank: usize, rng: &mut Rng) -> QuantumState {
    let d = layout.total_dim();
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t = crate::linalg::real_trace(&m);
    QuantumState::density_unchecked(layout, m / re(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Closeness {
    pub fidelity: f64,
    pub trace_distance: f64,
    pub purified_distance: f64,
}

/// `Tr √(√ρ σ √ρ)`.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    trace_norm(&(psd_factor(rho).adjoint() * psd_factor(sigma)))
}

/// `G` with `m = G G†`, keeping only eigenvalues above the eigensolver's resolution. Working with
/// factors keeps the fidelity accurate for rank-deficient inputs, where `√ρ` amplifies noise.
fn psd_factor(m: &CMat) -> CMat {
    let e = Eigh::new(m);
    let top = e.values.iter().cloned().fold(0.0, f64::max);
    let tol = m.nrows() as f64 * f64::EPSILON * top;
    let keep: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] > tol).collect();
    let mut g = CMat::zeros(m.nrows(), keep.len().max(1));
    for (j, &i) in keep.iter().enumerate() {
        g.set_column(j, &(e.vectors.column(i) * re(e.values[i].sqrt())));
    }
    g
}

/// `F + √((1 − Tr ρ)(1 − Tr σ))`, which equals `F` for normalized inputs.
pub fn generalized_fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    let a = (1.0 - crate::linalg::real_trace(rho)).max(0.0);
    let b = (1.0 - crate::linalg::real_trace(sigma)).max(0.0);
    fidelity(rho, sigma) + (a * b).sqrt()
}

pub fn closeness(rho: &QuantumState, sigma: &QuantumState) -> Result<Closeness> {
    if rho.layout().labels() != sigma.layout().labels() || rho.layout().dims() != sigma.layout().dims() {
        return Err(Error::Layout("closeness requires identical layouts".into()));
    }
    let (a, b) = (rho.to_density(), sigma.to_density());
    let f = fidelity(&a, &b);
    let fbar = generalized_fidelity(&a, &b).min(1.0);
    Ok(Closeness {
        fidelity: f,
        trace_distance: 0.5 * trace_norm_herm(&(&a - &b)),
        purified_distance: (1.0 - fbar * fbar).max(0.0).sqrt(),
    })
}

/// Maximally entangled `Φ^K` on two new labels, both tagged as ancillas.
pub fn max_entangled(k: usize, a: &str, b: &str) -> Result<QuantumState> {
    if k == 0 {
        return Err(Error::Input("K must be positive".into()));
    }
    let layout = SystemLayout::new(vec![Subsystem::new(a, k, Role::Ancilla), Subsystem::new(b, k, Role::Ancilla)])?;
    let mut v = CVec::zeros(k * k);
    let amp = re(1.0 / (k as f64).sqrt());
    for i in 0..k {
        v[i * k + i] = amp;
    }
    Ok(QuantumState::pure_unchecked(layout, v))
}

pub fn max_mixed(d: usize, label: &str) -> Result<QuantumState> {
    if d == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    let layout = SystemLayout::new(vec![Subsystem::new(label, d, Role::Ancilla)])?;
    Ok(QuantumState::density_unchecked(layout, CMat::identity(d, d) / re(d as f64)))
}

/// `(|0…0⟩ + |1…1⟩)/√2` on qubits with the given labels.
pub fn ghz<S: AsRef<str>>(labels: &[S]) -> Result<QuantumState> {
    if labels.is_empty() {
        return Err(Error::Input("GHZ needs at least one party".into()));
    }
    let layout = SystemLayout::new(labels.iter().map(|l| Subsystem::new(l.as_ref(), 2, Role::Ancilla)).collect())?;
    let d = layout.total_dim();
    let mut v = CVec::zeros(d);
    v[0] = re(std::f64::consts::FRAC_1_SQRT_2);
    v[d - 1] += re(std::f64::consts::FRAC_1_SQRT_2);
    Ok(QuantumState::pure_unchecked(layout, v))
}

pub fn basis_state(label: &str, d: usize, i: usize) -> Result<QuantumState> {
    if i >= d {
        return Err(Error::Dimension(format!("basis index {i} out of range for dimension {d}")));
    }
    let layout = SystemLayout::new(vec![Subsystem::new(label, d, Role::Ancilla)])?;
    let mut v = CVec::zeros(d);
    v[i] = re(1.0);
    Ok(QuantumState::pure_unchecked(layout, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalKind {
    MaxEntangled(usize),
    MaxMixed(usize),
    Ghz(usize),
}

pub fn canonical_state<S: AsRef<str>>(kind: CanonicalKind, labels: &[S]) -> Result<QuantumState> {
    let need = match kind {
        CanonicalKind::MaxEntangled(_) => 2,
        CanonicalKind::MaxMixed(_) => 1,
        CanonicalKind::Ghz(n) => n,
    };
    if labels.len() != need {
        return Err(Error::Input(format!("expected {need} labels, got {}", labels.len())));
    }
    match kind {
        CanonicalKind::MaxEntangled(k) => max_entangled(k, labels[0].as_ref(), labels[1].as_ref()),
        CanonicalKind::MaxMixed(d) => max_mixed(d, labels[0].as_ref()),
        CanonicalKind::Ghz(_) => ghz(labels),
    }
}

/// A partial isometry `V` (`V V† V = V`) from the joint input factors to the output factors.
#[derive(Clone, Debug)]
pub struct PartialIsometry {
    pub input_labels: Vec<String>,
    pub outputs: Vec<Subsystem>,
    pub matrix: CMat,
    pub rank: usize,
}

impl PartialIsometry {
    pub fn new(input_labels: Vec<String>, outputs: Vec<Subsystem>, matrix: CMat) -> Result<Self> {
        let out_dim: usize = outputs.iter().map(|s| s.dim).product();
        if matrix.nrows() != out_dim {
            return Err(Error::Dimension(format!("isometry has {} rows, outputs need {out_dim}", matrix.nrows())));
        }
        let rank = crate::linalg::real_trace(&(&matrix * matrix.adjoint())).round() as usize;
        Ok(PartialIsometry { input_labels, outputs, matrix, rank })
    }

    /// Deviation from the partial-isometry identity `V V† V = V`.
    pub fn defect(&self) -> f64 {
        let v = &self.matrix;
        frob2(&(v * v.adjoint() * v - v)).sqrt()
    }

    /// Deviation of `V V†` from the identity on the first `rank` rows, for row-orthonormal maps.
    pub fn row_defect(&self) -> f64 {
        let g = &self.matrix * self.matrix.adjoint();
        let mut e = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let want = if i == j && i < self.rank { 1.0 } else { 0.0 };
                e = e.max((g[(i, j)] - re(want)).norm());
            }
        }
        e
    }

    pub fn apply(&self, psi: &QuantumState) -> Result<QuantumState> {
        apply_operator(psi, &self.input_labels, &self.matrix, self.outputs.clone())
    }
}

/// Apply `op` to the joint factors `targets` of a vector state. The result places the output
/// factors first, followed by the untouched factors in their original order.
pub fn apply_operator<S: AsRef<str>>(
    psi: &QuantumState,
    targets: &[S],
    op: &CMat,
    outputs: Vec<Subsystem>,
) -> Result<QuantumState> {
    let m = psi.reshape(targets)?;
    if op.ncols() != m.nrows() {
        return Err(Error::Dimension(format!(
            "operator has {} columns, targets have dimension {}",
            op.ncols(),
            m.nrows()
        )));
    }
    let out_dim: usize = outputs.iter().map(|s| s.dim).product();
    if op.nrows() != out_dim {
        return Err(Error::Dimension(format!("operator has {} rows, outputs need {out_dim}", op.nrows())));
    }
    let rest = psi.layout().complement(targets);
    let rest_pos = psi.layout().positions(&rest)?;
    let mut subs = outputs;
    subs.extend(psi.layout().select(&rest_pos).subsystems().iter().cloned());
    let layout = SystemLayout::new(subs)?;
    let out = op * m;
    let (r, c) = (out.nrows(), out.ncols());
    let v = CVec::from_fn(r * c, |i, _| out[(i / c, i % c)]);
    Ok(QuantumState::pure_unchecked(layout, v))
}

/// Inner product `⟨φ|ψ⟩` after aligning factor order by label.
pub fn overlap(phi: &QuantumState, psi: &QuantumState) -> Result<C64> {
    let aligned = psi.permuted(&phi.layout().labels())?;
    if aligned.layout().dims() != phi.layout().dims() {
        return Err(Error::Layout("overlap requires matching dimensions".into()));
    }
    Ok(phi.pure_vector()?.dotc(aligned.pure_vector()?))
}

/// Trace norm `‖Σ_J p_J |χ_J⟩⟨χ_J| − |φ⟩⟨φ|‖₁` computed from the Gram structure of the vectors
/// without forming the dense operator. All `chis` must share `phi`'s factor order.
pub fn mixture_vs_pure_trace_norm(phi: &CVec, chis: &[(f64, CVec)]) -> f64 {
    let n = phi.len();
    let k = chis.len() + 1;
    let mut v = CMat::zeros(n, k);
    v.set_column(0, phi);
    for (j, (_, c)) in chis.iter().enumerate() {
        v.set_column(j + 1, c);
    }
    let mut weights = vec![-1.0];
    weights.extend(chis.iter().map(|(p, _)| *p));
    let qr = v.qr();
    let r = qr.r();
    let mut rd = r.clone();
    for j in 0..k {
        for i in 0..rd.nrows() {
            rd[(i, j)] *= re(weights[j]);
        }
    }
    trace_norm_herm(&(rd * r.adjoint()))
}

/// Offsets helper re-exported for modules that index factors directly.
pub fn factor_offsets(layout: &SystemLayout, labels: &[String]) -> Result<Vec<usize>> {
    Ok(subset_offsets(&layout.dims(), &layout.positions(labels)?))
}
