use crate::error::Result;
use crate::linalg::CMat;
use crate::qstate::{factor_of, QuantumState};

/// A PSD operator `ρ = F F†` on `A ⊗ B` (index `a·d_B + b`), kept in factored form so low-rank
/// marginals of large pure states never become dense.
#[derive(Clone, Debug)]
pub struct Bipartite {
    pub da: usize,
    pub db: usize,
    pub f: CMat,
}

impl Bipartite {
    /// The marginal of `state` on `a ∪ b` (all other factors traced out).
    pub fn from_state<S: AsRef<str>, T: AsRef<str>>(state: &QuantumState, a: &[S], b: &[T]) -> Result<Self> {
        let mut keep: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
        keep.extend(b.iter().map(|s| s.as_ref().to_string()));
        let f = state.marginal_factor(&keep)?;
        let da = state.layout().dim_of(a)?;
        let db = state.layout().dim_of(b)?;
        Ok(Bipartite { da, db, f })
    }

    pub fn from_dense(rho: &CMat, da: usize, db: usize) -> Self {
        Bipartite { da, db, f: factor_of(rho) }
    }

    pub fn rank_bound(&self) -> usize {
        self.f.ncols()
    }

    pub fn dense(&self) -> CMat {
        &self.f * self.f.adjoint()
    }

    /// `(I ⊗ S) W` for a `k × d_B` matrix `S` and a `d_A d_B × r` matrix `W`.
    pub fn apply_b(w: &CMat, da: usize, db: usize, s: &CMat) -> CMat {
        let r = w.ncols();
        let k = s.nrows();
        let g = CMat::from_fn(db, da * r, |b, ac| w[((ac / r) * db + b, ac % r)]);
        let h = s * g;
        CMat::from_fn(da * k, r, |i, c| h[(i % k, (i / k) * r + c)])
    }

    /// `(S ⊗ I) W` for a `k × d_A` matrix `S`.
    pub fn apply_a(w: &CMat, da: usize, db: usize, s: &CMat) -> CMat {
        let r = w.ncols();
        let k = s.nrows();
        let g = CMat::from_fn(da, db * r, |a, bc| w[(a * db + bc / r, bc % r)]);
        let h = s * g;
        CMat::from_fn(k * db, r, |i, c| h[(i / db, (i % db) * r + c)])
    }

    /// `Tr_A (W W†)`.
    pub fn ptrace_a_of(w: &CMat, da: usize, db: usize) -> CMat {
        let r = w.ncols();
        let g = CMat::from_fn(db, da * r, |b, ac| w[((ac / r) * db + b, ac % r)]);
        &g * g.adjoint()
    }

    /// `Tr_B (W W†)`.
    pub fn ptrace_b_of(w: &CMat, da: usize, db: usize) -> CMat {
        let r = w.ncols();
        let g = CMat::from_fn(da, db * r, |a, bc| w[(a * db + bc / r, bc % r)]);
        &g * g.adjoint()
    }

    pub fn rho_b(&self) -> CMat {
        Self::ptrace_a_of(&self.f, self.da, self.db)
    }

    pub fn rho_a(&self) -> CMat {
        Self::ptrace_b_of(&self.f, self.da, self.db)
    }

    /// Restrict `B` to the span of the orthonormal columns of `v` (`d_B × k`).
    pub fn compress_b(&self, v: &CMat) -> Bipartite {
        Bipartite { da: self.da, db: v.ncols(), f: Self::apply_b(&self.f, self.da, self.db, &v.adjoint()) }
    }

    pub fn compress_a(&self, v: &CMat) -> Bipartite {
        Bipartite { da: v.ncols(), db: self.db, f: Self::apply_a(&self.f, self.da, self.db, &v.adjoint()) }
    }
}
