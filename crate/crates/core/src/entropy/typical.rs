use crate::error::{Error, Result};
use crate::linalg::{clamp_eig, real_trace, spectrum_entropy, CMat, Eigh};
use crate::qstate::QuantumState;

/// Largest `n · log₂(dim)` accepted by [`typicality`].
pub const TYPICALITY_CAP_BITS: f64 = 14.0;

/// δ-typical subspace of `ρ^{⊗n}`, stored as a one-copy eigenbasis and a mask over strings.
#[derive(Clone, Debug)]
pub struct TypicalityData {
    pub n: usize,
    pub delta: f64,
    pub entropy: f64,
    pub eigenvalues: Vec<f64>,
    pub basis: CMat,
    /// `mask[x]` for the string `x` in base `dim`, first copy most significant.
    pub mask: Vec<bool>,
    /// `Tr(Π ρ^{⊗n})`.
    pub mass: f64,
    pub rank: usize,
}

impl TypicalityData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The projector on the n-copy space.
    pub fn projector(&self) -> CMat {
        let mut u = CMat::identity(1, 1);
        for _ in 0..self.n {
            u = u.kronecker(&self.basis);
        }
        let cols: Vec<usize> = (0..self.mask.len()).filter(|&x| self.mask[x]).collect();
        let sel = CMat::from_fn(u.nrows(), cols.len(), |i, j| u[(i, cols[j])]);
        &sel * sel.adjoint()
    }

    /// `(1−ε) 2^{n(S−δ)} ≤ Tr Π ≤ 2^{n(S+δ)}` with `1 − ε` the captured mass.
    pub fn sandwich(&self) -> (f64, f64) {
        let n = self.n as f64;
        (self.mass * (n * (self.entropy - self.delta)).exp2(), (n * (self.entropy + self.delta)).exp2())
    }
}

pub fn typicality(rho: &QuantumState, n: usize, delta: f64) -> Result<TypicalityData> {
    if n == 0 || delta.is_nan() || delta <= 0.0 {
        return Err(Error::Input("typicality needs n ≥ 1 and δ > 0".into()));
    }
    let m = rho.to_density();
    let d = m.nrows();
    if n as f64 * (d as f64).log2() > TYPICALITY_CAP_BITS {
        return Err(Error::Scale(format!("{n} copies of a {d}-dimensional state exceed 2^{TYPICALITY_CAP_BITS}")));
    }
    let e = Eigh::new(&m);
    let p: Vec<f64> = e.values.iter().map(|&v| clamp_eig(v).max(0.0)).collect();
    let s = spectrum_entropy(&p);
    let strings = d.pow(n as u32);
    let mut mask = vec![false; strings];
    let mut mass = 0.0;
    let mut rank = 0;
    for (x, slot) in mask.iter_mut().enumerate() {
        let mut rest = x;
        let mut logp = 0.0;
        let mut prob = 1.0;
        for _ in 0..n {
            let pi = p[rest % d];
            rest /= d;
            prob *= pi;
            logp += if pi > 0.0 { pi.log2() } else { f64::NEG_INFINITY };
        }
        if (-logp / n as f64 - s).abs() <= delta {
            *slot = true;
            mass += prob;
            rank += 1;
        }
    }
    Ok(TypicalityData { n, delta, entropy: s, eigenvalues: p, basis: e.vectors, mask, mass, rank })
}

fn projector_rank(p: &CMat) -> Result<usize> {
    if (p * p - p).norm() > 1e-9 * (1.0 + p.norm()) {
        return Err(Error::Input("operator is not a projector".into()));
    }
    Ok(real_trace(p).round().max(0.0) as usize)
}

/// Minimum eigenvalue of `⊗_i Π_i − Σ_i Π_i + (q−1) I` for `q` projectors on distinct factors.
///
/// The operators commute, so every joint eigenvector has an on/off pattern `b`; the eigenvalue is
/// `Π b − Σ b + q − 1`, present whenever each factor has room for its part of the pattern.
pub fn typicality_operator_inequality(projs: &[CMat]) -> Result<f64> {
    if projs.is_empty() {
        return Err(Error::Input("no projectors".into()));
    }
    if projs.len() > 20 {
        return Err(Error::Scale("too many projectors for pattern enumeration".into()));
    }
    let q = projs.len();
    let mut info = Vec::with_capacity(q);
    for p in projs {
        info.push((projector_rank(p)?, p.nrows()));
    }
    let mut best = f64::INFINITY;
    for pattern in 0u32..(1 << q) {
        let room = info.iter().enumerate().all(|(i, &(r, d))| if pattern >> i & 1 == 1 { r > 0 } else { r < d });
        if !room {
            continue;
        }
        let on = pattern.count_ones() as f64;
        let prod = if on as usize == q { 1.0 } else { 0.0 };
        best = best.min(prod - on + (q as f64 - 1.0));
    }
    Ok(best)
}

/// Dense evaluation of the same minimum eigenvalue (small dimensions only).
pub fn typicality_operator_inequality_dense(projs: &[CMat]) -> f64 {
    let dims: Vec<usize> = projs.iter().map(|p| p.nrows()).collect();
    let total: usize = dims.iter().product();
    let embed = |k: usize, op: &CMat| {
        let mut m = CMat::identity(1, 1);
        for (i, &d) in dims.iter().enumerate() {
            m = m.kronecker(&if i == k { op.clone() } else { CMat::identity(d, d) });
        }
        m
    };
    let mut op = CMat::identity(1, 1);
    for p in projs {
        op = op.kronecker(p);
    }
    for (k, p) in projs.iter().enumerate() {
        op -= embed(k, p);
    }
    op += CMat::identity(total, total) * crate::linalg::re(projs.len() as f64 - 1.0);
    Eigh::new(&op).min()
}
