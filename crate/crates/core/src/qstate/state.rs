use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, real_trace, CMat, CVec, Eigh, EIG_CLAMP};

use super::layout::{subset_offsets, Role, Subsystem, SystemLayout};

/// Tolerances used when validating constructed states.
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Vector(CVec),
    Density(CMat),
}

/// A state vector or density matrix tagged with its tensor layout.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    layout: SystemLayout,
    data: StateData,
}

impl QuantumState {
    /// A (possibly sub-normalized) pure state.
    pub fn pure(layout: SystemLayout, v: CVec) -> Result<Self> {
        if v.len() != layout.total_dim() {
            return Err(Error::Dimension(format!(
                "vector length {} does not match layout dimension {}",
                v.len(),
                layout.total_dim()
            )));
        }
        let n2 = v.norm_squared();
        if n2 <= 0.0 || n2 > 1.0 + TRACE_TOL {
            return Err(Error::Normalization(format!("squared norm {n2} outside (0, 1]")));
        }
        Ok(QuantumState { layout, data: StateData::Vector(v) })
    }

    /// A density matrix, validated for Hermiticity, positivity and trace.
    pub fn density(layout: SystemLayout, m: CMat) -> Result<Self> {
        let d = layout.total_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Dimension(format!("matrix is {}x{}, layout dimension {d}", m.nrows(), m.ncols())));
        }
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL {
            return Err(Error::Input(format!("matrix not Hermitian (defect {defect:.3e})")));
        }
        let tr = real_trace(&m);
        if tr <= 0.0 || tr > 1.0 + TRACE_TOL {
            return Err(Error::Normalization(format!("trace {tr} outside (0, 1]")));
        }
        let lmin = Eigh::new(&m).min();
        if lmin < -EIG_CLAMP {
            return Err(Error::Input(format!("matrix not positive semidefinite (eigenvalue {lmin:.3e})")));
        }
        Ok(QuantumState { layout, data: StateData::Density(crate::linalg::hermitize(&m)) })
    }

    pub(crate) fn density_unchecked(layout: SystemLayout, m: CMat) -> Self {
        QuantumState { layout, data: StateData::Density(m) }
    }

    pub(crate) fn pure_unchecked(layout: SystemLayout, v: CVec) -> Self {
        QuantumState { layout, data: StateData::Vector(v) }
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn is_vector(&self) -> bool {
        matches!(self.data, StateData::Vector(_))
    }

    pub fn vector(&self) -> Option<&CVec> {
        match &self.data {
            StateData::Vector(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    /// The state vector, or a `Kind` error for density-kind input.
    pub fn pure_vector(&self) -> Result<&CVec> {
        self.vector().ok_or_else(|| Error::Kind("operation requires a pure (vector) state".into()))
    }

    pub fn to_density(&self) -> CMat {
        match &self.data {
            StateData::Vector(v) => v * v.adjoint(),
            StateData::Density(m) => m.clone(),
        }
    }

    pub fn into_density(self) -> QuantumState {
        let m = self.to_density();
        QuantumState { layout: self.layout, data: StateData::Density(m) }
    }

    pub fn trace(&self) -> f64 {
        match &self.data {
            StateData::Vector(v) => v.norm_squared(),
            StateData::Density(m) => real_trace(m),
        }
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        Ok(QuantumState { layout: self.layout.relabel(from, to)?, data: self.data.clone() })
    }

    /// Apply several relabelings (each label renamed once; sources are looked up in `self`).
    pub fn relabel_many(&self, pairs: &[(String, String)]) -> Result<Self> {
        let mut subs: Vec<Subsystem> = self.layout.subsystems().to_vec();
        for (from, to) in pairs {
            let p = self.layout.position(from)?;
            subs[p].label = to.clone();
        }
        Ok(QuantumState { layout: SystemLayout::new(subs)?, data: self.data.clone() })
    }

    pub fn with_role(&self, label: &str, role: Role) -> Result<Self> {
        Ok(QuantumState { layout: self.layout.with_role(label, role)?, data: self.data.clone() })
    }

    pub fn with_roles<S: AsRef<str>>(&self, labels: &[S], role: Role) -> Result<Self> {
        let mut layout = self.layout.clone();
        for l in labels {
            layout = layout.with_role(l.as_ref(), role)?;
        }
        Ok(QuantumState { layout, data: self.data.clone() })
    }

    /// Reorder the tensor factors. `order` must name every label exactly once.
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let pos = self.layout.positions(order)?;
        if pos.len() != self.layout.len() {
            return Err(Error::Layout("permutation must list every label".into()));
        }
        let offs = subset_offsets(&self.layout.dims(), &pos);
        let layout = self.layout.select(&pos);
        let data = match &self.data {
            StateData::Vector(v) => StateData::Vector(CVec::from_fn(offs.len(), |i, _| v[offs[i]])),
            StateData::Density(m) => {
                StateData::Density(CMat::from_fn(offs.len(), offs.len(), |i, j| m[(offs[i], offs[j])]))
            }
        };
        Ok(QuantumState { layout, data })
    }

    /// Matrix `M` with `M[x, y] = ψ[x ⊗ y]` for `x` ranging over `rows` and `y` over the rest
    /// (rest in layout order). Requires a vector-kind state.
    pub fn reshape<S: AsRef<str>>(&self, rows: &[S]) -> Result<CMat> {
        let v = self.pure_vector()?;
        let rpos = self.layout.positions(rows)?;
        let rest = self.layout.complement(rows);
        let cpos = self.layout.positions(&rest)?;
        let dims = self.layout.dims();
        let ro = subset_offsets(&dims, &rpos);
        let co = subset_offsets(&dims, &cpos);
        Ok(CMat::from_fn(ro.len(), co.len(), |i, j| v[ro[i] + co[j]]))
    }

    /// The reduced state on `keep`, with factors in the order given.
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<QuantumState> {
        let kpos = self.layout.positions(keep)?;
        let layout = self.layout.select(&kpos);
        let m = match &self.data {
            StateData::Vector(_) => {
                let f = self.reshape(keep)?;
                &f * f.adjoint()
            }
            StateData::Density(rho) => {
                let rest = self.layout.complement(keep);
                let tpos = self.layout.positions(&rest)?;
                let dims = self.layout.dims();
                let ko = subset_offsets(&dims, &kpos);
                let to = subset_offsets(&dims, &tpos);
                CMat::from_fn(ko.len(), ko.len(), |i, j| to.iter().map(|&t| rho[(ko[i] + t, ko[j] + t)]).sum())
            }
        };
        Ok(QuantumState::density_unchecked(layout, m))
    }

    /// A factor `F` with `ρ_keep = F F†` (keep order as given). For vector states this is a
    /// reshape of the amplitudes; for densities it comes from the eigendecomposition.
    pub fn marginal_factor<S: AsRef<str>>(&self, keep: &[S]) -> Result<CMat> {
        match &self.data {
            StateData::Vector(_) => {
                let m = self.reshape(keep)?;
                if m.ncols() <= m.nrows() {
                    Ok(m)
                } else {
                    Ok(factor_of(&(&m * m.adjoint())))
                }
            }
            StateData::Density(_) => Ok(factor_of(&self.reduced(keep)?.to_density())),
        }
    }

    /// Eigenvalues (descending) of the reduced state on `keep`.
    pub fn marginal_spectrum<S: AsRef<str>>(&self, keep: &[S]) -> Result<Vec<f64>> {
        match &self.data {
            StateData::Vector(_) => Ok(crate::linalg::gram_spectrum(&self.reshape(keep)?)),
            StateData::Density(_) => Ok(Eigh::new(&self.reduced(keep)?.to_density()).values),
        }
    }

    /// `Tr[(ρ_keep)²]`.
    pub fn purity<S: AsRef<str>>(&self, keep: &[S]) -> Result<f64> {
        match &self.data {
            StateData::Vector(_) => {
                let m = self.reshape(keep)?;
                let g = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
                Ok(crate::linalg::frob2(&g))
            }
            StateData::Density(_) => Ok(crate::linalg::frob2(&self.reduced(keep)?.to_density())),
        }
    }
}

/// `F` with `F F† = m` for a PSD `m`, dropping numerically zero eigenvalues.
pub fn factor_of(m: &CMat) -> CMat {
    let e = Eigh::new(m);
    let keep: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] > 1e-14).collect();
    CMat::from_fn(m.nrows(), keep.len(), |i, j| e.vectors[(i, keep[j])] * e.values[keep[j]].sqrt())
}
