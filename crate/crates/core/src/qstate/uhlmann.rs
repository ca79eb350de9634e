use crate::error::{Error, Result};
use crate::linalg::{orthonormal_complement, CMat};

use super::layout::Subsystem;
use super::ops::PartialIsometry;
use super::state::QuantumState;

/// An Uhlmann decoder together with the overlap it attains.
#[derive(Clone, Debug)]
pub struct UhlmannDecoder {
    pub isometry: PartialIsometry,
    /// `|⟨φ|(I ⊗ V)ψ⟩|`, equal to the fidelity of the fixed-system marginals.
    pub fidelity: f64,
}

/// Find the partial isometry `V` on the `movable` factors of `psi` maximizing
/// `|⟨φ|(I ⊗ V)ψ⟩|`. The fixed factors are the remaining labels of `psi`, which must appear in
/// `phi` with the same dimensions; `V` maps into the factors of `phi` that are not fixed.
///
/// `V` is isometric on the support of `ψ` on the movable factors and is extended isometrically
/// on the complement as far as the output dimension allows.
pub fn uhlmann_isometry<S: AsRef<str>>(
    psi: &QuantumState,
    phi: &QuantumState,
    movable: &[S],
) -> Result<UhlmannDecoder> {
    psi.pure_vector()?;
    phi.pure_vector()?;
    psi.layout().positions(movable)?;
    let fixed = psi.layout().complement(movable);
    for l in &fixed {
        let a = psi.layout().subsystem(l)?;
        let b = phi.layout().subsystem(l).map_err(|_| Error::Layout(format!("target lacks fixed label {l}")))?;
        if a.dim != b.dim {
            return Err(Error::Layout(format!("fixed label {l} has different dimensions")));
        }
    }
    let inputs: Vec<String> = movable.iter().map(|s| s.as_ref().to_string()).collect();
    let out_labels = phi.layout().complement(&fixed);
    let outputs: Vec<Subsystem> =
        out_labels.iter().map(|l| phi.layout().subsystem(l).cloned()).collect::<Result<_>>()?;

    let m_psi = psi_rows(psi, &fixed, &inputs)?;
    let m_phi = psi_rows(phi, &fixed, &out_labels)?;
    let (dy, dy_out) = (m_psi.ncols(), m_phi.ncols());

    // Support of ψ on the movable factors: conjugated right singular vectors of M_ψ.
    let svd = m_psi.clone().svd(false, true);
    let vt = svd.v_t.expect("svd v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > 1e-12 * smax.max(1e-300)).collect();
    let r = keep.len();
    if dy_out < r {
        return Err(Error::Dimension(format!(
            "output dimension {dy_out} cannot host the rank-{r} support of the movable factors"
        )));
    }
    // basis[y, k] = conj(v_k[y]) spans the support; ψ lives in span{basis columns}.
    let basis = CMat::from_fn(dy, r, |y, k| vt[(keep[k], y)]);
    let m_c = &m_psi * basis.map(|z| z.conj());
    let a = m_phi.adjoint() * &m_c;
    let svd_a = a.svd(true, true);
    let u = svd_a.u.expect("svd u");
    let vh = svd_a.v_t.expect("svd v_t");
    let fidelity: f64 = svd_a.singular_values.iter().sum();
    // W = Vh† U† maximizes Re Tr(A W); the decoder is V = Wᵀ on the compressed space.
    let mut v_c = (vh.adjoint() * u.adjoint()).transpose();
    if v_c.ncols() < r {
        // A had fewer singular triples than r (dy_out < r excluded above, so this cannot fire).
        return Err(Error::Dimension("degenerate Uhlmann problem".into()));
    }
    v_c = v_c.columns(0, r).into_owned();
    let mut v = &v_c * basis.adjoint();
    if dy > r && dy_out > r {
        let in_perp = orthonormal_complement(&basis);
        let out_perp = orthonormal_complement(&v_c);
        let extra = in_perp.ncols().min(out_perp.ncols());
        if extra > 0 {
            v += out_perp.columns(0, extra) * in_perp.columns(0, extra).adjoint();
        }
    }
    Ok(UhlmannDecoder { isometry: PartialIsometry::new(inputs, outputs, v)?, fidelity })
}

fn psi_rows(state: &QuantumState, rows: &[String], cols: &[String]) -> Result<CMat> {
    let mut order = rows.to_vec();
    order.extend(cols.iter().cloned());
    let aligned = state.permuted(&order)?;
    let dr: usize = aligned.layout().dim_of(rows)?;
    let dc = aligned.dim() / dr;
    let v = aligned.pure_vector()?;
    Ok(CMat::from_fn(dr, dc, |i, j| v[i * dc + j]))
}
