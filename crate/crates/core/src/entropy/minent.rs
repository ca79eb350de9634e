use crate::error::{Error, Result};
use crate::linalg::{frob2, lambda_max, re, CMat, Eigh};
use crate::qstate::{MatrixJson, QuantumState};

use super::bipartite::Bipartite;
use super::{systems_label, EntropyReport, Quantity, SolverStatus, Witness};

/// Relative support tolerance: mass of `ρ` outside `A ⊗ supp σ` above this is a violation.
const SUPPORT_TOL: f64 = 1e-9;

fn sigma_eig(sigma: &CMat) -> (Eigh, f64) {
    let e = Eigh::new(sigma);
    let tol = 1e-12 * e.max().max(1e-300);
    (e, tol)
}

fn check_support(bp: &Bipartite, e: &Eigh, tol: f64) -> Result<()> {
    let proj_out = e.apply(|v| if v > tol { 0.0 } else { 1.0 });
    let outside = frob2(&Bipartite::apply_b(&bp.f, bp.da, bp.db, &proj_out));
    let total = frob2(&bp.f);
    if outside > SUPPORT_TOL * total.max(1e-300) {
        return Err(Error::Support(format!("Tr_A ρ has weight {:.3e} outside the support of σ", outside / total)));
    }
    Ok(())
}

/// `λ_max((I ⊗ σ)^{-1/2} ρ (I ⊗ σ)^{-1/2})` on the support of σ.
pub(crate) fn hmin_lambda(bp: &Bipartite, sigma: &CMat) -> Result<f64> {
    if sigma.nrows() != bp.db {
        return Err(Error::Dimension("σ does not match the conditioning system".into()));
    }
    let (e, tol) = sigma_eig(sigma);
    check_support(bp, &e, tol)?;
    let s = e.apply(|v| if v > tol { 1.0 / v.sqrt() } else { 0.0 });
    let y = Bipartite::apply_b(&bp.f, bp.da, bp.db, &s);
    Ok(lambda_max(&(y.adjoint() * y)))
}

fn sigma_matrix(state: &QuantumState, sigma: &QuantumState) -> Result<(Vec<String>, CMat)> {
    let r = sigma.layout().labels();
    for l in &r {
        let a = sigma.layout().subsystem(l)?;
        let b = state.layout().subsystem(l)?;
        if a.dim != b.dim {
            return Err(Error::Layout(format!("σ factor {l} has dimension {} but ρ has {}", a.dim, b.dim)));
        }
    }
    Ok((r, sigma.to_density()))
}

/// `H_min(ρ_{AR}|σ_R)` for the marginal of `state` on `a ∪ labels(σ)`.
pub fn h_min_relative_on<S: AsRef<str>>(state: &QuantumState, a: &[S], sigma: &QuantumState) -> Result<EntropyReport> {
    let (r, sm) = sigma_matrix(state, sigma)?;
    let bp = Bipartite::from_state(state, a, &r)?;
    let lambda = hmin_lambda(&bp, &sm)?;
    Ok(EntropyReport {
        quantity: Quantity::HMinRel,
        value: -lambda.log2(),
        systems: systems_label(a, &r),
        witness: Some(Witness {
            lambda: Some(lambda),
            sigma: Some(MatrixJson::from_matrix(&sm)),
            ..Default::default()
        }),
        status: SolverStatus::ClosedForm,
    })
}

/// `H_min(ρ_{AR}|σ_R)` where `R` is the set of labels of `σ` and `A` the rest of `ρ`.
pub fn h_min_relative(rho: &QuantumState, sigma: &QuantumState) -> Result<EntropyReport> {
    let a = rho.layout().complement(&sigma.layout().labels());
    h_min_relative_on(rho, &a, sigma)
}

/// `H_2(ρ_{AR}|σ_R) = −log Tr[((I⊗σ^{-1/4}) ρ (I⊗σ^{-1/4}))²]` for the marginal of `state`.
pub fn h2_collision_on<S: AsRef<str>>(state: &QuantumState, a: &[S], sigma: &QuantumState) -> Result<f64> {
    let (r, sm) = sigma_matrix(state, sigma)?;
    let bp = Bipartite::from_state(state, a, &r)?;
    let (e, tol) = sigma_eig(&sm);
    check_support(&bp, &e, tol)?;
    let s = e.apply(|v| if v > tol { v.powf(-0.25) } else { 0.0 });
    let y = Bipartite::apply_b(&bp.f, bp.da, bp.db, &s);
    Ok(-frob2(&(y.adjoint() * y)).log2())
}

pub fn h2_collision(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    let a = rho.layout().complement(&sigma.layout().labels());
    h2_collision_on(rho, &a, sigma)
}

/// Smallest eigenvalue of `λ(I ⊗ σ) − ρ` (dense; for verification at small dimension).
pub fn hmin_feasibility_margin(rho: &CMat, sigma: &CMat, lambda: f64) -> f64 {
    let da = rho.nrows() / sigma.nrows();
    let op = CMat::identity(da, da).kronecker(sigma) * re(lambda) - rho;
    Eigh::new(&op).min()
}

/// Both sides of `‖S‖₁ ≤ √(Tr σ) ‖σ^{-1/4} S σ^{-1/4}‖₂` for Hermitian `S` and positive definite `σ`.
pub fn lemma2_sides(s: &CMat, sigma: &CMat) -> (f64, f64) {
    let lhs = crate::linalg::trace_norm_herm(s);
    let q = crate::linalg::psd_pow_on_support(sigma, -0.25, 1e-14);
    let inner = &q * s * &q;
    let rhs = crate::linalg::real_trace(sigma).max(0.0).sqrt() * frob2(&inner).sqrt();
    (lhs, rhs)
}
