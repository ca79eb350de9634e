//! Optimized conditional min-entropy `H_min(A|B) = max_σ H_min(ρ_AB|σ_B)`.
//!
//! The primal problem is `min Tr Y` subject to `I ⊗ Y ⪰ ρ`; its dual is `max Tr(ρX)` subject to
//! `X ⪰ 0`, `Tr_A X = I`. Every answer is reported with a feasible `σ` (primal value) and a
//! feasible `X` (dual value), so the gap in bits is certified rather than estimated.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{frob2, lambda_max, re, real_trace, CMat, Eigh};
use crate::qstate::{factor_of, ginibre, MatrixJson, QuantumState};
use crate::rng::stream;

use super::bipartite::Bipartite;
use super::{systems_label, EntropyReport, Quantity, SolverStatus, Witness};

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target certified gap in bits.
    pub tol_bits: f64,
    /// Iteration cap per first-order restart.
    pub max_iter: usize,
    /// Number of first-order starting points (two deterministic, the rest random).
    pub restarts: usize,
    /// Largest compressed dimension `d_A d_B` handled by the dense barrier method.
    pub dense_limit: usize,
    /// Largest compressed `d_B` handled by the barrier method.
    pub newton_b_limit: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol_bits: 1e-9, max_iter: 400, restarts: 8, dense_limit: 256, newton_b_limit: 16, seed: 0x5EED }
    }
}

#[derive(Clone, Debug)]
pub struct CondSolution {
    /// Primal value `λ_max((I⊗σ)^{-1/2} ρ (I⊗σ)^{-1/2})` at the returned σ.
    pub lambda: f64,
    /// Dual value `Tr(ρX)` of a feasible `X`; `dual ≤ λ* ≤ lambda`.
    pub dual: f64,
    /// Optimizer on the full conditioning space.
    pub sigma: CMat,
    pub gap_bits: f64,
    pub closed_form: bool,
}

impl CondSolution {
    pub fn value(&self) -> f64 {
        -self.lambda.log2()
    }
}

struct Candidate {
    sigma: CMat,
    lambda: f64,
    dual: f64,
}

/// Value of the dual objective after scaling `X₀ = W W†` to satisfy `Tr_A X = Π`.
fn dual_value(bp: &Bipartite, w: &CMat) -> f64 {
    let z = Bipartite::ptrace_a_of(w, bp.da, bp.db);
    let ez = Eigh::new(&z);
    let tol = 1e-13 * ez.max().max(1e-300);
    let zm = ez.apply(|v| if v > tol { 1.0 / v.sqrt() } else { 0.0 });
    let w2 = Bipartite::apply_b(w, bp.da, bp.db, &zm);
    frob2(&(bp.f.adjoint() * w2))
}

/// Primal value at σ (full rank on the compressed space) and the dual value of the
/// complementary-slackness candidate built from the top eigenvectors of `G(σ)`.
fn certificate(bp: &Bipartite, sigma: &CMat, weights: Option<&[f64]>) -> (f64, f64) {
    let e = Eigh::new(sigma);
    let floor = 1e-300;
    let s_half = e.apply(|v| 1.0 / v.max(floor).sqrt());
    let s_inv = e.apply(|v| 1.0 / v.max(floor));
    let y = Bipartite::apply_b(&bp.f, bp.da, bp.db, &s_half);
    let eg = Eigh::new(&(y.adjoint() * &y));
    let l0 = eg.max();
    let r = eg.values.len();
    let w: Vec<f64> = match weights {
        Some(w) => w.to_vec(),
        None => eg.values.iter().map(|&l| if l >= l0 * (1.0 - 1e-8) { 1.0 } else { 0.0 }).collect(),
    };
    let sel: Vec<usize> = (0..r).filter(|&k| w[k] > 1e-14).collect();
    let c = CMat::from_fn(r, sel.len(), |i, j| eg.vectors[(i, sel[j])] * re(w[sel[j]].sqrt()));
    let u = Bipartite::apply_b(&bp.f, bp.da, bp.db, &s_inv) * c;
    (l0, dual_value(bp, &u))
}

fn gap_bits(primal: f64, dual: f64) -> f64 {
    if dual <= 0.0 {
        f64::INFINITY
    } else {
        (primal / dual).log2().max(0.0)
    }
}

fn normalized(m: &CMat) -> CMat {
    let h = crate::linalg::hermitize(m);
    let t = real_trace(&h);
    h / re(t)
}

fn kron_identity_left(da: usize, y: &CMat) -> CMat {
    CMat::identity(da, da).kronecker(y)
}

fn barrier_dual(rho: &CMat, s_inv: &CMat, da: usize, db: usize) -> f64 {
    let z = CMat::from_fn(db, db, |b, b2| (0..da).map(|a| s_inv[(a * db + b, a * db + b2)]).sum());
    let zm = Eigh::new(&crate::linalg::hermitize(&z)).apply(|v| if v > 1e-300 { 1.0 / v.sqrt() } else { 0.0 });
    let k = kron_identity_left(da, &zm);
    (rho * (&k * s_inv * &k)).trace().re
}

/// Log-det barrier path following on `min Tr Y, I ⊗ Y − ρ ≻ 0`.
fn barrier(bp: &Bipartite, tol_bits: f64) -> Option<Candidate> {
    let (da, db) = (bp.da, bp.db);
    let d = da * db;
    let rho = bp.dense();
    let lmax = lambda_max(&rho);
    let mut y = CMat::identity(db, db) * re(1.1 * lmax + 1e-14);
    let mut t = d as f64 / real_trace(&y);
    let mut s_inv = CMat::zeros(d, d);
    let mut best_dual = 0.0f64;
    let mut best_primal = f64::INFINITY;
    let mut best_sigma = normalized(&y);
    for _outer in 0..80 {
        let mut centered = false;
        for _newton in 0..50 {
            let s = kron_identity_left(da, &y) - &rho;
            s_inv = s.cholesky()?.inverse();
            let tra = CMat::from_fn(db, db, |b, b2| (0..da).map(|a| s_inv[(a * db + b, a * db + b2)]).sum());
            let g = CMat::identity(db, db) * re(t) - tra;
            let n = db * db;
            let mut tm = CMat::zeros(n, n);
            for a in 0..da {
                for a1 in 0..da {
                    for beta in 0..db {
                        for c in 0..db {
                            let x = s_inv[(a * db + beta, a1 * db + c)];
                            if x.norm_sqr() == 0.0 {
                                continue;
                            }
                            for c2 in 0..db {
                                for beta2 in 0..db {
                                    tm[(beta * db + beta2, c * db + c2)] += x * s_inv[(a1 * db + c2, a * db + beta2)];
                                }
                            }
                        }
                    }
                }
            }
            let rhs = CMat::from_fn(n, 1, |i, _| -g[(i / db, i % db)]);
            let h = tm.lu().solve(&rhs)?;
            let hm = crate::linalg::hermitize(&CMat::from_fn(db, db, |i, j| h[(i * db + j, 0)]));
            let dec2 = -(&g * &hm).trace().re;
            if dec2.is_nan() || dec2 <= 1e-10 {
                centered = true;
                break;
            }
            let mut step = if dec2.sqrt() < 0.25 { 1.0 } else { 1.0 / (1.0 + dec2.sqrt()) };
            let mut moved = false;
            for _ in 0..60 {
                let cand = &y + &hm * re(step);
                if (kron_identity_left(da, &cand) - &rho).cholesky().is_some() {
                    y = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        // X = S⁻¹/t is dual feasible after rescaling; S grows ill-conditioned along the path, so
        // keep the best value seen rather than the last.
        best_dual = best_dual.max(barrier_dual(&rho, &s_inv, da, db));
        let sigma = normalized(&y);
        let (lambda, cert_dual) = certificate(bp, &sigma, None);
        best_dual = best_dual.max(cert_dual);
        if lambda < best_primal {
            best_primal = lambda;
            best_sigma = sigma;
        }
        // Rounding noise eventually prevents centering; the best pair so far is then final.
        if gap_bits(best_primal, best_dual) <= tol_bits || !centered || (d as f64) / t < 1e-14 * real_trace(&y) {
            break;
        }
        t *= 10.0;
    }
    Some(Candidate { sigma: best_sigma, lambda: best_primal, dual: best_dual })
}

/// Smoothed objective `μ ln Σ_k exp(ln λ_k / μ)` and its softmax weights.
fn smoothed(values: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let logs: Vec<f64> = values.iter().map(|&l| l.max(1e-300).ln()).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ex: Vec<f64> = logs.iter().map(|&x| ((x - top) / mu).exp()).collect();
    let z: f64 = ex.iter().sum();
    (top + mu * z.ln(), ex.iter().map(|e| e / z).collect())
}

struct Eval {
    f: f64,
    weights: Vec<f64>,
    lambdas: Vec<f64>,
    vectors: CMat,
    s_inv: CMat,
}

fn evaluate(bp: &Bipartite, sigma: &CMat, mu: f64) -> Eval {
    let e = Eigh::new(sigma);
    let s_half = e.apply(|v| 1.0 / v.max(1e-300).sqrt());
    let s_inv = e.apply(|v| 1.0 / v.max(1e-300));
    let y = Bipartite::apply_b(&bp.f, bp.da, bp.db, &s_half);
    let eg = Eigh::new(&(y.adjoint() * y));
    let (f, weights) = smoothed(&eg.values, mu);
    Eval { f, weights, lambdas: eg.values, vectors: eg.vectors, s_inv }
}

/// Mirror descent (matrix exponentiated gradient) on the smoothed largest log-eigenvalue.
fn first_order(bp: &Bipartite, start: CMat, opts: &SolverOptions, best: &mut Candidate) {
    let mut sigma = start;
    let mut mu = 0.05;
    let mut ev = evaluate(bp, &sigma, mu);
    let mut eta = f64::NAN;
    for it in 0..opts.max_iter {
        let sel: Vec<usize> = (0..ev.weights.len()).filter(|&k| ev.weights[k] > 1e-14).collect();
        let c = CMat::from_fn(ev.vectors.nrows(), sel.len(), |i, j| {
            let k = sel[j];
            ev.vectors[(i, k)] * re((ev.weights[k] / ev.lambdas[k].max(1e-300)).sqrt())
        });
        let u = Bipartite::apply_b(&bp.f, bp.da, bp.db, &ev.s_inv) * c;
        let grad = crate::linalg::hermitize(&Bipartite::ptrace_a_of(&u, bp.da, bp.db));
        if it % 10 == 0 {
            let (l, d) = certificate(bp, &sigma, Some(&ev.weights));
            if l < best.lambda {
                best.lambda = l;
                best.sigma = sigma.clone();
            }
            best.dual = best.dual.max(d);
            if gap_bits(best.lambda, best.dual) <= opts.tol_bits {
                return;
            }
        }
        if eta.is_nan() {
            eta = 0.2 / lambda_max(&grad).max(1e-300);
        }
        let log_sigma = Eigh::new(&sigma).apply(|v| v.max(1e-300).ln());
        let mut accepted = false;
        for _ in 0..40 {
            let el = Eigh::new(&(&log_sigma + &grad * re(eta)));
            let top = el.max();
            let cand = normalized(&el.apply(|v| (v - top).exp()));
            let ec = evaluate(bp, &cand, mu);
            if ec.f.is_finite() && ec.f < ev.f {
                let improvement = ev.f - ec.f;
                sigma = cand;
                ev = ec;
                eta *= 1.5;
                accepted = true;
                if improvement < 1e-3 * mu && mu > 1e-10 {
                    mu = (mu * 0.3).max(1e-10);
                    ev = evaluate(bp, &sigma, mu);
                }
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            if mu <= 1e-10 {
                break;
            }
            mu = (mu * 0.3).max(1e-10);
            ev = evaluate(bp, &sigma, mu);
        }
    }
    let (l, d) = certificate(bp, &sigma, Some(&ev.weights));
    if l < best.lambda {
        best.lambda = l;
        best.sigma = sigma;
    }
    best.dual = best.dual.max(d);
}

fn random_start(db: usize, seed: u64, k: u64) -> CMat {
    let mut rng = stream(seed, k);
    let g = ginibre(db, db, &mut rng);
    let eps: f64 = rng.random_range(0.05..0.5);
    normalized(&(&g * g.adjoint() + CMat::identity(db, db) * re(eps)))
}

/// Orthonormal basis of the support of `ρ_B`. Large conditioning spaces with a low-rank factor use
/// a thin SVD of `ρ_B`'s own factor instead of a dense eigendecomposition.
fn support_b(bp: &Bipartite) -> CMat {
    let r = bp.f.ncols();
    if bp.db > 256 && bp.da * r < bp.db {
        let g = CMat::from_fn(bp.db, bp.da * r, |b, ac| bp.f[((ac / r) * bp.db + b, ac % r)]);
        let svd = g.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> =
            (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i].powi(2) > 1e-12 * top * top).collect();
        return CMat::from_fn(bp.db, keep.len(), |i, j| u[(i, keep[j])]);
    }
    let eb = Eigh::new(&bp.rho_b());
    eb.support(1e-12 * eb.max())
}

/// Solve the conditional min-entropy problem for `ρ = F F†` on `A ⊗ B`.
pub fn solve_conditional(bp: &Bipartite, opts: &SolverOptions) -> Result<CondSolution> {
    if frob2(&bp.f) <= 0.0 {
        return Err(Error::Input("zero operator".into()));
    }
    let vb = support_b(bp);
    let b1 = bp.compress_b(&vb);
    let ea = Eigh::new(&b1.rho_a());
    let va = ea.support(1e-12 * ea.max());
    let mut c = b1.compress_a(&va);
    if c.f.ncols() > c.da * c.db {
        c.f = factor_of(&c.dense());
    }
    let expand = |s: &CMat| &vb * s * vb.adjoint();
    let finish = |cand: Candidate, closed: bool| CondSolution {
        lambda: cand.lambda,
        dual: cand.dual,
        sigma: expand(&cand.sigma),
        gap_bits: gap_bits(cand.lambda, cand.dual),
        closed_form: closed,
    };

    if c.db == 1 || c.f.ncols() == 1 {
        // Trivial conditioning, or a pure input where σ ∝ √ρ_B is optimal: λ = (Tr √ρ_B)².
        let sigma = if c.db == 1 { CMat::identity(1, 1) } else { normalized(&crate::linalg::psd_sqrt(&c.rho_b())) };
        let (lambda, dual) = certificate(&c, &sigma, None);
        return Ok(finish(Candidate { sigma, lambda, dual }, true));
    }

    let sigma0 = normalized(&c.rho_b());
    let (l0, d0) = certificate(&c, &sigma0, None);
    let mut best = Candidate { sigma: sigma0, lambda: l0, dual: d0 };
    if gap_bits(best.lambda, best.dual) <= opts.tol_bits {
        return Ok(finish(best, false));
    }

    if c.db <= opts.newton_b_limit && c.da * c.db <= opts.dense_limit {
        if let Some(cand) = barrier(&c, opts.tol_bits) {
            if cand.lambda < best.lambda {
                best.lambda = cand.lambda;
                best.sigma = cand.sigma;
            }
            best.dual = best.dual.max(cand.dual);
            if gap_bits(best.lambda, best.dual) <= opts.tol_bits {
                return Ok(finish(best, false));
            }
        }
    }

    let db = c.db;
    let mut starts = vec![best.sigma.clone(), CMat::identity(db, db) / re(db as f64)];
    for k in 2..opts.restarts.max(2) {
        starts.push(random_start(db, opts.seed, k as u64));
    }
    for s in starts.into_iter().take(opts.restarts.max(1)) {
        first_order(&c, s, opts, &mut best);
        if gap_bits(best.lambda, best.dual) <= opts.tol_bits {
            break;
        }
    }
    Ok(finish(best, false))
}

fn report(sol: &CondSolution, quantity: Quantity, sign: f64, systems: String, tol: f64) -> EntropyReport {
    let status = if sol.closed_form && sol.gap_bits <= tol {
        SolverStatus::ClosedForm
    } else if sol.gap_bits <= tol {
        SolverStatus::Converged
    } else {
        SolverStatus::CertificateGap(sol.gap_bits)
    };
    EntropyReport {
        quantity,
        value: sign * sol.value(),
        systems,
        witness: Some(Witness {
            sigma: Some(MatrixJson::from_matrix(&sol.sigma)),
            lambda: Some(sol.lambda),
            gap_bits: Some(sol.gap_bits),
            ..Default::default()
        }),
        status,
    }
}

/// `H_min(A|B)` of the marginal of `state` on `a ∪ b`, with an explicit solver configuration.
pub fn h_min_conditional_on<S: AsRef<str>, T: AsRef<str>>(
    state: &QuantumState,
    a: &[S],
    b: &[T],
    opts: &SolverOptions,
) -> Result<(EntropyReport, CondSolution)> {
    let bp = Bipartite::from_state(state, a, b)?;
    let sol = solve_conditional(&bp, opts)?;
    // Certificates are accurate to floating-point level; the reported status uses 1e-6 bits.
    Ok((report(&sol, Quantity::HMinCond, 1.0, systems_label(a, b), 1e-6), sol))
}

/// `H_min(A|B)` where `B = cond` and `A` is every other factor of `rho`.
pub fn h_min_conditional<S: AsRef<str>>(rho: &QuantumState, cond: &[S]) -> Result<EntropyReport> {
    let a = rho.layout().complement(cond);
    if a.is_empty() {
        return Err(Error::Layout("conditional min-entropy needs a nonempty A".into()));
    }
    Ok(h_min_conditional_on(rho, &a, cond, &SolverOptions::default())?.0)
}

/// `H_max(A|B) = −H_min(A|C)` for a pure state, `C` the complement of `A ∪ B`.
pub fn h_max_conditional<S: AsRef<str>, T: AsRef<str>>(psi: &QuantumState, a: &[S], b: &[T]) -> Result<EntropyReport> {
    psi.pure_vector()?;
    let mut ab: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
    ab.extend(b.iter().map(|s| s.as_ref().to_string()));
    psi.layout().positions(&ab)?;
    let c = psi.layout().complement(&ab);
    let bp = Bipartite::from_state(psi, a, &c)?;
    let sol = solve_conditional(&bp, &SolverOptions::default())?;
    Ok(report(&sol, Quantity::HMaxCond, -1.0, systems_label(a, b), 1e-6))
}
