//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Eigenvalues in `[-EIG_CLAMP, 0)` are treated as exact zeros.
pub const EIG_CLAMP: f64 = 1e-10;

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * re(0.5)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn real_trace(m: &CMat) -> f64 {
    m.trace().re
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Eigh {
    pub fn new(m: &CMat) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Eigh { values: vec![], vectors: CMat::zeros(0, 0) };
        }
        if n == 1 {
            return Eigh { values: vec![m[(0, 0)].re], vectors: CMat::identity(1, 1) };
        }
        // The iterative eigensolver does not terminate on non-finite input.
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Eigh { values: vec![f64::NAN; n], vectors: CMat::identity(n, n) };
        }
        let se = hermitize(m).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
        let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let vectors = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
        Eigh { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = re(f(self.values[j]));
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Columns of the eigenvectors whose eigenvalue exceeds `tol`.
    pub fn support(&self, tol: f64) -> CMat {
        let keep: Vec<usize> = (0..self.values.len()).filter(|&k| self.values[k] > tol).collect();
        CMat::from_fn(self.vectors.nrows(), keep.len(), |i, j| self.vectors[(i, keep[j])])
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&v| v > tol).count()
    }
}

pub fn clamp_eig(v: f64) -> f64 {
    if (-EIG_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

pub fn lambda_max(m: &CMat) -> f64 {
    Eigh::new(m).max()
}

pub fn psd_sqrt(m: &CMat) -> CMat {
    Eigh::new(m).apply(|v| v.max(0.0).sqrt())
}

/// `m^p` restricted to eigenvalues above `tol` (zero elsewhere).
pub fn psd_pow_on_support(m: &CMat, p: f64, tol: f64) -> CMat {
    Eigh::new(m).apply(|v| if v > tol { v.powf(p) } else { 0.0 })
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm_herm(m: &CMat) -> f64 {
    Eigh::new(m).values.iter().map(|v| v.abs()).sum()
}

pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Sum of squared moduli, i.e. `Tr(m m†)`.
pub fn frob2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Orthonormal basis (as columns) of the orthogonal complement of the column span of `v`,
/// assuming the columns of `v` are already orthonormal.
pub fn orthonormal_complement(v: &CMat) -> CMat {
    let n = v.nrows();
    let proj = CMat::identity(n, n) - v * v.adjoint();
    Eigh::new(&proj).support(0.5)
}

/// Squared singular values of `m`, sorted descending: the spectrum of `m m†`.
pub fn gram_spectrum(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let g = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    Eigh::new(&g).values.into_iter().map(|v| v.max(0.0)).collect()
}

/// Shannon-type entropy in bits of a nonnegative spectrum; zero and clamped entries ignored.
pub fn spectrum_entropy(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|&v| clamp_eig(v)).filter(|&v| v > 0.0).map(|v| -v * v.log2()).sum()
}
