//! Dense complex linear algebra for small Hilbert spaces (dim <= 16) and the
//! quantum-specific primitives the rest of the crate consumes: superoperators,
//! trace distance, and nearest-density-matrix repair.

mod eig;
mod project;

pub use eig::{eig_hermitian, SpectralDecomposition};
pub use project::{project_to_physical, project_to_physical_detailed, simplex_project};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QstabError;

/// Numerical tolerances used across the crate, kept in one place.
pub mod tolerances {
    /// Max allowed |A - A'| entry for a matrix to count as Hermitian.
    pub const HERMITICITY: f64 = 1e-10;
    /// Max allowed |Tr(rho) - 1| for a density matrix.
    pub const UNIT_TRACE: f64 = 1e-10;
    /// Smallest eigenvalue a density matrix may carry.
    pub const PSD_FLOOR: f64 = -1e-10;
    /// Max reconstruction error for a spectral decomposition.
    pub const EIG_RECONSTRUCTION: f64 = 1e-9;
    /// Purity slack when checking that a target state is pure.
    pub const PURITY: f64 = 1e-9;
    /// Trace deviation beyond which the integrator is considered diverged.
    pub const TRACE_DIVERGENCE: f64 = 0.5;
    /// Eigenvalue change above which a repair counts as a real projection.
    pub const PROJECTION_CHANGE: f64 = 1e-12;
    /// Per-element off-diagonal magnitude (relative to the matrix scale) at
    /// which the Jacobi sweep stops.
    pub const JACOBI_OFFDIAG: f64 = 1e-14;
    /// Sweep cap for the Jacobi eigensolver.
    pub const JACOBI_MAX_SWEEPS: usize = 100;
}

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from row-major data; rejects non-square input.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self, QstabError> {
        if data.len() != dim * dim {
            return Err(QstabError::Shape(format!(
                "expected {}x{} = {} entries, got {}",
                dim,
                dim,
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Tr(self * other) without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |A_ij - conj(A_ji)| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// (A + A')/2.
    pub fn symmetrize(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }
}

/// Kronecker product with `a` as the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for ia in 0..na {
        for ja in 0..na {
            let av = a.get(ia, ja);
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..nb {
                for jb in 0..nb {
                    out.set(ia * nb + ib, ja * nb + jb, av * b.get(ib, jb));
                }
            }
        }
    }
    out
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

/// Hermitian, unit-trace, PSD matrix: a physical quantum state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates all three invariants before wrapping.
    pub fn try_new(m: ComplexMatrix) -> Result<Self, QstabError> {
        let herm = m.hermiticity_defect();
        if herm > tolerances::HERMITICITY {
            return Err(QstabError::NotPhysical(format!(
                "hermiticity defect {herm:.3e}"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tolerances::UNIT_TRACE || tr.im.abs() > tolerances::UNIT_TRACE {
            return Err(QstabError::NotPhysical(format!("trace {tr}")));
        }
        let dec = eig_hermitian(&m)?;
        let min_eig = dec.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eig < tolerances::PSD_FLOOR {
            return Err(QstabError::NotPhysical(format!(
                "smallest eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps without validation; for internal paths that already guarantee
    /// physicality (e.g. the output of the projection).
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// |psi><psi| from an (unnormalized) ket.
    pub fn pure_from_ket(ket: &[Complex64]) -> Self {
        let norm: f64 = ket.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let n = ket.len();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, ket[i] * ket[j].conj() / (norm * norm));
            }
        }
        Self(m)
    }

    /// Maximally mixed state I/n.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.0.trace_of_product(&self.0).re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= tolerances::PURITY
    }
}

/// Measurement back-action D[c]rho = c rho c' - {c'c, rho}/2.
pub fn dissipator(c: &ComplexMatrix, rho: &DensityMatrix) -> Result<ComplexMatrix, QstabError> {
    let r = rho.matrix();
    if c.dim() != r.dim() {
        return Err(QstabError::Shape(format!(
            "dissipator: dim {} vs {}",
            c.dim(),
            r.dim()
        )));
    }
    let cd = c.dagger();
    let cdc = cd.matmul(c);
    let gain = c.matmul(r).matmul(&cd);
    let back = cdc.matmul(r).add(&r.matmul(&cdc)).scale_re(0.5);
    Ok(gain.sub(&back))
}

/// Information-gain term H[c]rho = c rho + rho c' - Tr[(c + c') rho] rho.
pub fn innovation(c: &ComplexMatrix, rho: &DensityMatrix) -> Result<ComplexMatrix, QstabError> {
    let r = rho.matrix();
    if c.dim() != r.dim() {
        return Err(QstabError::Shape(format!(
            "innovation: dim {} vs {}",
            c.dim(),
            r.dim()
        )));
    }
    let cd = c.dagger();
    let expect = c.add(&cd).trace_of_product(r).re;
    Ok(c.matmul(r).add(&r.matmul(&cd)).sub(&r.scale_re(expect)))
}

/// 1 - Re Tr(rho_d rho) for a pure target rho_d, clamped into [0, 1].
pub fn trace_distance_to_target(
    target: &DensityMatrix,
    rho: &DensityMatrix,
) -> Result<f64, QstabError> {
    if target.dim() != rho.dim() {
        return Err(QstabError::Shape(format!(
            "trace distance: dim {} vs {}",
            target.dim(),
            rho.dim()
        )));
    }
    let d = 1.0 - target.matrix().trace_of_product(rho.matrix()).re;
    Ok(d.clamp(0.0, 1.0))
}

#[cfg(test)]
pub(crate) mod tests;
