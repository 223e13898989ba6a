//! Hermitian eigensolver via cyclic Jacobi rotations. Dimensions never exceed
//! 16 here, where Jacobi is robust and fast enough.

use num_complex::Complex64;

use super::{tolerances, ComplexMatrix};
use crate::error::QstabError;

/// Eigenvalues in descending order with the matching unitary of column
/// eigenvectors: A = U diag(lambda) U'.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// U diag(lambda) U'.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let scaled = u.matmul(&ComplexMatrix::diag(&self.eigenvalues));
        scaled.matmul(&u.dagger())
    }

    /// Rebuild with a replacement spectrum in the same eigenbasis.
    pub fn with_eigenvalues(&self, eigenvalues: &[f64]) -> ComplexMatrix {
        let u = &self.eigenvectors;
        u.matmul(&ComplexMatrix::diag(eigenvalues)).matmul(&u.dagger())
    }
}

fn offdiag_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s
}

/// Diagonalizes a Hermitian matrix. Errors if the input is visibly
/// non-Hermitian or the sweep cap is hit before convergence.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<SpectralDecomposition, QstabError> {
    let defect = a.hermiticity_defect();
    if defect > 1e-8 {
        return Err(QstabError::NotHermitian(defect));
    }
    let n = a.dim();
    let mut m = a.symmetrize();
    let mut v = ComplexMatrix::identity(n);

    let scale = m.max_abs().max(1.0);
    // Squared-norm threshold for off-diagonal elements of magnitude
    // JACOBI_OFFDIAG * scale each.
    let per_element = tolerances::JACOBI_OFFDIAG * scale;
    let stop = per_element * per_element * (n * n) as f64;

    let mut converged = false;
    for _sweep in 0..tolerances::JACOBI_MAX_SWEEPS {
        if offdiag_norm_sqr(&m) <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && offdiag_norm_sqr(&m) > stop {
        return Err(QstabError::EigNoConvergence);
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m.get(i, i).re, i)).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let eigenvalues: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for row in 0..n {
            eigenvectors.set(row, new_col, v.get(row, old_col));
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// One complex Jacobi rotation zeroing the (p, q) element.
///
/// The (p, q) block is phased into a real symmetric block by D = diag(1,
/// conj(phase)) and then rotated by the classical angle, so the combined
/// unitary is U = D R applied to columns p and q.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;

    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
    let (s, c) = theta.sin_cos();
    let pc = phase.conj();

    // u_pp = c, u_pq = -s, u_qp = pc*s, u_qq = pc*c
    let n = m.dim();

    // A <- A U (column mix)
    for i in 0..n {
        let aip = m.get(i, p);
        let aiq = m.get(i, q);
        m.set(i, p, aip * c + aiq * (pc * s));
        m.set(i, q, aip * (-s) + aiq * (pc * c));
    }
    // A <- U' A (row mix); U' rows: [c, phase*s], [-s, phase*c]
    for j in 0..n {
        let apj = m.get(p, j);
        let aqj = m.get(q, j);
        m.set(p, j, apj * c + aqj * (phase * s));
        m.set(q, j, apj * (-s) + aqj * (phase * c));
    }
    // Round-off cleanup on the targeted element.
    m.set(p, q, Complex64::new(0.0, 0.0));
    m.set(q, p, Complex64::new(0.0, 0.0));

    // V <- V U
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c + viq * (pc * s));
        v.set(i, q, vip * (-s) + viq * (pc * c));
    }
}
