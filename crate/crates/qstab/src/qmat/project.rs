//! Nearest-density-matrix repair: symmetrize, diagonalize, and project the
//! spectrum onto the probability simplex. Minimizes the 2-norm distance over
//! all unit-trace PSD matrices.

use num_complex::Complex64;

use super::{eig_hermitian, tolerances, ComplexMatrix, DensityMatrix};
use crate::error::QstabError;

/// Outcome of a repair, including how much the spectrum moved.
pub struct ProjectionOutcome {
    pub state: DensityMatrix,
    /// Largest per-eigenvalue change applied by the repair.
    pub max_eigenvalue_change: f64,
}

/// Euclidean projection of a real vector onto the probability simplex
/// {x : x_i >= 0, sum x_i = 1}.
pub fn simplex_project(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut shift = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (1.0 - cumsum) / (k + 1) as f64;
        if v + candidate > 0.0 {
            shift = candidate;
        } else {
            break;
        }
    }
    values.iter().map(|&v| (v + shift).max(0.0)).collect()
}

/// Cholesky-based PSD probe with a small tolerance shift. Cheap compared to a
/// full eigensolve; used to skip the repair on states that are already fine.
fn is_psd_within_floor(a: &ComplexMatrix) -> bool {
    let n = a.dim();
    // Factor A + eps*I; success means min eigenvalue >= -eps.
    let eps = -tolerances::PSD_FLOOR * 0.1;
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = a.get(j, j).re + eps;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let dj = d.sqrt();
        l[j * n + j] = Complex64::new(dj, 0.0);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / dj;
        }
    }
    true
}

/// Repairs an approximately-Hermitian matrix into the closest physical state.
/// Trace deviation beyond the divergence threshold aborts the trajectory.
pub fn project_to_physical_detailed(a: &ComplexMatrix) -> Result<ProjectionOutcome, QstabError> {
    let sym = a.symmetrize();
    let tr = sym.trace().re;
    if (tr - 1.0).abs() > tolerances::TRACE_DIVERGENCE {
        return Err(QstabError::TrajectoryDiverged { trace: tr });
    }

    // Fast path: already Hermitian-symmetrized, unit trace, and PSD.
    if (tr - 1.0).abs() <= tolerances::PROJECTION_CHANGE && is_psd_within_floor(&sym) {
        return Ok(ProjectionOutcome {
            state: DensityMatrix::new_unchecked(sym),
            max_eigenvalue_change: 0.0,
        });
    }

    let dec = eig_hermitian(&sym)?;
    let repaired = simplex_project(&dec.eigenvalues);
    let max_change = dec
        .eigenvalues
        .iter()
        .zip(&repaired)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let state = dec.with_eigenvalues(&repaired).symmetrize();
    Ok(ProjectionOutcome {
        state: DensityMatrix::new_unchecked(state),
        max_eigenvalue_change: max_change,
    })
}

/// See [`project_to_physical_detailed`]; drops the change report.
pub fn project_to_physical(a: &ComplexMatrix) -> Result<DensityMatrix, QstabError> {
    project_to_physical_detailed(a).map(|o| o.state)
}
