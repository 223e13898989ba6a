//! Euler-Maruyama integration of the stochastic master equation for a single
//! continuously measured observable, with post-step physical repair and
//! measurement-record generation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QstabError;
use crate::qmat::{
    dissipator, innovation, project_to_physical_detailed, tolerances, ComplexMatrix, DensityMatrix,
};
use crate::rng::NoiseStream;

/// One quantum control problem: Hamiltonians, measured observable, measurement
/// strength/efficiency, step size, and action bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemSpec {
    pub h0: ComplexMatrix,
    pub controls: Vec<ComplexMatrix>,
    pub observable: ComplexMatrix,
    pub kappa_c: f64,
    pub eta_c: f64,
    pub dt: f64,
    pub action_low: f64,
    pub action_high: f64,
}

impl SystemSpec {
    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), QstabError> {
        let n = self.h0.dim();
        let check_herm = |name: &str, m: &ComplexMatrix| -> Result<(), QstabError> {
            if m.dim() != n {
                return Err(QstabError::InvalidSpec(format!(
                    "{name} has dim {} but h0 has dim {n}",
                    m.dim()
                )));
            }
            if !m.is_hermitian(tolerances::HERMITICITY) {
                return Err(QstabError::InvalidSpec(format!("{name} is not Hermitian")));
            }
            Ok(())
        };
        check_herm("h0", &self.h0)?;
        for (j, h) in self.controls.iter().enumerate() {
            check_herm(&format!("controls[{j}]"), h)?;
        }
        check_herm("observable", &self.observable)?;
        if !(self.kappa_c > 0.0) {
            return Err(QstabError::InvalidSpec("kappa_c must be > 0".into()));
        }
        if !(self.eta_c >= 0.0 && self.eta_c <= 1.0) {
            return Err(QstabError::InvalidSpec("eta_c must lie in [0, 1]".into()));
        }
        if !(self.dt > 0.0) {
            return Err(QstabError::InvalidSpec("dt must be > 0".into()));
        }
        if !(self.action_low < self.action_high) {
            return Err(QstabError::InvalidSpec("action bounds must satisfy low < high".into()));
        }
        Ok(())
    }

    pub fn clamp_action(&self, u: f64) -> f64 {
        u.clamp(self.action_low, self.action_high)
    }
}

/// Result of one integrator step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub next_state: DensityMatrix,
    /// Measurement record increment dy.
    pub dy: f64,
    /// The Wiener increment actually drawn for this step.
    pub dw: f64,
    /// Whether the physical repair changed any eigenvalue beyond tolerance.
    pub projected: bool,
}

/// Normal(0, dt) Wiener increment; advances the stream counter by one.
pub fn draw_dw(noise: &mut NoiseStream, dt: f64) -> f64 {
    noise.next_normal(dt)
}

/// Deterministic (dt) part of the SME: -i[H0 + sum u_j H_j, rho] + kappa D[c]rho.
/// Exposed separately so expected-dynamics tests can integrate it.
pub fn deterministic_drift(
    spec: &SystemSpec,
    rho: &DensityMatrix,
    u: &[f64],
) -> Result<ComplexMatrix, QstabError> {
    if u.len() != spec.controls.len() {
        return Err(QstabError::Shape(format!(
            "expected {} control amplitudes, got {}",
            spec.controls.len(),
            u.len()
        )));
    }
    let mut h = spec.h0.clone();
    for (uj, hj) in u.iter().zip(&spec.controls) {
        let uj = spec.clamp_action(*uj);
        if uj != 0.0 {
            h = h.add(&hj.scale_re(uj));
        }
    }
    let comm = h.commutator(rho.matrix()).scale(Complex64::new(0.0, -1.0));
    let diss = dissipator(&spec.observable, rho)?;
    Ok(comm.add(&diss.scale_re(spec.kappa_c)))
}

/// One Euler-Maruyama step with a caller-supplied Wiener increment.
pub fn sme_step_with_dw(
    spec: &SystemSpec,
    rho: &DensityMatrix,
    u: &[f64],
    dw: f64,
) -> Result<StepOutcome, QstabError> {
    let drift = deterministic_drift(spec, rho, u)?;
    let stoch_gain = (spec.eta_c * spec.kappa_c).sqrt();
    let inn = innovation(&spec.observable, rho)?;

    let raw = rho
        .matrix()
        .add(&drift.scale_re(spec.dt))
        .add(&inn.scale_re(stoch_gain * dw));
    let repaired = project_to_physical_detailed(&raw)?;

    let c = &spec.observable;
    let expect = c.add(&c.dagger()).trace_of_product(rho.matrix()).re;
    let dy = stoch_gain * expect * spec.dt + dw;

    Ok(StepOutcome {
        next_state: repaired.state,
        dy,
        dw,
        projected: repaired.max_eigenvalue_change > tolerances::PROJECTION_CHANGE,
    })
}

/// One Euler-Maruyama step of the SME, drawing dW from the noise stream. The
/// same increment feeds both the state update and the measurement record.
pub fn sme_step(
    spec: &SystemSpec,
    rho: &DensityMatrix,
    u: &[f64],
    noise: &mut NoiseStream,
) -> Result<StepOutcome, QstabError> {
    let dw = draw_dw(noise, spec.dt);
    sme_step_with_dw(spec, rho, u, dw)
}
