//! The shipped quantum control systems.

use num_complex::Complex64;

use crate::error::QstabError;
use crate::qmat::{kron, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix};
use crate::sme::SystemSpec;

/// One catalog entry: system, pure target state, and the default episode
/// horizon used during training.
#[derive(Clone, Debug)]
pub struct SystemCatalogEntry {
    pub name: &'static str,
    pub system: SystemSpec,
    pub target: DensityMatrix,
    pub default_max_time: f64,
}

/// Symmetric two-qubit Bell stabilization: sigma_y rotations per qubit under a
/// joint sigma_z measurement.
pub fn bell2q() -> SystemCatalogEntry {
    let i2 = ComplexMatrix::identity(2);
    let system = SystemSpec {
        h0: ComplexMatrix::zeros(4),
        controls: vec![kron(&pauli_y(), &i2), kron(&i2, &pauli_y())],
        observable: kron(&pauli_z(), &i2).add(&kron(&i2, &pauli_z())),
        kappa_c: 1.0,
        eta_c: 1.0,
        dt: 0.001,
        action_low: -1.0,
        action_high: 1.0,
    };
    let target = bell_target();
    SystemCatalogEntry { name: "bell2q", system, target, default_max_time: 20.0 }
}

/// (|01> + |10>)/sqrt(2).
pub fn bell_target() -> DensityMatrix {
    let z = Complex64::new(0.0, 0.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure_from_ket(&[z, h, h, z])
}

/// Three-qubit GHZ stabilization under a degenerate two-pair correlation
/// measurement.
pub fn ghz3q() -> SystemCatalogEntry {
    let i2 = ComplexMatrix::identity(2);
    let sx = pauli_x();
    let sz = pauli_z();
    let observable = kron(&kron(&sz, &sz), &i2)
        .scale_re(2.0)
        .add(&kron(&i2, &kron(&sz, &sz)));
    let h1 = kron(&kron(&i2, &i2), &sx).add(&kron(&kron(&sx, &sx), &i2));
    let h2 = kron(&kron(&sx, &i2), &i2).add(&kron(&i2, &kron(&sx, &sx)));
    let system = SystemSpec {
        h0: ComplexMatrix::diag(&[1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0]),
        controls: vec![h1, h2],
        observable,
        kappa_c: 1.0,
        eta_c: 1.0,
        dt: 0.001,
        action_low: -1.0,
        action_high: 1.0,
    };
    SystemCatalogEntry { name: "ghz3q", system, target: ghz_target(3), default_max_time: 40.0 }
}

/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
pub fn ghz_target(n_qubits: usize) -> DensityMatrix {
    let dim = 1usize << n_qubits;
    let mut ket = vec![Complex64::new(0.0, 0.0); dim];
    ket[0] = Complex64::new(1.0, 0.0);
    ket[dim - 1] = Complex64::new(1.0, 0.0);
    DensityMatrix::pure_from_ket(&ket)
}

pub fn by_name(name: &str) -> Result<SystemCatalogEntry, QstabError> {
    match name {
        "bell2q" => Ok(bell2q()),
        "ghz3q" => Ok(ghz3q()),
        _ => Err(QstabError::Config(format!(
            "unknown system '{name}' (available: bell2q, ghz3q)"
        ))),
    }
}

pub const SYSTEM_NAMES: [&str; 2] = ["bell2q", "ghz3q"];
