//! Numerical tolerances shared by every module.

/// Allowed |trace - 1| for a density matrix.
pub const TRACE: f64 = 1e-9;
/// Allowed elementwise |rho - rho^dagger| for a density matrix.
pub const HERMITIAN: f64 = 1e-10;
/// Smallest eigenvalue accepted for a positive semidefinite state.
pub const PSD: f64 = 1e-9;
/// Hermiticity required on input to the eigensolver.
pub const EIG_INPUT_HERMITIAN: f64 = 1e-8;
/// Eigenvalues below this contribute nothing to entropies.
pub const EIGEN_CLIP: f64 = 1e-15;
/// Trace drift below which snapshots are left untouched.
pub const RENORMALIZE_FLOOR: f64 = 1e-12;
/// Any snapshot eigenvalue below this aborts the integration.
pub const INSTABILITY_EIGENVALUE: f64 = -1e-6;
/// Distance from the cycle boundary treated as exactly on it.
pub const CYCLE_BOUNDARY: f64 = 1e-12;
/// Largest E/T for which exp(-E/T) is evaluated; beyond it populations are 0.
pub const MAX_BOLTZMANN_EXPONENT: f64 = 700.0;
/// E/T at or below this is the infinite-temperature limit.
pub const MIN_BOLTZMANN_EXPONENT: f64 = 1e-12;
/// Imaginary residue tolerated in quantities that must be real.
pub const IMAGINARY_RESIDUE: f64 = 1e-10;
