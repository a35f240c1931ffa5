//! Open-system simulation of a two-qubit autonomous thermal machine driving a
//! two-qubit external system.
//!
//! The machine qubits `M1`, `M2` each see a thermal bosonic bath through a local
//! Lindblad dissipator; the external qubits `S1`, `S2` couple to the machine only
//! through the resonant exchange `|0110> <-> |1001>`. On top of the integrated
//! trajectories the crate computes heats, effective and virtual temperatures,
//! entropy production, trace-distance non-Markovianity, mutual information,
//! concurrence and relative-entropy coherence.
//!
//! Module map:
//! - [`qcore`]: dense complex matrices, density matrices, spectra, entropies.
//! - [`model`]: scenario parameters, operators, initial states.
//! - [`dynamics`]: RK4 integration and the Liouvillian exponential reference.
//! - [`thermo`]: heats, temperatures, cycle classification, entropy production.
//! - [`infomeasures`]: mutual information, BLP measure, concurrence, coherence.
//! - [`series`]: named time series shared by the diagnostic modules.

pub mod dynamics;
pub mod error;
pub mod infomeasures;
pub mod model;
pub mod qcore;
pub mod series;
pub mod thermo;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
