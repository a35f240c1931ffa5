//! Operators, Hamiltonians and initial states of the machine + system model.
//!
//! Basis convention: `|n_M1 n_M2 n_S1 n_S2>` with `|0> = (1, 0)^T` the ground
//! state, flat index `8 n_M1 + 4 n_M2 + 2 n_S1 + n_S2`.

mod config;

pub use config::{ScenarioConfig, SigmaTemperatureMode};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::qcore::{kron_all, partial_trace, ComplexMatrix, DensityMatrix};
use crate::{tol, Error, Result};

/// One of the four qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    M1,
    M2,
    S1,
    S2,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::M1, Site::M2, Site::S1, Site::S2];

    pub fn label(self) -> &'static str {
        match self {
            Site::M1 => "M1",
            Site::M2 => "M2",
            Site::S1 => "S1",
            Site::S2 => "S2",
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Site {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Site::ALL
            .into_iter()
            .find(|site| site.label() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown site `{s}`")))
    }
}

/// The two-qubit bodies: the machine `M = M1 M2` and the system `S = S1 S2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Body {
    M,
    S,
}

impl Body {
    pub fn sites(self) -> [Site; 2] {
        match self {
            Body::M => [Site::M1, Site::M2],
            Body::S => [Site::S1, Site::S2],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Body::M => "M",
            Body::S => "S",
        }
    }
}

/// Tensor structure `M1 (x) M2 (x) S1 (x) S2`, each factor a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SystemLayout;

impl SystemLayout {
    pub const LOCAL_DIM: usize = 2;
    pub const DIMS: [usize; 4] = [2, 2, 2, 2];

    pub fn sites(&self) -> [Site; 4] {
        Site::ALL
    }

    pub fn dims(&self) -> &'static [usize] {
        &Self::DIMS
    }

    pub fn total_dim(&self) -> usize {
        Self::DIMS.iter().product()
    }

    pub fn position(&self, site: Site) -> usize {
        site as usize
    }

    /// Flat basis index of `|n_M1 n_M2 n_S1 n_S2>`.
    pub fn basis_index(&self, occupations: [usize; 4]) -> usize {
        occupations.iter().fold(0, |acc, &n| acc * 2 + n)
    }

    /// Occupation of `site` in the basis state with flat index `index`.
    pub fn occupation(&self, index: usize, site: Site) -> usize {
        (index >> (3 - self.position(site))) & 1
    }

    /// Reduced state on `keep`, ordered as in the layout.
    pub fn reduce(&self, rho: &DensityMatrix, keep: &[Site]) -> Result<DensityMatrix> {
        let idx: Vec<usize> = keep.iter().map(|&s| self.position(s)).collect();
        partial_trace(rho, self.dims(), &idx)
    }
}

/// `|0><1|`: lowers `|1>` to `|0>`.
pub fn lowering() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).expect("2x2")
}

/// `|1><1|`.
pub fn number() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[0.0, 1.0])
}

/// Embeds a single-qubit operator at `site`, identity elsewhere.
pub fn build_local_operator(
    layout: &SystemLayout,
    site: Site,
    op: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if op.rows() != SystemLayout::LOCAL_DIM || op.cols() != SystemLayout::LOCAL_DIM {
        return Err(Error::invalid(format!(
            "local operator must be 2x2, got {}x{}",
            op.rows(),
            op.cols()
        )));
    }
    let id = ComplexMatrix::identity(SystemLayout::LOCAL_DIM);
    let factors: Vec<&ComplexMatrix> = layout
        .sites()
        .iter()
        .map(|&s| if s == site { op } else { &id })
        .collect();
    kron_all(&factors)
}

/// One Lindblad channel `rate * (L rho L^dagger - {L^dagger L, rho} / 2)`.
#[derive(Debug, Clone)]
pub struct DissipatorChannel {
    pub label: String,
    pub operator: ComplexMatrix,
    pub rate: f64,
}

/// Everything the integrator and the diagnostics need about one scenario.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub config: ScenarioConfig,
    pub layout: SystemLayout,
    /// `sigma_x` embedded in 16 dimensions, indexed by [`Site`].
    pub lowering: [ComplexMatrix; 4],
    pub h_m: ComplexMatrix,
    pub h_s: ComplexMatrix,
    pub h_ms: ComplexMatrix,
    pub channels: Vec<DissipatorChannel>,
}

impl ModelOperators {
    /// `H_M + H_S + H_MS`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        &(&self.h_m + &self.h_s) + &self.h_ms
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }
}

impl ScenarioConfig {
    /// Level spacing of `site`.
    pub fn energy(&self, site: Site) -> f64 {
        match site {
            Site::M1 => self.e_m1,
            Site::M2 => self.e_m2,
            Site::S1 => self.e_s1,
            Site::S2 => self.e_s2,
        }
    }

    /// Single-qubit Hamiltonian `E |1><1|` of `site`.
    pub fn local_hamiltonian(&self, site: Site) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[0.0, self.energy(site)])
    }
}

pub fn build_model(config: &ScenarioConfig) -> Result<ModelOperators> {
    config.validate()?;
    let layout = SystemLayout;
    let dim = layout.total_dim();
    let lowering = Site::ALL.map(|s| build_local_operator(&layout, s, &lowering()).expect("2x2"));

    let mut h_m = ComplexMatrix::zeros(dim, dim);
    let mut h_s = ComplexMatrix::zeros(dim, dim);
    for site in Site::ALL {
        let n = build_local_operator(&layout, site, &number())?;
        let term = &n * config.energy(site);
        match site {
            Site::M1 | Site::M2 => h_m += &term,
            Site::S1 | Site::S2 => h_s += &term,
        }
    }

    // g (|0_M1 1_M2 1_S1 0_S2><1_M1 0_M2 0_S1 1_S2| + h.c.)
    let mut h_ms = ComplexMatrix::zeros(dim, dim);
    let upper = layout.basis_index([0, 1, 1, 0]);
    let lower = layout.basis_index([1, 0, 0, 1]);
    h_ms[(upper, lower)] = C64::new(config.g, 0.0);
    h_ms[(lower, upper)] = C64::new(config.g, 0.0);

    let mut channels = Vec::with_capacity(4);
    for (site, gamma, temperature) in [
        (Site::M1, config.gamma_1, config.t_m1),
        (Site::M2, config.gamma_2, config.t_m2),
    ] {
        let nbar = bose_occupation(config.energy(site), temperature)?;
        let sigma = lowering[site as usize].clone();
        channels.push(DissipatorChannel {
            label: format!("emission {site}"),
            rate: gamma * (nbar + 1.0),
            operator: sigma.clone(),
        });
        channels.push(DissipatorChannel {
            label: format!("absorption {site}"),
            rate: gamma * nbar,
            operator: sigma.dagger(),
        });
    }

    Ok(ModelOperators {
        config: config.clone(),
        layout,
        lowering,
        h_m,
        h_s,
        h_ms,
        channels,
    })
}

fn check_positive(energy: f64, temperature: f64) -> Result<()> {
    if !(energy > 0.0 && energy.is_finite()) || !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::invalid(format!(
            "energy and temperature must be positive, got E = {energy}, T = {temperature}"
        )));
    }
    Ok(())
}

/// Mean bosonic occupation `1 / (exp(E/T) - 1)` of a bath mode at the qubit frequency.
pub fn bose_occupation(energy: f64, temperature: f64) -> Result<f64> {
    check_positive(energy, temperature)?;
    let x = energy / temperature;
    if x > tol::MAX_BOLTZMANN_EXPONENT {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// Ground and excited populations of a thermal qubit with `H = E |1><1|`.
pub fn thermal_populations(energy: f64, temperature: f64) -> Result<[f64; 2]> {
    check_positive(energy, temperature)?;
    let x = energy / temperature;
    if x > tol::MAX_BOLTZMANN_EXPONENT {
        return Ok([1.0, 0.0]);
    }
    if x <= tol::MIN_BOLTZMANN_EXPONENT {
        return Ok([0.5, 0.5]);
    }
    let boltzmann = (-x).exp();
    Ok([1.0 / (1.0 + boltzmann), boltzmann / (1.0 + boltzmann)])
}

/// Gibbs state `exp(-H/T) / Z` of a qubit with `H = E |1><1|`.
pub fn thermal_qubit_state(energy: f64, temperature: f64) -> Result<DensityMatrix> {
    DensityMatrix::from_populations(&thermal_populations(energy, temperature)?)
}

/// Which preparation of the external system starts the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialVariant {
    /// `|+> (x) |->` on `S1 S2`.
    CoherentS,
    /// The same system state with all off-diagonal elements removed.
    DephasedS,
}

/// `(|0> + |1>)/sqrt2 (x) (|0> - |1>)/sqrt2`.
pub fn initial_system_state() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [C64::new(s, 0.0), C64::new(s, 0.0)];
    let minus = [C64::new(s, 0.0), C64::new(-s, 0.0)];
    let psi: Vec<C64> = plus
        .iter()
        .flat_map(|a| minus.iter().map(move |b| a * b))
        .collect();
    DensityMatrix::pure(&psi).expect("normalized product state")
}

/// Uncorrelated initial state: thermal machine qubits and the chosen system preparation.
pub fn initial_state(config: &ScenarioConfig, variant: InitialVariant) -> Result<DensityMatrix> {
    config.validate()?;
    let m1 = thermal_qubit_state(config.e_m1, config.t_m1)?;
    let m2 = thermal_qubit_state(config.e_m2, config.t_m2)?;
    let system = match variant {
        InitialVariant::CoherentS => initial_system_state(),
        InitialVariant::DephasedS => dephase(&initial_system_state()),
    };
    Ok(m1.tensor(&m2).tensor(&system))
}

/// Removes every off-diagonal element in the computational basis.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_diagonal(&rho.matrix().diagonal()))
}
