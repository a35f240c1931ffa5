//! Mutual information, trace-distance non-Markovianity, concurrence and coherence.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, Trajectory};
use crate::model::{dephase, InitialVariant, ScenarioConfig, Site, SystemLayout};
use crate::qcore::{
    hermitian_eig_unchecked, kron, partial_trace, trace_distance, von_neumann_entropy,
    ComplexMatrix, DensityMatrix, LogBase,
};
use crate::series::MeasureSeries;
use crate::{Error, Result};

fn check_parts(dims: &[usize], part_a: &[usize], part_b: &[usize]) -> Result<()> {
    if part_a.is_empty() || part_b.is_empty() {
        return Err(Error::invalid(
            "both parts of a bipartition must be nonempty",
        ));
    }
    if let Some(i) = part_a.iter().find(|i| part_b.contains(i)) {
        return Err(Error::invalid(format!(
            "subsystem {i} appears in both parts"
        )));
    }
    if let Some(i) = part_a.iter().chain(part_b).find(|&&i| i >= dims.len()) {
        return Err(Error::invalid(format!(
            "subsystem {i} out of range for {} factors",
            dims.len()
        )));
    }
    Ok(())
}

/// `I(A:B) = S(A) + S(B) - S(AB)` for the factors `part_a`, `part_b` of a state with local dimensions `dims`.
pub fn mutual_information(
    rho: &DensityMatrix,
    dims: &[usize],
    part_a: &[usize],
    part_b: &[usize],
    base: LogBase,
) -> Result<f64> {
    check_parts(dims, part_a, part_b)?;
    let union: Vec<usize> = part_a.iter().chain(part_b).copied().collect();
    let s_a = von_neumann_entropy(&partial_trace(rho, dims, part_a)?, base);
    let s_b = von_neumann_entropy(&partial_trace(rho, dims, part_b)?, base);
    let s_ab = von_neumann_entropy(&partial_trace(rho, dims, &union)?, base);
    Ok(s_a + s_b - s_ab)
}

/// Mutual information of the fully dephased state.
pub fn classical_mutual_information(
    rho: &DensityMatrix,
    dims: &[usize],
    part_a: &[usize],
    part_b: &[usize],
    base: LogBase,
) -> Result<f64> {
    mutual_information(&dephase(rho), dims, part_a, part_b, base)
}

fn site_indices(sites: &[Site]) -> Vec<usize> {
    sites.iter().map(|&s| SystemLayout.position(s)).collect()
}

/// Mutual information between two groups of qubits of the full machine-system state.
pub fn mutual_information_sites(
    rho: &DensityMatrix,
    part_a: &[Site],
    part_b: &[Site],
    base: LogBase,
) -> Result<f64> {
    mutual_information(
        rho,
        SystemLayout.dims(),
        &site_indices(part_a),
        &site_indices(part_b),
        base,
    )
}

/// `I(A:B)` at every sample of a trajectory.
pub fn mutual_information_series(
    traj: &Trajectory,
    part_a: &[Site],
    part_b: &[Site],
    name: impl Into<String>,
) -> Result<MeasureSeries> {
    let base = traj.config().log_base;
    let (a, b) = (site_indices(part_a), site_indices(part_b));
    check_parts(SystemLayout.dims(), &a, &b)?;
    let mut union: Vec<Site> = part_a.iter().chain(part_b).copied().collect();
    union.sort();
    let sa = traj.reduced(part_a)?;
    let sb = traj.reduced(part_b)?;
    let sab = traj.reduced(&union)?;
    let values = (0..traj.len())
        .map(|k| {
            von_neumann_entropy(&sa[k], base) + von_neumann_entropy(&sb[k], base)
                - von_neumann_entropy(&sab[k], base)
        })
        .collect();
    MeasureSeries::dense(name, units(base), traj.times().to_vec(), values)
}

fn units(base: LogBase) -> &'static str {
    match base {
        LogBase::Two => "bits",
        LogBase::E => "nats",
    }
}

/// Subsystem probed by the trace-distance measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlpSubsystem {
    M,
    S1,
    S2,
}

impl BlpSubsystem {
    pub const ALL: [BlpSubsystem; 3] = [BlpSubsystem::M, BlpSubsystem::S1, BlpSubsystem::S2];

    pub fn sites(self) -> &'static [Site] {
        match self {
            BlpSubsystem::M => &[Site::M1, Site::M2],
            BlpSubsystem::S1 => &[Site::S1],
            BlpSubsystem::S2 => &[Site::S2],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BlpSubsystem::M => "M",
            BlpSubsystem::S1 => "S1",
            BlpSubsystem::S2 => "S2",
        }
    }
}

impl std::fmt::Display for BlpSubsystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for BlpSubsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "M" => Ok(BlpSubsystem::M),
            "S1" => Ok(BlpSubsystem::S1),
            "S2" => Ok(BlpSubsystem::S2),
            other => Err(Error::invalid(format!(
                "unknown subsystem `{other}` (expected M, S1 or S2)"
            ))),
        }
    }
}

/// Trace distance between the reduced states of a pair of trajectories and its
/// total positive variation.
#[derive(Debug, Clone, PartialEq)]
pub struct BlpResult {
    pub subsystem: BlpSubsystem,
    pub distance: MeasureSeries,
    pub total: f64,
    /// Maximal `[t_start, t_end]` runs over which the distance grows.
    pub increase_intervals: Vec<(f64, f64)>,
}

impl BlpResult {
    /// Running sum of positive increments.
    pub fn cumulative(&self) -> MeasureSeries {
        let mut acc = 0.0;
        let mut values = Vec::with_capacity(self.distance.len());
        for k in 0..self.distance.len() {
            if k > 0 {
                let step = self.distance.value(k).unwrap_or(0.0)
                    - self.distance.value(k - 1).unwrap_or(0.0);
                acc += step.max(0.0);
            }
            values.push(Some(acc));
        }
        MeasureSeries {
            name: format!("nonmarkovianity_{}", self.subsystem),
            units: String::new(),
            times: self.distance.times.clone(),
            values,
        }
    }

    /// Finite-difference derivative of the distance.
    pub fn rate(&self) -> Result<MeasureSeries> {
        self.distance
            .derivative(format!("distance_rate_{}", self.subsystem), "1/time")
    }
}

/// Trace-distance measure for an already evolved pair on a shared grid.
pub fn blp_from_trajectories(
    alpha: &Trajectory,
    beta: &Trajectory,
    subsystem: BlpSubsystem,
) -> Result<BlpResult> {
    if alpha.times() != beta.times() {
        return Err(Error::invalid(
            "trajectories are sampled on different grids",
        ));
    }
    let ra = alpha.reduced(subsystem.sites())?;
    let rb = beta.reduced(subsystem.sites())?;
    let d: Vec<f64> = ra
        .iter()
        .zip(rb.iter())
        .map(|(a, b)| trace_distance(a, b))
        .collect::<Result<_>>()?;
    let times = alpha.times();
    let mut total = 0.0;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for k in 1..d.len() {
        let step = d[k] - d[k - 1];
        if step > 0.0 {
            total += step;
            match intervals.last_mut() {
                Some(last) if last.1 == times[k - 1] => last.1 = times[k],
                _ => intervals.push((times[k - 1], times[k])),
            }
        }
    }
    Ok(BlpResult {
        subsystem,
        distance: MeasureSeries::dense(
            format!("trace_distance_{subsystem}"),
            "",
            times.to_vec(),
            d,
        )?,
        total,
        increase_intervals: intervals,
    })
}

/// Evolves the coherent and dephased preparations and measures information backflow on `subsystem`.
pub fn blp_non_markovianity(config: &ScenarioConfig, subsystem: BlpSubsystem) -> Result<BlpResult> {
    let alpha = evolve(config, InitialVariant::CoherentS)?;
    let beta = evolve(config, InitialVariant::DephasedS)?;
    blp_from_trajectories(&alpha, &beta, subsystem)
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let sy = ComplexMatrix::new(2, 2, vec![z, -i, i, z]).expect("2x2");
    kron(&sy, &sy)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!(
            "concurrence needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let yy = sigma_y_sigma_y();
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    // sqrt(rho) flipped sqrt(rho) shares its spectrum with rho * flipped and is Hermitian
    let root = hermitian_eig_unchecked(&rho.matrix().hermitian_part()).map(|l| l.max(0.0).sqrt());
    let r = &(&root * &flipped) * &root;
    let mut s: Vec<f64> = hermitian_eig_unchecked(&r.hermitian_part())
        .values
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// `S(dephase(rho)) - S(rho)`.
pub fn relative_entropy_coherence(rho: &DensityMatrix, base: LogBase) -> f64 {
    von_neumann_entropy(&dephase(rho), base) - von_neumann_entropy(rho, base)
}

/// Coherence bookkeeping of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCorrelation {
    pub global: f64,
    pub local: [f64; 2],
    /// `global - local[0] - local[1]`.
    pub delta: f64,
    pub mutual_information: f64,
    pub classical_mutual_information: f64,
    /// `|delta - (I - I_classical)|`.
    pub residual: f64,
}

/// Global minus local coherences of a two-qubit state, checked against the
/// quantum minus classical mutual information.
pub fn coherence_correlation(rho: &DensityMatrix, base: LogBase) -> Result<CoherenceCorrelation> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!(
            "coherence correlation needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let dims = [2, 2];
    let global = relative_entropy_coherence(rho, base);
    let local = [
        relative_entropy_coherence(&partial_trace(rho, &dims, &[0])?, base),
        relative_entropy_coherence(&partial_trace(rho, &dims, &[1])?, base),
    ];
    let delta = global - local[0] - local[1];
    let mi = mutual_information(rho, &dims, &[0], &[1], base)?;
    let cmi = classical_mutual_information(rho, &dims, &[0], &[1], base)?;
    Ok(CoherenceCorrelation {
        global,
        local,
        delta,
        mutual_information: mi,
        classical_mutual_information: cmi,
        residual: (delta - (mi - cmi)).abs(),
    })
}

/// Concurrence of the `S1 S2` state at every sample.
pub fn concurrence_series(traj: &Trajectory) -> Result<MeasureSeries> {
    let values = traj
        .reduced(&[Site::S1, Site::S2])?
        .iter()
        .map(concurrence)
        .collect::<Result<Vec<_>>>()?;
    MeasureSeries::dense("concurrence_S", "", traj.times().to_vec(), values)
}

/// Coherence bookkeeping of the `S1 S2` state at every sample.
pub fn coherence_series(traj: &Trajectory) -> Result<Vec<CoherenceCorrelation>> {
    let base = traj.config().log_base;
    traj.reduced(&[Site::S1, Site::S2])?
        .iter()
        .map(|rho| coherence_correlation(rho, base))
        .collect()
}
