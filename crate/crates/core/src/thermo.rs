//! Heats, effective and virtual temperatures, cycle classification and entropy production.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::model::{Body, ScenarioConfig, SigmaTemperatureMode, Site};
use crate::qcore::{von_neumann_entropy, DensityMatrix, LogBase};
use crate::series::MeasureSeries;
use crate::{tol, Error, Result};

/// Operating regime of the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleLabel {
    A,
    B,
    Boundary,
}

impl std::fmt::Display for CycleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CycleLabel::A => "A",
            CycleLabel::B => "B",
            CycleLabel::Boundary => "Boundary",
        })
    }
}

/// Cycle A below the transition temperature `(E_M1/E_M2) T_M2`, B above, Boundary within 1e-12.
pub fn classify_cycle(config: &ScenarioConfig) -> CycleLabel {
    let offset = config.t_m1 - config.boundary_t_m1();
    if offset.abs() <= tol::CYCLE_BOUNDARY {
        CycleLabel::Boundary
    } else if offset < 0.0 {
        CycleLabel::A
    } else {
        CycleLabel::B
    }
}

/// Excited-state population of a single-qubit state, checked to be real.
fn excited_population(rho: &DensityMatrix) -> Result<f64> {
    let z = rho.matrix()[(1, 1)];
    if z.im.abs() > tol::IMAGINARY_RESIDUE {
        return Err(Error::InvalidState(format!(
            "population has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn ground_population(rho: &DensityMatrix) -> Result<f64> {
    let z = rho.matrix()[(0, 0)];
    if z.im.abs() > tol::IMAGINARY_RESIDUE {
        return Err(Error::InvalidState(format!(
            "population has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn site_populations(traj: &Trajectory, site: Site) -> Result<Vec<(f64, f64)>> {
    traj.reduced_site(site)
        .iter()
        .map(|r| Ok((ground_population(r)?, excited_population(r)?)))
        .collect()
}

/// Energy change `Q_x(t) = E_x (P^E_x(t) - P^E_x(0))` of one qubit.
pub fn heat_series(traj: &Trajectory, site: Site) -> Result<MeasureSeries> {
    let energy = traj.config().energy(site);
    let pops = site_populations(traj, site)?;
    let p0 = pops[0].1;
    let values = pops.iter().map(|&(_, pe)| energy * (pe - p0)).collect();
    MeasureSeries::dense(
        format!("heat_{site}"),
        "energy",
        traj.times().to_vec(),
        values,
    )
}

/// `E / (ln P^G - ln P^E)`; `None` when a population is not positive or the log ratio vanishes.
pub fn temperature_from_populations(energy: f64, ground: f64, excited: f64) -> Option<f64> {
    if !(ground > 0.0 && excited > 0.0) {
        return None;
    }
    let ratio = ground.ln() - excited.ln();
    if !ratio.is_finite() || ratio.abs() <= tol::CYCLE_BOUNDARY {
        return None;
    }
    let t = energy / ratio;
    t.is_finite().then_some(t)
}

/// Effective temperature of a machine qubit from its instantaneous populations.
pub fn effective_temperature_series(traj: &Trajectory, site: Site) -> Result<MeasureSeries> {
    if !matches!(site, Site::M1 | Site::M2) {
        return Err(Error::invalid(format!(
            "effective temperature is defined for machine qubits, got {site}"
        )));
    }
    let energy = traj.config().energy(site);
    let values = site_populations(traj, site)?
        .into_iter()
        .map(|(pg, pe)| temperature_from_populations(energy, pg, pe))
        .collect();
    MeasureSeries::new(
        format!("temperature_{site}"),
        "temperature",
        traj.times().to_vec(),
        values,
    )
}

/// Virtual-qubit populations `(P^G, P^E) = (P^E_1 P^G_2, P^G_1 P^E_2)` of a body.
pub fn virtual_populations_series(
    traj: &Trajectory,
    body: Body,
) -> Result<(MeasureSeries, MeasureSeries)> {
    let [first, second] = body.sites();
    let p1 = site_populations(traj, first)?;
    let p2 = site_populations(traj, second)?;
    let ground = p1.iter().zip(&p2).map(|(a, b)| a.1 * b.0).collect();
    let excited = p1.iter().zip(&p2).map(|(a, b)| a.0 * b.1).collect();
    let times = traj.times().to_vec();
    Ok((
        MeasureSeries::dense(
            format!("virtual_ground_{}", body.label()),
            "",
            times.clone(),
            ground,
        )?,
        MeasureSeries::dense(
            format!("virtual_excited_{}", body.label()),
            "",
            times,
            excited,
        )?,
    ))
}

/// `T_M = (E_M2 - E_M1) / (E_M2/T_M2 - E_M1/T_M1)`; `None` on the cycle boundary.
pub fn virtual_temperature(e_m1: f64, e_m2: f64, t_m1: f64, t_m2: f64) -> Result<Option<f64>> {
    if !(e_m1 > 0.0 && e_m2 > e_m1) {
        return Err(Error::invalid(format!(
            "virtual temperature needs 0 < E_M1 < E_M2, got {e_m1}, {e_m2}"
        )));
    }
    if !(t_m1 > 0.0 && t_m2 > 0.0) {
        return Err(Error::invalid(format!(
            "temperatures must be positive, got {t_m1}, {t_m2}"
        )));
    }
    if (t_m1 - e_m1 / e_m2 * t_m2).abs() <= tol::CYCLE_BOUNDARY {
        return Ok(None);
    }
    Ok(Some((e_m2 - e_m1) / (e_m2 / t_m2 - e_m1 / t_m1)))
}

/// Virtual temperature of the machine from its instantaneous virtual populations.
pub fn virtual_temperature_series(traj: &Trajectory) -> Result<MeasureSeries> {
    let cfg = traj.config();
    let gap = cfg.e_m2 - cfg.e_m1;
    let (pg, pe) = virtual_populations_series(traj, Body::M)?;
    let values = pg
        .values
        .iter()
        .zip(&pe.values)
        .map(|(g, e)| temperature_from_populations(gap, g.unwrap_or(0.0), e.unwrap_or(0.0)))
        .collect();
    MeasureSeries::new(
        "temperature_M",
        "temperature",
        traj.times().to_vec(),
        values,
    )
}

/// `Q_M(t) = (E_M2 - E_M1) (P^E_M(t) - P^E_M(0))`.
pub fn virtual_heat_series(traj: &Trajectory) -> Result<MeasureSeries> {
    let cfg = traj.config();
    let gap = cfg.e_m2 - cfg.e_m1;
    let (_, pe) = virtual_populations_series(traj, Body::M)?;
    let p0 = pe.value(0).unwrap_or(0.0);
    let values = pe
        .values
        .iter()
        .map(|v| gap * (v.unwrap_or(0.0) - p0))
        .collect();
    MeasureSeries::dense("virtual_heat", "energy", traj.times().to_vec(), values)
}

/// `Tr{(H_M + H_S + H_MS) rho(t)}`.
pub fn total_energy_series(traj: &Trajectory) -> Result<MeasureSeries> {
    let h = crate::model::build_model(traj.config())?.hamiltonian();
    let values = traj
        .states()
        .iter()
        .map(|rho| {
            let m = rho.matrix();
            let n = m.rows();
            (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .map(|(r, c)| h[(r, c)] * m[(c, r)])
                .sum::<crate::C64>()
                .re
        })
        .collect();
    MeasureSeries::dense("total_energy", "energy", traj.times().to_vec(), values)
}

fn entropy_units(base: LogBase) -> &'static str {
    match base {
        LogBase::Two => "bits",
        LogBase::E => "nats",
    }
}

/// `Sigma(t) = Delta S(rho(t)) - sum_i Q_Mi(t) / T_Mi`, expressed in the configured log base.
///
/// `FixedReservoir` divides by the bath temperatures, `Instantaneous` by the
/// effective temperatures of the machine qubits (gaps where those are undefined).
pub fn entropy_production_series(
    traj: &Trajectory,
    mode: SigmaTemperatureMode,
) -> Result<MeasureSeries> {
    let cfg = traj.config();
    let base = cfg.log_base;
    let heat_to_entropy = base.log(std::f64::consts::E);
    let s0 = von_neumann_entropy(traj.initial(), base);
    let q1 = heat_series(traj, Site::M1)?;
    let q2 = heat_series(traj, Site::M2)?;
    let (t1, t2) = match mode {
        SigmaTemperatureMode::FixedReservoir => (
            vec![Some(cfg.t_m1); traj.len()],
            vec![Some(cfg.t_m2); traj.len()],
        ),
        SigmaTemperatureMode::Instantaneous => (
            effective_temperature_series(traj, Site::M1)?.values,
            effective_temperature_series(traj, Site::M2)?.values,
        ),
    };
    let values = traj
        .states()
        .iter()
        .enumerate()
        .map(|(k, rho)| {
            if k == 0 {
                return Some(0.0);
            }
            let flow = q1.value(k)? / t1[k]? + q2.value(k)? / t2[k]?;
            Some(von_neumann_entropy(rho, base) - s0 - flow * heat_to_entropy)
        })
        .collect();
    MeasureSeries::new(
        "entropy_production",
        entropy_units(base),
        traj.times().to_vec(),
        values,
    )
}

/// `d Sigma / dt` on the sample grid.
pub fn entropy_production_rate_series(sigma: &MeasureSeries) -> Result<MeasureSeries> {
    let units = if sigma.units.is_empty() {
        String::new()
    } else {
        format!("{}/time", sigma.units)
    };
    sigma.derivative("entropy_production_rate", units)
}
