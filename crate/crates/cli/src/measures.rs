//! Named measure groups and their evaluation on one scenario.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use qatm_core::dynamics::{evolve, Trajectory};
use qatm_core::infomeasures::{
    blp_from_trajectories, coherence_series, concurrence_series, mutual_information_series,
    BlpSubsystem,
};
use qatm_core::model::{Body, InitialVariant, ScenarioConfig, Site};
use qatm_core::series::MeasureSeries;
use qatm_core::thermo::{
    classify_cycle, effective_temperature_series, entropy_production_rate_series,
    entropy_production_series, heat_series, total_energy_series, virtual_heat_series,
    virtual_populations_series, virtual_temperature, virtual_temperature_series, CycleLabel,
};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Heat,
    Temperature,
    Virtual,
    Entropy,
    Blp,
    MutualInformation,
    Concurrence,
    Coherence,
    Energy,
    Cycle,
}

impl Measure {
    pub const ALL: [Measure; 10] = [
        Measure::Heat,
        Measure::Temperature,
        Measure::Virtual,
        Measure::Entropy,
        Measure::Blp,
        Measure::MutualInformation,
        Measure::Concurrence,
        Measure::Coherence,
        Measure::Energy,
        Measure::Cycle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Heat => "heat",
            Measure::Temperature => "temperature",
            Measure::Virtual => "virtual",
            Measure::Entropy => "entropy",
            Measure::Blp => "blp",
            Measure::MutualInformation => "mutual_information",
            Measure::Concurrence => "concurrence",
            Measure::Coherence => "coherence",
            Measure::Energy => "energy",
            Measure::Cycle => "cycle",
        }
    }

    /// Series this group produces. Scalars share the name of the series they summarize.
    pub fn series_names(self) -> &'static [&'static str] {
        match self {
            Measure::Heat => &["heat_M1", "heat_M2", "heat_S1", "heat_S2"],
            Measure::Temperature => &["temperature_M1", "temperature_M2", "temperature_M"],
            Measure::Virtual => &[
                "virtual_ground_M",
                "virtual_excited_M",
                "virtual_ground_S",
                "virtual_excited_S",
                "virtual_heat",
            ],
            Measure::Entropy => &["entropy_production", "entropy_production_rate"],
            Measure::Blp => &[
                "trace_distance_M",
                "trace_distance_S1",
                "trace_distance_S2",
                "nonmarkovianity_M",
                "nonmarkovianity_S1",
                "nonmarkovianity_S2",
            ],
            Measure::MutualInformation => &["mutual_information_MS", "mutual_information_S"],
            Measure::Concurrence => &["concurrence_S"],
            Measure::Coherence => &[
                "coherence_global_S",
                "coherence_S1",
                "coherence_S2",
                "coherence_correlation_S",
                "coherence_mutual_information_S",
                "coherence_classical_mutual_information_S",
                "coherence_identity_residual_S",
            ],
            Measure::Energy => &["total_energy"],
            Measure::Cycle => &[],
        }
    }

    fn owner_of(series: &str) -> Option<Measure> {
        Measure::ALL
            .into_iter()
            .find(|m| m.series_names().contains(&series))
    }

    fn needs_trajectory(self) -> bool {
        self != Measure::Cycle
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| CliError::Validation(format!("unknown measure `{s}`")))
    }
}

/// Requested outputs: whole groups and/or individual series names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    groups: BTreeSet<Measure>,
    series: BTreeSet<String>,
}

impl Selection {
    pub fn all() -> Self {
        Self {
            groups: Measure::ALL.into_iter().collect(),
            series: BTreeSet::new(),
        }
    }

    pub fn of(groups: &[Measure]) -> Self {
        Self {
            groups: groups.iter().copied().collect(),
            series: BTreeSet::new(),
        }
    }

    /// Parses a comma-separated list of group or series names.
    pub fn parse(list: &str) -> Result<Self> {
        let mut sel = Self::default();
        for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Ok(m) = token.parse::<Measure>() {
                sel.groups.insert(m);
            } else if Measure::owner_of(token).is_some() {
                sel.series.insert(token.to_string());
            } else {
                return Err(CliError::Validation(format!(
                    "unknown measure `{token}`; groups are {}",
                    Measure::ALL.map(|m| m.name()).join(", ")
                )));
            }
        }
        if sel.groups.is_empty() && sel.series.is_empty() {
            return Err(CliError::Validation("measure list is empty".into()));
        }
        Ok(sel)
    }

    /// Groups that must be evaluated.
    pub fn groups(&self) -> BTreeSet<Measure> {
        let mut out = self.groups.clone();
        out.extend(self.series.iter().filter_map(|s| Measure::owner_of(s)));
        out
    }

    pub fn keeps(&self, series: &str) -> bool {
        self.series.contains(series)
            || Measure::owner_of(series).is_some_and(|m| self.groups.contains(&m))
    }

    pub fn union(&self, other: &Selection) -> Selection {
        Selection {
            groups: self.groups.union(&other.groups).copied().collect(),
            series: self.series.union(&other.series).cloned().collect(),
        }
    }

    /// Names as given, for the manifest.
    pub fn names(&self) -> Vec<String> {
        self.groups
            .iter()
            .map(|m| m.name().to_string())
            .chain(self.series.iter().cloned())
            .collect()
    }
}

/// One CSV file: a shared time column and one or more value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub measure: Measure,
    /// `(column label, series)`; a single column is labelled `value`.
    pub columns: Vec<(String, MeasureSeries)>,
}

impl Table {
    fn single(measure: Measure, series: MeasureSeries) -> Self {
        Self {
            name: series.name.clone(),
            measure,
            columns: vec![("value".into(), series)],
        }
    }

    fn multi(measure: Measure, name: &str, columns: Vec<(&str, MeasureSeries)>) -> Self {
        Self {
            name: name.into(),
            measure,
            columns: columns
                .into_iter()
                .map(|(label, s)| (format!("value_{label}"), s))
                .collect(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.columns[0].1.times
    }

    pub fn series(&self) -> impl Iterator<Item = &MeasureSeries> {
        self.columns.iter().map(|(_, s)| s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleInfo {
    pub label: CycleLabel,
    /// `None` on the boundary, where the virtual temperature diverges.
    pub virtual_temperature: Option<f64>,
    #[serde(rename = "boundary_T_M1")]
    pub boundary_t_m1: f64,
}

impl CycleInfo {
    pub fn of(config: &ScenarioConfig) -> Result<Self> {
        Ok(Self {
            label: classify_cycle(config),
            virtual_temperature: virtual_temperature(
                config.e_m1,
                config.e_m2,
                config.t_m1,
                config.t_m2,
            )?,
            boundary_t_m1: config.boundary_t_m1(),
        })
    }
}

/// Everything computed for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub cycle: CycleInfo,
    pub tables: Vec<Table>,
    pub scalars: BTreeMap<String, f64>,
}

impl Outputs {
    /// Keeps the tables with at least one selected series, and the selected scalars.
    pub fn filtered(&self, selection: &Selection) -> Outputs {
        Outputs {
            cycle: self.cycle.clone(),
            tables: self
                .tables
                .iter()
                .filter(|t| t.series().any(|s| selection.keeps(&s.name)))
                .cloned()
                .collect(),
            scalars: self
                .scalars
                .iter()
                .filter(|(k, _)| selection.keeps(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Selected series in table order.
    pub fn series<'a>(
        &'a self,
        selection: &'a Selection,
    ) -> impl Iterator<Item = &'a MeasureSeries> {
        self.tables
            .iter()
            .flat_map(|t| t.series())
            .filter(move |s| selection.keeps(&s.name))
    }
}

/// Evaluated trajectories of a scenario, kept so that callers can reuse them.
pub struct Evolved {
    pub coherent: Option<Trajectory>,
    pub dephased: Option<Trajectory>,
}

/// Integrates what `groups` need and evaluates every group.
pub fn compute(config: &ScenarioConfig, groups: &BTreeSet<Measure>) -> Result<(Outputs, Evolved)> {
    config.validate()?;
    let cycle = CycleInfo::of(config)?;
    let coherent = if groups.iter().any(|m| m.needs_trajectory()) {
        Some(evolve(config, InitialVariant::CoherentS)?)
    } else {
        None
    };
    let dephased = if groups.contains(&Measure::Blp) {
        Some(evolve(config, InitialVariant::DephasedS)?)
    } else {
        None
    };
    let mut tables = Vec::new();
    let mut scalars = BTreeMap::new();
    if let Some(traj) = &coherent {
        for &m in groups {
            evaluate(m, traj, dephased.as_ref(), &mut tables, &mut scalars)?;
        }
    }
    Ok((
        Outputs {
            cycle,
            tables,
            scalars,
        },
        Evolved { coherent, dephased },
    ))
}

fn evaluate(
    measure: Measure,
    traj: &Trajectory,
    dephased: Option<&Trajectory>,
    tables: &mut Vec<Table>,
    scalars: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let m = measure;
    match measure {
        Measure::Heat => {
            for site in Site::ALL {
                tables.push(Table::single(m, heat_series(traj, site)?));
            }
        }
        Measure::Temperature => {
            for site in [Site::M1, Site::M2] {
                tables.push(Table::single(m, effective_temperature_series(traj, site)?));
            }
            tables.push(Table::single(m, virtual_temperature_series(traj)?));
        }
        Measure::Virtual => {
            for body in [Body::M, Body::S] {
                let (ground, excited) = virtual_populations_series(traj, body)?;
                tables.push(Table::multi(
                    m,
                    &format!("virtual_populations_{}", body.label()),
                    vec![("ground", ground), ("excited", excited)],
                ));
            }
            tables.push(Table::single(m, virtual_heat_series(traj)?));
        }
        Measure::Entropy => {
            let sigma = entropy_production_series(traj, traj.config().sigma_temperature_mode)?;
            let rate = entropy_production_rate_series(&sigma)?;
            tables.push(Table::single(m, sigma));
            tables.push(Table::single(m, rate));
        }
        Measure::Blp => {
            let beta = dephased.expect("dephased trajectory evolved for blp");
            for sub in BlpSubsystem::ALL {
                let r = blp_from_trajectories(traj, beta, sub)?;
                let cumulative = r.cumulative();
                scalars.insert(cumulative.name.clone(), r.total);
                tables.push(Table::single(m, r.distance));
                tables.push(Table::single(m, cumulative));
            }
        }
        Measure::MutualInformation => {
            tables.push(Table::single(
                m,
                mutual_information_series(
                    traj,
                    &[Site::M1, Site::M2],
                    &[Site::S1, Site::S2],
                    "mutual_information_MS",
                )?,
            ));
            tables.push(Table::single(
                m,
                mutual_information_series(traj, &[Site::S1], &[Site::S2], "mutual_information_S")?,
            ));
        }
        Measure::Concurrence => {
            tables.push(Table::single(m, concurrence_series(traj)?));
        }
        Measure::Coherence => {
            let rows = coherence_series(traj)?;
            let times = traj.times().to_vec();
            let col =
                |name: &str, f: &dyn Fn(&qatm_core::infomeasures::CoherenceCorrelation) -> f64| {
                    MeasureSeries::dense(name, "", times.clone(), rows.iter().map(f).collect())
                };
            let columns = vec![
                ("global", col("coherence_global_S", &|c| c.global)?),
                ("S1", col("coherence_S1", &|c| c.local[0])?),
                ("S2", col("coherence_S2", &|c| c.local[1])?),
                ("delta", col("coherence_correlation_S", &|c| c.delta)?),
                (
                    "mutual",
                    col("coherence_mutual_information_S", &|c| c.mutual_information)?,
                ),
                (
                    "classical",
                    col("coherence_classical_mutual_information_S", &|c| {
                        c.classical_mutual_information
                    })?,
                ),
                (
                    "residual",
                    col("coherence_identity_residual_S", &|c| c.residual)?,
                ),
            ];
            tables.push(Table::multi(m, "coherence_S", columns));
        }
        Measure::Energy => tables.push(Table::single(m, total_energy_series(traj)?)),
        Measure::Cycle => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        let s = Selection::parse("heat, nonmarkovianity_S1").unwrap();
        assert_eq!(
            s.groups(),
            [Measure::Heat, Measure::Blp].into_iter().collect()
        );
        assert!(s.keeps("heat_M2"));
        assert!(s.keeps("nonmarkovianity_S1"));
        assert!(!s.keeps("nonmarkovianity_S2"));
        assert!(Selection::parse("bogus").is_err());
        assert!(Selection::parse(" , ").is_err());
    }

    #[test]
    fn every_series_name_has_one_owner() {
        let mut seen = BTreeSet::new();
        for m in Measure::ALL {
            for s in m.series_names() {
                assert!(seen.insert(*s), "{s} listed twice");
            }
        }
    }

    #[test]
    fn computed_series_names_match_the_registry() {
        let mut cfg = ScenarioConfig::cycle_a();
        cfg.t_max = 0.5;
        let groups: BTreeSet<Measure> = Measure::ALL.into_iter().collect();
        let (out, _) = compute(&cfg, &groups).unwrap();
        let produced: BTreeSet<&str> = out
            .tables
            .iter()
            .flat_map(|t| t.series().map(|s| s.name.as_str()))
            .collect();
        let registered: BTreeSet<&str> = Measure::ALL
            .iter()
            .flat_map(|m| m.series_names().iter().copied())
            .collect();
        assert_eq!(produced, registered);
        for k in out.scalars.keys() {
            assert!(registered.contains(k.as_str()), "{k}");
        }
        assert_eq!(out.cycle.label, CycleLabel::A);
    }

    #[test]
    fn cycle_only_skips_integration() {
        let groups = [Measure::Cycle].into_iter().collect();
        let (out, evolved) = compute(&ScenarioConfig::cycle_b(), &groups).unwrap();
        assert!(out.tables.is_empty());
        assert!(evolved.coherent.is_none());
        assert_eq!(out.cycle.label, CycleLabel::B);
    }
}
