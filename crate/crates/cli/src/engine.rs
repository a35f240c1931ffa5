//! Single runs, parameter sweeps and the canned figure protocols.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use qatm_core::dynamics::Trajectory;
use qatm_core::model::ScenarioConfig;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::measures::{compute, Measure, Outputs, Selection};
use crate::output::{
    format_number, FigureRecord, FileEntry, LongCsv, Manifest, OutputDir, PointRecord, SweepRecord,
    MANIFEST_FILE,
};

/// Writes the selected measures of one scenario plus `manifest.json` into `out`.
pub fn run_single(
    config: &ScenarioConfig,
    selection: &Selection,
    out: PathBuf,
    dump_trajectory: bool,
) -> Result<Manifest> {
    config.validate()?;
    let (outputs, evolved) = compute(config, &selection.groups())?;
    let outputs = outputs.filtered(selection);
    let mut dir = OutputDir::create(out)?;
    let result = (|| {
        let mut manifest = Manifest::new("run");
        manifest.config = Some(config.clone());
        manifest.cycle = Some(outputs.cycle.clone());
        manifest.measures = selection.names();
        manifest.scalars = outputs.scalars.clone();
        for table in &outputs.tables {
            manifest.files.push(dir.write_table("", table)?);
        }
        if dump_trajectory {
            let traj = match evolved.coherent {
                Some(t) => t,
                None => qatm_core::dynamics::evolve(
                    config,
                    qatm_core::model::InitialVariant::CoherentS,
                )?,
            };
            manifest
                .files
                .push(dir.write("trajectory.csv", &trajectory_csv(&traj))?);
        }
        dir.write(MANIFEST_FILE, &manifest.to_json())?;
        Ok(manifest)
    })();
    if result.is_err() {
        dir.discard();
    }
    result
}

/// `t`, then the real parts and the imaginary parts of the 16x16 state in row-major order.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.initial().dim();
    let mut out = String::from("t");
    for part in ["re", "im"] {
        for r in 0..n {
            for c in 0..n {
                let _ = write!(out, ",{part}_{r}_{c}");
            }
        }
    }
    out.push('\n');
    for (t, rho) in traj.times().iter().zip(traj.states()) {
        out.push_str(&format_number(Some(*t)));
        let data = rho.matrix().as_slice();
        for z in data {
            out.push(',');
            out.push_str(&format_number(Some(z.re)));
        }
        for z in data {
            out.push(',');
            out.push_str(&format_number(Some(z.im)));
        }
        out.push('\n');
    }
    out
}

/// A one-parameter family of scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
    pub selection: Selection,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(CliError::Validation("sweep value list is empty".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Validation(format!(
                "sweep value {v} is not finite"
            )));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(CliError::Validation(
                "sweep values must be strictly monotone".into(),
            ));
        }
        self.base.clone().set_numeric(&self.param, self.values[0])?;
        Ok(())
    }

    fn point_config(&self, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = self.base.clone();
        cfg.set_numeric(&self.param, value)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Failure of one sweep point, kept as text so results can be shared between sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub message: String,
    pub code: i32,
}

impl From<CliError> for PointFailure {
    fn from(e: CliError) -> Self {
        Self {
            message: e.to_string(),
            code: e.exit_code(),
        }
    }
}

pub type PointResult = std::result::Result<Outputs, PointFailure>;

/// Evaluates every point of every sweep, integrating each distinct scenario
/// once. Results come back in input order regardless of scheduling.
pub fn evaluate_sweeps(specs: &[SweepSpec], jobs: usize) -> Result<Vec<Vec<PointResult>>> {
    let mut unique: Vec<(ScenarioConfig, Selection)> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut plan: Vec<Vec<std::result::Result<usize, PointFailure>>> = Vec::new();
    for spec in specs {
        spec.validate()?;
        let mut points = Vec::with_capacity(spec.values.len());
        for &v in &spec.values {
            points.push(match spec.point_config(v) {
                Ok(cfg) => {
                    let key = cfg.to_kv_text();
                    let slot = *index.entry(key).or_insert_with(|| {
                        unique.push((cfg, Selection::default()));
                        unique.len() - 1
                    });
                    unique[slot].1 = unique[slot].1.union(&spec.selection);
                    Ok(slot)
                }
                Err(e) => Err(e.into()),
            });
        }
        plan.push(points);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
    let results: Vec<PointResult> = pool.install(|| {
        unique
            .par_iter()
            .map(|(cfg, sel)| {
                compute(cfg, &sel.groups())
                    .map(|(o, _)| o)
                    .map_err(PointFailure::from)
            })
            .collect()
    });

    Ok(specs
        .iter()
        .zip(plan)
        .map(|(spec, points)| {
            points
                .into_iter()
                .map(|p| {
                    p.and_then(|slot| results[slot].clone())
                        .map(|o| o.filtered(&spec.selection))
                })
                .collect()
        })
        .collect())
}

/// Writes `<stem>.csv` (and `<stem>_scalars.csv` when any point has scalars).
fn write_sweep(
    dir: &mut OutputDir,
    id: &str,
    stem: &str,
    kind: &str,
    spec: &SweepSpec,
    results: &[PointResult],
) -> Result<(SweepRecord, Vec<FileEntry>)> {
    let mut long = LongCsv::default();
    let mut scalars = String::new();
    let mut points = Vec::with_capacity(results.len());
    for (index, (&value, result)) in spec.values.iter().zip(results).enumerate() {
        match result {
            Ok(outputs) => {
                for series in outputs.series(&spec.selection) {
                    long.push_series(value, series);
                }
                for (name, v) in &outputs.scalars {
                    let _ = writeln!(
                        scalars,
                        "{},{name},{}",
                        format_number(Some(value)),
                        format_number(Some(*v))
                    );
                }
                points.push(PointRecord {
                    index,
                    value,
                    cycle: Some(outputs.cycle.clone()),
                    status: "ok",
                    error: None,
                });
            }
            Err(f) => points.push(PointRecord {
                index,
                value,
                cycle: None,
                status: "failed",
                error: Some(f.message.clone()),
            }),
        }
    }
    let mut files = Vec::new();
    let data = format!("{stem}.csv");
    let mut entry = dir.write(&data, &long.finish())?;
    entry.series = spec.selection.names();
    files.push(entry);
    let scalars_file = if scalars.is_empty() {
        None
    } else {
        let name = format!("{stem}_scalars.csv");
        files.push(dir.write(&name, &format!("param,measure,value\n{scalars}"))?);
        Some(name)
    };
    let record = SweepRecord {
        id: id.to_string(),
        kind: kind.to_string(),
        param: spec.param.clone(),
        values: spec.values.clone(),
        base: spec.base.clone(),
        measures: spec.selection.names(),
        boundary_t_m1: spec.base.boundary_t_m1(),
        data,
        scalars: scalars_file,
        points,
    };
    Ok((record, files))
}

fn failure_summary(results: &[&[PointResult]]) -> Option<CliError> {
    let failures: Vec<&PointFailure> = results
        .iter()
        .flat_map(|r| r.iter())
        .filter_map(|r| r.as_ref().err())
        .collect();
    let total = results.iter().map(|r| r.len()).sum();
    failures.first().map(|f| CliError::PartialFailure {
        failed: failures.len(),
        total,
        code: f.code,
    })
}

/// Runs one sweep into `out` (`sweep.csv`, optional `sweep_scalars.csv`, `manifest.json`).
/// Failed points are recorded in the manifest; the error is returned after writing.
pub fn run_sweep(spec: &SweepSpec, out: PathBuf, jobs: usize) -> Result<Manifest> {
    let results = evaluate_sweeps(std::slice::from_ref(spec), jobs)?.remove(0);
    let mut dir = OutputDir::create(out)?;
    let written = (|| {
        let mut manifest = Manifest::new("sweep");
        manifest.config = Some(spec.base.clone());
        manifest.measures = spec.selection.names();
        let (record, files) = write_sweep(&mut dir, "", "sweep", "contour", spec, &results)?;
        manifest.sweeps.push(record);
        manifest.files.extend(files);
        dir.write(MANIFEST_FILE, &manifest.to_json())?;
        Ok(manifest)
    })();
    match written {
        Err(e) => {
            dir.discard();
            Err(e)
        }
        Ok(manifest) => match failure_summary(&[&results]) {
            Some(e) => Err(e),
            None => Ok(manifest),
        },
    }
}

/// `count` evenly spaced values from `start` to `stop` inclusive, rounded to
/// 12 significant digits so that grid points print as short decimals.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    stop
                } else {
                    let x = start + (stop - start) * k as f64 / (count - 1) as f64;
                    format!("{x:.11e}").parse().unwrap_or(x)
                }
            })
            .collect(),
    }
}

/// Coupling family used by the curve figures.
pub const COUPLING_FAMILY: [f64; 4] = [0.03, 0.05, 0.07, 0.09];
/// Coupling of the entanglement contour.
pub const ENTANGLEMENT_COUPLING: f64 = 0.9;
pub const HEAT_CONTOUR_POINTS: usize = 46;
pub const ENTANGLEMENT_CONTOUR_POINTS: usize = 19;
/// Cold-bath temperatures of the two cycles, in units of `T_M2`.
pub const CYCLE_A_RATIO: f64 = 0.1;
pub const CYCLE_B_RATIO: f64 = 0.8;

pub struct FigureSweep {
    pub stem: String,
    pub kind: &'static str,
    pub spec: SweepSpec,
}

pub struct FigureSpec {
    pub id: &'static str,
    pub title: &'static str,
    pub panels: Vec<&'static str>,
    pub sweeps: Vec<FigureSweep>,
}

pub const FIGURE_IDS: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// The five canned protocols on top of `base` (which supplies energies, rates, grid and `T_M2`).
pub fn figure_specs(base: &ScenarioConfig) -> Result<Vec<FigureSpec>> {
    let with = |pairs: &[(&str, f64)]| -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        for &(k, v) in pairs {
            cfg.set_numeric(k, v)?;
        }
        Ok(cfg)
    };
    let t2 = base.t_m2;
    let cycle_sweeps = |fig: &str, selection: Selection| -> Result<Vec<FigureSweep>> {
        [("A", CYCLE_A_RATIO), ("B", CYCLE_B_RATIO)]
            .into_iter()
            .map(|(label, ratio)| {
                Ok(FigureSweep {
                    stem: format!("{fig}/cycle_{label}"),
                    kind: "curves",
                    spec: SweepSpec {
                        param: "g".into(),
                        values: COUPLING_FAMILY.to_vec(),
                        base: with(&[("T_M1", ratio * t2)])?,
                        selection: selection.clone(),
                    },
                })
            })
            .collect()
    };
    let blp_and_mi = Selection::parse(
        "nonmarkovianity_M,nonmarkovianity_S1,nonmarkovianity_S2,trace_distance_M,trace_distance_S1,trace_distance_S2,mutual_information_MS",
    )?;
    let mut fig5 = cycle_sweeps("fig5", blp_and_mi)?;
    fig5.push(FigureSweep {
        stem: "fig5/entanglement".into(),
        kind: "contour",
        spec: SweepSpec {
            param: "T_M1".into(),
            values: linspace(CYCLE_A_RATIO * t2, t2, ENTANGLEMENT_CONTOUR_POINTS),
            base: with(&[("g", ENTANGLEMENT_COUPLING)])?,
            selection: Selection::parse("concurrence_S,mutual_information_S")?,
        },
    });
    Ok(vec![
        FigureSpec {
            id: "fig2",
            title: "Heat exchanged by each qubit over cold-bath temperature and time",
            panels: vec!["heat_M1", "heat_M2", "heat_S1", "heat_S2"],
            sweeps: vec![FigureSweep {
                stem: "fig2/heat".into(),
                kind: "contour",
                spec: SweepSpec {
                    param: "T_M1".into(),
                    values: linspace(CYCLE_A_RATIO * t2, t2, HEAT_CONTOUR_POINTS),
                    base: with(&[("g", 0.09)])?,
                    selection: Selection::of(&[Measure::Heat]),
                },
            }],
        },
        FigureSpec {
            id: "fig3",
            title: "Effective temperatures of the machine qubits and the virtual qubit",
            panels: vec!["temperature_M1", "temperature_M2", "temperature_M"],
            sweeps: cycle_sweeps("fig3", Selection::of(&[Measure::Temperature]))?,
        },
        FigureSpec {
            id: "fig4",
            title: "Entropy production and its rate",
            panels: vec!["entropy_production", "entropy_production_rate"],
            sweeps: cycle_sweeps("fig4", Selection::of(&[Measure::Entropy]))?,
        },
        FigureSpec {
            id: "fig5",
            title: "Non-Markovianity, mutual information and entanglement",
            panels: vec![
                "nonmarkovianity_M",
                "nonmarkovianity_S1",
                "nonmarkovianity_S2",
                "mutual_information_MS",
                "concurrence_S",
                "mutual_information_S",
            ],
            sweeps: fig5,
        },
        FigureSpec {
            id: "fig6",
            title: "Coherence of the external system and the coherence correlation",
            panels: vec![
                "coherence_global_S",
                "coherence_S1",
                "coherence_S2",
                "coherence_correlation_S",
            ],
            sweeps: cycle_sweeps("fig6", Selection::of(&[Measure::Coherence]))?,
        },
    ])
}

/// Runs the canned protocols (all, or those named in `only`) into `out`.
pub fn run_figures(
    base: &ScenarioConfig,
    only: Option<&[String]>,
    out: PathBuf,
    jobs: usize,
) -> Result<Manifest> {
    base.validate()?;
    if let Some(ids) = only {
        if let Some(bad) = ids.iter().find(|id| !FIGURE_IDS.contains(&id.as_str())) {
            return Err(CliError::Validation(format!(
                "unknown figure `{bad}`; expected one of {}",
                FIGURE_IDS.join(", ")
            )));
        }
    }
    let figures: Vec<FigureSpec> = figure_specs(base)?
        .into_iter()
        .filter(|f| only.is_none_or(|ids| ids.iter().any(|id| id == f.id)))
        .collect();
    let specs: Vec<SweepSpec> = figures
        .iter()
        .flat_map(|f| f.sweeps.iter().map(|s| s.spec.clone()))
        .collect();
    let results = evaluate_sweeps(&specs, jobs)?;

    let mut dir = OutputDir::create(out)?;
    let written = (|| {
        let mut manifest = Manifest::new("figures");
        manifest.config = Some(base.clone());
        let mut k = 0;
        for fig in &figures {
            let mut ids = Vec::new();
            for sweep in &fig.sweeps {
                let (record, files) = write_sweep(
                    &mut dir,
                    &sweep.stem,
                    &sweep.stem,
                    sweep.kind,
                    &sweep.spec,
                    &results[k],
                )?;
                k += 1;
                ids.push(sweep.stem.clone());
                manifest.sweeps.push(record);
                manifest.files.extend(files);
            }
            manifest.figures.push(FigureRecord {
                id: fig.id.to_string(),
                title: fig.title.to_string(),
                panels: fig.panels.iter().map(|p| p.to_string()).collect(),
                sweeps: ids,
            });
        }
        dir.write(MANIFEST_FILE, &manifest.to_json())?;
        Ok(manifest)
    })();
    match written {
        Err(e) => {
            dir.discard();
            Err(e)
        }
        Ok(manifest) => {
            let refs: Vec<&[PointResult]> = results.iter().map(|r| r.as_slice()).collect();
            match failure_summary(&refs) {
                Some(e) => Err(e),
                None => Ok(manifest),
            }
        }
    }
}
