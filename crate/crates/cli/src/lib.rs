//! Command-line front end for the qatm thermal-machine simulations.

pub mod engine;
pub mod error;
pub mod measures;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qatm_core::model::ScenarioConfig;

pub use error::{CliError, Result};

use crate::engine::{linspace, run_figures, run_single, run_sweep, SweepSpec};
use crate::measures::{CycleInfo, Selection};
use crate::output::Manifest;

/// Environment variable consulted when `--out` is absent.
pub const OUT_ENV: &str = "QATM_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "qatm",
    version,
    about = "Two-qubit autonomous thermal machine simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one scenario and write its measure time series.
    Run(RunArgs),
    /// Repeat a scenario over values of one numeric parameter.
    Sweep(SweepArgs),
    /// Produce the datasets behind the five canned figures.
    Figures(FiguresArgs),
    /// Check a configuration and print its cycle classification.
    Validate(ConfigArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// `key = value` configuration file; unspecified keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set g=0.05` (repeatable, applied after --config).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Output directory (default: $QATM_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated measure groups or series names (default: all).
    #[arg(long)]
    measures: Option<String>,
    /// Also write the full 16x16 state at every sample to trajectory.csv.
    #[arg(long)]
    dump_trajectory: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    measures: Option<String>,
    /// Numeric configuration key to vary.
    #[arg(long)]
    param: String,
    /// Comma-separated, strictly monotone values.
    #[arg(long, conflicts_with = "range", required_unless_present = "range")]
    values: Option<String>,
    /// `START:STOP:COUNT`, evenly spaced and inclusive.
    #[arg(long)]
    range: Option<String>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of fig2,fig3,fig4,fig5,fig6.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                ScenarioConfig::from_kv_text(&text)?
            }
            None => ScenarioConfig::default(),
        };
        for assignment in &self.set {
            cfg.apply_override(assignment)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(out: Option<PathBuf>) -> Result<PathBuf> {
    out.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            CliError::Validation(format!("no output directory: pass --out or set {OUT_ENV}"))
        })
}

fn selection(measures: Option<&str>) -> Result<Selection> {
    measures.map_or_else(|| Ok(Selection::all()), Selection::parse)
}

fn jobs(n: Option<usize>) -> Result<usize> {
    match n {
        Some(0) => Err(CliError::Validation("--jobs must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Parses `a,b,c` or `start:stop:count`.
pub fn parse_values(values: Option<&str>, range: Option<&str>) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Validation(format!("`{s}` is not a number")))
    };
    match (values, range) {
        (Some(list), None) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect(),
        (None, Some(r)) => {
            let parts: Vec<&str> = r.split(':').collect();
            let [start, stop, count] = parts[..] else {
                return Err(CliError::Validation(format!(
                    "range `{r}` is not START:STOP:COUNT"
                )));
            };
            let count: usize = count.trim().parse().map_err(|_| {
                CliError::Validation(format!("range count `{count}` is not a positive integer"))
            })?;
            if count == 0 {
                return Err(CliError::Validation(
                    "range count must be at least 1".into(),
                ));
            }
            Ok(linspace(num(start)?, num(stop)?, count))
        }
        _ => Err(CliError::Validation(
            "give exactly one of --values and --range".into(),
        )),
    }
}

fn report(manifest: &Manifest, out: &std::path::Path) {
    println!(
        "wrote {} files and {} to {}",
        manifest.files.len(),
        output::MANIFEST_FILE,
        out.display()
    );
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Validate(args) => {
            let cfg = args.load()?;
            let cycle = CycleInfo::of(&cfg)?;
            println!("configuration ok");
            println!("cycle = {}", cycle.label);
            match cycle.virtual_temperature {
                Some(t) => println!("T_M = {t}"),
                None => println!("T_M = inf"),
            }
            println!("boundary T_M1 = {}", cycle.boundary_t_m1);
            Ok(())
        }
        Command::Run(args) => {
            let cfg = args.cfg.load()?;
            let sel = selection(args.measures.as_deref())?;
            let out = out_dir(args.out)?;
            let manifest = run_single(&cfg, &sel, out.clone(), args.dump_trajectory)?;
            report(&manifest, &out);
            Ok(())
        }
        Command::Sweep(args) => {
            let spec = SweepSpec {
                param: args.param,
                values: parse_values(args.values.as_deref(), args.range.as_deref())?,
                base: args.cfg.load()?,
                selection: selection(args.measures.as_deref())?,
            };
            spec.validate()?;
            let jobs = jobs(args.jobs)?;
            let out = out_dir(args.out)?;
            let manifest = run_sweep(&spec, out.clone(), jobs)?;
            report(&manifest, &out);
            Ok(())
        }
        Command::Figures(args) => {
            let cfg = args.cfg.load()?;
            let only: Option<Vec<String>> = args.only.as_deref().map(|s| {
                s.split(',')
                    .map(|x| x.trim().to_string())
                    .filter(|x| !x.is_empty())
                    .collect()
            });
            let jobs = jobs(args.jobs)?;
            let out = out_dir(args.out)?;
            let manifest = run_figures(&cfg, only.as_deref(), out.clone(), jobs)?;
            report(&manifest, &out);
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists_and_ranges() {
        assert_eq!(
            parse_values(Some("0.1, 0.2,0.3"), None).unwrap(),
            vec![0.1, 0.2, 0.3]
        );
        assert_eq!(
            parse_values(None, Some("0:1:3")).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert!(parse_values(None, Some("0:1")).is_err());
        assert!(parse_values(None, Some("0:1:0")).is_err());
        assert!(parse_values(Some("a"), None).is_err());
    }

    #[test]
    fn parse_errors_exit_with_validation_code() {
        assert_eq!(main_with_args(["qatm", "frobnicate"]), 2);
        assert_eq!(main_with_args(["qatm", "validate", "--set", "g=-1"]), 2);
        assert_eq!(main_with_args(["qatm", "validate", "--set", "T_M1=0.3"]), 0);
    }
}
