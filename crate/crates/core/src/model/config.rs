use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::qcore::LogBase;
use crate::{Error, Result};

/// Which bath temperatures divide the machine heats in the entropy production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaTemperatureMode {
    /// Constant reservoir temperatures `T_M1`, `T_M2`.
    FixedReservoir,
    /// Instantaneous effective temperatures of the machine qubits.
    Instantaneous,
}

impl fmt::Display for SigmaTemperatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaTemperatureMode::FixedReservoir => "fixed_reservoir",
            SigmaTemperatureMode::Instantaneous => "instantaneous",
        })
    }
}

impl FromStr for SigmaTemperatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fixed_reservoir" => Ok(Self::FixedReservoir),
            "instantaneous" => Ok(Self::Instantaneous),
            other => Err(Error::Config(format!(
                "sigma_temperature_mode must be `fixed_reservoir` or `instantaneous`, got `{other}`"
            ))),
        }
    }
}

/// Physical and numerical parameters of one scenario. Units: hbar = k_B = 1,
/// energies normalized so that the default `E_M2` is 10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(rename = "E_M1")]
    pub e_m1: f64,
    #[serde(rename = "E_M2")]
    pub e_m2: f64,
    #[serde(rename = "E_S1")]
    pub e_s1: f64,
    #[serde(rename = "E_S2")]
    pub e_s2: f64,
    #[serde(rename = "T_M1")]
    pub t_m1: f64,
    #[serde(rename = "T_M2")]
    pub t_m2: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub g: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sample_stride: usize,
    pub log_base: LogBase,
    pub sigma_temperature_mode: SigmaTemperatureMode,
}

impl Default for ScenarioConfig {
    /// Cycle-A operating point: `E_M = (5, 10)`, `T_M1 = 0.1 T_M2`, `gamma = 0.1`, `g = 0.09`.
    fn default() -> Self {
        Self {
            e_m1: 5.0,
            e_m2: 10.0,
            e_s1: 5.0,
            e_s2: 10.0,
            t_m1: 0.1,
            t_m2: 1.0,
            gamma_1: 0.1,
            gamma_2: 0.1,
            g: 0.09,
            t_max: 50.0,
            dt: 0.001,
            sample_stride: 100,
            log_base: LogBase::Two,
            sigma_temperature_mode: SigmaTemperatureMode::FixedReservoir,
        }
    }
}

impl ScenarioConfig {
    /// Every accepted key, in file order.
    pub const KEYS: [&'static str; 14] = [
        "E_M1",
        "E_M2",
        "E_S1",
        "E_S2",
        "T_M1",
        "T_M2",
        "gamma_1",
        "gamma_2",
        "g",
        "t_max",
        "dt",
        "sample_stride",
        "log_base",
        "sigma_temperature_mode",
    ];

    /// Default parameters with the cold bath at `t_m1` (in units of `T_M2 = 1`).
    pub fn with_t_m1(t_m1: f64) -> Self {
        Self {
            t_m1,
            ..Self::default()
        }
    }

    pub fn cycle_a() -> Self {
        Self::with_t_m1(0.1)
    }

    pub fn cycle_b() -> Self {
        Self::with_t_m1(0.8)
    }

    /// Checks every constraint and names the first one violated.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        for (key, v) in self.numeric_fields() {
            if !v.is_finite() {
                return fail(format!("{key} must be finite, got {v}"));
            }
        }
        for (key, e) in [
            ("E_M1", self.e_m1),
            ("E_M2", self.e_m2),
            ("E_S1", self.e_s1),
            ("E_S2", self.e_s2),
        ] {
            if e <= 0.0 {
                return fail(format!("energy {key} must be > 0, got {e}"));
            }
        }
        if self.e_m2 <= self.e_m1 {
            return fail(format!(
                "constraint E_M2 > E_M1 violated (E_M1 = {}, E_M2 = {})",
                self.e_m1, self.e_m2
            ));
        }
        let machine_gap = self.e_m2 - self.e_m1;
        let system_gap = self.e_s2 - self.e_s1;
        let scale = self.e_m1.max(self.e_m2).max(self.e_s1).max(self.e_s2);
        if (machine_gap - system_gap).abs() > 1e-12 * scale {
            return fail(format!(
                "resonance E_M2 - E_M1 = E_S2 - E_S1 violated ({machine_gap} vs {system_gap})"
            ));
        }
        for (key, t) in [("T_M1", self.t_m1), ("T_M2", self.t_m2)] {
            if t <= 0.0 {
                return fail(format!("temperature {key} must be > 0, got {t}"));
            }
        }
        for (key, r) in [
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("g", self.g),
        ] {
            if r < 0.0 {
                return fail(format!("{key} must be >= 0, got {r}"));
            }
        }
        if self.dt <= 0.0 {
            return fail(format!("dt must be > 0, got {}", self.dt));
        }
        if self.t_max < self.dt {
            return fail(format!(
                "t_max must be >= dt (t_max = {}, dt = {})",
                self.t_max, self.dt
            ));
        }
        if self.sample_stride == 0 {
            return fail("sample_stride must be >= 1".into());
        }
        Ok(())
    }

    fn numeric_fields(&self) -> [(&'static str, f64); 11] {
        [
            ("E_M1", self.e_m1),
            ("E_M2", self.e_m2),
            ("E_S1", self.e_s1),
            ("E_S2", self.e_s2),
            ("T_M1", self.t_m1),
            ("T_M2", self.t_m2),
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("g", self.g),
            ("t_max", self.t_max),
            ("dt", self.dt),
        ]
    }

    /// Sets one field from its textual value. Does not validate the result.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: `{value}` is not a number")))
        };
        match key.trim() {
            "E_M1" => self.e_m1 = num()?,
            "E_M2" => self.e_m2 = num()?,
            "E_S1" => self.e_s1 = num()?,
            "E_S2" => self.e_s2 = num()?,
            "T_M1" => self.t_m1 = num()?,
            "T_M2" => self.t_m2 = num()?,
            "gamma_1" => self.gamma_1 = num()?,
            "gamma_2" => self.gamma_2 = num()?,
            "g" => self.g = num()?,
            "t_max" => self.t_max = num()?,
            "dt" => self.dt = num()?,
            "sample_stride" => {
                self.sample_stride = value.parse().map_err(|_| {
                    Error::Config(format!(
                        "sample_stride: `{value}` is not a positive integer"
                    ))
                })?
            }
            "log_base" => {
                self.log_base = value
                    .parse()
                    .map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "sigma_temperature_mode" => self.sigma_temperature_mode = value.parse()?,
            other => {
                return Err(Error::Config(format!(
                    "unknown configuration key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Sets a numeric field. Used by parameter sweeps.
    pub fn set_numeric(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "log_base" | "sigma_temperature_mode" => {
                Err(Error::Config(format!("`{key}` is not a numeric parameter")))
            }
            _ => self.set(key, &value.to_string()),
        }
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(key, value)
    }

    /// Parses the flat `key = value` format on top of the defaults. `#` starts a
    /// comment; unknown or repeated keys are errors.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` given twice",
                    lineno + 1
                )));
            }
            cfg.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip(&e))))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    /// Renders the configuration in the same `key = value` format.
    pub fn to_kv_text(&self) -> String {
        let mut out = String::new();
        for (key, v) in self.numeric_fields() {
            out.push_str(&format!("{key} = {v}\n"));
        }
        out.push_str(&format!("sample_stride = {}\n", self.sample_stride));
        out.push_str(&format!("log_base = {}\n", self.log_base));
        out.push_str(&format!(
            "sigma_temperature_mode = {}\n",
            self.sigma_temperature_mode
        ));
        out
    }

    /// Number of integrator steps, rounded to the nearest whole step.
    pub fn step_count(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// The cold-bath temperature at which the machine switches cycle, `(E_M1 / E_M2) T_M2`.
    pub fn boundary_t_m1(&self) -> f64 {
        self.e_m1 / self.e_m2 * self.t_m2
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}
