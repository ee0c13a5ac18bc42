//! Run configuration for the `qsmooth` harness.
//!
//! Configuration is a flat `key = value` text file plus command-line
//! overrides; every run echoes the fully resolved configuration into its
//! output header, so an emitted CSV regenerates itself. Times are in units of
//! the Rabi period: the default drive frequency is `2 pi`, making `duration`,
//! `dt`, and the collapse timescales directly comparable across runs.

use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("duration/dt = {ratio} is not a positive integer number of steps")]
    NonIntegerSteps { ratio: f64 },
    #[error("initial Bloch vector norm {norm} exceeds 1")]
    BlochNorm { norm: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Which simulation the harness runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// One seeded trajectory, per-step trace.
    Single,
    /// Monte Carlo ensemble of estimate comparisons.
    Ensemble,
    /// Two-observer ensemble at a fixed `tau_x`.
    Dual,
    /// Two-observer positive-fraction sweep over `tau_x / tau_z`.
    DualSweep,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Single => "single",
            Scenario::Ensemble => "ensemble",
            Scenario::Dual => "dual",
            Scenario::DualSweep => "dual_sweep",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Scenario::Single),
            "ensemble" => Ok(Scenario::Ensemble),
            "dual" => Ok(Scenario::Dual),
            "dual_sweep" | "dual-sweep" => Ok(Scenario::DualSweep),
            other => Err(ConfigError::InvalidValue {
                key: "scenario".into(),
                message: format!("`{other}` is not one of single, ensemble, dual, dual_sweep"),
            }),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fully resolved run parameters. Time unit: the Rabi period.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Drive angular frequency; `2 pi` makes the Rabi period the time unit.
    pub omega: f64,
    /// Collapse timescale of the (z) monitor.
    pub tau: f64,
    /// Collapse timescale of the x monitor in the dual scenarios.
    pub tau_x: f64,
    pub dt: f64,
    /// Total monitored duration `T`; `T/dt` must be a whole number of steps.
    pub duration: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub initial_bloch: [f64; 3],
    /// `tau_x/tau` grid for the sweep scenario.
    pub ratios: Vec<f64>,
    /// Destination CSV; stdout when unset. Not echoed into the output
    /// header, so files written to different paths stay byte-comparable.
    pub output_path: Option<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Single,
            omega: std::f64::consts::TAU,
            tau: 2.0,
            tau_x: 2.5,
            dt: 0.01,
            duration: 50.0,
            realizations: 10_000,
            master_seed: 1,
            initial_bloch: [0.0, 0.0, 1.0],
            ratios: vec![2.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            output_path: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        message: format!("`{value}` is not a number"),
    })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|item| parse_f64(key, item.trim()))
        .collect()
}

fn parse_bloch(value: &str) -> Result<[f64; 3], ConfigError> {
    let parts = parse_list("initial_bloch", value)?;
    if parts.len() != 3 {
        return Err(ConfigError::InvalidValue {
            key: "initial_bloch".into(),
            message: format!(
                "expected three comma-separated components, got {}",
                parts.len()
            ),
        });
    }
    Ok([parts[0], parts[1], parts[2]])
}

impl ScenarioConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "omega" => self.omega = parse_f64(key, value)?,
            "tau" => self.tau = parse_f64(key, value)?,
            "tau_x" => self.tau_x = parse_f64(key, value)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "duration" => self.duration = parse_f64(key, value)?,
            "realizations" => {
                self.realizations = value.parse().map_err(|_| ConfigError::InvalidValue {
                    key: key.into(),
                    message: format!("`{value}` is not a count"),
                })?
            }
            "seed" | "master_seed" => {
                self.master_seed = value.parse().map_err(|_| ConfigError::InvalidValue {
                    key: key.into(),
                    message: format!("`{value}` is not a 64-bit seed"),
                })?
            }
            "initial_bloch" => self.initial_bloch = parse_bloch(value)?,
            "ratios" => self.ratios = parse_list(key, value)?,
            "out" | "output_path" => self.output_path = Some(value.to_string()),
            other => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: other.into(),
                })
            }
        }
        Ok(())
    }

    /// Reads `key = value` lines over the current values. `#` starts a
    /// comment; blank lines are skipped.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: idx + 1,
                text: raw.trim().to_string(),
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                ConfigError::UnknownKey { key, .. } => {
                    ConfigError::UnknownKey { line: idx + 1, key }
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Number of measurement steps `T/dt`; the ratio must land on an integer.
    pub fn steps(&self) -> Result<usize, ConfigError> {
        let ratio = self.duration / self.dt;
        let rounded = ratio.round();
        if !(rounded >= 1.0) || (ratio - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(ConfigError::NonIntegerSteps { ratio });
        }
        Ok(rounded as usize)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.omega.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "omega must be finite, got {}",
                self.omega
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        self.steps()?;
        let [x, y, z] = self.initial_bloch;
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm <= 1.0 + 1e-10) {
            return Err(ConfigError::BlochNorm { norm });
        }
        if matches!(
            self.scenario,
            Scenario::Ensemble | Scenario::Dual | Scenario::DualSweep
        ) && self.realizations == 0
        {
            return Err(ConfigError::Invalid("realizations must be >= 1".into()));
        }
        if self.scenario == Scenario::Dual && !(self.tau < self.tau_x) {
            return Err(ConfigError::Invalid(format!(
                "the dual scenario needs tau < tau_x, got tau = {}, tau_x = {}",
                self.tau, self.tau_x
            )));
        }
        if self.scenario == Scenario::DualSweep {
            if self.ratios.is_empty() {
                return Err(ConfigError::Invalid(
                    "sweep needs at least one ratio".into(),
                ));
            }
            for &r in &self.ratios {
                if !(r > 1.0) {
                    return Err(ConfigError::Invalid(format!(
                        "sweep ratios must exceed 1, got {r}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `key = value` lines echoing every resolved field, in fixed order.
    pub fn echo_lines(&self) -> Vec<String> {
        let ratios = self
            .ratios
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",");
        vec![
            format!("scenario = {}", self.scenario),
            format!("omega = {}", self.omega),
            format!("tau = {}", self.tau),
            format!("tau_x = {}", self.tau_x),
            format!("dt = {}", self.dt),
            format!("duration = {}", self.duration),
            format!("realizations = {}", self.realizations),
            format!("seed = {}", self.master_seed),
            format!(
                "initial_bloch = {},{},{}",
                self.initial_bloch[0], self.initial_bloch[1], self.initial_bloch[2]
            ),
            format!("ratios = {ratios}"),
        ]
    }
}
