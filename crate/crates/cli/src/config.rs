//! Run configuration: a flat `key = value` file plus `--key value` overrides.
//!
//! Lengths are in units of `sigma0`, wavenumbers in `1/sigma0`, masses in
//! neutron masses and times in the neutron reference time. `sigma0` itself is
//! in metres and `g` in m/s^2. Lines starting with `#` are comments.

use std::fmt;
use std::path::{Path, PathBuf};

use weq_core::quadrature::{CutoffRule, QuadraturePolicy};
use weq_core::spin_current::SpinScenario;
use weq_core::{
    reference_time, GaussianPacketSpec, Scenario, StatisticsKind, TwoBodyConfig, NEUTRON_MASS,
};

use crate::error::{CliError, CliResult};

/// Every key accepted in a file (plus `out` and `quick` on the command line).
pub const KEYS: &[&str] = &[
    "sigma0",
    "sigma_a",
    "sigma_b",
    "z_ca",
    "z_cb",
    "separation",
    "k",
    "k_a",
    "k_b",
    "mass",
    "g",
    "detector_z",
    "scenario",
    "statistics",
    "masses",
    "mass_min",
    "mass_max",
    "mass_points",
    "spin_z_c",
    "spin_k0",
    "spin_axis",
    "abs_tol",
    "rel_tol",
    "max_subdivisions",
    "cutoff",
    "tail_fraction",
    "time_points",
    "t_max",
    "format",
    "debug_norm_factor",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioChoice {
    Free,
    Fall,
    Both,
}

impl ScenarioChoice {
    pub fn scenarios(self, g: f64) -> Vec<Scenario> {
        match self {
            ScenarioChoice::Free => vec![Scenario::FreeEvolution],
            ScenarioChoice::Fall => vec![Scenario::FreeFall { g }],
            ScenarioChoice::Both => vec![Scenario::FreeEvolution, Scenario::FreeFall { g }],
        }
    }
}

impl fmt::Display for ScenarioChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioChoice::Free => "free",
            ScenarioChoice::Fall => "fall",
            ScenarioChoice::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn delimiter(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sigma0: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub z_ca: Vec<f64>,
    pub z_cb: f64,
    pub separation: Option<f64>,
    pub k_a: Option<f64>,
    pub k_b: Option<f64>,
    pub mass: f64,
    pub g: f64,
    pub detector_z: f64,
    pub scenario: Option<ScenarioChoice>,
    pub statistics: Vec<StatisticsKind>,
    pub masses: Option<Vec<f64>>,
    pub mass_min: f64,
    pub mass_max: f64,
    pub mass_points: usize,
    pub spin_z_c: f64,
    pub spin_k0: f64,
    pub spin_axis: [f64; 3],
    pub policy: QuadraturePolicy,
    pub time_points: usize,
    pub t_max: Option<f64>,
    pub format: Format,
    pub debug_norm_factor: f64,
    pub out: Option<PathBuf>,
    pub quick: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma0: 10e-6,
            sigma_a: 1.0,
            sigma_b: 1.0,
            z_ca: vec![10.0, 11.0, 12.0, 13.0],
            z_cb: 8.0,
            separation: None,
            k_a: None,
            k_b: None,
            mass: 1.0,
            g: 10.0,
            detector_z: 0.0,
            scenario: None,
            statistics: StatisticsKind::ALL.to_vec(),
            masses: None,
            mass_min: 0.25,
            mass_max: 100.0,
            mass_points: 40,
            spin_z_c: 8.0,
            spin_k0: 0.0,
            spin_axis: SpinScenario::Y_AXIS,
            policy: QuadraturePolicy::default(),
            time_points: 601,
            t_max: None,
            format: Format::Csv,
            debug_norm_factor: 1.0,
            out: None,
            quick: false,
        }
    }
}

/// Where a setting came from, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    File { path: String, line: usize },
    CommandLine,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::CommandLine => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

pub fn read_file(path: &Path) -> CliResult<Vec<Setting>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_text(&text, &path.display().to_string())
}

pub fn parse_text(text: &str, path: &str) -> CliResult<Vec<Setting>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let origin = Origin::File {
            path: path.to_string(),
            line: i + 1,
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Validation(format!(
                "{origin}: expected `key = value`, got `{line}`"
            )));
        };
        out.push(Setting {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            origin,
        });
    }
    Ok(out)
}

/// Splits `--key value` pairs; `--quick` takes no value.
pub fn parse_overrides(args: &[String]) -> CliResult<Vec<Setting>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            return Err(CliError::Validation(format!(
                "unexpected argument `{arg}`; overrides take the form --key value"
            )));
        };
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None if key == "quick" => (key.to_string(), "true".to_string()),
            None => {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Validation(format!("missing value for --{key}")))?;
                (key.to_string(), value.clone())
            }
        };
        out.push(Setting {
            key: key.replace('-', "_"),
            value,
            origin: Origin::CommandLine,
        });
    }
    Ok(out)
}

fn bad(setting: &Setting, reason: impl fmt::Display) -> CliError {
    CliError::Validation(format!(
        "{}: invalid value `{}` for `{}`: {reason}",
        setting.origin, setting.value, setting.key
    ))
}

fn number(s: &Setting) -> CliResult<f64> {
    let v: f64 = s.value.parse().map_err(|e| bad(s, e))?;
    if !v.is_finite() {
        return Err(bad(s, "must be finite"));
    }
    Ok(v)
}

fn positive(s: &Setting) -> CliResult<f64> {
    let v = number(s)?;
    if v <= 0.0 {
        return Err(bad(s, "must be > 0"));
    }
    Ok(v)
}

fn count(s: &Setting) -> CliResult<usize> {
    s.value.parse().map_err(|e| bad(s, e))
}

fn list(s: &Setting) -> CliResult<Vec<f64>> {
    s.value
        .split(',')
        .map(|p| {
            let v: f64 = p.trim().parse().map_err(|e| bad(s, e))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(s, "entries must be finite"))
            }
        })
        .collect()
}

impl RunConfig {
    /// Applies settings in order, later ones winning.
    pub fn apply(&mut self, settings: &[Setting]) -> CliResult<()> {
        for s in settings {
            self.apply_one(s)?;
        }
        Ok(())
    }

    fn apply_one(&mut self, s: &Setting) -> CliResult<()> {
        match s.key.as_str() {
            "sigma0" => self.sigma0 = positive(s)?,
            "sigma_a" => self.sigma_a = positive(s)?,
            "sigma_b" => self.sigma_b = positive(s)?,
            "z_ca" => {
                self.z_ca = list(s)?;
                self.separation = None;
            }
            "z_cb" => self.z_cb = number(s)?,
            "separation" => self.separation = Some(number(s)?),
            "k" => {
                let k = number(s)?;
                self.k_a = Some(k);
                self.k_b = Some(k);
            }
            "k_a" => self.k_a = Some(number(s)?),
            "k_b" => self.k_b = Some(number(s)?),
            "mass" => self.mass = positive(s)?,
            "g" => self.g = positive(s)?,
            "detector_z" => self.detector_z = number(s)?,
            "scenario" => {
                self.scenario = Some(match s.value.to_ascii_lowercase().as_str() {
                    "free" => ScenarioChoice::Free,
                    "fall" => ScenarioChoice::Fall,
                    "both" => ScenarioChoice::Both,
                    _ => return Err(bad(s, "expected free, fall or both")),
                })
            }
            "statistics" => {
                let v = s.value.to_ascii_lowercase();
                self.statistics = if v == "all" {
                    StatisticsKind::ALL.to_vec()
                } else {
                    let mut picked: Vec<StatisticsKind> = v
                        .split(',')
                        .map(|p| p.trim().parse().map_err(|e| bad(s, e)))
                        .collect::<CliResult<_>>()?;
                    picked.sort_by_key(|k| StatisticsKind::ALL.iter().position(|a| a == k));
                    picked.dedup();
                    picked
                };
            }
            "masses" => {
                let m = list(s)?;
                if m.is_empty() || m.iter().any(|v| *v <= 0.0) {
                    return Err(bad(s, "masses must be > 0"));
                }
                if m.windows(2).any(|w| w[0] > w[1]) {
                    return Err(bad(s, "masses must be sorted"));
                }
                self.masses = Some(m);
            }
            "mass_min" => self.mass_min = positive(s)?,
            "mass_max" => self.mass_max = positive(s)?,
            "mass_points" => {
                self.mass_points = count(s)?;
                if self.mass_points == 0 {
                    return Err(bad(s, "need at least one point"));
                }
            }
            "spin_z_c" => self.spin_z_c = number(s)?,
            "spin_k0" => self.spin_k0 = number(s)?,
            "spin_axis" => {
                let v = list(s)?;
                let [x, y, z] = v[..] else {
                    return Err(bad(s, "expected three components"));
                };
                let n = (x * x + y * y + z * z).sqrt();
                if !((n - 1.0).abs() < 1e-12) {
                    return Err(bad(s, "must be a unit vector"));
                }
                self.spin_axis = [x, y, z];
            }
            "abs_tol" => self.policy.abs_tol = positive(s)?,
            "rel_tol" => self.policy.rel_tol = positive(s)?,
            "max_subdivisions" => self.policy.max_subdivisions = count(s)?,
            "cutoff" => {
                self.policy.cutoff = match s.value.to_ascii_lowercase().as_str() {
                    "auto" => CutoffRule::Auto,
                    "adaptive" => CutoffRule::Adaptive,
                    _ => CutoffRule::FixedReferenceTimes(positive(s)?),
                }
            }
            "tail_fraction" => self.policy.tail_fraction = positive(s)?,
            "time_points" => {
                self.time_points = count(s)?;
                if self.time_points < 3 {
                    return Err(bad(s, "need at least 3 points"));
                }
            }
            "t_max" => self.t_max = Some(positive(s)?),
            "format" => {
                self.format = match s.value.to_ascii_lowercase().as_str() {
                    "csv" => Format::Csv,
                    "tsv" => Format::Tsv,
                    _ => return Err(bad(s, "expected csv or tsv")),
                }
            }
            "debug_norm_factor" => self.debug_norm_factor = positive(s)?,
            "out" => self.out = Some(PathBuf::from(&s.value)),
            "quick" => {
                self.quick = s.value.parse().map_err(|e| bad(s, e))?;
            }
            other => {
                return Err(CliError::Validation(format!(
                    "{}: unknown key `{other}` (accepted: {})",
                    s.origin,
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        self.policy
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        if self.mass_min > self.mass_max {
            return Err(CliError::Validation(
                "mass_min must not exceed mass_max".into(),
            ));
        }
        if self.z_ca_values().is_empty() {
            return Err(CliError::Validation("z_ca list is empty".into()));
        }
        if self.statistics.is_empty() {
            return Err(CliError::Validation("no statistics selected".into()));
        }
        Ok(())
    }

    pub fn z_ca_values(&self) -> Vec<f64> {
        match self.separation {
            Some(d) => vec![self.z_cb + d],
            None => self.z_ca.clone(),
        }
    }

    /// Mass grid in units of the neutron mass.
    pub fn mass_grid(&self) -> Vec<f64> {
        if let Some(m) = &self.masses {
            return m.clone();
        }
        let n = self.mass_points;
        if n == 1 {
            return vec![self.mass_min];
        }
        let ratio = self.mass_max / self.mass_min;
        (0..n)
            .map(|i| self.mass_min * ratio.powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    /// Neutron reference time for this `sigma0`; the unit of every reported time.
    pub fn t_ref(&self) -> f64 {
        reference_time(NEUTRON_MASS, self.sigma0)
    }

    /// Kicks for both packets; without overrides, `-2/sigma0` in free
    /// evolution and rest in the field.
    pub fn kicks(&self, scenario: Scenario) -> (f64, f64) {
        let default = if scenario.is_free_fall() { 0.0 } else { -2.0 };
        (self.k_a.unwrap_or(default), self.k_b.unwrap_or(default))
    }

    pub fn two_body(
        &self,
        z_ca: f64,
        statistics: StatisticsKind,
        scenario: Scenario,
    ) -> CliResult<TwoBodyConfig> {
        let s = self.sigma0;
        let (ka, kb) = self.kicks(scenario);
        let a = GaussianPacketSpec::new(self.sigma_a * s, z_ca * s, ka / s)?;
        let b = GaussianPacketSpec::new(self.sigma_b * s, self.z_cb * s, kb / s)?;
        Ok(TwoBodyConfig::new(
            a,
            b,
            statistics,
            scenario,
            self.mass * NEUTRON_MASS,
        )?)
    }

    pub fn spin_scenario(&self) -> CliResult<SpinScenario> {
        let s = self.sigma0;
        Ok(SpinScenario::new(
            s,
            self.spin_z_c * s,
            self.spin_k0 / s,
            self.mass * NEUTRON_MASS,
            self.g,
            self.spin_axis,
        )?)
    }

    pub fn detector(&self) -> f64 {
        self.detector_z * self.sigma0
    }

    /// `(key, value)` pairs for the output header.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        let opt = |v: Option<f64>| v.map_or("default".to_string(), |x| x.to_string());
        let p = &self.policy;
        vec![
            ("sigma0", self.sigma0.to_string()),
            ("sigma_a", self.sigma_a.to_string()),
            ("sigma_b", self.sigma_b.to_string()),
            ("z_ca", list(&self.z_ca_values())),
            ("z_cb", self.z_cb.to_string()),
            ("k_a", opt(self.k_a)),
            ("k_b", opt(self.k_b)),
            ("mass", self.mass.to_string()),
            ("g", self.g.to_string()),
            ("detector_z", self.detector_z.to_string()),
            (
                "statistics",
                self.statistics
                    .iter()
                    .map(|s| s.tag())
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            ("abs_tol", p.abs_tol.to_string()),
            ("rel_tol", p.rel_tol.to_string()),
            ("max_subdivisions", p.max_subdivisions.to_string()),
            (
                "cutoff",
                match p.cutoff {
                    CutoffRule::Auto => "auto".into(),
                    CutoffRule::Adaptive => "adaptive".into(),
                    CutoffRule::FixedReferenceTimes(n) => n.to_string(),
                },
            ),
            ("tail_fraction", p.tail_fraction.to_string()),
        ]
    }
}
