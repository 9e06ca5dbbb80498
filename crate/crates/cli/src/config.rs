//! Run configuration: a TOML file whose frequencies are all ν = ω/2π in Hz.

use serde::{Deserialize, Serialize};
use std::path::Path;

use magnocool::constants::{angular_to_hz, hz_to_angular};
use magnocool::{
    rabi_for_target_coupling, steady_state, steady_state_resonant, BandFilter, FeedbackConfig,
    GridPolicy, ImpUnit, OperatingPoint, SteadyState, SystemParams, ThermalModel,
};

use crate::axis::AxisSpec;
use crate::error::CliError;

/// Bare magnomechanical coupling assumed when only G_m is given (Hz).
pub const NOMINAL_G_M_HZ: f64 = 1.0;

/// Gain used when the config does not set one.
pub const DEFAULT_G0: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega_a: f64,
    pub omega_m: f64,
    pub omega_b: f64,
    pub gamma_b: f64,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub g_a: f64,
    /// Effective magnomechanical coupling. Takes precedence over g_m/rabi.
    #[serde(rename = "G_m", default, skip_serializing_if = "Option::is_none")]
    pub big_g_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<f64>,
    /// Drive frequency; omitted means a drive resonant with the cavity and
    /// the shifted magnon mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_drive: Option<f64>,
    #[serde(rename = "T")]
    pub temperature: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    /// Half-width of the gain band; defaults to 2·omega_b.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_half_width: Option<f64>,
    #[serde(default)]
    pub filter: BandFilter,
    #[serde(default)]
    pub s_imp: f64,
    #[serde(default)]
    pub s_imp_unit: ImpUnit,
}

impl Default for FeedbackSection {
    fn default() -> Self {
        Self {
            g0: None,
            band_half_width: None,
            filter: BandFilter::Rect,
            s_imp: 0.0,
            s_imp_unit: ImpUnit::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    #[serde(default = "default_omega_max_factor")]
    pub omega_max_factor: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub thermal: ThermalModel,
}

fn default_omega_max_factor() -> f64 {
    20.0
}

fn default_rel_tol() -> f64 {
    1e-6
}

impl Default for IntegrationSection {
    fn default() -> Self {
        Self {
            omega_max_factor: default_omega_max_factor(),
            rel_tol: default_rel_tol(),
            thermal: ThermalModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub axes: Vec<AxisSpec>,
    /// Optimize g0 at every grid point of a 2-D sweep.
    #[serde(default)]
    pub optimize_gain: bool,
    /// g0 search range used when optimizing.
    #[serde(default = "default_gain_range")]
    pub gain_range: [f64; 2],
}

fn default_gain_range() -> [f64; 2] {
    [1.0, 1e5]
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axes: Vec::new(),
            optimize_gain: false,
            gain_range: default_gain_range(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_precision() -> usize {
    9
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            format: Format::Csv,
            precision: default_precision(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub feedback: FeedbackSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Parameter names that sweep axes may refer to. Frequencies are in Hz.
pub const AXIS_FIELDS: &[&str] = &[
    "omega_a",
    "omega_m",
    "omega_b",
    "gamma_b",
    "kappa_a",
    "kappa_m",
    "g_a",
    "G_m",
    "g_m",
    "rabi",
    "T",
    "eta",
    "g0",
    "band_half_width",
    "s_imp",
];

fn check(field: &str, ok: bool, reason: &str, value: f64) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config {
            field: field.to_string(),
            reason: format!("{reason}, got {value}"),
        })
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    check(field, v.is_finite() && v > 0.0, "must be > 0", v)
}

fn non_negative(field: &str, v: f64) -> Result<(), CliError> {
    check(field, v.is_finite() && v >= 0.0, "must be >= 0", v)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            field: "<file>".into(),
            reason: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_toml(&text)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.system;
        positive("system.omega_a", s.omega_a)?;
        positive("system.omega_m", s.omega_m)?;
        positive("system.omega_b", s.omega_b)?;
        positive("system.gamma_b", s.gamma_b)?;
        positive("system.kappa_a", s.kappa_a)?;
        positive("system.kappa_m", s.kappa_m)?;
        positive("system.g_a", s.g_a)?;
        if let Some(v) = s.big_g_m {
            non_negative("system.G_m", v)?;
        }
        if let Some(v) = s.g_m {
            positive("system.g_m", v)?;
        }
        if let Some(v) = s.rabi {
            non_negative("system.rabi", v)?;
        }
        if let Some(v) = s.omega_drive {
            positive("system.omega_drive", v)?;
        }
        if s.big_g_m.is_none() && (s.g_m.is_none() || s.rabi.is_none()) {
            return Err(CliError::Config {
                field: "system.G_m".into(),
                reason: "give either G_m, or both g_m and rabi".into(),
            });
        }
        non_negative("system.T", s.temperature)?;
        check("system.eta", s.eta > 0.0 && s.eta <= 1.0, "must lie in (0, 1]", s.eta)?;

        let f = &self.feedback;
        if let Some(g0) = f.g0 {
            non_negative("feedback.g0", g0)?;
        }
        if let Some(b) = f.band_half_width {
            positive("feedback.band_half_width", b)?;
        }
        non_negative("feedback.s_imp", f.s_imp)?;

        positive("integration.omega_max_factor", self.integration.omega_max_factor)?;
        positive("integration.rel_tol", self.integration.rel_tol)?;

        if self.sweep.axes.len() > 2 {
            return Err(CliError::Config {
                field: "sweep.axes".into(),
                reason: format!("at most 2 axes per run, got {}", self.sweep.axes.len()),
            });
        }
        for axis in &self.sweep.axes {
            axis.validate()?;
        }
        let [lo, hi] = self.sweep.gain_range;
        check("sweep.gain_range", lo > 0.0 && hi > lo, "need 0 < lo < hi", lo)?;
        check(
            "output.precision",
            (1..=17).contains(&self.output.precision),
            "must be between 1 and 17",
            self.output.precision as f64,
        )?;
        Ok(())
    }

    /// Return a copy with one named parameter replaced (frequencies in Hz).
    pub fn with_value(&self, name: &str, value: f64) -> Result<Self, CliError> {
        let mut c = self.clone();
        let s = &mut c.system;
        match name {
            "omega_a" => s.omega_a = value,
            "omega_m" => s.omega_m = value,
            "omega_b" => s.omega_b = value,
            "gamma_b" => s.gamma_b = value,
            "kappa_a" => s.kappa_a = value,
            "kappa_m" => s.kappa_m = value,
            "g_a" => s.g_a = value,
            "G_m" => s.big_g_m = Some(value),
            "g_m" => s.g_m = Some(value),
            "rabi" => {
                s.rabi = Some(value);
                s.big_g_m = None;
            }
            "T" => s.temperature = value,
            "eta" => s.eta = value,
            "g0" => c.feedback.g0 = Some(value),
            "band_half_width" => c.feedback.band_half_width = Some(value),
            "s_imp" => c.feedback.s_imp = value,
            other => {
                return Err(CliError::Config {
                    field: "sweep.axes".into(),
                    reason: format!("unknown parameter `{other}`"),
                })
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Physical parameters in rad/s. When only G_m is given, the bare
    /// coupling defaults to a nominal value and Ω is derived from G_m.
    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        let s = &self.system;
        let mut p = SystemParams {
            omega_a: hz_to_angular(s.omega_a),
            omega_m: hz_to_angular(s.omega_m),
            omega_b: hz_to_angular(s.omega_b),
            gamma_b: hz_to_angular(s.gamma_b),
            kappa_a: hz_to_angular(s.kappa_a),
            kappa_m: hz_to_angular(s.kappa_m),
            g_a: hz_to_angular(s.g_a),
            g_m: hz_to_angular(s.g_m.unwrap_or(NOMINAL_G_M_HZ)),
            rabi: s.rabi.map(hz_to_angular).unwrap_or(0.0),
            omega_drive: hz_to_angular(s.omega_drive.unwrap_or(s.omega_a)),
            temperature: s.temperature,
            eta: s.eta,
        };
        if let Some(big) = s.big_g_m {
            p.rabi = rabi_for_target_coupling(&p, hz_to_angular(big))?;
        }
        p.validate()?;
        Ok(p)
    }

    /// Steady state: resonant unless a drive frequency is configured.
    pub fn steady_state(&self) -> Result<SteadyState, CliError> {
        let p = self.system_params()?;
        Ok(match self.system.omega_drive {
            None => steady_state_resonant(&p)?,
            Some(_) => steady_state(&p, p.detunings())?,
        })
    }

    pub fn operating_point(&self) -> Result<OperatingPoint, CliError> {
        let p = self.system_params()?;
        match (self.system.big_g_m, self.system.omega_drive) {
            (Some(big), None) => Ok(OperatingPoint::with_coupling(p, hz_to_angular(big))?),
            _ => {
                let ss = self.steady_state()?;
                Ok(OperatingPoint::from_steady_state(p, &ss)?)
            }
        }
    }

    pub fn feedback(&self, params: &SystemParams) -> FeedbackConfig {
        let f = &self.feedback;
        FeedbackConfig {
            g0: f.g0.unwrap_or(DEFAULT_G0),
            band_half_width: f
                .band_half_width
                .map(hz_to_angular)
                .unwrap_or(2.0 * params.omega_b),
            filter: f.filter,
            s_imp: f.s_imp,
            s_imp_unit: f.s_imp_unit,
        }
    }

    pub fn grid_policy(&self) -> GridPolicy {
        GridPolicy {
            omega_max_factor: self.integration.omega_max_factor,
            rel_tol: self.integration.rel_tol,
            thermal: self.integration.thermal,
            ..GridPolicy::default()
        }
    }
}

/// Effective coupling in Hz for reporting.
pub fn coupling_hz(op: &OperatingPoint) -> f64 {
    angular_to_hz(op.coupling)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const BASE: &str = r#"
[system]
omega_a = 10e9
omega_m = 10e9
omega_b = 10e6
gamma_b = 100
kappa_a = 5e6
kappa_m = 10e6
g_a = 18e6
G_m = 2e6
T = 0.01
eta = 0.9

[feedback]
g0 = 1000
s_imp = 4.04e-9
"#;

    #[test]
    fn parses_and_converts_to_angular_units() {
        let cfg = RunConfig::from_toml(BASE).unwrap();
        let op = cfg.operating_point().unwrap();
        assert_eq!(op.params.kappa_a, hz_to_angular(5e6));
        assert!((coupling_hz(&op) - 2e6).abs() < 1e-6);
        let fb = cfg.feedback(&op.params);
        assert_eq!(fb.band_half_width, 2.0 * op.params.omega_b);
        assert_eq!(fb.s_imp_unit, ImpUnit::PerRadPerSec);
    }

    #[test]
    fn serialize_parse_is_idempotent() {
        let mut cfg = RunConfig::from_toml(BASE).unwrap();
        cfg.sweep.axes.push("kappa_m:log:1e6:1e8:5".parse().unwrap());
        let once = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(once, cfg);
        assert_eq!(once.to_toml(), cfg.to_toml());
    }

    #[test]
    fn negative_rate_names_the_field() {
        let text = BASE.replace("kappa_a = 5e6", "kappa_a = -5e6");
        match RunConfig::from_toml(&text) {
            Err(CliError::Config { field, .. }) => assert_eq!(field, "system.kappa_a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml(&format!("{BASE}\nkapa_m = 3\n")).is_err());
    }

    #[test]
    fn bare_coupling_entry_path() {
        let text = BASE.replace("G_m = 2e6", "g_m = 0.5\nrabi = 1e12");
        let cfg = RunConfig::from_toml(&text).unwrap();
        let op = cfg.operating_point().unwrap();
        let p = op.params;
        let m = p.rabi * p.kappa_a / (p.g_a * p.g_a + p.kappa_a * p.kappa_m);
        assert!((op.coupling - std::f64::consts::SQRT_2 * p.g_m * m).abs() < 1e-9 * op.coupling);
    }

    #[test]
    fn missing_coupling_is_reported() {
        let text = BASE.replace("G_m = 2e6", "");
        assert!(matches!(
            RunConfig::from_toml(&text),
            Err(CliError::Config { field, .. }) if field == "system.G_m"
        ));
    }

    #[test]
    fn overrides_are_validated() {
        let cfg = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.with_value("kappa_m", 2e6).unwrap().system.kappa_m, 2e6);
        assert!(cfg.with_value("eta", 1.5).is_err());
        assert!(cfg.with_value("nonsense", 1.0).is_err());
        // Overriding Ω drops G_m, so the bare coupling must be present.
        assert!(cfg.with_value("rabi", 1e12).is_err());
        let cfg = cfg.with_value("g_m", 1.0).unwrap();
        for name in AXIS_FIELDS {
            cfg.with_value(name, 0.5).unwrap();
        }
    }
}
