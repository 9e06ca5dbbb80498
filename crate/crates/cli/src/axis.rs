//! Sweep axes: `name:linear|log:min:max:count`.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::config::AXIS_FIELDS;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

fn axis_error(reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: "sweep.axes".into(),
        reason: reason.into(),
    }
}

impl AxisSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        self.validate_with(AXIS_FIELDS)
    }

    /// Validate against an explicit set of allowed names.
    pub fn validate_with(&self, allowed: &[&str]) -> Result<(), CliError> {
        if !allowed.contains(&self.name.as_str()) {
            return Err(axis_error(format!(
                "unknown axis `{}` (expected one of: {})",
                self.name,
                allowed.join(", ")
            )));
        }
        if self.count < 2 {
            return Err(axis_error(format!("axis `{}` needs count >= 2, got {}", self.name, self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(axis_error(format!(
                "axis `{}` needs finite min < max, got {}..{}",
                self.name, self.min, self.max
            )));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(axis_error(format!("log axis `{}` needs min > 0, got {}", self.name, self.min)));
        }
        Ok(())
    }

    /// Grid values, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.min + t * (self.max - self.min),
                    Scale::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

impl FromStr for AxisSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, scale, min, max, count] = parts[..] else {
            return Err(axis_error(format!("axis `{s}` must look like name:linear|log:min:max:count")));
        };
        let scale = match scale {
            "lin" | "linear" => Scale::Linear,
            "log" => Scale::Log,
            other => return Err(axis_error(format!("unknown axis scale `{other}`"))),
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| axis_error(format!("bad number `{v}` in axis `{s}`")));
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| axis_error(format!("bad count `{count}` in axis `{s}`")))?;
        Ok(Self {
            name: name.trim().to_string(),
            scale,
            min: num(min)?,
            max: num(max)?,
            count,
        })
    }
}
