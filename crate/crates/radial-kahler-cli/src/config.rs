//! Analysis configuration: one JSON or TOML file describing the profile,
//! dimensions, windows, weights and tolerances.

use std::collections::BTreeMap;
use std::path::Path;

use radial_kahler::geometry::ModulusConvention;
use radial_kahler::integrability::WeightSpec;
use radial_kahler::profile::Profile;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Config {
    pub profile: ProfileConfig,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(default)]
    pub eps: f64,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default)]
    pub weights: Vec<WeightConfig>,
    #[serde(default = "default_c_list")]
    pub c_list: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub modulus_convention: ConventionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_n() -> u32 {
    2
}
fn default_window() -> [f64; 2] {
    [-1e8, -2.0]
}
fn default_c_list() -> Vec<f64> {
    vec![0.0, 1.0, 10.0, 100.0, 1000.0]
}
fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileConfig {
    /// One of `family1`..`family4`, with `alpha`; or absent for `expr`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Expression source for a custom profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Validity sup for custom profiles (t_max < 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConventionConfig {
    #[default]
    LogR,
    LogR2,
}

impl From<ConventionConfig> for ModulusConvention {
    fn from(c: ConventionConfig) -> Self {
        match c {
            ConventionConfig::LogR => ModulusConvention::LogR,
            ConventionConfig::LogR2 => ModulusConvention::LogR2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeightConfig {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    /// `alpha`, `eps` or `p`.
    pub param: String,
    /// `diameter`, `dini`, `condition_k`, `orlicz_p` or `mu_min`.
    pub quantity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let values = if let Some(v) = &self.values {
            v.clone()
        } else {
            match (self.start, self.stop, self.count) {
                (Some(a), Some(b), Some(c)) if c >= 2 && a < b => (0..c)
                    .map(|i| a + (b - a) * i as f64 / (c - 1) as f64)
                    .collect(),
                _ => {
                    return Err(CliError::config(
                        "sweep needs `values` or `start` < `stop` with `count` >= 2",
                    ))
                }
            }
        };
        if values.is_empty() {
            return Err(CliError::config("sweep grid is empty"));
        }
        if values.len() > 100_000 {
            return Err(CliError::config("sweep grid exceeds 1e5 points"));
        }
        Ok(values)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(&format!("cannot read {}: {e}", path.display())))?;
        let cfg: Config = if path.extension().and_then(|e| e.to_str()) == Some("toml") {
            toml::from_str(&text).map_err(|e| CliError::config(&format!("invalid TOML: {e}")))?
        } else {
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(&format!("invalid JSON: {e}")))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 1 {
            return Err(CliError::config("n must be >= 1"));
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(CliError::config("eps must be a finite non-negative real"));
        }
        if !(self.window[0] < self.window[1]) {
            return Err(CliError::config("window must satisfy t_lo < t_hi"));
        }
        if !(1e-12..=1e-2).contains(&self.tol) {
            return Err(CliError::config("tol must lie in [1e-12, 1e-2]"));
        }
        self.profile()?;
        for w in &self.weights {
            self.weight_spec(w)?;
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<Profile, CliError> {
        let p = &self.profile;
        match (&p.kind, &p.expr) {
            (Some(kind), None) => {
                let alpha = p
                    .alpha
                    .ok_or_else(|| CliError::config("family profiles need `alpha`"))?;
                match kind.as_str() {
                    "family1" => Profile::family1(alpha),
                    "family2" => Profile::family2(alpha),
                    "family3" => Profile::family3(alpha),
                    "family4" => Profile::family4(alpha),
                    other => {
                        return Err(CliError::config(&format!("unknown profile kind `{other}`")))
                    }
                }
                .map_err(CliError::module)
            }
            (None, Some(src)) => {
                let mut profile =
                    Profile::parse(src, p.params.clone()).map_err(CliError::module)?;
                if let Some(t_max) = p.t_max {
                    profile = profile.with_sup(t_max).map_err(CliError::module)?;
                }
                Ok(profile)
            }
            _ => Err(CliError::config(
                "profile needs exactly one of `kind` (+`alpha`) or `expr`",
            )),
        }
    }

    pub fn weight_spec(&self, w: &WeightConfig) -> Result<WeightSpec, CliError> {
        let n = self.n;
        match w.kind.as_str() {
            "power_eps" => Ok(WeightSpec::PowerEps {
                n,
                eps: w
                    .eps
                    .ok_or_else(|| CliError::config("power_eps weight needs `eps`"))?,
            }),
            "log_power" => Ok(WeightSpec::LogPower {
                n,
                eps: w
                    .eps
                    .ok_or_else(|| CliError::config("log_power weight needs `eps`"))?,
            }),
            "log_log_power" => Ok(WeightSpec::LogLogPower {
                n,
                eps: w
                    .eps
                    .ok_or_else(|| CliError::config("log_log_power weight needs `eps`"))?,
            }),
            "iterated_log" => Ok(WeightSpec::IteratedLog {
                n,
                p: w
                    .p
                    .ok_or_else(|| CliError::config("iterated_log weight needs `p`"))?,
            }),
            other => Err(CliError::config(&format!("unknown weight type `{other}`"))),
        }
    }

    /// Hash of the canonical JSON form: identical for semantically identical
    /// configs regardless of source formatting or key order.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
