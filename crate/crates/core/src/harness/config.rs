//! Campaign configuration, read from JSON.
//!
//! ```json
//! {
//!   "campaign": "salem-bounds",
//!   "q_list": [7, 11, 13],
//!   "d_list": [2],
//!   "k_list": [],
//!   "size_policy": { "kind": "q_multiples", "values": [0.5, 1, 2] },
//!   "trials": 200,
//!   "seed": 1,
//!   "generator": "random",
//!   "salem_threshold": 2.0,
//!   "ratio_floor": 0.25,
//!   "exhaustive": "never",
//!   "incidence_method": "spectral",
//!   "output": "report.csv",
//!   "format": "csv"
//! }
//! ```
//!
//! Only `campaign`, `q_list` and `d_list` are required.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::incidence::incidence_methods;
use crate::salem::{default_generators, GeneratorSpec, DEFAULT_SALEM_THRESHOLD};
use crate::space::Space;

/// Largest subset count enumerated by [`ExhaustiveMode::Auto`].
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

pub const DEFAULT_RATIO_FLOOR: f64 = 0.25;

/// Target set sizes for each cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum SizePolicy {
    /// Literal sizes.
    Absolute(Vec<usize>),
    /// `q^k + offset`.
    AboveQk(Vec<usize>),
    /// `⌈q^α⌉`.
    Powers(Vec<f64>),
    /// `⌈q^(k+α)⌉`.
    KPowers(Vec<f64>),
    /// `f·q` rounded half away from zero.
    QMultiples(Vec<f64>),
}

impl SizePolicy {
    pub fn uses_k(&self) -> bool {
        matches!(self, SizePolicy::AboveQk(_) | SizePolicy::KPowers(_))
    }

    pub fn len(&self) -> usize {
        match self {
            SizePolicy::Absolute(v) | SizePolicy::AboveQk(v) => v.len(),
            SizePolicy::Powers(v) | SizePolicy::KPowers(v) | SizePolicy::QMultiples(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sizes for one `(q, k)`, in policy order.
    pub fn sizes(&self, q: u32, k: Option<usize>) -> Result<Vec<usize>> {
        let need_k = || {
            k.ok_or_else(|| Error::Config("size policy needs k but the cell has none".into()))
        };
        let qf = q as f64;
        Ok(match self {
            SizePolicy::Absolute(v) => v.clone(),
            SizePolicy::AboveQk(v) => {
                let qk = (q as usize).pow(need_k()? as u32);
                v.iter().map(|off| qk + off).collect()
            }
            SizePolicy::Powers(v) => v.iter().map(|&a| ceil_size(qf.powf(a))).collect(),
            SizePolicy::KPowers(v) => {
                let k = need_k()? as f64;
                v.iter().map(|&a| ceil_size(qf.powf(k + a))).collect()
            }
            SizePolicy::QMultiples(v) => v.iter().map(|&f| (f * qf).round() as usize).collect(),
        })
    }

    fn check(&self) -> Result<()> {
        let bad = match self {
            SizePolicy::Powers(v) | SizePolicy::KPowers(v) | SizePolicy::QMultiples(v) => {
                v.iter().any(|x| !x.is_finite() || *x < 0.0)
            }
            _ => false,
        };
        if bad {
            return Err(Error::Config("size policy values must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

// exact powers such as 5^2.0 must not round up past the integer
fn ceil_size(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExhaustiveMode {
    /// Enumerate every subset when there are at most [`EXHAUSTIVE_LIMIT`].
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Config(format!("unknown report format `{s}` (known: csv, json)"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

fn default_trials() -> usize {
    1
}

fn default_generator() -> String {
    "random".into()
}

fn default_threshold() -> f64 {
    DEFAULT_SALEM_THRESHOLD
}

fn default_ratio_floor() -> f64 {
    DEFAULT_RATIO_FLOOR
}

fn default_method() -> String {
    "spectral".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub campaign: String,
    pub q_list: Vec<u32>,
    pub d_list: Vec<usize>,
    /// Empty means every `k` the campaign supports; values with `k ≥ d`
    /// are skipped for that `d`.
    #[serde(default)]
    pub k_list: Vec<usize>,
    /// `None` selects the campaign's own sizes.
    #[serde(default)]
    pub size_policy: Option<SizePolicy>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_generator")]
    pub generator: String,
    #[serde(default = "default_threshold")]
    pub salem_threshold: f64,
    /// Ratios below this are flagged as observations.
    #[serde(default = "default_ratio_floor")]
    pub ratio_floor: f64,
    #[serde(default)]
    pub exhaustive: ExhaustiveMode,
    #[serde(default = "default_method")]
    pub incidence_method: String,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl CampaignConfig {
    pub fn new(campaign: &str, q_list: Vec<u32>, d_list: Vec<usize>) -> Self {
        CampaignConfig {
            campaign: campaign.into(),
            q_list,
            d_list,
            k_list: Vec::new(),
            size_policy: None,
            trials: default_trials(),
            seed: 0,
            generator: default_generator(),
            salem_threshold: default_threshold(),
            ratio_floor: default_ratio_floor(),
            exhaustive: ExhaustiveMode::Auto,
            incidence_method: default_method(),
            output: None,
            format: ReportFormat::Csv,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: CampaignConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn generator_spec(&self) -> Result<GeneratorSpec> {
        self.generator.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_list.is_empty() || self.d_list.is_empty() {
            return Err(Error::Config("q_list and d_list must be nonempty".into()));
        }
        for &q in &self.q_list {
            let modulus = FieldModulus::new(q).map_err(|e| Error::Config(e.to_string()))?;
            for &d in &self.d_list {
                Space::new(modulus, d)?;
            }
        }
        if self.k_list.contains(&0) {
            return Err(Error::Config("k_list entries must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.salem_threshold.is_finite() && self.salem_threshold > 0.0) {
            return Err(Error::Config("salem_threshold must be positive".into()));
        }
        if !(self.ratio_floor.is_finite() && self.ratio_floor >= 0.0) {
            return Err(Error::Config("ratio_floor must be nonnegative".into()));
        }
        if let Some(policy) = &self.size_policy {
            policy.check()?;
        }
        default_generators().get(&self.generator_spec()?.family)?;
        incidence_methods().get(&self.incidence_method)?;
        Ok(())
    }
}
