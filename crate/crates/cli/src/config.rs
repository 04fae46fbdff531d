use std::fmt;
use std::path::Path;
use std::str::FromStr;

use quench_core::{EvolutionSetup, TrigPolynomial};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Dense-matrix columns are skipped above this chain length.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Exact,
    Purity,
    Detbound,
    Szego,
    Bkbound,
}

impl Output {
    pub const ALL: [Output; 5] = [Output::Exact, Output::Purity, Output::Detbound, Output::Szego, Output::Bkbound];

    pub fn is_dense(self) -> bool {
        matches!(self, Output::Exact | Output::Purity | Output::Detbound)
    }
}

impl FromStr for Output {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Output::Exact),
            "purity" => Ok(Output::Purity),
            "detbound" => Ok(Output::Detbound),
            "szego" => Ok(Output::Szego),
            "bkbound" => Ok(Output::Bkbound),
            other => Err(CliError::Usage(format!("unknown output `{other}`"))),
        }
    }
}

/// `"auto"` or a fixed truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KMax {
    #[default]
    Auto,
    Fixed(usize),
}

impl KMax {
    pub fn fixed(self) -> Option<usize> {
        match self {
            KMax::Auto => None,
            KMax::Fixed(k) => Some(k),
        }
    }
}

impl FromStr for KMax {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(KMax::Auto),
            k => k
                .parse()
                .map(KMax::Fixed)
                .map_err(|_| CliError::Usage(format!("kmax must be `auto` or an integer, got `{k}`"))),
        }
    }
}

impl fmt::Display for KMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KMax::Auto => write!(f, "auto"),
            KMax::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for KMax {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KMax::Auto => s.serialize_str("auto"),
            KMax::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for KMax {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(KMax::Fixed(k)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One evolution scenario. Serialized form is the `--config` JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub lambda: String,
    pub beta: String,
    #[serde(rename = "N")]
    pub size: usize,
    pub n: usize,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    #[serde(default)]
    pub kmax: KMax,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<Output>,
}

fn all_outputs() -> Vec<Output> {
    Output::ALL.to_vec()
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            lambda: "gap:c=1.5".into(),
            beta: "poly:1".into(),
            size: 64,
            n: 32,
            t0: 0.0,
            t1: 10.0,
            steps: 101,
            kmax: KMax::Auto,
            outputs: all_outputs(),
        }
    }
}

/// Values given on the command line; each `Some` overrides the file/default.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub lambda: Option<String>,
    pub beta: Option<String>,
    pub size: Option<usize>,
    pub n: Option<usize>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub steps: Option<usize>,
    pub kmax: Option<KMax>,
    pub outputs: Option<Vec<Output>>,
}

impl ScenarioConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Loads `--config` if given, then applies flag overrides. When N is
    /// overridden without n, the cut defaults to N/2.
    pub fn resolve(file: Option<&Path>, o: Overrides) -> Result<Self> {
        let mut cfg = match file {
            Some(p) => Self::from_json_file(p)?,
            None => Self::default(),
        };
        if let Some(v) = o.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = o.beta {
            cfg.beta = v;
        }
        if let Some(v) = o.size {
            cfg.size = v;
            if o.n.is_none() {
                cfg.n = v / 2;
            }
        }
        if let Some(v) = o.n {
            cfg.n = v;
        }
        if let Some(v) = o.t0 {
            cfg.t0 = v;
        }
        if let Some(v) = o.t1 {
            cfg.t1 = v;
        }
        if let Some(v) = o.steps {
            cfg.steps = v;
        }
        if let Some(v) = o.kmax {
            cfg.kmax = v;
        }
        if let Some(v) = o.outputs {
            cfg.outputs = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n >= self.size {
            return Err(CliError::Usage(format!("need 0 < n < N, got n = {}, N = {}", self.n, self.size)));
        }
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return Err(CliError::Usage(format!("need t0 < t1, got [{}, {}]", self.t0, self.t1)));
        }
        if self.steps < 2 {
            return Err(CliError::Usage(format!("need steps >= 2, got {}", self.steps)));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Usage("no outputs requested".into()));
        }
        self.setup().map(|_| ())
    }

    pub fn lambda_poly(&self) -> Result<TrigPolynomial> {
        parse_symbol(&self.lambda)
    }

    pub fn beta_poly(&self) -> Result<TrigPolynomial> {
        parse_symbol(&self.beta)
    }

    pub fn setup(&self) -> Result<EvolutionSetup> {
        EvolutionSetup::new(self.lambda_poly()?, self.beta_poly()?, self.size)
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Inclusive uniform grid of `steps` points.
    pub fn times(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.t1
                } else {
                    self.t0 + (self.t1 - self.t0) * i as f64 / last
                }
            })
            .collect()
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// Dense outputs are dropped when N exceeds [`DENSE_LIMIT`].
    pub fn dense_enabled(&self) -> bool {
        self.size <= DENSE_LIMIT && self.outputs.iter().any(|o| o.is_dense())
    }
}

pub fn parse_symbol(s: &str) -> Result<TrigPolynomial> {
    s.parse().map_err(|e: quench_core::Error| CliError::Usage(e.to_string()))
}

pub fn parse_outputs(s: &str) -> Result<Vec<Output>> {
    s.split(',').map(str::parse).collect()
}
