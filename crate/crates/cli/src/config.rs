//! Experiment configuration: suite selection, trial counts, seeds, spaces,
//! tolerance overrides and output location.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use covent::SpaceSpec;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    RepChecks,
    LoccSim,
    Monotonicity,
    FiniteSet,
    #[serde(rename = "counterexample-L")]
    CounterexampleL,
    PinchRules,
    Abelian,
    Conservation,
    All,
}

impl Suite {
    /// The concrete suites, in the order `all` runs them.
    pub const CONCRETE: [Suite; 8] = [
        Suite::RepChecks,
        Suite::LoccSim,
        Suite::FiniteSet,
        Suite::Monotonicity,
        Suite::Conservation,
        Suite::CounterexampleL,
        Suite::PinchRules,
        Suite::Abelian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::RepChecks => "rep-checks",
            Suite::LoccSim => "locc-sim",
            Suite::Monotonicity => "monotonicity",
            Suite::FiniteSet => "finite-set",
            Suite::CounterexampleL => "counterexample-L",
            Suite::PinchRules => "pinch-rules",
            Suite::Abelian => "abelian",
            Suite::Conservation => "conservation",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::CONCRETE.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Self::CONCRETE
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

/// Named tolerances; every value must be positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Tolerances {
    /// Isometry, unitarity and CG identities.
    pub construction: f64,
    /// End-to-end channel identities and invariance decisions.
    pub channel: f64,
    /// Allowed growth of a monotone.
    pub monotonicity: f64,
    /// Allowed drift of a conserved quantity.
    pub conservation: f64,
    /// Smallest residual a corrupted channel must show.
    pub negative_control: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            construction: 1e-12,
            channel: 1e-10,
            monotonicity: 1e-9,
            conservation: 1e-10,
            negative_control: 1e-3,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 5] = ["construction", "channel", "monotonicity", "conservation", "negative-control"];

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), HarnessError> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(HarnessError::Config(format!("tolerance `{name}` must be positive, got {value}")));
        }
        let slot = match name {
            "construction" => &mut self.construction,
            "channel" => &mut self.channel,
            "monotonicity" => &mut self.monotonicity,
            "conservation" => &mut self.conservation,
            "negative-control" => &mut self.negative_control,
            _ => {
                return Err(HarnessError::Config(format!(
                    "unknown tolerance `{name}` (known: {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let mut copy = self.clone();
        for (name, v) in [
            ("construction", self.construction),
            ("channel", self.channel),
            ("monotonicity", self.monotonicity),
            ("conservation", self.conservation),
            ("negative-control", self.negative_control),
        ] {
            copy.set(name, v)?;
        }
        Ok(())
    }
}

/// Parses `name=value`.
pub fn parse_tolerance(arg: &str) -> Result<(String, f64), HarnessError> {
    let (name, value) = arg
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("tolerance override `{arg}` is not name=value")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("tolerance `{name}` has non-numeric value `{value}`")))?;
    Ok((name.trim().to_string(), value))
}

/// A fully resolved experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Overrides every suite's default trial count.
    pub trials: Option<usize>,
    /// Overrides the default space pools of the randomized suites.
    pub spaces: Option<Vec<SpaceSpec>>,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub single_thread: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: 0,
            trials: None,
            spaces: None,
            tolerances: Tolerances::default(),
            out: PathBuf::from("reports"),
            single_thread: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.tolerances.validate()?;
        if self.trials == Some(0) {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if let Some(spaces) = &self.spaces {
            if spaces.is_empty() {
                return Err(HarnessError::Config("spaces, when given, must be non-empty".into()));
            }
        }
        Ok(())
    }

    /// The trial count for a check whose default is `default`.
    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// User-provided spaces of the requested group, or the defaults.
    pub fn space_pool(&self, group: covent::GroupKind, defaults: &[SpaceSpec]) -> Vec<SpaceSpec> {
        match &self.spaces {
            Some(spaces) => {
                let chosen: Vec<SpaceSpec> = spaces.iter().filter(|s| s.group() == group).cloned().collect();
                if chosen.is_empty() {
                    defaults.to_vec()
                } else {
                    chosen
                }
            }
            None => defaults.to_vec(),
        }
    }
}

/// Command-line overrides layered on a base config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub suite: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub single_thread: bool,
    pub tolerances: Vec<String>,
}

impl Overrides {
    pub fn apply(self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, HarnessError> {
        if let Some(s) = self.suite {
            cfg.suite = s.parse()?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.trials.is_some() {
            cfg.trials = self.trials;
        }
        if let Some(out) = self.out {
            cfg.out = out;
        }
        cfg.single_thread |= self.single_thread;
        for t in &self.tolerances {
            let (name, value) = parse_tolerance(t)?;
            cfg.tolerances.set(&name, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
