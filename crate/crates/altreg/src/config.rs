//! Experiment configuration.
//!
//! A config is one JSON object; unknown keys are rejected. Example:
//!
//! ```json
//! {
//!   "learner": {"kind": "hedge", "eta": "paper"},
//!   "environment": {"kind": "hedge-cycle"},
//!   "horizons": [300],
//!   "seed": 7
//! }
//! ```
//!
//! `environments` (a list) replaces `environment` when the measured value
//! should be the worst case over several sequences. Two-player runs use
//! `game` plus `learner` (x-player) and optionally `learner_y`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// A fixed learning rate or the theory-driven default for the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum Eta {
    Fixed(f64),
    #[default]
    #[serde(with = "paper_tag")]
    Paper,
}

mod paper_tag {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("paper")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "paper" {
            Ok(())
        } else {
            Err(de::Error::custom(format!("expected a number or \"paper\", got {s:?}")))
        }
    }
}

impl std::str::FromStr for Eta {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "paper" {
            return Ok(Eta::Paper);
        }
        s.parse::<f64>()
            .map(Eta::Fixed)
            .map_err(|_| format!("expected a number or \"paper\", got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularizerSpec {
    Ball,
    Simplex,
}

/// Loss constants used by the FTRL learning-rate rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub lipschitz: f64,
    #[serde(default)]
    pub smoothness: f64,
    #[serde(default)]
    pub self_concordance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Point(Vec<f64>),
    #[serde(with = "best_fixed_tag")]
    BestFixed,
}

mod best_fixed_tag {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("best-fixed")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "best-fixed" {
            Ok(())
        } else {
            Err(de::Error::custom(format!("expected a point or \"best-fixed\", got {s:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LearnerSpec {
    Hedge {
        #[serde(default)]
        eta: Eta,
    },
    Ftrl {
        #[serde(default = "default_regularizer")]
        regularizer: RegularizerSpec,
        #[serde(default)]
        eta: Eta,
        /// Overrides the constants certified from the loss sequence.
        #[serde(default)]
        constants: Option<ConstantsSpec>,
    },
    ContinuousHedge {
        #[serde(default)]
        eta: Eta,
        #[serde(default)]
        max_level: Option<u32>,
    },
    Oogd {
        #[serde(default)]
        eta: Eta,
    },
    PrmPlus {},
    Constant {
        point: PointSpec,
    },
}

fn default_regularizer() -> RegularizerSpec {
    RegularizerSpec::Ball
}

impl LearnerSpec {
    pub const NAMES: [&'static str; 6] = ["hedge", "ftrl", "continuous-hedge", "oogd", "prm-plus", "constant"];

    /// Default spec for a learner name given on the command line.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "hedge" => LearnerSpec::Hedge { eta: Eta::Paper },
            "ftrl" => LearnerSpec::Ftrl {
                regularizer: RegularizerSpec::Ball,
                eta: Eta::Paper,
                constants: None,
            },
            "continuous-hedge" => LearnerSpec::ContinuousHedge {
                eta: Eta::Paper,
                max_level: None,
            },
            "oogd" => LearnerSpec::Oogd { eta: Eta::Paper },
            "prm-plus" => LearnerSpec::PrmPlus {},
            "constant" => LearnerSpec::Constant {
                point: PointSpec::BestFixed,
            },
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Hedge { .. } => "hedge",
            LearnerSpec::Ftrl { .. } => "ftrl",
            LearnerSpec::ContinuousHedge { .. } => "continuous-hedge",
            LearnerSpec::Oogd { .. } => "oogd",
            LearnerSpec::PrmPlus {} => "prm-plus",
            LearnerSpec::Constant { .. } => "constant",
        }
    }

    pub fn set_eta(&mut self, value: Eta) -> bool {
        match self {
            LearnerSpec::Hedge { eta }
            | LearnerSpec::Ftrl { eta, .. }
            | LearnerSpec::ContinuousHedge { eta, .. }
            | LearnerSpec::Oogd { eta } => {
                *eta = value;
                true
            }
            LearnerSpec::PrmPlus {} | LearnerSpec::Constant { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    HedgeCycle {},
    HedgeConstant {},
    PmAlternating {},
    RandomBounded {
        dim: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        lo: f64,
        #[serde(default = "one")]
        hi: f64,
    },
    ConstantLinear {
        ell: Vec<f64>,
    },
    CycleLinear {
        period: Vec<Vec<f64>>,
    },
    RandomQuadratic {
        #[serde(default)]
        seed: Option<u64>,
        curvature: f64,
        center: Vec<f64>,
        spread: f64,
    },
    /// A loss-sequence JSON file; its length caps the horizon.
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

impl EnvSpec {
    pub const NAMES: [&'static str; 3] = ["hedge-cycle", "hedge-constant", "pm-alternating"];

    /// Parameterless environments selectable by name.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "hedge-cycle" => EnvSpec::HedgeCycle {},
            "hedge-constant" => EnvSpec::HedgeConstant {},
            "pm-alternating" => EnvSpec::PmAlternating {},
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Simplex { dim: usize },
    Ball {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Interval { lo: f64, hi: f64 },
    Box { dim: usize, lo: f64, hi: f64 },
}

impl DomainSpec {
    pub fn build(&self) -> altreg_core::Result<altreg_core::geometry::Domain> {
        use altreg_core::geometry::Domain;
        match self {
            DomainSpec::Simplex { dim } => Domain::simplex(*dim),
            DomainSpec::Ball { dim, radius } => Domain::ball(*dim, *radius),
            DomainSpec::Interval { lo, hi } => Domain::interval(*lo, *hi),
            DomainSpec::Box { dim, lo, hi } => Domain::cube(*dim, *lo, *hi),
        }
    }
}

/// `zᵀ Q z + bᵀ z + c` over `z = (x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointQuadraticSpec {
    pub q: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GameSpec {
    /// Zero-sum: the x-player pays `xᵀ A y`.
    Matrix { a: Vec<Vec<f64>> },
    Bimatrix { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
    Quadratic {
        u1: JointQuadraticSpec,
        u2: JointQuadraticSpec,
        x_domain: DomainSpec,
        y_domain: DomainSpec,
    },
    /// Entries uniform in `[-1, 1]`.
    RandomMatrix {
        rows: usize,
        cols: usize,
        #[serde(default = "yes")]
        zero_sum: bool,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// A JSON file holding one of the other game kinds.
    File { path: PathBuf },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Alternating regret against the best fixed decision.
    #[default]
    RegAlt,
    /// NE gap of the average strategies (zero-sum games).
    NeGap,
    /// CCE gap of the alternating play distribution.
    CceGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub learner: LearnerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner_y: Option<LearnerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub environments: Vec<EnvSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    pub horizons: Vec<usize>,
    /// Comparator for the trace columns; the best fixed decision by default.
    #[serde(default = "best_fixed")]
    pub comparator: PointSpec,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn best_fixed() -> PointSpec {
    PointSpec::BestFixed
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| HarnessError::validation(e.path().to_string(), e.inner().to_string()))?;
        // relative file references are resolved against the config's directory
        if let Some(dir) = Path::new(origin).parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        ExperimentConfig::parse(&text, &path.display().to_string())
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !dir.as_os_str().is_empty() {
                *p = dir.join(&*p);
            }
        };
        for env in self.environment.iter_mut().chain(self.environments.iter_mut()) {
            if let EnvSpec::File { path } = env {
                fix(path);
            }
        }
        if let Some(GameSpec::File { path }) = &mut self.game {
            fix(path);
        }
    }

    /// The environments to play, as `(field path, spec)` pairs.
    pub fn environment_list(&self) -> Vec<(String, &EnvSpec)> {
        match &self.environment {
            Some(e) => vec![("environment".to_string(), e)],
            None => self
                .environments
                .iter()
                .enumerate()
                .map(|(i, e)| (format!("environments[{i}]"), e))
                .collect(),
        }
    }

    /// Checks that do not depend on running anything.
    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(HarnessError::validation("horizons", "at least one horizon is required"));
        }
        for (i, w) in self.horizons.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(HarnessError::validation(
                    format!("horizons[{}]", i + 1),
                    "horizons must be strictly increasing",
                ));
            }
        }
        if self.horizons[0] == 0 {
            return Err(HarnessError::validation("horizons[0]", "horizons must be positive"));
        }
        if self.environment.is_some() && !self.environments.is_empty() {
            return Err(HarnessError::validation(
                "environments",
                "give either `environment` or `environments`, not both",
            ));
        }
        match &self.game {
            Some(game) => {
                if self.environment.is_some() || !self.environments.is_empty() {
                    return Err(HarnessError::validation("game", "a game run takes no environment"));
                }
                if let GameSpec::File { path } = game {
                    check_exists("game.path", path)?;
                }
            }
            None => {
                if self.environment_list().is_empty() {
                    return Err(HarnessError::validation("environment", "an environment is required"));
                }
                if self.learner_y.is_some() {
                    return Err(HarnessError::validation("learner_y", "only meaningful with a game"));
                }
                if self.metric != Metric::RegAlt {
                    return Err(HarnessError::validation("metric", "equilibrium gaps need a game"));
                }
            }
        }
        for (at, env) in self.environment_list() {
            if let EnvSpec::File { path } = env {
                check_exists(&format!("{at}.path"), path)?;
            }
        }
        if let Some(0) = self.jobs {
            return Err(HarnessError::validation("jobs", "must be at least 1"));
        }
        for (at, spec) in [("learner", Some(&self.learner)), ("learner_y", self.learner_y.as_ref())] {
            if let Some(LearnerSpec::Hedge { eta: Eta::Fixed(v) })
            | Some(LearnerSpec::Ftrl { eta: Eta::Fixed(v), .. })
            | Some(LearnerSpec::ContinuousHedge { eta: Eta::Fixed(v), .. })
            | Some(LearnerSpec::Oogd { eta: Eta::Fixed(v) }) = spec
            {
                if !(*v > 0.0 && v.is_finite()) {
                    return Err(HarnessError::validation(format!("{at}.eta"), "must be positive and finite"));
                }
            }
        }
        Ok(())
    }
}

fn check_exists(at: &str, path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(HarnessError::validation(at, format!("file {} does not exist", path.display())))
    }
}
