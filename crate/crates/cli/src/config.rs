//! Scenario files: one `key = value` per line, dotted keys, `#` comments.
//!
//! ```text
//! kind = conservation
//! conservation.a = 0.6
//! conservation.b = 0.5
//! conservation.c = 0.5
//! ```

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use permanence::machines::CrossOutputs;
use permanence::MachineMode;
use thiserror::Error;

use crate::report::Format;

pub const TOLERANCE_ENV: &str = "PERMANENCE_TOLERANCE";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` is set twice (first on line {first})")]
    Duplicate {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: key `{key}` does not apply to kind `{kind}`")]
    WrongKind {
        line: usize,
        key: String,
        kind: Kind,
    },
    #[error("line {line}: key `{key}`: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key `kind`")]
    MissingKind,
    #[error("{0}")]
    Other(String),
}

impl ConfigError {
    fn value(line: usize, key: &str, message: impl Into<String>) -> Self {
        ConfigError::Value {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    NoSignal,
    Conservation,
    GramEquivalence,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::NoSignal => "nosignal",
            Kind::Conservation => "conservation",
            Kind::GramEquivalence => "gram-equivalence",
        })
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nosignal" => Ok(Kind::NoSignal),
            "conservation" => Ok(Kind::Conservation),
            "gram-equivalence" => Ok(Kind::GramEquivalence),
            other => Err(format!(
                "unknown kind `{other}` (expected nosignal, conservation or gram-equivalence)"
            )),
        }
    }
}

/// Bloch angles of a qubit basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_phase: f64,
    pub b_phase: f64,
    pub c_phase: f64,
    /// Weight of Alice's `|0⟩` branch.
    pub weight0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoSignalParams {
    pub psi1: Angles,
    pub alpha1: Angles,
    pub psi2: Angles,
    pub alpha2: Angles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineParams {
    pub mode: MachineMode,
    pub cross_outputs: CrossOutputs,
    pub ancilla_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramParams {
    pub dimension: usize,
    pub members: usize,
    pub seed: u64,
    pub mismatch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceParams {
    pub assertion: f64,
    pub residual: f64,
    pub reconstruction: f64,
}

impl Default for ToleranceParams {
    fn default() -> Self {
        Self {
            assertion: 1e-10,
            residual: 1e-12,
            reconstruction: 1e-8,
        }
    }
}

impl ToleranceParams {
    pub fn uniform(t: f64) -> Self {
        Self {
            assertion: t,
            residual: t,
            reconstruction: t,
        }
    }

    /// Defaults, replaced uniformly by `PERMANENCE_TOLERANCE` when it is set.
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(v) => {
                let t = parse_positive(&v).map_err(|m| {
                    ConfigError::Other(format!("environment variable {TOLERANCE_ENV}: {m}"))
                })?;
                Ok(Self::uniform(t))
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: Kind,
    pub conservation: ConservationParams,
    pub nosignal: NoSignalParams,
    pub machine: MachineParams,
    pub gram: GramParams,
    pub tolerance: ToleranceParams,
    pub format: Option<Format>,
}

const COMMON_KEYS: &[&str] = &[
    "kind",
    "tolerance.assertion",
    "tolerance.residual",
    "tolerance.reconstruction",
    "output.format",
];

const CONSERVATION_KEYS: &[&str] = &[
    "conservation.a",
    "conservation.b",
    "conservation.c",
    "conservation.a_phase",
    "conservation.b_phase",
    "conservation.c_phase",
    "conservation.weight0",
    "machine.ancilla_dim",
];

const NOSIGNAL_KEYS: &[&str] = &[
    "nosignal.psi1.theta",
    "nosignal.psi1.phi",
    "nosignal.alpha1.theta",
    "nosignal.alpha1.phi",
    "nosignal.psi2.theta",
    "nosignal.psi2.phi",
    "nosignal.alpha2.theta",
    "nosignal.alpha2.phi",
    "machine.mode",
    "machine.cross_outputs",
    "machine.ancilla_dim",
];

const GRAM_KEYS: &[&str] = &[
    "gram.dimension",
    "gram.members",
    "gram.seed",
    "gram.mismatch",
];

impl ScenarioConfig {
    pub fn new(kind: Kind) -> Self {
        let computational = Angles {
            theta: 0.0,
            phi: 0.0,
        };
        let hadamard = Angles {
            theta: FRAC_PI_2,
            phi: 0.0,
        };
        Self {
            kind,
            conservation: ConservationParams {
                a: 0.6,
                b: 0.5,
                c: 0.5,
                a_phase: 0.0,
                b_phase: 0.0,
                c_phase: 0.0,
                weight0: 0.5,
            },
            nosignal: NoSignalParams {
                psi1: computational,
                alpha1: computational,
                psi2: hadamard,
                alpha2: hadamard,
            },
            machine: MachineParams {
                mode: MachineMode::Termwise,
                cross_outputs: CrossOutputs::PassThrough,
                ancilla_dim: 4,
            },
            gram: GramParams {
                dimension: 4,
                members: 3,
                seed: 7,
                mismatch: 0.0,
            },
            tolerance: ToleranceParams::default(),
            format: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Other(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a scenario file. Tolerances not given in the file fall back to
    /// [`ToleranceParams::from_env`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: content.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    text: content.to_string(),
                });
            }
            if !Self::is_known(key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if let Some((first, _, _)) = entries.iter().find(|(_, k, _)| k == key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                    first: *first,
                });
            }
            entries.push((line, key.to_string(), value.to_string()));
        }

        let (kind_line, _, kind) = entries
            .iter()
            .find(|(_, k, _)| k == "kind")
            .ok_or(ConfigError::MissingKind)?;
        let kind: Kind = kind
            .parse()
            .map_err(|m: String| ConfigError::value(*kind_line, "kind", m))?;

        let mut config = Self::new(kind);
        config.tolerance = ToleranceParams::from_env()?;
        for (line, key, value) in &entries {
            if key != "kind" {
                config.set(key, value, *line)?;
            }
        }
        Ok(config)
    }

    fn is_known(key: &str) -> bool {
        COMMON_KEYS
            .iter()
            .chain(CONSERVATION_KEYS)
            .chain(NOSIGNAL_KEYS)
            .chain(GRAM_KEYS)
            .any(|k| *k == key)
    }

    /// Keys accepted for this config's kind.
    pub fn keys(&self) -> Vec<&'static str> {
        let specific = match self.kind {
            Kind::Conservation => CONSERVATION_KEYS,
            Kind::NoSignal => NOSIGNAL_KEYS,
            Kind::GramEquivalence => GRAM_KEYS,
        };
        COMMON_KEYS.iter().chain(specific).copied().collect()
    }

    /// Sets one key from its textual value, validating its range. `line` is
    /// only used in diagnostics.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        if !Self::is_known(key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if !self.keys().contains(&key) {
            return Err(ConfigError::WrongKind {
                line,
                key: key.to_string(),
                kind: self.kind,
            });
        }
        let err = |m: String| ConfigError::value(line, key, m);
        let number = || parse_number(value).map_err(err);
        let modulus = || parse_modulus(value).map_err(err);
        let theta = || parse_in(value, 0.0, PI, true).map_err(err);
        let phi = || parse_in(value, 0.0, TAU, false).map_err(err);
        match key {
            "kind" => {
                let kind: Kind = value.parse().map_err(err)?;
                if kind != self.kind {
                    return Err(err(format!("cannot change kind to `{kind}`")));
                }
            }
            "tolerance.assertion" => {
                self.tolerance.assertion = parse_positive(value).map_err(err)?
            }
            "tolerance.residual" => self.tolerance.residual = parse_positive(value).map_err(err)?,
            "tolerance.reconstruction" => {
                self.tolerance.reconstruction = parse_positive(value).map_err(err)?
            }
            "output.format" => self.format = Some(value.parse().map_err(err)?),
            "conservation.a" => self.conservation.a = modulus()?,
            "conservation.b" => self.conservation.b = modulus()?,
            "conservation.c" => self.conservation.c = modulus()?,
            "conservation.a_phase" => self.conservation.a_phase = number()?,
            "conservation.b_phase" => self.conservation.b_phase = number()?,
            "conservation.c_phase" => self.conservation.c_phase = number()?,
            "conservation.weight0" => self.conservation.weight0 = modulus()?,
            "nosignal.psi1.theta" => self.nosignal.psi1.theta = theta()?,
            "nosignal.psi1.phi" => self.nosignal.psi1.phi = phi()?,
            "nosignal.alpha1.theta" => self.nosignal.alpha1.theta = theta()?,
            "nosignal.alpha1.phi" => self.nosignal.alpha1.phi = phi()?,
            "nosignal.psi2.theta" => self.nosignal.psi2.theta = theta()?,
            "nosignal.psi2.phi" => self.nosignal.psi2.phi = phi()?,
            "nosignal.alpha2.theta" => self.nosignal.alpha2.theta = theta()?,
            "nosignal.alpha2.phi" => self.nosignal.alpha2.phi = phi()?,
            "machine.mode" => self.machine.mode = value.parse().map_err(err)?,
            "machine.cross_outputs" => self.machine.cross_outputs = value.parse().map_err(err)?,
            "machine.ancilla_dim" => {
                let d = parse_count(value).map_err(err)?;
                if !(3..=16).contains(&d) {
                    return Err(err(format!("ancilla dimension {d} outside [3, 16]")));
                }
                self.machine.ancilla_dim = d;
            }
            "gram.dimension" => {
                let d = parse_count(value).map_err(err)?;
                if !(2..=16).contains(&d) {
                    return Err(err(format!("dimension {d} outside [2, 16]")));
                }
                self.gram.dimension = d;
            }
            "gram.members" => {
                let n = parse_count(value).map_err(err)?;
                if n == 0 {
                    return Err(err("a family needs at least one member".into()));
                }
                self.gram.members = n;
            }
            "gram.seed" => {
                self.gram.seed = value
                    .parse()
                    .map_err(|_| err(format!("invalid seed `{value}`")))?
            }
            "gram.mismatch" => self.gram.mismatch = parse_in(value, 0.0, 1.0, true).map_err(err)?,
            _ => unreachable!("key list and setter out of sync: {key}"),
        }
        if self.kind == Kind::GramEquivalence && self.gram.members > self.gram.dimension {
            return Err(err(format!(
                "{} members cannot be independent in dimension {}",
                self.gram.members, self.gram.dimension
            )));
        }
        Ok(())
    }

    /// Effective values of every key of this kind, in declaration order.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.keys()
            .into_iter()
            .filter_map(|k| self.get(k).map(|v| (k.to_string(), v)))
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let f = |x: f64| format!("{x}");
        Some(match key {
            "kind" => self.kind.to_string(),
            "tolerance.assertion" => format!("{:e}", self.tolerance.assertion),
            "tolerance.residual" => format!("{:e}", self.tolerance.residual),
            "tolerance.reconstruction" => format!("{:e}", self.tolerance.reconstruction),
            "output.format" => return self.format.map(|x| x.to_string()),
            "conservation.a" => f(self.conservation.a),
            "conservation.b" => f(self.conservation.b),
            "conservation.c" => f(self.conservation.c),
            "conservation.a_phase" => f(self.conservation.a_phase),
            "conservation.b_phase" => f(self.conservation.b_phase),
            "conservation.c_phase" => f(self.conservation.c_phase),
            "conservation.weight0" => f(self.conservation.weight0),
            "nosignal.psi1.theta" => f(self.nosignal.psi1.theta),
            "nosignal.psi1.phi" => f(self.nosignal.psi1.phi),
            "nosignal.alpha1.theta" => f(self.nosignal.alpha1.theta),
            "nosignal.alpha1.phi" => f(self.nosignal.alpha1.phi),
            "nosignal.psi2.theta" => f(self.nosignal.psi2.theta),
            "nosignal.psi2.phi" => f(self.nosignal.psi2.phi),
            "nosignal.alpha2.theta" => f(self.nosignal.alpha2.theta),
            "nosignal.alpha2.phi" => f(self.nosignal.alpha2.phi),
            "machine.mode" => self.machine.mode.to_string(),
            "machine.cross_outputs" => self.machine.cross_outputs.to_string(),
            "machine.ancilla_dim" => self.machine.ancilla_dim.to_string(),
            "gram.dimension" => self.gram.dimension.to_string(),
            "gram.members" => self.gram.members.to_string(),
            "gram.seed" => self.gram.seed.to_string(),
            "gram.mismatch" => f(self.gram.mismatch),
            _ => return None,
        })
    }
}

/// A real number, or a multiple of `pi` such as `pi/4`, `3*pi/8`, `-pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let bad = || format!("invalid number `{s}`");
    let t = s.trim();
    let x = if let Some(pos) = t.find("pi") {
        let (head, tail) = (t[..pos].trim(), t[pos + 2..].trim());
        let factor = match head.strip_suffix('*').map(str::trim) {
            Some(h) => h.parse::<f64>().map_err(|_| bad())?,
            None if head.is_empty() => 1.0,
            None if head == "-" => -1.0,
            None => return Err(bad()),
        };
        let divisor = match tail.strip_prefix('/') {
            Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
            None if tail.is_empty() => 1.0,
            None => return Err(bad()),
        };
        factor * PI / divisor
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

fn parse_in(s: &str, lo: f64, hi: f64, inclusive: bool) -> Result<f64, String> {
    let x = parse_number(s)?;
    let ok = x >= lo && if inclusive { x <= hi } else { x < hi };
    if ok {
        Ok(x)
    } else {
        let close = if inclusive { ']' } else { ')' };
        Err(format!("value {x} outside [{lo}, {hi}{close}"))
    }
}

fn parse_modulus(s: &str) -> Result<f64, String> {
    parse_in(s, 0.0, 1.0, true)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_number(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("tolerance must be positive, got {x}"))
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("invalid integer `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_conservation_file() {
        let c = ScenarioConfig::parse(
            "# strong cloner\nkind = conservation\nconservation.a = 0.6 # psi overlap\n\nconservation.b=0.3\n",
        )
        .unwrap();
        assert_eq!(c.kind, Kind::Conservation);
        assert_eq!(c.conservation.a, 0.6);
        assert_eq!(c.conservation.b, 0.3);
        assert_eq!(c.conservation.c, 0.5);
    }

    #[test]
    fn rejects_unknown_keys_with_line() {
        let e = ScenarioConfig::parse("kind = conservation\n\nconservation.d = 1\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                line: 3,
                key: "conservation.d".into()
            }
        );
        assert_eq!(e.to_string(), "line 3: unknown key `conservation.d`");
    }

    #[test]
    fn rejects_out_of_range_and_wrong_kind() {
        let e = ScenarioConfig::parse("kind = conservation\nconservation.a = 1.5").unwrap_err();
        assert!(matches!(e, ConfigError::Value { line: 2, .. }), "{e}");
        let e = ScenarioConfig::parse("kind = conservation\nnosignal.psi1.theta = 1").unwrap_err();
        assert!(matches!(e, ConfigError::WrongKind { line: 2, .. }));
        let e = ScenarioConfig::parse("kind = nosignal\nnosignal.psi2.phi = 2*pi").unwrap_err();
        assert!(matches!(e, ConfigError::Value { line: 2, .. }));
        assert!(matches!(
            ScenarioConfig::parse("conservation.a = 0.1"),
            Err(ConfigError::MissingKind)
        ));
        assert!(matches!(
            ScenarioConfig::parse("kind conservation"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            ScenarioConfig::parse(
                "kind = conservation\nconservation.a = 0.1\nconservation.a = 0.2"
            ),
            Err(ConfigError::Duplicate {
                line: 3,
                first: 2,
                ..
            })
        ));
    }

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_number("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_number("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_number("-pi").unwrap(), -PI);
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert!(parse_number("pi4").is_err());
        assert!(parse_number("nan").is_err());
    }

    #[test]
    fn echo_round_trips_through_parse() {
        let mut c = ScenarioConfig::new(Kind::NoSignal);
        c.set("nosignal.psi2.theta", "pi/8", 0).unwrap();
        c.set("machine.mode", "linear-extension", 0).unwrap();
        let text: String = c
            .echo()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(ScenarioConfig::parse(&text).unwrap(), c);
    }
}
