use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::lattice::{generate_torus, load_lattice, Lattice, LatticeError};
use crate::pauli_sim::MeasurementNoise;
use crate::PauliType;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("lattice {spec}: {source}")]
    Lattice {
        spec: String,
        #[source]
        source: LatticeError,
    },
}

/// Where an instance comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeSpec {
    /// `torus:L`, the L×L square torus.
    Torus(usize),
    File(PathBuf),
}

impl LatticeSpec {
    /// Parses `torus:L` or a path.
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.strip_prefix("torus:") {
            Some(l) => {
                let l: usize = l.parse().map_err(|_| format!("bad torus size `{l}`"))?;
                if l < 2 {
                    return Err("torus size must be at least 2".into());
                }
                Ok(Self::Torus(l))
            }
            None if s.is_empty() => Err("empty lattice entry".into()),
            None => Ok(Self::File(PathBuf::from(s))),
        }
    }

    pub fn load(&self) -> Result<Lattice, ConfigError> {
        match self {
            Self::Torus(l) => Ok(generate_torus(*l)),
            Self::File(p) => load_lattice(p).map_err(|source| ConfigError::Lattice {
                spec: p.display().to_string(),
                source,
            }),
        }
    }

    /// Resolves a relative path against `base`.
    pub fn resolve(self, base: &Path) -> Self {
        match self {
            Self::File(p) if p.is_relative() => Self::File(base.join(p)),
            other => other,
        }
    }
}

impl std::fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Torus(l) => write!(f, "torus:{l}"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Default physical rate grid, 0.1% to 1.4% in steps of 0.1%.
pub fn default_rates() -> Vec<f64> {
    (1..=14).map(|i| i as f64 / 1000.0).collect()
}

/// A memory experiment.
///
/// Text form, one `key = value` per line, `#` comments, lists comma
/// separated:
///
/// ```text
/// lattice = torus:3, torus:5, lattices/hyperbolic-8-3-e216.lat
/// layers = 8
/// rates = 0.002, 0.004, 0.008
/// shots = 2000
/// seed = 7
/// channels = Z, X
/// out = results.csv
/// workers = 4
/// noise = outcome-flip
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lattices: Vec<LatticeSpec>,
    /// Layer counts 2z.
    pub layers: Vec<usize>,
    pub rates: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub channels: Vec<PauliType>,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
    pub noise: MeasurementNoise,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lattices: Vec::new(),
            layers: vec![8],
            rates: default_rates(),
            shots: 1000,
            seed: 0,
            channels: vec![PauliType::Z, PauliType::X],
            out: None,
            workers: 0,
            noise: MeasurementNoise::OutcomeFlip,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| ConfigError::Value {
                key: key.into(),
                message: format!("cannot parse `{s}`"),
            })
        })
        .collect()
}

fn one<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        message: format!("cannot parse `{value}`"),
    })
}

pub fn parse_channel(s: &str) -> Result<PauliType, String> {
    match s.trim() {
        "Z" | "z" => Ok(PauliType::Z),
        "X" | "x" => Ok(PauliType::X),
        other => Err(format!("unknown channel `{other}`")),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut have_lattice = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: "expected key = value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |message: String| ConfigError::Value {
                key: key.into(),
                message,
            };
            match key {
                "lattice" | "lattices" => {
                    cfg.lattices = value
                        .split(',')
                        .map(|s| LatticeSpec::parse(s.trim()).map_err(bad))
                        .collect::<Result<_, _>>()?;
                    have_lattice = true;
                }
                "layers" => cfg.layers = list(key, value)?,
                "rates" => cfg.rates = list(key, value)?,
                "shots" => cfg.shots = one(key, value)?,
                "seed" => cfg.seed = one(key, value)?,
                "channels" => {
                    cfg.channels = match value.trim() {
                        "both" => vec![PauliType::Z, PauliType::X],
                        v => v.split(',').map(parse_channel).collect::<Result<_, _>>().map_err(bad)?,
                    }
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "workers" => cfg.workers = one(key, value)?,
                "noise" => {
                    cfg.noise = match value {
                        "outcome-flip" => MeasurementNoise::OutcomeFlip,
                        "pauli-x" => MeasurementNoise::PauliX,
                        v => return Err(bad(format!("unknown noise `{v}`"))),
                    }
                }
                other => return Err(ConfigError::UnknownKey(other.into())),
            }
        }
        if !have_lattice {
            return Err(ConfigError::Missing("lattice"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| ConfigError::Value {
            key: key.into(),
            message,
        };
        if self.lattices.is_empty() {
            return Err(ConfigError::Missing("lattice"));
        }
        if self.shots == 0 {
            return Err(bad("shots", "need at least one shot".into()));
        }
        if self.layers.is_empty() {
            return Err(ConfigError::Missing("layers"));
        }
        if let Some(l) = self.layers.iter().find(|&&l| l < 2 || l % 2 != 0) {
            return Err(bad("layers", format!("{l} is not an even number >= 2")));
        }
        if self.rates.is_empty() {
            return Err(ConfigError::Missing("rates"));
        }
        // p = 0 is allowed for the noiseless sanity run
        if let Some(p) = self.rates.iter().find(|&&p| !(0.0..0.5).contains(&p)) {
            return Err(bad("rates", format!("{p} is outside [0, 0.5)")));
        }
        if self.channels.is_empty() {
            return Err(ConfigError::Missing("channels"));
        }
        Ok(())
    }

    /// Resolves relative lattice paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        self.lattices = std::mem::take(&mut self.lattices)
            .into_iter()
            .map(|l| l.resolve(base))
            .collect();
    }
}
