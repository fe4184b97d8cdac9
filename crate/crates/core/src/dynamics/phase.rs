use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase space of a single oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PhaseSpace {
    /// The circle `[0, 2pi)`.
    Continuous,
    /// The color wheel `{0, ..., kappa - 1}`.
    Discrete { kappa: u32 },
}

/// Per-node phases.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseConfig {
    Continuous(Vec<f64>),
    Discrete { kappa: u32, colors: Vec<u32> },
}

impl PhaseConfig {
    pub fn len(&self) -> usize {
        match self {
            PhaseConfig::Continuous(p) => p.len(),
            PhaseConfig::Discrete { colors, .. } => colors.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self) -> PhaseSpace {
        match self {
            PhaseConfig::Continuous(_) => PhaseSpace::Continuous,
            PhaseConfig::Discrete { kappa, .. } => PhaseSpace::Discrete { kappa: *kappa },
        }
    }

    /// Phase of node `v` as a plain number.
    pub fn value(&self, v: usize) -> f64 {
        match self {
            PhaseConfig::Continuous(p) => p[v],
            PhaseConfig::Discrete { colors, .. } => f64::from(colors[v]),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|v| self.value(v)).collect()
    }

    /// Shortest round-trip decimal form of node `v`'s phase.
    pub fn format_value(&self, v: usize) -> String {
        match self {
            PhaseConfig::Continuous(p) => p[v].to_string(),
            PhaseConfig::Discrete { colors, .. } => colors[v].to_string(),
        }
    }

    /// Rebuilds a configuration in `space` from numeric values.
    pub fn from_values(space: PhaseSpace, values: &[f64]) -> Result<Self> {
        let x = match space {
            PhaseSpace::Continuous => PhaseConfig::Continuous(values.to_vec()),
            PhaseSpace::Discrete { kappa } => {
                let colors = values
                    .iter()
                    .map(|&v| {
                        if v.fract() != 0.0 || v < 0.0 {
                            Err(Error::Parse(format!("color {v} is not a non-negative integer")))
                        } else {
                            Ok(v as u32)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                PhaseConfig::Discrete { kappa, colors }
            }
        };
        x.validate()?;
        Ok(x)
    }

    /// Checks that every phase lies in the declared space.
    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseConfig::Continuous(p) => {
                if let Some(bad) = p.iter().find(|v| !(0.0..TAU).contains(*v)) {
                    return Err(Error::param(format!("phase {bad} outside [0, 2pi)")));
                }
            }
            PhaseConfig::Discrete { kappa, colors } => {
                if let Some(bad) = colors.iter().find(|&&c| c >= *kappa) {
                    return Err(Error::param(format!("color {bad} outside 0..{kappa}")));
                }
            }
        }
        Ok(())
    }

    /// Configuration on `nodes`, with node `i` taking the phase of `nodes[i]`.
    pub fn restrict(&self, nodes: &[usize]) -> PhaseConfig {
        match self {
            PhaseConfig::Continuous(p) => PhaseConfig::Continuous(nodes.iter().map(|&v| p[v]).collect()),
            PhaseConfig::Discrete { kappa, colors } => PhaseConfig::Discrete {
                kappa: *kappa,
                colors: nodes.iter().map(|&v| colors[v]).collect(),
            },
        }
    }
}

/// Independent uniform phases for `n` nodes.
pub fn random_config<R: Rng + ?Sized>(space: PhaseSpace, n: usize, rng: &mut R) -> PhaseConfig {
    match space {
        PhaseSpace::Continuous => PhaseConfig::Continuous(
            (0..n)
                .map(|_| {
                    let v = rng.random::<f64>() * TAU;
                    if v >= TAU {
                        0.0
                    } else {
                        v
                    }
                })
                .collect(),
        ),
        PhaseSpace::Discrete { kappa } => PhaseConfig::Discrete {
            kappa,
            colors: (0..n).map(|_| rng.random_range(0..kappa)).collect(),
        },
    }
}

/// Random configuration confined to an open half-circle: continuous phases
/// fill an arc of random length below `pi`, colors a window of fewer than
/// `kappa / 2` consecutive values. The window start is uniform.
pub fn random_concentrated_config<R: Rng + ?Sized>(space: PhaseSpace, n: usize, rng: &mut R) -> PhaseConfig {
    match space {
        PhaseSpace::Continuous => {
            let start = rng.random::<f64>() * TAU;
            let arc = rng.random::<f64>() * 0.95 * PI;
            PhaseConfig::Continuous(
                (0..n)
                    .map(|_| (start + rng.random::<f64>() * arc).rem_euclid(TAU))
                    .collect(),
            )
        }
        PhaseSpace::Discrete { kappa } => {
            // largest window w with 2w < kappa
            let window = (kappa - 1) / 2;
            let start = rng.random_range(0..kappa);
            PhaseConfig::Discrete {
                kappa,
                colors: (0..n).map(|_| (start + rng.random_range(0..window)) % kappa).collect(),
            }
        }
    }
}
