use std::f64::consts::{PI, TAU};

use ndarray::Array2;

use super::{ModelKind, PhaseConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Size of the smallest circular window holding every phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Spread {
    /// Arc length on the circle.
    Arc(f64),
    /// Number of consecutive color slots (mod kappa).
    Span(u32),
}

/// Minimal covering arc (continuous) or minimal covering color window
/// (discrete), found as the complement of the largest empty gap.
pub fn circular_width(x: &PhaseConfig) -> Spread {
    match x {
        PhaseConfig::Continuous(p) => {
            if p.is_empty() {
                return Spread::Arc(0.0);
            }
            let mut sorted = p.clone();
            sorted.sort_by(f64::total_cmp);
            let wrap = sorted[0] + TAU - sorted[sorted.len() - 1];
            let largest = sorted.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
            Spread::Arc((TAU - largest).max(0.0))
        }
        PhaseConfig::Discrete { kappa, colors } => {
            let k = *kappa as usize;
            let mut used = vec![false; k];
            for &c in colors {
                used[c as usize] = true;
            }
            let Some(first) = used.iter().position(|&u| u) else {
                return Spread::Span(0);
            };
            // longest run of unused slots, scanning one full turn from a used slot
            let (mut longest, mut run) = (0, 0);
            for i in 1..=k {
                if used[(first + i) % k] {
                    longest = longest.max(run);
                    run = 0;
                } else {
                    run += 1;
                }
            }
            Spread::Span((k - longest) as u32)
        }
    }
}

/// Half-circle test. KM: covering arc `< pi`; FCA: fewer than `kappa / 2`
/// consecutive colors; GHM: all nodes equal.
pub fn is_concentrated(model: ModelKind, x: &PhaseConfig) -> bool {
    if model == ModelKind::Ghm {
        return all_equal(x);
    }
    match (circular_width(x), x) {
        (Spread::Arc(w), _) => w < PI,
        (Spread::Span(s), PhaseConfig::Discrete { kappa, .. }) => 2 * s < *kappa,
        (Spread::Span(_), PhaseConfig::Continuous(_)) => unreachable!(),
    }
}

fn all_equal(x: &PhaseConfig) -> bool {
    match x {
        PhaseConfig::Continuous(p) => p.windows(2).all(|w| w[0] == w[1]),
        PhaseConfig::Discrete { colors, .. } => colors.windows(2).all(|w| w[0] == w[1]),
    }
}

/// Discrete: all colors equal. Continuous: covering arc below `tol`.
pub fn is_synchronized(x: &PhaseConfig, tol: f64) -> Result<bool> {
    match x {
        PhaseConfig::Discrete { .. } => Ok(all_equal(x)),
        PhaseConfig::Continuous(_) => {
            if !(tol > 0.0) {
                return Err(Error::param(format!("tolerance {tol} must be positive")));
            }
            match circular_width(x) {
                Spread::Arc(w) => Ok(w < tol),
                Spread::Span(_) => unreachable!(),
            }
        }
    }
}

/// Shifts configuration `t` by `-t (mod kappa)`, so a synchronizing firefly
/// trajectory becomes eventually constant in time.
pub fn centered_coloring(configs: &[PhaseConfig]) -> Result<Vec<PhaseConfig>> {
    configs
        .iter()
        .enumerate()
        .map(|(t, x)| match x {
            PhaseConfig::Discrete { kappa, colors } => {
                let shift = (t % *kappa as usize) as u32;
                Ok(PhaseConfig::Discrete {
                    kappa: *kappa,
                    colors: colors.iter().map(|&c| (c + kappa - shift) % kappa).collect(),
                })
            }
            PhaseConfig::Continuous(_) => Err(Error::SpaceMismatch(
                "centered colorings are defined for discrete trajectories".into(),
            )),
        })
        .collect()
}

/// Adjacency matrix weighted by circular phase differences: entry `(i, j)` is
/// `min(X(i) - X(j), X(j) - X(i))` taken mod the period on edges, 0 elsewhere.
pub fn displacement_matrix(g: &Graph, x: &PhaseConfig) -> Result<Array2<f64>> {
    if g.n() != x.len() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            actual: x.len(),
        });
    }
    let period = match x {
        PhaseConfig::Continuous(_) => TAU,
        PhaseConfig::Discrete { kappa, .. } => f64::from(*kappa),
    };
    let mut delta = Array2::zeros((g.n(), g.n()));
    for (i, j) in g.edges() {
        let d = (x.value(i) - x.value(j)).rem_euclid(period);
        let d = d.min(period - d);
        delta[[i, j]] = d;
        delta[[j, i]] = d;
    }
    Ok(delta)
}
