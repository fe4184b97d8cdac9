//! The three coupled-oscillator models, trajectories, and the concentration
//! and synchronization tests on phase configurations.

mod measure;
mod phase;

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use measure::{
    centered_coloring, circular_width, displacement_matrix, is_concentrated, is_synchronized, Spread,
};
pub use phase::{random_concentrated_config, random_config, PhaseConfig, PhaseSpace};

/// Parameters of the forward-Euler Kuramoto update with zero intrinsic
/// frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KmParams {
    pub coupling: f64,
    pub step: f64,
    /// Arc width below which a configuration counts as synchronized.
    pub sync_tolerance: f64,
}

impl Default for KmParams {
    fn default() -> Self {
        KmParams {
            coupling: 1.0,
            step: 0.05,
            sync_tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Km,
    Fca,
    Ghm,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Km => "km",
            ModelKind::Fca => "fca",
            ModelKind::Ghm => "ghm",
        }
    }
}

/// A coupling rule together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    /// Kuramoto oscillators on the circle.
    Km(KmParams),
    /// Firefly cellular automaton with `kappa` colors.
    Fca { kappa: u32 },
    /// Greenberg-Hastings excitable medium with `kappa` colors.
    Ghm { kappa: u32 },
}

impl Model {
    pub fn km() -> Self {
        Model::Km(KmParams::default())
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Km(_) => ModelKind::Km,
            Model::Fca { .. } => ModelKind::Fca,
            Model::Ghm { .. } => ModelKind::Ghm,
        }
    }

    pub fn space(&self) -> PhaseSpace {
        match *self {
            Model::Km(_) => PhaseSpace::Continuous,
            Model::Fca { kappa } | Model::Ghm { kappa } => PhaseSpace::Discrete { kappa },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Km(p) => {
                if !(p.coupling > 0.0) || !(p.step > 0.0) || !(p.sync_tolerance > 0.0) {
                    return Err(Error::param("Kuramoto coupling, step and tolerance must be positive"));
                }
            }
            Model::Fca { kappa } | Model::Ghm { kappa } => {
                if kappa < 3 {
                    return Err(Error::param(format!("kappa = {kappa}, need at least 3 colors")));
                }
            }
        }
        Ok(())
    }

    /// Applies one synchronous update of the model to `x` on `g`.
    pub fn step(&self, g: &Graph, x: &PhaseConfig) -> Result<PhaseConfig> {
        match *self {
            Model::Km(p) => km_step(g, x, &p),
            Model::Fca { .. } => fca_step(g, x),
            Model::Ghm { .. } => ghm_step(g, x),
        }
    }

    pub fn is_concentrated(&self, x: &PhaseConfig) -> bool {
        is_concentrated(self.kind(), x)
    }

    pub fn is_synchronized(&self, x: &PhaseConfig) -> bool {
        let tol = match self {
            Model::Km(p) => p.sync_tolerance,
            _ => 0.5,
        };
        is_synchronized(x, tol).unwrap_or(false)
    }
}

fn check_len(g: &Graph, len: usize) -> Result<()> {
    if g.n() != len {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            actual: len,
        });
    }
    Ok(())
}

fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `X'(v) = X(v) + h * sum_{u ~ v} K sin(X(u) - X(v))`, reduced into `[0, 2pi)`.
pub fn km_step(g: &Graph, x: &PhaseConfig, params: &KmParams) -> Result<PhaseConfig> {
    let phases = match x {
        PhaseConfig::Continuous(p) => p,
        _ => return Err(Error::SpaceMismatch("Kuramoto needs continuous phases".into())),
    };
    check_len(g, phases.len())?;
    let scale = params.step * params.coupling;
    let next = phases
        .iter()
        .enumerate()
        .map(|(v, &xv)| {
            let pull: f64 = g.neighbors(v).iter().map(|&u| (phases[u] - xv).sin()).sum();
            wrap_angle(xv + scale * pull)
        })
        .collect();
    Ok(PhaseConfig::Continuous(next))
}

fn discrete_parts(x: &PhaseConfig) -> Result<(u32, &[u32])> {
    match x {
        PhaseConfig::Discrete { kappa, colors } => {
            if *kappa < 3 {
                return Err(Error::param(format!("kappa = {kappa}, need at least 3 colors")));
            }
            Ok((*kappa, colors))
        }
        _ => Err(Error::SpaceMismatch("expected a discrete coloring".into())),
    }
}

/// Firefly update: a node past the blinking color `b = floor((kappa-1)/2)`
/// holds when some neighbour is blinking; every other node advances by one.
pub fn fca_step(g: &Graph, x: &PhaseConfig) -> Result<PhaseConfig> {
    let (kappa, colors) = discrete_parts(x)?;
    check_len(g, colors.len())?;
    let blink = (kappa - 1) / 2;
    let next = colors
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            let inhibited = c > blink && g.neighbors(v).iter().any(|&u| colors[u] == blink);
            if inhibited {
                c
            } else {
                (c + 1) % kappa
            }
        })
        .collect();
    Ok(PhaseConfig::Discrete { kappa, colors: next })
}

/// Greenberg-Hastings update: a rested node (0) is excited (1) by an excited
/// neighbour and otherwise stays rested; any other color advances by one.
pub fn ghm_step(g: &Graph, x: &PhaseConfig) -> Result<PhaseConfig> {
    let (kappa, colors) = discrete_parts(x)?;
    check_len(g, colors.len())?;
    let next = colors
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            if c == 0 {
                u32::from(g.neighbors(v).iter().any(|&u| colors[u] == 1))
            } else {
                (c + 1) % kappa
            }
        })
        .collect();
    Ok(PhaseConfig::Discrete { kappa, colors: next })
}

/// Configurations `X_0 ..= X_t` produced by one model on one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub model: Model,
    pub configs: Vec<PhaseConfig>,
    /// First iteration at which the trajectory was synchronized, if the run
    /// stopped there.
    pub synchronized_at: Option<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn last(&self) -> &PhaseConfig {
        self.configs.last().expect("trajectory holds at least X_0")
    }

    /// One row per iteration under the header `t,v0,...,v{n-1}`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_configs_csv(&self.configs, w)
    }
}

pub fn write_configs_csv<W: Write>(configs: &[PhaseConfig], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let n = configs.first().map_or(0, PhaseConfig::len);
    let mut header = Vec::with_capacity(n + 1);
    header.push("t".to_string());
    header.extend((0..n).map(|v| format!("v{v}")));
    out.write_record(&header)?;
    let mut row = Vec::with_capacity(n + 1);
    for (t, x) in configs.iter().enumerate() {
        row.clear();
        row.push(t.to_string());
        row.extend((0..x.len()).map(|v| x.format_value(v)));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Outcome of [`run`]: the stored prefix plus the state at the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    /// `X_0 ..= X_keep`.
    pub prefix: Vec<PhaseConfig>,
    /// The last computed configuration.
    pub last: PhaseConfig,
    /// Iteration index of `last`.
    pub last_t: usize,
    pub synchronized_at: Option<usize>,
}

impl Run {
    /// Whether `X_t_max` is concentrated. A run that stopped at a
    /// synchronized state stays synchronized, hence concentrated.
    pub fn concentrated_at_horizon(&self, model: &Model) -> bool {
        self.synchronized_at.is_some() || model.is_concentrated(&self.last)
    }
}

fn check_start(model: &Model, g: &Graph, x0: &PhaseConfig) -> Result<()> {
    model.validate()?;
    check_len(g, x0.len())?;
    if x0.space() != model.space() {
        return Err(Error::SpaceMismatch(format!(
            "{} expects {:?}, got {:?}",
            model.kind().as_str(),
            model.space(),
            x0.space()
        )));
    }
    x0.validate()
}

/// Iterates the model up to `t_max`, keeping `X_0 ..= X_keep`. Stops early at
/// the first synchronized configuration once the prefix is complete.
pub fn run(model: &Model, g: &Graph, x0: &PhaseConfig, t_max: usize, keep: usize) -> Result<Run> {
    check_start(model, g, x0)?;
    let keep = keep.min(t_max);
    let mut prefix = Vec::with_capacity(keep + 1);
    prefix.push(x0.clone());
    let mut current = x0.clone();
    let mut synchronized_at = model.is_synchronized(&current).then_some(0);
    let mut t = 0;
    while t < t_max && !(synchronized_at.is_some() && t >= keep) {
        current = model.step(g, &current)?;
        t += 1;
        if t <= keep {
            prefix.push(current.clone());
        }
        if synchronized_at.is_none() && model.is_synchronized(&current) {
            synchronized_at = Some(t);
        }
    }
    Ok(Run {
        prefix,
        last: current,
        last_t: t,
        synchronized_at,
    })
}

/// Full trajectory of at most `t_max` steps; stops at the first synchronized
/// configuration, which is absorbing for all three models.
pub fn simulate(model: &Model, g: &Graph, x0: &PhaseConfig, t_max: usize) -> Result<Trajectory> {
    check_start(model, g, x0)?;
    let mut configs = vec![x0.clone()];
    let mut synchronized_at = model.is_synchronized(x0).then_some(0);
    while synchronized_at.is_none() && configs.len() <= t_max {
        let next = model.step(g, configs.last().unwrap())?;
        if model.is_synchronized(&next) {
            synchronized_at = Some(configs.len());
        }
        configs.push(next);
    }
    Ok(Trajectory {
        model: *model,
        configs,
        synchronized_at,
    })
}

/// Like [`simulate`] but always performs exactly `t_max` steps.
pub fn simulate_full(model: &Model, g: &Graph, x0: &PhaseConfig, t_max: usize) -> Result<Trajectory> {
    check_start(model, g, x0)?;
    let mut configs = Vec::with_capacity(t_max + 1);
    configs.push(x0.clone());
    let mut synchronized_at = model.is_synchronized(x0).then_some(0);
    for t in 1..=t_max {
        let next = model.step(g, &configs[t - 1])?;
        if synchronized_at.is_none() && model.is_synchronized(&next) {
            synchronized_at = Some(t);
        }
        configs.push(next);
    }
    Ok(Trajectory {
        model: *model,
        configs,
        synchronized_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{nws_generate, NwsParams};
    use crate::rng;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use std::f64::consts::FRAC_PI_2;

    fn disc(kappa: u32, colors: &[u32]) -> PhaseConfig {
        PhaseConfig::Discrete {
            kappa,
            colors: colors.to_vec(),
        }
    }

    #[test]
    fn km_two_node_step() {
        let g = Graph::path(2);
        let x = PhaseConfig::Continuous(vec![0.0, FRAC_PI_2]);
        let y = km_step(&g, &x, &KmParams::default()).unwrap();
        let PhaseConfig::Continuous(p) = y else { panic!() };
        assert!((p[0] - 0.05).abs() < 1e-15);
        assert!((p[1] - (FRAC_PI_2 - 0.05)).abs() < 1e-15);
    }

    #[test]
    fn km_fixed_points() {
        let g = Graph::complete(4);
        let x = PhaseConfig::Continuous(vec![1.3; 4]);
        assert_eq!(km_step(&g, &x, &KmParams::default()).unwrap(), x);
        let lone = PhaseConfig::Continuous(vec![2.0]);
        assert_eq!(km_step(&Graph::empty(1), &lone, &KmParams::default()).unwrap(), lone);
        assert!(km_step(&Graph::path(3), &lone, &KmParams::default()).is_err());
    }

    #[test]
    fn fca_hand_cases() {
        let g = Graph::path(2);
        assert_eq!(fca_step(&g, &disc(5, &[3, 2])).unwrap(), disc(5, &[3, 3]));
        assert_eq!(fca_step(&g, &disc(5, &[1, 2])).unwrap(), disc(5, &[2, 3]));
        assert_eq!(fca_step(&Graph::cycle(4), &disc(5, &[4; 4])).unwrap(), disc(5, &[0; 4]));
        assert!(fca_step(&g, &disc(2, &[0, 1])).is_err());
    }

    #[test]
    fn ghm_hand_cases() {
        let g = Graph::path(2);
        assert_eq!(ghm_step(&g, &disc(5, &[0, 1])).unwrap(), disc(5, &[1, 2]));
        assert_eq!(ghm_step(&Graph::empty(1), &disc(5, &[4])).unwrap(), disc(5, &[0]));
        let zero = disc(5, &[0; 6]);
        let tr = simulate_full(&Model::Ghm { kappa: 5 }, &Graph::cycle(6), &zero, 20).unwrap();
        assert!(tr.configs.iter().all(|c| *c == zero));
        assert!(ghm_step(&g, &disc(2, &[0, 1])).is_err());
    }

    #[test]
    fn ghm_path_of_four_clears_by_seven() {
        // every one of the 3^4 initial colorings
        let g = Graph::path(4);
        let model = Model::Ghm { kappa: 3 };
        for code in 0..81u32 {
            let colors: Vec<u32> = (0..4).map(|i| (code / 3u32.pow(i)) % 3).collect();
            let tr = simulate_full(&model, &g, &disc(3, &colors), 7).unwrap();
            assert_eq!(tr.configs[7], disc(3, &[0; 4]), "start {colors:?}");
        }
    }

    #[test]
    fn lone_firefly_cycles() {
        let model = Model::Fca { kappa: 5 };
        for c in 0..5 {
            let tr = simulate_full(&model, &Graph::empty(1), &disc(5, &[c]), 5).unwrap();
            assert_eq!(tr.configs[5], disc(5, &[c]));
        }
    }

    #[test]
    fn two_node_kuramoto_converges_monotonically() {
        let model = Model::km();
        let x0 = PhaseConfig::Continuous(vec![0.0, FRAC_PI_2]);
        let tr = simulate(&model, &Graph::path(2), &x0, 5000).unwrap();
        let stop = tr.synchronized_at.expect("synchronizes");
        assert!(stop < 5000);
        let widths: Vec<f64> = tr
            .configs
            .iter()
            .map(|c| match circular_width(c) {
                Spread::Arc(w) => w,
                Spread::Span(_) => unreachable!(),
            })
            .collect();
        assert!(widths.windows(2).all(|w| w[1] < w[0]));
        assert!(*widths.last().unwrap() < 1e-3);
    }

    #[test]
    fn simulate_rejects_mismatched_start() {
        let model = Model::Fca { kappa: 5 };
        let x = PhaseConfig::Continuous(vec![0.0, 1.0]);
        assert!(simulate(&model, &Graph::path(2), &x, 3).is_err());
        assert!(simulate(&model, &Graph::path(3), &disc(5, &[0, 1]), 3).is_err());
        assert!(simulate(&model, &Graph::path(2), &disc(5, &[0, 7]), 3).is_err());
    }

    #[test]
    fn run_keeps_prefix_past_early_synchronization() {
        let model = Model::Fca { kappa: 5 };
        let x0 = disc(5, &[2, 2, 2]);
        let r = run(&model, &Graph::path(3), &x0, 70, 4).unwrap();
        assert_eq!(r.prefix.len(), 5);
        assert_eq!(r.synchronized_at, Some(0));
        assert_eq!(r.last_t, 4);
        assert!(r.concentrated_at_horizon(&model));
    }

    #[test]
    fn winding_ring_stays_unconcentrated() {
        let n = 10;
        let x0 = PhaseConfig::Continuous((0..n).map(|i| TAU * i as f64 / n as f64).collect());
        let model = Model::km();
        let r = run(&model, &Graph::cycle(n), &x0, 1758, 0).unwrap();
        assert_eq!(r.last_t, 1758);
        assert!(!r.concentrated_at_horizon(&model));
    }

    #[test]
    fn trajectory_csv_layout() {
        let model = Model::Ghm { kappa: 5 };
        let tr = simulate_full(&model, &Graph::path(3), &disc(5, &[0, 1, 2]), 2).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,v0,v1,v2\n0,0,1,2\n1,1,2,3\n2,2,3,4\n");
    }

    fn permuted(x: &PhaseConfig, perm: &[usize]) -> PhaseConfig {
        let mut inv = vec![0; perm.len()];
        for (v, &p) in perm.iter().enumerate() {
            inv[p] = v;
        }
        x.restrict(&inv)
    }

    proptest! {
        #[test]
        fn steps_commute_with_relabeling(seed in any::<u64>(), n in 3usize..25) {
            let mut s = rng::from_seed(seed);
            let g = nws_generate(&NwsParams { n, k: 2, p: 0.6, passes: 1 }, &mut s).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut s);
            let gp = g.permute(&perm).unwrap();
            for model in [Model::km(), Model::Fca { kappa: 5 }, Model::Ghm { kappa: 4 }] {
                let x = random_config(model.space(), n, &mut s);
                let lhs = model.step(&gp, &permuted(&x, &perm)).unwrap();
                let rhs = permuted(&model.step(&g, &x).unwrap(), &perm);
                match (&lhs, &rhs) {
                    (PhaseConfig::Continuous(a), PhaseConfig::Continuous(b)) => {
                        for (p, q) in a.iter().zip(b) {
                            let d = (p - q).rem_euclid(TAU);
                            prop_assert!(d.min(TAU - d) < 1e-12);
                        }
                    }
                    _ => prop_assert_eq!(&lhs, &rhs),
                }
            }
        }

        #[test]
        fn synchronization_is_absorbing(seed in any::<u64>(), c in 0u32..5, theta in 0.0..TAU) {
            let g = nws_generate(&NwsParams { n: 12, k: 2, p: 0.8, passes: 1 }, &mut rng::from_seed(seed)).unwrap();
            for model in [Model::Fca { kappa: 5 }, Model::Ghm { kappa: 5 }] {
                let mut x = disc(5, &[c; 12]);
                for _ in 0..12 {
                    x = model.step(&g, &x).unwrap();
                    prop_assert!(model.is_synchronized(&x));
                }
            }
            let mut x = PhaseConfig::Continuous(vec![theta; 12]);
            for _ in 0..12 {
                x = Model::km().step(&g, &x).unwrap();
                prop_assert!(Model::km().is_synchronized(&x));
            }
        }

        #[test]
        fn simulate_is_deterministic(seed in any::<u64>()) {
            let mut s = rng::from_seed(seed);
            let g = nws_generate(&NwsParams { n: 15, k: 2, p: 0.65, passes: 1 }, &mut s).unwrap();
            for model in [Model::km(), Model::Fca { kappa: 5 }, Model::Ghm { kappa: 5 }] {
                let x0 = random_config(model.space(), 15, &mut s);
                let a = simulate_full(&model, &g, &x0, 40).unwrap();
                let b = simulate_full(&model, &g, &x0, 40).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
