use crate::dynamics::PhaseConfig;
use crate::graph::GraphFeatures;

/// Nearest-rank quartiles `v[ceil(q m) - 1]` of the phase values, for
/// `q = 1/4, 1/2, 3/4`.
pub fn quartiles(x: &PhaseConfig) -> [f64; 3] {
    let mut v = x.values();
    if v.is_empty() {
        return [f64::NAN; 3];
    }
    v.sort_by(f64::total_cmp);
    let m = v.len();
    let at = |num: usize| v[(num * m).div_ceil(4).max(1) - 1];
    [at(1), at(2), at(3)]
}

/// `X_0, ..., X_r` flattened node by node, then the quartiles, then the graph
/// features when given.
pub fn vectorize_parts(configs: &[PhaseConfig], quartiles: [f64; 3], features: Option<&GraphFeatures>) -> Vec<f64> {
    let n = configs.first().map_or(0, PhaseConfig::len);
    let mut out = Vec::with_capacity(configs.len() * n + 8);
    for x in configs {
        out.extend((0..x.len()).map(|v| x.value(v)));
    }
    out.extend(quartiles);
    if let Some(f) = features {
        out.extend(f.to_array());
    }
    out
}

/// Column names matching [`vectorize_parts`] for `n` nodes and `r` stored
/// iterations.
pub fn column_names(n: usize, r: usize, with_features: bool) -> Vec<String> {
    let mut names = Vec::with_capacity((r + 1) * n + 8);
    for t in 0..=r {
        names.extend((0..n).map(|v| format!("x{t}_v{v}")));
    }
    names.extend(["q1", "q2", "q3"].map(String::from));
    if with_features {
        names.extend(GraphFeatures::NAMES.map(String::from));
    }
    names
}
