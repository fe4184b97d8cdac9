use ndarray::ArrayView2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fitted decision or regression tree node.
///
/// Classification leaves hold `P(class 1)`; the class-probability pair is
/// `(1 - value, value)`. Regression leaves hold the stage output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.num_leaves() + right.num_leaves(),
        }
    }

    /// `(P(class 0), P(class 1))` at the leaf reached by `x`.
    pub fn leaf_probs(&self, x: &[f64]) -> [f64; 2] {
        let p = self.predict(x);
        [1.0 - p, p]
    }
}

/// A tree together with the impurity decrease credited to each feature,
/// weighted by the fraction of the tree's sample weight reaching the node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub root: TreeNode,
    pub importance: Vec<f64>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.root.predict(x)
    }
}

/// How candidate split features are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSampling {
    /// Fresh random features at every node.
    #[default]
    PerNode,
    /// One random subset per tree, searched exhaustively at every node.
    PerTree,
}

pub(crate) struct GrowParams<'a> {
    pub max_features: usize,
    pub max_depth: Option<usize>,
    /// Fixed candidate features, overriding per-node sampling.
    pub candidates: Option<&'a [usize]>,
}

/// `floor(sqrt(p))`, at least 1.
pub fn sqrt_features(p: usize) -> usize {
    ((p as f64).sqrt().floor() as usize).max(1)
}

/// Grows a variance-reduction tree on rows of `x` with positive `weight`.
///
/// For 0/1 targets the weighted variance is half the Gini impurity, so this is
/// CART classification; leaves then hold the weighted class-1 fraction. With
/// `hess` the leaves hold the Newton step `sum(w t) / sum(w h)` instead.
///
/// An impure node is split whenever some sampled feature is non-constant, even
/// when the best split leaves impurity unchanged, so unrestricted trees always
/// reach purity on data without contradictory duplicates.
pub(crate) fn grow<R: Rng + ?Sized>(
    x: ArrayView2<f64>,
    target: &[f64],
    hess: Option<&[f64]>,
    weight: &[f64],
    params: &GrowParams,
    rng: &mut R,
) -> Result<Tree> {
    let (m, p) = x.dim();
    if m == 0 || p == 0 {
        return Err(Error::EmptyData("training matrix has no rows or columns".into()));
    }
    if target.len() != m || weight.len() != m || hess.is_some_and(|h| h.len() != m) {
        return Err(Error::SizeMismatch {
            expected: m,
            actual: target.len(),
        });
    }
    if params.max_features == 0 || params.max_features > p {
        return Err(Error::param(format!("max_features {} outside 1..={p}", params.max_features)));
    }
    let idx: Vec<usize> = (0..m).filter(|&i| weight[i] > 0.0).collect();
    if idx.is_empty() {
        return Err(Error::EmptyData("no sample carries positive weight".into()));
    }
    let mut g = Grower {
        x,
        target,
        hess,
        weight,
        params,
        total_weight: idx.iter().map(|&i| weight[i]).sum(),
        importance: vec![0.0; p],
        order: (0..p).collect(),
        scratch: Vec::new(),
    };
    let root = g.node(idx, 0, rng);
    Ok(Tree {
        root,
        importance: g.importance,
    })
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    target: &'a [f64],
    hess: Option<&'a [f64]>,
    weight: &'a [f64],
    params: &'a GrowParams<'a>,
    total_weight: f64,
    importance: Vec<f64>,
    order: Vec<usize>,
    scratch: Vec<(f64, usize)>,
}

struct Best {
    cost: f64,
    feature: usize,
    threshold: f64,
}

impl Grower<'_> {
    fn node<R: Rng + ?Sized>(&mut self, idx: Vec<usize>, depth: usize, rng: &mut R) -> TreeNode {
        let (w, s, q) = self.sums(&idx);
        let leaf = TreeNode::Leaf { value: self.leaf_value(&idx, w, s) };
        let first = self.target[idx[0]];
        let pure = idx.iter().all(|&i| self.target[i] == first);
        if pure || self.params.max_depth.is_some_and(|d| depth >= d) {
            return leaf;
        }
        let parent = (q - s * s / w).max(0.0);
        let Some(best) = self.best_split(&idx, parent, rng) else {
            return leaf;
        };
        self.importance[best.feature] += (parent - best.cost).max(0.0) / self.total_weight;
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x[[i, best.feature]] <= best.threshold);
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.node(left, depth + 1, rng)),
            right: Box::new(self.node(right, depth + 1, rng)),
        }
    }

    fn sums(&self, idx: &[usize]) -> (f64, f64, f64) {
        idx.iter().fold((0.0, 0.0, 0.0), |(w, s, q), &i| {
            let (wi, ti) = (self.weight[i], self.target[i]);
            (w + wi, s + wi * ti, q + wi * ti * ti)
        })
    }

    fn leaf_value(&self, idx: &[usize], w: f64, s: f64) -> f64 {
        match self.hess {
            None => s / w,
            Some(h) => {
                let denom: f64 = idx.iter().map(|&i| self.weight[i] * h[i]).sum();
                if denom > 1e-300 {
                    s / denom
                } else {
                    0.0
                }
            }
        }
    }

    fn is_constant(&self, idx: &[usize], f: usize) -> bool {
        let v = self.x[[idx[0], f]];
        idx.iter().all(|&i| self.x[[i, f]] == v)
    }

    /// Candidate features in ascending index order.
    fn candidates<R: Rng + ?Sized>(&mut self, idx: &[usize], rng: &mut R) -> Vec<usize> {
        if let Some(fixed) = self.params.candidates {
            return fixed.iter().copied().filter(|&f| !self.is_constant(idx, f)).collect();
        }
        // visit features in random order until enough non-constant ones show up
        let p = self.order.len();
        let mut picked = Vec::with_capacity(self.params.max_features);
        for i in 0..p {
            let j = rng.random_range(i..p);
            self.order.swap(i, j);
            let f = self.order[i];
            if !self.is_constant(idx, f) {
                picked.push(f);
                if picked.len() == self.params.max_features {
                    break;
                }
            }
        }
        picked.sort_unstable();
        picked
    }

    fn best_split<R: Rng + ?Sized>(&mut self, idx: &[usize], parent: f64, rng: &mut R) -> Option<Best> {
        let features = self.candidates(idx, rng);
        let tol = 1e-12 * (1.0 + parent);
        let mut best: Option<Best> = None;
        let (w_all, s_all, q_all) = self.sums(idx);
        for f in features {
            let mut col = std::mem::take(&mut self.scratch);
            col.clear();
            col.extend(idx.iter().map(|&i| (self.x[[i, f]], i)));
            col.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (mut wl, mut sl, mut ql) = (0.0, 0.0, 0.0);
            for j in 0..col.len() - 1 {
                let i = col[j].1;
                let (wi, ti) = (self.weight[i], self.target[i]);
                wl += wi;
                sl += wi * ti;
                ql += wi * ti * ti;
                let (a, b) = (col[j].0, col[j + 1].0);
                if a == b {
                    continue;
                }
                let (wr, sr, qr) = (w_all - wl, s_all - sl, q_all - ql);
                let cost = (ql - sl * sl / wl).max(0.0) + (qr - sr * sr / wr).max(0.0);
                if best.as_ref().is_none_or(|b| cost < b.cost - tol) {
                    let mut threshold = a + (b - a) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(Best { cost, feature: f, threshold });
                }
            }
            self.scratch = col;
        }
        best
    }
}

/// Single classification tree on 0/1 labels with unit weights.
pub fn train_tree<R: Rng + ?Sized>(
    x: ArrayView2<f64>,
    y: &[bool],
    max_features: usize,
    rng: &mut R,
) -> Result<Tree> {
    let target: Vec<f64> = y.iter().map(|&b| f64::from(u8::from(b))).collect();
    let weight = vec![1.0; target.len()];
    let params = GrowParams {
        max_features,
        max_depth: None,
        candidates: None,
    };
    grow(x, &target, None, &weight, &params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn accuracy(t: &Tree, x: &Array2<f64>, y: &[bool]) -> f64 {
        let hits = x.rows().into_iter().zip(y).filter(|(r, &l)| (t.predict(r.as_slice().unwrap()) > 0.5) == l).count();
        hits as f64 / y.len() as f64
    }

    #[test]
    fn separable_one_feature() {
        let x = array![[-2.0], [-1.0], [-0.5], [0.0], [1.0], [3.0]];
        let y = [false, false, false, true, true, true];
        let t = train_tree(x.view(), &y, 1, &mut rng::from_seed(0)).unwrap();
        assert_eq!(t.root.depth(), 1);
        assert_eq!(accuracy(&t, &x, &y), 1.0);
        let TreeNode::Split { threshold, .. } = t.root else { panic!() };
        assert_eq!(threshold, -0.25);
        assert_eq!(t.root.leaf_probs(&[5.0]), [0.0, 1.0]);
    }

    #[test]
    fn constant_labels_give_a_leaf() {
        let x = array![[1.0, 2.0], [3.0, 4.0], [5.0, 0.0]];
        let t = train_tree(x.view(), &[true; 3], 2, &mut rng::from_seed(0)).unwrap();
        assert_eq!(t.root, TreeNode::Leaf { value: 1.0 });
        assert!(t.importance.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exact_xor_is_shattered() {
        // no single split lowers Gini here; growth must go on regardless
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [false, true, true, false];
        let t = train_tree(x.view(), &y, 2, &mut rng::from_seed(0)).unwrap();
        assert_eq!(accuracy(&t, &x, &y), 1.0);
        assert_eq!(t.root.num_leaves(), 4);
    }

    #[test]
    fn ties_go_to_lowest_feature() {
        // both features separate perfectly
        let x = array![[0.0, 10.0], [1.0, 11.0], [2.0, 12.0], [3.0, 13.0]];
        let y = [false, false, true, true];
        let t = train_tree(x.view(), &y, 2, &mut rng::from_seed(0)).unwrap();
        let TreeNode::Split { feature, threshold, .. } = t.root else { panic!() };
        assert_eq!((feature, threshold), (0, 1.5));
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = Array2::<f64>::zeros((0, 2));
        assert!(train_tree(x.view(), &[], 1, &mut rng::from_seed(0)).is_err());
        let x = array![[1.0, 2.0]];
        assert!(train_tree(x.view(), &[true], 3, &mut rng::from_seed(0)).is_err());
        assert!(train_tree(x.view(), &[true, false], 1, &mut rng::from_seed(0)).is_err());
    }

    #[test]
    fn newton_leaves_and_depth_limit() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let t = [1.0, 1.0, -1.0, -1.0];
        let h = [0.25, 0.25, 0.5, 0.5];
        let params = GrowParams { max_features: 1, max_depth: Some(1), candidates: None };
        let tree = grow(x.view(), &t, Some(&h), &[1.0; 4], &params, &mut rng::from_seed(0)).unwrap();
        assert_eq!(tree.predict(&[0.0]), 4.0);
        assert_eq!(tree.predict(&[3.0]), -2.0);
        let stump = GrowParams { max_features: 1, max_depth: Some(0), candidates: None };
        let leaf = grow(x.view(), &t, None, &[1.0; 4], &stump, &mut rng::from_seed(0)).unwrap();
        assert_eq!(leaf.root, TreeNode::Leaf { value: 0.0 });
    }

    proptest! {
        #[test]
        fn purity_on_consistent_data(seed in any::<u64>(), m in 2usize..80, p in 1usize..6) {
            let mut s = rng::from_seed(seed);
            // integer grid points with one label per distinct vector
            let mut rows: Vec<Vec<f64>> = (0..m).map(|_| (0..p).map(|_| f64::from(s.random_range(0..4u8))).collect()).collect();
            rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rows.dedup();
            let y: Vec<bool> = rows.iter().map(|_| s.random()).collect();
            let x = Array2::from_shape_vec((rows.len(), p), rows.concat()).unwrap();
            let maxf = s.random_range(1..=p);
            let t = train_tree(x.view(), &y, maxf, &mut s).unwrap();
            prop_assert_eq!(accuracy(&t, &x, &y), 1.0);
            prop_assert!(t.importance.iter().all(|&v| v >= 0.0));
        }
    }
}
