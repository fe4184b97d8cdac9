use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Hidden layers, each followed by batch normalization, ReLU and dropout.
const HIDDEN: usize = 3;
const BN_EPS: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Sgd,
    Adam,
}

fn default_hidden() -> usize {
    100
}
fn default_epochs() -> usize {
    35
}
fn default_batch() -> usize {
    256
}
fn default_lr() -> f64 {
    0.01
}
fn default_dropout() -> f64 {
    0.25
}
fn default_momentum() -> f64 {
    0.9
}
// with a few thousand samples, plain SGD at the default rate gets too few updates
fn default_optimizer() -> Optimizer {
    Optimizer::Adam
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_dropout")]
    pub dropout: f64,
    /// Weight kept by the running normalization statistics at each update.
    #[serde(default = "default_momentum")]
    pub bn_momentum: f64,
    #[serde(default = "default_optimizer")]
    pub optimizer: Optimizer,
    /// Standardize inputs with training-set mean and deviation.
    #[serde(default = "default_true")]
    pub standardize: bool,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            hidden: default_hidden(),
            epochs: default_epochs(),
            batch_size: default_batch(),
            learning_rate: default_lr(),
            dropout: default_dropout(),
            bn_momentum: default_momentum(),
            optimizer: default_optimizer(),
            standardize: true,
        }
    }
}

impl NetConfig {
    fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 {
            return Err(Error::param("hidden width and batch size must be positive"));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::param("learning rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::param(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if !(0.0..=1.0).contains(&self.bn_momentum) {
            return Err(Error::param("bn_momentum outside [0, 1]"));
        }
        Ok(())
    }
}

/// Offsets of each parameter block inside the flat parameter vector.
#[derive(Clone, Debug)]
struct Layout {
    weight: [usize; HIDDEN + 1],
    bias: [usize; HIDDEN + 1],
    gamma: [usize; HIDDEN],
    beta: [usize; HIDDEN],
    total: usize,
}

impl Layout {
    fn new(dims: &[usize]) -> Layout {
        let mut off = 0;
        let mut take = |len: usize| {
            let at = off;
            off += len;
            at
        };
        let mut weight = [0; HIDDEN + 1];
        let mut bias = [0; HIDDEN + 1];
        let mut gamma = [0; HIDDEN];
        let mut beta = [0; HIDDEN];
        for l in 0..=HIDDEN {
            weight[l] = take(dims[l + 1] * dims[l]);
            bias[l] = take(dims[l + 1]);
            if l < HIDDEN {
                gamma[l] = take(dims[l + 1]);
                beta[l] = take(dims[l + 1]);
            }
        }
        Layout {
            weight,
            bias,
            gamma,
            beta,
            total: off,
        }
    }
}

/// Four affine layers `d -> h -> h -> h -> 2` with batch normalization on the
/// hidden layers. Stored in inference mode.
#[derive(Clone, Debug, PartialEq)]
pub struct NetModel {
    /// Layer widths, input first.
    pub dims: Vec<usize>,
    pub params: Vec<f64>,
    /// Running mean then running variance for each hidden layer.
    pub running: Vec<f64>,
    pub input_mean: Vec<f64>,
    pub input_scale: Vec<f64>,
    pub dropout: f64,
}

/// Whether hidden normalization uses the current batch or running statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    Batch,
    Running,
}

struct Cache {
    input: Array2<f64>,
    xhat: Array2<f64>,
    inv_std: Array1<f64>,
    active: Array2<f64>,
    mask: Option<Array2<f64>>,
}

struct Pass {
    logits: Array2<f64>,
    caches: Vec<Cache>,
    stats: Vec<(Array1<f64>, Array1<f64>)>,
}

impl NetModel {
    /// Fresh network: weights and biases uniform in `+-1/sqrt(fan_in)`, unit
    /// scales, zero shifts, identity running statistics, identity inputs.
    pub fn init<R: Rng + ?Sized>(input: usize, hidden: usize, dropout: f64, rng: &mut R) -> NetModel {
        let dims = vec![input, hidden, hidden, hidden, 2];
        let lay = Layout::new(&dims);
        let mut params = vec![0.0; lay.total];
        for l in 0..=HIDDEN {
            let bound = 1.0 / (dims[l] as f64).sqrt();
            let (w, b) = (lay.weight[l], lay.bias[l]);
            let end = b + dims[l + 1];
            for v in &mut params[w..end] {
                *v = rng.random_range(-bound..bound);
            }
            if l < HIDDEN {
                params[lay.gamma[l]..lay.gamma[l] + dims[l + 1]].fill(1.0);
            }
        }
        let mut running = Vec::with_capacity(2 * HIDDEN * hidden);
        for _ in 0..HIDDEN {
            running.extend(std::iter::repeat_n(0.0, hidden));
            running.extend(std::iter::repeat_n(1.0, hidden));
        }
        NetModel {
            dims,
            params,
            running,
            input_mean: vec![0.0; input],
            input_scale: vec![1.0; input],
            dropout,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.dims[0]
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.dims)
    }

    fn weight(&self, lay: &Layout, l: usize) -> ArrayView2<'_, f64> {
        let (out, inp) = (self.dims[l + 1], self.dims[l]);
        ArrayView2::from_shape((out, inp), &self.params[lay.weight[l]..lay.weight[l] + out * inp]).expect("layout")
    }

    fn block(&self, at: usize, len: usize) -> ArrayView1<'_, f64> {
        ArrayView1::from(&self.params[at..at + len])
    }

    fn running_stats(&self, l: usize) -> (ArrayView1<'_, f64>, ArrayView1<'_, f64>) {
        let h = self.dims[1];
        let at = 2 * l * h;
        (ArrayView1::from(&self.running[at..at + h]), ArrayView1::from(&self.running[at + h..at + 2 * h]))
    }

    fn check_width(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.num_inputs() {
            return Err(Error::SizeMismatch {
                expected: self.num_inputs(),
                actual: x.ncols(),
            });
        }
        Ok(())
    }

    fn standardize(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mean = ArrayView1::from(&self.input_mean);
        let scale = ArrayView1::from(&self.input_scale);
        (&x - &mean) / scale
    }

    fn forward(&self, x: Array2<f64>, mode: NormMode, mut dropout: Option<&mut Stream>) -> Pass {
        let lay = self.layout();
        let mut h = x;
        let mut caches = Vec::with_capacity(HIDDEN);
        let mut stats = Vec::new();
        for l in 0..HIDDEN {
            let width = self.dims[l + 1];
            let z = h.dot(&self.weight(&lay, l).t()) + self.block(lay.bias[l], width);
            let (mean, var) = match mode {
                NormMode::Batch => {
                    let mean = z.mean_axis(Axis(0)).expect("non-empty batch");
                    let var = (&z - &mean).mapv(|v| v * v).mean_axis(Axis(0)).expect("non-empty batch");
                    (mean, var)
                }
                NormMode::Running => {
                    let (m, v) = self.running_stats(l);
                    (m.to_owned(), v.to_owned())
                }
            };
            let inv_std = var.mapv(|v| 1.0 / (v + BN_EPS).sqrt());
            let xhat = (&z - &mean) * &inv_std;
            let pre = &xhat * &self.block(lay.gamma[l], width) + self.block(lay.beta[l], width);
            let active = pre.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
            let mut out = &pre * &active;
            let mask = dropout.as_deref_mut().filter(|_| self.dropout > 0.0).map(|s| {
                let keep = 1.0 / (1.0 - self.dropout);
                Array2::from_shape_fn(out.dim(), |_| if s.random::<f64>() < self.dropout { 0.0 } else { keep })
            });
            if let Some(mask) = &mask {
                out *= mask;
            }
            if mode == NormMode::Batch {
                stats.push((mean, var));
            }
            caches.push(Cache {
                input: std::mem::replace(&mut h, out),
                xhat,
                inv_std,
                active,
                mask,
            });
        }
        let logits = h.dot(&self.weight(&lay, HIDDEN).t()) + self.block(lay.bias[HIDDEN], 2);
        caches.push(Cache {
            input: h,
            xhat: Array2::zeros((0, 0)),
            inv_std: Array1::zeros(0),
            active: Array2::zeros((0, 0)),
            mask: None,
        });
        Pass { logits, caches, stats }
    }

    /// Mean cross-entropy of the pass and, optionally, its gradient.
    fn backward(&self, pass: &Pass, y: &[bool], mode: NormMode, want_grad: bool) -> (f64, Option<Vec<f64>>) {
        let m = y.len() as f64;
        let mut loss = 0.0;
        let mut dlogits = Array2::zeros(pass.logits.dim());
        for (i, &label) in y.iter().enumerate() {
            let z = pass.logits[[i, 1]] - pass.logits[[i, 0]];
            let p1 = sigmoid(z);
            let t = f64::from(u8::from(label));
            loss += if label { softplus(-z) } else { softplus(z) };
            dlogits[[i, 1]] = (p1 - t) / m;
            dlogits[[i, 0]] = -(p1 - t) / m;
        }
        loss /= m;
        if !want_grad {
            return (loss, None);
        }
        let lay = self.layout();
        let mut grad = vec![0.0; lay.total];
        let mut put = |at: usize, values: &mut dyn Iterator<Item = f64>| {
            for (g, v) in grad[at..].iter_mut().zip(values) {
                *g = v;
            }
        };
        let top = &pass.caches[HIDDEN];
        put(lay.weight[HIDDEN], &mut dlogits.t().dot(&top.input).into_iter());
        put(lay.bias[HIDDEN], &mut dlogits.sum_axis(Axis(0)).into_iter());
        let mut dh = dlogits.dot(&self.weight(&lay, HIDDEN));
        for l in (0..HIDDEN).rev() {
            let c = &pass.caches[l];
            let width = self.dims[l + 1];
            if let Some(mask) = &c.mask {
                dh *= mask;
            }
            let dy = &dh * &c.active;
            put(lay.gamma[l], &mut (&dy * &c.xhat).sum_axis(Axis(0)).into_iter());
            put(lay.beta[l], &mut dy.sum_axis(Axis(0)).into_iter());
            let dxhat = &dy * &self.block(lay.gamma[l], width);
            let dz = match mode {
                NormMode::Batch => {
                    let sum = dxhat.sum_axis(Axis(0));
                    let dot = (&dxhat * &c.xhat).sum_axis(Axis(0));
                    let centered = &dxhat * m - &sum - &c.xhat * &dot;
                    centered * &(&c.inv_std / m)
                }
                NormMode::Running => &dxhat * &c.inv_std,
            };
            put(lay.weight[l], &mut dz.t().dot(&c.input).into_iter());
            put(lay.bias[l], &mut dz.sum_axis(Axis(0)).into_iter());
            if l > 0 {
                dh = dz.dot(&self.weight(&lay, l));
            }
        }
        (loss, Some(grad))
    }

    /// Loss and gradient with dropout off, inputs standardized with the
    /// model's own statistics.
    pub fn loss_and_gradient(&self, x: ArrayView2<f64>, y: &[bool], mode: NormMode) -> Result<(f64, Vec<f64>)> {
        self.check_rows(&x, y)?;
        let pass = self.forward(self.standardize(x), mode, None);
        let (loss, grad) = self.backward(&pass, y, mode, true);
        Ok((loss, grad.expect("requested")))
    }

    pub fn loss(&self, x: ArrayView2<f64>, y: &[bool], mode: NormMode) -> Result<f64> {
        self.check_rows(&x, y)?;
        let pass = self.forward(self.standardize(x), mode, None);
        Ok(self.backward(&pass, y, mode, false).0)
    }

    fn check_rows(&self, x: &ArrayView2<f64>, y: &[bool]) -> Result<()> {
        self.check_width(x)?;
        if x.nrows() != y.len() || y.is_empty() {
            return Err(Error::SizeMismatch {
                expected: x.nrows(),
                actual: y.len(),
            });
        }
        Ok(())
    }

    pub fn predict_proba_rows(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.check_width(&x)?;
        let pass = self.forward(self.standardize(x), NormMode::Running, None);
        Ok(pass
            .logits
            .rows()
            .into_iter()
            .map(|r| sigmoid(r[1] - r[0]))
            .collect())
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        let row = ArrayView2::from_shape((1, x.len()), x).map_err(|e| Error::param(e.to_string()))?;
        Ok(self.predict_proba_rows(row)?[0])
    }

    /// Flat little-endian `f64` image: parameters, running statistics, input
    /// means, input scales.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        [&self.params, &self.running, &self.input_mean, &self.input_scale]
            .into_iter()
            .flat_map(|v| v.iter().flat_map(|x| x.to_le_bytes()))
            .collect()
    }

    pub fn from_le_bytes(dims: Vec<usize>, dropout: f64, bytes: &[u8]) -> Result<NetModel> {
        if dims.len() != HIDDEN + 2 || dims[HIDDEN + 1] != 2 || dims[1..=HIDDEN].iter().any(|&h| h != dims[1]) {
            return Err(Error::Parse(format!("unexpected layer widths {dims:?}")));
        }
        let total = Layout::new(&dims).total;
        let run = 2 * HIDDEN * dims[1];
        let d = dims[0];
        let want = total + run + 2 * d;
        if bytes.len() != 8 * want {
            return Err(Error::SizeMismatch {
                expected: 8 * want,
                actual: bytes.len(),
            });
        }
        let values: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(NetModel {
            params: values[..total].to_vec(),
            running: values[total..total + run].to_vec(),
            input_mean: values[total + run..total + run + d].to_vec(),
            input_scale: values[total + run + d..].to_vec(),
            dims,
            dropout,
        })
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Minibatch training of a fresh network. Initialization draws from stream
/// `(seed, 0)`, shuffling and dropout from `(seed, 1)`. Trailing batches of a
/// single row are skipped since batch statistics need two rows.
pub fn train_net(x: ArrayView2<f64>, y: &[bool], cfg: &NetConfig, seed: u64) -> Result<NetModel> {
    cfg.validate()?;
    let (m, d) = x.dim();
    if y.len() != m {
        return Err(Error::SizeMismatch { expected: m, actual: y.len() });
    }
    if m < 2 || d == 0 {
        return Err(Error::EmptyData("network training needs at least two rows and one column".into()));
    }
    let mut net = NetModel::init(d, cfg.hidden, cfg.dropout, &mut rng::stream(seed, 0));
    if cfg.standardize {
        let mean = x.mean_axis(Axis(0)).expect("rows");
        let std = x.var_axis(Axis(0), 0.0).mapv(f64::sqrt);
        net.input_mean = mean.to_vec();
        net.input_scale = std.iter().map(|&s| if s > 1e-12 { s } else { 1.0 }).collect();
    }
    let xs = net.standardize(x);
    let mut s = rng::stream(seed, 1);
    let mut order: Vec<usize> = (0..m).collect();
    let (mut first, mut second) = (vec![0.0; net.params.len()], vec![0.0; net.params.len()]);
    let mut step = 0;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut s);
        for chunk in order.chunks(cfg.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            let xb = xs.select(Axis(0), chunk);
            let yb: Vec<bool> = chunk.iter().map(|&i| y[i]).collect();
            let pass = net.forward(xb, NormMode::Batch, Some(&mut s));
            let (_, grad) = net.backward(&pass, &yb, NormMode::Batch, true);
            let grad = grad.expect("requested");
            update_running(&mut net, &pass.stats, chunk.len(), cfg.bn_momentum);
            step += 1;
            match cfg.optimizer {
                Optimizer::Sgd => {
                    for (p, g) in net.params.iter_mut().zip(&grad) {
                        *p -= cfg.learning_rate * g;
                    }
                }
                Optimizer::Adam => {
                    let (b1, b2) = (0.9f64, 0.999f64);
                    let c1 = 1.0 - b1.powi(step);
                    let c2 = 1.0 - b2.powi(step);
                    for i in 0..grad.len() {
                        first[i] = b1 * first[i] + (1.0 - b1) * grad[i];
                        second[i] = b2 * second[i] + (1.0 - b2) * grad[i] * grad[i];
                        net.params[i] -= cfg.learning_rate * (first[i] / c1) / ((second[i] / c2).sqrt() + 1e-8);
                    }
                }
            }
        }
    }
    Ok(net)
}

fn update_running(net: &mut NetModel, stats: &[(Array1<f64>, Array1<f64>)], batch: usize, momentum: f64) {
    let h = net.dims[1];
    let unbias = batch as f64 / (batch as f64 - 1.0);
    for (l, (mean, var)) in stats.iter().enumerate() {
        let at = 2 * l * h;
        let mut rm = ndarray::ArrayViewMut1::from(&mut net.running[at..at + h]);
        rm.zip_mut_with(mean, |r, &b| *r = momentum * *r + (1.0 - momentum) * b);
        let mut rv = ndarray::ArrayViewMut1::from(&mut net.running[at + h..at + 2 * h]);
        rv.zip_mut_with(var, |r, &b| *r = momentum * *r + (1.0 - momentum) * b * unbias);
    }
}

/// Largest relative gap `|a - n| / max(|a|, |n|, floor)` between backprop
/// gradients `a` and central differences `n` with step `h`.
pub fn gradient_check(net: &NetModel, x: ArrayView2<f64>, y: &[bool], mode: NormMode, h: f64) -> Result<f64> {
    let (_, analytic) = net.loss_and_gradient(x, y, mode)?;
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let orig = probe.params[i];
        probe.params[i] = orig + h;
        let up = probe.loss(x, y, mode)?;
        probe.params[i] = orig - h;
        let down = probe.loss(x, y, mode)?;
        probe.params[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let scale = a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((a - numeric).abs() / scale);
    }
    Ok(worst)
}
