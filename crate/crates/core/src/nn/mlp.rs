use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

static NEXT_VERSION: AtomicU64 = AtomicU64::new(1);

fn fresh_version() -> u64 {
    NEXT_VERSION.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputActivation {
    Identity,
    /// `scale * tanh(z)`, used to bound actor outputs.
    ScaledTanh(f64),
}

/// Weights `out × in` and bias `out` of one affine layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn zeros(input: usize, output: usize) -> Self {
        Dense {
            weights: Array2::zeros((output, input)),
            bias: Array1::zeros(output),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }
}

/// Per-layer gradients, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| Dense::zeros(l.input_dim(), l.output_dim()))
                .collect(),
        }
    }

    pub fn scale(&mut self, k: f64) {
        for l in &mut self.layers {
            l.weights *= k;
            l.bias *= k;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }

    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }
}

/// Intermediates of a forward pass, tied to the parameter version that
/// produced them.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    version: u64,
    /// Input to each layer; `inputs[0]` is the network input.
    inputs: Vec<Array2<f64>>,
    /// Pre-activation of each layer.
    pre: Vec<Array2<f64>>,
    output: Array2<f64>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        &self.output
    }
}

/// Fully connected network with a shared hidden activation.
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<Dense>,
    hidden: Activation,
    output: OutputActivation,
    version: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers && self.hidden == other.hidden && self.output == other.output
    }
}

impl Mlp {
    /// Weights and biases drawn uniformly from `±1/sqrt(fan_in)`.
    pub fn new(sizes: &[usize], hidden: Activation, output: OutputActivation, rng: &mut Rng) -> Result<Self> {
        Self::with_final_scale(sizes, hidden, output, 1.0, rng)
    }

    /// As [`Mlp::new`], with the last layer's initial parameters multiplied
    /// by `final_scale`.
    pub fn with_final_scale(
        sizes: &[usize],
        hidden: Activation,
        output: OutputActivation,
        final_scale: f64,
        rng: &mut Rng,
    ) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Config(format!("invalid layer sizes {sizes:?}")));
        }
        let n = sizes.len() - 1;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let bound = 1.0 / (w[0] as f64).sqrt() * if i + 1 == n { final_scale } else { 1.0 };
                let weights = Array2::from_shape_fn((w[1], w[0]), |_| rng.gen_range(-bound..=bound));
                let bias = Array1::from_shape_fn(w[1], |_| rng.gen_range(-bound..=bound));
                Dense { weights, bias }
            })
            .collect();
        Ok(Mlp {
            layers,
            hidden,
            output,
            version: fresh_version(),
        })
    }

    /// Builds a network from explicit layers.
    pub fn from_layers(layers: Vec<Dense>, hidden: Activation, output: OutputActivation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.output_dim() {
                return Err(Error::shape(l.output_dim(), l.bias.len(), "bias length"));
            }
            if i > 0 && layers[i - 1].output_dim() != l.input_dim() {
                return Err(Error::shape(layers[i - 1].output_dim(), l.input_dim(), "layer chaining"));
            }
        }
        Ok(Mlp {
            layers,
            hidden,
            output,
            version: fresh_version(),
        })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    /// Mutable access to the parameters; invalidates outstanding caches.
    pub fn layers_mut(&mut self) -> &mut [Dense] {
        self.version = fresh_version();
        &mut self.layers
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].input_dim()];
        s.extend(self.layers.iter().map(Dense::output_dim));
        s
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }

    /// Overwrites all parameters from a flat vector in [`Mlp::flatten`] order.
    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::shape(self.num_params(), flat.len(), "flat parameter vector"));
        }
        let mut it = flat.iter().copied();
        for l in self.layers_mut() {
            l.weights.iter_mut().for_each(|w| *w = it.next().unwrap());
            l.bias.iter_mut().for_each(|b| *b = it.next().unwrap());
        }
        Ok(())
    }

    pub fn same_architecture(&self, other: &Mlp) -> bool {
        self.sizes() == other.sizes() && self.hidden == other.hidden && self.output == other.output
    }

    /// Batched forward pass; rows of `input` are samples.
    pub fn forward_batch(&self, input: ArrayView2<'_, f64>) -> Result<(Array2<f64>, ForwardCache)> {
        if input.ncols() != self.input_dim() {
            return Err(Error::shape(self.input_dim(), input.ncols(), "network input"));
        }
        let n = self.layers.len();
        let mut inputs = Vec::with_capacity(n);
        let mut pre = Vec::with_capacity(n);
        let mut a = input.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = a.dot(&layer.weights.t()) + &layer.bias;
            let next = if i + 1 < n {
                let act = self.hidden;
                z.mapv(|v| act.apply(v))
            } else {
                match self.output {
                    OutputActivation::Identity => z.clone(),
                    OutputActivation::ScaledTanh(s) => z.mapv(|v| s * v.tanh()),
                }
            };
            inputs.push(a);
            pre.push(z);
            a = next;
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite network output".into()));
        }
        let cache = ForwardCache {
            version: self.version,
            inputs,
            pre,
            output: a.clone(),
        };
        Ok((a, cache))
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        let view = ArrayView2::from_shape((1, input.len()), input)
            .map_err(|_| Error::shape(self.input_dim(), input.len(), "network input"))?;
        let (out, cache) = self.forward_batch(view)?;
        Ok((out.into_raw_vec_and_offset().0, cache))
    }

    /// Forward pass without keeping intermediates.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(input)?.0)
    }

    /// Gradients of `sum(output ⊙ output_grad)` with respect to every
    /// parameter and to the input.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_grad: ArrayView2<'_, f64>,
    ) -> Result<(Gradients, Array2<f64>)> {
        if cache.version != self.version {
            return Err(Error::Integrity(
                "forward cache was produced by different parameters".into(),
            ));
        }
        if output_grad.dim() != cache.output.dim() {
            return Err(Error::shape(cache.output.len(), output_grad.len(), "output gradient"));
        }
        let n = self.layers.len();
        let mut grads = Vec::with_capacity(n);
        let mut dz = match self.output {
            OutputActivation::Identity => output_grad.to_owned(),
            OutputActivation::ScaledTanh(s) => {
                let mut d = output_grad.to_owned();
                d.zip_mut_with(&cache.pre[n - 1], |g, &z| {
                    let t = z.tanh();
                    *g *= s * (1.0 - t * t);
                });
                d
            }
        };
        for i in (0..n).rev() {
            let layer = &self.layers[i];
            let weights = dz.t().dot(&cache.inputs[i]);
            let bias = dz.sum_axis(Axis(0));
            grads.push(Dense { weights, bias });
            let mut da = dz.dot(&layer.weights);
            if i > 0 {
                let act = self.hidden;
                ndarray::Zip::from(&mut da)
                    .and(&cache.pre[i - 1])
                    .and(&cache.inputs[i])
                    .for_each(|g, &z, &a| *g *= act.derivative(z, a));
            }
            dz = da;
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, dz))
    }

    /// `target ← tau·online + (1 − tau)·target`, elementwise.
    pub fn soft_update_from(&mut self, online: &Mlp, tau: f64) -> Result<()> {
        if !self.same_architecture(online) {
            return Err(Error::Config("soft update between different architectures".into()));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Config(format!("tau must lie in [0,1], got {tau}")));
        }
        for (t, o) in self.layers_mut().iter_mut().zip(&online.layers) {
            t.weights.zip_mut_with(&o.weights, |t, &o| *t = tau * o + (1.0 - tau) * *t);
            t.bias.zip_mut_with(&o.bias, |t, &o| *t = tau * o + (1.0 - tau) * *t);
        }
        Ok(())
    }

    /// Copies every parameter of `online` into `self`.
    pub fn copy_from(&mut self, online: &Mlp) -> Result<()> {
        if !self.same_architecture(online) {
            return Err(Error::Config("hard copy between different architectures".into()));
        }
        self.layers.clone_from(&online.layers);
        self.version = fresh_version();
        Ok(())
    }
}

fn flatten_layers(layers: &[Dense]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.weights.iter());
        out.extend(l.bias.iter());
    }
    out
}

/// Free-function form of [`Mlp::soft_update_from`].
pub fn soft_update(target: &mut Mlp, online: &Mlp, tau: f64) -> Result<()> {
    target.soft_update_from(online, tau)
}

/// Free-function form of [`Mlp::copy_from`].
pub fn hard_copy(target: &mut Mlp, online: &Mlp) -> Result<()> {
    target.copy_from(online)
}
