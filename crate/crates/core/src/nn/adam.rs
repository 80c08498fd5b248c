use super::mlp::{Gradients, Mlp};
use crate::error::{Error, Result};

/// Adam optimizer state for one network.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        let n = net.num_params();
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one Adam update of `grads` (a gradient to descend) to `net`.
    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::Numerical("non-finite gradient".into()));
        }
        if net.num_params() != self.m.len() {
            return Err(Error::shape(self.m.len(), net.num_params(), "optimizer state"));
        }
        if grads.layers.len() != net.layers().len()
            || grads
                .layers
                .iter()
                .zip(net.layers())
                .any(|(g, l)| g.weights.dim() != l.weights.dim() || g.bias.len() != l.bias.len())
        {
            return Err(Error::Config("gradient shapes do not match network".into()));
        }
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let mut k = 0;
        let m = &mut self.m;
        let v = &mut self.v;
        let mut update = |p: &mut f64, g: f64| {
            m[k] = b1 * m[k] + (1.0 - b1) * g;
            v[k] = b2 * v[k] + (1.0 - b2) * g * g;
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
            k += 1;
        };
        for (layer, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
            for (p, &gv) in layer.weights.iter_mut().zip(g.weights.iter()) {
                update(p, gv);
            }
            for (p, &gv) in layer.bias.iter_mut().zip(g.bias.iter()) {
                update(p, gv);
            }
        }
        Ok(())
    }
}

/// Free-function form of [`AdamState::step`].
pub fn adam_step(net: &mut Mlp, grads: &Gradients, state: &mut AdamState) -> Result<()> {
    state.step(net, grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, OutputActivation};
    use crate::rng::seeded;

    fn net() -> Mlp {
        Mlp::new(&[2, 3, 1], Activation::Tanh, OutputActivation::Identity, &mut seeded(0)).unwrap()
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut n = net();
        let before = n.flatten();
        let mut adam = AdamState::new(&n, 1e-3);
        let g = Gradients::zeros_like(&n);
        for _ in 0..5 {
            adam.step(&mut n, &g).unwrap();
        }
        assert_eq!(n.flatten(), before);
        assert_eq!(adam.steps(), 5);
    }

    // Bias-corrected first step: m_hat = g, v_hat = g², so the move is
    // -lr·g/(|g| + eps) ≈ -lr·sign(g).
    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut n = net();
        let before = n.flatten();
        let mut adam = AdamState::new(&n, 1e-3);
        let mut g = Gradients::zeros_like(&n);
        for l in &mut g.layers {
            l.weights.fill(0.7);
            l.bias.fill(-3.0);
        }
        adam.step(&mut n, &g).unwrap();
        let after = n.flatten();
        let gflat = g.flatten();
        for ((b, a), gv) in before.iter().zip(&after).zip(&gflat) {
            let expected = -1e-3 * gv / (gv.abs() + 1e-8);
            assert!((a - b - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn nan_gradient_rejected() {
        let mut n = net();
        let mut adam = AdamState::new(&n, 1e-3);
        let mut g = Gradients::zeros_like(&n);
        g.layers[0].bias[0] = f64::NAN;
        assert!(matches!(adam.step(&mut n, &g), Err(Error::Numerical(_))));
        assert_eq!(adam.steps(), 0);
    }
}
