use rand_distr::{Distribution, StandardNormal};

use crate::rng::Rng;

/// Discrete Ornstein-Uhlenbeck process,
/// `n ← n + θ(μ − n) + σ·ξ` with `ξ ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct OuNoise {
    pub theta: f64,
    pub sigma: f64,
    pub mu: f64,
    state: Vec<f64>,
}

impl OuNoise {
    pub fn new(dim: usize, theta: f64, sigma: f64, mu: f64) -> Self {
        OuNoise {
            theta,
            sigma,
            mu,
            state: vec![mu; dim],
        }
    }

    pub fn reset(&mut self) {
        self.state.fill(self.mu);
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn sample(&mut self, rng: &mut Rng) -> &[f64] {
        for n in &mut self.state {
            let xi: f64 = StandardNormal.sample(rng);
            *n += self.theta * (self.mu - *n) + self.sigma * xi;
        }
        &self.state
    }
}
