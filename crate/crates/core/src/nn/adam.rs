use super::dense::{Dense, Gradient};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 0.01, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// Bias-corrected Adam with per-layer moment buffers.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub config: AdamConfig,
    step: u32,
    first: Vec<Gradient>,
    second: Vec<Gradient>,
}

impl AdamState {
    pub fn new(config: AdamConfig, layers: &[Dense]) -> Self {
        let zeros: Vec<Gradient> = layers.iter().map(Gradient::zeros_like).collect();
        Self { config, step: 0, first: zeros.clone(), second: zeros }
    }

    pub fn steps(&self) -> u32 {
        self.step
    }

    pub fn step(&mut self, layers: &mut [Dense], grads: &[Gradient]) {
        assert_eq!(layers.len(), grads.len(), "one gradient per layer");
        assert_eq!(layers.len(), self.first.len(), "optimizer built for a different model");
        self.step += 1;
        let AdamConfig { learning_rate, beta1, beta2, epsilon } = self.config;
        let correct1 = 1.0 - beta1.powi(self.step as i32);
        let correct2 = 1.0 - beta2.powi(self.step as i32);

        let update = |param: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / correct1;
            let v_hat = *v / correct2;
            *param -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        };

        for (((layer, grad), m), v) in
            layers.iter_mut().zip(grads).zip(&mut self.first).zip(&mut self.second)
        {
            ndarray::Zip::from(&mut layer.weights)
                .and(&grad.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .for_each(|p, &g, m, v| update(p, g, m, v));
            ndarray::Zip::from(&mut layer.bias)
                .and(&grad.bias)
                .and(&mut m.bias)
                .and(&mut v.bias)
                .for_each(|p, &g, m, v| update(p, g, m, v));
        }
    }
}
