use serde::{Deserialize, Serialize};

/// Source of the gradient fed to ADAM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    /// Exact adjoint gradient, whatever the cost mode; only the recorded cost is sampled.
    #[default]
    Adjoint,
    /// Two-point parameter shift of the cost, each evaluation in the objective's mode.
    ParameterShift,
}

/// ADAM hyperparameters and the sliding-window stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    pub max_iterations: usize,
    /// Number of trailing iterations inspected by the stopping rule.
    pub convergence_window: usize,
    /// Stop once the best cost improved by less than this over the window.
    pub convergence_band: f64,
    pub gradient: GradientMode,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps_adam: 1e-8,
            max_iterations: 20_000,
            convergence_window: 2000,
            convergence_band: 1.5e-2,
            gradient: GradientMode::Adjoint,
        }
    }
}

impl OptimizerConfig {
    /// True when the last `convergence_window` values span less than the band.
    pub fn has_converged(&self, costs: &[f64]) -> bool {
        let w = self.convergence_window.max(1);
        if costs.len() < w {
            return false;
        }
        let tail = &costs[costs.len() - w..];
        let (lo, hi) = tail
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
                (lo.min(c), hi.max(c))
            });
        hi - lo < self.convergence_band
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    config: OptimizerConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(config: OptimizerConfig, n_params: usize) -> Self {
        Self {
            config,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        let c = &self.config;
        self.t += 1;
        let bc1 = 1.0 - c.beta1.powi(self.t);
        let bc2 = 1.0 - c.beta2.powi(self.t);
        for i in 0..theta.len() {
            self.m[i] = c.beta1 * self.m[i] + (1.0 - c.beta1) * grad[i];
            self.v[i] = c.beta2 * self.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            theta[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.eps_adam);
        }
    }
}
