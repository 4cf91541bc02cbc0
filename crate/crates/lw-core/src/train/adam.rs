//! Adaptive-moment optimizer over the policy parameter blocks.

use crate::pcbc::PolicyParams;
use crate::scalar::Real;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

pub struct Adam<S> {
    lr: f64,
    step: u64,
    first: Vec<Vec<S>>,
    second: Vec<Vec<S>>,
}

impl<S: Real> Adam<S> {
    pub fn new(params: &PolicyParams<S>, lr: f64) -> Self {
        let zeros: Vec<Vec<S>> = params
            .blocks()
            .iter()
            .map(|(_, t)| vec![S::zero(); t.numel()])
            .collect();
        Self {
            lr,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    /// One update from the gradients currently accumulated in the blocks.
    pub fn update(&mut self, params: &mut PolicyParams<S>) {
        self.step += 1;
        let b1 = S::from_f64(BETA1);
        let b2 = S::from_f64(BETA2);
        let eps = S::from_f64(EPSILON);
        let one = S::one();
        let correction1 = S::from_f64(1.0 - BETA1.powi(self.step as i32));
        let correction2 = S::from_f64(1.0 - BETA2.powi(self.step as i32));
        let lr = S::from_f64(self.lr);

        for (block_idx, (_, tensor)) in params.blocks_mut().into_iter().enumerate() {
            let m = &mut self.first[block_idx];
            let v = &mut self.second[block_idx];
            let grads: Vec<S> = tensor.grad().expect("gradients accumulated").to_vec();
            let data = tensor.data_mut();
            for i in 0..data.len() {
                let g = grads[i];
                m[i] = b1 * m[i] + (one - b1) * g;
                v[i] = b2 * v[i] + (one - b2) * g * g;
                let m_hat = m[i] / correction1;
                let v_hat = v[i] / correction2;
                data[i] = data[i] - lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}
