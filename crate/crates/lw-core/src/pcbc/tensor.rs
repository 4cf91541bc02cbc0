//! Minimal dense tensor with an optional gradient buffer.

use serde::{Deserialize, Serialize};

use crate::rng::CounterRng;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: serde::Serialize",
    deserialize = "S: serde::de::DeserializeOwned"
))]
pub struct Tensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
    #[serde(skip)]
    grad: Option<Vec<S>>,
}

impl<S: Real> Tensor<S> {
    pub fn zeros(shape: Vec<usize>) -> Self {
        let numel = shape.iter().product();
        Self {
            shape,
            data: vec![S::zero(); numel],
            grad: None,
        }
    }

    pub fn from_data(shape: Vec<usize>, data: Vec<S>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len());
        Self {
            shape,
            data,
            grad: None,
        }
    }

    /// Fill with uniform draws in `[-bound, bound]`.
    pub fn uniform(shape: Vec<usize>, bound: f64, rng: &mut CounterRng) -> Self {
        let numel: usize = shape.iter().product();
        let lo = S::from_f64(-bound);
        let hi = S::from_f64(bound);
        let data = (0..numel).map(|_| rng.uniform(lo, hi)).collect();
        Self {
            shape,
            data,
            grad: None,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    /// Zero (allocating on first use) the gradient buffer.
    pub fn reset_grad(&mut self) {
        match &mut self.grad {
            Some(g) => g.iter_mut().for_each(|v| *v = S::zero()),
            None => self.grad = Some(vec![S::zero(); self.data.len()]),
        }
    }

    pub fn grad(&self) -> Option<&[S]> {
        self.grad.as_deref()
    }

    /// Gradient buffer, allocating it zeroed if absent.
    pub fn grad_mut(&mut self) -> &mut [S] {
        if self.grad.is_none() {
            self.grad = Some(vec![S::zero(); self.data.len()]);
        }
        self.grad.as_deref_mut().unwrap()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn shape_and_numel_agree() {
        let t: Tensor<f64> = Tensor::zeros(vec![3, 4]);
        assert_eq!(t.numel(), 12);
        assert_eq!(t.shape(), &[3, 4]);
    }

    #[test]
    fn grad_buffer_matches_shape() {
        let mut t: Tensor<f64> = Tensor::zeros(vec![2, 5]);
        t.reset_grad();
        assert_eq!(t.grad().unwrap().len(), t.numel());
    }

    #[test]
    fn uniform_respects_bound() {
        let mut rng = CounterRng::new(1, stream::TEST);
        let t: Tensor<f64> = Tensor::uniform(vec![64], 0.125, &mut rng);
        assert!(t.data().iter().all(|v| v.abs() <= 0.125));
        assert!(t.data().iter().any(|v| *v != 0.0));
    }
}
