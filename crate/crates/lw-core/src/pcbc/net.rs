//! The action decoder: a small tanh MLP with hand-written reverse-mode
//! gradients. Forward passes record the activations needed to run the chain
//! rule backwards; `backward` accumulates parameter gradients and returns
//! the gradient with respect to the input.

use serde::{Deserialize, Serialize};

use crate::pcbc::tensor::Tensor;
use crate::rng::CounterRng;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: serde::Serialize",
    deserialize = "S: serde::de::DeserializeOwned"
))]
pub struct Linear<S> {
    pub w: Tensor<S>,
    pub b: Tensor<S>,
}

impl<S: Real> Linear<S> {
    fn new(in_dim: usize, out_dim: usize, rng: &mut CounterRng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        Self {
            w: Tensor::uniform(vec![in_dim, out_dim], bound, rng),
            b: Tensor::zeros(vec![out_dim]),
        }
    }

    fn in_dim(&self) -> usize {
        self.w.shape()[0]
    }

    fn out_dim(&self) -> usize {
        self.w.shape()[1]
    }

    /// y = tanh(x W + b), written into `out`.
    fn forward_tanh(&self, x: &[S], out: &mut [S]) {
        let (in_dim, out_dim) = (self.in_dim(), self.out_dim());
        debug_assert_eq!(x.len(), in_dim);
        debug_assert_eq!(out.len(), out_dim);
        let w = self.w.data();
        out.copy_from_slice(self.b.data());
        for (i, xi) in x.iter().enumerate() {
            let row = &w[i * out_dim..(i + 1) * out_dim];
            for (o, wio) in out.iter_mut().zip(row) {
                *o = *o + *xi * *wio;
            }
        }
        for o in out.iter_mut() {
            *o = o.tanh();
        }
    }

    /// Backprop through y = tanh(x W + b): `dy` is d(loss)/dy, `y` the
    /// activation from the forward pass. Accumulates dW and db, writes
    /// d(loss)/dx into `dx`.
    fn backward_tanh(&mut self, x: &[S], y: &[S], dy: &[S], dx: &mut [S]) {
        let (in_dim, out_dim) = (self.in_dim(), self.out_dim());
        let one = S::one();
        // d(pre-activation) = dy * (1 - y^2)
        let dpre: Vec<S> = dy
            .iter()
            .zip(y)
            .map(|(g, yv)| *g * (one - *yv * *yv))
            .collect();

        let gb = self.b.grad_mut();
        for (g, d) in gb.iter_mut().zip(&dpre) {
            *g = *g + *d;
        }
        let gw = self.w.grad_mut();
        for (i, xi) in x.iter().enumerate() {
            let row = &mut gw[i * out_dim..(i + 1) * out_dim];
            for (g, d) in row.iter_mut().zip(&dpre) {
                *g = *g + *xi * *d;
            }
        }
        let w = self.w.data();
        debug_assert_eq!(dx.len(), in_dim);
        for (i, dxi) in dx.iter_mut().enumerate() {
            let row = &w[i * out_dim..(i + 1) * out_dim];
            let mut acc = S::zero();
            for (wio, d) in row.iter().zip(&dpre) {
                acc = acc + *wio * *d;
            }
            *dxi = acc;
        }
    }
}

pub const HIDDEN_DIM: usize = 64;
pub const OUT_DIM: usize = 4;

/// Two tanh hidden layers and a tanh-squashed 4-dim output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: serde::Serialize",
    deserialize = "S: serde::de::DeserializeOwned"
))]
pub struct Decoder<S> {
    pub l1: Linear<S>,
    pub l2: Linear<S>,
    pub l3: Linear<S>,
}

/// Activations retained for the backward pass.
pub struct DecoderTrace<S> {
    pub input: Vec<S>,
    pub h1: [S; HIDDEN_DIM],
    pub h2: [S; HIDDEN_DIM],
    pub out: [S; OUT_DIM],
}

impl<S: Real> Decoder<S> {
    pub fn new(in_dim: usize, rng: &mut CounterRng) -> Self {
        Self {
            l1: Linear::new(in_dim, HIDDEN_DIM, rng),
            l2: Linear::new(HIDDEN_DIM, HIDDEN_DIM, rng),
            l3: Linear::new(HIDDEN_DIM, OUT_DIM, rng),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.l1.in_dim()
    }

    pub fn forward(&self, input: Vec<S>) -> DecoderTrace<S> {
        let mut h1 = [S::zero(); HIDDEN_DIM];
        let mut h2 = [S::zero(); HIDDEN_DIM];
        let mut out = [S::zero(); OUT_DIM];
        self.l1.forward_tanh(&input, &mut h1);
        self.l2.forward_tanh(&h1, &mut h2);
        self.l3.forward_tanh(&h2, &mut out);
        DecoderTrace {
            input,
            h1,
            h2,
            out,
        }
    }

    /// Accumulate parameter gradients for one sample; returns d(loss)/d(input).
    pub fn backward(&mut self, trace: &DecoderTrace<S>, dout: &[S; OUT_DIM]) -> Vec<S> {
        let mut dh2 = [S::zero(); HIDDEN_DIM];
        let mut dh1 = [S::zero(); HIDDEN_DIM];
        let mut dinput = vec![S::zero(); self.in_dim()];
        self.l3.backward_tanh(&trace.h2, &trace.out, dout, &mut dh2);
        self.l2.backward_tanh(&trace.h1, &trace.h2, &dh2, &mut dh1);
        self.l1
            .backward_tanh(&trace.input, &trace.h1, &dh1, &mut dinput);
        dinput
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    type S = f64;

    #[test]
    fn outputs_are_strictly_inside_unit_box() {
        let mut rng = CounterRng::new(0, stream::TEST);
        let decoder: Decoder<S> = Decoder::new(10, &mut rng);
        let trace = decoder.forward(vec![5.0; 10]);
        for v in trace.out {
            assert!(v > -1.0 && v < 1.0);
            assert!(v.is_finite());
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = CounterRng::new(3, stream::TEST);
        let decoder: Decoder<S> = Decoder::new(6, &mut rng);
        let a = decoder.forward(vec![0.1; 6]).out;
        let b = decoder.forward(vec![0.1; 6]).out;
        assert_eq!(a, b);
    }
}
