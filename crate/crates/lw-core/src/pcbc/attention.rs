//! Condition-truth attention over skill latents.

use crate::scalar::{c, Real};

/// Fixed logit scale: one true condition among ten still takes >0.99 of the
/// mass, so the mix nearly selects the active skill.
pub const ATTENTION_SCALE: f64 = 8.0;

/// Softmax over `scale * truth` logits. Always sums to 1; permuting the
/// truths permutes the weights identically.
pub fn attention_weights<S: Real>(condition_truths: &[bool]) -> Vec<S> {
    assert!(!condition_truths.is_empty(), "attention over zero conditions");
    let scale = c::<S>(ATTENTION_SCALE);
    let logits: Vec<S> = condition_truths
        .iter()
        .map(|&b| if b { scale } else { S::zero() })
        .collect();
    let max = logits.iter().cloned().fold(S::neg_infinity(), S::max);
    let exps: Vec<S> = logits.iter().map(|l| (*l - max).exp()).collect();
    let total: S = exps.iter().cloned().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = f64;

    #[test]
    fn all_false_is_uniform() {
        let w: Vec<S> = attention_weights(&[false; 5]);
        for v in &w {
            assert!((v - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn single_true_dominates() {
        let mut truths = [false; 10];
        truths[3] = true;
        let w: Vec<S> = attention_weights(&truths);
        let e8 = (8.0f64).exp();
        let expected = e8 / (e8 + 9.0);
        assert!((w[3] - expected).abs() < 1e-12);
        assert!(w[3] > 0.99);
    }

    #[test]
    fn two_true_split_evenly() {
        let mut truths = [false; 10];
        truths[1] = true;
        truths[6] = true;
        let w: Vec<S> = attention_weights(&truths);
        let e8 = (8.0f64).exp();
        let expected = e8 / (2.0 * e8 + 8.0);
        assert!((w[1] - expected).abs() < 1e-12);
        assert_eq!(w[1], w[6]);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..12 {
            let truths: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
            let w: Vec<S> = attention_weights(&truths);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_equivariant() {
        let truths = [true, false, false, true, false];
        let w: Vec<S> = attention_weights(&truths);
        let permuted = [false, true, false, false, true];
        let wp: Vec<S> = attention_weights(&permuted);
        assert_eq!(w[0], wp[1]);
        assert_eq!(w[3], wp[4]);
    }
}
