//! Hashed bag-of-words text encoder with a learned projection.
//!
//! Text maps to a sparse count vector over a fixed hashed vocabulary; the
//! learned encoder matrix projects it into the skill latent space. Hash
//! collisions are tolerated; a test checks the 30 library descriptions stay
//! pairwise distinct.

use crate::pcbc::tensor::Tensor;
use crate::rng::fnv1a;
use crate::scalar::Real;

/// Hashed vocabulary size (count-vector dimension).
pub const VOCAB_SIZE: usize = 256;

/// Skill latent dimension.
pub const LATENT_DIM: usize = 32;

/// Sparse count vector: (bucket, value) pairs sorted by bucket.
pub type SparseCounts<S> = Vec<(u16, S)>;

fn bucket(token: &str) -> u16 {
    (fnv1a(token) % VOCAB_SIZE as u64) as u16
}

/// Lowercase, whitespace-tokenize, and hash into a sparse count vector.
pub fn count_vector<S: Real>(text: &str) -> SparseCounts<S> {
    let mut counts = std::collections::BTreeMap::new();
    for token in text.to_lowercase().split_whitespace() {
        *counts.entry(bucket(token)).or_insert(0usize) += 1;
    }
    counts
        .into_iter()
        .map(|(b, n)| (b, S::from_f64(n as f64)))
        .collect()
}

/// Weighted merge of count vectors: sum_i w_i * counts_i.
pub fn mix_counts<S: Real>(weights: &[S], counts: &[SparseCounts<S>]) -> SparseCounts<S> {
    debug_assert_eq!(weights.len(), counts.len());
    let mut merged = std::collections::BTreeMap::new();
    for (w, sparse) in weights.iter().zip(counts) {
        for (b, v) in sparse {
            let slot = merged.entry(*b).or_insert_with(S::zero);
            *slot = *slot + *w * *v;
        }
    }
    merged.into_iter().collect()
}

/// Project a count vector through the encoder matrix (LATENT_DIM x VOCAB).
pub fn encode_counts<S: Real>(encoder: &Tensor<S>, counts: &SparseCounts<S>) -> Vec<S> {
    debug_assert_eq!(encoder.shape(), &[LATENT_DIM, VOCAB_SIZE]);
    let w = encoder.data();
    let mut z = vec![S::zero(); LATENT_DIM];
    for (b, v) in counts {
        let col = *b as usize;
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = *zk + w[k * VOCAB_SIZE + col] * *v;
        }
    }
    z
}

/// Accumulate d(loss)/d(encoder) given d(loss)/d(latent) and the counts that
/// produced it.
pub fn encoder_backward<S: Real>(encoder: &mut Tensor<S>, counts: &SparseCounts<S>, dz: &[S]) {
    let grad = encoder.grad_mut();
    for (b, v) in counts {
        let col = *b as usize;
        for (k, dzk) in dz.iter().enumerate() {
            grad[k * VOCAB_SIZE + col] = grad[k * VOCAB_SIZE + col] + *dzk * *v;
        }
    }
}

/// Convenience: encode raw text (used by the descriptor-conditioned policy
/// and by tests).
pub fn encode_text<S: Real>(encoder: &Tensor<S>, text: &str) -> Vec<S> {
    encode_counts(encoder, &count_vector(text))
}
