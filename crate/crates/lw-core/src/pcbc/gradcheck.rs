//! Central-finite-difference validation of the analytic gradients.

use crate::pcbc::encoder::SparseCounts;
use crate::pcbc::net::OUT_DIM;
use crate::pcbc::{backward_sample, forward_sample, Arch, PolicyParams};
use crate::rng::{stream, CounterRng};
use crate::scalar::Real;
use crate::sim::consts;

/// One random (obs, mixed-counts, target-action) tuple.
pub struct CheckSample<S> {
    pub obs: Vec<S>,
    pub counts: SparseCounts<S>,
    pub target: [S; OUT_DIM],
}

/// Worst relative error per parameter block.
#[derive(Debug, Clone)]
pub struct BlockReport {
    pub block: &'static str,
    pub max_rel_err: f64,
    pub worst_index: usize,
    pub checked: usize,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub arch: Arch,
    pub tolerance: f64,
    pub blocks: Vec<BlockReport>,
}

impl GradCheckReport {
    pub fn max_rel_err(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.max_rel_err)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_rel_err() <= self.tolerance
    }
}

/// Mean over samples and the 4 action components of the squared error.
fn loss<S: Real>(params: &PolicyParams<S>, samples: &[CheckSample<S>]) -> S {
    let mut total = S::zero();
    for sample in samples {
        let trace = forward_sample(params, &sample.obs, &sample.counts);
        for (y, t) in trace.out.iter().zip(&sample.target) {
            let d = *y - *t;
            total = total + d * d;
        }
    }
    total / S::from_f64((samples.len() * OUT_DIM) as f64)
}

fn analytic_gradients<S: Real>(params: &mut PolicyParams<S>, samples: &[CheckSample<S>]) {
    params.reset_grads();
    let norm = S::from_f64(2.0 / (samples.len() * OUT_DIM) as f64);
    for sample in samples {
        let trace = forward_sample(params, &sample.obs, &sample.counts);
        let mut dout = [S::zero(); OUT_DIM];
        for ((d, y), t) in dout.iter_mut().zip(&trace.out).zip(&sample.target) {
            *d = (*y - *t) * norm;
        }
        backward_sample(params, &trace, &sample.counts, &dout);
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let denom = a.abs().max(b.abs()).max(1e-6);
    (a - b).abs() / denom
}

fn random_samples<S: Real>(arch: Arch, rng: &mut CounterRng, n: usize) -> Vec<CheckSample<S>> {
    (0..n)
        .map(|_| {
            let obs: Vec<S> = (0..consts::OBS_DIM)
                .map(|_| rng.uniform(S::from_f64(-0.5), S::from_f64(0.5)))
                .collect();
            let n_entries = match arch {
                // PCBC mixes several skill descriptions; DC has one text.
                Arch::Pcbc => 12,
                Arch::Dc => 6,
            };
            let mut counts: SparseCounts<S> = (0..n_entries)
                .map(|_| {
                    (
                        rng.index(crate::pcbc::VOCAB_SIZE) as u16,
                        rng.uniform(S::from_f64(0.05), S::from_f64(1.5)),
                    )
                })
                .collect();
            counts.sort_by_key(|(b, _)| *b);
            counts.dedup_by_key(|(b, _)| *b);
            let mut target = [S::zero(); OUT_DIM];
            for t in target.iter_mut() {
                *t = rng.uniform(S::from_f64(-0.9), S::from_f64(0.9));
            }
            CheckSample {
                obs,
                counts,
                target,
            }
        })
        .collect()
}

const FD_STEP: f64 = 1e-5;
const CHECKS_PER_BLOCK: usize = 48;

/// Compare analytic gradients of the full loss against central finite
/// differences on one random instance. Checks a strided subset of indices in
/// every parameter block and reports the worst offender per block.
pub fn grad_check<S: Real>(arch: Arch, seed: u64, tolerance: f64) -> GradCheckReport {
    let mut rng = CounterRng::new(seed, stream::TEST);
    let mut params: PolicyParams<S> = PolicyParams::init(seed ^ 0x5eed);
    let samples = random_samples(arch, &mut rng, 4);

    analytic_gradients(&mut params, &samples);
    let analytic: Vec<Vec<f64>> = params
        .blocks()
        .iter()
        .map(|(_, t)| t.grad().unwrap().iter().map(|g| g.as_f64()).collect())
        .collect();
    let block_names: Vec<&'static str> = params.blocks().iter().map(|(n, _)| *n).collect();
    let block_sizes: Vec<usize> = params.blocks().iter().map(|(_, t)| t.numel()).collect();

    let mut blocks = Vec::new();
    for (block_idx, name) in block_names.iter().enumerate() {
        let numel = block_sizes[block_idx];
        let stride = (numel / CHECKS_PER_BLOCK).max(1);
        let mut worst = BlockReport {
            block: name,
            max_rel_err: 0.0,
            worst_index: 0,
            checked: 0,
        };
        let mut idx = 0;
        while idx < numel {
            let h = S::from_f64(FD_STEP);
            let original = params.blocks_mut()[block_idx].1.data()[idx];
            params.blocks_mut()[block_idx].1.data_mut()[idx] = original + h;
            let plus = loss(&params, &samples).as_f64();
            params.blocks_mut()[block_idx].1.data_mut()[idx] = original - h;
            let minus = loss(&params, &samples).as_f64();
            params.blocks_mut()[block_idx].1.data_mut()[idx] = original;

            let fd = (plus - minus) / (2.0 * FD_STEP);
            let err = rel_err(analytic[block_idx][idx], fd);
            if err > worst.max_rel_err {
                worst.max_rel_err = err;
                worst.worst_index = idx;
            }
            worst.checked += 1;
            idx += stride;
        }
        blocks.push(worst);
    }

    GradCheckReport {
        arch,
        tolerance,
        blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcbc_gradients_match_finite_differences() {
        let report = grad_check::<f64>(Arch::Pcbc, 0, 1e-4);
        assert!(report.passed(), "max err {}", report.max_rel_err());
    }

    #[test]
    fn dc_gradients_match_finite_differences() {
        let report = grad_check::<f64>(Arch::Dc, 1, 1e-4);
        assert!(report.passed(), "max err {}", report.max_rel_err());
    }

    #[test]
    fn unused_parameter_directions_have_zero_error() {
        // A vocabulary column no sample touches gets zero analytic gradient
        // and zero finite difference, which must register as zero error.
        assert_eq!(rel_err(0.0, 0.0), 0.0);
    }

    #[test]
    fn report_covers_every_block() {
        let report = grad_check::<f64>(Arch::Pcbc, 2, 1e-4);
        assert_eq!(report.blocks.len(), 7);
        for block in &report.blocks {
            assert!(block.checked > 0);
        }
    }
}
