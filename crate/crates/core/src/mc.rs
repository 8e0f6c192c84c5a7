//! Deterministic, parallelizable Monte Carlo estimation.
//!
//! Reproducibility contract: every trial owns an RNG stream derived from
//! (seed, trial index) alone, so estimates are a pure function of the inputs
//! and do not depend on the number of worker threads or on how the trial
//! range is chunked. Success counts are merged as integers; chunk results
//! are collected in index order before any floating-point reduction.

use std::ops::Range;

use rayon::prelude::*;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::sample::SampleVector;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent seed for a named sub-stream of a run.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix(seed ^ mix(tag.wrapping_mul(GOLDEN).wrapping_add(0x6a09_e667_f3bc_c909)))
}

/// Counter-based RNG: a splitmix64 stream keyed by (seed, trial index).
#[derive(Clone, Debug)]
pub struct CounterRng {
    state: u64,
    spare_gaussian: Option<f64>,
}

impl CounterRng {
    /// The stream owned by one trial.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let state = mix(seed ^ mix(trial.wrapping_mul(GOLDEN).wrapping_add(1)));
        Self {
            state,
            spare_gaussian: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform on (0, 1]; safe as a logarithm argument.
    #[inline]
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal draw by the Box-Muller transform.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        let mag = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare_gaussian = Some(mag * s);
        mag * c
    }
}

/// Proposal budget per draw for rejection sampling of smooth densities.
pub const MAX_REJECTION_PROPOSALS: u64 = 1_000_000;

/// Fill `out` with IID draws from `dist` using the given stream.
pub(crate) fn fill_iid(
    dist: &DistributionSpec,
    rng: &mut CounterRng,
    out: &mut [f64],
) -> Result<()> {
    match dist {
        DistributionSpec::Uniform { offset, width } => {
            for v in out.iter_mut() {
                *v = offset + width * rng.next_f64();
            }
        }
        DistributionSpec::StandardGaussian => {
            for v in out.iter_mut() {
                *v = rng.next_gaussian();
            }
        }
        DistributionSpec::SmoothDensity(d) => {
            let lo = d.offset();
            let w = d.width();
            let box_height = d.rho_bar() * (1.0 + 1e-12);
            for v in out.iter_mut() {
                let mut accepted = false;
                for _ in 0..MAX_REJECTION_PROPOSALS {
                    let cand = lo + w * rng.next_f64();
                    if rng.next_f64() * box_height < d.pdf(cand) {
                        *v = cand;
                        accepted = true;
                        break;
                    }
                }
                if !accepted {
                    return Err(Error::RejectionFailure(MAX_REJECTION_PROPOSALS));
                }
            }
        }
    }
    Ok(())
}

/// One IID sample of size `n`, a pure function of (dist, n, trial, seed).
pub fn sample_iid(
    dist: &DistributionSpec,
    n: usize,
    trial: u64,
    seed: u64,
) -> Result<SampleVector> {
    if n < 2 {
        return Err(Error::DegenerateSample(n));
    }
    let mut rng = CounterRng::for_trial(seed, trial);
    let mut values = vec![0.0; n];
    fill_iid(dist, &mut rng, &mut values)?;
    Ok(SampleVector::new_unchecked(values, dist.clone()))
}

/// A Bernoulli probability estimate with a Wilson 95% interval.
#[derive(Clone, Debug)]
pub struct McEstimate {
    /// successes / trials, exactly.
    pub p_hat: f64,
    pub successes: u64,
    pub trials: u64,
    /// sqrt(p_hat (1 - p_hat) / trials).
    pub std_err: f64,
    /// Wilson score interval at 95%.
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        assert!(trials > 0, "estimate needs at least one trial");
        assert!(successes <= trials);
        // 97.5% standard normal quantile
        let z = 1.959963984540054_f64;
        let n = trials as f64;
        let p = successes as f64 / n;
        let denom = 1.0 + z * z / n;
        let center = (p + z * z / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        // clamp to [0, 1] and absorb boundary rounding so p_hat always lies inside
        let lo = (center - half).max(0.0).min(p);
        let hi = (center + half).min(1.0).max(p);
        McEstimate {
            p_hat: p,
            successes,
            trials,
            std_err: (p * (1.0 - p) / n).sqrt(),
            ci95: (lo, hi),
            seed,
        }
    }

    /// True when `p` lies inside the 95% interval.
    pub fn covers(&self, p: f64) -> bool {
        p >= self.ci95.0 && p <= self.ci95.1
    }
}

/// Sequential success count over a contiguous trial range.
///
/// Merging counts over disjoint ranges reproduces the full-range count
/// exactly, whatever the partition.
pub fn count_successes_in_range<F>(
    dist: &DistributionSpec,
    n: usize,
    range: Range<u64>,
    event: &F,
    seed: u64,
) -> Result<u64>
where
    F: Fn(&SampleVector) -> bool + Sync,
{
    if n < 2 {
        return Err(Error::DegenerateSample(n));
    }
    let mut sample = SampleVector::new_unchecked(vec![0.0; n], dist.clone());
    let mut successes = 0u64;
    for trial in range {
        let mut rng = CounterRng::for_trial(seed, trial);
        fill_iid(dist, &mut rng, sample.values_mut())?;
        if event(&sample) {
            successes += 1;
        }
    }
    Ok(successes)
}

// Trials per work unit; fixed so chunking never depends on the worker count.
const CHUNK: u64 = 8192;

/// Estimate P(event) over `trials` IID samples.
///
/// Trials may execute concurrently; the result is a pure function of the
/// arguments, independent of execution order and degree of parallelism.
pub fn estimate_event_prob<F>(
    dist: &DistributionSpec,
    n: usize,
    event: F,
    trials: u64,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&SampleVector) -> bool + Sync,
{
    if trials < 100 {
        return Err(Error::invalid_parameter(
            "trials",
            "need at least 100 trials",
        ));
    }
    let starts: Vec<u64> = (0..trials).step_by(CHUNK as usize).collect();
    let counts: Vec<Result<u64>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(trials);
            count_successes_in_range(dist, n, start..end, &event, seed)
        })
        .collect();
    let mut successes = 0u64;
    for c in counts {
        successes += c?;
    }
    Ok(McEstimate::from_counts(successes, trials, seed))
}
