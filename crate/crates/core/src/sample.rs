//! Sample vectors and the mean/fluctuation decomposition.
//!
//! A sample X = (X_1, ..., X_N) splits as X_i = xi + eta_i where xi is the
//! sample mean and the fluctuations eta_i sum to zero. The rescaled mean
//! xi_tilde = sqrt(N) * xi is the first coordinate of an orthogonal change of
//! basis; we fix the Helmert completion for the remaining N-1 coordinates.
//! The translation-invariant offsets Y_i = eta_i - eta_N = X_i - X_N label
//! the fibers along the diagonal direction.

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};

/// One IID draw together with its distribution tag.
#[derive(Clone, Debug)]
pub struct SampleVector {
    values: Vec<f64>,
    dist: DistributionSpec,
}

impl SampleVector {
    /// Build a sample, enforcing N >= 2 and the support constraint of
    /// compactly supported laws.
    pub fn new(values: Vec<f64>, dist: DistributionSpec) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DegenerateSample(values.len()));
        }
        if let Some((lo, hi)) = dist.support() {
            for &v in &values {
                if !(v >= lo && v <= hi) {
                    return Err(Error::OutOfSupport { value: v, lo, hi });
                }
            }
        }
        Ok(Self { values, dist })
    }

    /// Internal constructor for values known to satisfy the invariants
    /// (used by the sampling engine).
    pub(crate) fn new_unchecked(values: Vec<f64>, dist: DistributionSpec) -> Self {
        Self { values, dist }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dist(&self) -> &DistributionSpec {
        &self.dist
    }

    /// Sample size N.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sample mean.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Split into mean, rescaled mean, fluctuations, and fiber offsets.
    pub fn decompose(&self) -> MeanFluctDecomp {
        let n = self.values.len();
        let xi = self.mean();
        let eta: Vec<f64> = self.values.iter().map(|v| v - xi).collect();
        let last = self.values[n - 1];
        let y: Vec<f64> = self.values[..n - 1].iter().map(|v| v - last).collect();
        MeanFluctDecomp {
            xi,
            xi_tilde: (n as f64).sqrt() * xi,
            eta,
            y,
        }
    }
}

/// Mean/fluctuation coordinates of a sample.
#[derive(Clone, Debug)]
pub struct MeanFluctDecomp {
    /// Sample mean.
    pub xi: f64,
    /// Rescaled mean sqrt(N) * xi.
    pub xi_tilde: f64,
    /// Fluctuations eta_i = X_i - xi; they sum to zero.
    pub eta: Vec<f64>,
    /// Fiber offsets Y_i = eta_i - eta_N = X_i - X_N, i < N.
    pub y: Vec<f64>,
}

impl MeanFluctDecomp {
    /// Invert the decomposition: X_i = eta_i + xi_tilde / sqrt(N).
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.eta.len();
        let shift = self.xi_tilde / (n as f64).sqrt();
        self.eta.iter().map(|e| e + shift).collect()
    }
}

/// Orthogonal coordinates (xi_tilde, eta~_1, ..., eta~_{N-1}) of a sample.
///
/// The first coordinate is the rescaled mean; row j of the Helmert
/// completion has j entries 1/sqrt(j(j+1)) followed by -j/sqrt(j(j+1)).
pub fn helmert_transform(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::DegenerateSample(n));
    }
    let mut out = Vec::with_capacity(n);
    out.push(values.iter().sum::<f64>() / (n as f64).sqrt());
    let mut prefix = 0.0;
    for j in 1..n {
        prefix += values[j - 1];
        let jf = j as f64;
        let norm = (jf * (jf + 1.0)).sqrt();
        out.push((prefix - jf * values[j]) / norm);
    }
    Ok(out)
}

/// Inverse of [`helmert_transform`] (the transpose of the orthogonal matrix).
pub fn helmert_inverse(coords: &[f64]) -> Result<Vec<f64>> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::DegenerateSample(n));
    }
    let base = coords[0] / (n as f64).sqrt();
    // suffix[i] = sum_{j >= i} coords[j] / sqrt(j(j+1)), rows 1..N-1
    let mut suffix = vec![0.0; n + 1];
    for j in (1..n).rev() {
        let jf = j as f64;
        suffix[j] = suffix[j + 1] + coords[j] / (jf * (jf + 1.0)).sqrt();
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = base + suffix[i + 1];
        if i >= 1 {
            let jf = i as f64;
            v -= jf * coords[i] / (jf * (jf + 1.0)).sqrt();
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::CounterRng;

    fn unit_uniform() -> DistributionSpec {
        DistributionSpec::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_sample_has_zero_fluctuations() {
        let x =
            SampleVector::new(vec![1.0; 4], DistributionSpec::uniform(0.0, 2.0).unwrap()).unwrap();
        let d = x.decompose();
        assert_eq!(d.xi, 1.0);
        assert!(d.eta.iter().all(|&e| e == 0.0));
        assert!(d.y.iter().all(|&y| y == 0.0));
        assert_eq!(d.y.len(), 3);
    }

    #[test]
    fn antisymmetric_pair() {
        let x = SampleVector::new(vec![0.0, 1.0], unit_uniform()).unwrap();
        let d = x.decompose();
        assert_eq!(d.xi, 0.5);
        assert!((d.xi_tilde - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.eta, vec![-0.5, 0.5]);
        assert_eq!(d.y, vec![-1.0]);
    }

    #[test]
    fn three_point_decomposition() {
        let x = SampleVector::new(vec![0.2, 0.5, 0.8], unit_uniform()).unwrap();
        let d = x.decompose();
        assert!((d.xi - 0.5).abs() < 1e-15);
        for (e, want) in d.eta.iter().zip([-0.3, 0.0, 0.3]) {
            assert!((e - want).abs() < 1e-15);
        }
        for (y, want) in d.y.iter().zip([-0.6, -0.3]) {
            assert!((y - want).abs() < 1e-15);
        }
        // reconstruct about the decomposition is the identity
        let back = d.reconstruct();
        for (a, b) in back.iter().zip(x.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_sample_rejected() {
        assert!(matches!(
            SampleVector::new(vec![0.5], unit_uniform()),
            Err(Error::DegenerateSample(1))
        ));
    }

    #[test]
    fn out_of_support_rejected() {
        assert!(matches!(
            SampleVector::new(vec![0.2, 1.5], unit_uniform()),
            Err(Error::OutOfSupport { .. })
        ));
    }

    #[test]
    fn reconstruct_known_values() {
        let d = MeanFluctDecomp {
            xi: 0.5,
            xi_tilde: 2f64.sqrt() * 0.5,
            eta: vec![0.0, 0.0],
            y: vec![0.0],
        };
        let v = d.reconstruct();
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);

        let d = MeanFluctDecomp {
            xi: 0.5,
            xi_tilde: 3f64.sqrt() * 0.5,
            eta: vec![-0.3, 0.0, 0.3],
            y: vec![-0.6, -0.3],
        };
        for (a, b) in d.reconstruct().iter().zip([0.2, 0.5, 0.8]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_random_samples() {
        let mut max_err = 0.0_f64;
        for trial in 0..10_000u64 {
            let mut rng = CounterRng::for_trial(11, trial);
            let n = 2 + (rng.next_u64() % 15) as usize;
            let values: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let x = SampleVector::new(values.clone(), unit_uniform()).unwrap();
            let back = x.decompose().reconstruct();
            for (a, b) in back.iter().zip(&values) {
                max_err = max_err.max((a - b).abs() / b.abs().max(1.0));
            }
        }
        assert!(max_err < 1e-12, "round-trip error {max_err:e}");
    }

    #[test]
    fn helmert_of_constant_vector() {
        let out = helmert_transform(&[3.0; 5]).unwrap();
        assert!((out[0] - 3.0 * 5f64.sqrt()).abs() < 1e-12);
        for &c in &out[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn helmert_two_point() {
        let out = helmert_transform(&[0.0, 1.0]).unwrap();
        assert!((out[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((out[1] + 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn helmert_is_an_isometry() {
        for trial in 0..10_000u64 {
            let mut rng = CounterRng::for_trial(13, trial);
            let n = 2 + (rng.next_u64() % 31) as usize;
            let values: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
            let out = helmert_transform(&values).unwrap();
            let norm_in: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
            let norm_out: f64 = out.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm_in - norm_out).abs() <= 1e-12 * norm_in.max(1.0));
            // first coordinate is sqrt(N) times the mean
            let mean = values.iter().sum::<f64>() / n as f64;
            assert!((out[0] - (n as f64).sqrt() * mean).abs() < 1e-12);
        }
    }

    #[test]
    fn helmert_rows_are_orthonormal() {
        // apply the transform to the standard basis to recover the matrix
        let n = 6;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let col = helmert_transform(&e).unwrap();
            for (j, &v) in col.iter().enumerate() {
                rows[j][i] = v;
            }
        }
        for p in 0..n {
            for q in 0..n {
                let dot: f64 = (0..n).map(|i| rows[p][i] * rows[q][i]).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12, "rows {p},{q}: {dot}");
            }
        }
    }
}
