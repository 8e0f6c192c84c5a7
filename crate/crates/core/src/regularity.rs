//! Conditional continuity modulus and interval-hit probabilities.
//!
//! The central objects: for a fluctuation-measurable interval endpoint
//! lambda(Y), estimate P(xi in [lambda(Y), lambda(Y)+s]) by Monte Carlo and
//! compare against the closed-form bounds, 3 N^3 s / l for the uniform law
//! and sqrt(N) |I| / sqrt(2 pi) for the Gaussian.

use std::sync::Arc;

use crate::dist::{normal_cdf, DistributionSpec};
use crate::error::{Error, Result};
use crate::fiber::FiberSegment;
use crate::mc::{self, McEstimate};
use crate::sample::SampleVector;

/// Tag describing where a lambda function came from.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaKind {
    /// lambda(Y) = t.
    Constant(f64),
    /// lambda(Y) = eta^2 with eta = Y_1 / 2, the N = 2 curvilinear strip.
    QuadraticEta,
    /// Shifted eigenvalue of the centered operator, from the Anderson module.
    Eigenvalue {
        index: usize,
        shift: f64,
    },
    UserDefined,
}

type LambdaFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A pure map from fiber offsets Y to an interval endpoint lambda(Y).
#[derive(Clone)]
pub struct LambdaFunction {
    kind: LambdaKind,
    f: LambdaFn,
}

impl LambdaFunction {
    pub fn constant(t: f64) -> Self {
        Self {
            kind: LambdaKind::Constant(t),
            f: Arc::new(move |_| t),
        }
    }

    /// The N = 2 demo: lambda(Y) = eta^2 with eta = (X_1 - X_2)/2 = Y_1/2.
    pub fn quadratic_eta() -> Self {
        Self {
            kind: LambdaKind::QuadraticEta,
            f: Arc::new(|y: &[f64]| {
                let eta = y[0] / 2.0;
                eta * eta
            }),
        }
    }

    pub fn user_defined(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: LambdaKind::UserDefined,
            f: Arc::new(f),
        }
    }

    pub(crate) fn with_kind(
        kind: LambdaKind,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind,
            f: Arc::new(f),
        }
    }

    pub fn kind(&self) -> &LambdaKind {
        &self.kind
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.f)(y)
    }
}

impl std::fmt::Debug for LambdaFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LambdaFunction")
            .field("kind", &self.kind)
            .finish()
    }
}

/// Conditional continuity modulus on one fiber: min(1, sqrt(N) s / length).
///
/// A degenerate fiber (length 0) returns 1 for s > 0: a point mass is
/// captured by any interval that contains it.
pub fn continuity_modulus_uniform(f: &FiberSegment, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let len = f.length();
    if len == 0.0 {
        return 1.0;
    }
    (((f.n() as f64).sqrt() * s) / len).min(1.0)
}

/// Monte Carlo estimate of P(xi in [lambda(Y), lambda(Y) + s]).
pub fn interval_hit_prob(
    dist: &DistributionSpec,
    n: usize,
    lambda: &LambdaFunction,
    s: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !(s >= 0.0) {
        return Err(Error::invalid_parameter(
            "s",
            "interval length must be nonnegative",
        ));
    }
    let needs_offsets = !matches!(lambda.kind(), LambdaKind::Constant(_));
    let lambda = lambda.clone();
    mc::estimate_event_prob(
        dist,
        n,
        move |x: &SampleVector| {
            let values = x.values();
            let xi = values.iter().sum::<f64>() / values.len() as f64;
            let lam = if needs_offsets {
                let last = values[values.len() - 1];
                let y: Vec<f64> = values[..values.len() - 1]
                    .iter()
                    .map(|v| v - last)
                    .collect();
                lambda.eval(&y)
            } else {
                lambda.eval(&[])
            };
            xi >= lam && xi <= lam + s
        },
        trials,
        seed,
    )
}

/// The uniform-law theorem bound 3 N^3 s / l, valid for s in (0, 1].
pub fn theorem_bound_uniform(n: u32, ell: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::invalid_parameter(
            "s",
            "bound is stated for s in (0, 1]",
        ));
    }
    if !(ell > 0.0) {
        return Err(Error::invalid_parameter("ell", "width must be positive"));
    }
    let nf = n as f64;
    Ok(3.0 * nf * nf * nf * s / ell)
}

/// The Gaussian baseline bound sqrt(N) |I| / sqrt(2 pi).
pub fn gaussian_interval_bound(n: u32, interval_len: f64) -> Result<f64> {
    if !(interval_len >= 0.0) {
        return Err(Error::invalid_parameter(
            "interval_len",
            "interval length must be nonnegative",
        ));
    }
    Ok((n as f64).sqrt() * interval_len / (2.0 * std::f64::consts::PI).sqrt())
}

/// Exact P(xi in [t, t+s]) for a Gaussian sample mean, xi ~ N(0, 1/N).
pub fn gaussian_mean_interval_prob(n: u32, t: f64, s: f64) -> f64 {
    let root_n = (n as f64).sqrt();
    normal_cdf((t + s) * root_n) - normal_cdf(t * root_n)
}

/// The smooth-density theorem bound C N s, valid for s in (0, l / N^2).
pub fn smooth_theorem_bound(c: f64, n: u32, s: f64, ell: f64) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0 && s < ell / (nf * nf)) {
        return Err(Error::invalid_parameter(
            "s",
            format!("bound is stated for s in (0, {}); got {s}", ell / (nf * nf)),
        ));
    }
    Ok(c * nf * s)
}

/// Smallest constant C with p_hat <= C N s over a grid of measurements.
///
/// Each entry is (N, s, p_hat). The constant is reported, never asserted as
/// an a-priori value: the theorem only guarantees that some finite C exists.
pub fn fit_smooth_constant(points: &[(u32, f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(n, s, p_hat)| p_hat / (n as f64 * s))
        .fold(0.0, f64::max)
}
