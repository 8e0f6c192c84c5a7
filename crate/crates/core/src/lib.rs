//! Numerical laboratory for the conditional distribution of the sample mean
//! of an IID sample, given the sample fluctuations.
//!
//! The library provides:
//!
//! - the mean/fluctuation decomposition and the Helmert change of basis
//!   ([`sample`]);
//! - exact geometry of the fibers cut out of the support cube by fixing the
//!   fluctuation offsets, where the conditional law lives ([`fiber`]);
//! - closed-form oracles: the uniform range distribution, short-fiber
//!   probabilities, and the Gaussian curvilinear-strip quadrature
//!   ([`oracles`]);
//! - a deterministic, counter-seeded Monte Carlo engine whose results do not
//!   depend on thread count or work chunking ([`mc`]);
//! - interval-hit probability estimates and the closed-form regularity
//!   bounds they are compared against ([`regularity`]);
//! - the support-partition machinery with the conditional-law sandwich and
//!   stratified consistency checks ([`partition`]);
//! - random discrete Schrödinger operators on finite graphs with the
//!   eigenvalue shift identity and Wegner-type concentration estimates
//!   ([`anderson`]).
//!
//! All estimators are pure functions of their inputs and a 64-bit seed.

// `!(x >= 0.0)` guards intentionally reject NaN along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anderson;
pub mod dist;
pub mod error;
pub mod fiber;
pub mod mc;
pub mod oracles;
pub mod partition;
#[allow(clippy::excessive_precision)]
pub mod quad;
pub mod regularity;
pub mod sample;

pub use dist::{DistributionSpec, SmoothDensity};
pub use error::{Error, Result};
pub use fiber::FiberSegment;
pub use mc::{CounterRng, McEstimate};
pub use regularity::{LambdaFunction, LambdaKind};
pub use sample::{MeanFluctDecomp, SampleVector};
