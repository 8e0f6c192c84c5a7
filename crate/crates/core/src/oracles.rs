//! Independent exact and semi-exact references.
//!
//! These close the loop on the Monte Carlo engine: the classical range
//! distribution of a uniform sample gives the exact law of the fiber length,
//! and a one-dimensional quadrature gives the exact probability of the
//! curvilinear strip in the two-dimensional Gaussian example.

use crate::dist::{normal_cdf, normal_pdf};
use crate::error::{Error, Result};
use crate::quad;

/// CDF of the range Xmax - Xmin of N IID uniforms on an interval of width l:
/// P(range <= r) = N (r/l)^{N-1} - (N-1) (r/l)^N for 0 <= r <= l.
///
/// Classical order statistics, validated against brute-force Monte Carlo in
/// the test suite before anything downstream relies on it.
pub fn range_cdf_uniform(n: u32, ell: f64, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid_parameter("n", "need at least two variables"));
    }
    if !(ell > 0.0) {
        return Err(Error::invalid_parameter("ell", "width must be positive"));
    }
    if !(r >= 0.0) {
        return Err(Error::invalid_parameter("r", "range must be nonnegative"));
    }
    if r >= ell {
        return Ok(1.0);
    }
    let u = r / ell;
    let nf = n as f64;
    Ok(nf * u.powi(n as i32 - 1) - (nf - 1.0) * u.powi(n as i32))
}

/// Exact probability that the fiber through a uniform sample is shorter
/// than `r`: P(|fiber| < r) = P(range > l - r / sqrt(N)).
pub fn small_fiber_prob_exact(n: u32, ell: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid_parameter("r", "length must be nonnegative"));
    }
    let threshold = ell - r / (n as f64).sqrt();
    if threshold <= 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - range_cdf_uniform(n, ell, threshold)?)
}

/// The short-fiber bound as printed in the lemma statement: (1/4) rho^2 r^2 N.
///
/// Exceeded by the exact probability for N >= 3 (see
/// [`small_fiber_bound_proof`] for the constant the proof actually yields).
pub fn small_fiber_bound_stated(n: u32, rho_bar: f64, r: f64) -> f64 {
    0.25 * rho_bar * rho_bar * r * r * n as f64
}

/// The short-fiber bound delivered by the proof's final line: rho^2 r^2 N.
///
/// This is the certified constant used by every downstream check.
pub fn small_fiber_bound_proof(n: u32, rho_bar: f64, r: f64) -> f64 {
    rho_bar * rho_bar * r * r * n as f64
}

/// P(xi in [eta^2, eta^2 + s]) for xi = (X1+X2)/2, eta = (X1-X2)/2 with
/// X1, X2 standard Gaussian.
///
/// xi and eta are independent N(0, 1/2); writing eta = z / sqrt(2) reduces
/// the strip probability to a one-dimensional integral against the standard
/// normal density, evaluated by adaptive quadrature to `quad_tol`.
pub fn gaussian_strip_prob(s: f64, quad_tol: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::invalid_parameter(
            "s",
            "strip width must be nonnegative",
        ));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    // P = E_z[ Phi((z^2/2 + s) sqrt(2)) - Phi(z^2/sqrt(2)) ], z ~ N(0,1);
    // the integrand decays like the normal density, so [-10, 10] loses < 1e-20.
    let integrand = move |z: f64| {
        let base = z * z / sqrt2;
        normal_pdf(z) * (normal_cdf(base + s * sqrt2) - normal_cdf(base))
    };
    Ok(quad::integrate(integrand, -10.0, 10.0, quad_tol))
}
