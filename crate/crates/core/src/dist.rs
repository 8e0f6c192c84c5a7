//! Marginal distributions of the IID sample.
//!
//! Three families are supported: the uniform law on `[a, a+l]`, the standard
//! Gaussian, and user-supplied smooth positive densities on `[a, a+l]` with a
//! bounded logarithmic derivative. Smooth densities are validated at
//! construction on a probe grid rather than trusted: positivity, the declared
//! log-derivative bound, and normalization are all checked up front, and the
//! density sup is recorded for rejection sampling.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

/// Interior probe points used to vet a smooth density.
pub const DENSITY_PROBE_POINTS: usize = 2048;

/// Absolute tolerance on `integral(rho) - 1`.
pub const DENSITY_NORMALIZATION_TOL: f64 = 1e-9;

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A compactly supported density with bounded logarithmic derivative.
#[derive(Clone)]
pub struct SmoothDensity {
    offset: f64,
    width: f64,
    log_deriv_bound: f64,
    rho_bar: f64,
    density: DensityFn,
}

impl SmoothDensity {
    /// Validate a density on `[offset, offset + width]`.
    ///
    /// The probe-grid checks enforce honesty of the declaration: the density
    /// must be strictly positive on the interior, its finite-difference
    /// log-derivative must respect `log_deriv_bound`, and it must integrate
    /// to one.
    pub fn new(
        offset: f64,
        width: f64,
        log_deriv_bound: f64,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::invalid_parameter(
                "width",
                "must be positive and finite",
            ));
        }
        if !offset.is_finite() {
            return Err(Error::invalid_parameter("offset", "must be finite"));
        }
        if !(log_deriv_bound >= 0.0) || !log_deriv_bound.is_finite() {
            return Err(Error::invalid_parameter(
                "log_deriv_bound",
                "must be nonnegative and finite",
            ));
        }

        let k = DENSITY_PROBE_POINTS;
        let h = width / (k + 1) as f64;
        let mut rho_bar = 0.0_f64;
        let mut prev_ln = f64::NAN;
        for i in 1..=k {
            let v = offset + h * i as f64;
            let rho = density(v);
            if !(rho > 0.0) || !rho.is_finite() {
                return Err(Error::InvalidDensity(format!(
                    "density is not strictly positive at v = {v}: rho = {rho}"
                )));
            }
            rho_bar = rho_bar.max(rho);
            let ln_rho = rho.ln();
            if i > 1 {
                let slope = (ln_rho - prev_ln).abs() / h;
                if slope > log_deriv_bound * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::InvalidDensity(format!(
                        "log-derivative {slope:.6e} near v = {v} exceeds the declared bound {log_deriv_bound:.6e}"
                    )));
                }
            }
            prev_ln = ln_rho;
        }

        let integral = quad::integrate(&density, offset, offset + width, 1e-12);
        if (integral - 1.0).abs() > DENSITY_NORMALIZATION_TOL {
            return Err(Error::InvalidDensity(format!(
                "density integrates to {integral:.12} instead of 1"
            )));
        }

        Ok(Self {
            offset,
            width,
            log_deriv_bound,
            rho_bar,
            density: Arc::new(density),
        })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Declared bound on |d/dv ln rho(v)|.
    pub fn log_deriv_bound(&self) -> f64 {
        self.log_deriv_bound
    }

    /// Sup of the density over the probe grid.
    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    pub fn pdf(&self, v: f64) -> f64 {
        (self.density)(v)
    }
}

impl fmt::Debug for SmoothDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothDensity")
            .field("offset", &self.offset)
            .field("width", &self.width)
            .field("log_deriv_bound", &self.log_deriv_bound)
            .field("rho_bar", &self.rho_bar)
            .finish()
    }
}

/// The common marginal law of the sample.
#[derive(Clone, Debug)]
pub enum DistributionSpec {
    /// Uniform on `[offset, offset + width]`.
    Uniform { offset: f64, width: f64 },
    /// Standard normal N(0, 1).
    StandardGaussian,
    /// Smooth positive density on a compact interval.
    SmoothDensity(SmoothDensity),
}

impl DistributionSpec {
    pub fn uniform(offset: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::invalid_parameter(
                "width",
                "must be positive and finite",
            ));
        }
        if !offset.is_finite() {
            return Err(Error::invalid_parameter("offset", "must be finite"));
        }
        Ok(DistributionSpec::Uniform { offset, width })
    }

    pub fn standard_gaussian() -> Self {
        DistributionSpec::StandardGaussian
    }

    pub fn smooth(
        offset: f64,
        width: f64,
        log_deriv_bound: f64,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        SmoothDensity::new(offset, width, log_deriv_bound, density)
            .map(DistributionSpec::SmoothDensity)
    }

    /// `(lo, hi)` of the support for compact laws, `None` for the Gaussian.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            DistributionSpec::Uniform { offset, width } => Some((*offset, offset + width)),
            DistributionSpec::StandardGaussian => None,
            DistributionSpec::SmoothDensity(d) => Some((d.offset(), d.offset() + d.width())),
        }
    }

    /// Sup of the density (exact for the closed forms, probe-grid sup for
    /// smooth densities).
    pub fn rho_bar(&self) -> f64 {
        match self {
            DistributionSpec::Uniform { width, .. } => 1.0 / width,
            DistributionSpec::StandardGaussian => 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            DistributionSpec::SmoothDensity(d) => d.rho_bar(),
        }
    }

    pub fn pdf(&self, v: f64) -> f64 {
        match self {
            DistributionSpec::Uniform { offset, width } => {
                if v >= *offset && v <= offset + width {
                    1.0 / width
                } else {
                    0.0
                }
            }
            DistributionSpec::StandardGaussian => normal_pdf(v),
            DistributionSpec::SmoothDensity(d) => {
                let (lo, hi) = (d.offset(), d.offset() + d.width());
                if v >= lo && v <= hi {
                    d.pdf(v)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match self.support() {
            Some((lo, hi)) => v >= lo && v <= hi,
            None => v.is_finite(),
        }
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
