//! Fiber geometry for compactly supported samples.
//!
//! Fixing the offsets Y_i = X_i - X_N selects an affine line in direction
//! (1, ..., 1); its intersection with the support cube [a, a+l]^N is a
//! segment on which the rescaled mean xi_tilde is a unit-speed parameter.
//! The segment length is sqrt(N) * (l - (Xmax - Xmin)), and Xmax - Xmin is
//! constant along the fiber. A uniform marginal law induces the uniform
//! conditional distribution on each nonempty segment; a zero-length segment
//! carries a point mass.

use crate::error::{Error, Result};
use crate::sample::SampleVector;

/// The segment `line(Y) intersect [a, a+l]^N` with its exact geometry.
#[derive(Clone, Debug)]
pub struct FiberSegment {
    y: Vec<f64>,
    a: f64,
    ell: f64,
    length: f64,
    xi_tilde_lo: f64,
    xi_tilde_hi: f64,
    x_min: f64,
    x_max: f64,
    empty: bool,
}

impl FiberSegment {
    /// Sample size N (the ambient dimension).
    pub fn n(&self) -> usize {
        self.y.len() + 1
    }

    /// Fiber offsets Y.
    pub fn offsets(&self) -> &[f64] {
        &self.y
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.a + self.ell)
    }

    /// Euclidean length of the segment (0 for degenerate or empty fibers).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Closed range of xi_tilde attained on the segment.
    pub fn xi_tilde_range(&self) -> (f64, f64) {
        (self.xi_tilde_lo, self.xi_tilde_hi)
    }

    /// Smallest coordinate of the reference point on the fiber.
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Largest coordinate of the reference point on the fiber.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// True when the line misses the cube entirely.
    pub fn is_empty(&self) -> bool {
        self.empty
    }
}

/// Smallest and largest coordinate of a sample.
pub fn sample_extremes(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::invalid_parameter("values", "must be nonempty"));
    }
    let mut lo = values[0];
    let mut hi = values[0];
    for &v in &values[1..] {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    Ok((lo, hi))
}

/// The fiber containing a given sample, by the closed-form geometry.
///
/// Length is sqrt(N) * (l - Xmax + Xmin); the xi_tilde range extends from
/// the sample's xi_tilde by the maximum decrement sqrt(N) * (Xmin - a) and
/// the maximum increment sqrt(N) * (a + l - Xmax).
pub fn fiber_through(x: &SampleVector) -> Result<FiberSegment> {
    let (a, hi) = x.dist().support().ok_or(Error::UnboundedSupport)?;
    let ell = hi - a;
    let n = x.n();
    let sqrt_n = (n as f64).sqrt();
    for &v in x.values() {
        if !(v >= a && v <= hi) {
            return Err(Error::OutOfSupport {
                value: v,
                lo: a,
                hi,
            });
        }
    }
    let (x_min, x_max) = sample_extremes(x.values())?;
    let d = x.decompose();
    let length = sqrt_n * (ell - (x_max - x_min));
    Ok(FiberSegment {
        y: d.y,
        a,
        ell,
        length,
        xi_tilde_lo: d.xi_tilde - sqrt_n * (x_min - a),
        xi_tilde_hi: d.xi_tilde + sqrt_n * (a + ell - x_max),
        x_min,
        x_max,
        empty: false,
    })
}

/// Fiber for given offsets, by clipping the parametric line against the cube.
///
/// Independent of [`fiber_through`]: the line X(t) = X0 + t * (1,...,1)/sqrt(N)
/// through the anchor X0 = (Y_1, ..., Y_{N-1}, 0) is intersected with the N
/// per-coordinate slabs a <= X_i(t) <= a + l.
pub fn fiber_from_offsets(y: &[f64], a: f64, ell: f64) -> FiberSegment {
    let n = y.len() + 1;
    let sqrt_n = (n as f64).sqrt();
    // anchor point with the requested coordinate differences
    let anchor = |i: usize| if i < n - 1 { y[i] } else { 0.0 };

    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for i in 0..n {
        let x0 = anchor(i);
        t_lo = t_lo.max(sqrt_n * (a - x0));
        t_hi = t_hi.min(sqrt_n * (a + ell - x0));
    }

    let mut x_min = anchor(0);
    let mut x_max = anchor(0);
    for i in 1..n {
        x_min = x_min.min(anchor(i));
        x_max = x_max.max(anchor(i));
    }

    if t_hi < t_lo {
        return FiberSegment {
            y: y.to_vec(),
            a,
            ell,
            length: 0.0,
            xi_tilde_lo: 0.0,
            xi_tilde_hi: 0.0,
            x_min,
            x_max,
            empty: true,
        };
    }

    // xi_tilde moves at unit speed along the line: xi_tilde(t) = xi_tilde(X0) + t
    let xi_tilde_0 = (0..n).map(anchor).sum::<f64>() / sqrt_n;
    FiberSegment {
        y: y.to_vec(),
        a,
        ell,
        length: t_hi - t_lo,
        xi_tilde_lo: xi_tilde_0 + t_lo,
        xi_tilde_hi: xi_tilde_0 + t_hi,
        x_min,
        x_max,
        empty: false,
    }
}

/// Length of the fiber for given offsets, by interval clipping.
///
/// This is the oracle for the closed-form length used by [`fiber_through`].
pub fn fiber_length_brute_force(y: &[f64], a: f64, ell: f64) -> f64 {
    fiber_from_offsets(y, a, ell).length()
}

/// P(xi in [t, t+s] | fiber) under the uniform conditional law.
///
/// For a segment of positive length this is the overlap of
/// [sqrt(N) t, sqrt(N) (t+s)] with the xi_tilde range, divided by the length.
/// A degenerate (single point) fiber carries a point mass; an empty fiber
/// carries no mass at all.
pub fn conditional_interval_prob_uniform(f: &FiberSegment, t: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::invalid_parameter(
            "s",
            "interval length must be nonnegative",
        ));
    }
    if f.is_empty() {
        return Ok(0.0);
    }
    let sqrt_n = (f.n() as f64).sqrt();
    let (lo, hi) = f.xi_tilde_range();
    if f.length() == 0.0 {
        let xi_point = lo / sqrt_n;
        return Ok(if xi_point >= t && xi_point <= t + s {
            1.0
        } else {
            0.0
        });
    }
    let w_lo = (sqrt_n * t).max(lo);
    let w_hi = (sqrt_n * (t + s)).min(hi);
    Ok(((w_hi - w_lo).max(0.0) / f.length()).min(1.0))
}
