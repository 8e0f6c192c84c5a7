//! Partition of the support into M cells and of the sample space into cubes.
//!
//! Covering [a, a+l] by M equal cells J_k turns the cube family
//! J_{k_1} x ... x J_{k_N} into a partition of the sample space. On each cube
//! the true law and the uniform law differ by at most e^{+-2 alpha} with
//! alpha = N C' l / M, which is the sandwich inequality verified here. The
//! same machinery supports the stratified consistency check: exact cube
//! probabilities times per-cube conditional estimates must reproduce the
//! direct estimate.

use rayon::prelude::*;

use crate::dist::{DistributionSpec, SmoothDensity};
use crate::error::{Error, Result};
use crate::mc::{self, CounterRng, McEstimate};
use crate::quad;
use crate::regularity::LambdaFunction;
use crate::sample::SampleVector;

/// M equal cells tiling [a, a+l].
#[derive(Clone, Debug)]
pub struct SupportPartition {
    a: f64,
    ell: f64,
    m: usize,
}

impl SupportPartition {
    /// Build a partition with `m` cells (default N^2 when `m` is `None`).
    pub fn new(a: f64, ell: f64, n: usize, m: Option<usize>) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::invalid_parameter(
                "ell",
                "width must be positive and finite",
            ));
        }
        let m = m.unwrap_or(n * n);
        if m < 1 {
            return Err(Error::invalid_parameter("m", "need at least one cell"));
        }
        Ok(Self { a, ell, m })
    }

    pub fn cell_count(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.a + self.ell)
    }

    pub fn cell_width(&self) -> f64 {
        self.ell / self.m as f64
    }

    /// Bounds of cell `k` (0-based).
    pub fn cell(&self, k: usize) -> (f64, f64) {
        assert!(k < self.m, "cell index {k} out of range");
        let lo = self.a + self.ell * (k as f64 / self.m as f64);
        let hi = self.a + self.ell * ((k + 1) as f64 / self.m as f64);
        (lo, hi)
    }

    /// Cell containing `v`: left-closed cells with a top clamp.
    pub fn cell_of(&self, v: f64) -> Result<usize> {
        let (lo, hi) = self.support();
        if !(v >= lo && v <= hi) {
            return Err(Error::OutOfSupport { value: v, lo, hi });
        }
        let k = ((v - self.a) * self.m as f64 / self.ell).floor() as usize;
        Ok(k.min(self.m - 1))
    }
}

/// Index of one cube J_{k_1} x ... x J_{k_N} (0-based coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeIndex(pub Vec<usize>);

impl CubeIndex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Cube containing a sample.
pub fn cube_index_of(x: &SampleVector, p: &SupportPartition) -> Result<CubeIndex> {
    let mut coords = Vec::with_capacity(x.n());
    for &v in x.values() {
        coords.push(p.cell_of(v)?);
    }
    Ok(CubeIndex(coords))
}

/// P(X_1 in cell) for one coordinate.
pub fn cell_prob(dist: &DistributionSpec, cell: (f64, f64)) -> Result<f64> {
    let (lo, hi) = cell;
    match dist {
        DistributionSpec::Uniform { width, .. } => Ok((hi - lo) / width),
        DistributionSpec::SmoothDensity(d) => Ok(quad::integrate(|v| d.pdf(v), lo, hi, 1e-12)),
        DistributionSpec::StandardGaussian => Err(Error::UnboundedSupport),
    }
}

/// P(X in cube) = product of the coordinate cell probabilities.
pub fn cube_prob(dist: &DistributionSpec, p: &SupportPartition, k: &CubeIndex) -> Result<f64> {
    let mut prob = 1.0;
    for &ki in k.coords() {
        prob *= cell_prob(dist, p.cell(ki))?;
    }
    Ok(prob)
}

// Probe points per cell for the oscillation scan.
const OSCILLATION_PROBES: usize = 512;

/// Max over a probe grid of |ln rho(v) - ln rho(cell lower endpoint)|.
pub fn log_density_oscillation(dist: &DistributionSpec, cell: (f64, f64)) -> Result<f64> {
    let (lo, hi) = cell;
    let d = match dist {
        DistributionSpec::Uniform { .. } => return Ok(0.0),
        DistributionSpec::StandardGaussian => return Err(Error::UnboundedSupport),
        DistributionSpec::SmoothDensity(d) => d,
    };
    let base = d.pdf(lo);
    if !(base > 0.0) {
        return Err(Error::InvalidDensity(format!(
            "density nonpositive at cell endpoint {lo}"
        )));
    }
    let ln_base = base.ln();
    let mut osc = 0.0_f64;
    for i in 0..OSCILLATION_PROBES {
        let v = lo + (hi - lo) * i as f64 / (OSCILLATION_PROBES - 1) as f64;
        let rho = d.pdf(v);
        if !(rho > 0.0) {
            return Err(Error::InvalidDensity(format!("density nonpositive at {v}")));
        }
        osc = osc.max((rho.ln() - ln_base).abs());
    }
    Ok(osc)
}

/// The sandwich exponent alpha = N C' l / M for an N-sample on an M-cell
/// partition (0 for the uniform law).
pub fn sandwich_alpha(dist: &DistributionSpec, n: usize, p: &SupportPartition) -> Result<f64> {
    let c_prime = match dist {
        DistributionSpec::Uniform { .. } => 0.0,
        DistributionSpec::SmoothDensity(d) => d.log_deriv_bound(),
        DistributionSpec::StandardGaussian => return Err(Error::UnboundedSupport),
    };
    Ok(n as f64 * c_prime * p.cell_width())
}

// ---------------------------------------------------------------------------
// sampling restricted to one cube

/// Inverse-CDF sampler for one coordinate restricted to a cell.
enum CellSampler {
    Uniform { lo: f64, width: f64 },
    Table(TableSampler),
}

struct TableSampler {
    density: SmoothDensity,
    panel_lo: Vec<f64>,
    cum: Vec<f64>,
    total: f64,
}

const TABLE_PANELS: usize = 512;

fn simpson(d: &SmoothDensity, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (d.pdf(a) + 4.0 * d.pdf(0.5 * (a + b)) + d.pdf(b))
}

impl CellSampler {
    fn new(dist: &DistributionSpec, cell: (f64, f64)) -> Result<Self> {
        let (lo, hi) = cell;
        match dist {
            DistributionSpec::Uniform { .. } => Ok(CellSampler::Uniform { lo, width: hi - lo }),
            DistributionSpec::StandardGaussian => Err(Error::UnboundedSupport),
            DistributionSpec::SmoothDensity(d) => {
                let mut panel_lo = Vec::with_capacity(TABLE_PANELS + 1);
                for i in 0..=TABLE_PANELS {
                    panel_lo.push(lo + (hi - lo) * i as f64 / TABLE_PANELS as f64);
                }
                let mut cum = Vec::with_capacity(TABLE_PANELS + 1);
                cum.push(0.0);
                for i in 0..TABLE_PANELS {
                    let inc = simpson(d, panel_lo[i], panel_lo[i + 1]);
                    cum.push(cum[i] + inc);
                }
                let total = cum[TABLE_PANELS];
                if !(total > 0.0) {
                    return Err(Error::InvalidDensity(format!(
                        "density carries no mass on cell [{lo}, {hi}]"
                    )));
                }
                Ok(CellSampler::Table(TableSampler {
                    density: d.clone(),
                    panel_lo,
                    cum,
                    total,
                }))
            }
        }
    }

    /// Map a uniform u in [0, 1) to a draw from the restricted law.
    fn sample(&self, u: f64) -> f64 {
        match self {
            CellSampler::Uniform { lo, width } => lo + width * u,
            CellSampler::Table(t) => t.sample(u),
        }
    }
}

impl TableSampler {
    fn sample(&self, u: f64) -> f64 {
        let target = u * self.total;
        // binary search for the panel with cum[i] <= target < cum[i+1]
        let mut lo = 0usize;
        let mut hi = TABLE_PANELS;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cum[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = self.panel_lo[lo];
        let b = self.panel_lo[lo + 1];
        let mass = self.cum[lo + 1] - self.cum[lo];
        let mut x = if mass > 0.0 {
            a + (b - a) * (target - self.cum[lo]) / mass
        } else {
            a
        };
        // two Newton polish steps against the panel-local CDF
        for _ in 0..2 {
            let f_val = self.cum[lo] + simpson(&self.density, a, x);
            let rho = self.density.pdf(x);
            if rho > 0.0 {
                x = (x - (f_val - target) / rho).clamp(a, b);
            }
        }
        x
    }
}

const CHUNK: u64 = 8192;

/// Deterministic chunked estimate over a custom per-trial sampler.
fn estimate_with_sampler<S, F>(
    samplers: &[S],
    dist: &DistributionSpec,
    event: &F,
    trials: u64,
    seed: u64,
) -> Result<McEstimate>
where
    S: Fn(f64) -> f64 + Sync,
    F: Fn(&SampleVector) -> bool + Sync,
{
    let n = samplers.len();
    let starts: Vec<u64> = (0..trials).step_by(CHUNK as usize).collect();
    let counts: Vec<u64> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(trials);
            let mut sample = SampleVector::new_unchecked(vec![0.0; n], dist.clone());
            let mut hits = 0u64;
            for trial in start..end {
                let mut rng = CounterRng::for_trial(seed, trial);
                for (i, s) in samplers.iter().enumerate() {
                    sample.values_mut()[i] = s(rng.next_f64());
                }
                if event(&sample) {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    Ok(McEstimate::from_counts(counts.iter().sum(), trials, seed))
}

/// Outcome of one sandwich verification on a cube.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub alpha: f64,
    pub p_uniform: McEstimate,
    pub p_conditional: McEstimate,
    /// Conservative interval for the law ratio, widened by 3 standard errors.
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub ok: bool,
}

/// Compare the true law conditioned on a cube with the uniform law on it.
///
/// Both probabilities are estimated with `trials` samples each; the check
/// passes when the conditional estimate lies within e^{+-2 alpha} of the
/// uniform one up to 3 sigma of combined Monte Carlo error.
pub fn sandwich_check<F>(
    dist: &DistributionSpec,
    p: &SupportPartition,
    cube: &CubeIndex,
    event: F,
    trials: u64,
    seed: u64,
) -> Result<SandwichReport>
where
    F: Fn(&SampleVector) -> bool + Sync,
{
    let n = cube.dim();
    if n < 2 {
        return Err(Error::DegenerateSample(n));
    }
    let alpha = sandwich_alpha(dist, n, p)?;
    for &ki in cube.coords() {
        if cell_prob(dist, p.cell(ki))? <= 0.0 {
            return Err(Error::invalid_parameter("cube", "cube carries no mass"));
        }
    }

    let uniform_samplers: Vec<_> = cube
        .coords()
        .iter()
        .map(|&ki| {
            let (lo, hi) = p.cell(ki);
            move |u: f64| lo + (hi - lo) * u
        })
        .collect();
    let conditional_samplers: Vec<CellSampler> = cube
        .coords()
        .iter()
        .map(|&ki| CellSampler::new(dist, p.cell(ki)))
        .collect::<Result<_>>()?;
    let cond_fns: Vec<_> = conditional_samplers
        .iter()
        .map(|s| move |u: f64| s.sample(u))
        .collect();

    let p_uniform = estimate_with_sampler(
        &uniform_samplers,
        dist,
        &event,
        trials,
        mc::derive_seed(seed, 0),
    )?;
    let p_conditional =
        estimate_with_sampler(&cond_fns, dist, &event, trials, mc::derive_seed(seed, 1))?;

    for (law, est) in [("uniform", &p_uniform), ("conditional", &p_conditional)] {
        if est.successes < 10 {
            return Err(Error::InsufficientMass {
                law,
                hits: est.successes,
            });
        }
    }

    let (pu, pc) = (p_uniform.p_hat, p_conditional.p_hat);
    let (su, sc) = (p_uniform.std_err, p_conditional.std_err);
    let hi_factor = (2.0 * alpha).exp();
    let lo_factor = (-2.0 * alpha).exp();
    let ok_upper = pc <= hi_factor * pu + 3.0 * (sc * sc + hi_factor * hi_factor * su * su).sqrt();
    let ok_lower = pc >= lo_factor * pu - 3.0 * (sc * sc + lo_factor * lo_factor * su * su).sqrt();

    let ratio_lo = ((pc - 3.0 * sc).max(0.0)) / (pu + 3.0 * su);
    let denom = pu - 3.0 * su;
    let ratio_hi = if denom > 0.0 {
        (pc + 3.0 * sc) / denom
    } else {
        f64::INFINITY
    };

    Ok(SandwichReport {
        alpha,
        p_uniform,
        p_conditional,
        ratio_lo,
        ratio_hi,
        ok: ok_upper && ok_lower,
    })
}

/// Outcome of the stratified-versus-direct consistency check.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub direct: McEstimate,
    pub stratified: f64,
    pub stratified_std_err: f64,
    /// Largest per-cube conditional hit probability among included cubes.
    pub sup_cube_hit_prob: f64,
    /// Total probability of cubes included in the stratified sum.
    pub included_mass: f64,
    /// Probability mass of cubes skipped for having under 10 expected hits.
    pub skipped_mass: f64,
    pub ok: bool,
}

// Enumerating cubes is capped; beyond this the cubes actually hit by a pilot
// sample are used instead.
const MAX_ENUMERATED_CUBES: usize = 100_000;

fn enumerate_cubes(m: usize, n: usize) -> Option<Vec<CubeIndex>> {
    let count = (m as u128).checked_pow(n as u32)?;
    if count > MAX_ENUMERATED_CUBES as u128 {
        return None;
    }
    let mut cubes = Vec::with_capacity(count as usize);
    let mut current = vec![0usize; n];
    loop {
        cubes.push(CubeIndex(current.clone()));
        let mut i = 0;
        loop {
            current[i] += 1;
            if current[i] < m {
                break;
            }
            current[i] = 0;
            i += 1;
            if i == n {
                return Some(cubes);
            }
        }
    }
}

fn cubes_hit_by_pilot(
    dist: &DistributionSpec,
    n: usize,
    p: &SupportPartition,
    pilot_trials: u64,
    seed: u64,
) -> Result<Vec<CubeIndex>> {
    let mut seen = std::collections::BTreeSet::new();
    for trial in 0..pilot_trials {
        let x = mc::sample_iid(dist, n, trial, seed)?;
        seen.insert(cube_index_of(&x, p)?);
    }
    Ok(seen.into_iter().collect())
}

/// Verify that exact cube probabilities times per-cube conditional estimates
/// reproduce the direct estimate of P(xi in [lambda(Y), lambda(Y)+s]).
///
/// Cubes with fewer than 10 expected hits are skipped and their mass widens
/// the comparison tolerance.
pub fn total_decomposition_check(
    dist: &DistributionSpec,
    n: usize,
    lambda: &LambdaFunction,
    s: f64,
    p: &SupportPartition,
    trials: u64,
    seed: u64,
) -> Result<DecompositionReport> {
    if !(s >= 0.0) {
        return Err(Error::invalid_parameter(
            "s",
            "interval length must be nonnegative",
        ));
    }
    let lambda_owned = lambda.clone();
    let event = move |x: &SampleVector| {
        let values = x.values();
        let xi = values.iter().sum::<f64>() / values.len() as f64;
        let last = values[values.len() - 1];
        let y: Vec<f64> = values[..values.len() - 1]
            .iter()
            .map(|v| v - last)
            .collect();
        let lam = lambda_owned.eval(&y);
        xi >= lam && xi <= lam + s
    };

    let direct = mc::estimate_event_prob(dist, n, &event, trials, mc::derive_seed(seed, 0))?;

    let cubes = match enumerate_cubes(p.cell_count(), n) {
        Some(cubes) => cubes,
        None => cubes_hit_by_pilot(
            dist,
            n,
            p,
            trials.min(100_000),
            mc::derive_seed(seed, u64::MAX),
        )?,
    };

    let mut stratified = 0.0;
    let mut var_strat = 0.0;
    let mut included_mass = 0.0;
    let mut skipped_mass = 0.0;
    let mut sup_hit = 0.0_f64;

    for (rank, cube) in cubes.iter().enumerate() {
        let pk = cube_prob(dist, p, cube)?;
        let expected_hits = pk * trials as f64;
        if expected_hits < 10.0 {
            skipped_mass += pk;
            continue;
        }
        let cube_trials = (expected_hits.round() as u64).max(100);
        let samplers: Vec<CellSampler> = cube
            .coords()
            .iter()
            .map(|&ki| CellSampler::new(dist, p.cell(ki)))
            .collect::<Result<_>>()?;
        let sampler_fns: Vec<_> = samplers
            .iter()
            .map(|sm| move |u: f64| sm.sample(u))
            .collect();
        let est = estimate_with_sampler(
            &sampler_fns,
            dist,
            &event,
            cube_trials,
            mc::derive_seed(seed, 1 + rank as u64),
        )?;
        stratified += pk * est.p_hat;
        var_strat += pk * pk * est.std_err * est.std_err;
        included_mass += pk;
        sup_hit = sup_hit.max(est.p_hat);
    }

    let stratified_std_err = var_strat.sqrt();
    let tol = 3.0 * (direct.std_err * direct.std_err + var_strat).sqrt() + skipped_mass;
    let ok = (stratified - direct.p_hat).abs() <= tol;

    Ok(DecompositionReport {
        direct,
        stratified,
        stratified_std_err,
        sup_cube_hit_prob: sup_hit,
        included_mass,
        skipped_mass,
        ok,
    })
}
