//! Random discrete Schrödinger operators on finite graphs.
//!
//! H = adjacency + diag(V) splits as H = xi * I + A where xi is the mean of
//! the potential and A = adjacency + diag(eta) has a centered potential. A is
//! measurable with respect to the fluctuations, so sorted eigenvalues obey
//! the exact shift identity eig(H) = xi + eig(A). Eigenvalue concentration
//! probabilities are estimated by Monte Carlo over potential samples and
//! compared against the union bound and the uniform-law theorem bound.

use rayon::prelude::*;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::mc::{self, CounterRng, McEstimate};
use crate::regularity::{self, LambdaFunction, LambdaKind};

/// Undirected simple graph on vertices 0..n.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl FiniteGraph {
    /// Build a graph from an edge list; self-loops and duplicates are
    /// rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid_parameter("n", "need at least two vertices"));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid_parameter(
                    "edges",
                    format!("self-loop at {u}"),
                ));
            }
            if u >= n || v >= n {
                return Err(Error::invalid_parameter(
                    "edges",
                    format!("edge ({u}, {v}) out of range"),
                ));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_parameter("edges", "duplicate edge"));
        }
        Ok(Self {
            n,
            edges: normalized,
        })
    }

    /// Path graph P_n.
    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect())
    }

    /// Cycle graph C_n.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid_parameter(
                "n",
                "a cycle needs at least 3 vertices",
            ));
        }
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, n - 1));
        Self::new(n, edges)
    }

    /// Rectangular grid with nearest-neighbor edges.
    pub fn grid2d(rows: usize, cols: usize) -> Result<Self> {
        let n = rows * cols;
        let at = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((at(r, c), at(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((at(r, c), at(r + 1, c)));
                }
            }
        }
        Self::new(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Dense adjacency matrix.
    pub fn adjacency(&self) -> SymMatrix {
        let mut m = SymMatrix::zero(self.n);
        for &(u, v) in &self.edges {
            m.set_sym(u, v, 1.0);
        }
        m
    }
}

/// Dense symmetric matrix, row-major full storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Set both (i, j) and (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// One random operator instance: H = adjacency + diag(V) = xi I + A.
#[derive(Clone, Debug)]
pub struct DsoInstance {
    potential: Vec<f64>,
    xi: f64,
    h: SymMatrix,
    a: SymMatrix,
}

impl DsoInstance {
    /// Assemble the operator for a given potential.
    pub fn with_potential(graph: &FiniteGraph, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != graph.vertex_count() {
            return Err(Error::invalid_parameter(
                "potential",
                format!(
                    "length {} does not match the {} vertices",
                    potential.len(),
                    graph.vertex_count()
                ),
            ));
        }
        let n = potential.len();
        let xi = potential.iter().sum::<f64>() / n as f64;
        let mut h = graph.adjacency();
        let mut a = h.clone();
        for (i, &v) in potential.iter().enumerate() {
            h.set(i, i, v);
            a.set(i, i, v - xi);
        }
        Ok(Self {
            potential,
            xi,
            h,
            a,
        })
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Mean of the potential.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn h(&self) -> &SymMatrix {
        &self.h
    }

    /// Centered part: adjacency plus the zero-mean potential.
    pub fn a(&self) -> &SymMatrix {
        &self.a
    }
}

/// Sample an IID potential and assemble the operator; deterministic in
/// (graph, dist, trial, seed).
pub fn build_dso(
    graph: &FiniteGraph,
    dist: &DistributionSpec,
    trial: u64,
    seed: u64,
) -> Result<DsoInstance> {
    let sample = mc::sample_iid(dist, graph.vertex_count(), trial, seed)?;
    DsoInstance::with_potential(graph, sample.values().to_vec())
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations.
///
/// Iterates until the off-diagonal Frobenius mass drops below
/// `tol * frobenius(mat)`.
pub fn sym_eigenvalues(mat: &SymMatrix, tol: f64) -> Result<Vec<f64>> {
    jacobi(mat, tol, false).map(|(eigs, _)| eigs)
}

/// Eigenvalues (ascending) and the orthogonal matrix whose columns are the
/// matching eigenvectors.
pub fn sym_eigen(mat: &SymMatrix, tol: f64) -> Result<(Vec<f64>, SymMatrix)> {
    let (eigs, q) = jacobi(mat, tol, true)?;
    Ok((eigs, q.expect("eigenvectors requested")))
}

fn jacobi(mat: &SymMatrix, tol: f64, want_vectors: bool) -> Result<(Vec<f64>, Option<SymMatrix>)> {
    let asym = mat.max_asymmetry();
    let scale = mat.frobenius_norm().max(1e-300);
    if asym > 1e-12 * scale.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = mat.clone();
    let n = a.dim();
    let mut q = want_vectors.then(|| {
        let mut id = SymMatrix::zero(n);
        for i in 0..n {
            id.set(i, i, 1.0);
        }
        id
    });
    let threshold = tol * scale;

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() < threshold {
            return Ok(sorted_eigen(&a, q));
        }
        for p in 0..n - 1 {
            for qq in (p + 1)..n {
                let apq = a.get(p, qq);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(qq, qq);
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(qq, qq, aqq + t * apq);
                a.set_sym(p, qq, 0.0);
                for i in 0..n {
                    if i == p || i == qq {
                        continue;
                    }
                    let aip = a.get(i, p);
                    let aiq = a.get(i, qq);
                    a.set_sym(i, p, aip - s * (aiq + tau * aip));
                    a.set_sym(i, qq, aiq + s * (aip - tau * aiq));
                }
                if let Some(vectors) = q.as_mut() {
                    for i in 0..n {
                        let vip = vectors.get(i, p);
                        let viq = vectors.get(i, qq);
                        vectors.set(i, p, vip - s * (viq + tau * vip));
                        vectors.set(i, qq, viq + s * (vip - tau * viq));
                    }
                }
            }
        }
    }
    Err(Error::NoConvergence(MAX_JACOBI_SWEEPS))
}

fn sorted_eigen(a: &SymMatrix, q: Option<SymMatrix>) -> (Vec<f64>, Option<SymMatrix>) {
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let q = q.map(|vectors| {
        let mut sorted = SymMatrix::zero(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                sorted.set(row, new_col, vectors.get(row, old_col));
            }
        }
        sorted
    });
    (eigs, q)
}

/// Outcome of checking eig(H) = xi + eig(A) on one instance.
#[derive(Clone, Debug)]
pub struct ShiftIdentityReport {
    pub max_deviation: f64,
    pub tol: f64,
    pub ok: bool,
}

/// Verify the eigenvalue shift identity on one instance.
///
/// Sorted eig(H) must equal xi + sorted eig(A) elementwise within
/// 1e-10 * (|H| + 1).
pub fn shift_identity_check(inst: &DsoInstance) -> Result<ShiftIdentityReport> {
    let eig_h = sym_eigenvalues(inst.h(), 1e-14)?;
    let eig_a = sym_eigenvalues(inst.a(), 1e-14)?;
    let max_deviation = eig_h
        .iter()
        .zip(&eig_a)
        .map(|(lh, la)| (lh - (inst.xi() + la)).abs())
        .fold(0.0, f64::max);
    let tol = 1e-10 * (inst.h().frobenius_norm() + 1.0);
    Ok(ShiftIdentityReport {
        max_deviation,
        tol,
        ok: max_deviation <= tol,
    })
}

/// Eigenvalue-concentration estimate for the interval [t, t+s].
#[derive(Clone, Debug)]
pub struct EvcReport {
    /// P(at least one eigenvalue of H lands in the interval).
    pub p_trace: McEstimate,
    /// Sum over j of the per-eigenvalue hit probabilities (union bound).
    pub p_sum: f64,
    /// Standard error of `p_sum` (the estimators share trials).
    pub p_sum_std_err: f64,
    /// N * min(1, 3 N^3 s / l) for a uniform potential, `None` otherwise.
    pub wegner_bound: Option<f64>,
}

/// Estimate P(tr P_{[t,t+s]}(H) >= 1) and the union bound over sorted
/// eigenvalues in one Monte Carlo pass.
pub fn evc_estimate(
    graph: &FiniteGraph,
    dist: &DistributionSpec,
    t: f64,
    s: f64,
    trials: u64,
    seed: u64,
) -> Result<EvcReport> {
    if !(s > 0.0) {
        return Err(Error::invalid_parameter(
            "s",
            "interval length must be positive",
        ));
    }
    if trials < 100 {
        return Err(Error::invalid_parameter(
            "trials",
            "need at least 100 trials",
        ));
    }
    let n = graph.vertex_count();

    const CHUNK: u64 = 2048;
    let starts: Vec<u64> = (0..trials).step_by(CHUNK as usize).collect();
    // per chunk: (trace hits, sum of per-trial hit counts, sum of squares)
    let partials: Vec<Result<(u64, u64, u64)>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(trials);
            let mut trace_hits = 0u64;
            let mut k_sum = 0u64;
            let mut k_sq_sum = 0u64;
            let mut potential = vec![0.0; n];
            for trial in start..end {
                let mut rng = CounterRng::for_trial(seed, trial);
                mc::fill_iid(dist, &mut rng, &mut potential)?;
                let inst = DsoInstance::with_potential(graph, potential.clone())?;
                let eigs = sym_eigenvalues(inst.h(), 1e-12)?;
                let k = eigs.iter().filter(|&&l| l >= t && l <= t + s).count() as u64;
                if k >= 1 {
                    trace_hits += 1;
                }
                k_sum += k;
                k_sq_sum += k * k;
            }
            Ok((trace_hits, k_sum, k_sq_sum))
        })
        .collect();

    let mut trace_hits = 0u64;
    let mut k_sum = 0u64;
    let mut k_sq_sum = 0u64;
    for part in partials {
        let (th, ks, ksq) = part?;
        trace_hits += th;
        k_sum += ks;
        k_sq_sum += ksq;
    }

    let nf = trials as f64;
    let mean_k = k_sum as f64 / nf;
    let var_k = (k_sq_sum as f64 / nf - mean_k * mean_k).max(0.0);
    // N * min(1, theorem bound); undefined for non-uniform laws or s > 1
    let wegner_bound = match dist {
        DistributionSpec::Uniform { width, .. } => {
            regularity::theorem_bound_uniform(n as u32, *width, s)
                .ok()
                .map(|b| n as f64 * b.min(1.0))
        }
        _ => None,
    };

    Ok(EvcReport {
        p_trace: McEstimate::from_counts(trace_hits, trials, seed),
        p_sum: mean_k,
        p_sum_std_err: (var_k / nf).sqrt(),
        wegner_bound,
    })
}

/// The fluctuation-measurable endpoint lambda(Y) = -mu_j(A(eta(Y))) + t,
/// where mu_j is the j-th sorted eigenvalue (0-based) of the centered
/// operator built from the fluctuations with zero mean.
///
/// Feeding this into `regularity::interval_hit_prob` reproduces
/// P(lambda_j(H) in [t, t+s]) under the sorted labeling.
pub fn eigenvalue_lambda(graph: &FiniteGraph, j: usize, t: f64) -> Result<LambdaFunction> {
    let n = graph.vertex_count();
    if j >= n {
        return Err(Error::invalid_parameter(
            "j",
            format!("eigenvalue index {j} out of range for {n} vertices"),
        ));
    }
    let graph = graph.clone();
    Ok(LambdaFunction::with_kind(
        LambdaKind::Eigenvalue { index: j, shift: t },
        move |y: &[f64]| {
            // reconstruct the zero-mean fluctuations from the offsets:
            // eta_i = Y_i - mean(Y), eta_N = -mean(Y)
            let n = y.len() + 1;
            let mean_y = y.iter().sum::<f64>() / n as f64;
            let mut eta = Vec::with_capacity(n);
            for &yi in y {
                eta.push(yi - mean_y);
            }
            eta.push(-mean_y);
            let inst = DsoInstance::with_potential(&graph, eta).expect("graph size fixed");
            let mu = sym_eigenvalues(inst.a(), 1e-12).expect("symmetric by construction");
            -mu[j] + t
        },
    ))
}
