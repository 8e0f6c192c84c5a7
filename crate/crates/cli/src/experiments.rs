//! The named experiments: each resolves its parameters, runs the estimators,
//! and emits one result table with a pass/fail verdict per row.

// `!(x > 0.0)` guards intentionally reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use condmean_core::anderson::{self, FiniteGraph};
use condmean_core::dist::DistributionSpec;
use condmean_core::fiber::{fiber_length_brute_force, fiber_through};
use condmean_core::mc::{self, derive_seed, CounterRng};
use condmean_core::oracles;
use condmean_core::partition::{self, CubeIndex, SupportPartition};
use condmean_core::regularity::{self, LambdaFunction};
use condmean_core::sample::SampleVector;

use crate::config::{Config, Params};
use crate::error::CliError;
use crate::report::{Cell, ResultTable};

pub const EXPERIMENTS: [&str; 9] = [
    "verify-lemma",
    "verify-theorem-uniform",
    "verify-smooth",
    "verify-sandwich",
    "gaussian-baseline",
    "gaussian-strip",
    "anderson-evc",
    "fiber-oracle",
    "rng-selftest",
];

pub fn run(config: &Config) -> Result<ResultTable, CliError> {
    let p = &config.params;
    match config.experiment.as_str() {
        "verify-lemma" => verify_lemma(p),
        "verify-theorem-uniform" => verify_theorem_uniform(p),
        "verify-smooth" => verify_smooth(p),
        "verify-sandwich" => verify_sandwich(p),
        "gaussian-baseline" => gaussian_baseline(p),
        "gaussian-strip" => gaussian_strip(p),
        "anderson-evc" => anderson_evc(p),
        "fiber-oracle" => fiber_oracle(p),
        "rng-selftest" => rng_selftest(p),
        other => Err(CliError::UnknownExperiment(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// parameter resolution helpers

fn seed_of(p: &Params) -> u64 {
    p.seed.unwrap_or(42)
}

fn ell_of(p: &Params) -> Result<f64, CliError> {
    let ell = p.ell.unwrap_or(1.0);
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(CliError::ParamWindow(format!(
            "ell must be positive, got {ell}"
        )));
    }
    Ok(ell)
}

fn trials_of(p: &Params, default: u64) -> Result<u64, CliError> {
    let trials = p.trials.unwrap_or(default);
    if trials < 100 {
        return Err(CliError::ParamWindow(format!(
            "need at least 100 trials, got {trials}"
        )));
    }
    Ok(trials)
}

fn smooth_exp(a: f64, ell: f64) -> DistributionSpec {
    // rho(v) = e^{(v-a)/ell} / (ell (e - 1)); log-derivative 1/ell
    DistributionSpec::smooth(a, ell, 1.0 / ell, move |v| {
        ((v - a) / ell).exp() / (ell * (std::f64::consts::E - 1.0))
    })
    .expect("exponential-slope density is valid")
}

fn smooth_truncated_gaussian(a: f64, ell: f64) -> DistributionSpec {
    // normal(a + ell/2, (0.35 ell)^2) truncated to [a, a + ell]
    let sigma = 0.35 * ell;
    let z = condmean_core::dist::normal_cdf(0.5 * ell / sigma)
        - condmean_core::dist::normal_cdf(-0.5 * ell / sigma);
    let norm = sigma * z * (2.0 * std::f64::consts::PI).sqrt();
    let c_prime = 0.5 * ell / (sigma * sigma) + 1e-9;
    let mid = a + 0.5 * ell;
    DistributionSpec::smooth(a, ell, c_prime, move |v| {
        let u = (v - mid) / sigma;
        (-0.5 * u * u).exp() / norm
    })
    .expect("truncated gaussian density is valid")
}

fn resolve_dist(p: &Params, default: &str) -> Result<(DistributionSpec, String), CliError> {
    let a = p.a.unwrap_or(0.0);
    let ell = ell_of(p)?;
    let name = p.dist.as_deref().unwrap_or(default);
    let dist = match name {
        "uniform" => {
            DistributionSpec::uniform(a, ell).map_err(|e| CliError::ParamWindow(e.to_string()))?
        }
        "gaussian" => DistributionSpec::standard_gaussian(),
        "exp" => smooth_exp(a, ell),
        "truncgauss" => smooth_truncated_gaussian(a, ell),
        other => {
            return Err(CliError::Config(format!(
                "unknown dist `{other}` (expected uniform, gaussian, exp, or truncgauss)"
            )))
        }
    };
    Ok((dist, name.to_string()))
}

fn resolve_graph(spec: &str) -> Result<FiniteGraph, CliError> {
    let bad = |s: &str| CliError::Config(format!("cannot parse graph `{s}`"));
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad(spec));
    let rest = |prefix: &str| {
        let r = &spec[prefix.len()..];
        r.strip_prefix(':').unwrap_or(r)
    };
    let graph = if spec.starts_with("path") {
        FiniteGraph::path(parse(rest("path"))?)
    } else if spec.starts_with("cycle") {
        FiniteGraph::cycle(parse(rest("cycle"))?)
    } else if spec.starts_with("grid") {
        let dims = rest("grid");
        let (r, c) = dims.split_once('x').ok_or_else(|| bad(spec))?;
        FiniteGraph::grid2d(parse(r)?, parse(c)?)
    } else {
        return Err(bad(spec));
    };
    graph.map_err(|e| CliError::ParamWindow(e.to_string()))
}

fn mean_square_lambda(a: f64, ell: f64) -> LambdaFunction {
    LambdaFunction::user_defined(move |y: &[f64]| {
        let m = y.iter().sum::<f64>() / y.len() as f64;
        a + (m * m).clamp(0.0, ell)
    })
}

// ---------------------------------------------------------------------------
// experiments

fn verify_lemma(p: &Params) -> Result<ResultTable, CliError> {
    let n = p.n.unwrap_or(3);
    if n < 2 {
        return Err(CliError::ParamWindow(format!(
            "N must be at least 2, got {n}"
        )));
    }
    let ell = ell_of(p)?;
    let a = p.a.unwrap_or(0.0);
    let trials = trials_of(p, 1_000_000)?;
    let seed = seed_of(p);
    let dist =
        DistributionSpec::uniform(a, ell).map_err(|e| CliError::ParamWindow(e.to_string()))?;
    let rho_bar = 1.0 / ell;

    let mut table = ResultTable::new(
        "verify-lemma",
        seed,
        vec![
            "n",
            "r",
            "exact",
            "empirical",
            "ci_lo",
            "ci_hi",
            "bound_stated",
            "bound_proof",
            "pass_proof",
        ],
    );
    for j in 1..=20u32 {
        let r = ell * (n as f64).sqrt() * j as f64 / 20.0;
        let exact = oracles::small_fiber_prob_exact(n, ell, r)?;
        let est = mc::estimate_event_prob(
            &dist,
            n as usize,
            |x: &SampleVector| fiber_through(x).map(|f| f.length() < r).unwrap_or(false),
            trials,
            derive_seed(seed, 1),
        )?;
        let stated = oracles::small_fiber_bound_stated(n, rho_bar, r);
        let proof = oracles::small_fiber_bound_proof(n, rho_bar, r);
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        let pass = exact <= proof + 1e-12
            && (est.p_hat - exact).abs() <= 3.0 * sigma + 2.0 / trials as f64;
        table.push(vec![
            Cell::UInt(n as u64),
            Cell::Float(r),
            Cell::Float(exact),
            Cell::Float(est.p_hat),
            Cell::Float(est.ci95.0),
            Cell::Float(est.ci95.1),
            Cell::Float(stated),
            Cell::Float(proof),
            Cell::Bool(pass),
        ]);
    }
    Ok(table)
}

fn verify_theorem_uniform(p: &Params) -> Result<ResultTable, CliError> {
    let n = p.n.unwrap_or(3);
    if n < 2 {
        return Err(CliError::ParamWindow(format!(
            "N must be at least 2, got {n}"
        )));
    }
    let ell = ell_of(p)?;
    let a = p.a.unwrap_or(0.0);
    let s = p.s.unwrap_or(0.01);
    if !(s > 0.0 && s <= 1.0) {
        return Err(CliError::ParamWindow(format!(
            "s must lie in (0, 1], got {s}"
        )));
    }
    let trials = trials_of(p, 1_000_000)?;
    let seed = seed_of(p);
    let dist =
        DistributionSpec::uniform(a, ell).map_err(|e| CliError::ParamWindow(e.to_string()))?;
    let bound = regularity::theorem_bound_uniform(n, ell, s)?.min(1.0);

    let lambdas: Vec<(String, LambdaFunction)> = vec![
        (
            "const_0.25l".into(),
            LambdaFunction::constant(a + 0.25 * ell),
        ),
        (
            "const_0.45l".into(),
            LambdaFunction::constant(a + 0.45 * ell),
        ),
        (
            "const_0.75l".into(),
            LambdaFunction::constant(a + 0.75 * ell),
        ),
        ("mean_sq_offsets".into(), mean_square_lambda(a, ell)),
    ];

    let mut table = ResultTable::new(
        "verify-theorem-uniform",
        seed,
        vec![
            "n", "ell", "s", "lambda", "trials", "p_hat", "ci_lo", "ci_hi", "bound", "pass",
        ],
    );
    for (i, (name, lam)) in lambdas.iter().enumerate() {
        let est = regularity::interval_hit_prob(
            &dist,
            n as usize,
            lam,
            s,
            trials,
            derive_seed(seed, i as u64),
        )?;
        let pass = est.p_hat <= bound + 3.0 * est.std_err;
        table.push(vec![
            Cell::UInt(n as u64),
            Cell::Float(ell),
            Cell::Float(s),
            Cell::Text(name.clone()),
            Cell::UInt(trials),
            Cell::Float(est.p_hat),
            Cell::Float(est.ci95.0),
            Cell::Float(est.ci95.1),
            Cell::Float(bound),
            Cell::Bool(pass),
        ]);
    }
    Ok(table)
}

fn verify_smooth(p: &Params) -> Result<ResultTable, CliError> {
    let ell = ell_of(p)?;
    let a = p.a.unwrap_or(0.0);
    let trials = trials_of(p, 1_000_000)?;
    let seed = seed_of(p);
    let (dist, dist_name) = resolve_dist(p, "exp")?;
    if matches!(
        dist,
        DistributionSpec::Uniform { .. } | DistributionSpec::StandardGaussian
    ) {
        return Err(CliError::ParamWindow(
            "verify-smooth needs a smooth density (exp or truncgauss)".into(),
        ));
    }
    let ns = [2u32, 3, 4];
    if let Some(s) = p.s {
        let tightest = ell / (*ns.last().unwrap() as f64).powi(2);
        if !(s > 0.0 && s < tightest) {
            return Err(CliError::ParamWindow(format!(
                "s must lie in (0, {tightest}) to stay inside the l/N^2 window for N up to 4, got {s}"
            )));
        }
    }

    let mut table = ResultTable::new(
        "verify-smooth",
        seed,
        vec![
            "kind", "density", "n", "s", "lambda", "trials", "p_hat", "c_hat", "pass",
        ],
    );
    let mut per_n = Vec::new();
    for (ni, &n) in ns.iter().enumerate() {
        let window = ell / (n as f64 * n as f64);
        let s_values: Vec<f64> = match p.s {
            Some(s) => vec![s],
            None => [0.25, 0.5, 0.8].iter().map(|f| f * window).collect(),
        };
        let mut points = Vec::new();
        for (si, &s) in s_values.iter().enumerate() {
            let lambdas: Vec<(String, LambdaFunction)> = vec![
                (
                    "const_center".into(),
                    LambdaFunction::constant(a + 0.5 * ell - s / 2.0),
                ),
                ("mean_sq_offsets".into(), mean_square_lambda(a, ell)),
            ];
            for (li, (name, lam)) in lambdas.iter().enumerate() {
                let run_seed = derive_seed(seed, (ni * 100 + si * 10 + li) as u64);
                let est =
                    regularity::interval_hit_prob(&dist, n as usize, lam, s, trials, run_seed)?;
                let c_ratio = est.p_hat / (n as f64 * s);
                points.push((n, s, est.p_hat));
                table.push(vec![
                    Cell::Text("run".into()),
                    Cell::Text(dist_name.clone()),
                    Cell::UInt(n as u64),
                    Cell::Float(s),
                    Cell::Text(name.clone()),
                    Cell::UInt(trials),
                    Cell::Float(est.p_hat),
                    Cell::Float(c_ratio),
                    Cell::Bool(true),
                ]);
            }
        }
        let c_n = regularity::fit_smooth_constant(&points);
        per_n.push(c_n);
        table.push(vec![
            Cell::Text("fit".into()),
            Cell::Text(dist_name.clone()),
            Cell::UInt(n as u64),
            Cell::Float(f64::NAN),
            Cell::Text(String::new()),
            Cell::UInt(trials),
            Cell::Float(f64::NAN),
            Cell::Float(c_n),
            Cell::Bool(c_n.is_finite() && c_n > 0.0),
        ]);
    }
    let c_min = per_n.iter().cloned().fold(f64::INFINITY, f64::min);
    let c_max = per_n.iter().cloned().fold(0.0, f64::max);
    let ratio = c_max / c_min;
    table.push(vec![
        Cell::Text("stability".into()),
        Cell::Text(dist_name),
        Cell::UInt(0),
        Cell::Float(f64::NAN),
        Cell::Text(String::new()),
        Cell::UInt(trials),
        Cell::Float(f64::NAN),
        Cell::Float(ratio),
        Cell::Bool(ratio.is_finite() && ratio < 2.0),
    ]);
    Ok(table)
}

fn verify_sandwich(p: &Params) -> Result<ResultTable, CliError> {
    let trials = trials_of(p, 100_000)?;
    let seed = seed_of(p);
    let (dist, dist_name) = resolve_dist(p, "exp")?;
    let ns: Vec<usize> = match p.n {
        Some(n) if n >= 2 => vec![n as usize],
        Some(n) => {
            return Err(CliError::ParamWindow(format!(
                "N must be at least 2, got {n}"
            )))
        }
        None => vec![2, 3],
    };
    let events_per_n = 20 / ns.len();
    let (lo, hi) = dist.support().ok_or_else(|| {
        CliError::ParamWindow("verify-sandwich needs a compactly supported dist".into())
    })?;
    let ell = hi - lo;

    let mut table = ResultTable::new(
        "verify-sandwich",
        seed,
        vec![
            "density",
            "n",
            "m",
            "cube",
            "event",
            "alpha",
            "p_uniform",
            "p_conditional",
            "ratio_lo",
            "ratio_hi",
            "sandwich_lo",
            "sandwich_hi",
            "pass",
        ],
    );
    let mut counter = 0u64;
    for &n in &ns {
        let part = SupportPartition::new(lo, ell, n, p.m)
            .map_err(|e| CliError::ParamWindow(e.to_string()))?;
        let m = part.cell_count();
        for case in 0..events_per_n as u64 {
            let mut rng = CounterRng::for_trial(derive_seed(seed, 1000 + n as u64), case);
            let cube = CubeIndex(
                (0..n)
                    .map(|_| (rng.next_u64() % m as u64) as usize)
                    .collect(),
            );
            let frac = 0.3 + 0.4 * rng.next_f64();
            let (event_name, report) = if case % 2 == 0 {
                let xi_lo: f64 =
                    cube.coords().iter().map(|&k| part.cell(k).0).sum::<f64>() / n as f64;
                let xi_hi: f64 =
                    cube.coords().iter().map(|&k| part.cell(k).1).sum::<f64>() / n as f64;
                let threshold = xi_lo + frac * (xi_hi - xi_lo);
                (
                    format!("mean<{threshold:.4}"),
                    partition::sandwich_check(
                        &dist,
                        &part,
                        &cube,
                        move |x: &SampleVector| x.mean() < threshold,
                        trials,
                        derive_seed(seed, 2000 + counter),
                    )?,
                )
            } else {
                let coord = (rng.next_u64() % n as u64) as usize;
                let (clo, chi) = part.cell(cube.coords()[coord]);
                let threshold = clo + frac * (chi - clo);
                (
                    format!("x{coord}<{threshold:.4}"),
                    partition::sandwich_check(
                        &dist,
                        &part,
                        &cube,
                        move |x: &SampleVector| x.values()[coord] < threshold,
                        trials,
                        derive_seed(seed, 2000 + counter),
                    )?,
                )
            };
            let cube_text = cube
                .coords()
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join("|");
            table.push(vec![
                Cell::Text(dist_name.clone()),
                Cell::UInt(n as u64),
                Cell::UInt(m as u64),
                Cell::Text(cube_text),
                Cell::Text(event_name),
                Cell::Float(report.alpha),
                Cell::Float(report.p_uniform.p_hat),
                Cell::Float(report.p_conditional.p_hat),
                Cell::Float(report.ratio_lo),
                Cell::Float(report.ratio_hi),
                Cell::Float((-2.0 * report.alpha).exp()),
                Cell::Float((2.0 * report.alpha).exp()),
                Cell::Bool(report.ok),
            ]);
            counter += 1;
        }
    }
    Ok(table)
}

fn gaussian_baseline(p: &Params) -> Result<ResultTable, CliError> {
    let t = p.a.unwrap_or(0.0);
    let s = p.s.unwrap_or(0.1);
    if !(s >= 0.0) {
        return Err(CliError::ParamWindow(format!(
            "s must be nonnegative, got {s}"
        )));
    }
    let trials = trials_of(p, 1_000_000)?;
    let seed = seed_of(p);
    let ns: Vec<u32> = match p.n {
        Some(n) if n >= 2 => vec![n],
        Some(n) => {
            return Err(CliError::ParamWindow(format!(
                "N must be at least 2, got {n}"
            )))
        }
        None => vec![2, 4, 8],
    };
    let dist = DistributionSpec::standard_gaussian();

    let mut table = ResultTable::new(
        "gaussian-baseline",
        seed,
        vec![
            "n", "t", "s", "trials", "p_hat", "ci_lo", "ci_hi", "exact", "bound", "pass",
        ],
    );
    for (i, &n) in ns.iter().enumerate() {
        let exact = regularity::gaussian_mean_interval_prob(n, t, s);
        let bound = regularity::gaussian_interval_bound(n, s)?;
        let est = regularity::interval_hit_prob(
            &dist,
            n as usize,
            &LambdaFunction::constant(t),
            s,
            trials,
            derive_seed(seed, i as u64),
        )?;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        let pass = (est.p_hat - exact).abs() <= 3.0 * sigma + 2.0 / trials as f64
            && exact <= bound + 1e-15
            && est.p_hat <= bound + 3.0 * est.std_err;
        table.push(vec![
            Cell::UInt(n as u64),
            Cell::Float(t),
            Cell::Float(s),
            Cell::UInt(trials),
            Cell::Float(est.p_hat),
            Cell::Float(est.ci95.0),
            Cell::Float(est.ci95.1),
            Cell::Float(exact),
            Cell::Float(bound),
            Cell::Bool(pass),
        ]);
    }
    Ok(table)
}

fn gaussian_strip(p: &Params) -> Result<ResultTable, CliError> {
    let trials = trials_of(p, 10_000_000)?;
    let seed = seed_of(p);
    let s_values: Vec<f64> = match p.s {
        Some(s) if s > 0.0 => vec![s],
        Some(s) => {
            return Err(CliError::ParamWindow(format!(
                "s must be positive, got {s}"
            )))
        }
        None => vec![0.05, 0.1],
    };
    let dist = DistributionSpec::standard_gaussian();

    let mut table = ResultTable::new(
        "gaussian-strip",
        seed,
        vec![
            "s",
            "trials",
            "quadrature",
            "p_hat",
            "ci_lo",
            "ci_hi",
            "pass",
        ],
    );
    for (i, &s) in s_values.iter().enumerate() {
        let q = oracles::gaussian_strip_prob(s, 1e-10)?;
        let est = regularity::interval_hit_prob(
            &dist,
            2,
            &LambdaFunction::quadratic_eta(),
            s,
            trials,
            derive_seed(seed, i as u64),
        )?;
        let sigma = (q * (1.0 - q) / trials as f64).sqrt();
        let pass = (est.p_hat - q).abs() <= 3.0 * sigma + 2.0 / trials as f64;
        table.push(vec![
            Cell::Float(s),
            Cell::UInt(trials),
            Cell::Float(q),
            Cell::Float(est.p_hat),
            Cell::Float(est.ci95.0),
            Cell::Float(est.ci95.1),
            Cell::Bool(pass),
        ]);
    }
    Ok(table)
}

fn anderson_evc(p: &Params) -> Result<ResultTable, CliError> {
    let graph_spec = p.graph.clone().unwrap_or_else(|| "path4".to_string());
    let graph = resolve_graph(&graph_spec)?;
    let n = graph.vertex_count();
    let t = p.a.unwrap_or(1.0);
    let s = p.s.unwrap_or(0.01);
    if !(s > 0.0) {
        return Err(CliError::ParamWindow(format!(
            "s must be positive, got {s}"
        )));
    }
    let trials = trials_of(p, 1_000_000)?;
    let seed = seed_of(p);
    let (dist, _) = resolve_dist(p, "uniform")?;

    let rep = anderson::evc_estimate(&graph, &dist, t, s, trials, derive_seed(seed, 0))?;
    let comb = (rep.p_trace.std_err.powi(2) + rep.p_sum_std_err.powi(2)).sqrt();
    let mut pass = rep.p_trace.p_hat <= rep.p_sum + 3.0 * comb;
    if let Some(bound) = rep.wegner_bound {
        pass = pass && rep.p_trace.p_hat <= bound.min(1.0) + 3.0 * rep.p_trace.std_err;
    }

    let mut table = ResultTable::new(
        "anderson-evc",
        seed,
        vec![
            "graph",
            "n",
            "t",
            "s",
            "trials",
            "p_trace",
            "ci_lo",
            "ci_hi",
            "p_sum",
            "p_sum_std_err",
            "wegner_bound",
            "pass",
        ],
    );
    table.push(vec![
        Cell::Text(graph_spec),
        Cell::UInt(n as u64),
        Cell::Float(t),
        Cell::Float(s),
        Cell::UInt(trials),
        Cell::Float(rep.p_trace.p_hat),
        Cell::Float(rep.p_trace.ci95.0),
        Cell::Float(rep.p_trace.ci95.1),
        Cell::Float(rep.p_sum),
        Cell::Float(rep.p_sum_std_err),
        Cell::Float(rep.wegner_bound.unwrap_or(f64::NAN)),
        Cell::Bool(pass),
    ]);
    Ok(table)
}

fn fiber_oracle(p: &Params) -> Result<ResultTable, CliError> {
    let trials = trials_of(p, 100_000)?;
    let seed = seed_of(p);
    let ell = ell_of(p)?;
    let a = p.a.unwrap_or(0.0);
    let ns: Vec<usize> = match p.n {
        Some(n) if n >= 2 => vec![n as usize],
        Some(n) => {
            return Err(CliError::ParamWindow(format!(
                "N must be at least 2, got {n}"
            )))
        }
        None => (2..=16).collect(),
    };
    let per_n = (trials / ns.len() as u64).max(1);
    let dist =
        DistributionSpec::uniform(a, ell).map_err(|e| CliError::ParamWindow(e.to_string()))?;

    let mut table = ResultTable::new(
        "fiber-oracle",
        seed,
        vec!["n", "samples", "max_abs_err", "tol", "pass"],
    );
    for &n in &ns {
        let mut worst = 0.0f64;
        for trial in 0..per_n {
            let x = mc::sample_iid(&dist, n, trial, derive_seed(seed, n as u64))?;
            let f = fiber_through(&x)?;
            let brute = fiber_length_brute_force(f.offsets(), a, ell);
            worst = worst.max((f.length() - brute).abs());
        }
        table.push(vec![
            Cell::UInt(n as u64),
            Cell::UInt(per_n),
            Cell::Float(worst),
            Cell::Float(1e-12),
            Cell::Bool(worst <= 1e-12),
        ]);
    }
    Ok(table)
}

fn rng_selftest(p: &Params) -> Result<ResultTable, CliError> {
    let trials = trials_of(p, 1_000_000)?;
    let seed = seed_of(p);
    let uniform = DistributionSpec::uniform(0.0, 1.0).map_err(CliError::Engine)?;

    let mut table = ResultTable::new(
        "rng-selftest",
        seed,
        vec!["check", "statistic", "threshold", "pass"],
    );
    let check = |name: &str, statistic: f64, threshold: f64, pass: bool, t: &mut ResultTable| {
        t.push(vec![
            Cell::Text(name.to_string()),
            Cell::Float(statistic),
            Cell::Float(threshold),
            Cell::Bool(pass),
        ]);
    };

    // determinism: identical (dist, N, trial, seed) gives identical samples
    let x1 = mc::sample_iid(&uniform, 8, 123, seed)?;
    let x2 = mc::sample_iid(&uniform, 8, 123, seed)?;
    let max_diff = x1
        .values()
        .iter()
        .zip(x2.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(
        "determinism_same_stream",
        max_diff,
        0.0,
        max_diff == 0.0,
        &mut table,
    );

    // stream separation: different trial indices give different samples
    let x3 = mc::sample_iid(&uniform, 8, 124, seed)?;
    let distinct = x1.values() != x3.values();
    check(
        "stream_separation",
        distinct as u64 as f64,
        1.0,
        distinct,
        &mut table,
    );

    // uniform moments
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for trial in 0..trials {
        let mut rng = CounterRng::for_trial(derive_seed(seed, 10), trial);
        let v = rng.next_f64();
        sum += v;
        sum_sq += v * v;
    }
    let nf = trials as f64;
    let mean = sum / nf;
    let var = sum_sq / nf - mean * mean;
    let tol_mean = 3.0 * (1.0 / 12f64).sqrt() / nf.sqrt();
    let tol_var = 3.0 * ((1.0 / 80.0 - 1.0 / 144.0) / nf).sqrt();
    check(
        "uniform_mean",
        (mean - 0.5).abs(),
        tol_mean,
        (mean - 0.5).abs() <= tol_mean,
        &mut table,
    );
    check(
        "uniform_variance",
        (var - 1.0 / 12.0).abs(),
        tol_var,
        (var - 1.0 / 12.0).abs() <= tol_var,
        &mut table,
    );

    // gaussian moments
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for trial in 0..trials {
        let mut rng = CounterRng::for_trial(derive_seed(seed, 11), trial);
        let v = rng.next_gaussian();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / nf;
    let var = sum_sq / nf - mean * mean;
    let tol_mean = 3.0 / nf.sqrt();
    let tol_var = 3.0 * (2.0 / nf).sqrt();
    check(
        "gaussian_mean",
        mean.abs(),
        tol_mean,
        mean.abs() <= tol_mean,
        &mut table,
    );
    check(
        "gaussian_variance",
        (var - 1.0).abs(),
        tol_var,
        (var - 1.0).abs() <= tol_var,
        &mut table,
    );

    // smooth-density sampling against the exact CDF
    let exp_dist = smooth_exp(0.0, 1.0);
    let ks_trials = trials.min(1_000_000) as usize;
    let mut draws = vec![0.0f64; ks_trials];
    for (trial, slot) in draws.iter_mut().enumerate() {
        let x = mc::sample_iid(&exp_dist, 2, trial as u64, derive_seed(seed, 12))?;
        *slot = x.values()[0];
    }
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ks = 0.0f64;
    for (i, v) in draws.iter().enumerate() {
        let exact = (v.exp() - 1.0) / (std::f64::consts::E - 1.0);
        ks = ks
            .max((exact - i as f64 / ks_trials as f64).abs())
            .max((exact - (i + 1) as f64 / ks_trials as f64).abs());
    }
    // 0.002 at 1e6 draws, scaled as 2/sqrt(n) for other trial counts
    let ks_threshold = 2.0 / (ks_trials as f64).sqrt();
    check(
        "smooth_density_ks",
        ks,
        ks_threshold,
        ks < ks_threshold,
        &mut table,
    );

    // partition invariance of the success counts
    let event = |x: &SampleVector| x.values()[0] + x.values()[1] < 0.8;
    let reference = mc::estimate_event_prob(&uniform, 2, event, 40_000, derive_seed(seed, 13))?;
    let mut worst_gap = 0u64;
    for k in [1u64, 2, 7, 64] {
        let mut total = 0u64;
        let step = 40_000 / k;
        let mut start = 0;
        for i in 0..k {
            let end = if i == k - 1 { 40_000 } else { start + step };
            total += mc::count_successes_in_range(
                &uniform,
                2,
                start..end,
                &event,
                derive_seed(seed, 13),
            )?;
            start = end;
        }
        worst_gap = worst_gap.max(total.abs_diff(reference.successes));
    }
    check(
        "partition_invariance",
        worst_gap as f64,
        0.0,
        worst_gap == 0,
        &mut table,
    );

    // Wilson interval coverage of a known probability
    let mut covered = 0u32;
    for rep in 0..200u64 {
        let est = mc::estimate_event_prob(
            &uniform,
            2,
            |x: &SampleVector| x.values()[0] < 0.3,
            1000,
            derive_seed(seed, 100 + rep),
        )?;
        if est.covers(0.3) {
            covered += 1;
        }
    }
    check(
        "wilson_coverage_200",
        covered as f64,
        180.0,
        covered >= 180,
        &mut table,
    );

    Ok(table)
}
