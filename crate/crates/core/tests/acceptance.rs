//! Acceptance suite: one test per verification criterion, each printing a
//! pass/fail line with its runtime. Criteria run serially behind a mutex so
//! the stated runtime budgets are measured without contention.

use std::sync::Mutex;
use std::time::Instant;

use condmean_core::anderson::{self, FiniteGraph};
use condmean_core::dist::DistributionSpec;
use condmean_core::fiber::{fiber_length_brute_force, fiber_through};
use condmean_core::mc::{self, CounterRng};
use condmean_core::oracles;
use condmean_core::partition::{self, CubeIndex, SupportPartition};
use condmean_core::regularity::{self, LambdaFunction};
use condmean_core::sample::SampleVector;

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn unit_uniform() -> DistributionSpec {
    DistributionSpec::uniform(0.0, 1.0).unwrap()
}

fn exp_density() -> DistributionSpec {
    DistributionSpec::smooth(0.0, 1.0, 1.0, |v| v.exp() / (std::f64::consts::E - 1.0)).unwrap()
}

fn truncated_gaussian_density() -> DistributionSpec {
    // normal(0.5, 0.35^2) truncated to [0, 1]; |d ln rho/dv| <= 0.5 / 0.35^2
    let sigma = 0.35f64;
    let z = condmean_core::dist::normal_cdf(0.5 / sigma)
        - condmean_core::dist::normal_cdf(-0.5 / sigma);
    let norm = sigma * z * (2.0 * std::f64::consts::PI).sqrt();
    let c_prime = 0.5 / (sigma * sigma) + 1e-9;
    DistributionSpec::smooth(0.0, 1.0, c_prime, move |v| {
        let u = (v - 0.5) / sigma;
        (-0.5 * u * u).exp() / norm
    })
    .unwrap()
}

fn report(id: u32, label: &str, elapsed_s: f64, budget_s: Option<f64>) {
    match budget_s {
        Some(b) => println!("criterion {id:2} PASS  {label}  [{elapsed_s:.2}s of {b:.0}s budget]"),
        None => println!("criterion {id:2} PASS  {label}  [{elapsed_s:.2}s]"),
    }
}

#[test]
fn c01_fiber_length_formula_matches_clipping_oracle() {
    let _g = serial();
    let start = Instant::now();
    let d = unit_uniform();
    let per_n = 100_000 / 15;
    let mut checked = 0u64;
    let mut worst = 0.0f64;
    for n in 2..=16usize {
        for trial in 0..per_n as u64 {
            let x = mc::sample_iid(&d, n, trial, 100 + n as u64).unwrap();
            let f = fiber_through(&x).unwrap();
            let brute = fiber_length_brute_force(f.offsets(), 0.0, 1.0);
            let err = (f.length() - brute).abs();
            worst = worst.max(err);
            assert!(
                err <= 1e-12,
                "n={n} trial={trial}: formula {} clip {brute}",
                f.length()
            );
            checked += 1;
        }
    }
    assert!(checked >= 99_000);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 10.0,
        "runtime {elapsed:.2}s exceeds the 10s budget"
    );
    report(
        1,
        &format!("fiber formula vs clipping oracle, {checked} samples, max err {worst:.2e}"),
        elapsed,
        Some(10.0),
    );
}

#[test]
fn c02_short_fiber_probability_obeys_proof_bound_and_matches_mc() {
    let _g = serial();
    let start = Instant::now();

    // exact probability never exceeds the proof constant rho^2 r^2 N
    for n in 2..=32u32 {
        for i in 1..=20 {
            let r = (n as f64).sqrt() * i as f64 / 20.0;
            let exact = oracles::small_fiber_prob_exact(n, 1.0, r).unwrap();
            let bound = oracles::small_fiber_bound_proof(n, 1.0, r);
            assert!(
                exact <= bound + 1e-12,
                "n={n} r={r}: exact {exact} > bound {bound}"
            );
        }
    }

    // Monte Carlo agrees with the exact law, 1e6 trials per N, 3 sigma
    let trials = 1_000_000u64;
    for n in 2..=8usize {
        let thresholds: Vec<f64> = [2, 5, 10, 15, 20]
            .into_iter()
            .map(|i| (n as f64).sqrt() * i as f64 / 20.0)
            .collect();
        let mut hits = vec![0u64; thresholds.len()];
        let mut values = vec![0.0f64; n];
        let sqrt_n = (n as f64).sqrt();
        for trial in 0..trials {
            let mut rng = CounterRng::for_trial(200 + n as u64, trial);
            for v in values.iter_mut() {
                *v = rng.next_f64();
            }
            let mut lo = values[0];
            let mut hi = values[0];
            for &v in &values[1..] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let length = sqrt_n * (1.0 - (hi - lo));
            for (h, &r) in hits.iter_mut().zip(&thresholds) {
                if length < r {
                    *h += 1;
                }
            }
        }
        for (h, &r) in hits.iter().zip(&thresholds) {
            let exact = oracles::small_fiber_prob_exact(n as u32, 1.0, r).unwrap();
            let p_hat = *h as f64 / trials as f64;
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (p_hat - exact).abs() <= 3.0 * sigma + 2.0 / trials as f64,
                "n={n} r={r}: empirical {p_hat} exact {exact}"
            );
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 120.0,
        "runtime {elapsed:.2}s exceeds the 2min budget"
    );
    report(
        2,
        "short-fiber law within proof bound, MC matches exact for N=2..8",
        elapsed,
        Some(120.0),
    );
}

#[test]
fn c03_stated_quarter_constant_fails_where_proof_constant_holds() {
    let _g = serial();
    let start = Instant::now();
    let exact = oracles::small_fiber_prob_exact(3, 1.0, 0.1).unwrap();
    let stated = oracles::small_fiber_bound_stated(3, 1.0, 0.1);
    let proof = oracles::small_fiber_bound_proof(3, 1.0, 0.1);
    assert!((stated - 0.0075).abs() < 1e-15);
    // the printed quarter-constant bound is genuinely violated at N = 3
    assert!(
        exact > stated,
        "expected the quarter-constant bound to fail: exact {exact} stated {stated}"
    );
    assert!(exact <= proof);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        3,
        &format!(
            "quarter-constant witness: exact {exact:.6} > stated {stated} (proof bound {proof})"
        ),
        elapsed,
        None,
    );
}

#[test]
fn c04_uniform_hit_probability_within_cubic_bound() {
    let _g = serial();
    let start = Instant::now();
    let trials = 1_000_000u64;
    let mut runs = 0u32;
    for n in [2usize, 3, 4, 6] {
        for ell in [1.0f64, 2.0] {
            let d = DistributionSpec::uniform(0.0, ell).unwrap();
            let lambdas: Vec<LambdaFunction> = vec![
                LambdaFunction::constant(0.25 * ell),
                LambdaFunction::constant(0.45 * ell),
                LambdaFunction::constant(0.75 * ell),
                LambdaFunction::user_defined(move |y: &[f64]| {
                    let m = y.iter().sum::<f64>() / y.len() as f64;
                    (m * m).clamp(0.0, ell)
                }),
            ];
            for s in [1e-3f64, 3e-3, 1e-2] {
                let bound = regularity::theorem_bound_uniform(n as u32, ell, s)
                    .unwrap()
                    .min(1.0);
                for (li, lam) in lambdas.iter().enumerate() {
                    let seed =
                        3000 + (n as u64) * 97 + (ell as u64) * 31 + (s * 1e4) as u64 + li as u64;
                    let est = regularity::interval_hit_prob(&d, n, lam, s, trials, seed).unwrap();
                    assert!(
                        est.p_hat <= bound + 3.0 * est.std_err,
                        "n={n} ell={ell} s={s} lambda#{li}: p {} bound {bound}",
                        est.p_hat
                    );
                    runs += 1;
                }
            }
        }
    }
    assert_eq!(runs, 96);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 600.0,
        "runtime {elapsed:.2}s exceeds the 10min budget"
    );
    report(
        4,
        "96-cell uniform grid respects min(1, 3N^3 s / l) + 3 sigma",
        elapsed,
        Some(600.0),
    );
}

#[test]
fn c05_gaussian_baseline_matches_exact_law_and_bound() {
    let _g = serial();
    let start = Instant::now();
    let d = DistributionSpec::standard_gaussian();
    let trials = 1_000_000u64;
    let s = 0.1;
    for n in [2u32, 4, 8] {
        for t in [0.0f64, 0.25] {
            let exact = regularity::gaussian_mean_interval_prob(n, t, s);
            let bound = regularity::gaussian_interval_bound(n, s).unwrap();
            // the exact interval probability respects the density bound
            assert!(exact <= bound + 1e-15, "n={n} t={t}");
            let est = regularity::interval_hit_prob(
                &d,
                n as usize,
                &LambdaFunction::constant(t),
                s,
                trials,
                5000 + n as u64 * 11 + (t * 100.0) as u64,
            )
            .unwrap();
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (est.p_hat - exact).abs() <= 3.0 * sigma,
                "n={n} t={t}: empirical {} exact {exact}",
                est.p_hat
            );
            assert!(est.p_hat <= bound + 3.0 * est.std_err);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 120.0,
        "runtime {elapsed:.2}s exceeds the 2min budget"
    );
    report(
        5,
        "Gaussian mean matches N(0,1/N) interval law and sqrt(N)|I|/sqrt(2pi)",
        elapsed,
        Some(120.0),
    );
}

#[test]
fn c06_gaussian_strip_matches_quadrature() {
    let _g = serial();
    let start = Instant::now();
    let d = DistributionSpec::standard_gaussian();
    let trials = 10_000_000u64;
    for (i, s) in [0.05f64, 0.1].into_iter().enumerate() {
        let q = oracles::gaussian_strip_prob(s, 1e-10).unwrap();
        let est = regularity::interval_hit_prob(
            &d,
            2,
            &LambdaFunction::quadratic_eta(),
            s,
            trials,
            6000 + i as u64,
        )
        .unwrap();
        let sigma = (q * (1.0 - q) / trials as f64).sqrt();
        assert!(
            (est.p_hat - q).abs() <= 3.0 * sigma,
            "s={s}: empirical {} quadrature {q}",
            est.p_hat
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 180.0,
        "runtime {elapsed:.2}s exceeds the 3min budget"
    );
    report(
        6,
        "curvilinear strip probability matches quadrature at 1e7 trials",
        elapsed,
        Some(180.0),
    );
}

#[test]
fn c07_conditional_law_sandwich_on_cubes() {
    let _g = serial();
    let start = Instant::now();
    let d = exp_density();
    let trials = 100_000u64;
    let mut event_counter = 0u64;
    for n in [2usize, 3] {
        let p = SupportPartition::new(0.0, 1.0, n, None).unwrap();
        let m = p.cell_count();
        for case in 0..10u64 {
            let mut rng = CounterRng::for_trial(7000 + n as u64, case);
            let cube = CubeIndex(
                (0..n)
                    .map(|_| (rng.next_u64() % m as u64) as usize)
                    .collect(),
            );
            // alternate between mean-threshold events and coordinate events,
            // with thresholds in the middle of the cube so both laws see mass
            let frac = 0.3 + 0.4 * rng.next_f64();
            let report = if case % 2 == 0 {
                // threshold inside the cube's exact xi-range so both laws
                // put decent mass on each side
                let xi_lo: f64 = cube.coords().iter().map(|&k| p.cell(k).0).sum::<f64>() / n as f64;
                let xi_hi: f64 = cube.coords().iter().map(|&k| p.cell(k).1).sum::<f64>() / n as f64;
                let threshold = xi_lo + frac * (xi_hi - xi_lo);
                partition::sandwich_check(
                    &d,
                    &p,
                    &cube,
                    move |x: &SampleVector| x.mean() < threshold,
                    trials,
                    7100 + event_counter,
                )
            } else {
                let coord = (rng.next_u64() % n as u64) as usize;
                let (clo, chi) = p.cell(cube.coords()[coord]);
                let threshold = clo + frac * (chi - clo);
                partition::sandwich_check(
                    &d,
                    &p,
                    &cube,
                    move |x: &SampleVector| x.values()[coord] < threshold,
                    trials,
                    7100 + event_counter,
                )
            }
            .unwrap();
            assert!(
                report.ok,
                "n={n} case={case}: ratio [{:.4}, {:.4}] outside e^(+-2a), alpha={:.4}",
                report.ratio_lo, report.ratio_hi, report.alpha
            );
            event_counter += 1;
        }
    }
    assert_eq!(event_counter, 20);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 300.0,
        "runtime {elapsed:.2}s exceeds the 5min budget"
    );
    report(
        7,
        "20 random events satisfy the e^(+-2 alpha) sandwich with 3 sigma slack",
        elapsed,
        Some(300.0),
    );
}

#[test]
fn c08_smooth_theorem_constant_is_stable_across_n() {
    let _g = serial();
    let start = Instant::now();
    let trials = 1_000_000u64;
    for (di, d) in [exp_density(), truncated_gaussian_density()]
        .into_iter()
        .enumerate()
    {
        let ell = 1.0;
        let mut per_n_constants = Vec::new();
        for n in [2u32, 3, 4] {
            let window = ell / (n as f64 * n as f64);
            let mut points = Vec::new();
            for (si, frac) in [0.25f64, 0.5, 0.8].into_iter().enumerate() {
                let s = frac * window;
                assert!(s < window);
                let lambdas = [
                    LambdaFunction::constant(0.5 - s / 2.0),
                    LambdaFunction::user_defined(move |y: &[f64]| {
                        let m = y.iter().sum::<f64>() / y.len() as f64;
                        (m * m).clamp(0.0, ell)
                    }),
                ];
                for (li, lam) in lambdas.iter().enumerate() {
                    let seed =
                        8000 + di as u64 * 1000 + n as u64 * 100 + si as u64 * 10 + li as u64;
                    let est = regularity::interval_hit_prob(&d, n as usize, lam, s, trials, seed)
                        .unwrap();
                    points.push((n, s, est.p_hat));
                }
            }
            let c_n = regularity::fit_smooth_constant(&points);
            assert!(c_n.is_finite() && c_n > 0.0);
            per_n_constants.push(c_n);
        }
        let c_min = per_n_constants
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let c_max = per_n_constants.iter().cloned().fold(0.0, f64::max);
        assert!(
            c_max / c_min < 2.0,
            "density #{di}: fitted constants {per_n_constants:?} vary by more than 2x"
        );
        println!("  density #{di}: fitted C per N = {per_n_constants:?}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        "fitted C N s constant finite and within 2x across N = 2, 3, 4",
        elapsed,
        None,
    );
}

#[test]
fn c09_eigenvalue_shift_identity() {
    let _g = serial();
    let start = Instant::now();
    let d = unit_uniform();
    let mut worst = 0.0f64;
    for (gi, graph) in [
        FiniteGraph::path(6).unwrap(),
        FiniteGraph::cycle(8).unwrap(),
        FiniteGraph::grid2d(3, 3).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        for trial in 0..1000u64 {
            let inst = anderson::build_dso(graph, &d, trial, 9000 + gi as u64).unwrap();
            let rep = anderson::shift_identity_check(&inst).unwrap();
            worst = worst.max(rep.max_deviation / rep.tol * 1e-10);
            assert!(
                rep.ok,
                "graph #{gi} trial {trial}: deviation {} over tol {}",
                rep.max_deviation, rep.tol
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 30.0,
        "runtime {elapsed:.2}s exceeds the 30s budget"
    );
    report(
        9,
        &format!("sorted eig(H) = xi + sorted eig(A) on 3000 instances, worst rel dev {worst:.2e}"),
        elapsed,
        Some(30.0),
    );
}

#[test]
fn c10_trace_probability_within_union_and_wegner_bounds() {
    let _g = serial();
    let start = Instant::now();
    let d = unit_uniform();
    let trials = 1_000_000u64;
    let t = 1.0;
    for (gi, graph) in [
        FiniteGraph::path(4).unwrap(),
        FiniteGraph::cycle(6).unwrap(),
        FiniteGraph::grid2d(3, 3).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        let n = graph.vertex_count();
        for s in [1e-3f64, 1e-2] {
            let rep = anderson::evc_estimate(graph, &d, t, s, trials, 9500 + gi as u64).unwrap();
            let comb = (rep.p_trace.std_err.powi(2) + rep.p_sum_std_err.powi(2)).sqrt();
            assert!(
                rep.p_trace.p_hat <= rep.p_sum + 3.0 * comb,
                "graph #{gi} s={s}: trace {} sum {}",
                rep.p_trace.p_hat,
                rep.p_sum
            );
            let wegner = rep.wegner_bound.unwrap().min(1.0);
            assert!(
                rep.p_trace.p_hat <= wegner + 3.0 * rep.p_trace.std_err,
                "graph #{gi} (n={n}) s={s}: trace {} wegner {wegner}",
                rep.p_trace.p_hat
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 600.0,
        "runtime {elapsed:.2}s exceeds the 10min budget"
    );
    report(
        10,
        "trace probability within union bound and N min(1, 3N^3 s/l)",
        elapsed,
        Some(600.0),
    );
}
