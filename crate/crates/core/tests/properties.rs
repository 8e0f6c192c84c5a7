//! Cross-module invariants: algebraic properties under proptest and
//! statistical cross-checks of the Monte Carlo engine against the exact
//! oracles.

use condmean_core::anderson::{self, FiniteGraph, SymMatrix};
use condmean_core::dist::{normal_cdf, DistributionSpec};
use condmean_core::fiber::{
    conditional_interval_prob_uniform, fiber_length_brute_force, fiber_through,
};
use condmean_core::mc::{self, CounterRng};
use condmean_core::oracles;
use condmean_core::regularity::{self, LambdaFunction};
use condmean_core::sample::{helmert_inverse, helmert_transform, SampleVector};
use proptest::prelude::*;

fn unit_uniform() -> DistributionSpec {
    DistributionSpec::uniform(0.0, 1.0).unwrap()
}

fn values_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 2..=64)
}

proptest! {
    #[test]
    fn decompose_reconstruct_round_trip(values in values_strategy()) {
        let x = SampleVector::new(values.clone(), unit_uniform()).unwrap();
        let d = x.decompose();
        // fluctuations sum to zero and the offsets are coordinate differences
        let n = values.len();
        let max_abs = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let eta_sum: f64 = d.eta.iter().sum();
        prop_assert!(eta_sum.abs() <= 1e-12 * n as f64 * max_abs.max(1e-300));
        prop_assert!((d.xi_tilde - (n as f64).sqrt() * d.xi).abs() <= 1e-15 * d.xi_tilde.abs().max(1.0));
        for (i, y) in d.y.iter().enumerate() {
            prop_assert!((y - (values[i] - values[n - 1])).abs() <= 1e-15);
        }
        let back = d.reconstruct();
        for (a, b) in back.iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn helmert_round_trip(values in values_strategy()) {
        let coords = helmert_transform(&values).unwrap();
        let back = helmert_inverse(&coords).unwrap();
        for (a, b) in back.iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        // first coordinate is the rescaled mean
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        prop_assert!((coords[0] - n.sqrt() * mean).abs() <= 1e-12);
    }

    #[test]
    fn fluctuations_are_translation_invariant(values in prop::collection::vec(0.0..1.0f64, 2..=32), t in -3.0..3.0f64) {
        let wide = DistributionSpec::uniform(-5.0, 10.0).unwrap();
        let x = SampleVector::new(values.clone(), wide.clone()).unwrap();
        let shifted = SampleVector::new(values.iter().map(|v| v + t).collect(), wide).unwrap();
        let d = x.decompose();
        let ds = shifted.decompose();
        for (a, b) in d.eta.iter().zip(&ds.eta) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in d.y.iter().zip(&ds.y) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn fiber_formula_matches_clipping(values in prop::collection::vec(0.0..1.0f64, 2..=16)) {
        let x = SampleVector::new(values, unit_uniform()).unwrap();
        let f = fiber_through(&x).unwrap();
        let brute = fiber_length_brute_force(f.offsets(), 0.0, 1.0);
        prop_assert!((f.length() - brute).abs() <= 1e-12);
    }

    #[test]
    fn conditional_prob_monotone_in_s(values in prop::collection::vec(0.0..1.0f64, 2..=8), t in -0.5..1.0f64) {
        let x = SampleVector::new(values, unit_uniform()).unwrap();
        let f = fiber_through(&x).unwrap();
        let mut prev = 0.0;
        for s in [0.0, 0.01, 0.05, 0.2, 1.0, 2.0] {
            let p = conditional_interval_prob_uniform(&f, t, s).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(p + 1e-15 >= prev);
            prev = p;
        }
    }
}

// ---------------------------------------------------------------------------
// statistical validation of the closed-form oracles

#[test]
fn range_cdf_matches_empirical_cdf() {
    // 20 r-values, N in 2..=10, 1e6 trials per N, 3 sigma binomial tolerance
    let trials = 1_000_000u64;
    for n in 2..=10usize {
        let seed = 4000 + n as u64;
        let thresholds: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let mut hits = vec![0u64; thresholds.len()];
        let mut values = vec![0.0f64; n];
        for trial in 0..trials {
            let mut rng = CounterRng::for_trial(seed, trial);
            for v in values.iter_mut() {
                *v = rng.next_f64();
            }
            let mut lo = values[0];
            let mut hi = values[0];
            for &v in &values[1..] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let range = hi - lo;
            for (h, &r) in hits.iter_mut().zip(&thresholds) {
                if range <= r {
                    *h += 1;
                }
            }
        }
        for (h, &r) in hits.iter().zip(&thresholds) {
            let exact = oracles::range_cdf_uniform(n as u32, 1.0, r).unwrap();
            let p_hat = *h as f64 / trials as f64;
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (p_hat - exact).abs() <= 3.0 * sigma + 2.0 / trials as f64,
                "n={n} r={r}: empirical {p_hat} exact {exact}"
            );
        }
    }
}

#[test]
fn small_fiber_event_matches_exact_probability() {
    // event |fiber| < 0.1 for N = 3 uniforms, compared with the closed form
    let d = unit_uniform();
    let exact = oracles::small_fiber_prob_exact(3, 1.0, 0.1).unwrap();
    let trials = 1_000_000u64;
    let est = mc::estimate_event_prob(
        &d,
        3,
        |x| {
            let f = fiber_through(x).unwrap();
            f.length() < 0.1
        },
        trials,
        51,
    )
    .unwrap();
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!(
        (est.p_hat - exact).abs() <= 3.0 * sigma,
        "empirical {} exact {exact}",
        est.p_hat
    );
}

#[test]
fn conditional_law_matches_banded_monte_carlo() {
    // check the uniform conditional law on one fiber directly: condition
    // two-dimensional samples on a thin band |Y_1 - y0| < width around fixed
    // offsets and compare the hit frequency with the closed-form overlap
    let y0 = 0.3f64;
    let band = 1e-3;
    let (t, s) = (0.55f64, 0.2f64);
    let fiber = condmean_core::fiber::fiber_from_offsets(&[y0], 0.0, 1.0);
    let expected = conditional_interval_prob_uniform(&fiber, t, s).unwrap();

    let trials = 40_000_000u64;
    let mut in_band = 0u64;
    let mut hits = 0u64;
    for trial in 0..trials {
        let mut rng = CounterRng::for_trial(81, trial);
        let x1 = rng.next_f64();
        let x2 = rng.next_f64();
        if (x1 - x2 - y0).abs() < band {
            in_band += 1;
            let xi = 0.5 * (x1 + x2);
            if xi >= t && xi <= t + s {
                hits += 1;
            }
        }
    }
    assert!(in_band > 10_000, "band too thin: {in_band} samples");
    let p = hits as f64 / in_band as f64;
    let sigma = (expected * (1.0 - expected) / in_band as f64).sqrt();
    // the band blurs the fiber by O(band) in the xi direction
    assert!(
        (p - expected).abs() <= 3.0 * sigma + 2.0 * band,
        "banded estimate {p} vs conditional law {expected} ({in_band} in band)"
    );
}

#[test]
fn gaussian_strip_quadrature_smoke() {
    // reduced-trials version of the strip comparison
    let s = 0.1;
    let q = oracles::gaussian_strip_prob(s, 1e-10).unwrap();
    let trials = 1_000_000u64;
    let est = regularity::interval_hit_prob(
        &DistributionSpec::standard_gaussian(),
        2,
        &LambdaFunction::quadratic_eta(),
        s,
        trials,
        53,
    )
    .unwrap();
    let sigma = (q * (1.0 - q) / trials as f64).sqrt();
    assert!(
        (est.p_hat - q).abs() <= 3.0 * sigma,
        "empirical {} quadrature {q}",
        est.p_hat
    );
}

#[test]
fn gaussian_hit_probability_is_unconditional() {
    // for Gaussian samples the mean is independent of the fluctuations, so a
    // constant endpoint gives exactly the unconditional interval probability
    for (n, t) in [(2u32, 0.0f64), (4, 0.1), (8, -0.2)] {
        let s = 0.1;
        let exact = regularity::gaussian_mean_interval_prob(n, t, s);
        let trials = 400_000u64;
        let est = regularity::interval_hit_prob(
            &DistributionSpec::standard_gaussian(),
            n as usize,
            &LambdaFunction::constant(t),
            s,
            trials,
            60 + n as u64,
        )
        .unwrap();
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (est.p_hat - exact).abs() <= 3.0 * sigma,
            "n={n} t={t}: empirical {} exact {exact}",
            est.p_hat
        );
        // sanity against the closed-form normal CDF route
        let via_cdf = normal_cdf((t + s) * (n as f64).sqrt()) - normal_cdf(t * (n as f64).sqrt());
        assert!((exact - via_cdf).abs() < 1e-15);
    }
}

// ---------------------------------------------------------------------------
// eigenvalue solver against closed-form characteristic polynomials

fn eig2_closed(a: f64, b: f64, d: f64) -> [f64; 2] {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    [(tr - disc) / 2.0, (tr + disc) / 2.0]
}

fn eig3_closed(m: &SymMatrix) -> [f64; 3] {
    // roots of x^3 - c2 x^2 + c1 x - c0 via the trigonometric formula
    let (a, b, c) = (m.get(0, 0), m.get(0, 1), m.get(0, 2));
    let (d, e, f) = (m.get(1, 1), m.get(1, 2), m.get(2, 2));
    let c2 = a + d + f;
    let c1 = a * d + a * f + d * f - b * b - c * c - e * e;
    let c0 = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
    let p = c1 - c2 * c2 / 3.0;
    let q = -2.0 * c2 * c2 * c2 / 27.0 + c1 * c2 / 3.0 - c0;
    // depressed cubic t^3 + p t + q = 0 with three real roots
    if p.abs() < 1e-14 {
        let root = c2 / 3.0;
        return [root, root, root];
    }
    let amp = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (amp * p)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut roots = [0.0f64; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        *r = amp * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + c2 / 3.0;
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

#[test]
fn jacobi_matches_characteristic_polynomial_roots() {
    for trial in 0..2_000u64 {
        let mut rng = CounterRng::for_trial(91, trial);
        // random symmetric 2x2
        let (a, b, d) = (
            2.0 * rng.next_f64() - 1.0,
            2.0 * rng.next_f64() - 1.0,
            2.0 * rng.next_f64() - 1.0,
        );
        let mut m2 = SymMatrix::zero(2);
        m2.set(0, 0, a);
        m2.set_sym(0, 1, b);
        m2.set(1, 1, d);
        let eigs = anderson::sym_eigenvalues(&m2, 1e-14).unwrap();
        for (got, want) in eigs.iter().zip(eig2_closed(a, b, d)) {
            assert!(
                (got - want).abs() < 1e-9,
                "2x2 trial {trial}: {got} vs {want}"
            );
        }

        // random symmetric 3x3
        let mut m3 = SymMatrix::zero(3);
        for i in 0..3 {
            m3.set(i, i, 2.0 * rng.next_f64() - 1.0);
        }
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            m3.set_sym(i, j, 2.0 * rng.next_f64() - 1.0);
        }
        let eigs = anderson::sym_eigenvalues(&m3, 1e-14).unwrap();
        for (got, want) in eigs.iter().zip(eig3_closed(&m3)) {
            assert!(
                (got - want).abs() < 1e-9,
                "3x3 trial {trial}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn eigenvalue_lambda_consistent_with_direct_spectral_count() {
    // two routes to P(lambda_j(H) in [t, t+s]): the fluctuation-measurable
    // endpoint fed to the interval-hit estimator, and direct Monte Carlo over
    // operator spectra; independent seeds, 3 sigma agreement
    let graph = FiniteGraph::path(4).unwrap();
    let d = unit_uniform();
    let (j, t, s) = (1usize, 0.4f64, 0.05f64);
    let trials = 150_000u64;

    let lam = anderson::eigenvalue_lambda(&graph, j, t).unwrap();
    let via_lambda = regularity::interval_hit_prob(&d, 4, &lam, s, trials, 71).unwrap();

    let direct = mc::estimate_event_prob(
        &d,
        4,
        |x| {
            let inst = anderson::DsoInstance::with_potential(&graph, x.values().to_vec()).unwrap();
            let eigs = anderson::sym_eigenvalues(inst.h(), 1e-12).unwrap();
            eigs[j] >= t && eigs[j] <= t + s
        },
        trials,
        72,
    )
    .unwrap();

    let sigma = (via_lambda.std_err.powi(2) + direct.std_err.powi(2)).sqrt();
    assert!(
        (via_lambda.p_hat - direct.p_hat).abs() <= 3.0 * sigma,
        "lambda route {} direct {}",
        via_lambda.p_hat,
        direct.p_hat
    );
}

#[test]
fn small_fiber_proof_bound_on_dense_grid() {
    for n in 2..=32u32 {
        let r_max = (n as f64).sqrt();
        for i in 1..=200 {
            let r = r_max * i as f64 / 200.0;
            let exact = oracles::small_fiber_prob_exact(n, 1.0, r).unwrap();
            let bound = oracles::small_fiber_bound_proof(n, 1.0, r);
            assert!(exact <= bound + 1e-12, "n={n} r={r}");
        }
    }
}
