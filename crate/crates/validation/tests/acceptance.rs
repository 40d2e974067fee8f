//! Acceptance criteria, one test each. Every test writes a `PASS`/`FAIL`
//! line through [`report`] before asserting.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dj_coherence::decision::{
    classical_error, coherence_threshold, quantum_error, LikelihoodMode, PriorSpec, SamplingModel,
};
use dj_coherence::decoherence::{
    coherence_l1, compute_x, exit_probability, exit_probability_bound, full_tensor_oracle,
    overlaps, rho_int, AncillaSpec,
};
use dj_coherence::ensemble::{convergence_gap, hypergeometric_masses_exact};
use dj_coherence::epsilon::{
    classical_error_bounds, exact_tail_probabilities, quantum_miss_probability, EpsilonHypothesis,
    TailModel,
};
use dj_coherence::montecarlo::{run_experiment, Likelihood, McStrategy, Sampling, TrialConfig};
use dj_coherence::walk::run_walk;
use dj_coherence::PhasePattern;
use dj_coherence_validation::{random_pattern, random_qubit, report};

#[test]
fn ac1_ideal_walk() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in (2..=32).step_by(2) {
        let exit = |p: &PhasePattern| {
            let walk = dj_coherence::walk::Walk::new(p.clone()).unwrap();
            let exit = walk.graph().exit_edge();
            run_walk(p, 3).unwrap().probability(&exit)
        };
        let nf = n as f64;
        worst = worst.max(
            (exit(&PhasePattern::constant(n, 1).unwrap()) - nf * nf / ((nf + 1.0) * (nf + 1.0)))
                .abs(),
        );
        worst = worst.max(
            (exit(&PhasePattern::constant(n, -1).unwrap()) - nf * nf / ((nf + 1.0) * (nf + 1.0)))
                .abs(),
        );
        worst = worst.max(exit(&PhasePattern::balanced(n).unwrap()).abs());
    }
    report(
        "AC1",
        "ideal three-step exit probability, N = 2..32",
        worst <= 1e-12,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("max |error| = {worst:.3e} (tol 1e-12)"),
    );
}

#[test]
fn ac2_decoherence_formulas() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=32usize {
        let nf = n as f64;
        let d = (nf + 1.0) * (nf + 1.0);
        for i in 0..=10 {
            let nu = i as f64 / 10.0;
            let g = overlaps(&AncillaSpec::uniform(nu).unwrap(), n).unwrap();
            let c = exit_probability(&PhasePattern::constant(n, 1).unwrap(), &g).unwrap();
            worst = worst.max((c - (nf + nu * nf * (nf - 1.0)) / d).abs());
            if n % 2 == 0 {
                let b = exit_probability(&PhasePattern::balanced(n).unwrap(), &g).unwrap();
                worst = worst.max((b - (1.0 - nu) * nf / d).abs());
            }
        }
    }
    report(
        "AC2",
        "exit probability under uniform decoherence, N <= 32, nu grid",
        worst <= 1e-12,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("max |error| = {worst:.3e} (tol 1e-12)"),
    );
}

#[test]
fn ac3_tensor_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in [4usize, 6, 8, 10] {
        for _ in 0..25 {
            let pattern = random_pattern(n, &mut rng);
            let spec =
                AncillaSpec::per_path((0..n).map(|_| random_qubit(&mut rng)).collect()).unwrap();
            let oracle = full_tensor_oracle(&pattern, &spec).unwrap();
            let formula = exit_probability(&pattern, &overlaps(&spec, n).unwrap()).unwrap();
            worst = worst.max((oracle - formula).abs());
            cases += 1;
        }
    }
    report(
        "AC3",
        "joint particle-ancilla simulation vs overlap formula",
        worst <= 1e-10 && cases == 100,
        start.elapsed(),
        Duration::from_secs(30),
        &format!("{cases} cases, max |error| = {worst:.3e} (tol 1e-10)"),
    );
}

#[test]
fn ac4_coherence_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut bound_failures = 0;
    for _ in 0..500 {
        let n = rng.random_range(2..=16usize);
        let pattern = random_pattern(n, &mut rng);
        let spec = if rng.random_bool(0.3) {
            AncillaSpec::uniform(rng.random_range(0.0..=1.0)).unwrap()
        } else {
            AncillaSpec::per_path((0..n).map(|_| random_qubit(&mut rng)).collect()).unwrap()
        };
        let g = overlaps(&spec, n).unwrap();
        let rho = rho_int(&pattern, &g).unwrap();
        let lhs = coherence_l1(rho.matrix());
        let rhs = (n as f64 + 1.0) * compute_x(&g);
        worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
        if exit_probability_bound(&pattern, &g).is_err() {
            bound_failures += 1;
        }
    }
    report(
        "AC4",
        "l1 coherence equals (N+1)X and exit probability bound",
        worst <= 1e-12 && bound_failures == 0,
        start.elapsed(),
        Duration::from_secs(5),
        &format!("500 cases, max relative gap = {worst:.3e} (tol 1e-12), bound violations = {bound_failures}"),
    );
}

#[derive(Clone, Copy, PartialEq)]
enum Truth {
    ConstantPlus,
    ConstantMinus,
    Balanced,
}

/// Exact Bayes error of "constant iff all samples agree" by listing every
/// (hypothesis, outcome) pair. Bit `i` of an outcome is sample `i` being `+1`.
fn enumerated_classical_error(m: usize) -> BigRational {
    let frac = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let all = (1u32 << m) - 1;
    let balanced_likelihood = BigRational::new(BigInt::one(), BigInt::from(2).pow(m as u32));
    let likelihood = |truth: Truth, outcome: u32| match truth {
        Truth::ConstantPlus if outcome == all => BigRational::one(),
        Truth::ConstantMinus if outcome == 0 => BigRational::one(),
        Truth::Balanced => balanced_likelihood.clone(),
        _ => BigRational::zero(),
    };
    let hypotheses = [
        (Truth::ConstantPlus, frac(1, 4)),
        (Truth::ConstantMinus, frac(1, 4)),
        (Truth::Balanced, frac(1, 2)),
    ];
    let mut err = BigRational::zero();
    for outcome in 0..=all {
        let guess_constant = outcome == 0 || outcome == all;
        for (truth, prior) in &hypotheses {
            if guess_constant != (*truth != Truth::Balanced) {
                err += prior * likelihood(*truth, outcome);
            }
        }
    }
    err
}

#[test]
fn ac5_decision_closed_forms() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for m in 1..=16usize {
        let expected = BigRational::new(BigInt::one(), BigInt::from(2).pow(m as u32));
        let enumerated = enumerated_classical_error(m);
        let closed: BigRational =
            classical_error(m, &PriorSpec::default(), SamplingModel::Iid).unwrap();
        pass &= enumerated == expected && closed == expected;
    }
    details.push(format!("classical 2^-m exact for m <= 16: {pass}"));

    let nu_star = (2f64.sqrt() - 1.0) / 2f64.sqrt();
    let crossing = quantum_error(2, &nu_star, LikelihoodMode::Idealized).unwrap() - 0.25;
    pass &= crossing.abs() <= 1e-12;
    details.push(format!("crossing gap at m=2: {crossing:.3e}"));
    pass &= (coherence_threshold(2).unwrap() - nu_star).abs() <= 1e-12;

    let mut flips = true;
    for m in 1..=10usize {
        let t = coherence_threshold(m).unwrap();
        flips &= (t - (1.0 - 2f64.powf(1.0 / m as f64) / 2.0)).abs() <= 1e-15;
        let classical: f64 = classical_error(m, &PriorSpec::default(), SamplingModel::Iid).unwrap();
        let at = quantum_error(m, &t, LikelihoodMode::Idealized).unwrap();
        let above = quantum_error(m, &(t + 1e-6), LikelihoodMode::Idealized).unwrap();
        flips &= (at - classical).abs() <= 1e-12 && above < classical;
        // At m = 1 the threshold is 0 and there is no smaller coherence.
        if t >= 1e-6 {
            flips &= quantum_error(m, &(t - 1e-6), LikelihoodMode::Idealized).unwrap() > classical;
        }
    }
    pass &= flips;
    details.push(format!("threshold sign flip m <= 10: {flips}"));
    report(
        "AC5",
        "classical and quantum decision errors",
        pass,
        start.elapsed(),
        Duration::from_secs(5),
        &details.join(", "),
    );
}

#[test]
fn ac6a_chernoff_dominance() {
    let start = Instant::now();
    let mut violations = 0;
    let mut pairs = 0;
    let ms = [
        1usize, 2, 3, 5, 8, 13, 20, 32, 50, 80, 128, 200, 320, 500, 800, 1250, 2000, 3200, 5000,
        8000,
    ];
    for i in 1..=10 {
        let eps = 0.05 * i as f64;
        for &m in &ms {
            let b = classical_error_bounds(m, eps).unwrap();
            let (fe, fb) = exact_tail_probabilities(m, eps, TailModel::Iid).unwrap();
            if fe > b.false_eps + 1e-12 || fb > b.false_bal + 1e-12 {
                violations += 1;
            }
            pairs += 1;
        }
    }
    report(
        "AC6a",
        "exact binomial tails below Chernoff bounds",
        violations == 0 && pairs == 200,
        start.elapsed(),
        Duration::from_secs(10),
        &format!("{pairs} (m, eps) pairs, violations = {violations}"),
    );
}

#[test]
fn ac6b_chernoff_matches_small_epsilon_form() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for eps in [0.05f64, 0.1] {
        let m = (8.0 / (eps * eps)).round() as usize;
        let b = classical_error_bounds(m, eps).unwrap();
        let target = (-eps * eps * m as f64 / 8.0).exp();
        for bound in [b.false_eps, b.false_bal] {
            worst = worst.max((bound - target).abs() / target);
        }
        details.push(format!(
            "eps={eps} m={m}: bounds {:.4}, {:.4} vs e^(-eps^2 m/8) = {target:.4}",
            b.false_eps, b.false_bal
        ));
    }
    details.push(format!("max relative deviation {worst:.3} (tol 0.15)"));
    report(
        "AC6b",
        "Chernoff expressions within 15% of e^(-eps^2 m/8) at m eps^2 = 8",
        worst <= 0.15,
        start.elapsed(),
        Duration::from_secs(10),
        &details.join("; "),
    );
}

#[test]
fn ac7_ensemble_convergence() {
    let start = Instant::now();
    let mut monotone = true;
    let mut gaps = Vec::new();
    for p in [0.5, 0.55] {
        let g: Vec<f64> = [100, 1_000, 10_000]
            .iter()
            .map(|&n| convergence_gap(n, p, 10).unwrap())
            .collect();
        monotone &= g.windows(2).all(|w| w[1] < w[0]);
        gaps.push(format!("p={p}: {:.3e} {:.3e} {:.3e}", g[0], g[1], g[2]));
    }
    let mut exact = true;
    let mut checked = 0;
    for n in (10..=200usize).step_by(10) {
        for n_plus in [n / 2, n / 5] {
            for m in [1, 10, n / 2] {
                let total: BigRational = hypergeometric_masses_exact(n, n_plus, m)
                    .unwrap()
                    .into_iter()
                    .sum();
                exact &= total == BigRational::one();
                checked += 1;
            }
        }
    }
    report(
        "AC7",
        "hypergeometric to binomial convergence",
        monotone && exact,
        start.elapsed(),
        Duration::from_secs(10),
        &format!(
            "{}; {checked} exact normalizations, all equal 1: {exact}",
            gaps.join("; ")
        ),
    );
}

#[test]
fn ac8_monte_carlo_calibration() {
    let start = Instant::now();
    let base = TrialConfig {
        n_paths: 20,
        m: 3,
        nu: 0.5,
        epsilon: None,
        strategy: McStrategy::ClassicalDJ,
        experiments: 1_000_000,
        seed: 20_240_601,
        likelihood_mode: Likelihood::Idealized,
        sampling_mode: Sampling::Iid,
        truth: EpsilonHypothesis::Epsilon,
    };
    let configs = [
        ("classical m=3", base.clone()),
        (
            "quantum m=2 nu=0.5",
            TrialConfig {
                m: 2,
                strategy: McStrategy::QuantumDJ,
                ..base.clone()
            },
        ),
        (
            "quantum eps=0.1 nu=1 m=100 miss",
            TrialConfig {
                m: 100,
                nu: 1.0,
                epsilon: Some(0.1),
                strategy: McStrategy::QuantumEps,
                ..base.clone()
            },
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, config) in &configs {
        let r = run_experiment(config).unwrap();
        let again = run_experiment(config).unwrap();
        let identical = r.errors == again.errors && r.z_score.to_bits() == again.z_score.to_bits();
        pass &= r.z_score.abs() <= 4.0 && identical;
        details.push(format!(
            "{name}: {:.5} vs {:.5}, z = {:+.2}, repeat identical: {identical}",
            r.empirical_error, r.analytic_error, r.z_score
        ));
    }
    let miss = quantum_miss_probability(100, 0.1, 1.0).unwrap().exact;
    let targets_ok = [0.125, 0.125, miss]
        .iter()
        .zip(&configs)
        .all(|(t, (_, c))| {
            (dj_coherence::montecarlo::analytic_error(c).unwrap() - t).abs() < 1e-15
        });
    pass &= targets_ok;
    report(
        "AC8",
        "Monte Carlo calibration at 10^6 experiments",
        pass,
        start.elapsed(),
        Duration::from_secs(120),
        &details.join("; "),
    );
}
