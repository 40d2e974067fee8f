//! Monte Carlo estimates of the decision error rates.
//!
//! Each experiment samples a hypothesis and a phase pattern, draws the
//! measurement outcomes from exact probabilities, applies the decision rule
//! and records whether it erred. Experiment `i` uses a ChaCha8 stream keyed
//! by `(seed, i)`, so counts do not depend on thread scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{classical_error, quantum_error, LikelihoodMode, PriorSpec, SamplingModel};
use crate::decoherence::exit_probability_uniform;
use crate::epsilon::{
    classify_samples, exact_tail_probabilities, quantum_false_epsilon, quantum_miss_probability,
    quantum_miss_probability_exact_n, EpsilonHypothesis, TailModel,
};
use crate::error::{Error, Result};
use crate::walk::{epsilon_plus_count, PhasePattern, Promise};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum McStrategy {
    ClassicalDJ,
    QuantumDJ,
    ClassicalEps,
    QuantumEps,
}

/// Detection probabilities used when simulating walk runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Likelihood {
    Idealized,
    ExactN,
}

/// How classical samples pick shifters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampling {
    Iid,
    WithoutReplacement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n_paths: usize,
    pub m: usize,
    pub nu: f64,
    pub epsilon: Option<f64>,
    pub strategy: McStrategy,
    pub experiments: u64,
    pub seed: u64,
    pub likelihood_mode: Likelihood,
    pub sampling_mode: Sampling,
    /// Hidden hypothesis for the ε strategies. The DJ strategies draw it from
    /// the `(1/4, 1/4, 1/2)` prior instead.
    pub truth: EpsilonHypothesis,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.experiments == 0 {
            return Err(Error::InvalidParameter(
                "need at least one experiment".into(),
            ));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        if self.n_paths < 2 {
            return Err(Error::TooFewPaths(self.n_paths));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::InvalidParameter(format!(
                "nu = {} outside [0, 1]",
                self.nu
            )));
        }
        if !self.n_paths.is_multiple_of(2) {
            return Err(Error::InvalidPattern(format!(
                "balanced needs even N, got {}",
                self.n_paths
            )));
        }
        if self.sampling_mode == Sampling::WithoutReplacement && self.m > self.n_paths {
            return Err(Error::Infeasible(format!(
                "m = {} exceeds N = {}",
                self.m, self.n_paths
            )));
        }
        match self.strategy {
            McStrategy::ClassicalDJ | McStrategy::QuantumDJ => Ok(()),
            McStrategy::ClassicalEps | McStrategy::QuantumEps => {
                epsilon_plus_count(self.n_paths, self.epsilon()?)?;
                Ok(())
            }
        }
    }

    fn epsilon(&self) -> Result<f64> {
        self.epsilon
            .ok_or_else(|| Error::InvalidParameter("strategy needs epsilon".into()))
    }

    fn likelihood(&self) -> LikelihoodMode {
        match self.likelihood_mode {
            Likelihood::Idealized => LikelihoodMode::Idealized,
            Likelihood::ExactN => LikelihoodMode::ExactN {
                n_paths: self.n_paths,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub errors: u64,
    pub experiments: u64,
    pub empirical_error: f64,
    /// `sqrt(ê(1-ê)/experiments)`.
    pub std_error: f64,
    pub analytic_error: f64,
    /// `(ê - analytic)/std_error`; `0` or `±inf` when `std_error` is `0`.
    pub z_score: f64,
}

impl MCResult {
    pub fn new(errors: u64, experiments: u64, analytic_error: f64) -> Self {
        let e = errors as f64 / experiments as f64;
        let std_error = (e * (1.0 - e) / experiments as f64).sqrt();
        let diff = e - analytic_error;
        let z_score = if std_error > 0.0 {
            diff / std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        Self {
            errors,
            experiments,
            empirical_error: e,
            std_error,
            analytic_error,
            z_score,
        }
    }
}

/// Uniform draw from the patterns with the composition fixed by `promise`.
pub fn sample_pattern<R: Rng + ?Sized>(
    promise: Promise,
    n_paths: usize,
    rng: &mut R,
) -> Result<PhasePattern> {
    let plus = match promise {
        Promise::Constant(sign) => return PhasePattern::constant(n_paths, sign),
        Promise::Balanced => {
            if !n_paths.is_multiple_of(2) {
                return Err(Error::InvalidPattern(format!(
                    "balanced needs even N, got {n_paths}"
                )));
            }
            n_paths / 2
        }
        Promise::EpsilonBiased(eps) => epsilon_plus_count(n_paths, eps)?,
    };
    let mut signs: Vec<i8> = (0..n_paths)
        .map(|i| if i < plus { 1 } else { -1 })
        .collect();
    signs.shuffle(rng);
    PhasePattern::new(signs, promise)
}

/// Per-run probability of finding the particle on the exit edge.
pub fn detection_probability(pattern: &PhasePattern, nu: f64, mode: Likelihood) -> f64 {
    match mode {
        Likelihood::ExactN => exit_probability_uniform(pattern, nu),
        Likelihood::Idealized => match pattern.promise() {
            Promise::Constant(_) => nu,
            Promise::Balanced => 0.0,
            Promise::EpsilonBiased(eps) => nu * eps * eps,
        },
    }
}

/// `m` independent detector readings, 1 for a detection.
pub fn simulate_quantum_trials<R: Rng + ?Sized>(
    pattern: &PhasePattern,
    nu: f64,
    m: usize,
    mode: Likelihood,
    rng: &mut R,
) -> Vec<u8> {
    let p = detection_probability(pattern, nu, mode).clamp(0.0, 1.0);
    (0..m).map(|_| rng.random_bool(p) as u8).collect()
}

/// `m` sampled shifter signs.
pub fn simulate_classical_trials<R: Rng + ?Sized>(
    pattern: &PhasePattern,
    m: usize,
    mode: Sampling,
    rng: &mut R,
) -> Result<Vec<i8>> {
    let signs = pattern.signs();
    let n = signs.len();
    match mode {
        Sampling::Iid => Ok((0..m).map(|_| signs[rng.random_range(0..n)]).collect()),
        Sampling::WithoutReplacement => {
            if m > n {
                return Err(Error::Infeasible(format!("m = {m} exceeds N = {n}")));
            }
            Ok(rand::seq::index::sample(rng, n, m)
                .into_iter()
                .map(|i| signs[i])
                .collect())
        }
    }
}

/// Closed-form error rate the experiment estimates.
pub fn analytic_error(config: &TrialConfig) -> Result<f64> {
    config.validate()?;
    let m = config.m;
    match config.strategy {
        McStrategy::ClassicalDJ => {
            let model = match config.sampling_mode {
                Sampling::Iid => SamplingModel::Iid,
                Sampling::WithoutReplacement => SamplingModel::WithoutReplacement {
                    n_paths: config.n_paths,
                },
            };
            classical_error(m, &PriorSpec::default(), model)
        }
        McStrategy::QuantumDJ => quantum_error(m, &config.nu, config.likelihood()),
        McStrategy::ClassicalEps => {
            let model = match config.sampling_mode {
                Sampling::Iid => TailModel::Iid,
                Sampling::WithoutReplacement => TailModel::Hypergeometric {
                    n_paths: config.n_paths,
                },
            };
            let (false_eps, false_bal) = exact_tail_probabilities(m, config.epsilon()?, model)?;
            Ok(match config.truth {
                EpsilonHypothesis::Balanced => false_eps,
                EpsilonHypothesis::Epsilon => false_bal,
            })
        }
        McStrategy::QuantumEps => match config.truth {
            EpsilonHypothesis::Balanced => quantum_false_epsilon(m, config.nu, config.likelihood()),
            EpsilonHypothesis::Epsilon => {
                let eps = config.epsilon()?;
                match config.likelihood_mode {
                    Likelihood::Idealized => Ok(quantum_miss_probability(m, eps, config.nu)?.exact),
                    Likelihood::ExactN => {
                        quantum_miss_probability_exact_n(m, eps, config.nu, config.n_paths)
                    }
                }
            }
        },
    }
}

fn experiment_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Whether one experiment ends in a wrong decision.
fn experiment_errs<R: Rng + ?Sized>(config: &TrialConfig, rng: &mut R) -> Result<bool> {
    let n = config.n_paths;
    match config.strategy {
        McStrategy::ClassicalDJ | McStrategy::QuantumDJ => {
            let promise = match rng.random_range(0..4u8) {
                0 => Promise::Constant(1),
                1 => Promise::Constant(-1),
                _ => Promise::Balanced,
            };
            let constant = matches!(promise, Promise::Constant(_));
            let pattern = sample_pattern(promise, n, rng)?;
            let guess_constant = if config.strategy == McStrategy::ClassicalDJ {
                let samples =
                    simulate_classical_trials(&pattern, config.m, config.sampling_mode, rng)?;
                samples.iter().all(|&y| y == samples[0])
            } else {
                let clicks = simulate_quantum_trials(
                    &pattern,
                    config.nu,
                    config.m,
                    config.likelihood_mode,
                    rng,
                );
                clicks.contains(&1)
            };
            Ok(guess_constant != constant)
        }
        McStrategy::ClassicalEps | McStrategy::QuantumEps => {
            let promise = match config.truth {
                EpsilonHypothesis::Balanced => Promise::Balanced,
                EpsilonHypothesis::Epsilon => Promise::EpsilonBiased(config.epsilon()?),
            };
            let pattern = sample_pattern(promise, n, rng)?;
            let guess = if config.strategy == McStrategy::ClassicalEps {
                let samples =
                    simulate_classical_trials(&pattern, config.m, config.sampling_mode, rng)?;
                classify_samples(&samples, config.epsilon()?)?
            } else {
                let clicks = simulate_quantum_trials(
                    &pattern,
                    config.nu,
                    config.m,
                    config.likelihood_mode,
                    rng,
                );
                if clicks.contains(&1) {
                    EpsilonHypothesis::Epsilon
                } else {
                    EpsilonHypothesis::Balanced
                }
            };
            Ok(guess != config.truth)
        }
    }
}

/// Runs `config.experiments` independent experiments in parallel.
pub fn run_experiment(config: &TrialConfig) -> Result<MCResult> {
    let analytic = analytic_error(config)?;
    let errors = (0..config.experiments)
        .into_par_iter()
        .map(|i| experiment_errs(config, &mut experiment_rng(config.seed, i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(MCResult::new(errors, config.experiments, analytic))
}
