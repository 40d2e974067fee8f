//! Balanced vs ε-biased phase patterns.
//!
//! Quantum: run the walk `m` times and answer "ε" iff the particle is ever
//! found on `|B,N+1⟩`; under the balanced promise this never errs (up to
//! `O(1/N)`). Classical: sample `m` shifters and answer "ε" iff the sample
//! mean `Y ≥ ε/2`, which can err both ways. Chernoff bounds cap the classical
//! errors; exact binomial or hypergeometric tails are computed alongside.

use serde::{Deserialize, Serialize};

use crate::decision::LikelihoodMode;
use crate::ensemble::{binomial_prob, hypergeometric_prob, plus_count, EnsembleParams};
use crate::error::{Error, Result};

/// Largest `m` accepted by the i.i.d. tail summation.
pub const MAX_IID_TRIALS: usize = 10_000;

const DOMINANCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonHypothesis {
    Balanced,
    Epsilon,
}

fn check_epsilon(epsilon: f64, upper: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= upper) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside (0, {upper}]"
        )));
    }
    Ok(())
}

fn check_nu(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("nu = {nu} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissProbability {
    /// `(1 - νε²)^m`.
    pub exact: f64,
    /// `e^{-mνε²}`.
    pub approx: f64,
    /// `approx - exact`, never negative.
    pub gap: f64,
}

/// Probability that `m` runs never detect the particle when the pattern is
/// ε-biased, with detection probability `νε²` per run.
pub fn quantum_miss_probability(m: usize, epsilon: f64, nu: f64) -> Result<MissProbability> {
    check_epsilon(epsilon, 1.0)?;
    check_nu(nu)?;
    let rate = nu * epsilon * epsilon;
    let exact = if rate >= 1.0 {
        if m == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (m as f64 * (-rate).ln_1p()).exp()
    };
    let approx = (-(m as f64) * rate).exp();
    Ok(MissProbability {
        exact,
        approx,
        gap: approx - exact,
    })
}

/// Exact-`N` miss probability: `(1 - p)^m` with
/// `p = [(1-ν)N + νε²N²]/(N+1)²`.
pub fn quantum_miss_probability_exact_n(
    m: usize,
    epsilon: f64,
    nu: f64,
    n_paths: usize,
) -> Result<f64> {
    check_epsilon(epsilon, 1.0)?;
    check_nu(nu)?;
    crate::walk::epsilon_plus_count(n_paths, epsilon)?;
    let n = n_paths as f64;
    let sum = epsilon * n;
    let p = ((1.0 - nu) * n + nu * sum * sum) / ((n + 1.0) * (n + 1.0));
    Ok((1.0 - p).powi(m as i32))
}

/// Probability that the quantum rule answers "ε" on a balanced pattern.
/// Zero in the idealized model; `1 - (1 - (1-ν)N/(N+1)²)^m` for exact `N`.
pub fn quantum_false_epsilon(m: usize, nu: f64, mode: LikelihoodMode) -> Result<f64> {
    check_nu(nu)?;
    match mode {
        LikelihoodMode::Idealized => Ok(0.0),
        LikelihoodMode::ExactN { n_paths } => {
            let n = n_paths as f64;
            let p = (1.0 - nu) * n / ((n + 1.0) * (n + 1.0));
            Ok(1.0 - (1.0 - p).powi(m as i32))
        }
    }
}

/// `Y = (1/m) Σ y_j`.
pub fn y_statistic(samples: &[i8]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let sum: i64 = samples.iter().map(|&y| y as i64).sum();
    Ok(sum as f64 / samples.len() as f64)
}

/// `Y ≥ ε/2`, evaluated as `2 Σ y_j ≥ ε m`. Ties go to the ε case.
pub fn is_epsilon_case(sum: i64, m: usize, epsilon: f64) -> bool {
    2.0 * sum as f64 >= epsilon * m as f64
}

/// Threshold rule on sampled signs.
pub fn classify_samples(samples: &[i8], epsilon: f64) -> Result<EpsilonHypothesis> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let sum: i64 = samples.iter().map(|&y| y as i64).sum();
    Ok(if is_epsilon_case(sum, samples.len(), epsilon) {
        EpsilonHypothesis::Epsilon
    } else {
        EpsilonHypothesis::Balanced
    })
}

/// Mean `μ = Σ p_j` of a sum of independent 0/1 variables and a relative
/// deviation `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffParams {
    pub mu: f64,
    pub delta: f64,
}

impl ChernoffParams {
    pub fn new(mu: f64, delta: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu = {mu} must be positive"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} must be positive"
            )));
        }
        Ok(Self { mu, delta })
    }

    /// `[e^δ / (1+δ)^{1+δ}]^μ`, bounding `P(X > (1+δ)μ)`.
    pub fn upper(&self) -> f64 {
        let d = self.delta;
        (self.mu * (d - (1.0 + d) * d.ln_1p())).exp()
    }

    /// `e^{-μδ²/2}`, bounding `P(X < (1-δ)μ)`; needs `δ < 1`.
    pub fn lower(&self) -> Result<f64> {
        if self.delta >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "delta = {} must be below 1",
                self.delta
            )));
        }
        Ok((-self.mu * self.delta * self.delta / 2.0).exp())
    }
}

pub fn chernoff_upper(mu: f64, delta: f64) -> Result<f64> {
    Ok(ChernoffParams::new(mu, delta)?.upper())
}

pub fn chernoff_lower(mu: f64, delta: f64) -> Result<f64> {
    ChernoffParams::new(mu, delta)?.lower()
}

/// Chernoff bounds on both classical error directions, plus the common
/// small-ε approximation `e^{-ε²m/8}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBounds {
    /// Balanced mistaken for ε: upper-tail bound with `μ = m/2`, `δ = ε/2`.
    pub false_eps: f64,
    /// ε mistaken for balanced: lower-tail bound with `μ = m(1+ε)/2`,
    /// `δ = ε/(2(1+ε))`.
    pub false_bal: f64,
    pub approx_false_eps: f64,
    pub approx_false_bal: f64,
}

pub fn balanced_side_params(m: usize, epsilon: f64) -> Result<ChernoffParams> {
    ChernoffParams::new(m as f64 / 2.0, epsilon / 2.0)
}

pub fn epsilon_side_params(m: usize, epsilon: f64) -> Result<ChernoffParams> {
    ChernoffParams::new(
        m as f64 * (1.0 + epsilon) / 2.0,
        epsilon / (2.0 * (1.0 + epsilon)),
    )
}

pub fn classical_error_bounds(m: usize, epsilon: f64) -> Result<ClassicalBounds> {
    check_epsilon(epsilon, 0.5)?;
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let approx = (-epsilon * epsilon * m as f64 / 8.0).exp();
    Ok(ClassicalBounds {
        false_eps: balanced_side_params(m, epsilon)?.upper(),
        false_bal: epsilon_side_params(m, epsilon)?.lower()?,
        approx_false_eps: approx,
        approx_false_bal: approx,
    })
}

/// Law of the sampled shifters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailModel {
    /// Independent signs: `p = 1/2` (balanced) or `(1+ε)/2` (ε case).
    Iid,
    /// `m` distinct shifters of a uniformly random length-`N` pattern.
    Hypergeometric { n_paths: usize },
}

/// Exact classical error probabilities
/// `(P(Y ≥ ε/2 | balanced), P(Y < ε/2 | ε case))`.
pub fn exact_tail_probabilities(m: usize, epsilon: f64, model: TailModel) -> Result<(f64, f64)> {
    check_epsilon(epsilon, 1.0)?;
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let (balanced, biased): (Vec<f64>, Vec<f64>) = match model {
        TailModel::Iid => {
            if m > MAX_IID_TRIALS {
                return Err(Error::Infeasible(format!(
                    "m = {m} exceeds {MAX_IID_TRIALS}"
                )));
            }
            let p = (1.0 + epsilon) / 2.0;
            (0..=m)
                .map(|k| (binomial_prob(m, k, 0.5), binomial_prob(m, k, p)))
                .unzip()
        }
        TailModel::Hypergeometric { n_paths } => {
            if m > n_paths {
                return Err(Error::Infeasible(format!("m = {m} exceeds N = {n_paths}")));
            }
            if n_paths % 2 != 0 {
                return Err(Error::Infeasible(format!(
                    "balanced needs even N, got {n_paths}"
                )));
            }
            let plus_eps = plus_count(n_paths, (1.0 + epsilon) / 2.0)
                .map_err(|e| Error::Infeasible(e.to_string()))?;
            (0..=m)
                .map(|k| -> Result<(f64, f64)> {
                    let b = EnsembleParams::from_counts(n_paths, n_paths / 2, m, k)?;
                    let e = EnsembleParams::from_counts(n_paths, plus_eps, m, k)?;
                    Ok((hypergeometric_prob(&b), hypergeometric_prob(&e)))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip()
        }
    };
    let mut false_eps = Vec::new();
    let mut false_bal = Vec::new();
    for k in 0..=m {
        let sum = 2 * k as i64 - m as i64;
        if is_epsilon_case(sum, m, epsilon) {
            false_eps.push(balanced[k]);
        } else {
            false_bal.push(biased[k]);
        }
    }
    Ok((ascending_sum(false_eps), ascending_sum(false_bal)))
}

fn ascending_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub m: usize,
    pub nu: f64,
    pub quantum_miss: f64,
    pub classical_false_eps: f64,
    pub classical_false_bal: f64,
    pub exact_false_eps: f64,
    pub exact_false_bal: f64,
}

/// Both strategies side by side with i.i.d. exact tails. Fails if an exact
/// tail exceeds its Chernoff bound.
pub fn epsilon_report(m: usize, epsilon: f64, nu: f64) -> Result<EpsilonReport> {
    let bounds = classical_error_bounds(m, epsilon)?;
    let (exact_false_eps, exact_false_bal) = exact_tail_probabilities(m, epsilon, TailModel::Iid)?;
    for (probability, bound) in [
        (exact_false_eps, bounds.false_eps),
        (exact_false_bal, bounds.false_bal),
    ] {
        if probability > bound + DOMINANCE_TOL {
            return Err(Error::BoundViolated { probability, bound });
        }
    }
    Ok(EpsilonReport {
        epsilon,
        m,
        nu,
        quantum_miss: quantum_miss_probability(m, epsilon, nu)?.exact,
        classical_false_eps: bounds.false_eps,
        classical_false_bal: bounds.false_bal,
        exact_false_eps,
        exact_false_bal,
    })
}
