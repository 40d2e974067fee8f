//! Constant vs balanced with a fixed budget of `m` queries.
//!
//! The classical strategy samples `m` phase shifters and guesses constant iff
//! they all agree. The quantum strategy runs the walk `m` times and guesses
//! balanced iff the particle never reached `|B,N+1⟩`. Both rules have
//! one-sided error, in opposite directions.
//!
//! Everything here is generic over [`Scalar`], so the same code yields exact
//! rationals when `ν` and the priors are rational.

use serde::{Deserialize, Serialize};

use crate::ensemble::{hypergeometric_prob_in, EnsembleParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    Constant,
    Balanced,
}

/// How sampled shifters relate to the hidden pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingModel {
    /// Each sample is an independent fair sign under the balanced hypothesis.
    Iid,
    /// `m` distinct shifters of a uniformly random balanced pattern.
    WithoutReplacement { n_paths: usize },
}

/// Per-run detection probabilities used by the quantum strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LikelihoodMode {
    /// `ν` for constant, `0` for balanced; `O(1/N)` terms dropped.
    Idealized,
    /// Exact three-step probabilities for `N` paths.
    ExactN { n_paths: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec<T = f64> {
    pub p_constant_plus: T,
    pub p_constant_minus: T,
    pub p_balanced: T,
}

impl<T: Scalar> Default for PriorSpec<T> {
    /// `(1/4, 1/4, 1/2)`.
    fn default() -> Self {
        Self {
            p_constant_plus: T::ratio(1, 4),
            p_constant_minus: T::ratio(1, 4),
            p_balanced: T::half(),
        }
    }
}

impl<T: Scalar> PriorSpec<T> {
    pub fn new(p_constant_plus: T, p_constant_minus: T, p_balanced: T) -> Result<Self> {
        let prior = Self {
            p_constant_plus,
            p_constant_minus,
            p_balanced,
        };
        let parts = [
            &prior.p_constant_plus,
            &prior.p_constant_minus,
            &prior.p_balanced,
        ];
        if parts.iter().any(|p| **p < T::zero()) {
            return Err(Error::InvalidParameter("negative prior probability".into()));
        }
        let total = prior.p_constant() + prior.p_balanced.clone();
        if (total - T::one()).to_f64_lossy().abs() > 1e-12 {
            return Err(Error::InvalidParameter("priors do not sum to 1".into()));
        }
        Ok(prior)
    }

    pub fn p_constant(&self) -> T {
        self.p_constant_plus.clone() + self.p_constant_minus.clone()
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    Ok(())
}

fn check_nu<T: Scalar>(nu: &T) -> Result<()> {
    if *nu < T::zero() || *nu > T::one() {
        return Err(Error::InvalidParameter(format!(
            "nu = {nu:?} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Probability that `m` samples of a balanced pattern are all `+1` (equal to
/// all `-1` by symmetry).
pub fn all_plus_given_balanced<T: Scalar>(m: usize, model: SamplingModel) -> Result<T> {
    match model {
        SamplingModel::Iid => Ok(T::half().powi(m)),
        SamplingModel::WithoutReplacement { n_paths } => {
            if n_paths % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "balanced needs even N, got {n_paths}"
                )));
            }
            let params = EnsembleParams::from_counts(n_paths, n_paths / 2, m, m)?;
            Ok(hypergeometric_prob_in(&params))
        }
    }
}

/// `P(c=+1 | m samples all +1)`.
///
/// With the default prior and i.i.d. samples this is `2^{m-1}/(1+2^{m-1})`.
pub fn classical_posterior_all_same<T: Scalar>(
    m: usize,
    prior: &PriorSpec<T>,
    model: SamplingModel,
) -> Result<T> {
    check_m(m)?;
    let q: T = all_plus_given_balanced(m, model)?;
    let evidence = prior.p_constant_plus.clone() + prior.p_balanced.clone() * q;
    Ok(prior.p_constant_plus.clone() / evidence)
}

/// `P(constant | all m samples identical)`, either sign.
pub fn classical_posterior_ambiguous<T: Scalar>(
    m: usize,
    prior: &PriorSpec<T>,
    model: SamplingModel,
) -> Result<T> {
    check_m(m)?;
    let q: T = all_plus_given_balanced(m, model)?;
    let pc = prior.p_constant();
    let evidence = pc.clone() + prior.p_balanced.clone() * T::from_count(2) * q;
    Ok(pc / evidence)
}

/// Error of "guess constant iff all samples agree": only balanced patterns
/// that happen to look constant are misjudged. `2^{-m}` under the default
/// prior with i.i.d. samples.
pub fn classical_error<T: Scalar>(
    m: usize,
    prior: &PriorSpec<T>,
    model: SamplingModel,
) -> Result<T> {
    check_m(m)?;
    let q: T = all_plus_given_balanced(m, model)?;
    Ok(prior.p_balanced.clone() * T::from_count(2) * q)
}

/// Single-run probabilities of *not* detecting the particle, under the
/// constant and the balanced hypothesis.
pub fn no_detection_likelihoods<T: Scalar>(nu: &T, mode: LikelihoodMode) -> Result<(T, T)> {
    check_nu(nu)?;
    match mode {
        LikelihoodMode::Idealized => Ok((T::one() - nu.clone(), T::one())),
        LikelihoodMode::ExactN { n_paths } => {
            if n_paths < 2 {
                return Err(Error::TooFewPaths(n_paths));
            }
            let n = T::from_count(n_paths);
            let n1 = T::from_count(n_paths + 1);
            let denom = n1.clone() * n1;
            let constant =
                (n.clone() + nu.clone() * n.clone() * (n.clone() - T::one())) / denom.clone();
            let balanced = (T::one() - nu.clone()) * n / denom;
            Ok((T::one() - constant, T::one() - balanced))
        }
    }
}

/// `(P(c | no detection in m runs), P(b | no detection in m runs))` with equal
/// priors on the two hypotheses.
pub fn quantum_posterior_all_zero<T: Scalar>(
    m: usize,
    nu: &T,
    mode: LikelihoodMode,
) -> Result<(T, T)> {
    check_m(m)?;
    let (zc, zb) = no_detection_likelihoods(nu, mode)?;
    let a = zc.powi(m);
    let b = zb.powi(m);
    let total = a.clone() + b.clone();
    Ok((a / total.clone(), b / total))
}

/// Conditional error probabilities `(P(err | constant), P(err | balanced))`
/// of the quantum rule.
pub fn quantum_conditional_errors<T: Scalar>(
    m: usize,
    nu: &T,
    mode: LikelihoodMode,
) -> Result<(T, T)> {
    check_m(m)?;
    let (zc, zb) = no_detection_likelihoods(nu, mode)?;
    Ok((zc.powi(m), T::one() - zb.powi(m)))
}

/// Error of "guess balanced iff never detected" with equal priors:
/// `(1/2)(1-ν)^m` in the idealized model.
pub fn quantum_error<T: Scalar>(m: usize, nu: &T, mode: LikelihoodMode) -> Result<T> {
    let (ec, eb) = quantum_conditional_errors(m, nu, mode)?;
    Ok(T::half() * (ec + eb))
}

/// Smallest `ν` for which the quantum rule beats the classical one at `m`
/// queries: `1 - 2^{1/m}/2`.
pub fn coherence_threshold(m: usize) -> Result<f64> {
    check_m(m)?;
    Ok(1.0 - 2f64.powf(1.0 / m as f64) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow<T = f64> {
    pub outcome: (i8, i8),
    /// `None` when the outcome has probability zero.
    pub p_constant: Option<T>,
    pub p_balanced: Option<T>,
    pub guess: Hypothesis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoTrialTable<T = f64> {
    /// Outcomes are sampled signs `±1`.
    pub classical: Vec<TableRow<T>>,
    /// Outcomes are detections: `1` found on `|B,N+1⟩`, `0` not.
    pub quantum: Vec<TableRow<T>>,
}

fn posterior_row<T: Scalar>(
    outcome: (i8, i8),
    joint_c: T,
    joint_b: T,
    guess: Hypothesis,
) -> TableRow<T> {
    let total = joint_c.clone() + joint_b.clone();
    if total == T::zero() {
        return TableRow {
            outcome,
            p_constant: None,
            p_balanced: None,
            guess,
        };
    }
    TableRow {
        outcome,
        p_constant: Some(joint_c / total.clone()),
        p_balanced: Some(joint_b / total),
        guess,
    }
}

/// Posterior tables for two queries, default priors, idealized likelihoods.
pub fn enumerate_two_trial_table<T: Scalar>(nu: &T) -> Result<TwoTrialTable<T>> {
    check_nu(nu)?;
    let prior = PriorSpec::<T>::default();
    let quarter = T::ratio(1, 4);

    let classical = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .into_iter()
        .map(|(y1, y2): (i8, i8)| {
            let same = y1 == y2;
            let joint_c = match (same, y1) {
                (true, 1) => prior.p_constant_plus.clone(),
                (true, _) => prior.p_constant_minus.clone(),
                (false, _) => T::zero(),
            };
            let joint_b = prior.p_balanced.clone() * quarter.clone();
            let guess = if same {
                Hypothesis::Constant
            } else {
                Hypothesis::Balanced
            };
            posterior_row((y1, y2), joint_c, joint_b, guess)
        })
        .collect();

    let quantum = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(r1, r2): (i8, i8)| {
            let clicks = (r1 + r2) as usize;
            let like_c = nu.powi(clicks) * (T::one() - nu.clone()).powi(2 - clicks);
            let like_b = if clicks == 0 { T::one() } else { T::zero() };
            let guess = if clicks == 0 {
                Hypothesis::Balanced
            } else {
                Hypothesis::Constant
            };
            posterior_row((r1, r2), T::half() * like_c, T::half() * like_b, guess)
        })
        .collect();

    Ok(TwoTrialTable { classical, quantum })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Classical,
    Quantum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub strategy: Strategy,
    pub m: usize,
    pub nu: Option<f64>,
    /// Posterior of the hypothesis the rule rejects, given the ambiguous
    /// outcome (all samples equal, or no detection at all).
    pub posterior_ambiguous: f64,
    pub guess_rule: String,
    pub error_probability: f64,
    pub error_if_constant: f64,
    pub error_if_balanced: f64,
}

pub fn classical_report(
    m: usize,
    prior: &PriorSpec<f64>,
    model: SamplingModel,
) -> Result<DecisionReport> {
    let q: f64 = all_plus_given_balanced(m.max(1), model)?;
    Ok(DecisionReport {
        strategy: Strategy::Classical,
        m,
        nu: None,
        posterior_ambiguous: classical_posterior_ambiguous(m, prior, model)?,
        guess_rule: "constant iff all sampled shifters agree".into(),
        error_probability: classical_error(m, prior, model)?,
        error_if_constant: 0.0,
        error_if_balanced: 2.0 * q,
    })
}

pub fn quantum_report(m: usize, nu: f64, mode: LikelihoodMode) -> Result<DecisionReport> {
    let (posterior, _) = quantum_posterior_all_zero(m, &nu, mode)?;
    let (ec, eb) = quantum_conditional_errors(m, &nu, mode)?;
    Ok(DecisionReport {
        strategy: Strategy::Quantum,
        m,
        nu: Some(nu),
        posterior_ambiguous: posterior,
        guess_rule: "balanced iff the particle is never detected on |B,N+1>".into(),
        error_probability: quantum_error(m, &nu, mode)?,
        error_if_constant: ec,
        error_if_balanced: eb,
    })
}
