//! Composition of a length-`m` window taken from a uniformly random ±1
//! sequence of length `N` with a fixed number of `+1` entries, and how fast
//! it approaches independent sampling.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Populations up to this size are evaluated in exact rational arithmetic.
pub const EXACT_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleParams {
    /// Sequence length `N`.
    pub n: usize,
    /// Number of `+1` entries in the sequence, `pN`.
    pub n_plus: usize,
    /// Window length.
    pub m: usize,
    /// Number of `+1` entries in the window.
    pub m_plus: usize,
}

impl EnsembleParams {
    pub fn from_counts(n: usize, n_plus: usize, m: usize, m_plus: usize) -> Result<Self> {
        if n_plus > n {
            return Err(Error::InvalidParameter(format!(
                "pN = {n_plus} exceeds N = {n}"
            )));
        }
        if m > n {
            return Err(Error::InvalidParameter(format!("m = {m} exceeds N = {n}")));
        }
        if m_plus > m {
            return Err(Error::InvalidParameter(format!(
                "m+ = {m_plus} exceeds m = {m}"
            )));
        }
        Ok(Self {
            n,
            n_plus,
            m,
            m_plus,
        })
    }

    /// `p` must make `pN` an integer.
    pub fn new(n: usize, p: f64, m: usize, m_plus: usize) -> Result<Self> {
        Self::from_counts(n, plus_count(n, p)?, m, m_plus)
    }

    pub fn p(&self) -> f64 {
        self.n_plus as f64 / self.n as f64
    }

    pub fn m_minus(&self) -> usize {
        self.m - self.m_plus
    }

    fn feasible(&self) -> bool {
        self.m_plus <= self.n_plus && self.m_minus() <= self.n - self.n_plus
    }
}

/// `pN` as an integer.
pub fn plus_count(n: usize, p: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let exact = p * n as f64;
    let rounded = exact.round();
    if (exact - rounded).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "pN = {exact} is not an integer"
        )));
    }
    Ok(rounded as usize)
}

/// `C(m, m+) · C(N-m, pN-m+) / C(N, pN)` in any [`Scalar`], via the
/// falling-factorial form `C(m, m+) (pN)_{m+} ((1-p)N)_{m-} / (N)_m`.
///
/// Every factor is a ratio of small integers, so the rational result is exact
/// and nothing overflows for moderate `m`.
pub fn hypergeometric_prob_in<T: Scalar>(params: &EnsembleParams) -> T {
    if !params.feasible() {
        return T::zero();
    }
    let EnsembleParams {
        n,
        n_plus,
        m,
        m_plus,
    } = *params;
    let n_minus = n - n_plus;
    let mut acc = T::one();
    for i in 0..m_plus {
        acc = acc * T::ratio(m - i, i + 1) * T::ratio(n_plus - i, n - i);
    }
    for i in 0..params.m_minus() {
        acc = acc * T::ratio(n_minus - i, n - m_plus - i);
    }
    acc
}

pub fn hypergeometric_prob_exact(params: &EnsembleParams) -> BigRational {
    hypergeometric_prob_in(params)
}

/// Exact rational evaluation up to [`EXACT_LIMIT`], a sum of logarithms of
/// the same falling-factorial ratios beyond it.
pub fn hypergeometric_prob(params: &EnsembleParams) -> f64 {
    if params.n <= EXACT_LIMIT {
        return hypergeometric_prob_exact(params).to_f64_lossy();
    }
    if !params.feasible() {
        return 0.0;
    }
    let EnsembleParams {
        n,
        n_plus,
        m,
        m_plus,
    } = *params;
    let n_minus = n - n_plus;
    let mut log = 0.0;
    for i in 0..m_plus {
        log += ((m - i) as f64 / (i + 1) as f64).ln();
        log += ((n_plus - i) as f64 / (n - i) as f64).ln();
    }
    for i in 0..params.m_minus() {
        log += ((n_minus - i) as f64 / (n - m_plus - i) as f64).ln();
    }
    log.exp()
}

/// Full window law: entry `k` is the probability of `k` plus signs.
pub fn hypergeometric_masses(n: usize, n_plus: usize, m: usize) -> Result<Vec<f64>> {
    (0..=m)
        .map(|k| EnsembleParams::from_counts(n, n_plus, m, k).map(|p| hypergeometric_prob(&p)))
        .collect()
}

pub fn hypergeometric_masses_exact(n: usize, n_plus: usize, m: usize) -> Result<Vec<BigRational>> {
    (0..=m)
        .map(|k| {
            EnsembleParams::from_counts(n, n_plus, m, k).map(|p| hypergeometric_prob_exact(&p))
        })
        .collect()
}

/// `C(m, m+) p^{m+} (1-p)^{m-m+}`.
pub fn binomial_prob(m: usize, m_plus: usize, p: f64) -> f64 {
    if m_plus > m {
        return 0.0;
    }
    if p <= 0.0 {
        return if m_plus == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if m_plus == m { 1.0 } else { 0.0 };
    }
    ln_binomial_prob(m, m_plus, p).exp()
}

/// Natural log of [`binomial_prob`] for `0 < p < 1`.
pub fn ln_binomial_prob(m: usize, m_plus: usize, p: f64) -> f64 {
    ln_binomial(m as u64, m_plus as u64)
        + m_plus as f64 * p.ln()
        + (m - m_plus) as f64 * (-p).ln_1p()
}

/// Exact binomial mass for a rational `p`.
pub fn binomial_prob_in<T: Scalar>(m: usize, m_plus: usize, p: &T) -> T {
    if m_plus > m {
        return T::zero();
    }
    let mut coeff = T::one();
    for i in 0..m_plus {
        coeff = coeff * T::ratio(m - i, i + 1);
    }
    coeff * p.powi(m_plus) * (T::one() - p.clone()).powi(m - m_plus)
}

/// `max_{m+} |hypergeometric - binomial|` for a window of length `m`.
///
/// Requires `m ≤ N/10`.
pub fn convergence_gap(n: usize, p: f64, m: usize) -> Result<f64> {
    if 10 * m > n {
        return Err(Error::InvalidParameter(format!(
            "m = {m} exceeds N/10 for N = {n}"
        )));
    }
    let n_plus = plus_count(n, p)?;
    let p = n_plus as f64 / n as f64;
    let hyper = hypergeometric_masses(n, n_plus, m)?;
    Ok(hyper
        .iter()
        .enumerate()
        .map(|(k, h)| (h - binomial_prob(m, k, p)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    /// Brute-force count over all arrangements of a short sequence.
    fn enumerate(n: usize, n_plus: usize, m: usize, m_plus: usize) -> (u64, u64) {
        let (mut hits, mut total) = (0, 0);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n_plus {
                continue;
            }
            total += 1;
            if (mask & ((1 << m) - 1)).count_ones() as usize == m_plus {
                hits += 1;
            }
        }
        (hits, total)
    }

    #[test]
    fn small_example() {
        let p = EnsembleParams::new(4, 0.5, 2, 2).unwrap();
        assert_eq!(hypergeometric_prob_exact(&p), rational(1, 6));
        assert!((hypergeometric_prob(&p) - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn matches_brute_force_enumeration() {
        for n in 2..=10 {
            for n_plus in 0..=n {
                for m in 0..=n {
                    for k in 0..=m {
                        let (hits, total) = enumerate(n, n_plus, m, k);
                        let p = EnsembleParams::from_counts(n, n_plus, m, k).unwrap();
                        assert_eq!(
                            hypergeometric_prob_exact(&p),
                            rational(hits as i64, total as i64)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn whole_sequence_window() {
        for k in 0..=8 {
            let p = EnsembleParams::from_counts(8, 5, 8, k).unwrap();
            let want = if k == 5 {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            assert_eq!(hypergeometric_prob_exact(&p), want);
        }
    }

    #[test]
    fn infeasible_composition_is_zero() {
        let p = EnsembleParams::from_counts(10, 2, 5, 3).unwrap();
        assert_eq!(hypergeometric_prob(&p), 0.0);
        assert!(EnsembleParams::from_counts(10, 2, 11, 3).is_err());
        assert!(EnsembleParams::new(10, 0.55, 2, 1).is_err());
    }

    #[test]
    fn exact_normalization_up_to_200() {
        for n in (1..=200).step_by(7).chain([200]) {
            for n_plus in [0, n / 3, n / 2, n] {
                for m in [0, 1, n / 4, n] {
                    let total: BigRational = hypergeometric_masses_exact(n, n_plus, m)
                        .unwrap()
                        .into_iter()
                        .sum();
                    assert_eq!(total, BigRational::one(), "n={n} n_plus={n_plus} m={m}");
                }
            }
        }
    }

    #[test]
    fn floating_regime_matches_rational() {
        for k in 0..=6 {
            let p = EnsembleParams::from_counts(300, 150, 6, k).unwrap();
            let exact = hypergeometric_prob_exact(&p).to_f64_lossy();
            assert!(
                (exact - hypergeometric_prob(&p)).abs() <= 1e-13 * exact,
                "k={k}"
            );
        }
    }

    #[test]
    fn binomial_examples() {
        assert!((binomial_prob(2, 1, 0.5) - 0.5).abs() < 1e-15);
        assert!((binomial_prob(4, 3, 0.75) - 0.421875).abs() < 1e-14);
        assert_eq!(binomial_prob(5, 5, 1.0), 1.0);
        assert_eq!(binomial_prob(5, 4, 1.0), 0.0);
        assert_eq!(binomial_prob_in(4, 3, &rational(3, 4)), rational(27, 64));
    }

    #[test]
    fn gap_examples() {
        assert_eq!(convergence_gap(1000, 0.5, 0).unwrap(), 0.0);
        assert!(convergence_gap(50, 0.5, 6).is_err());
        let gaps: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&n| convergence_gap(n, 0.5, 10).unwrap())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        assert!(gaps[2] <= 10.0 / (10_000f64).sqrt());
    }

    #[test]
    fn gap_shrinks_at_least_like_inverse_sqrt() {
        // Measured ratio is close to 1/4 (the gap is O(m²/N)); the claimed
        // O(1/√N) rate would give 1/2.
        for n in [400, 1000, 4000] {
            let r = convergence_gap(4 * n, 0.5, 10).unwrap() / convergence_gap(n, 0.5, 10).unwrap();
            assert!(r <= 0.5 * 1.3, "n={n} ratio={r}");
            assert!((r - 0.25).abs() < 0.03, "n={n} ratio={r}");
        }
    }

    proptest! {
        #[test]
        fn symmetry_under_sign_flip(n in 1usize..60, a in 0usize..60, m in 0usize..60, k in 0usize..60) {
            let n_plus = a % (n + 1);
            let m = m % (n + 1);
            let k = k % (m + 1);
            let p = EnsembleParams::from_counts(n, n_plus, m, k).unwrap();
            let q = EnsembleParams::from_counts(n, n - n_plus, m, m - k).unwrap();
            prop_assert_eq!(hypergeometric_prob_exact(&p), hypergeometric_prob_exact(&q));
        }

        #[test]
        fn float_route_is_accurate(n in 201usize..2000, frac in 0.0f64..1.0, m in 1usize..40, k in 0usize..40) {
            let n_plus = (frac * n as f64) as usize;
            let k = k % (m + 1);
            let p = EnsembleParams::from_counts(n, n_plus, m, k).unwrap();
            let exact = hypergeometric_prob_exact(&p).to_f64_lossy();
            let float = hypergeometric_prob(&p);
            prop_assert!((exact - float).abs() <= 1e-12 * exact.max(1e-300));
        }
    }
}
