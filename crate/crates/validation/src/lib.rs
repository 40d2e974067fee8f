//! Shared helpers for the acceptance checks.

use std::io::Write;
use std::time::Duration;

use dj_coherence::decoherence::Qubit;
use dj_coherence::PhasePattern;
use num_complex::Complex64;
use rand::Rng;

/// Writes a `PASS`/`FAIL` line to stderr, bypassing test output capture,
/// then asserts both the check and the time limit.
pub fn report(id: &str, title: &str, pass: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let in_time = elapsed < limit;
    let verdict = if pass && in_time { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "{id} {verdict} {title}: {detail} [{:.3}s, limit {}s]",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "{id} failed: {detail}");
    assert!(in_time, "{id} exceeded {}s", limit.as_secs());
}

/// Independent fair signs, classified by their composition.
pub fn random_pattern<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhasePattern {
    let signs = (0..n)
        .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
        .collect();
    PhasePattern::from_signs(signs).expect("signs are ±1")
}

/// Normalized qubit with uniformly drawn components before normalization.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> Qubit {
    let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Qubit::new(
        Complex64::new(v[0] / norm, v[1] / norm),
        Complex64::new(v[2] / norm, v[3] / norm),
    )
}
