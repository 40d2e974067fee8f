//! Which-path ancillas and the coherence they leave behind.
//!
//! Every path `j` carries a qubit that starts in `|0⟩` and is rotated to
//! `|μ_j⟩ = α_j|0⟩ + β_j|1⟩` when the particle passes shifter `j`. The
//! particle's reduced state then depends only on the overlaps
//! `G[k][j] = ⟨η_k|η_j⟩` between the ancilla records of different paths.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::{EdgeState, PhasePattern, Walk};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;
const BOUND_TOL: f64 = 1e-12;

/// Largest `N` accepted by [`full_tensor_oracle`].
pub const MAX_ORACLE_PATHS: usize = 12;

/// State `α|0⟩ + β|1⟩` an ancilla is rotated into.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Qubit {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Qubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    /// Real amplitudes with `⟨0|μ⟩ = sqrt(overlap)`.
    pub fn with_overlap(overlap: f64) -> Self {
        Self::new(
            Complex64::new(overlap.sqrt(), 0.0),
            Complex64::new((1.0 - overlap).sqrt(), 0.0),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// Column `b` of a unitary whose first column is `(α, β)`.
    fn column(&self, b: u32) -> [Complex64; 2] {
        if b == 0 {
            [self.alpha, self.beta]
        } else {
            [-self.beta.conj(), self.alpha.conj()]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AncillaSpec {
    /// Common real overlap `ν` between the records of any two paths.
    Uniform { nu: f64 },
    /// One ancilla rotation per path.
    PerPath { qubits: Vec<Qubit> },
}

impl AncillaSpec {
    pub fn uniform(nu: f64) -> Result<Self> {
        let spec = Self::Uniform { nu };
        spec.validate()?;
        Ok(spec)
    }

    pub fn per_path(qubits: Vec<Qubit>) -> Result<Self> {
        let spec = Self::PerPath { qubits };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform { nu } => {
                if !(0.0..=1.0).contains(nu) {
                    return Err(Error::InvalidAncilla(format!("nu = {nu} outside [0, 1]")));
                }
            }
            Self::PerPath { qubits } => {
                for (index, q) in qubits.iter().enumerate() {
                    let norm = q.norm_sqr();
                    if (norm - 1.0).abs() > NORM_TOL {
                        return Err(Error::UnnormalizedAncilla { index, norm });
                    }
                }
            }
        }
        Ok(())
    }

    /// Qubit rotations for `n_paths` paths. Uniform mode uses real
    /// `α = sqrt(ν)`, which realizes overlap `ν`.
    pub fn qubits(&self, n_paths: usize) -> Result<Vec<Qubit>> {
        self.validate()?;
        match self {
            Self::Uniform { nu } => Ok(vec![Qubit::with_overlap(*nu); n_paths]),
            Self::PerPath { qubits } => {
                if qubits.len() != n_paths {
                    return Err(Error::DimensionMismatch {
                        expected: n_paths,
                        got: qubits.len(),
                    });
                }
                Ok(qubits.clone())
            }
        }
    }
}

/// `G[k][j] = ⟨η_k|η_j⟩`: Hermitian with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix(DMatrix<Complex64>);

impl OverlapMatrix {
    /// Accepts any Hermitian matrix with unit diagonal, realizable by qubits
    /// or not.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        for i in 0..m.nrows() {
            if (m[(i, i)] - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
                return Err(Error::InvalidAncilla(format!(
                    "overlap diagonal {i} is not 1"
                )));
            }
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidAncilla(format!(
                        "overlap matrix not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// `⟨η_k|η_j⟩`, both indices 1-based.
    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.0[(k - 1, j - 1)]
    }
}

pub fn overlaps(spec: &AncillaSpec, n_paths: usize) -> Result<OverlapMatrix> {
    spec.validate()?;
    let m = match spec {
        AncillaSpec::Uniform { nu } => DMatrix::from_fn(n_paths, n_paths, |k, j| {
            Complex64::new(if k == j { 1.0 } else { *nu }, 0.0)
        }),
        AncillaSpec::PerPath { .. } => {
            let q = spec.qubits(n_paths)?;
            // Only ancillas k and j differ between η_k and η_j:
            // ⟨μ_k|0⟩⟨0|μ_j⟩ = conj(α_k) α_j.
            DMatrix::from_fn(n_paths, n_paths, |k, j| {
                if k == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    q[k].alpha.conj() * q[j].alpha
                }
            })
        }
    };
    Ok(OverlapMatrix(m))
}

/// Reduced density matrix on the path states `|j,B⟩` after two steps.
///
/// The `|0,-1⟩` tail component is excluded, so the trace is `N/(N+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathDensityMatrix(DMatrix<Complex64>);

impl PathDensityMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.0;
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

fn check_dims(pattern: &PhasePattern, g: &OverlapMatrix) -> Result<()> {
    if pattern.n_paths() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: pattern.n_paths(),
            got: g.dim(),
        });
    }
    Ok(())
}

/// `ρ[j][k] = s_j s_k G[k][j] / (N+1)`.
pub fn rho_int(pattern: &PhasePattern, g: &OverlapMatrix) -> Result<PathDensityMatrix> {
    check_dims(pattern, g)?;
    let n = pattern.n_paths();
    let scale = 1.0 / (n as f64 + 1.0);
    let s = pattern.signs();
    Ok(PathDensityMatrix(DMatrix::from_fn(n, n, |j, k| {
        g.0[(k, j)] * (scale * (s[j] * s[k]) as f64)
    })))
}

/// Sum of the moduli of all off-diagonal entries.
pub fn coherence_l1(rho: &DMatrix<Complex64>) -> f64 {
    let mut total = 0.0;
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            if i != j {
                total += rho[(i, j)].norm();
            }
        }
    }
    total
}

/// `X = Σ_{j≠k} |G[k][j]| / (N+1)²`.
pub fn compute_x(g: &OverlapMatrix) -> f64 {
    let n1 = g.dim() as f64 + 1.0;
    coherence_l1(&g.0) / (n1 * n1)
}

/// Probability of finding the particle on `|B,N+1⟩` after three steps:
/// `Σ_{j,k} s_j s_k G[k][j] / (N+1)²`.
pub fn exit_probability(pattern: &PhasePattern, g: &OverlapMatrix) -> Result<f64> {
    check_dims(pattern, g)?;
    let s = pattern.signs();
    let n = s.len();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for j in 0..n {
            total += g.0[(k, j)] * (s[j] * s[k]) as f64;
        }
    }
    let n1 = n as f64 + 1.0;
    let p = total / (n1 * n1);
    if p.im.abs() > IMAG_TOL {
        return Err(Error::NonHermitian(p.im));
    }
    if !(-IMAG_TOL..=1.0 + IMAG_TOL).contains(&p.re) {
        return Err(Error::InvalidParameter(format!(
            "exit probability {} outside [0, 1]",
            p.re
        )));
    }
    Ok(p.re.clamp(0.0, 1.0))
}

/// Closed form of [`exit_probability`] for a uniform overlap `ν`:
/// `[(1-ν)N + ν(Σ s_j)²] / (N+1)²`.
pub fn exit_probability_uniform(pattern: &PhasePattern, nu: f64) -> f64 {
    let n = pattern.n_paths() as f64;
    let sum = pattern.sum() as f64;
    ((1.0 - nu) * n + nu * sum * sum) / ((n + 1.0) * (n + 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitBound {
    pub probability: f64,
    /// `N/(N+1)² + X`.
    pub bound: f64,
}

/// Exit probability together with its coherence bound. A violated bound is an
/// error.
pub fn exit_probability_bound(pattern: &PhasePattern, g: &OverlapMatrix) -> Result<ExitBound> {
    let probability = exit_probability(pattern, g)?;
    let n = g.dim() as f64;
    let bound = n / ((n + 1.0) * (n + 1.0)) + compute_x(g);
    if probability > bound + BOUND_TOL {
        return Err(Error::BoundViolated { probability, bound });
    }
    Ok(ExitBound { probability, bound })
}

/// Simulates particle and ancillas jointly for three steps and reads the
/// `|B,N+1⟩` population of the particle's reduced state.
///
/// Independent of the overlap formula: it only uses the walk's vertex
/// unitaries plus a qubit rotation whenever the particle passes a shifter.
pub fn full_tensor_oracle(pattern: &PhasePattern, spec: &AncillaSpec) -> Result<f64> {
    let n = pattern.n_paths();
    if n > MAX_ORACLE_PATHS {
        return Err(Error::OracleTooLarge {
            max: MAX_ORACLE_PATHS,
            got: n,
        });
    }
    let qubits = spec.qubits(n)?;
    let walk = Walk::new(pattern.clone())?;
    let graph = walk.graph();

    // Ancilla register as a bit string, qubit j on bit j-1.
    let mut state: BTreeMap<(EdgeState, u32), Complex64> = BTreeMap::new();
    state.insert((graph.start_edge(), 0), Complex64::new(1.0, 0.0));

    for _ in 0..3 {
        let mut next: BTreeMap<(EdgeState, u32), Complex64> = BTreeMap::new();
        for (&(edge, anc), &amp) in &state {
            let transit = graph.shifter_index(edge.to);
            for (out, coeff) in graph.scatter(edge, pattern)? {
                let a = amp * coeff;
                match transit {
                    Some(j) => {
                        let bit = 1u32 << (j - 1);
                        let current = (anc & bit != 0) as u32;
                        let col = qubits[j - 1].column(current);
                        let cleared = anc & !bit;
                        *next.entry((out, cleared)).or_default() += a * col[0];
                        *next.entry((out, cleared | bit)).or_default() += a * col[1];
                    }
                    None => *next.entry((out, anc)).or_default() += a,
                }
            }
        }
        state = next;
    }

    let exit = graph.exit_edge();
    Ok(state
        .iter()
        .filter(|((e, _), _)| *e == exit)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}
