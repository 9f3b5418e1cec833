//! Entanglement and state-quality metrics: Duan total variance, fidelity
//! with an ideal two-mode squeezed vacuum, occupations, purity. Every metric
//! is computable from either the Fock or the Gaussian representation, and
//! the two paths are cross-checked in the test suite.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{
    self, expectation, quadrature_p, quadrature_x, FockError, FockSpace, Operator, QuantumState,
    SqueezeSign, StateRepr,
};
use crate::gaussian::GaussianState;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("need at least two modes, got {0}")]
    TooFewModes(usize),
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },
    #[error("Gaussian fidelity requires zero mean (|mean| = {0:.3e} exceeds 1e-6)")]
    NonZeroMean(f64),
    #[error("fidelity target and state disagree on mode count")]
    TargetMismatch,
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Duan total variance of the EPR-like quadrature pairs, in both sign
/// conventions. `v_min` is the headline value: the two conventions are
/// related by a local phase rotation on one mode, and the criterion applies
/// to either commuting pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuanResult {
    /// Var(X₁−X₂) + Var(P₁+P₂)
    pub v_minus: f64,
    /// Var(X₁+X₂) + Var(P₁−P₂)
    pub v_plus: f64,
    pub v_min: f64,
    /// v_min < 2 certifies entanglement for Gaussian states.
    pub entangled: bool,
}

impl DuanResult {
    fn from_pair(v_minus: f64, v_plus: f64) -> Self {
        let v_min = v_minus.min(v_plus);
        DuanResult {
            v_minus,
            v_plus,
            v_min,
            // boundary states (vacuum, V = 2) land within roundoff of the
            // threshold and must not be flagged
            entangled: v_min < 2.0 * (1.0 - 1e-12),
        }
    }
}

/// Duan variance from a Gaussian state, for the quadratures of the two given
/// mode indices.
pub fn duan_variance_gaussian(
    g: &GaussianState,
    pair: (usize, usize),
) -> Result<DuanResult, MetricsError> {
    let n = g.n_modes();
    if n < 2 {
        return Err(MetricsError::TooFewModes(n));
    }
    for index in [pair.0, pair.1] {
        if index >= n {
            return Err(MetricsError::ModeOutOfRange { index, n_modes: n });
        }
    }
    let (x1, p1) = (2 * pair.0, 2 * pair.0 + 1);
    let (x2, p2) = (2 * pair.1, 2 * pair.1 + 1);
    let cov = g.cov();
    let var = |i: usize, j: usize, sign: f64| -> f64 {
        cov[(i, i)] + cov[(j, j)] + 2.0 * sign * cov[(i, j)]
    };
    let v_minus = var(x1, x2, -1.0) + var(p1, p2, 1.0);
    let v_plus = var(x1, x2, 1.0) + var(p1, p2, -1.0);
    Ok(DuanResult::from_pair(v_minus, v_plus))
}

/// Precomputed quadrature-combination operators for repeated Duan
/// evaluations on one space (the squares cost O(d³) once; each state then
/// costs O(d²)).
pub struct DuanAnalyzer {
    u_minus: Operator,
    v_minus: Operator,
    u_plus: Operator,
    v_plus: Operator,
    u_minus_sq: Operator,
    v_minus_sq: Operator,
    u_plus_sq: Operator,
    v_plus_sq: Operator,
}

impl DuanAnalyzer {
    pub fn new(space: &FockSpace, label1: &str, label2: &str) -> Result<Self, MetricsError> {
        if space.n_modes() < 2 {
            return Err(MetricsError::TooFewModes(space.n_modes()));
        }
        let x1 = quadrature_x(space, label1)?;
        let x2 = quadrature_x(space, label2)?;
        let p1 = quadrature_p(space, label1)?;
        let p2 = quadrature_p(space, label2)?;
        let u_minus = x1.sub(&x2);
        let v_minus = p1.add(&p2);
        let u_plus = x1.add(&x2);
        let v_plus = p1.sub(&p2);
        Ok(DuanAnalyzer {
            u_minus_sq: u_minus.mul(&u_minus),
            v_minus_sq: v_minus.mul(&v_minus),
            u_plus_sq: u_plus.mul(&u_plus),
            v_plus_sq: v_plus.mul(&v_plus),
            u_minus,
            v_minus,
            u_plus,
            v_plus,
        })
    }

    pub fn eval(&self, state: &QuantumState) -> Result<DuanResult, MetricsError> {
        let variance = |op: &Operator, op_sq: &Operator| -> Result<f64, MetricsError> {
            let mean = expectation(op, state)?.re;
            let second = expectation(op_sq, state)?.re;
            Ok(second - mean * mean)
        };
        let v_minus =
            variance(&self.u_minus, &self.u_minus_sq)? + variance(&self.v_minus, &self.v_minus_sq)?;
        let v_plus =
            variance(&self.u_plus, &self.u_plus_sq)? + variance(&self.v_plus, &self.v_plus_sq)?;
        Ok(DuanResult::from_pair(v_minus, v_plus))
    }
}

/// Duan variance from a Fock-space state (any mode count ≥ 2), for the two
/// labelled modes.
pub fn duan_variance_fock(
    state: &QuantumState,
    label1: &str,
    label2: &str,
) -> Result<DuanResult, MetricsError> {
    DuanAnalyzer::new(state.space(), label1, label2)?.eval(state)
}

/// Covariance matrix of tmsv(ζ, sign) in the interleaved quadrature
/// ordering: diagonal cosh(2ζ)/2 blocks, ±sinh(2ζ)/2 cross blocks.
pub fn tmsv_covariance(zeta: f64, sign: SqueezeSign) -> DMatrix<f64> {
    let c = (2.0 * zeta).cosh() / 2.0;
    let s = sign.as_f64() * (2.0 * zeta).sinh() / 2.0;
    let mut cov = DMatrix::zeros(4, 4);
    for k in 0..4 {
        cov[(k, k)] = c;
    }
    cov[(0, 2)] = s;
    cov[(2, 0)] = s;
    cov[(1, 3)] = -s;
    cov[(3, 1)] = -s;
    cov
}

/// Fidelity of a two-mode Fock state with the ideal tmsv(ζ, sign):
/// F = ⟨ψ_tmsv|ρ|ψ_tmsv⟩.
pub fn fidelity_with_tmsv_fock(
    state: &QuantumState,
    zeta: f64,
    sign: SqueezeSign,
) -> Result<f64, MetricsError> {
    let space = state.space();
    if space.n_modes() != 2 {
        return Err(MetricsError::TooFewModes(space.n_modes()));
    }
    // tail tolerance is irrelevant for an overlap target; build unchecked
    let target = fock::tmsv_state(space, zeta, sign, f64::INFINITY)?;
    let tv = match target.repr() {
        StateRepr::Pure(v) => v.clone(),
        _ => unreachable!(),
    };
    Ok(match state.repr() {
        StateRepr::Pure(v) => tv.dotc(v).norm_sqr(),
        StateRepr::Density(rho) => tv.dotc(&(rho * &tv)).re,
    })
}

/// Fidelity of a zero-mean two-mode Gaussian state with the ideal
/// tmsv(ζ, sign): F = 1/√det(σ_ρ + σ_tmsv) in the vacuum = ½I convention
/// (valid for a pure Gaussian target).
pub fn fidelity_with_tmsv_gaussian(
    g: &GaussianState,
    zeta: f64,
    sign: SqueezeSign,
) -> Result<f64, MetricsError> {
    if g.n_modes() != 2 {
        return Err(MetricsError::TooFewModes(g.n_modes()));
    }
    let mean_norm = g.mean().norm();
    if mean_norm > 1e-6 {
        return Err(MetricsError::NonZeroMean(mean_norm));
    }
    let sum = g.cov() + tmsv_covariance(zeta, sign);
    let det = sum.determinant();
    Ok(1.0 / det.sqrt())
}

/// Overlap fidelity of two zero-mean Gaussian states, one of which must be
/// pure: F = 1/(2^N √det((σ₁+σ₂)/2)).
pub fn gaussian_pure_overlap(a: &GaussianState, b: &GaussianState) -> Result<f64, MetricsError> {
    if a.n_modes() != b.n_modes() {
        return Err(MetricsError::TargetMismatch);
    }
    for g in [a, b] {
        let m = g.mean().norm();
        if m > 1e-6 {
            return Err(MetricsError::NonZeroMean(m));
        }
    }
    let n = a.n_modes() as i32;
    let sum = (a.cov() + b.cov()) * 0.5;
    Ok(1.0 / (2.0f64.powi(n) * sum.determinant().sqrt()))
}

/// Mean photon/phonon number of every mode of a Fock state.
pub fn occupations_fock(state: &QuantumState) -> Result<Vec<f64>, MetricsError> {
    let space = state.space();
    let mut out = Vec::with_capacity(space.n_modes());
    for label in space.labels() {
        let n = fock::number(space, label)?;
        out.push(expectation(&n, state)?.re);
    }
    Ok(out)
}

/// Mean photon/phonon number of every mode of a Gaussian state:
/// (⟨X²⟩ + ⟨P²⟩ − 1)/2 plus the mean-field contribution.
pub fn occupations_gaussian(g: &GaussianState) -> Vec<f64> {
    (0..g.n_modes())
        .map(|k| {
            let (x, p) = (2 * k, 2 * k + 1);
            let second = g.cov()[(x, x)] + g.cov()[(p, p)];
            let mean_sq = g.mean()[x] * g.mean()[x] + g.mean()[p] * g.mean()[p];
            (second + mean_sq - 1.0) / 2.0
        })
        .collect()
}

/// Tr ρ² of a Fock state.
pub fn purity_fock(state: &QuantumState) -> f64 {
    state.purity()
}

/// 1/(2^N √det σ) of a Gaussian state.
pub fn purity_gaussian(g: &GaussianState) -> f64 {
    let n = g.n_modes() as i32;
    1.0 / (2.0f64.powi(n) * g.cov().determinant().sqrt())
}

/// Trace distance ½‖ρ − σ‖₁ between two states on the same space.
pub fn trace_distance(a: &QuantumState, b: &QuantumState) -> Result<f64, MetricsError> {
    if a.space() != b.space() {
        return Err(MetricsError::Fock(FockError::SpaceMismatch));
    }
    let diff = a.density_matrix() - b.density_matrix();
    Ok(0.5 * trace_norm(&diff))
}

/// Trace norm (sum of singular values = sum of |eigenvalues| for Hermitian
/// input) of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    let herm = (m.adjoint() + m) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .sum()
}

/// Overlap |⟨ψ|φ⟩|² of two pure states, or Tr(ρσ) in general (which equals
/// the fidelity when at least one state is pure).
pub fn state_overlap(a: &QuantumState, b: &QuantumState) -> Result<f64, MetricsError> {
    if a.space() != b.space() {
        return Err(MetricsError::Fock(FockError::SpaceMismatch));
    }
    Ok(match (a.repr(), b.repr()) {
        (StateRepr::Pure(u), StateRepr::Pure(v)) => u.dotc(v).norm_sqr(),
        (StateRepr::Pure(u), StateRepr::Density(rho))
        | (StateRepr::Density(rho), StateRepr::Pure(u)) => u.dotc(&(rho * u)).re,
        (StateRepr::Density(r1), StateRepr::Density(r2)) => {
            let mut acc = 0.0;
            for i in 0..r1.nrows() {
                for j in 0..r1.ncols() {
                    acc += (r1[(i, j)] * r2[(j, i)]).re;
                }
            }
            acc
        }
    })
}

/// Mean vector of a two-mode Fock state's quadratures (diagnostic for the
/// Gaussian-fidelity precondition).
pub fn quadrature_mean(state: &QuantumState, labels: &[&str]) -> Result<DVector<f64>, MetricsError> {
    let space = state.space();
    let mut mean = DVector::zeros(2 * labels.len());
    for (k, label) in labels.iter().enumerate() {
        mean[2 * k] = expectation(&quadrature_x(space, label)?, state)?.re;
        mean[2 * k + 1] = expectation(&quadrature_p(space, label)?, state)?.re;
    }
    Ok(mean)
}
