//! Exact analytic solutions of the coherent three-mode dynamics: the
//! Heisenberg-picture propagator, its half-period form, and the
//! squeeze-parameter algebra.
//!
//! The propagator acts on the operator vector (a₁, a₂, b, a₁†, a₂†, b†) and
//! is valid in the elliptic regime |θ₂| > |θ₁|, where the motion is periodic
//! at Θ = √(θ₂² − θ₁²). The hyperbolic regime is rejected rather than
//! extended.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::gaussian::GaussianState;

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("requires |theta2| > |theta1| (elliptic regime), got theta1={theta1}, theta2={theta2}")]
    HyperbolicRegime { theta1: f64, theta2: f64 },
    #[error("scheme A squeeze parameter needs r = |theta2/theta1| > 1, got r={0}")]
    UnitRatio(f64),
    #[error("expected a 3-mode Gaussian state ordered (c1, c2, m), got {0} modes")]
    ModeCountMismatch(usize),
}

/// Which squeeze-parameter formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Coherent half-period scheme: ζ = tanh⁻¹[2r/(1+r²)], r = |θ₂/θ₁|.
    A,
    /// Dissipative Bogoliubov-cooling scheme: ς = tanh⁻¹[θ₁/θ₂].
    B,
}

/// The 6×6 linear map expressing (a₁, a₂, b, a₁†, a₂†, b†)(t) in terms of
/// the t = 0 operators.
#[derive(Debug, Clone)]
pub struct BogoliubovMap {
    matrix: DMatrix<Complex64>,
    time: f64,
}

impl BogoliubovMap {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Max-norm defect of the commutation metric J = [[0, I], [−I, 0]] under
    /// the map, ‖M J Mᵀ − J‖_max. Zero for a canonical transformation.
    pub fn symplectic_defect(&self) -> f64 {
        let n = 3;
        let mut j = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        for k in 0..n {
            j[(k, n + k)] = Complex64::new(1.0, 0.0);
            j[(n + k, k)] = Complex64::new(-1.0, 0.0);
        }
        let m = &self.matrix;
        let prod = m * &j * m.transpose();
        (prod - j).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm defect of the reality structure: the a† rows must be the
    /// conjugates of the a rows with daggered columns.
    pub fn reality_defect(&self) -> f64 {
        let n = 3;
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..(2 * n) {
                let partner = (j + n) % (2 * n);
                let d = (m[(n + i, partner)] - m[(i, j)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Push the map onto Gaussian moments. The state must have 3 modes
    /// ordered (c1, c2, m).
    pub fn apply_to_gaussian(&self, g: &GaussianState) -> Result<GaussianState, ClosedFormError> {
        if g.n_modes() != 3 {
            return Err(ClosedFormError::ModeCountMismatch(g.n_modes()));
        }
        let t = self.quadrature_matrix();
        let mean = &t * g.mean();
        let cov = &t * g.cov() * t.transpose();
        Ok(GaussianState::from_parts_symmetrized(mean, cov))
    }

    /// Real 6×6 quadrature representation of the map in the interleaved
    /// (X₁, P₁, X₂, P₂, X₃, P₃) ordering.
    pub fn quadrature_matrix(&self) -> DMatrix<f64> {
        let n = 3;
        // R = W (a; a†): X_j = (a_j + a_j†)/√2, P_j = −i(a_j − a_j†)/√2.
        let mut w = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        for k in 0..n {
            w[(2 * k, k)] = Complex64::new(inv_sqrt2, 0.0);
            w[(2 * k, n + k)] = Complex64::new(inv_sqrt2, 0.0);
            w[(2 * k + 1, k)] = Complex64::new(0.0, -inv_sqrt2);
            w[(2 * k + 1, n + k)] = Complex64::new(0.0, inv_sqrt2);
        }
        let t = &w * &self.matrix * w.adjoint();
        let imag_worst = t.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        debug_assert!(
            imag_worst < 1e-10,
            "quadrature map should be real, imag defect {imag_worst:.3e}"
        );
        DMatrix::from_fn(2 * n, 2 * n, |i, j| t[(i, j)].re)
    }
}

fn check_elliptic(theta1: f64, theta2: f64) -> Result<f64, ClosedFormError> {
    if !(theta2.abs() > theta1.abs()) {
        return Err(ClosedFormError::HyperbolicRegime { theta1, theta2 });
    }
    Ok((theta2 * theta2 - theta1 * theta1).sqrt())
}

/// The Heisenberg propagator of the coherent scheme at time `t`.
pub fn propagator(theta1: f64, theta2: f64, t: f64) -> Result<BogoliubovMap, ClosedFormError> {
    let big = check_elliptic(theta1, theta2)?;
    let big_sq = big * big;
    let (sin, cos) = (big * t).sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);

    let mut m = DMatrix::<Complex64>::zeros(6, 6);
    // a₁(t) = [(θ₂² − θ₁² cos Θt)/Θ²] a₁ + [θ₁θ₂(1 − cos Θt)/Θ²] a₂†
    //        + i(θ₁/Θ) sin Θt · b†
    m[(0, 0)] = re((theta2 * theta2 - theta1 * theta1 * cos) / big_sq);
    m[(0, 4)] = re(theta1 * theta2 * (1.0 - cos) / big_sq);
    m[(0, 5)] = im(theta1 * sin / big);
    // a₂(t) = −[(θ₁² − θ₂² cos Θt)/Θ²] a₂ − [θ₁θ₂(1 − cos Θt)/Θ²] a₁†
    //        + i(θ₂/Θ) sin Θt · b
    m[(1, 1)] = re(-(theta1 * theta1 - theta2 * theta2 * cos) / big_sq);
    m[(1, 3)] = re(-theta1 * theta2 * (1.0 - cos) / big_sq);
    m[(1, 2)] = im(theta2 * sin / big);
    // b(t) = cos Θt · b + i(θ₂/Θ) sin Θt · a₂ + i(θ₁/Θ) sin Θt · a₁†
    m[(2, 2)] = re(cos);
    m[(2, 1)] = im(theta2 * sin / big);
    m[(2, 3)] = im(theta1 * sin / big);
    // dagger rows by the reality structure
    for i in 0..3 {
        for j in 0..6 {
            let partner = (j + 3) % 6;
            m[(3 + i, partner)] = m[(i, j)].conj();
        }
    }
    Ok(BogoliubovMap { matrix: m, time: t })
}

/// The half period T_π = π/Θ at which the mechanical mode decouples.
pub fn half_period(theta1: f64, theta2: f64) -> Result<f64, ClosedFormError> {
    let big = check_elliptic(theta1, theta2)?;
    Ok(std::f64::consts::PI / big)
}

/// Squeeze parameter of the two-mode squeezed state each scheme targets.
pub fn squeeze_parameter(theta1: f64, theta2: f64, scheme: Scheme) -> Result<f64, ClosedFormError> {
    match scheme {
        Scheme::A => {
            let r = (theta2 / theta1).abs();
            if r <= 1.0 {
                return Err(ClosedFormError::UnitRatio(r));
            }
            let arg = 2.0 * r / (1.0 + r * r);
            Ok(arg.atanh())
        }
        Scheme::B => {
            check_elliptic(theta1, theta2)?;
            Ok((theta1 / theta2).atanh())
        }
    }
}

/// Apply the complex 6×6 map to a vector of mode amplitudes (test helper for
/// moment propagation): given ⟨v(0)⟩ returns ⟨v(t)⟩.
pub fn apply_to_amplitudes(
    map: &BogoliubovMap,
    amps: &DVector<Complex64>,
) -> DVector<Complex64> {
    map.matrix() * amps
}
