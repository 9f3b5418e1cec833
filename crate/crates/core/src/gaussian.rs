//! Exact Gaussian-moment engine: drift/diffusion construction from a
//! [`SystemSpec`], moment ODE evolution, and the Lyapunov steady state.
//!
//! Every Hamiltonian here is quadratic and every bath linear, so the first
//! and second moments obey closed ODEs
//!
//!   d⟨R⟩/dt = A⟨R⟩,   dσ/dt = Aσ + σAᵀ + D,
//!
//! which this module integrates exactly (up to RK4 truncation) in the
//! interleaved quadrature ordering (X₁, P₁, …, X_N, P_N) with vacuum
//! covariance ½·Identity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{expectation, quadrature_p, quadrature_x, FockError, QuantumState};
use crate::model::{CouplingKind, LindbladChannel, SystemSpec};

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("dimension mismatch: state has {state} quadratures, drift is {drift}x{drift}")]
    DimensionMismatch { state: usize, drift: usize },
    #[error("drift matrix is not Hurwitz (max eigenvalue real part {0:.3e}); no steady state")]
    NotHurwitz(f64),
    #[error("Lyapunov linear system is singular")]
    SingularLyapunov,
    #[error("covariance lost symmetry during integration (defect {0:.3e}); reduce the step")]
    SymmetryLost(f64),
    #[error("label '{0}' does not resolve to a spec mode")]
    UnresolvedLabel(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Mean vector and symmetric covariance matrix of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Vacuum of `n` modes: zero mean, covariance ½I.
    pub fn vacuum(n: usize) -> Self {
        GaussianState {
            mean: DVector::zeros(2 * n),
            cov: DMatrix::identity(2 * n, 2 * n) * 0.5,
        }
    }

    /// Product of thermal states with the given mean occupations.
    pub fn thermal(occupations: &[f64]) -> Self {
        let n = occupations.len();
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for (k, &nbar) in occupations.iter().enumerate() {
            cov[(2 * k, 2 * k)] = nbar + 0.5;
            cov[(2 * k + 1, 2 * k + 1)] = nbar + 0.5;
        }
        GaussianState {
            mean: DVector::zeros(2 * n),
            cov,
        }
    }

    pub fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        assert_eq!(mean.len(), cov.nrows());
        assert_eq!(cov.nrows(), cov.ncols());
        assert!(mean.len() % 2 == 0, "need an (X, P) pair per mode");
        GaussianState { mean, cov }
    }

    /// Like [`Self::from_parts`] but forces exact symmetry of the stored
    /// covariance.
    pub fn from_parts_symmetrized(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        let sym = (&cov + cov.transpose()) * 0.5;
        Self::from_parts(mean, sym)
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.cov - self.cov.transpose())
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian matrix σ + (i/2)Ω. Physical
    /// states have this ≥ 0 (up to roundoff): the uncertainty principle.
    pub fn uncertainty_eigenvalue(&self) -> f64 {
        let n2 = self.mean.len();
        let mut m = DMatrix::<Complex64>::zeros(n2, n2);
        for i in 0..n2 {
            for j in 0..n2 {
                m[(i, j)] = Complex64::new(self.cov[(i, j)], 0.0);
            }
        }
        let omega = symplectic_form(self.n_modes());
        for i in 0..n2 {
            for j in 0..n2 {
                m[(i, j)] += Complex64::new(0.0, 0.5 * omega[(i, j)]);
            }
        }
        crate::fock::min_hermitian_eigenvalue(&m)
    }
}

/// The symplectic form Ω in the interleaved ordering: blocks [[0, 1], [−1, 0]]
/// per mode.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Drift matrix A and diffusion matrix D governing the moment ODEs.
#[derive(Debug, Clone)]
pub struct DriftDiffusion {
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    n_modes: usize,
}

impl DriftDiffusion {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Largest real part among the drift eigenvalues.
    pub fn max_eigenvalue_real_part(&self) -> f64 {
        self.a
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_hurwitz(&self) -> bool {
        self.max_eigenvalue_real_part() < 0.0
    }
}

/// Assemble the exact moment ODE matrices for a spec. The Hamiltonian
/// contributes the symplectic flow ΩG; each channel L = uᵀR at rate γ
/// contributes A += γ·Ω·Im(ū uᵀ) and D += γ·Ω·Re(ū uᵀ)·Ωᵀ.
pub fn drift_diffusion(spec: &SystemSpec) -> Result<DriftDiffusion, GaussianError> {
    let labels: Vec<&str> = spec.modes.iter().map(|(l, _)| l.as_str()).collect();
    let n = labels.len();
    let mode_index = |label: &str| -> Result<usize, GaussianError> {
        labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| GaussianError::UnresolvedLabel(label.to_string()))
    };

    // Hamiltonian part H = ½ Rᵀ G R.
    let mut g = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for c in &spec.couplings {
        let i = mode_index(&c.mode_i)?;
        let j = mode_index(&c.mode_j)?;
        let (xi, pi) = (2 * i, 2 * i + 1);
        let (xj, pj) = (2 * j, 2 * j + 1);
        let s = c.strength;
        let (cphi, sphi) = (c.phase.cos(), c.phase.sin());
        match c.kind {
            CouplingKind::TwoModeSqueeze => {
                // −s[cos φ(X_iX_j − P_iP_j) + sin φ(X_iP_j + P_iX_j)]
                g[(xi, xj)] += -s * cphi;
                g[(xj, xi)] += -s * cphi;
                g[(pi, pj)] += s * cphi;
                g[(pj, pi)] += s * cphi;
                g[(xi, pj)] += -s * sphi;
                g[(pj, xi)] += -s * sphi;
                g[(pi, xj)] += -s * sphi;
                g[(xj, pi)] += -s * sphi;
            }
            CouplingKind::BeamSplitter => {
                // −s[cos φ(X_iX_j + P_iP_j) − sin φ(X_iP_j − P_iX_j)]
                g[(xi, xj)] += -s * cphi;
                g[(xj, xi)] += -s * cphi;
                g[(pi, pj)] += -s * cphi;
                g[(pj, pi)] += -s * cphi;
                g[(xi, pj)] += s * sphi;
                g[(pj, xi)] += s * sphi;
                g[(pi, xj)] += -s * sphi;
                g[(xj, pi)] += -s * sphi;
            }
        }
    }
    let omega = symplectic_form(n);
    let mut a = &omega * &g;
    let mut d = DMatrix::<f64>::zeros(2 * n, 2 * n);

    // Channel contributions via the complex quadrature coefficient vector u.
    let mut add_linear_channel = |u: &DVector<Complex64>, rate: f64| {
        let dim = 2 * n;
        let mut im_part = DMatrix::<f64>::zeros(dim, dim);
        let mut re_part = DMatrix::<f64>::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let prod = u[r].conj() * u[c];
                im_part[(r, c)] = prod.im;
                re_part[(r, c)] = prod.re;
            }
        }
        a += &omega * &im_part * rate;
        d += &omega * &re_part * omega.transpose() * rate;
    };

    let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
    for ch in &spec.channels {
        match ch {
            LindbladChannel::Damping {
                mode,
                down_rate,
                up_rate,
            } => {
                let k = mode_index(mode)?;
                // L = a_k: u_X = 1/√2, u_P = i/√2
                let mut u = DVector::<Complex64>::zeros(2 * n);
                u[2 * k] = Complex64::new(inv_sqrt2, 0.0);
                u[2 * k + 1] = Complex64::new(0.0, inv_sqrt2);
                if *down_rate > 0.0 {
                    add_linear_channel(&u, *down_rate);
                }
                // L = a_k†: u_X = 1/√2, u_P = −i/√2
                u[2 * k + 1] = Complex64::new(0.0, -inv_sqrt2);
                if *up_rate > 0.0 {
                    add_linear_channel(&u, *up_rate);
                }
            }
            LindbladChannel::Collective { terms, rate } => {
                let mut u = DVector::<Complex64>::zeros(2 * n);
                for t in terms {
                    let k = mode_index(&t.mode)?;
                    u[2 * k] += Complex64::new((t.lower + t.raise) * inv_sqrt2, 0.0);
                    u[2 * k + 1] += Complex64::new(0.0, (t.lower - t.raise) * inv_sqrt2);
                }
                if *rate > 0.0 {
                    add_linear_channel(&u, *rate);
                }
            }
        }
    }

    Ok(DriftDiffusion { a, d, n_modes: n })
}

fn default_step(dd: &DriftDiffusion) -> f64 {
    // ‖A‖∞ sets both the fastest rotation and the fastest decay; 2e-3/‖A‖
    // keeps the RK4 flow-map error far below the cross-engine tolerances.
    let norm_inf = (0..dd.a.nrows())
        .map(|i| dd.a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm_inf > 0.0 {
        2e-3 / norm_inf
    } else {
        f64::INFINITY
    }
}

/// Integrate the moment ODEs, sampling at the given times. `t_grid` must be
/// non-decreasing and start at 0; the first returned state is `g0`.
pub fn evolve_moments(
    dd: &DriftDiffusion,
    g0: &GaussianState,
    t_grid: &[f64],
) -> Result<Vec<GaussianState>, GaussianError> {
    evolve_moments_with_step(dd, g0, t_grid, None)
}

/// [`evolve_moments`] with an explicit RK4 step (None = automatic).
pub fn evolve_moments_with_step(
    dd: &DriftDiffusion,
    g0: &GaussianState,
    t_grid: &[f64],
    step: Option<f64>,
) -> Result<Vec<GaussianState>, GaussianError> {
    let dim = 2 * dd.n_modes;
    if g0.mean.len() != dim {
        return Err(GaussianError::DimensionMismatch {
            state: g0.mean.len(),
            drift: dim,
        });
    }
    let h_target = step.unwrap_or_else(|| default_step(dd));
    let a = &dd.a;
    let at = dd.a.transpose();
    let d = &dd.d;

    let mut mean = g0.mean.clone();
    let mut cov = g0.cov.clone();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut t_now = t_grid.first().copied().unwrap_or(0.0);
    out.push(GaussianState::from_parts(mean.clone(), cov.clone()));

    let cov_rhs = |c: &DMatrix<f64>| a * c + c * &at + d;

    for &t_next in &t_grid[1..] {
        let span = t_next - t_now;
        if span <= 0.0 {
            out.push(GaussianState::from_parts(mean.clone(), cov.clone()));
            continue;
        }
        let n_steps = if h_target.is_finite() {
            (span / h_target).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = span / n_steps as f64;
        for _ in 0..n_steps {
            // mean
            let k1 = a * &mean;
            let k2 = a * &(&mean + &k1 * (h / 2.0));
            let k3 = a * &(&mean + &k2 * (h / 2.0));
            let k4 = a * &(&mean + &k3 * h);
            mean += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            // covariance
            let k1 = cov_rhs(&cov);
            let k2 = cov_rhs(&(&cov + &k1 * (h / 2.0)));
            let k3 = cov_rhs(&(&cov + &k2 * (h / 2.0)));
            let k4 = cov_rhs(&(&cov + &k3 * h));
            cov += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        let defect = (&cov - cov.transpose())
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        if defect > 1e-8 {
            return Err(GaussianError::SymmetryLost(defect));
        }
        t_now = t_next;
        out.push(GaussianState::from_parts(mean.clone(), cov.clone()));
    }
    Ok(out)
}

/// Steady-state covariance from Aσ + σAᵀ + D = 0, solved as a dense
/// vectorized linear system. Requires A Hurwitz; the mean is zero.
pub fn lyapunov_steady(dd: &DriftDiffusion) -> Result<GaussianState, GaussianError> {
    let max_re = dd.max_eigenvalue_real_part();
    if max_re >= 0.0 {
        return Err(GaussianError::NotHurwitz(max_re));
    }
    let n2 = 2 * dd.n_modes;
    let eye = DMatrix::<f64>::identity(n2, n2);
    // column-major vec: vec(Aσ) = (I⊗A)vecσ, vec(σAᵀ) = (A⊗I)vecσ
    let system = eye.kronecker(&dd.a) + dd.a.kronecker(&eye);
    let mut rhs = DVector::<f64>::zeros(n2 * n2);
    for j in 0..n2 {
        for i in 0..n2 {
            rhs[j * n2 + i] = -dd.d[(i, j)];
        }
    }
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(GaussianError::SingularLyapunov)?;
    let mut cov = DMatrix::<f64>::zeros(n2, n2);
    for j in 0..n2 {
        for i in 0..n2 {
            cov[(i, j)] = solution[j * n2 + i];
        }
    }
    Ok(GaussianState::from_parts_symmetrized(
        DVector::zeros(n2),
        cov,
    ))
}

/// Residual ‖Aσ + σAᵀ + D‖_max of a candidate steady covariance.
pub fn lyapunov_residual(dd: &DriftDiffusion, g: &GaussianState) -> f64 {
    (&dd.a * g.cov() + g.cov() * dd.a.transpose() + &dd.d)
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

/// Extract first and symmetrized second quadrature moments of a Fock-space
/// state on the given mode subset (indices into the state's space).
pub fn gaussian_from_fock(
    state: &QuantumState,
    modes: &[usize],
) -> Result<GaussianState, GaussianError> {
    let space = state.space();
    let k = modes.len();
    let mut mean = DVector::<f64>::zeros(2 * k);
    let mut cov = DMatrix::<f64>::zeros(2 * k, 2 * k);
    match state.repr() {
        crate::fock::StateRepr::Pure(v) => {
            // Matrix-free: apply each quadrature to the vector once;
            // all moments follow from dot products.
            let inv_sqrt2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
            let minus_i_inv_sqrt2 = Complex64::new(0.0, -1.0 / 2.0f64.sqrt());
            let mut applied = Vec::with_capacity(2 * k);
            for &m in modes {
                let low = crate::fock::apply_lowering(space, m, v);
                let rai = crate::fock::apply_raising(space, m, v);
                applied.push((&low + &rai) * inv_sqrt2);
                applied.push((low - rai) * minus_i_inv_sqrt2);
            }
            for (idx, rv) in applied.iter().enumerate() {
                mean[idx] = v.dotc(rv).re;
            }
            for i in 0..2 * k {
                for j in i..2 * k {
                    // ⟨R_iR_j⟩ = (R_i ψ)†(R_j ψ) for Hermitian R_i; the
                    // real part is the symmetrized second moment
                    let sym = applied[i].dotc(&applied[j]).re;
                    let c = sym - mean[i] * mean[j];
                    cov[(i, j)] = c;
                    cov[(j, i)] = c;
                }
            }
        }
        crate::fock::StateRepr::Density(rho) => {
            let mut quads = Vec::with_capacity(2 * k);
            for &m in modes {
                let label = &space.labels()[m];
                quads.push(quadrature_x(space, label)?);
                quads.push(quadrature_p(space, label)?);
            }
            for (idx, q) in quads.iter().enumerate() {
                mean[idx] = expectation(q, state)?.re;
            }
            for i in 0..2 * k {
                let qi_rho = quads[i].matrix() * rho;
                for j in i..2 * k {
                    // Tr(ρ R_j R_i) has real part = symmetrized moment
                    let mut acc = Complex64::new(0.0, 0.0);
                    let n = rho.nrows();
                    let qj = quads[j].matrix();
                    for r in 0..n {
                        for c2 in 0..n {
                            acc += qj[(r, c2)] * qi_rho[(c2, r)];
                        }
                    }
                    let c = acc.re - mean[i] * mean[j];
                    cov[(i, j)] = c;
                    cov[(j, i)] = c;
                }
            }
        }
    }
    Ok(GaussianState::from_parts(mean, cov))
}
