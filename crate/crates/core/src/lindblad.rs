//! Fock-space master-equation integrator and the stroboscopic alternation
//! scheduler.
//!
//! Integrates dρ/dt = −i[H,ρ] + Σ (γ/2)(2LρL† − L†Lρ − ρL†L) with ħ = 1.
//! The default method is fixed-step RK4 directly on the density matrix; a
//! vectorized-propagator exponential path exists for cross-validation on
//! small spaces. No superoperator is materialized on the RK4 path: the
//! compiled H and L matrices carry O(total_dim) nonzeros, so the right-hand
//! side is applied through a CSR view at O(nnz·d) per product instead of
//! O(d³).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{FockError, FockSpace, Operator, QuantumState, StateRepr};
use crate::metrics::{trace_distance, trace_norm, MetricsError};
use crate::model::ModelError;
use crate::sparse::{adjoint_into, Csr};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("Hamiltonian is not Hermitian (defect {0:.3e})")]
    NonHermitian(f64),
    #[error("t_grid must start at 0 and increase strictly")]
    BadGrid,
    #[error("operator/state space mismatch")]
    SpaceMismatch,
    #[error("initial state must be a pure vector for Schrödinger evolution")]
    NotPure,
    #[error(
        "trace drift {drift:.3e} at t={t:.6} exceeds tolerance {tol:.1e}; reduce the step size"
    )]
    TraceDrift { t: f64, drift: f64, tol: f64 },
    #[error("fixed step must be positive, got {0}")]
    BadStep(f64),
    #[error("steady-state detection needs at least one channel with positive rate")]
    NoChannels,
    #[error(
        "no steady state within horizon t={horizon:.3}: trace-norm increment still {increment:.3e} \
         (non-mixing system, e.g. a degenerate steady-state family)"
    )]
    NonConvergence { horizon: f64, increment: f64 },
    #[error("stroboscopic cycle duration must be positive, got {0}")]
    BadCycle(f64),
    #[error("adiabatic check requires gamma_m ≥ 10·max(theta), got ratio {0:.2}")]
    RegimeViolation(f64),
    #[error("exponential method limited to total_dim ≤ {max}, got {got}")]
    ExponentialTooLarge { max: usize, got: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

const EXPONENTIAL_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Fixed-step RK4 on the density matrix (default).
    Rk4,
    /// Exact stepping of the vectorized propagator, for cross-validation on
    /// total_dim ≤ 64.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// h = min(0.02/ω_max, 0.8/λ_stiff) with ω_max the larger of the
    /// Hamiltonian spectral-radius estimate and the channel rates, and
    /// λ_stiff the fastest dissipative decay estimate.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub method: Method,
    pub step: StepSize,
    /// Abort when |Tr ρ − 1| exceeds this.
    pub trace_tol: f64,
    /// Compute the (expensive) smallest density-matrix eigenvalue on every
    /// k-th sample; 0 disables.
    pub eig_stride: usize,
    /// Steady-state detection: steps between trace-norm checks.
    pub check_stride: usize,
    /// Steady-state detection: horizon in units of the inverse rate scale.
    pub horizon_factor: f64,
    /// Steady-state detection: trace-norm increment per unit scaled time.
    pub steady_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: Method::Rk4,
            step: StepSize::Auto,
            trace_tol: 1e-7,
            eig_stride: 16,
            check_stride: 32,
            horizon_factor: 50.0,
            steady_tol: 1e-8,
        }
    }
}

/// Per-sample integration diagnostics.
#[derive(Debug, Clone)]
pub struct StepDiagnostics {
    pub time: f64,
    pub trace_drift: f64,
    pub step_used: f64,
    pub min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub warnings: Vec<String>,
}

impl EvolutionResult {
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("at least the initial sample")
    }

    /// CSV rows of t plus the real part of each observable's expectation.
    pub fn export_csv(&self, observables: &[(String, Operator)]) -> Result<String, FockError> {
        let mut out = String::from("t");
        for (name, _) in observables {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (t, state) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{:.11e}", t));
            for (_, op) in observables {
                let val = crate::fock::expectation(op, state)?;
                out.push_str(&format!(",{:.11e}", val.re));
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// JSON summary; full states are included only on request.
    pub fn to_json(&self, include_states: bool) -> String {
        let diag: Vec<serde_json::Value> = self
            .diagnostics
            .iter()
            .map(|d| {
                serde_json::json!({
                    "time": d.time,
                    "trace_drift": d.trace_drift,
                    "step_used": d.step_used,
                    "min_eigenvalue": d.min_eigenvalue,
                })
            })
            .collect();
        let mut value = serde_json::json!({
            "times": self.times,
            "diagnostics": diag,
            "warnings": self.warnings,
        });
        if include_states {
            let states: Vec<serde_json::Value> = self
                .states
                .iter()
                .map(|s| serde_json::from_str(&s.to_json()).expect("state json"))
                .collect();
            value["states"] = serde_json::Value::Array(states);
        }
        serde_json::to_string_pretty(&value).expect("result serializes")
    }
}

// ---------------------------------------------------------------------------
// Compiled right-hand side
// ---------------------------------------------------------------------------

struct CompiledRhs {
    dim: usize,
    h: Option<Csr>,
    /// Σ (γ/2) L†L, Hermitian.
    g: Option<Csr>,
    jumps: Vec<(Csr, f64)>,
    tmp_a: DMatrix<Complex64>,
    tmp_b: DMatrix<Complex64>,
}

impl CompiledRhs {
    fn new(h: &Operator, channels: &[(Operator, f64)]) -> Self {
        let dim = h.space().total_dim();
        let h_csr = if h.norm() > 0.0 {
            Some(Csr::from_dense(h.matrix()))
        } else {
            None
        };
        let mut g_dense = DMatrix::<Complex64>::zeros(dim, dim);
        let mut jumps = Vec::new();
        for (l, rate) in channels {
            if *rate == 0.0 {
                continue;
            }
            let ldag_l = l.matrix().adjoint() * l.matrix();
            g_dense += ldag_l * Complex64::new(rate / 2.0, 0.0);
            jumps.push((Csr::from_dense(l.matrix()), *rate));
        }
        let g = if jumps.is_empty() {
            None
        } else {
            Some(Csr::from_dense(&g_dense))
        };
        CompiledRhs {
            dim,
            h: h_csr,
            g,
            jumps,
            tmp_a: DMatrix::zeros(dim, dim),
            tmp_b: DMatrix::zeros(dim, dim),
        }
    }

    /// out = −i[H,ρ] + Σ γ (LρL† − ½{L†L, ρ})
    fn apply(&mut self, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        let n = self.dim;
        out.fill(Complex64::new(0.0, 0.0));
        if let Some(h) = &self.h {
            // A = Hρ; −i(Hρ − ρH) = −i(A − A†) for Hermitian ρ, H
            h.mul_dense(rho, &mut self.tmp_a);
            for i in 0..n {
                for j in 0..n {
                    let z = self.tmp_a[(i, j)] - self.tmp_a[(j, i)].conj();
                    out[(i, j)] += Complex64::new(z.im, -z.re); // −i·z
                }
            }
        }
        if let Some(g) = &self.g {
            // A = Gρ; anticommutator part −(A + A†)
            g.mul_dense(rho, &mut self.tmp_a);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] -= self.tmp_a[(i, j)] + self.tmp_a[(j, i)].conj();
                }
            }
        }
        for (l, rate) in &self.jumps {
            // LρL† = (L(Lρ)†)†
            l.mul_dense(rho, &mut self.tmp_a);
            adjoint_into(&self.tmp_a.clone(), &mut self.tmp_b);
            l.mul_dense(&self.tmp_b.clone(), &mut self.tmp_a);
            let r = Complex64::new(*rate, 0.0);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += r * self.tmp_a[(j, i)].conj();
                }
            }
        }
    }
}

fn infinity_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Fastest dissipative decay estimate: Σ γ·max diag(L†L).
fn stiffness_estimate(channels: &[(Operator, f64)]) -> f64 {
    channels
        .iter()
        .map(|(l, rate)| {
            let m = l.matrix();
            let max_col: f64 = (0..m.ncols())
                .map(|k| m.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .fold(0.0, f64::max);
            rate * max_col
        })
        .sum()
}

fn resolve_step(
    opts: &SolverOptions,
    h: &Operator,
    channels: &[(Operator, f64)],
) -> Result<f64, SolverError> {
    match opts.step {
        StepSize::Fixed(h_fix) => {
            if h_fix <= 0.0 || !h_fix.is_finite() {
                return Err(SolverError::BadStep(h_fix));
            }
            Ok(h_fix)
        }
        StepSize::Auto => {
            let omega_max = infinity_norm(h.matrix()).max(
                channels
                    .iter()
                    .map(|(_, r)| *r)
                    .fold(0.0f64, f64::max),
            );
            let accuracy = if omega_max > 0.0 {
                0.02 / omega_max
            } else {
                f64::INFINITY
            };
            let stiff = stiffness_estimate(channels);
            let stability = if stiff > 0.0 { 0.8 / stiff } else { f64::INFINITY };
            Ok(accuracy.min(stability))
        }
    }
}

fn validate_grid(t_grid: &[f64]) -> Result<(), SolverError> {
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(SolverError::BadGrid);
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolverError::BadGrid);
    }
    Ok(())
}

fn hermitize(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
}

fn rk4_steps(
    rhs: &mut CompiledRhs,
    rho: &mut DMatrix<Complex64>,
    span: f64,
    h_target: f64,
    work: &mut Rk4Work,
) {
    let n_steps = if h_target.is_finite() {
        (span / h_target).ceil().max(1.0) as usize
    } else {
        1
    };
    let h = span / n_steps as f64;
    for _ in 0..n_steps {
        rhs.apply(rho, &mut work.k1);
        axpy_into(&mut work.stage, rho, &work.k1, h / 2.0);
        rhs.apply(&work.stage, &mut work.k2);
        axpy_into(&mut work.stage, rho, &work.k2, h / 2.0);
        rhs.apply(&work.stage, &mut work.k3);
        axpy_into(&mut work.stage, rho, &work.k3, h);
        rhs.apply(&work.stage, &mut work.k4);
        let w = h / 6.0;
        let rho_s = rho.as_mut_slice();
        let k1 = work.k1.as_slice();
        let k2 = work.k2.as_slice();
        let k3 = work.k3.as_slice();
        let k4 = work.k4.as_slice();
        for idx in 0..rho_s.len() {
            rho_s[idx] += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * w;
        }
    }
}

struct Rk4Work {
    k1: DMatrix<Complex64>,
    k2: DMatrix<Complex64>,
    k3: DMatrix<Complex64>,
    k4: DMatrix<Complex64>,
    stage: DMatrix<Complex64>,
}

impl Rk4Work {
    fn new(dim: usize) -> Self {
        Rk4Work {
            k1: DMatrix::zeros(dim, dim),
            k2: DMatrix::zeros(dim, dim),
            k3: DMatrix::zeros(dim, dim),
            k4: DMatrix::zeros(dim, dim),
            stage: DMatrix::zeros(dim, dim),
        }
    }
}

/// stage = base + k·c
fn axpy_into(
    stage: &mut DMatrix<Complex64>,
    base: &DMatrix<Complex64>,
    k: &DMatrix<Complex64>,
    c: f64,
) {
    let s = stage.as_mut_slice();
    let b = base.as_slice();
    let kk = k.as_slice();
    for idx in 0..s.len() {
        s[idx] = b[idx] + kk[idx] * c;
    }
}

fn validate_inputs(
    h: &Operator,
    channels: &[(Operator, f64)],
    rho0: &QuantumState,
) -> Result<(), SolverError> {
    let defect = crate::fock::hermitian_defect(h.matrix());
    let scale = 1.0 + infinity_norm(h.matrix());
    if defect > 1e-9 * scale {
        return Err(SolverError::NonHermitian(defect));
    }
    if rho0.space() != h.space() {
        return Err(SolverError::SpaceMismatch);
    }
    for (l, _) in channels {
        if l.space() != h.space() {
            return Err(SolverError::SpaceMismatch);
        }
    }
    Ok(())
}

/// Integrate the master equation, sampling the state at every point of
/// `t_grid` (which must start at 0).
pub fn evolve(
    h: &Operator,
    channels: &[(Operator, f64)],
    rho0: &QuantumState,
    t_grid: &[f64],
    opts: &SolverOptions,
) -> Result<EvolutionResult, SolverError> {
    validate_inputs(h, channels, rho0)?;
    validate_grid(t_grid)?;
    match opts.method {
        Method::Rk4 => evolve_rk4(h, channels, rho0, t_grid, opts),
        Method::Exponential => evolve_exponential(h, channels, rho0, t_grid, opts),
    }
}

fn sample_diagnostics(
    rho: &DMatrix<Complex64>,
    t: f64,
    h_used: f64,
    sample_idx: usize,
    opts: &SolverOptions,
) -> StepDiagnostics {
    let min_eig = if opts.eig_stride > 0 && sample_idx % opts.eig_stride == 0 {
        Some(crate::fock::min_hermitian_eigenvalue(rho))
    } else {
        None
    };
    StepDiagnostics {
        time: t,
        trace_drift: (rho.trace().re - 1.0).abs(),
        step_used: h_used,
        min_eigenvalue: min_eig,
    }
}

fn evolve_rk4(
    h: &Operator,
    channels: &[(Operator, f64)],
    rho0: &QuantumState,
    t_grid: &[f64],
    opts: &SolverOptions,
) -> Result<EvolutionResult, SolverError> {
    let h_target = resolve_step(opts, h, channels)?;
    let mut rhs = CompiledRhs::new(h, channels);
    let mut work = Rk4Work::new(rhs.dim);
    let mut rho = rho0.density_matrix();
    let space = rho0.space().clone();

    let mut times = Vec::with_capacity(t_grid.len());
    let mut states = Vec::with_capacity(t_grid.len());
    let mut diagnostics = Vec::with_capacity(t_grid.len());

    times.push(0.0);
    states.push(QuantumState::density_unchecked(space.clone(), rho.clone()));
    diagnostics.push(sample_diagnostics(&rho, 0.0, h_target, 0, opts));

    let mut t_now = 0.0;
    for (idx, &t_next) in t_grid[1..].iter().enumerate() {
        rk4_steps(&mut rhs, &mut rho, t_next - t_now, h_target, &mut work);
        hermitize(&mut rho);
        let drift = (rho.trace().re - 1.0).abs();
        if drift > opts.trace_tol {
            return Err(SolverError::TraceDrift {
                t: t_next,
                drift,
                tol: opts.trace_tol,
            });
        }
        t_now = t_next;
        times.push(t_next);
        diagnostics.push(sample_diagnostics(&rho, t_next, h_target, idx + 1, opts));
        states.push(QuantumState::density_unchecked(space.clone(), rho.clone()));
    }
    Ok(EvolutionResult {
        times,
        states,
        diagnostics,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Vectorized-propagator exponential path
// ---------------------------------------------------------------------------

/// Dense superoperator of the master equation acting on column-major vec(ρ).
pub fn liouvillian_superoperator(
    h: &Operator,
    channels: &[(Operator, f64)],
) -> Result<DMatrix<Complex64>, SolverError> {
    let d = h.space().total_dim();
    if d > EXPONENTIAL_MAX_DIM {
        return Err(SolverError::ExponentialTooLarge {
            max: EXPONENTIAL_MAX_DIM,
            got: d,
        });
    }
    let eye = DMatrix::<Complex64>::identity(d, d);
    let hm = h.matrix();
    let minus_i = Complex64::new(0.0, -1.0);
    // vec(AρB) = (Bᵀ ⊗ A) vec(ρ)
    let mut sup = (eye.kronecker(hm) - hm.transpose().kronecker(&eye)) * minus_i;
    for (l, rate) in channels {
        if *rate == 0.0 {
            continue;
        }
        let lm = l.matrix();
        let ldl = lm.adjoint() * lm;
        let half = Complex64::new(rate / 2.0, 0.0);
        sup += (lm.map(|z| z.conj()).kronecker(lm) * Complex64::new(2.0, 0.0)
            - eye.kronecker(&ldl)
            - ldl.transpose().kronecker(&eye))
            * half;
    }
    Ok(sup)
}

/// w = exp(S·t)·v by scaled Taylor summation.
fn expm_multiply(s: &DMatrix<Complex64>, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    let norm = (0..s.nrows())
        .map(|i| s.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let substeps = (norm * t).ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    let mut w = v.clone();
    for _ in 0..substeps {
        let mut term = w.clone();
        let mut acc = w.clone();
        for k in 1..200 {
            term = s * &term * Complex64::new(dt / k as f64, 0.0);
            acc += &term;
            if term.norm() < 1e-16 * acc.norm().max(1.0) {
                break;
            }
        }
        w = acc;
    }
    w
}

fn evolve_exponential(
    h: &Operator,
    channels: &[(Operator, f64)],
    rho0: &QuantumState,
    t_grid: &[f64],
    opts: &SolverOptions,
) -> Result<EvolutionResult, SolverError> {
    let sup = liouvillian_superoperator(h, channels)?;
    let d = h.space().total_dim();
    let space = rho0.space().clone();
    let rho = rho0.density_matrix();
    let mut vec_rho = DVector::<Complex64>::from_iterator(d * d, rho.iter().cloned());

    let mut times = Vec::with_capacity(t_grid.len());
    let mut states = Vec::with_capacity(t_grid.len());
    let mut diagnostics = Vec::with_capacity(t_grid.len());
    times.push(0.0);
    states.push(QuantumState::density_unchecked(space.clone(), rho.clone()));
    diagnostics.push(sample_diagnostics(&rho, 0.0, 0.0, 0, opts));

    let mut t_now = 0.0;
    for (idx, &t_next) in t_grid[1..].iter().enumerate() {
        vec_rho = expm_multiply(&sup, &vec_rho, t_next - t_now);
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (dst, src) in m.iter_mut().zip(vec_rho.iter()) {
            *dst = *src;
        }
        hermitize(&mut m);
        let drift = (m.trace().re - 1.0).abs();
        if drift > opts.trace_tol {
            return Err(SolverError::TraceDrift {
                t: t_next,
                drift,
                tol: opts.trace_tol,
            });
        }
        t_now = t_next;
        times.push(t_next);
        diagnostics.push(sample_diagnostics(&m, t_next, 0.0, idx + 1, opts));
        states.push(QuantumState::density_unchecked(space.clone(), m));
    }
    Ok(EvolutionResult {
        times,
        states,
        diagnostics,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Schrödinger propagation of pure states (unitary oracle for the closed
// forms; also the cheap path for channel-free systems)
// ---------------------------------------------------------------------------

/// Integrate dψ/dt = −iHψ with RK4 on the compiled sparse Hamiltonian,
/// renormalizing each step. Returns the state at every grid point.
pub fn evolve_pure(
    h: &Operator,
    psi0: &QuantumState,
    t_grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<QuantumState>, SolverError> {
    let defect = crate::fock::hermitian_defect(h.matrix());
    if defect > 1e-9 * (1.0 + infinity_norm(h.matrix())) {
        return Err(SolverError::NonHermitian(defect));
    }
    if psi0.space() != h.space() {
        return Err(SolverError::SpaceMismatch);
    }
    validate_grid(t_grid)?;
    let mut psi = match psi0.repr() {
        StateRepr::Pure(v) => v.clone(),
        _ => return Err(SolverError::NotPure),
    };
    let h_target = resolve_step(opts, h, &[])?;
    let csr = Csr::from_dense(h.matrix());
    let dim = psi.len();
    let mut k1 = DVector::zeros(dim);
    let mut k2 = DVector::zeros(dim);
    let mut k3 = DVector::zeros(dim);
    let mut k4 = DVector::zeros(dim);
    let mut stage = DVector::zeros(dim);
    let minus_i = Complex64::new(0.0, -1.0);

    let rhs = |v: &DVector<Complex64>, out: &mut DVector<Complex64>, tmp: &mut DVector<Complex64>| {
        csr.mul_vec(v, tmp);
        for (o, t) in out.iter_mut().zip(tmp.iter()) {
            *o = minus_i * t;
        }
    };
    let mut tmp = DVector::zeros(dim);

    let mut out = Vec::with_capacity(t_grid.len());
    out.push(psi0.clone());
    let mut t_now = 0.0;
    for &t_next in &t_grid[1..] {
        let span = t_next - t_now;
        let n_steps = if h_target.is_finite() {
            (span / h_target).ceil().max(1.0) as usize
        } else {
            1
        };
        let h_step = span / n_steps as f64;
        for _ in 0..n_steps {
            rhs(&psi, &mut k1, &mut tmp);
            stage.copy_from(&psi);
            stage.axpy(Complex64::new(h_step / 2.0, 0.0), &k1, Complex64::new(1.0, 0.0));
            rhs(&stage, &mut k2, &mut tmp);
            stage.copy_from(&psi);
            stage.axpy(Complex64::new(h_step / 2.0, 0.0), &k2, Complex64::new(1.0, 0.0));
            rhs(&stage, &mut k3, &mut tmp);
            stage.copy_from(&psi);
            stage.axpy(Complex64::new(h_step, 0.0), &k3, Complex64::new(1.0, 0.0));
            rhs(&stage, &mut k4, &mut tmp);
            let w = Complex64::new(h_step / 6.0, 0.0);
            for idx in 0..dim {
                psi[idx] += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * w;
            }
            let norm = psi.norm();
            psi /= Complex64::new(norm, 0.0);
        }
        t_now = t_next;
        out.push(
            QuantumState::pure_from_amplitudes(psi0.space().clone(), psi.clone())
                .expect("renormalized vector"),
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Steady state
// ---------------------------------------------------------------------------

/// Integrate until the trace-norm increment per unit scaled time drops below
/// `opts.steady_tol`, or error after `opts.horizon_factor` inverse rate
/// units. The rate scale is the largest channel rate.
pub fn steady_state(
    h: &Operator,
    channels: &[(Operator, f64)],
    rho0: &QuantumState,
    opts: &SolverOptions,
) -> Result<QuantumState, SolverError> {
    validate_inputs(h, channels, rho0)?;
    let rate_scale = channels
        .iter()
        .map(|(_, r)| *r)
        .fold(0.0f64, f64::max);
    if rate_scale <= 0.0 {
        return Err(SolverError::NoChannels);
    }
    let h_target = resolve_step(opts, h, channels)?;
    let horizon = opts.horizon_factor / rate_scale;
    let mut rhs = CompiledRhs::new(h, channels);
    let mut work = Rk4Work::new(rhs.dim);
    let mut rho = rho0.density_matrix();
    let space = rho0.space().clone();

    let check_span = h_target * opts.check_stride as f64;
    let mut checkpoint = rho.clone();
    let mut t = 0.0;
    let mut last_increment = f64::INFINITY;
    while t < horizon {
        rk4_steps(&mut rhs, &mut rho, check_span, h_target, &mut work);
        t += check_span;
        hermitize(&mut rho);
        let drift = (rho.trace().re - 1.0).abs();
        if drift > opts.trace_tol {
            return Err(SolverError::TraceDrift {
                t,
                drift,
                tol: opts.trace_tol,
            });
        }
        let increment = trace_norm(&(&rho - &checkpoint));
        last_increment = increment;
        if increment < opts.steady_tol * rate_scale * check_span {
            return Ok(QuantumState::density_unchecked(space, rho));
        }
        checkpoint.copy_from(&rho);
    }
    Err(SolverError::NonConvergence {
        horizon,
        increment: last_increment,
    })
}

// ---------------------------------------------------------------------------
// Stroboscopic alternation
// ---------------------------------------------------------------------------

/// Alternate evolution under (H_A, channels) and (H_B, channels) for
/// `delta_t` each, `n_cycles` times, sampling at every half-cycle boundary.
/// `effective_rate` is the engineered rate Γ whose inverse the cycle must
/// stay well below; when given and δt·Γ > 0.1 a warning diagnostic is
/// recorded.
pub fn stroboscopic_evolve(
    h_a: &Operator,
    h_b: &Operator,
    channels: &[(Operator, f64)],
    delta_t: f64,
    n_cycles: usize,
    rho0: &QuantumState,
    opts: &SolverOptions,
    effective_rate: Option<f64>,
) -> Result<EvolutionResult, SolverError> {
    if delta_t <= 0.0 {
        return Err(SolverError::BadCycle(delta_t));
    }
    validate_inputs(h_a, channels, rho0)?;
    validate_inputs(h_b, channels, rho0)?;

    let mut warnings = Vec::new();
    if let Some(rate) = effective_rate {
        if delta_t * rate > 0.1 {
            warnings.push(format!(
                "stroboscopic cycle too coarse: delta_t*Gamma = {:.3} > 0.1; \
                 the alternation may not reproduce the averaged dynamics",
                delta_t * rate
            ));
        }
    }

    let ha_step = resolve_step(opts, h_a, channels)?;
    let hb_step = resolve_step(opts, h_b, channels)?;
    let h_target = ha_step.min(hb_step);
    let mut rhs_a = CompiledRhs::new(h_a, channels);
    let mut rhs_b = CompiledRhs::new(h_b, channels);
    let mut work = Rk4Work::new(rhs_a.dim);
    let mut rho = rho0.density_matrix();
    let space = rho0.space().clone();

    let mut times = Vec::with_capacity(2 * n_cycles + 1);
    let mut states = Vec::with_capacity(2 * n_cycles + 1);
    let mut diagnostics = Vec::with_capacity(2 * n_cycles + 1);
    times.push(0.0);
    states.push(QuantumState::density_unchecked(space.clone(), rho.clone()));
    diagnostics.push(sample_diagnostics(&rho, 0.0, h_target, 0, opts));

    let mut t = 0.0;
    let mut sample_idx = 0;
    for _ in 0..n_cycles {
        for rhs in [&mut rhs_a, &mut rhs_b] {
            rk4_steps(rhs, &mut rho, delta_t, h_target, &mut work);
            hermitize(&mut rho);
            t += delta_t;
            sample_idx += 1;
            let drift = (rho.trace().re - 1.0).abs();
            if drift > opts.trace_tol {
                return Err(SolverError::TraceDrift {
                    t,
                    drift,
                    tol: opts.trace_tol,
                });
            }
            times.push(t);
            diagnostics.push(sample_diagnostics(&rho, t, h_target, sample_idx, opts));
            states.push(QuantumState::density_unchecked(space.clone(), rho.clone()));
        }
    }
    Ok(EvolutionResult {
        times,
        states,
        diagnostics,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Adiabatic-elimination equivalence check
// ---------------------------------------------------------------------------

/// Result of running the full three-mode damped system against its
/// adiabatically eliminated two-cavity limit.
#[derive(Debug, Clone)]
pub struct AdiabaticReport {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
}

/// Evolve the full three-mode system (mechanical damping γ_m, no cavity
/// decay, zero-temperature bath) and the effective single-Bogoliubov-channel
/// two-cavity system from vacuum, and report the trace distance between the
/// reduced two-cavity state and the effective state at each grid point.
///
/// `dims` are the truncations [cavity 1, cavity 2, mechanics] for the full
/// run; the effective run reuses the cavity dims. Requires γ_m ≥ 10·max(θ).
pub fn adiabatic_equivalence_check(
    theta1: f64,
    theta2: f64,
    gamma_m: f64,
    t_grid: &[f64],
    dims: [usize; 3],
) -> Result<AdiabaticReport, SolverError> {
    let theta_max = theta1.abs().max(theta2.abs());
    if gamma_m < 10.0 * theta_max {
        return Err(SolverError::RegimeViolation(gamma_m / theta_max));
    }
    validate_grid(t_grid)?;

    // Full system: scheme-A couplings (θ₁ may be zero in the decoupled
    // limit) plus mechanical damping at zero temperature.
    let full_space = FockSpace::new(
        vec![dims[0], dims[1], dims[2]],
        vec!["c1", "c2", "m"],
    )?;
    let mut full_h = Operator::zeros(&full_space);
    if theta1 > 0.0 {
        let pair = crate::fock::creation(&full_space, "c1")?
            .mul(&crate::fock::creation(&full_space, "m")?);
        full_h = full_h.add(&pair.add(&pair.dagger()).scale(Complex64::new(-theta1, 0.0)));
    }
    let pair = crate::fock::creation(&full_space, "c2")?
        .mul(&crate::fock::annihilation(&full_space, "m")?);
    full_h = full_h.add(&pair.add(&pair.dagger()).scale(Complex64::new(-theta2, 0.0)));
    let full_channels = vec![(crate::fock::annihilation(&full_space, "m")?, gamma_m)];

    // Effective system: cooling of the cavity Bogoliubov mode
    // (θ₂/Θ)a₂ + (θ₁/Θ)a₁† at Γ_c = 4Θ²/γ_m.
    let cav_space = FockSpace::new(vec![dims[0], dims[1]], vec!["c1", "c2"])?;
    let big_sq = theta2 * theta2 - theta1 * theta1;
    let big = big_sq.sqrt();
    let gamma_c = 4.0 * big_sq / gamma_m;
    let d_op = crate::fock::annihilation(&cav_space, "c2")?
        .scale(Complex64::new(theta2 / big, 0.0))
        .add(
            &crate::fock::creation(&cav_space, "c1")?
                .scale(Complex64::new(theta1 / big, 0.0)),
        );
    let eff_channels = vec![(d_op, gamma_c)];
    let eff_h = Operator::zeros(&cav_space);

    // Step: accuracy from the slow coupling scale, stability from the
    // mechanical decay ladder.
    let stiff = gamma_m * (dims[2] as f64 - 1.0);
    let step = (0.02 / theta_max.max(1e-12)).min(0.8 / stiff);
    let opts = SolverOptions {
        step: StepSize::Fixed(step),
        eig_stride: 0,
        ..SolverOptions::default()
    };
    let eff_opts = SolverOptions {
        eig_stride: 0,
        ..SolverOptions::default()
    };

    let full = evolve(
        &full_h,
        &full_channels,
        &crate::fock::vacuum(&full_space),
        t_grid,
        &opts,
    )?;
    let eff = evolve(
        &eff_h,
        &eff_channels,
        &crate::fock::vacuum(&cav_space),
        t_grid,
        &eff_opts,
    )?;

    let mut distances = Vec::with_capacity(t_grid.len());
    for (full_state, eff_state) in full.states.iter().zip(&eff.states) {
        let reduced = full_state.partial_trace_keep(&[0, 1]);
        distances.push(trace_distance(&reduced, eff_state)?);
    }
    let max_distance = distances.iter().cloned().fold(0.0, f64::max);
    Ok(AdiabaticReport {
        times: t_grid.to_vec(),
        distances,
        max_distance,
    })
}
