//! Truncated Fock-space operator algebra: mode operators, tensor products,
//! canonical states, expectations.
//!
//! Basis ordering is row-major over the mode list: the last-listed mode
//! varies fastest. With dims `[d1, d2]`, basis index `k` corresponds to
//! occupations `(k / d2, k % d2)`. This ordering is fixed so serialized
//! states are portable.
//!
//! Matrices are dense throughout; the target instances (≤ 4 modes, modest
//! per-mode truncations) fit comfortably and density-matrix
//! right-multiplication defeats naive sparse storage wins.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on the probability mass allowed past a mode's truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;

const MAX_MODES: usize = 4;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("mode list must be non-empty")]
    NoModes,
    #[error("at most {MAX_MODES} modes are supported, got {0}")]
    TooManyModes(usize),
    #[error("mode '{label}' has dimension {dim}, need at least 2")]
    DimensionTooSmall { label: String, dim: usize },
    #[error("duplicate mode label '{0}'")]
    DuplicateLabel(String),
    #[error("expected {expected} labels for {expected} modes, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("unknown mode label '{0}'")]
    UnknownLabel(String),
    #[error("negative occupation {value} for mode '{label}'")]
    NegativeOccupation { label: String, value: f64 },
    #[error(
        "truncation too small for mode '{label}': tail mass {tail:.3e} exceeds tolerance {tol:.3e}"
    )]
    TruncationTooSmall { label: String, tail: f64, tol: f64 },
    #[error("operator and state live on different spaces")]
    SpaceMismatch,
    #[error("expected a space with exactly {expected} modes, got {got}")]
    ModeCountMismatch { expected: usize, got: usize },
    #[error("state vector has length {got}, space dimension is {expected}")]
    BadVectorLength { expected: usize, got: usize },
    #[error("matrix is {rows}x{cols}, space dimension is {expected}")]
    BadMatrixShape { expected: usize, rows: usize, cols: usize },
    #[error("state vector norm {0:.3e} is too far from 1")]
    NotNormalized(f64),
    #[error("density matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix trace {0:.6} is too far from 1")]
    BadTrace(f64),
    #[error("density matrix has eigenvalue {0:.3e} below tolerance")]
    NotPositive(f64),
    #[error("squeeze parameter must be non-negative, got {0}")]
    NegativeSqueeze(f64),
    #[error("serialization error: {0}")]
    Serde(String),
}

/// Sign of the |n,n⟩ coefficient of a two-mode squeezed vacuum: the state has
/// amplitudes (sign·tanh ζ)ⁿ/cosh ζ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqueezeSign {
    Plus,
    Minus,
}

impl SqueezeSign {
    pub fn as_f64(self) -> f64 {
        match self {
            SqueezeSign::Plus => 1.0,
            SqueezeSign::Minus => -1.0,
        }
    }
}

/// A truncated multimode bosonic Hilbert space: per-mode truncation
/// dimensions and unique mode labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl FockSpace {
    /// Build a space descriptor. Every dimension must be ≥ 2 and the labels
    /// unique, one per mode.
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self, FockError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.is_empty() {
            return Err(FockError::NoModes);
        }
        if dims.len() > MAX_MODES {
            return Err(FockError::TooManyModes(dims.len()));
        }
        if labels.len() != dims.len() {
            return Err(FockError::LabelCountMismatch {
                expected: dims.len(),
                got: labels.len(),
            });
        }
        for (dim, label) in dims.iter().zip(&labels) {
            if *dim < 2 {
                return Err(FockError::DimensionTooSmall {
                    label: label.clone(),
                    dim: *dim,
                });
            }
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(FockError::DuplicateLabel(label.clone()));
            }
        }
        Ok(FockSpace { dims, labels })
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn mode_index(&self, label: &str) -> Result<usize, FockError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| FockError::UnknownLabel(label.to_string()))
    }

    /// Stride of a mode in the flattened basis index (last mode has stride 1).
    pub fn stride(&self, mode: usize) -> usize {
        self.dims[mode + 1..].iter().product()
    }

    /// Flattened basis index of an occupation tuple.
    pub fn basis_index(&self, occupations: &[usize]) -> usize {
        debug_assert_eq!(occupations.len(), self.dims.len());
        occupations
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&n, &d)| acc * d + n)
    }

    /// Occupation of `mode` encoded in flattened basis index `index`.
    pub fn occupation_at(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.dims[mode]
    }
}

/// A dense operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn from_matrix(space: FockSpace, matrix: DMatrix<Complex64>) -> Result<Self, FockError> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(FockError::BadMatrixShape {
                expected: n,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Operator { space, matrix })
    }

    pub fn zeros(space: &FockSpace) -> Self {
        let n = space.total_dim();
        Operator {
            space: space.clone(),
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        let n = space.total_dim();
        Operator {
            space: space.clone(),
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * c,
        }
    }

    /// Operator product. Panics if the spaces differ; compose only operators
    /// built on the same space.
    pub fn mul(&self, other: &Operator) -> Operator {
        assert_eq!(self.space, other.space, "operator space mismatch");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        assert_eq!(self.space, other.space, "operator space mismatch");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        assert_eq!(self.space, other.space, "operator space mismatch");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermitian_defect(&self.matrix) <= tol
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }

    /// Frobenius norm of the matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Max absolute deviation of a matrix from its own adjoint.
pub(crate) fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Lowering operator of the labelled mode, embedded in the full space by
/// tensor products with identities: matrix elements √n on the subdiagonal of
/// the mode factor.
pub fn annihilation(space: &FockSpace, label: &str) -> Result<Operator, FockError> {
    let mode = space.mode_index(label)?;
    let n = space.total_dim();
    let stride = space.stride(mode);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let occ = space.occupation_at(col, mode);
        if occ >= 1 {
            m[(col - stride, col)] = Complex64::new((occ as f64).sqrt(), 0.0);
        }
    }
    Ok(Operator {
        space: space.clone(),
        matrix: m,
    })
}

/// Raising operator of the labelled mode.
pub fn creation(space: &FockSpace, label: &str) -> Result<Operator, FockError> {
    Ok(annihilation(space, label)?.dagger())
}

/// Number operator a†a of the labelled mode (diagonal).
pub fn number(space: &FockSpace, label: &str) -> Result<Operator, FockError> {
    let mode = space.mode_index(label)?;
    let n = space.total_dim();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = Complex64::new(space.occupation_at(k, mode) as f64, 0.0);
    }
    Ok(Operator {
        space: space.clone(),
        matrix: m,
    })
}

/// Matrix-free application of the lowering operator of mode index `mode` to
/// a state vector: O(total_dim), no dense matrix.
pub fn apply_lowering(
    space: &FockSpace,
    mode: usize,
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let stride = space.stride(mode);
    let mut out = DVector::<Complex64>::zeros(v.len());
    for j in 0..v.len() {
        let n = space.occupation_at(j, mode);
        if n >= 1 {
            out[j - stride] += Complex64::new((n as f64).sqrt(), 0.0) * v[j];
        }
    }
    out
}

/// Matrix-free application of the raising operator of mode index `mode`.
pub fn apply_raising(
    space: &FockSpace,
    mode: usize,
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let stride = space.stride(mode);
    let dim = space.dims()[mode];
    let mut out = DVector::<Complex64>::zeros(v.len());
    for j in 0..v.len() {
        let n = space.occupation_at(j, mode);
        if n + 1 < dim {
            out[j + stride] += Complex64::new(((n + 1) as f64).sqrt(), 0.0) * v[j];
        }
    }
    out
}

/// Quadrature X = (a + a†)/√2 of the labelled mode.
pub fn quadrature_x(space: &FockSpace, label: &str) -> Result<Operator, FockError> {
    let a = annihilation(space, label)?;
    let ad = a.dagger();
    Ok(a.add(&ad).scale(Complex64::new(1.0 / 2.0f64.sqrt(), 0.0)))
}

/// Quadrature P = −i(a − a†)/√2 of the labelled mode.
pub fn quadrature_p(space: &FockSpace, label: &str) -> Result<Operator, FockError> {
    let a = annihilation(space, label)?;
    let ad = a.dagger();
    Ok(a.sub(&ad).scale(Complex64::new(0.0, -1.0 / 2.0f64.sqrt())))
}

/// A pure or mixed state on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: FockSpace,
    repr: StateRepr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(DVector<Complex64>),
    Density(DMatrix<Complex64>),
}

impl QuantumState {
    /// Pure state from amplitudes. The vector is validated to be normalized
    /// within 1e-9, then renormalized exactly.
    pub fn pure_from_amplitudes(
        space: FockSpace,
        amplitudes: DVector<Complex64>,
    ) -> Result<Self, FockError> {
        if amplitudes.len() != space.total_dim() {
            return Err(FockError::BadVectorLength {
                expected: space.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(FockError::NotNormalized(norm));
        }
        Ok(QuantumState {
            space,
            repr: StateRepr::Pure(amplitudes / Complex64::new(norm, 0.0)),
        })
    }

    /// Density matrix, validated Hermitian within 1e-9, trace 1 within 1e-9,
    /// smallest eigenvalue ≥ −1e-8.
    pub fn density_from_matrix(
        space: FockSpace,
        matrix: DMatrix<Complex64>,
    ) -> Result<Self, FockError> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(FockError::BadMatrixShape {
                expected: n,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let defect = hermitian_defect(&matrix);
        if defect > 1e-9 {
            return Err(FockError::NotHermitian(defect));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > 1e-9 {
            return Err(FockError::BadTrace(trace));
        }
        let min_eig = min_hermitian_eigenvalue(&matrix);
        if min_eig < -1e-8 {
            return Err(FockError::NotPositive(min_eig));
        }
        let herm = (matrix.adjoint() + &matrix) * Complex64::new(0.5 / trace, 0.0);
        Ok(QuantumState {
            space,
            repr: StateRepr::Density(herm),
        })
    }

    /// Internal constructor for integrator output; skips the O(d³)
    /// positivity validation (drift is tracked separately as a diagnostic).
    pub(crate) fn density_unchecked(space: FockSpace, matrix: DMatrix<Complex64>) -> Self {
        QuantumState {
            space,
            repr: StateRepr::Density(matrix),
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn is_pure_repr(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    /// Density-matrix view of the state (outer product for pure states).
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Density(m) => m.clone(),
        }
    }

    /// Convert to an explicit density-matrix representation.
    pub fn to_density(&self) -> QuantumState {
        QuantumState {
            space: self.space.clone(),
            repr: StateRepr::Density(self.density_matrix()),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.norm_squared(),
            StateRepr::Density(m) => m.trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(_) => 1.0,
            StateRepr::Density(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Smallest eigenvalue of the density matrix (1 for a pure state's
    /// trivial representation check is skipped; pure states return 0).
    pub fn min_eigenvalue(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(_) => 0.0,
            StateRepr::Density(m) => min_hermitian_eigenvalue(m),
        }
    }

    /// Reduced state on the given (sorted, deduplicated) mode indices,
    /// tracing out everything else. Always returns a density representation.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> QuantumState {
        let full = &self.space;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        assert!(
            keep.iter().all(|&m| m < full.n_modes()),
            "mode index out of range"
        );
        let traced: Vec<usize> = (0..full.n_modes()).filter(|m| !keep.contains(m)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&m| full.dims[m]).collect();
        let kept_labels: Vec<String> = keep.iter().map(|&m| full.labels[m].clone()).collect();
        let sub = FockSpace::new(kept_dims.clone(), kept_labels)
            .expect("reduced space inherits validity");

        let rho = self.density_matrix();
        let nk = sub.total_dim();
        let mut out = DMatrix::<Complex64>::zeros(nk, nk);

        let traced_dims: Vec<usize> = traced.iter().map(|&m| full.dims[m]).collect();
        let n_traced: usize = traced_dims.iter().product();

        // Enumerate kept-row, kept-col, traced-diagonal occupations and map
        // to flattened indices of the full space.
        let mut occ_full_row = vec![0usize; full.n_modes()];
        let mut occ_full_col = vec![0usize; full.n_modes()];
        for row_k in 0..nk {
            for (pos, &m) in keep.iter().enumerate() {
                occ_full_row[m] = sub.occupation_at(row_k, pos);
            }
            for col_k in 0..nk {
                for (pos, &m) in keep.iter().enumerate() {
                    occ_full_col[m] = sub.occupation_at(col_k, pos);
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..n_traced.max(1) {
                    let mut rem = t;
                    for (pos, &m) in traced.iter().enumerate().rev() {
                        let d = traced_dims[pos];
                        occ_full_row[m] = rem % d;
                        occ_full_col[m] = rem % d;
                        rem /= d;
                    }
                    let i = full.basis_index(&occ_full_row);
                    let j = full.basis_index(&occ_full_col);
                    acc += rho[(i, j)];
                }
                out[(row_k, col_k)] = acc;
            }
        }
        QuantumState {
            space: sub,
            repr: StateRepr::Density(out),
        }
    }
}

pub(crate) fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let herm = (m.adjoint() + m) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Pure vacuum state |0,…,0⟩.
pub fn vacuum(space: &FockSpace) -> QuantumState {
    let n = space.total_dim();
    let mut v = DVector::<Complex64>::zeros(n);
    v[0] = Complex64::new(1.0, 0.0);
    QuantumState {
        space: space.clone(),
        repr: StateRepr::Pure(v),
    }
}

/// Pure Fock basis state with the given per-mode occupations.
pub fn fock_state(space: &FockSpace, occupations: &[usize]) -> Result<QuantumState, FockError> {
    if occupations.len() != space.n_modes() {
        return Err(FockError::ModeCountMismatch {
            expected: space.n_modes(),
            got: occupations.len(),
        });
    }
    for ((n, d), label) in occupations.iter().zip(space.dims()).zip(space.labels()) {
        if n >= d {
            return Err(FockError::TruncationTooSmall {
                label: label.clone(),
                tail: 1.0,
                tol: 0.0,
            });
        }
    }
    let mut v = DVector::<Complex64>::zeros(space.total_dim());
    v[space.basis_index(occupations)] = Complex64::new(1.0, 0.0);
    Ok(QuantumState {
        space: space.clone(),
        repr: StateRepr::Pure(v),
    })
}

/// Tensor product of single-mode thermal states with mean occupations
/// `occupations`, p_n = n̄ⁿ/(1+n̄)^{n+1}, renormalized after truncation.
///
/// Errors when the truncated tail mass of any mode exceeds `tail_tol`
/// (use [`DEFAULT_TAIL_TOLERANCE`] unless a scenario pins its own).
pub fn thermal_state(
    space: &FockSpace,
    occupations: &[f64],
    tail_tol: f64,
) -> Result<QuantumState, FockError> {
    if occupations.len() != space.n_modes() {
        return Err(FockError::ModeCountMismatch {
            expected: space.n_modes(),
            got: occupations.len(),
        });
    }
    let mut per_mode: Vec<Vec<f64>> = Vec::with_capacity(space.n_modes());
    for ((&nbar, &dim), label) in occupations.iter().zip(space.dims()).zip(space.labels()) {
        if nbar < 0.0 {
            return Err(FockError::NegativeOccupation {
                label: label.clone(),
                value: nbar,
            });
        }
        let q = nbar / (1.0 + nbar);
        let tail = q.powi(dim as i32);
        if tail > tail_tol {
            return Err(FockError::TruncationTooSmall {
                label: label.clone(),
                tail,
                tol: tail_tol,
            });
        }
        let mut probs: Vec<f64> = (0..dim).map(|n| q.powi(n as i32) / (1.0 + nbar)).collect();
        let sum: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= sum);
        per_mode.push(probs);
    }
    let n = space.total_dim();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let mut p = 1.0;
        for (mode, probs) in per_mode.iter().enumerate() {
            p *= probs[space.occupation_at(k, mode)];
        }
        m[(k, k)] = Complex64::new(p, 0.0);
    }
    Ok(QuantumState {
        space: space.clone(),
        repr: StateRepr::Density(m),
    })
}

/// Two-mode squeezed vacuum Σₙ (sign·tanh ζ)ⁿ/cosh ζ |n,n⟩ on a two-mode
/// space, renormalized after truncation.
pub fn tmsv_state(
    space: &FockSpace,
    zeta: f64,
    sign: SqueezeSign,
    tail_tol: f64,
) -> Result<QuantumState, FockError> {
    if space.n_modes() != 2 {
        return Err(FockError::ModeCountMismatch {
            expected: 2,
            got: space.n_modes(),
        });
    }
    if zeta < 0.0 {
        return Err(FockError::NegativeSqueeze(zeta));
    }
    let t = zeta.tanh();
    let n_max = space.dims()[0].min(space.dims()[1]);
    let tail = t.powi(2 * n_max as i32);
    if tail > tail_tol {
        return Err(FockError::TruncationTooSmall {
            label: format!("{}/{}", space.labels()[0], space.labels()[1]),
            tail,
            tol: tail_tol,
        });
    }
    let mut v = DVector::<Complex64>::zeros(space.total_dim());
    let s = sign.as_f64();
    for n in 0..n_max {
        let amp = (s * t).powi(n as i32) / zeta.cosh();
        v[space.basis_index(&[n, n])] = Complex64::new(amp, 0.0);
    }
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    Ok(QuantumState {
        space: space.clone(),
        repr: StateRepr::Pure(v),
    })
}

/// ⟨ψ|O|ψ⟩ or Tr(ρO).
pub fn expectation(op: &Operator, state: &QuantumState) -> Result<Complex64, FockError> {
    if op.space != state.space {
        return Err(FockError::SpaceMismatch);
    }
    Ok(match &state.repr {
        StateRepr::Pure(v) => v.dotc(&(&op.matrix * v)),
        StateRepr::Density(rho) => {
            // Tr(ρ O) = Σ_ij ρ_ij O_ji
            let n = rho.nrows();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += rho[(i, j)] * op.matrix[(j, i)];
                }
            }
            acc
        }
    })
}

// ---------------------------------------------------------------------------
// JSON serialization: dims, labels, flattened complex arrays as [re, im]
// pairs, row-major.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct StatePayload {
    dims: Vec<usize>,
    labels: Vec<String>,
    kind: String,
    data: Vec<[f64; 2]>,
}

fn flatten_matrix(m: &DMatrix<Complex64>) -> Vec<[f64; 2]> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn unflatten_matrix(n: usize, data: &[[f64; 2]]) -> Option<DMatrix<Complex64>> {
    if data.len() != n * n {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| {
        let [re, im] = data[i * n + j];
        Complex64::new(re, im)
    }))
}

impl QuantumState {
    pub fn to_json(&self) -> String {
        let payload = match &self.repr {
            StateRepr::Pure(v) => StatePayload {
                dims: self.space.dims.clone(),
                labels: self.space.labels.clone(),
                kind: "pure".to_string(),
                data: v.iter().map(|z| [z.re, z.im]).collect(),
            },
            StateRepr::Density(m) => StatePayload {
                dims: self.space.dims.clone(),
                labels: self.space.labels.clone(),
                kind: "density".to_string(),
                data: flatten_matrix(m),
            },
        };
        serde_json::to_string(&payload).expect("state payload serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, FockError> {
        let payload: StatePayload =
            serde_json::from_str(json).map_err(|e| FockError::Serde(e.to_string()))?;
        let space = FockSpace::new(payload.dims, payload.labels)?;
        let n = space.total_dim();
        match payload.kind.as_str() {
            "pure" => {
                if payload.data.len() != n {
                    return Err(FockError::BadVectorLength {
                        expected: n,
                        got: payload.data.len(),
                    });
                }
                let v = DVector::from_iterator(
                    n,
                    payload.data.iter().map(|[re, im]| Complex64::new(*re, *im)),
                );
                QuantumState::pure_from_amplitudes(space, v)
            }
            "density" => {
                let m = unflatten_matrix(n, &payload.data).ok_or(FockError::BadMatrixShape {
                    expected: n,
                    rows: 0,
                    cols: 0,
                })?;
                QuantumState::density_from_matrix(space, m)
            }
            other => Err(FockError::Serde(format!("unknown state kind '{other}'"))),
        }
    }
}

impl Operator {
    pub fn to_json(&self) -> String {
        let payload = StatePayload {
            dims: self.space.dims.clone(),
            labels: self.space.labels.clone(),
            kind: "operator".to_string(),
            data: flatten_matrix(&self.matrix),
        };
        serde_json::to_string(&payload).expect("operator payload serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, FockError> {
        let payload: StatePayload =
            serde_json::from_str(json).map_err(|e| FockError::Serde(e.to_string()))?;
        if payload.kind != "operator" {
            return Err(FockError::Serde(format!(
                "expected kind 'operator', got '{}'",
                payload.kind
            )));
        }
        let space = FockSpace::new(payload.dims, payload.labels)?;
        let n = space.total_dim();
        let m = unflatten_matrix(n, &payload.data).ok_or(FockError::BadMatrixShape {
            expected: n,
            rows: 0,
            cols: 0,
        })?;
        Operator::from_matrix(space, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_space_total_dims() {
        let s = FockSpace::new(vec![2], vec!["m"]).unwrap();
        assert_eq!(s.total_dim(), 2);
        let s = FockSpace::new(vec![3, 3, 3], vec!["c1", "c2", "m"]).unwrap();
        assert_eq!(s.total_dim(), 27);
        let s = FockSpace::new(vec![10, 10, 8, 8], vec!["c1", "c2", "m1", "m2"]).unwrap();
        assert_eq!(s.total_dim(), 6400);
    }

    #[test]
    fn make_space_rejects_bad_input() {
        assert!(matches!(
            FockSpace::new(vec![1, 3], vec!["a", "b"]),
            Err(FockError::DimensionTooSmall { .. })
        ));
        assert!(matches!(
            FockSpace::new(vec![2, 2], vec!["a", "a"]),
            Err(FockError::DuplicateLabel(_))
        ));
        assert!(matches!(
            FockSpace::new(Vec::<usize>::new(), Vec::<String>::new()),
            Err(FockError::NoModes)
        ));
        assert!(matches!(
            FockSpace::new(vec![2; 5], vec!["a", "b", "c", "d", "e"]),
            Err(FockError::TooManyModes(5))
        ));
    }

    #[test]
    fn annihilation_single_mode() {
        let s = FockSpace::new(vec![2], vec!["m"]).unwrap();
        let a = annihilation(&s, "m").unwrap();
        assert_eq!(a.matrix()[(0, 1)], c(1.0, 0.0));
        assert_eq!(a.matrix()[(0, 0)], c(0.0, 0.0));
        assert_eq!(a.matrix()[(1, 0)], c(0.0, 0.0));
        assert_eq!(a.matrix()[(1, 1)], c(0.0, 0.0));

        let s3 = FockSpace::new(vec![3], vec!["m"]).unwrap();
        let a3 = annihilation(&s3, "m").unwrap();
        assert_relative_eq!(a3.matrix()[(0, 1)].re, 1.0);
        assert_relative_eq!(a3.matrix()[(1, 2)].re, 2.0f64.sqrt());
        assert_eq!(
            a3.matrix().iter().filter(|z| z.norm() > 0.0).count(),
            2
        );
    }

    #[test]
    fn annihilation_embedding_order() {
        // space [2,2], mode "c2": a = I₂ ⊗ [[0,1],[0,0]]
        let s = FockSpace::new(vec![2, 2], vec!["c1", "c2"]).unwrap();
        let a = annihilation(&s, "c2").unwrap();
        let mut expected = DMatrix::<Complex64>::zeros(4, 4);
        expected[(0, 1)] = c(1.0, 0.0);
        expected[(2, 3)] = c(1.0, 0.0);
        assert_eq!(a.matrix(), &expected);
        assert!(matches!(
            annihilation(&s, "nope"),
            Err(FockError::UnknownLabel(_))
        ));
    }

    #[test]
    fn commutator_truncation_identity() {
        // [a, a†] equals identity except the final diagonal entry 1 − dim,
        // to roundoff in the √n products.
        for dim in [2usize, 3, 5, 9] {
            let s = FockSpace::new(vec![dim], vec!["m"]).unwrap();
            let a = annihilation(&s, "m").unwrap();
            let ad = a.dagger();
            let comm = a.mul(&ad).sub(&ad.mul(&a));
            for i in 0..dim {
                for j in 0..dim {
                    let expected = if i != j {
                        0.0
                    } else if i == dim - 1 {
                        1.0 - dim as f64
                    } else {
                        1.0
                    };
                    assert!(
                        (comm.matrix()[(i, j)] - c(expected, 0.0)).norm() < 1e-12,
                        "entry ({i},{j}) = {}",
                        comm.matrix()[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn vacuum_states() {
        let s = FockSpace::new(vec![2], vec!["m"]).unwrap();
        let v = vacuum(&s);
        match v.repr() {
            StateRepr::Pure(vec) => {
                assert_eq!(vec[0], c(1.0, 0.0));
                assert_eq!(vec[1], c(0.0, 0.0));
            }
            _ => panic!("vacuum is pure"),
        }
        let s2 = FockSpace::new(vec![2, 2], vec!["a", "b"]).unwrap();
        let v2 = vacuum(&s2);
        let n = number(&s2, "a").unwrap();
        assert_relative_eq!(expectation(&n, &v2).unwrap().re, 0.0);
    }

    #[test]
    fn thermal_state_geometric_weights() {
        let s = FockSpace::new(vec![30], vec!["m"]).unwrap();
        let th = thermal_state(&s, &[1.0], DEFAULT_TAIL_TOLERANCE).unwrap();
        let rho = th.density_matrix();
        assert_relative_eq!(rho[(0, 0)].re, 0.5, epsilon = 1e-8);
        assert_relative_eq!(rho[(1, 1)].re, 0.25, epsilon = 1e-8);
        assert_relative_eq!(rho[(2, 2)].re, 0.125, epsilon = 1e-8);
        assert_relative_eq!(th.trace(), 1.0, epsilon = 1e-14);

        let nop = number(&s, "m").unwrap();
        assert_relative_eq!(expectation(&nop, &th).unwrap().re, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn thermal_state_zero_is_vacuum_projector() {
        let s = FockSpace::new(vec![4], vec!["m"]).unwrap();
        let th = thermal_state(&s, &[0.0], DEFAULT_TAIL_TOLERANCE).unwrap();
        let rho = th.density_matrix();
        assert_eq!(rho[(0, 0)], c(1.0, 0.0));
        for k in 1..4 {
            assert_eq!(rho[(k, k)], c(0.0, 0.0));
        }
    }

    #[test]
    fn thermal_state_truncation_error() {
        // n̄ = 10 in dim 8: tail mass (10/11)^8 ≈ 0.47
        let s = FockSpace::new(vec![8], vec!["m"]).unwrap();
        let err = thermal_state(&s, &[10.0], DEFAULT_TAIL_TOLERANCE).unwrap_err();
        match err {
            FockError::TruncationTooSmall { label, tail, .. } => {
                assert_eq!(label, "m");
                assert_relative_eq!(tail, (10.0f64 / 11.0).powi(8), epsilon = 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tmsv_amplitudes() {
        let s = FockSpace::new(vec![20, 20], vec!["c1", "c2"]).unwrap();
        let zeta = 0.5f64.atanh();
        let psi = tmsv_state(&s, zeta, SqueezeSign::Plus, DEFAULT_TAIL_TOLERANCE).unwrap();
        let v = match psi.repr() {
            StateRepr::Pure(v) => v,
            _ => panic!(),
        };
        // amplitude of |0,0⟩ = 1/cosh ζ = √3/2
        assert_relative_eq!(v[0].re, 3.0f64.sqrt() / 2.0, epsilon = 1e-9);
        // amplitude ratio |n+1,n+1⟩/|n,n⟩ = tanh ζ
        for n in 0..6 {
            let a0 = v[s.basis_index(&[n, n])].re;
            let a1 = v[s.basis_index(&[n + 1, n + 1])].re;
            assert_relative_eq!(a1 / a0, 0.5, epsilon = 1e-9);
        }
        // zeta = 0 is the two-mode vacuum
        let psi0 = tmsv_state(&s, 0.0, SqueezeSign::Plus, DEFAULT_TAIL_TOLERANCE).unwrap();
        match psi0.repr() {
            StateRepr::Pure(v) => assert_eq!(v[0], c(1.0, 0.0)),
            _ => panic!(),
        }
    }

    #[test]
    fn tmsv_pair_correlation() {
        // ⟨a₁a₂⟩ on tmsv(tanh ζ = 0.5, +) = cosh ζ sinh ζ = 2/3
        let s = FockSpace::new(vec![30, 30], vec!["c1", "c2"]).unwrap();
        let zeta = 0.5f64.atanh();
        let psi = tmsv_state(&s, zeta, SqueezeSign::Plus, DEFAULT_TAIL_TOLERANCE).unwrap();
        let a1 = annihilation(&s, "c1").unwrap();
        let a2 = annihilation(&s, "c2").unwrap();
        let a1a2 = a1.mul(&a2);
        let val = expectation(&a1a2, &psi).unwrap();
        assert_relative_eq!(val.re, 2.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(val.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tmsv_sign_flip_is_local_phase() {
        let s = FockSpace::new(vec![12, 12], vec!["c1", "c2"]).unwrap();
        let zeta = 0.7;
        let plus = tmsv_state(&s, zeta, SqueezeSign::Plus, 1e-4).unwrap();
        let minus = tmsv_state(&s, zeta, SqueezeSign::Minus, 1e-4).unwrap();
        let (vp, vm) = match (plus.repr(), minus.repr()) {
            (StateRepr::Pure(a), StateRepr::Pure(b)) => (a, b),
            _ => panic!(),
        };
        // phase rotation n₂ → (−1)^{n₂} on mode 2 maps one to the other
        for k in 0..s.total_dim() {
            let n2 = s.occupation_at(k, 1);
            let phase = if n2 % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(vp[k].re * phase, vm[k].re, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectation_space_mismatch() {
        let s1 = FockSpace::new(vec![2], vec!["m"]).unwrap();
        let s2 = FockSpace::new(vec![3], vec!["m"]).unwrap();
        let op = number(&s1, "m").unwrap();
        let st = vacuum(&s2);
        assert!(matches!(
            expectation(&op, &st),
            Err(FockError::SpaceMismatch)
        ));
    }

    #[test]
    fn expectation_hermitian_is_real() {
        let s = FockSpace::new(vec![6, 6], vec!["c1", "c2"]).unwrap();
        let psi = tmsv_state(&s, 0.4, SqueezeSign::Minus, 1e-3).unwrap();
        let x = quadrature_x(&s, "c1").unwrap();
        let p = quadrature_p(&s, "c2").unwrap();
        let h = x.mul(&p).add(&p.mul(&x));
        assert!(expectation(&h, &psi).unwrap().im.abs() < 1e-10);
    }

    #[test]
    fn thermal_eigenvalues_nonnegative_exact_trace() {
        let s = FockSpace::new(vec![8, 6], vec!["a", "b"]).unwrap();
        let th = thermal_state(&s, &[0.5, 0.2], 1e-3).unwrap();
        assert_relative_eq!(th.trace(), 1.0, epsilon = 1e-14);
        assert!(th.min_eigenvalue() >= 0.0);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let s = FockSpace::new(vec![4, 3], vec!["a", "b"]).unwrap();
        let th = thermal_state(&s, &[0.3, 0.7], 1e-1).unwrap();
        let red = th.partial_trace_keep(&[0]);
        assert_eq!(red.space().labels(), &["a".to_string()]);
        let sa = FockSpace::new(vec![4], vec!["a"]).unwrap();
        let expect = thermal_state(&sa, &[0.3], 1e-1).unwrap();
        let diff = (red.density_matrix() - expect.density_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn partial_trace_of_tmsv_is_thermal() {
        // Reduced single-mode state of a TMSV is thermal with n̄ = sinh²ζ.
        let s = FockSpace::new(vec![25, 25], vec!["c1", "c2"]).unwrap();
        let zeta = 0.6;
        let psi = tmsv_state(&s, zeta, SqueezeSign::Plus, DEFAULT_TAIL_TOLERANCE).unwrap();
        let red = psi.partial_trace_keep(&[0]);
        let nbar = zeta.sinh().powi(2);
        let rho = red.density_matrix();
        for n in 0..6 {
            let p = nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1);
            assert_relative_eq!(rho[(n, n)].re, p, epsilon = 1e-8);
        }
    }

    #[test]
    fn state_json_round_trip() {
        let s = FockSpace::new(vec![5, 5], vec!["c1", "c2"]).unwrap();
        let psi = tmsv_state(&s, 0.3, SqueezeSign::Minus, 1e-3).unwrap();
        let json = psi.to_json();
        let back = QuantumState::from_json(&json).unwrap();
        assert_eq!(back.space(), psi.space());
        match (psi.repr(), back.repr()) {
            (StateRepr::Pure(a), StateRepr::Pure(b)) => {
                assert!((a - b).norm() < 1e-12);
            }
            _ => panic!("round trip changed representation"),
        }

        let th = thermal_state(&s, &[0.2, 0.1], 1e-3).unwrap();
        let back = QuantumState::from_json(&th.to_json()).unwrap();
        let diff = (th.density_matrix() - back.density_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn operator_json_round_trip() {
        let s = FockSpace::new(vec![3, 2], vec!["a", "b"]).unwrap();
        let op = annihilation(&s, "a").unwrap();
        let back = Operator::from_json(&op.to_json()).unwrap();
        assert_eq!(op.matrix(), back.matrix());
    }
}
