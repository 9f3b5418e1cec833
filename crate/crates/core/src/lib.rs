//! Simulation engines for two-mode entanglement of microwave photons in a
//! circuit cavity-electromechanical system: two coplanar-waveguide cavity
//! modes coupled to one or two mechanical resonators through tunable
//! beam-splitter and two-mode-squeeze interactions.
//!
//! The crate provides two cross-validating dynamical engines plus exact
//! closed forms:
//!
//! - [`fock`] / [`lindblad`]: truncated Fock-space operator algebra and a
//!   density-matrix master-equation integrator (fixed-step RK4, plus a
//!   vectorized-propagator exponential path for cross-validation).
//! - [`gaussian`]: exact first/second-moment dynamics (drift/diffusion
//!   ODEs, Lyapunov steady states). All Hamiltonians here are quadratic and
//!   all baths linear, so Gaussian moments are exact and cheap.
//! - [`closedform`]: the analytic three-mode Heisenberg propagator of the
//!   coherent scheme and its squeeze-parameter algebra.
//! - [`model`]: declarative system specifications (couplings + Lindblad
//!   channels) and their compilation to concrete Fock operators.
//! - [`metrics`]: Duan total variance, fidelity with a two-mode squeezed
//!   vacuum, occupations and purity, computable from either representation.
//! - [`device`]: SI-unit calculator for circuit/mechanical parameters.
//!
//! Conventions used throughout (ħ = 1):
//!
//! - rates and coupling strengths are angular frequencies, time is inverse
//!   angular frequency;
//! - dissipators are written as (γ/2)(2LρL† − L†Lρ − ρL†L), and the stored
//!   rate is always the γ appearing there;
//! - quadratures X = (a + a†)/√2, P = −i(a − a†)/√2, ordered
//!   (X₁, P₁, …, X_N, P_N), vacuum covariance = ½·Identity;
//! - Fock basis index ordering is row-major: the last-listed mode varies
//!   fastest.

pub mod closedform;
pub mod device;
pub mod fock;
pub mod gaussian;
pub mod lindblad;
pub mod metrics;
pub mod model;

mod sparse;

pub use num_complex::Complex64;
