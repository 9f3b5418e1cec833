//! Declarative system specifications: quadratic photon-phonon couplings plus
//! linear Lindblad channels, and their compilation into concrete Fock
//! operators.
//!
//! Sign convention: every coupling contributes the Hamiltonian term
//! −ħ·strength·(pair + h.c.), and every channel is stored with the rate γ of
//! the dissipator (γ/2)(2LρL† − L†Lρ − ρL†L). Collective channels keep their
//! raw cosh/sinh coefficient vectors (norm > 1) with the rate applied as
//! given; no renormalization is performed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{annihilation, creation, FockError, FockSpace, Operator};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("coupling strength must be positive, got {0}")]
    NonPositiveStrength(f64),
    #[error("coupling strength must be finite")]
    NonFiniteStrength,
    #[error("rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("coupling must join two distinct modes, got '{0}' twice")]
    SelfCoupling(String),
    #[error("label '{0}' does not resolve to a declared mode")]
    UnresolvedLabel(String),
    #[error("requires theta2 > theta1 > 0, got theta1={theta1}, theta2={theta2}")]
    OutsideEllipticRegime { theta1: f64, theta2: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeRole {
    Cavity,
    Mechanical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingKind {
    /// a_i† a_j + h.c. — exchange of excitation quanta.
    BeamSplitter,
    /// a_i† a_j† + h.c. — simultaneous creation or annihilation of a pair.
    TwoModeSqueeze,
}

/// One quadratic Hamiltonian term, −ħ·strength·(e^{iφ}·pair + h.c.).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoupling {
    pub mode_i: String,
    pub mode_j: String,
    pub kind: CouplingKind,
    /// Angular frequency units.
    pub strength: f64,
    /// Drive phase folded onto the pair term; every built-in system leaves
    /// this at zero.
    pub phase: f64,
}

impl QuadraticCoupling {
    pub fn new(
        mode_i: impl Into<String>,
        mode_j: impl Into<String>,
        kind: CouplingKind,
        strength: f64,
    ) -> Result<Self, ModelError> {
        let mode_i = mode_i.into();
        let mode_j = mode_j.into();
        if !strength.is_finite() {
            return Err(ModelError::NonFiniteStrength);
        }
        if mode_i == mode_j {
            return Err(ModelError::SelfCoupling(mode_i));
        }
        Ok(QuadraticCoupling {
            mode_i,
            mode_j,
            kind,
            strength,
            phase: 0.0,
        })
    }
}

/// One linear Lindblad channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LindbladChannel {
    /// Local thermal damping of one mode: a 2bρb†-type dissipator at
    /// `down_rate` (γ(n_th+1) for mechanics, κ for cavities) plus a
    /// 2b†ρb-type dissipator at `up_rate` (γ·n_th).
    Damping {
        mode: String,
        down_rate: f64,
        up_rate: f64,
    },
    /// A delocalized lowering operator L = Σ (lower·a + raise·a†) over the
    /// listed modes, with a single rate. Coefficients are stored raw.
    Collective {
        terms: Vec<CollectiveTerm>,
        rate: f64,
    },
}

/// Per-mode coefficients of a collective channel operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveTerm {
    pub mode: String,
    /// Coefficient on the annihilation operator of `mode`.
    pub lower: f64,
    /// Coefficient on the creation operator of `mode`.
    pub raise: f64,
}

/// A complete open-system description: ordered modes with role tags,
/// quadratic couplings, and Lindblad channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub modes: Vec<(String, ModeRole)>,
    pub couplings: Vec<QuadraticCoupling>,
    pub channels: Vec<LindbladChannel>,
}

impl SystemSpec {
    pub fn mode_labels(&self) -> Vec<&str> {
        self.modes.iter().map(|(l, _)| l.as_str()).collect()
    }

    fn has_mode(&self, label: &str) -> bool {
        self.modes.iter().any(|(l, _)| l == label)
    }

    /// Check that every coupling and channel label resolves to a declared
    /// mode.
    pub fn validate(&self) -> Result<(), ModelError> {
        for c in &self.couplings {
            for label in [&c.mode_i, &c.mode_j] {
                if !self.has_mode(label) {
                    return Err(ModelError::UnresolvedLabel(label.clone()));
                }
            }
        }
        for ch in &self.channels {
            match ch {
                LindbladChannel::Damping { mode, .. } => {
                    if !self.has_mode(mode) {
                        return Err(ModelError::UnresolvedLabel(mode.clone()));
                    }
                }
                LindbladChannel::Collective { terms, .. } => {
                    for t in terms {
                        if !self.has_mode(&t.mode) {
                            return Err(ModelError::UnresolvedLabel(t.mode.clone()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Coherent scheme A: a two-mode-squeeze coupling of cavity 1 to the
/// mechanical mode and a beam-splitter coupling of cavity 2 to it.
pub fn scheme_a(theta1: f64, theta2: f64) -> Result<SystemSpec, ModelError> {
    require_positive(theta1)?;
    require_positive(theta2)?;
    Ok(SystemSpec {
        modes: vec![
            ("c1".to_string(), ModeRole::Cavity),
            ("c2".to_string(), ModeRole::Cavity),
            ("m".to_string(), ModeRole::Mechanical),
        ],
        couplings: vec![
            QuadraticCoupling::new("c1", "m", CouplingKind::TwoModeSqueeze, theta1)?,
            QuadraticCoupling::new("c2", "m", CouplingKind::BeamSplitter, theta2)?,
        ],
        channels: vec![],
    })
}

/// Mirror of scheme A with the coupling roles swapped: beam-splitter on
/// cavity 1, two-mode squeeze on cavity 2.
pub fn scheme_a_prime(theta1: f64, theta2: f64) -> Result<SystemSpec, ModelError> {
    require_positive(theta1)?;
    require_positive(theta2)?;
    Ok(SystemSpec {
        modes: vec![
            ("c1".to_string(), ModeRole::Cavity),
            ("c2".to_string(), ModeRole::Cavity),
            ("m".to_string(), ModeRole::Mechanical),
        ],
        couplings: vec![
            QuadraticCoupling::new("c1", "m", CouplingKind::BeamSplitter, theta1)?,
            QuadraticCoupling::new("c2", "m", CouplingKind::TwoModeSqueeze, theta2)?,
        ],
        channels: vec![],
    })
}

/// Append the standard baths: cavity decay (down=κ_j, up=0) on every cavity
/// mode, in declaration order, and thermal damping (down=γ_m(n_th+1),
/// up=γ_m·n_th) on every mechanical mode.
pub fn with_dissipation(
    spec: &SystemSpec,
    kappa1: f64,
    kappa2: f64,
    gamma_m: f64,
    n_th: f64,
) -> Result<SystemSpec, ModelError> {
    for r in [kappa1, kappa2, gamma_m, n_th] {
        if r < 0.0 {
            return Err(ModelError::NegativeRate(r));
        }
    }
    let mut out = spec.clone();
    let kappas = [kappa1, kappa2];
    let mut cavity_idx = 0;
    for (label, role) in &spec.modes {
        match role {
            ModeRole::Cavity => {
                let kappa = kappas[cavity_idx.min(1)];
                cavity_idx += 1;
                out.channels.push(LindbladChannel::Damping {
                    mode: label.clone(),
                    down_rate: kappa,
                    up_rate: 0.0,
                });
            }
            ModeRole::Mechanical => {
                out.channels.push(LindbladChannel::Damping {
                    mode: label.clone(),
                    down_rate: gamma_m * (n_th + 1.0),
                    up_rate: gamma_m * n_th,
                });
            }
        }
    }
    Ok(out)
}

/// Engineered cooling rate 4Θ²/γ_m with Θ = √(θ₂² − θ₁²).
pub fn cooling_rate(theta1: f64, theta2: f64, gamma_m: f64) -> Result<f64, ModelError> {
    if !(theta2 > theta1 && theta1 > 0.0) {
        return Err(ModelError::OutsideEllipticRegime { theta1, theta2 });
    }
    require_positive(gamma_m)?;
    let big_theta_sq = theta2 * theta2 - theta1 * theta1;
    Ok(4.0 * big_theta_sq / gamma_m)
}

/// Effective two-cavity system after adiabatic elimination of the damped
/// mechanical mode: no Hamiltonian, only collective Bogoliubov cooling
/// channels at rate Γ_c = 4Θ²/γ_m. The primary channel lowers
/// (Θ₂/Θ)a₂ + (Θ₁/Θ)a₁†; with `include_dtilde` the partner
/// (Θ₂/Θ)a₁ + (Θ₁/Θ)a₂† is added at the same rate.
pub fn effective_cooling(
    theta1: f64,
    theta2: f64,
    gamma_m: f64,
    include_dtilde: bool,
) -> Result<SystemSpec, ModelError> {
    let rate = cooling_rate(theta1, theta2, gamma_m)?;
    let big_theta = (theta2 * theta2 - theta1 * theta1).sqrt();
    let ch = theta2 / big_theta;
    let sh = theta1 / big_theta;
    let mut channels = vec![LindbladChannel::Collective {
        terms: vec![
            CollectiveTerm {
                mode: "c2".to_string(),
                lower: ch,
                raise: 0.0,
            },
            CollectiveTerm {
                mode: "c1".to_string(),
                lower: 0.0,
                raise: sh,
            },
        ],
        rate,
    }];
    if include_dtilde {
        channels.push(LindbladChannel::Collective {
            terms: vec![
                CollectiveTerm {
                    mode: "c1".to_string(),
                    lower: ch,
                    raise: 0.0,
                },
                CollectiveTerm {
                    mode: "c2".to_string(),
                    lower: 0.0,
                    raise: sh,
                },
            ],
            rate,
        });
    }
    Ok(SystemSpec {
        modes: vec![
            ("c1".to_string(), ModeRole::Cavity),
            ("c2".to_string(), ModeRole::Cavity),
        ],
        couplings: vec![],
        channels,
    })
}

/// Two-resonator realization: both cavity Bogoliubov modes are cooled
/// simultaneously, one through each damped mechanical mode. The second
/// resonator carries the strengths in swapped roles (beam splitter at θ₂ on
/// cavity 1, two-mode squeeze at θ₁ on cavity 2) so that eliminating it
/// yields the partner Bogoliubov lowering operator (θ₂a₁ + θ₁a₂†)/Θ; with
/// the roles assigned the other way the eliminated operator is a raising
/// operator and the drift keeps an undamped subspace.
#[allow(clippy::too_many_arguments)]
pub fn two_mr_system(
    theta1: f64,
    theta2: f64,
    gamma_m1: f64,
    gamma_m2: f64,
    n_th: f64,
    kappa1: f64,
    kappa2: f64,
) -> Result<SystemSpec, ModelError> {
    if !(theta2 > theta1 && theta1 > 0.0) {
        return Err(ModelError::OutsideEllipticRegime { theta1, theta2 });
    }
    for r in [gamma_m1, gamma_m2, n_th, kappa1, kappa2] {
        if r < 0.0 {
            return Err(ModelError::NegativeRate(r));
        }
    }
    let mut channels = vec![
        LindbladChannel::Damping {
            mode: "c1".to_string(),
            down_rate: kappa1,
            up_rate: 0.0,
        },
        LindbladChannel::Damping {
            mode: "c2".to_string(),
            down_rate: kappa2,
            up_rate: 0.0,
        },
    ];
    for (label, gamma) in [("m1", gamma_m1), ("m2", gamma_m2)] {
        channels.push(LindbladChannel::Damping {
            mode: label.to_string(),
            down_rate: gamma * (n_th + 1.0),
            up_rate: gamma * n_th,
        });
    }
    Ok(SystemSpec {
        modes: vec![
            ("c1".to_string(), ModeRole::Cavity),
            ("c2".to_string(), ModeRole::Cavity),
            ("m1".to_string(), ModeRole::Mechanical),
            ("m2".to_string(), ModeRole::Mechanical),
        ],
        couplings: vec![
            QuadraticCoupling::new("c1", "m1", CouplingKind::TwoModeSqueeze, theta1)?,
            QuadraticCoupling::new("c2", "m1", CouplingKind::BeamSplitter, theta2)?,
            QuadraticCoupling::new("c1", "m2", CouplingKind::BeamSplitter, theta2)?,
            QuadraticCoupling::new("c2", "m2", CouplingKind::TwoModeSqueeze, theta1)?,
        ],
        channels,
    })
}

/// A compiled system: the Hamiltonian and the (operator, rate) channel list
/// in the (γ/2)(2LρL† − …) convention.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    pub hamiltonian: Operator,
    pub channels: Vec<(Operator, f64)>,
}

/// Compile a spec onto a concrete space. The space may declare extra modes;
/// every spec mode must resolve to a space label.
pub fn compile(spec: &SystemSpec, space: &FockSpace) -> Result<CompiledSystem, ModelError> {
    spec.validate()?;
    for (label, _) in &spec.modes {
        if !space.labels().iter().any(|l| l == label) {
            return Err(ModelError::UnresolvedLabel(label.clone()));
        }
    }
    let mut h = Operator::zeros(space);
    for c in &spec.couplings {
        let pair = match c.kind {
            CouplingKind::BeamSplitter => {
                creation(space, &c.mode_i)?.mul(&annihilation(space, &c.mode_j)?)
            }
            CouplingKind::TwoModeSqueeze => {
                creation(space, &c.mode_i)?.mul(&creation(space, &c.mode_j)?)
            }
        };
        let phased = pair.scale(Complex64::from_polar(1.0, c.phase));
        let term = phased.add(&phased.dagger()).scale(Complex64::new(-c.strength, 0.0));
        h = h.add(&term);
    }
    let mut channels = Vec::new();
    for ch in &spec.channels {
        match ch {
            LindbladChannel::Damping {
                mode,
                down_rate,
                up_rate,
            } => {
                if *down_rate < 0.0 {
                    return Err(ModelError::NegativeRate(*down_rate));
                }
                if *up_rate < 0.0 {
                    return Err(ModelError::NegativeRate(*up_rate));
                }
                if *down_rate > 0.0 {
                    channels.push((annihilation(space, mode)?, *down_rate));
                }
                if *up_rate > 0.0 {
                    channels.push((creation(space, mode)?, *up_rate));
                }
            }
            LindbladChannel::Collective { terms, rate } => {
                if *rate < 0.0 {
                    return Err(ModelError::NegativeRate(*rate));
                }
                let mut op = Operator::zeros(space);
                for t in terms {
                    if t.lower != 0.0 {
                        op = op.add(
                            &annihilation(space, &t.mode)?.scale(Complex64::new(t.lower, 0.0)),
                        );
                    }
                    if t.raise != 0.0 {
                        op = op
                            .add(&creation(space, &t.mode)?.scale(Complex64::new(t.raise, 0.0)));
                    }
                }
                if *rate > 0.0 {
                    channels.push((op, *rate));
                }
            }
        }
    }
    Ok(CompiledSystem {
        hamiltonian: h,
        channels,
    })
}

fn require_positive(x: f64) -> Result<(), ModelError> {
    if !x.is_finite() {
        return Err(ModelError::NonFiniteStrength);
    }
    if x <= 0.0 {
        return Err(ModelError::NonPositiveStrength(x));
    }
    Ok(())
}
