//! SI-unit calculator mapping physical circuit/mechanical parameters to
//! coupling strengths, thermal occupations, and regime-validity reports.
//!
//! Everything here is in SI; angular frequencies are rad/s. The dynamical
//! engines are dimensionless (ħ = 1) — this module owns the conversion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("temperature must be non-negative, got {0}")]
    NegativeTemperature(f64),
    #[error("cavity index must be 1 or 2, got {0}")]
    BadCavityIndex(usize),
}

/// Physical circuit/mechanical parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Equilibrium coupling capacitance, farads.
    pub c0: f64,
    /// Equilibrium gap between the membrane and the base electrode, meters.
    pub d: f64,
    /// Mechanical-resonator effective mass, kilograms.
    pub m: f64,
    /// Mechanical angular frequency, rad/s.
    pub omega_m: f64,
    /// Cavity angular frequencies, rad/s.
    pub omega_c: [f64; 2],
    /// Cavity total capacitances, farads.
    pub c_cavity: [f64; 2],
    /// Drive voltage amplitudes per tone, volts.
    pub vx: [f64; 2],
    /// Mechanical and cavity quality factors.
    pub q_m: f64,
    pub q_c: f64,
    /// Bath temperature, kelvin.
    pub temperature: f64,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), DeviceError> {
        let checks: [(&'static str, f64); 11] = [
            ("c0", self.c0),
            ("d", self.d),
            ("m", self.m),
            ("omega_m", self.omega_m),
            ("omega_c1", self.omega_c[0]),
            ("omega_c2", self.omega_c[1]),
            ("c_cavity1", self.c_cavity[0]),
            ("c_cavity2", self.c_cavity[1]),
            ("vx1", self.vx[0]),
            ("q_m", self.q_m),
            ("q_c", self.q_c),
        ];
        for (name, value) in checks {
            if !(value > 0.0) {
                return Err(DeviceError::NonPositive { name, value });
            }
        }
        if self.temperature < 0.0 {
            return Err(DeviceError::NegativeTemperature(self.temperature));
        }
        Ok(())
    }

    /// Mechanical damping rate ω_m/Q_m, rad/s.
    pub fn gamma_m(&self) -> f64 {
        self.omega_m / self.q_m
    }

    /// Cavity decay rate ω_j/Q_c, rad/s.
    pub fn kappa(&self, j: usize) -> Result<f64, DeviceError> {
        let idx = cavity_index(j)?;
        Ok(self.omega_c[idx] / self.q_c)
    }
}

fn cavity_index(j: usize) -> Result<usize, DeviceError> {
    match j {
        1 | 2 => Ok(j - 1),
        _ => Err(DeviceError::BadCavityIndex(j)),
    }
}

/// Instantaneous electromechanical coupling
/// g_j = (C₀/d)·√(ω_j/(2 m ω_m C_j))·V_x, rad/s.
pub fn coupling_g(params: &DeviceParams, j: usize, vx_instant: f64) -> Result<f64, DeviceError> {
    params.validate()?;
    if !(vx_instant > 0.0) {
        return Err(DeviceError::NonPositive {
            name: "vx_instant",
            value: vx_instant,
        });
    }
    let idx = cavity_index(j)?;
    let ratio = params.omega_c[idx] / (2.0 * params.m * params.omega_m * params.c_cavity[idx]);
    Ok(params.c0 / params.d * ratio.sqrt() * vx_instant)
}

/// Sideband coupling Θ_j = (C₀/2d)·√(ω_j/(2 m ω_m C_j))·V_x^j, rad/s: the
/// drive amplitude of tone j with the bichromatic factor ½.
pub fn effective_theta(params: &DeviceParams, j: usize) -> Result<f64, DeviceError> {
    let idx = cavity_index(j)?;
    Ok(coupling_g(params, j, params.vx[idx])? / 2.0)
}

/// Bose–Einstein occupation n̄ = 1/(e^{ħω/k_BT} − 1); returns 0 at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    1.0 / (x.exp() - 1.0)
}

/// One "much greater than" clause of a regime report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    /// Actual ratio large/small; pass when ≥ the configured threshold.
    pub ratio: f64,
    pub pass: bool,
}

/// Regime validity of the two schemes, with the raw margins so users can
/// judge marginal cases themselves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeReport {
    pub scheme_a_ok: bool,
    pub scheme_b_ok: bool,
    pub margins: Vec<Margin>,
    pub threshold: f64,
}

/// Evaluate the regime inequalities with "≫" operationalized as a ratio of
/// at least `threshold` (10 is the conventional choice).
///
/// Scheme A (coherent): {Θ₁, Θ₂} ≫ {κ, n_th·γ_m, γ_m}.
/// Scheme B (dissipative): γ_m ≫ Θ ≫ √(γ_m·κ)/2 and Θ ≫ κ, n_th·γ_m,
/// with Θ = √(Θ₂² − Θ₁²).
pub fn regime_check(
    theta1: f64,
    theta2: f64,
    gamma_m: f64,
    kappa: f64,
    n_th: f64,
    threshold: f64,
) -> RegimeReport {
    let ratio_of = |num: f64, den: f64| -> f64 {
        if den <= 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    };
    let theta_min = theta1.min(theta2);
    let mut margins = Vec::new();
    let mut push = |name: &str, ratio: f64| -> bool {
        let pass = ratio >= threshold;
        margins.push(Margin {
            name: name.to_string(),
            ratio,
            pass,
        });
        pass
    };

    let a1 = push("theta_min/kappa", ratio_of(theta_min, kappa));
    let a2 = push("theta_min/(n_th*gamma_m)", ratio_of(theta_min, n_th * gamma_m));
    let a3 = push("theta_min/gamma_m", ratio_of(theta_min, gamma_m));
    let scheme_a_ok = a1 && a2 && a3;

    let big_theta_sq = theta2 * theta2 - theta1 * theta1;
    let big_theta = if big_theta_sq > 0.0 {
        big_theta_sq.sqrt()
    } else {
        0.0
    };
    let b0 = big_theta > 0.0;
    let b1 = push("gamma_m/Theta", ratio_of(gamma_m, big_theta));
    let b2 = push(
        "Theta/(sqrt(gamma_m*kappa)/2)",
        ratio_of(big_theta, (gamma_m * kappa).sqrt() / 2.0),
    );
    let b3 = push("Theta/kappa", ratio_of(big_theta, kappa));
    let b4 = push("Theta/(n_th*gamma_m)", ratio_of(big_theta, n_th * gamma_m));
    let scheme_b_ok = b0 && b1 && b2 && b3 && b4;

    RegimeReport {
        scheme_a_ok,
        scheme_b_ok,
        margins,
        threshold,
    }
}
