//! Closed-form frequency response of one, two, and three coupled damped
//! driven oscillators.
//!
//! Phasor convention: time dependence e^{-iwt} everywhere. Under this
//! convention the absorption channel of a response is +Im and the
//! dispersion channel is Re. All frequencies and damping rates are rad/s.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechError {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("response pole at omega = {omega} (total denominator vanished)")]
    Pole { omega: f64 },
}

/// Three equal masses on springs, driven harmonically on mass 1.
///
/// kappa1..3 anchor each mass to the wall; kappa12 couples mass 1 to 2,
/// kappa13 couples mass 1 to 3. Masses 2 and 3 are not coupled to each
/// other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalSystem {
    pub m: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa12: f64,
    pub kappa13: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Drive amplitude (N).
    pub f0: f64,
    /// Drive phase (rad). Fixed 0 in every scenario shipped here.
    pub phi: f64,
}

impl MechanicalSystem {
    pub fn validate(&self) -> Result<(), MechError> {
        if !(self.m > 0.0) {
            return Err(MechError::NonPositiveMass(self.m));
        }
        // kappa1 > 0 keeps oscillator 1 an oscillator; the others may be
        // slaved to it through the couplings alone.
        if !(self.kappa1 > 0.0) {
            return Err(MechError::InvalidParams("kappa1 must be > 0"));
        }
        if [self.kappa2, self.kappa3, self.kappa12, self.kappa13]
            .iter()
            .any(|k| *k < 0.0 || !k.is_finite())
        {
            return Err(MechError::InvalidParams("spring constants must be >= 0"));
        }
        if !(self.gamma1 > 0.0) {
            return Err(MechError::InvalidParams("gamma1 must be > 0"));
        }
        if self.gamma2 < 0.0 || self.gamma3 < 0.0 {
            return Err(MechError::InvalidParams("damping rates must be >= 0"));
        }
        Ok(())
    }
}

/// Modal form shared by the mechanical and circuit models: squared natural
/// frequencies, squared coupling strengths, damping rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalParams {
    pub omega1_sq: f64,
    pub omega2_sq: f64,
    pub omega3_sq: f64,
    pub omega_c_sq: f64,
    pub omega_r_sq: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl ModalParams {
    pub fn validate(&self) -> Result<(), MechError> {
        if !(self.omega1_sq > 0.0 && self.omega2_sq > 0.0 && self.omega3_sq > 0.0) {
            return Err(MechError::InvalidParams(
                "squared natural frequencies must be > 0",
            ));
        }
        if self.omega_c_sq < 0.0 || self.omega_r_sq < 0.0 {
            return Err(MechError::InvalidParams("couplings must be >= 0"));
        }
        if !(self.gamma1 > 0.0) {
            return Err(MechError::InvalidParams("gamma1 must be > 0"));
        }
        if self.gamma2 < 0.0 || self.gamma3 < 0.0 {
            return Err(MechError::InvalidParams("damping rates must be >= 0"));
        }
        Ok(())
    }
}

/// Complex displacement amplitude at one drive frequency: the coefficient
/// B1 of x1 = B1 e^{-iwt}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexResponse {
    pub value: Complex64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibility {
    pub chi: Complex64,
    pub n_density: f64,
    pub e_charge: f64,
}

/// Detuning sign conventions. The two differ by sign and must not be
/// mixed: mechanical plots use reference - omega, circuit plots use
/// omega - reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningMode {
    Mech,
    Circuit,
}

/// Map raw spring constants onto modal parameters.
///
/// omega1^2 = (k1+k12+k13)/m, omega2^2 = (k2+k12)/m, omega3^2 = (k3+k13)/m,
/// Oc^2 = k12/m, Or^2 = k13/m. Because k12 and k13 are summands of
/// omega1^2 * m, the derived couplings never exceed omega1^2.
pub fn derive_modal(sys: &MechanicalSystem) -> Result<ModalParams, MechError> {
    sys.validate()?;
    let m = sys.m;
    Ok(ModalParams {
        omega1_sq: (sys.kappa1 + sys.kappa12 + sys.kappa13) / m,
        omega2_sq: (sys.kappa2 + sys.kappa12) / m,
        omega3_sq: (sys.kappa3 + sys.kappa13) / m,
        omega_c_sq: sys.kappa12 / m,
        omega_r_sq: sys.kappa13 / m,
        gamma1: sys.gamma1,
        gamma2: sys.gamma2,
        gamma3: sys.gamma3,
    })
}

/// Single damped driven oscillator: (F0/m) / (w0^2 - w^2 - i g w).
///
/// omega = 0 is allowed (static deflection). The undamped pole w = w0,
/// g = 0 is reported as an error instead of returning infinity.
pub fn lorentz_response(
    omega0: f64,
    gamma: f64,
    drive_accel: f64,
    omega: f64,
) -> Result<ComplexResponse, MechError> {
    if !(omega0 > 0.0) {
        return Err(MechError::InvalidParams("omega0 must be > 0"));
    }
    if gamma < 0.0 {
        return Err(MechError::InvalidParams("gamma must be >= 0"));
    }
    let den = Complex64::new(omega0 * omega0 - omega * omega, -gamma * omega);
    if den == Complex64::ZERO {
        return Err(MechError::Pole { omega });
    }
    Ok(ComplexResponse {
        value: drive_accel / den,
        omega,
    })
}

/// Driven response of mass 1 in the three-oscillator chain:
///
///   (F0/m) / [ d1 - Oc^4/d2 - Or^4/d3 ],  dk = wk^2 - w^2 - i gk w.
///
/// Guarded division, in this order per coupling term:
/// a term with zero coupling contributes exactly nothing (so the two- and
/// one-oscillator reductions are bit-exact), and a live term whose
/// sub-denominator is exactly zero makes the whole response exactly 0,
/// the analytic transparency limit. A vanishing total denominator is a
/// genuine pole and is reported as an error.
pub fn mech_response(
    p: &ModalParams,
    drive_accel: f64,
    omega: f64,
) -> Result<ComplexResponse, MechError> {
    p.validate()?;
    if !(omega > 0.0) {
        return Err(MechError::InvalidParams("omega must be > 0"));
    }
    let w2 = omega * omega;
    let mut den = Complex64::new(p.omega1_sq - w2, -p.gamma1 * omega);
    for (coupling_sq, wk_sq, gk) in [
        (p.omega_c_sq, p.omega2_sq, p.gamma2),
        (p.omega_r_sq, p.omega3_sq, p.gamma3),
    ] {
        let num = coupling_sq * coupling_sq;
        if num == 0.0 {
            continue;
        }
        let dk = Complex64::new(wk_sq - w2, -gk * omega);
        if dk == Complex64::ZERO {
            return Ok(ComplexResponse {
                value: Complex64::ZERO,
                omega,
            });
        }
        den -= num / dk;
    }
    if den == Complex64::ZERO {
        return Err(MechError::Pole { omega });
    }
    Ok(ComplexResponse {
        value: drive_accel / den,
        omega,
    })
}

/// chi = N e x1 / F0. Im chi is the absorption channel, Re chi the
/// dispersion channel.
pub fn susceptibility_from_response(
    r: &ComplexResponse,
    n_density: f64,
    e_charge: f64,
    f0: f64,
) -> Result<Susceptibility, MechError> {
    if !(f0 > 0.0) {
        return Err(MechError::InvalidParams("f0 must be > 0"));
    }
    Ok(Susceptibility {
        chi: r.value * (n_density * e_charge / f0),
        n_density,
        e_charge,
    })
}

pub fn detuning_convert(omega: f64, reference: f64, mode: DetuningMode) -> f64 {
    match mode {
        DetuningMode::Mech => reference - omega,
        DetuningMode::Circuit => omega - reference,
    }
}
