//! Closed-form impedance analysis of the capacitively coupled RLC loop
//! circuits: equivalent capacitances, reactances, the A/B driving-point
//! coefficients, loop-1 current, and the resistive/reactive power split.
//!
//! Phasor convention: e^{-iwt}, matching mech-core. The source phasor is
//! an amplitude (not RMS), so no factor 1/2 appears in the powers.
//!
//! Under this convention the loop-1 current is I1 = (A + iB) Vs/(A^2+B^2)
//! and the complex power delivered by the source is S = conj(Vs) * I1,
//! giving P_R = A|Vs|^2/(A^2+B^2) and P_X = +B|Vs|^2/(A^2+B^2).

use mech_core::ModalParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RlcError {
    #[error("invalid circuit parameters: {0}")]
    InvalidParams(&'static str),
    #[error("omega must be > 0, got {0}")]
    NonPositiveOmega(f64),
    #[error("reflected-term pole in loop {loop_index} at omega = {omega} (R = 0 with balanced reactance)")]
    ReflectedPole { loop_index: u8, omega: f64 },
    #[error("degenerate driving-point impedance (A = B = 0)")]
    DegenerateImpedance,
}

/// Component values of the three-loop circuit. The two-loop reduction
/// reads only the loop-1 and loop-2 fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Coupling capacitance shared between loop 1 and each auxiliary loop.
    pub c: f64,
    /// Source amplitude (V).
    pub vs: f64,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<(), RlcError> {
        if !(self.r1 > 0.0) {
            return Err(RlcError::InvalidParams("r1 must be > 0"));
        }
        if self.r2 < 0.0 || self.r3 < 0.0 {
            return Err(RlcError::InvalidParams("resistances must be >= 0"));
        }
        if !(self.l1 > 0.0 && self.l2 > 0.0 && self.l3 > 0.0) {
            return Err(RlcError::InvalidParams("inductances must be > 0"));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c3 > 0.0 && self.c > 0.0) {
            return Err(RlcError::InvalidParams("capacitances must be > 0"));
        }
        if !(self.vs > 0.0) {
            return Err(RlcError::InvalidParams("vs must be > 0"));
        }
        Ok(())
    }
}

/// Which circuit the parameters describe. The three-loop circuit splits
/// the coupling capacitance across two branch points, so its driven loop
/// sees C/2 in series with C1 and carries both coupling reactances in its
/// mesh path; the two-loop circuit has a single coupling capacitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    ThreeLoop,
    TwoLoop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentCaps {
    pub ce1: f64,
    pub ce2: f64,
    pub ce3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reactances {
    pub x_c: f64,
    pub x_c1: f64,
    pub x_c2: f64,
    pub x_c3: f64,
    pub x_l1: f64,
    pub x_l2: f64,
    pub x_l3: f64,
    pub omega: f64,
}

/// Driving-point impedance of the driven loop split into resistive and
/// reactive parts. A > 0 whenever R1 > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABCoefficients {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub p_r: f64,
    pub p_x: f64,
}

/// Series equivalent capacitances seen by each loop of the three-loop
/// circuit: Ce1 = (C/2)C1/(C/2+C1), Ce2 = C C2/(C+C2), Ce3 = C C3/(C+C3).
pub fn equivalent_caps(p: &CircuitParams) -> Result<EquivalentCaps, RlcError> {
    p.validate()?;
    let half = p.c / 2.0;
    Ok(EquivalentCaps {
        ce1: half * p.c1 / (half + p.c1),
        ce2: p.c * p.c2 / (p.c + p.c2),
        ce3: p.c * p.c3 / (p.c + p.c3),
    })
}

/// Loop-1 series capacitance for a given topology: the two-loop circuit
/// has a single coupling capacitor in the driven loop.
pub fn loop1_equivalent_cap(p: &CircuitParams, topology: Topology) -> Result<f64, RlcError> {
    p.validate()?;
    Ok(match topology {
        Topology::ThreeLoop => {
            let half = p.c / 2.0;
            half * p.c1 / (half + p.c1)
        }
        Topology::TwoLoop => p.c * p.c1 / (p.c + p.c1),
    })
}

/// Map component values onto the shared modal form:
/// gamma_i = Ri/Li, omega_i^2 = 1/(Li Cei), Oc^2 = Or^2 = 1/(L1 C).
///
/// For the two-loop topology the pumping channel is absent (Or^2 = 0,
/// gamma3 = 0) and omega3 is set equal to omega1 as an inert placeholder.
pub fn circuit_modal(p: &CircuitParams, topology: Topology) -> Result<ModalParams, RlcError> {
    p.validate()?;
    let coupling = 1.0 / (p.l1 * p.c);
    match topology {
        Topology::ThreeLoop => {
            let ce = equivalent_caps(p)?;
            Ok(ModalParams {
                omega1_sq: 1.0 / (p.l1 * ce.ce1),
                omega2_sq: 1.0 / (p.l2 * ce.ce2),
                omega3_sq: 1.0 / (p.l3 * ce.ce3),
                omega_c_sq: coupling,
                omega_r_sq: coupling,
                gamma1: p.r1 / p.l1,
                gamma2: p.r2 / p.l2,
                gamma3: p.r3 / p.l3,
            })
        }
        Topology::TwoLoop => {
            let ce1 = p.c * p.c1 / (p.c + p.c1);
            let ce2 = p.c * p.c2 / (p.c + p.c2);
            let omega1_sq = 1.0 / (p.l1 * ce1);
            Ok(ModalParams {
                omega1_sq,
                omega2_sq: 1.0 / (p.l2 * ce2),
                omega3_sq: omega1_sq,
                omega_c_sq: coupling,
                omega_r_sq: 0.0,
                gamma1: p.r1 / p.l1,
                gamma2: p.r2 / p.l2,
                gamma3: 0.0,
            })
        }
    }
}

pub fn reactances(p: &CircuitParams, omega: f64) -> Result<Reactances, RlcError> {
    p.validate()?;
    if !(omega > 0.0) {
        return Err(RlcError::NonPositiveOmega(omega));
    }
    Ok(Reactances {
        x_c: 1.0 / (omega * p.c),
        x_c1: 1.0 / (omega * p.c1),
        x_c2: 1.0 / (omega * p.c2),
        x_c3: 1.0 / (omega * p.c3),
        x_l1: omega * p.l1,
        x_l2: omega * p.l2,
        x_l3: omega * p.l3,
        omega,
    })
}

// Reflected denominators below this are genuine poles (R = 0 loop with
// balanced reactance).
const POLE_FLOOR: f64 = 1e-30;

/// A and B for the three-loop circuit:
///
///   Yk = X_Lk - (X_C + X_Ck)                     (k = 2, 3)
///   A  = R1 + R2 X_C^2/(R2^2+Y2^2) + R3 X_C^2/(R3^2+Y3^2)
///   B  = X_L1 - (2 X_C + X_C1)
///        - X_C^2 Y2/(R2^2+Y2^2) - X_C^2 Y3/(R3^2+Y3^2)
///
/// The driven mesh carries both coupling capacitors, hence the 2 X_C.
pub fn ab_coefficients(p: &CircuitParams, x: &Reactances) -> Result<ABCoefficients, RlcError> {
    let y2 = x.x_l2 - (x.x_c + x.x_c2);
    let y3 = x.x_l3 - (x.x_c + x.x_c3);
    let d2 = p.r2 * p.r2 + y2 * y2;
    let d3 = p.r3 * p.r3 + y3 * y3;
    if d2 < POLE_FLOOR {
        return Err(RlcError::ReflectedPole {
            loop_index: 2,
            omega: x.omega,
        });
    }
    if d3 < POLE_FLOOR {
        return Err(RlcError::ReflectedPole {
            loop_index: 3,
            omega: x.omega,
        });
    }
    let xc2 = x.x_c * x.x_c;
    Ok(ABCoefficients {
        a: p.r1 + p.r2 * xc2 / d2 + p.r3 * xc2 / d3,
        b: x.x_l1 - (2.0 * x.x_c + x.x_c1) - xc2 * y2 / d2 - xc2 * y3 / d3,
    })
}

/// A and B for the two-loop circuit: loop-3 terms deleted and a single
/// coupling capacitor in the driven mesh (X_C + X_C1, not 2 X_C + X_C1).
pub fn single_eit_ab(p: &CircuitParams, x: &Reactances) -> Result<ABCoefficients, RlcError> {
    let y2 = x.x_l2 - (x.x_c + x.x_c2);
    let d2 = p.r2 * p.r2 + y2 * y2;
    if d2 < POLE_FLOOR {
        return Err(RlcError::ReflectedPole {
            loop_index: 2,
            omega: x.omega,
        });
    }
    let xc2 = x.x_c * x.x_c;
    Ok(ABCoefficients {
        a: p.r1 + p.r2 * xc2 / d2,
        b: x.x_l1 - (x.x_c + x.x_c1) - xc2 * y2 / d2,
    })
}

pub fn ab_for_topology(
    p: &CircuitParams,
    x: &Reactances,
    topology: Topology,
) -> Result<ABCoefficients, RlcError> {
    match topology {
        Topology::ThreeLoop => ab_coefficients(p, x),
        Topology::TwoLoop => single_eit_ab(p, x),
    }
}

/// I1 = (A + iB) Vs / (A^2 + B^2), equivalently Vs / (A - iB).
pub fn loop1_current(ab: &ABCoefficients, vs: f64) -> Result<Complex64, RlcError> {
    let n = ab.a * ab.a + ab.b * ab.b;
    if !(n > 0.0) {
        return Err(RlcError::DegenerateImpedance);
    }
    Ok(Complex64::new(ab.a, ab.b) * (vs / n))
}

/// P_R = A |Vs|^2/(A^2+B^2), P_X = B |Vs|^2/(A^2+B^2).
pub fn power_split(ab: &ABCoefficients, vs: f64) -> Result<PowerSplit, RlcError> {
    let n = ab.a * ab.a + ab.b * ab.b;
    if !(n > 0.0) {
        return Err(RlcError::DegenerateImpedance);
    }
    let vs2 = vs * vs;
    Ok(PowerSplit {
        p_r: ab.a * vs2 / n,
        p_x: ab.b * vs2 / n,
    })
}
