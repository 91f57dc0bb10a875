//! Oracle matrix: every preset is recomputed through its independent
//! routes (closed form, netlist MNA, time-domain integration) and the
//! worst relative gap per route pair is reported.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use mech_core::{mech_response, ModalParams};
use netlist_mna::{ac_sweep, parse_netlist};
use num_complex::Complex64;
use rlc_analytic::{
    ab_for_topology, circuit_modal, loop1_current, power_split, reactances, ABCoefficients,
    CircuitParams, Topology,
};
use sweep_analysis::make_grid;
use time_domain::settled_phasor;

use crate::presets::{self, OracleBinding, Preset};
use crate::scenario::{ModelSpec, SweepSpec};
use crate::CliError;

/// Two frequency-domain routes solve the same linear system, so they
/// must agree to solver precision.
pub const ROUTE_TOL: f64 = 1e-9;
/// The integrated transient carries O(dt^4) step error.
pub const TIME_TOL: f64 = 1e-3;

pub struct VerifyRow {
    pub preset: &'static str,
    pub check: &'static str,
    pub max_rel: f64,
    pub tol: f64,
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.max_rel.is_finite() && self.max_rel <= self.tol
    }
}

/// Every preset carries a grid: either an explicit sweep block or the
/// directive inside its embedded netlist.
fn preset_sweep(p: &Preset) -> Result<SweepSpec, CliError> {
    if let Some(sw) = &p.scenario.sweep {
        return Ok(*sw);
    }
    if let ModelSpec::Netlist(n) = &p.scenario.model {
        if let Some(text) = &n.text {
            let nl = parse_netlist(text)?;
            return Ok(SweepSpec {
                start: nl.sweep.start,
                stop: nl.sweep.stop,
                points: nl.sweep.points,
                scale: nl.sweep.scale,
            });
        }
    }
    Err(CliError::Invalid(format!("preset {} has no sweep", p.name)))
}

/// Generic probe point for the time-domain leg: a quarter of the way
/// into the sweep, away from both edges and the transparency features
/// near the center.
fn probe_omega(sw: &SweepSpec) -> f64 {
    sw.start + 0.25 * (sw.stop - sw.start)
}

/// Step as a fraction of the fastest period. Mechanical presets carry
/// transients of ~2e5 time units, so they run at the coarsest step the
/// tolerance allows; circuit transients are milliseconds, so those legs
/// afford a finer step, which matters near inter-dip cancellation
/// regions where the response is steep.
fn probe_dt(p: &ModalParams, omega: f64, frac: f64) -> f64 {
    let w_max = p
        .omega1_sq
        .max(p.omega2_sq)
        .max(p.omega3_sq)
        .sqrt()
        .max(omega);
    frac * TAU / w_max
}

const MECH_STEP_FRAC: f64 = 0.04;
const CIRCUIT_STEP_FRAC: f64 = 0.02;

fn closed_loops(
    p: &CircuitParams,
    topology: Topology,
    omegas: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<Complex64>), CliError> {
    let mut p_r = Vec::with_capacity(omegas.len());
    let mut p_x = Vec::with_capacity(omegas.len());
    let mut cur = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let x = reactances(p, w)?;
        let ab = ab_for_topology(p, &x, topology)?;
        let ps = power_split(&ab, p.vs)?;
        p_r.push(ps.p_r);
        p_x.push(ps.p_x);
        cur.push(loop1_current(&ab, p.vs)?);
    }
    Ok((p_r, p_x, cur))
}

fn single_loop_ab(p: &CircuitParams, omega: f64) -> Result<ABCoefficients, CliError> {
    let x = reactances(p, omega)?;
    Ok(ABCoefficients {
        a: p.r1,
        b: x.x_l1 - x.x_c1 - x.x_c,
    })
}

fn closed_single(
    p: &CircuitParams,
    omegas: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<Complex64>), CliError> {
    let mut p_r = Vec::with_capacity(omegas.len());
    let mut p_x = Vec::with_capacity(omegas.len());
    let mut cur = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let ab = single_loop_ab(p, w)?;
        let ps = power_split(&ab, p.vs)?;
        p_r.push(ps.p_r);
        p_x.push(ps.p_x);
        cur.push(loop1_current(&ab, p.vs)?);
    }
    Ok((p_r, p_x, cur))
}

/// Worst gap across P_R, P_X and the source current, each normalized by
/// its own sweep-wide peak so zero crossings do not inflate the ratio.
fn worst_gap(
    a: &(Vec<f64>, Vec<f64>, Vec<Complex64>),
    b: &(Vec<f64>, Vec<f64>, Vec<Complex64>),
) -> f64 {
    let sup = |v: &[f64]| v.iter().fold(f64::MIN_POSITIVE, |m, &x| m.max(x.abs()));
    let sup_c = |v: &[Complex64]| v.iter().fold(f64::MIN_POSITIVE, |m, z| m.max(z.norm()));
    let s_r = sup(&a.0).max(sup(&b.0));
    let s_x = sup(&a.1).max(sup(&b.1));
    let s_i = sup_c(&a.2).max(sup_c(&b.2));
    let mut worst = 0.0f64;
    for k in 0..a.0.len() {
        worst = worst
            .max((a.0[k] - b.0[k]).abs() / s_r)
            .max((a.1[k] - b.1[k]).abs() / s_x)
            .max((a.2[k] - b.2[k]).norm() / s_i);
    }
    worst
}

fn netlist_route(
    text: &str,
) -> Result<(Vec<f64>, Vec<f64>, Vec<Complex64>), CliError> {
    let swept = ac_sweep(&parse_netlist(text)?)?;
    Ok((swept.p_r, swept.p_x, swept.source_currents))
}

/// Closed-form coupled-loop solution against the stamped MNA solve of
/// the equivalent netlist, over a shared grid.
pub fn circuit_route_gap(
    p: &CircuitParams,
    topology: Topology,
    sw: &SweepSpec,
) -> Result<f64, CliError> {
    let omegas = make_grid(sw.start, sw.stop, sw.points, sw.scale)?;
    let closed = closed_loops(p, topology, &omegas)?;
    let text = match topology {
        Topology::ThreeLoop => presets::three_loop_netlist(p, sw),
        Topology::TwoLoop => presets::two_loop_netlist(p, sw),
    };
    Ok(worst_gap(&closed, &netlist_route(&text)?))
}

/// Same comparison for the open-switch configuration, where loop 1
/// drives R1, L1, C1 and the coupling capacitor in plain series.
pub fn single_loop_route_gap(p: &CircuitParams, sw: &SweepSpec) -> Result<f64, CliError> {
    let omegas = make_grid(sw.start, sw.stop, sw.points, sw.scale)?;
    let closed = closed_single(p, &omegas)?;
    let text = presets::single_loop_netlist(p, sw);
    Ok(worst_gap(&closed, &netlist_route(&text)?))
}

fn mech_time_gap(
    modal: &ModalParams,
    drive: f64,
    omega: f64,
    frac: f64,
) -> Result<f64, CliError> {
    let closed = mech_response(modal, drive, omega)?.value;
    let est = settled_phasor(modal, drive, omega, probe_dt(modal, omega, frac), 6)?;
    Ok((est.amplitude - closed).norm() / closed.norm())
}

/// The charge-variable mapping onto the shared modal form keeps the
/// loop equations symmetric only when the auxiliary inductors equal the
/// driven one; only then is the modal amplitude also the mesh current
/// amplitude. Elsewhere the modal route is a dip-position analogue, not
/// an amplitude-exact solution of the mesh system.
fn amplitude_exact_mapping(p: &CircuitParams, topology: Topology) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    match topology {
        Topology::ThreeLoop => close(p.l2, p.l1) && close(p.l3, p.l1),
        Topology::TwoLoop => close(p.l2, p.l1),
    }
}

/// Charge phasor from integration, converted to the mesh current
/// I = -i w q, against the closed-form current.
fn loops_time_gap(p: &CircuitParams, topology: Topology, omega: f64) -> Result<f64, CliError> {
    let modal = circuit_modal(p, topology)?;
    let x = reactances(p, omega)?;
    let ab = ab_for_topology(p, &x, topology)?;
    let i_closed = loop1_current(&ab, p.vs)?;
    let est = settled_phasor(
        &modal,
        p.vs / p.l1,
        omega,
        probe_dt(&modal, omega, CIRCUIT_STEP_FRAC),
        6,
    )?;
    let i_td = Complex64::new(0.0, -omega) * est.amplitude;
    Ok((i_td - i_closed).norm() / i_closed.norm())
}

fn single_time_gap(p: &CircuitParams, omega: f64) -> Result<f64, CliError> {
    let ce = p.c1 * p.c / (p.c1 + p.c);
    let w1_sq = 1.0 / (p.l1 * ce);
    let modal = ModalParams {
        omega1_sq: w1_sq,
        omega2_sq: w1_sq,
        omega3_sq: w1_sq,
        omega_c_sq: 0.0,
        omega_r_sq: 0.0,
        gamma1: p.r1 / p.l1,
        gamma2: 0.0,
        gamma3: 0.0,
    };
    let i_closed = loop1_current(&single_loop_ab(p, omega)?, p.vs)?;
    let est = settled_phasor(
        &modal,
        p.vs / p.l1,
        omega,
        probe_dt(&modal, omega, CIRCUIT_STEP_FRAC),
        6,
    )?;
    let i_td = Complex64::new(0.0, -omega) * est.amplitude;
    Ok((i_td - i_closed).norm() / i_closed.norm())
}

pub fn run_verify() -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    for preset in presets::all() {
        let sw = preset_sweep(&preset)?;
        let probe = probe_omega(&sw);
        let mut sw_check = sw;
        sw_check.points = 101;
        match preset.oracle {
            OracleBinding::Modal { modal, drive } => {
                rows.push(VerifyRow {
                    preset: preset.name,
                    check: "time domain vs closed form",
                    max_rel: mech_time_gap(&modal, drive, probe, MECH_STEP_FRAC)?,
                    tol: TIME_TOL,
                });
            }
            OracleBinding::Loops { circuit, topology } => {
                rows.push(VerifyRow {
                    preset: preset.name,
                    check: "closed form vs netlist",
                    max_rel: circuit_route_gap(&circuit, topology, &sw_check)?,
                    tol: ROUTE_TOL,
                });
                let modal = circuit_modal(&circuit, topology)?;
                rows.push(VerifyRow {
                    preset: preset.name,
                    check: "time domain vs modal form",
                    max_rel: mech_time_gap(
                        &modal,
                        circuit.vs / circuit.l1,
                        probe,
                        CIRCUIT_STEP_FRAC,
                    )?,
                    tol: TIME_TOL,
                });
                if amplitude_exact_mapping(&circuit, topology) {
                    rows.push(VerifyRow {
                        preset: preset.name,
                        check: "time domain vs mesh current",
                        max_rel: loops_time_gap(&circuit, topology, probe)?,
                        tol: TIME_TOL,
                    });
                }
            }
            OracleBinding::SingleLoop { circuit } => {
                rows.push(VerifyRow {
                    preset: preset.name,
                    check: "closed form vs netlist",
                    max_rel: single_loop_route_gap(&circuit, &sw_check)?,
                    tol: ROUTE_TOL,
                });
                rows.push(VerifyRow {
                    preset: preset.name,
                    check: "time domain vs mesh current",
                    max_rel: single_time_gap(&circuit, probe)?,
                    tol: TIME_TOL,
                });
            }
        }
    }
    Ok(rows)
}

pub fn render_table(rows: &[VerifyRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:<28} {:>12} {:>9}  {}",
        "preset", "check", "max rel", "tol", "status"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<14} {:<28} {:>12.3e} {:>9.0e}  {}",
            r.preset,
            r.check,
            r.max_rel,
            r.tol,
            if r.passed() { "PASS" } else { "FAIL" }
        );
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(s, "{} checks, {} failed", rows.len(), failed);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_gap_is_tiny_for_a_matched_three_loop() {
        let p = match presets::find("fig9a").unwrap().oracle {
            OracleBinding::Loops { circuit, .. } => circuit,
            _ => unreachable!(),
        };
        let sw = presets::find("fig9a").unwrap().scenario.sweep.unwrap();
        let mut sw = sw;
        sw.points = 51;
        let gap = circuit_route_gap(&p, Topology::ThreeLoop, &sw).unwrap();
        assert!(gap <= 1e-11, "gap {gap:e}");
    }

    #[test]
    fn route_gap_detects_a_perturbed_circuit() {
        // sensitivity check: the comparison must not be trivially zero
        let preset = presets::find("fig9a").unwrap();
        let (mut p, topo) = match preset.oracle {
            OracleBinding::Loops { circuit, topology } => (circuit, topology),
            _ => unreachable!(),
        };
        let mut sw = preset.scenario.sweep.unwrap();
        sw.points = 51;
        let baseline = circuit_route_gap(&p, topo, &sw).unwrap();
        p.r2 *= 1.0 + 1e-6;
        // closed route sees the perturbed value, netlist text is built
        // from the same perturbed params, so the gap stays tiny; the
        // detection test instead perturbs only one route:
        let omegas = make_grid(sw.start, sw.stop, sw.points, sw.scale).unwrap();
        let closed = closed_loops(&p, topo, &omegas).unwrap();
        p.r2 /= 1.0 + 1e-6;
        let text = presets::three_loop_netlist(&p, &sw);
        let other = netlist_route(&text).unwrap();
        let gap = worst_gap(&closed, &other);
        assert!(gap > baseline.max(1e-12) * 10.0, "gap {gap:e} baseline {baseline:e}");
    }
}
