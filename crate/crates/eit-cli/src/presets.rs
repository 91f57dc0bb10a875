//! Embedded figure-reproduction presets. Each preset binds a ready-to-run
//! scenario plus the closed-form counterpart that `verify` checks it
//! against.

use mech_core::ModalParams;
use rlc_analytic::{CircuitParams, Topology};
use sweep_analysis::Scale;

use crate::scenario::{
    AnalysisSpec, MechSpec, ModelSpec, NetlistSpec, RlcSpec, Scenario, SweepSpec,
};

/// Closed-form route used to cross-check a preset.
#[derive(Debug, Clone, Copy)]
pub enum OracleBinding {
    Modal { modal: ModalParams, drive: f64 },
    Loops { circuit: CircuitParams, topology: Topology },
    /// Open-switch configuration: only the driven loop, in series with
    /// the coupling capacitor.
    SingleLoop { circuit: CircuitParams },
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub scenario: Scenario,
    pub oracle: OracleBinding,
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    all().iter().map(|p| p.name).collect()
}

/// Axis zero used for the circuit detuning column: the driven loop's
/// resonance with a single coupling capacitor in its series path. The
/// matched auxiliary loop resonates at the same frequency, which is where
/// the transparency dip sits for equal loop values.
pub fn axis_zero(p: &CircuitParams) -> f64 {
    1.0 / (p.l1 * (p.c1 * p.c / (p.c1 + p.c))).sqrt()
}

fn mech_preset(
    name: &'static str,
    summary: &'static str,
    modal: ModalParams,
) -> Preset {
    let drive = 1.0;
    Preset {
        name,
        summary,
        scenario: Scenario {
            model: ModelSpec::Mech(MechSpec { modal, drive }),
            sweep: Some(SweepSpec {
                start: 7.0,
                stop: 13.0,
                points: 8001,
                scale: Scale::Lin,
            }),
            analysis: AnalysisSpec::default(),
            reference: Some(10.0),
            output: None,
        },
        oracle: OracleBinding::Modal { modal, drive },
    }
}

fn loops_preset(
    name: &'static str,
    summary: &'static str,
    circuit: CircuitParams,
    topology: Topology,
    half_span: f64,
) -> Preset {
    let w_r = axis_zero(&circuit);
    Preset {
        name,
        summary,
        scenario: Scenario {
            model: ModelSpec::RlcAnalytic(RlcSpec { circuit, topology }),
            sweep: Some(SweepSpec {
                start: w_r - half_span,
                stop: w_r + half_span,
                points: 201,
                scale: Scale::Lin,
            }),
            analysis: AnalysisSpec::default(),
            reference: Some(w_r),
            output: None,
        },
        oracle: OracleBinding::Loops { circuit, topology },
    }
}

fn netlist_preset(
    name: &'static str,
    summary: &'static str,
    text: String,
    oracle: OracleBinding,
) -> Preset {
    Preset {
        name,
        summary,
        scenario: Scenario {
            model: ModelSpec::Netlist(NetlistSpec {
                path: None,
                text: Some(text),
            }),
            sweep: None,
            analysis: AnalysisSpec::default(),
            reference: None,
            output: None,
        },
        oracle,
    }
}

fn ac_line(sweep: &SweepSpec) -> String {
    let scale = match sweep.scale {
        Scale::Lin => "lin",
        Scale::Log => "log",
    };
    format!(".ac {scale} {} {} {}", sweep.points, sweep.start, sweep.stop)
}

pub fn three_loop_netlist(p: &CircuitParams, sweep: &SweepSpec) -> String {
    format!(
        "* driven series loop coupled to two resonators through shared capacitors\n\
         V1 1 0 AC {} 0\n\
         R1 1 2 {}\nL1 2 3 {}\nC1 3 4 {}\n\
         Ca 4 5 {}\nCb 5 0 {}\n\
         R2 4 6 {}\nL2 6 7 {}\nC2 7 5 {}\n\
         R3 5 8 {}\nL3 8 9 {}\nC3 9 0 {}\n\
         {}\n",
        p.vs, p.r1, p.l1, p.c1, p.c, p.c, p.r2, p.l2, p.c2, p.r3, p.l3, p.c3,
        ac_line(sweep)
    )
}

pub fn two_loop_netlist(p: &CircuitParams, sweep: &SweepSpec) -> String {
    format!(
        "* driven series loop coupled to one resonator through a shared capacitor\n\
         V1 1 0 AC {} 0\n\
         R1 1 2 {}\nL1 2 3 {}\nC1 3 4 {}\n\
         C 4 0 {}\n\
         R2 4 5 {}\nL2 5 6 {}\nC2 6 0 {}\n\
         {}\n",
        p.vs, p.r1, p.l1, p.c1, p.c, p.r2, p.l2, p.c2,
        ac_line(sweep)
    )
}

pub fn single_loop_netlist(p: &CircuitParams, sweep: &SweepSpec) -> String {
    format!(
        "* switch open: the driven loop alone, coupling capacitor still in series\n\
         V1 1 0 AC {} 0\n\
         R1 1 2 {}\nL1 2 3 {}\nC1 3 4 {}\n\
         C 4 0 {}\n\
         {}\n",
        p.vs, p.r1, p.l1, p.c1, p.c,
        ac_line(sweep)
    )
}

fn fig9_circuit(l2: f64, l3: f64) -> CircuitParams {
    CircuitParams {
        r1: 50.0,
        r2: 5.0,
        r3: 5.0,
        l1: 1.0e-3,
        l2,
        l3,
        c1: 0.1e-6,
        c2: 0.1e-6,
        c3: 0.1e-6,
        c: 0.2e-6,
        vs: 1.0,
    }
}

fn fig10_circuit(r2: f64, r3: f64) -> CircuitParams {
    CircuitParams {
        r1: 50.0,
        r2,
        r3,
        l1: 1.0e-3,
        l2: 2.0e-3,
        l3: 0.3e-3,
        c1: 0.1e-6,
        c2: 0.1e-6,
        c3: 0.1e-6,
        c: 0.2e-6,
        vs: 1.0,
    }
}

fn fig11_circuit(l2: f64) -> CircuitParams {
    // loop-3 fields are inert placeholders for the two-loop algebra
    CircuitParams {
        r1: 50.0,
        r2: 5.0,
        r3: 5.0,
        l1: 1.0e-3,
        l2,
        l3: l2,
        c1: 0.1e-6,
        c2: 0.1e-6,
        c3: 0.1e-6,
        c: 0.2e-6,
        vs: 1.0,
    }
}

fn fig12ab_circuit(c: f64) -> CircuitParams {
    CircuitParams {
        r1: 50.0,
        r2: 5.0,
        r3: 5.0,
        l1: 0.27,
        l2: 0.27,
        l3: 0.27,
        c1: 0.1e-6,
        c2: 0.1e-6,
        c3: 0.1e-6,
        c,
        vs: 1.0,
    }
}

fn fig12cd_circuit(l2: f64) -> CircuitParams {
    CircuitParams {
        r1: 87.0,
        r2: 16.0,
        r3: 25.0,
        l1: 0.27,
        l2,
        l3: 0.27,
        c1: 0.047e-6,
        c2: 0.047e-6,
        c3: 0.047e-6,
        c: 0.1e-6,
        vs: 1.0,
    }
}

/// Sweep for the measured single-window circuits: a wide window around
/// the driven-loop resonance.
fn fig12ab_sweep(p: &CircuitParams) -> SweepSpec {
    let w_r = axis_zero(p);
    SweepSpec {
        start: 0.4 * w_r,
        stop: 1.8 * w_r,
        points: 1001,
        scale: Scale::Lin,
    }
}

fn fig12cd_sweep() -> SweepSpec {
    SweepSpec {
        start: 6000.0,
        stop: 30000.0,
        points: 1201,
        scale: Scale::Lin,
    }
}

pub fn all() -> Vec<Preset> {
    let mech = |oc: f64, or_: f64, g2: f64, g3: f64, w2: f64, w3: f64| ModalParams {
        omega1_sq: 100.0,
        omega2_sq: w2 * w2,
        omega3_sq: w3 * w3,
        omega_c_sq: oc * oc,
        omega_r_sq: or_ * or_,
        gamma1: 1.0,
        gamma2: g2,
        gamma3: g3,
    };
    let shifted = 10.0 - 0.1;

    let mut v = vec![
        mech_preset(
            "fig7a",
            "two nested transparency windows at zero detuning",
            mech(3.0, 2.3, 0.1, 1e-4, 10.0, 10.0),
        ),
        mech_preset(
            "fig7c",
            "nested windows with the pumping coupling raised above the coupling one",
            mech(2.7, 3.0, 0.1, 1e-4, 10.0, 10.0),
        ),
        mech_preset(
            "fig7e",
            "nested windows displaced by detuned auxiliary oscillators",
            mech(3.0, 2.3, 0.1, 1e-4, shifted, shifted),
        ),
        mech_preset(
            "fig8a",
            "single transparency window, weak coupling",
            mech(2.3, 0.0, 1e-4, 0.0, 10.0, 10.0),
        ),
        mech_preset(
            "fig8c",
            "single transparency window, stronger coupling",
            mech(3.0, 0.0, 1e-4, 0.0, 10.0, 10.0),
        ),
        mech_preset(
            "fig8e",
            "single window displaced by a detuned auxiliary oscillator",
            mech(2.3, 0.0, 1e-4, 0.0, shifted, 10.0),
        ),
    ];

    let fig9 = [
        ("fig9a", 1.0e-3, 1.0e-3, "matched loops, coincident dips"),
        ("fig9b", 1.0e-3, 1.5e-3, "second dip pulled below the axis zero"),
        ("fig9c", 2.0e-3, 0.3e-3, "dips on opposite sides of the axis zero"),
        ("fig9d", 0.5e-3, 0.3e-3, "both dips above the axis zero"),
    ];
    for (name, l2, l3, summary) in fig9 {
        v.push(loops_preset(
            name,
            summary,
            fig9_circuit(l2, l3),
            Topology::ThreeLoop,
            1.2e5,
        ));
    }

    let fig10 = [
        ("fig10a", 5.0, 2.0, "double window, low loop resistances"),
        ("fig10b", 15.0, 2.0, "first window damped by a larger R2"),
        ("fig10c", 30.0, 5.0, "both windows damped further"),
        ("fig10d", 50.0, 5.0, "largest R2, first window nearly washed out"),
    ];
    for (name, r2, r3, summary) in fig10 {
        v.push(loops_preset(
            name,
            summary,
            fig10_circuit(r2, r3),
            Topology::ThreeLoop,
            1.2e5,
        ));
    }

    let fig11 = [
        ("fig11a", 1.0e-3, "single window at the axis zero"),
        ("fig11b", 1.5e-3, "window shifted below the axis zero"),
        ("fig11c", 2.0e-3, "window shifted further in the same direction"),
        ("fig11d", 0.5e-3, "window shifted to the opposite side"),
    ];
    for (name, l2, summary) in fig11 {
        v.push(loops_preset(
            name,
            summary,
            fig11_circuit(l2),
            Topology::TwoLoop,
            0.8e5,
        ));
    }

    for (name, c, summary) in [
        ("fig12a", 0.047e-6, "measured single window, small coupling capacitor"),
        ("fig12b", 0.2e-6, "measured single window, larger coupling capacitor"),
    ] {
        let p = fig12ab_circuit(c);
        let sweep = fig12ab_sweep(&p);
        v.push(netlist_preset(
            name,
            summary,
            two_loop_netlist(&p, &sweep),
            OracleBinding::Loops {
                circuit: p,
                topology: Topology::TwoLoop,
            },
        ));
        let open_name: &'static str = match name {
            "fig12a" => "fig12a_open",
            _ => "fig12b_open",
        };
        v.push(netlist_preset(
            open_name,
            "same driven loop with the auxiliary loop switched out",
            single_loop_netlist(&p, &sweep),
            OracleBinding::SingleLoop { circuit: p },
        ));
    }

    for (name, l2, summary) in [
        ("fig12c", 0.065, "measured double window, small L2"),
        ("fig12d", 0.185, "measured double window, larger L2"),
    ] {
        let p = fig12cd_circuit(l2);
        v.push(netlist_preset(
            name,
            summary,
            three_loop_netlist(&p, &fig12cd_sweep()),
            OracleBinding::Loops {
                circuit: p,
                topology: Topology::ThreeLoop,
            },
        ));
    }

    v
}
