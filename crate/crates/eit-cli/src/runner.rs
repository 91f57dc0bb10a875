//! Scenario execution: build the frequency grid, evaluate the model,
//! analyze dips, and write the artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mech_core::{detuning_convert, mech_response, DetuningMode};
use netlist_mna::{ac_sweep, parse_netlist, Netlist};
use num_complex::Complex64;
use rlc_analytic::{ab_for_topology, loop1_current, power_split, reactances};
use serde::Serialize;
use sweep_analysis::{detect_dips, make_grid, resonance_frequency, DipReport, Spectrum};

use crate::scenario::{ModelSpec, OutputFormat, Scenario, SweepSpec};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mech,
    Circuit,
}

/// Evaluated sweep plus everything the exporters need.
pub struct RunData {
    pub kind: ModelKind,
    pub spectrum: Spectrum,
    /// Source-branch current phasor per grid point (circuit models only).
    pub currents: Option<Vec<Complex64>>,
    pub reference: f64,
    pub reference_basis: &'static str,
    pub grid: SweepSpec,
}

impl RunData {
    pub fn delta(&self, omega: f64) -> f64 {
        let mode = match self.kind {
            ModelKind::Mech => DetuningMode::Mech,
            ModelKind::Circuit => DetuningMode::Circuit,
        };
        detuning_convert(omega, self.reference, mode)
    }
}

fn resolved_sweep(sw: &SweepSpec, points_override: Option<usize>) -> SweepSpec {
    SweepSpec {
        points: points_override.unwrap_or(sw.points),
        ..*sw
    }
}

pub fn compute(scenario: &Scenario, points_override: Option<usize>) -> Result<RunData, CliError> {
    scenario.validate()?;
    match &scenario.model {
        ModelSpec::Mech(m) => {
            let sw = resolved_sweep(scenario.sweep.as_ref().unwrap(), points_override);
            crate::scenario::validate_sweep(&sw)?;
            let omegas = make_grid(sw.start, sw.stop, sw.points, sw.scale)?;
            let mut absorption = Vec::with_capacity(omegas.len());
            let mut dispersion = Vec::with_capacity(omegas.len());
            for &w in &omegas {
                let b = mech_response(&m.modal, m.drive, w)?.value;
                absorption.push(b.im);
                dispersion.push(b.re);
            }
            let (reference, reference_basis) = match scenario.reference {
                Some(r) => (r, "explicit"),
                None => (m.modal.omega1_sq.sqrt(), "driven-oscillator resonance"),
            };
            Ok(RunData {
                kind: ModelKind::Mech,
                spectrum: Spectrum::new(omegas, absorption, dispersion)?,
                currents: None,
                reference,
                reference_basis,
                grid: sw,
            })
        }
        ModelSpec::RlcAnalytic(r) => {
            let sw = resolved_sweep(scenario.sweep.as_ref().unwrap(), points_override);
            crate::scenario::validate_sweep(&sw)?;
            let omegas = make_grid(sw.start, sw.stop, sw.points, sw.scale)?;
            let mut p_r = Vec::with_capacity(omegas.len());
            let mut p_x = Vec::with_capacity(omegas.len());
            let mut currents = Vec::with_capacity(omegas.len());
            for &w in &omegas {
                let x = reactances(&r.circuit, w)?;
                let ab = ab_for_topology(&r.circuit, &x, r.topology)?;
                let ps = power_split(&ab, r.circuit.vs)?;
                p_r.push(ps.p_r);
                p_x.push(ps.p_x);
                currents.push(loop1_current(&ab, r.circuit.vs)?);
            }
            let (reference, reference_basis) = match scenario.reference {
                Some(rf) => (rf, "explicit"),
                None => (
                    resonance_frequency(&r.circuit, r.topology)?,
                    "loop-1 resonance",
                ),
            };
            Ok(RunData {
                kind: ModelKind::Circuit,
                spectrum: Spectrum::new(omegas, p_r, p_x)?,
                currents: Some(currents),
                reference,
                reference_basis,
                grid: sw,
            })
        }
        ModelSpec::Netlist(n) => {
            let text = match (&n.path, &n.text) {
                (Some(path), None) => fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
                (None, Some(t)) => t.clone(),
                _ => unreachable!("validated"),
            };
            let mut netlist: Netlist = parse_netlist(&text)?;
            if let Some(sw) = &scenario.sweep {
                netlist.sweep.scale = sw.scale;
                netlist.sweep.points = sw.points;
                netlist.sweep.start = sw.start;
                netlist.sweep.stop = sw.stop;
            }
            if let Some(n_pts) = points_override {
                netlist.sweep.points = n_pts;
            }
            let sw = SweepSpec {
                start: netlist.sweep.start,
                stop: netlist.sweep.stop,
                points: netlist.sweep.points,
                scale: netlist.sweep.scale,
            };
            crate::scenario::validate_sweep(&sw)?;
            let swept = ac_sweep(&netlist)?;
            let currents = swept.source_currents.clone();
            let (reference, reference_basis) = match scenario.reference {
                Some(rf) => (rf, "explicit"),
                None => (0.0, "none (delta equals omega)"),
            };
            Ok(RunData {
                kind: ModelKind::Circuit,
                spectrum: swept.spectrum()?,
                currents: Some(currents),
                reference,
                reference_basis,
                grid: sw,
            })
        }
    }
}

/// CSV with shortest round-trip float formatting, so output is
/// byte-reproducible and parses back to the exact doubles.
pub fn spectrum_csv(data: &RunData) -> String {
    let mut s = String::new();
    match data.kind {
        ModelKind::Mech => s.push_str("omega,delta,absorption,dispersion\n"),
        ModelKind::Circuit => s.push_str("omega,delta,P_R,P_X,re_I,im_I\n"),
    }
    let omegas = data.spectrum.omegas();
    let a = data.spectrum.absorption();
    let d = data.spectrum.dispersion();
    for i in 0..omegas.len() {
        let w = omegas[i];
        match (data.kind, &data.currents) {
            (ModelKind::Circuit, Some(cur)) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    w,
                    data.delta(w),
                    a[i],
                    d[i],
                    cur[i].re,
                    cur[i].im
                );
            }
            _ => {
                let _ = writeln!(s, "{},{},{},{}", w, data.delta(w), a[i], d[i]);
            }
        }
    }
    s
}

#[derive(Serialize)]
struct JsonColumns<'a> {
    omega: &'a [f64],
    delta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    absorption: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dispersion: Option<&'a [f64]>,
    #[serde(rename = "P_R", skip_serializing_if = "Option::is_none")]
    p_r: Option<&'a [f64]>,
    #[serde(rename = "P_X", skip_serializing_if = "Option::is_none")]
    p_x: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_i: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_i: Option<Vec<f64>>,
}

pub fn spectrum_json(data: &RunData) -> String {
    let omegas = data.spectrum.omegas();
    let delta = omegas.iter().map(|&w| data.delta(w)).collect();
    let cols = match data.kind {
        ModelKind::Mech => JsonColumns {
            omega: omegas,
            delta,
            absorption: Some(data.spectrum.absorption()),
            dispersion: Some(data.spectrum.dispersion()),
            p_r: None,
            p_x: None,
            re_i: None,
            im_i: None,
        },
        ModelKind::Circuit => JsonColumns {
            omega: omegas,
            delta,
            absorption: None,
            dispersion: None,
            p_r: Some(data.spectrum.absorption()),
            p_x: Some(data.spectrum.dispersion()),
            re_i: data
                .currents
                .as_ref()
                .map(|c| c.iter().map(|z| z.re).collect()),
            im_i: data
                .currents
                .as_ref()
                .map(|c| c.iter().map(|z| z.im).collect()),
        },
    };
    serde_json::to_string_pretty(&cols).expect("column serialization is infallible")
}

#[derive(Serialize)]
struct Conventions {
    time_dependence: &'static str,
    absorption_channel: &'static str,
    power: &'static str,
    amplitudes: &'static str,
    delta: &'static str,
}

const CONVENTIONS: Conventions = Conventions {
    time_dependence: "phasors follow exp(-i omega t)",
    absorption_channel: "+Im of the response; P_R for circuits",
    power: "S = conj(V) * I; P_R = Re S, P_X = Im S",
    amplitudes: "peak phasors, not RMS",
    delta: "mech: reference - omega; circuit: omega - reference",
};

#[derive(Serialize)]
struct Resolved<'a> {
    model: ModelKind,
    points: usize,
    prominence: f64,
    reference: f64,
    reference_basis: &'a str,
    format: OutputFormat,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    version: &'static str,
    name: &'a str,
    scenario: &'a Scenario,
    resolved: Resolved<'a>,
    conventions: Conventions,
    artifacts: Artifacts,
}

#[derive(Serialize, Clone)]
pub struct Artifacts {
    pub spectrum: PathBuf,
    pub report: PathBuf,
    pub metadata: PathBuf,
}

pub struct RunOutcome {
    pub report: DipReport,
    pub artifacts: Artifacts,
    pub points: usize,
}

pub fn execute(
    scenario: &Scenario,
    name: &str,
    out_dir: &Path,
    format: OutputFormat,
    points_override: Option<usize>,
    prominence_override: Option<f64>,
) -> Result<RunOutcome, CliError> {
    let data = compute(scenario, points_override)?;
    let prominence = prominence_override.unwrap_or(scenario.analysis.prominence);
    if !(prominence > 0.0 && prominence < 1.0) {
        return Err(CliError::Invalid(format!(
            "prominence must lie in (0, 1), got {prominence}"
        )));
    }
    let report = detect_dips(&data.spectrum, prominence)?;

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let artifacts = Artifacts {
        spectrum: out_dir.join(match format {
            OutputFormat::Csv => format!("{name}.csv"),
            OutputFormat::Json => format!("{name}.spectrum.json"),
        }),
        report: out_dir.join(format!("{name}.report.json")),
        metadata: out_dir.join(format!("{name}.run.json")),
    };

    let spectrum_text = match format {
        OutputFormat::Csv => spectrum_csv(&data),
        OutputFormat::Json => spectrum_json(&data),
    };
    let report_text =
        serde_json::to_string_pretty(&report).expect("report serialization is infallible");
    let meta = RunMetadata {
        version: env!("CARGO_PKG_VERSION"),
        name,
        scenario,
        resolved: Resolved {
            model: data.kind,
            points: data.grid.points,
            prominence,
            reference: data.reference,
            reference_basis: data.reference_basis,
            format,
        },
        conventions: CONVENTIONS,
        artifacts: artifacts.clone(),
    };
    let meta_text =
        serde_json::to_string_pretty(&meta).expect("metadata serialization is infallible");

    for (path, text) in [
        (&artifacts.spectrum, &spectrum_text),
        (&artifacts.report, &report_text),
        (&artifacts.metadata, &meta_text),
    ] {
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }

    Ok(RunOutcome {
        report,
        artifacts,
        points: data.grid.points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn mech_csv_has_the_mech_header_and_grid_length() {
        let p = presets::find("fig8a").unwrap();
        let data = compute(&p.scenario, Some(11)).unwrap();
        let csv = spectrum_csv(&data);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "omega,delta,absorption,dispersion");
        assert_eq!(lines.len(), 12);
        // delta column is reference - omega for the mechanical convention
        assert!(lines[1].starts_with("7,3,"));
    }

    #[test]
    fn circuit_csv_has_six_columns() {
        let p = presets::find("fig9a").unwrap();
        let data = compute(&p.scenario, Some(5)).unwrap();
        let csv = spectrum_csv(&data);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "omega,delta,P_R,P_X,re_I,im_I");
        assert_eq!(lines[1].split(',').count(), 6);
    }

    #[test]
    fn netlist_and_closed_form_presets_agree_through_the_runner() {
        let closed = presets::find("fig9a").unwrap();
        let data = compute(&closed.scenario, Some(41)).unwrap();
        // run the same circuit through the netlist path
        let p = match closed.oracle {
            presets::OracleBinding::Loops { circuit, .. } => circuit,
            _ => unreachable!(),
        };
        let text = presets::three_loop_netlist(&p, &data.grid);
        let nscn = Scenario {
            model: ModelSpec::Netlist(crate::scenario::NetlistSpec {
                path: None,
                text: Some(text),
            }),
            sweep: None,
            analysis: Default::default(),
            reference: None,
            output: None,
        };
        let ndata = compute(&nscn, None).unwrap();
        for i in 0..41 {
            let a = data.spectrum.absorption()[i];
            let b = ndata.spectrum.absorption()[i];
            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn points_override_reshapes_a_netlist_sweep() {
        let p = presets::find("fig12a").unwrap();
        let data = compute(&p.scenario, Some(17)).unwrap();
        assert_eq!(data.spectrum.omegas().len(), 17);
    }
}
