//! Scenario file schema. A scenario binds one model (closed-form modal,
//! closed-form loop algebra, or a netlist) to a frequency sweep and the
//! dip-analysis options.

use std::path::PathBuf;

use mech_core::ModalParams;
use rlc_analytic::{CircuitParams, Topology};
use serde::{Deserialize, Serialize};
use sweep_analysis::Scale;

use crate::CliError;

fn default_drive() -> f64 {
    1.0
}

pub const DEFAULT_PROMINENCE: f64 = 0.05;

fn default_prominence() -> f64 {
    DEFAULT_PROMINENCE
}

fn lin() -> Scale {
    Scale::Lin
}

/// Oscillator triple plus the drive acceleration amplitude.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MechSpec {
    #[serde(flatten)]
    pub modal: ModalParams,
    #[serde(default = "default_drive")]
    pub drive: f64,
}

/// Loop component values plus which circuit they describe.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RlcSpec {
    #[serde(flatten)]
    pub circuit: CircuitParams,
    pub topology: Topology,
}

/// Netlist source: a file path or the text itself (exactly one).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetlistSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", content = "parameters", rename_all = "kebab-case")]
pub enum ModelSpec {
    Mech(MechSpec),
    RlcAnalytic(RlcSpec),
    Netlist(NetlistSpec),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "lin")]
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default = "default_prominence")]
    pub prominence: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            prominence: DEFAULT_PROMINENCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub model: ModelSpec,
    /// Required for the closed-form models; for netlists it overrides
    /// the .ac directive when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    /// x-axis zero for the delta column; a model default applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, CliError> {
        let s: Scenario = serde_json::from_str(text)
            .map_err(|e| CliError::Invalid(format!("scenario parse: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match &self.model {
            ModelSpec::Mech(m) => {
                m.modal.validate()?;
                if !(m.drive > 0.0 && m.drive.is_finite()) {
                    return Err(CliError::Invalid("drive must be > 0 and finite".into()));
                }
                if self.sweep.is_none() {
                    return Err(CliError::Invalid(
                        "the mech model requires a sweep section".into(),
                    ));
                }
            }
            ModelSpec::RlcAnalytic(r) => {
                r.circuit.validate()?;
                if self.sweep.is_none() {
                    return Err(CliError::Invalid(
                        "the rlc-analytic model requires a sweep section".into(),
                    ));
                }
            }
            ModelSpec::Netlist(n) => match (&n.path, &n.text) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => {
                    return Err(CliError::Invalid(
                        "netlist parameters need exactly one of `path` or `text`".into(),
                    ));
                }
            },
        }
        if let Some(sw) = &self.sweep {
            validate_sweep(sw)?;
        }
        let p = self.analysis.prominence;
        if !(p > 0.0 && p < 1.0) {
            return Err(CliError::Invalid(format!(
                "prominence must lie in (0, 1), got {p}"
            )));
        }
        if let Some(r) = self.reference {
            if !r.is_finite() {
                return Err(CliError::Invalid("reference must be finite".into()));
            }
        }
        Ok(())
    }
}

pub fn validate_sweep(sw: &SweepSpec) -> Result<(), CliError> {
    if sw.points < 2 {
        return Err(CliError::Invalid("sweep needs at least 2 points".into()));
    }
    // full grid construction re-checks this; fail early with the same rules
    sweep_analysis::make_grid(sw.start, sw.stop, sw.points, sw.scale)?;
    Ok(())
}
