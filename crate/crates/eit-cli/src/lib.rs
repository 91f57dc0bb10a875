//! Command-line front end: scenario files, figure presets, sweep
//! execution, dip analysis, and data export.

pub mod presets;
pub mod runner;
pub mod scenario;
pub mod verify;

use thiserror::Error;

/// Failures grouped by exit code: 1 bad input, 2 numerics, 3 I/O.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<mech_core::MechError> for CliError {
    fn from(e: mech_core::MechError) -> Self {
        match e {
            mech_core::MechError::Pole { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<rlc_analytic::RlcError> for CliError {
    fn from(e: rlc_analytic::RlcError) -> Self {
        match e {
            rlc_analytic::RlcError::ReflectedPole { .. }
            | rlc_analytic::RlcError::DegenerateImpedance
            | rlc_analytic::RlcError::NonPositiveOmega(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<netlist_mna::NetlistError> for CliError {
    fn from(e: netlist_mna::NetlistError) -> Self {
        match e {
            netlist_mna::NetlistError::Singular { .. }
            | netlist_mna::NetlistError::NonPositiveOmega(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<sweep_analysis::AnalysisError> for CliError {
    fn from(e: sweep_analysis::AnalysisError) -> Self {
        match e {
            sweep_analysis::AnalysisError::InvalidSpectrum(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<time_domain::TimeDomainError> for CliError {
    fn from(e: time_domain::TimeDomainError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
