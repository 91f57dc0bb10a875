//! AC steady-state circuit solver. A small netlist language is parsed
//! into elements, stamped into a modified nodal analysis system at each
//! frequency, and solved for node voltages, source current, and
//! per-element power.
//!
//! Phasor convention is e^{-i omega t} throughout, with amplitude (not
//! RMS) phasors. Complex powers are therefore S = conj(V) I, which makes
//! inductive reactive power positive and keeps the delivered power equal
//! to the A, B loop algebra of the analytic solver.

mod mna;
mod parser;
mod power;
mod sweep;

pub use mna::{solve, stamp, AcSolution, MnaSystem};
pub use parser::{parse_netlist, serialize_netlist, Element, ElementKind, Netlist, SweepDirective};
pub use power::{element_power, kcl_residual, tellegen_gap, ElementPower};
pub use sweep::{ac_sweep, AcSweep};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetlistError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: duplicate element name {name}")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: non-positive value {value} for {name}")]
    NonPositiveValue { line: usize, name: String, value: f64 },
    #[error("netlist has no .ac sweep directive")]
    MissingSweep,
    #[error("line {line}: more than one source (first declared at line {first_line})")]
    MultipleSources { line: usize, first_line: usize },
    #[error("netlist has no voltage source")]
    NoSource,
    #[error("omega must be > 0, got {0}")]
    NonPositiveOmega(f64),
    #[error("singular circuit at omega = {omega} rad/s: pivot {pivot_index} ({location}) below threshold")]
    Singular {
        omega: f64,
        pivot_index: usize,
        location: String,
    },
}
