//! Per-element complex power and the conservation checks built on it.

use crate::mna::branch_admittance;
use crate::{AcSolution, ElementKind, Netlist};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ElementPower {
    pub name: String,
    pub kind: ElementKind,
    /// S = conj(V) I with amplitude phasors. Passive elements report
    /// absorbed power; the source row reports power delivered to the
    /// circuit, so it equals the sum of the passive rows.
    pub power: Complex64,
}

impl ElementPower {
    pub fn dissipated(&self) -> f64 {
        self.power.re
    }
    pub fn reactive(&self) -> f64 {
        self.power.im
    }
}

pub fn element_power(sol: &AcSolution, nl: &Netlist) -> Vec<ElementPower> {
    nl.elements
        .iter()
        .map(|e| {
            let v = sol.voltage(e.node_a) - sol.voltage(e.node_b);
            let i = match e.kind {
                ElementKind::Vsrc => sol.source_current,
                _ => branch_admittance(e, sol.omega) * v,
            };
            ElementPower {
                name: e.name.clone(),
                kind: e.kind,
                power: v.conj() * i,
            }
        })
        .collect()
}

/// Relative gap between delivered source power and the total absorbed
/// by the passive elements.
pub fn tellegen_gap(sol: &AcSolution, nl: &Netlist) -> f64 {
    let powers = element_power(sol, nl);
    let mut src = Complex64::ZERO;
    let mut load = Complex64::ZERO;
    for p in &powers {
        if p.kind == ElementKind::Vsrc {
            src += p.power;
        } else {
            load += p.power;
        }
    }
    (src - load).norm() / src.norm().max(load.norm()).max(1e-30)
}

/// Worst node current residual relative to the largest branch current.
pub fn kcl_residual(sol: &AcSolution, nl: &Netlist) -> f64 {
    let mut max_branch: f64 = 0.0;
    let mut residual: std::collections::BTreeMap<usize, Complex64> = Default::default();
    for e in &nl.elements {
        let i = match e.kind {
            ElementKind::Vsrc => -sol.source_current,
            _ => {
                let v = sol.voltage(e.node_a) - sol.voltage(e.node_b);
                branch_admittance(e, sol.omega) * v
            }
        };
        max_branch = max_branch.max(i.norm());
        // current i leaves node_a and enters node_b
        if e.node_a != 0 {
            *residual.entry(e.node_a).or_default() += i;
        }
        if e.node_b != 0 {
            *residual.entry(e.node_b).or_default() -= i;
        }
    }
    let worst = residual.values().map(|r| r.norm()).fold(0.0, f64::max);
    worst / max_branch.max(1e-30)
}
