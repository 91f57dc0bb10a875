//! Frequency sweep: stamp and solve at every grid point, recording the
//! source current and the delivered complex power split.

use crate::{element_power, kcl_residual, solve, stamp, ElementKind, Netlist, NetlistError};
use num_complex::Complex64;
use sweep_analysis::{make_grid, AnalysisError, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct AcSweep {
    pub omegas: Vec<f64>,
    pub source_currents: Vec<Complex64>,
    /// Re of delivered power: dissipated in the resistances
    pub p_r: Vec<f64>,
    /// Im of delivered power: stored in the reactances
    pub p_x: Vec<f64>,
}

impl AcSweep {
    pub fn spectrum(&self) -> Result<Spectrum, AnalysisError> {
        Spectrum::new(self.omegas.clone(), self.p_r.clone(), self.p_x.clone())
    }
}

pub fn ac_sweep(nl: &Netlist) -> Result<AcSweep, NetlistError> {
    let sw = &nl.sweep;
    let grid = if sw.points == 1 {
        vec![sw.start]
    } else {
        make_grid(sw.start, sw.stop, sw.points, sw.scale).expect("directive validated at parse")
    };
    let mut out = AcSweep {
        omegas: grid.clone(),
        source_currents: Vec::with_capacity(grid.len()),
        p_r: Vec::with_capacity(grid.len()),
        p_x: Vec::with_capacity(grid.len()),
    };
    for &omega in &grid {
        let sol = solve(&stamp(nl, omega)?)?;
        debug_assert!(kcl_residual(&sol, nl) <= 1e-9, "KCL violated at omega {omega}");
        let delivered: Complex64 = element_power(&sol, nl)
            .iter()
            .filter(|p| p.kind == ElementKind::Vsrc)
            .map(|p| p.power)
            .sum();
        out.source_currents.push(sol.source_current);
        out.p_r.push(delivered.re);
        out.p_x.push(delivered.im);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_netlist;

    #[test]
    fn one_point_sweep_equals_single_solve() {
        let nl = parse_netlist("R1 1 0 50\nV1 1 0 AC 1\n.ac lin 1 1e5 1e5").unwrap();
        let sw = ac_sweep(&nl).unwrap();
        assert_eq!(sw.omegas, vec![1e5]);
        let sol = solve(&stamp(&nl, 1e5).unwrap()).unwrap();
        assert_eq!(sw.source_currents[0], sol.source_current);
        assert!((sw.p_r[0] - 0.02).abs() < 1e-15);
    }

    #[test]
    fn solve_errors_carry_the_offending_omega() {
        let nl = parse_netlist("R1 1 0 50\nR2 5 6 1\nV1 1 0 AC 1\n.ac lin 3 10 30").unwrap();
        match ac_sweep(&nl).unwrap_err() {
            NetlistError::Singular { omega, .. } => assert_eq!(omega, 10.0),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn sweep_output_feeds_the_dip_detector() {
        let nl = parse_netlist("R1 1 0 50\nV1 1 0 AC 1\n.ac lin 11 1e4 1e5").unwrap();
        let sw = ac_sweep(&nl).unwrap();
        let s = sw.spectrum().unwrap();
        assert_eq!(s.len(), 11);
        assert!(s.absorption().iter().all(|&p| (p - 0.02).abs() < 1e-15));
    }
}
