//! Modified nodal analysis: admittance stamps plus one auxiliary
//! row/column per source, dense complex Gaussian elimination.

use crate::{Element, ElementKind, Netlist, NetlistError};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct MnaSystem {
    pub omega: f64,
    /// node count - 1 + source count
    pub dim: usize,
    pub matrix: Vec<Vec<Complex64>>,
    pub rhs: Vec<Complex64>,
    /// sorted non-ground node ids; unknown i < node_ids.len() is that node's voltage
    pub node_ids: Vec<usize>,
    /// human-readable name per unknown, used in singularity diagnostics
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcSolution {
    pub omega: f64,
    node_ids: Vec<usize>,
    node_voltages: Vec<Complex64>,
    /// current delivered by the source into its + node
    pub source_current: Complex64,
}

impl AcSolution {
    /// Voltage phasor at a node id; ground is 0 by definition.
    pub fn voltage(&self, node: usize) -> Complex64 {
        if node == 0 {
            return Complex64::ZERO;
        }
        match self.node_ids.binary_search(&node) {
            Ok(i) => self.node_voltages[i],
            Err(_) => panic!("node {node} not present in the solved netlist"),
        }
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }
}

/// Branch admittance under e^{-i omega t}: d/dt maps to -i omega, so a
/// capacitor admits I = -i omega C V and an inductor I = V i/(omega L).
/// The series R L C resonance test (purely real source current at
/// omega = 1/sqrt(LC)) pins these signs.
pub fn branch_admittance(e: &Element, omega: f64) -> Complex64 {
    match e.kind {
        ElementKind::R => Complex64::new(1.0 / e.value, 0.0),
        ElementKind::L => Complex64::new(0.0, 1.0 / (omega * e.value)),
        ElementKind::C => Complex64::new(0.0, -omega * e.value),
        ElementKind::Vsrc => unreachable!("sources are stamped via auxiliary rows"),
    }
}

pub fn stamp(nl: &Netlist, omega: f64) -> Result<MnaSystem, NetlistError> {
    if !(omega > 0.0) {
        return Err(NetlistError::NonPositiveOmega(omega));
    }
    let mut node_ids: Vec<usize> = nl
        .elements
        .iter()
        .flat_map(|e| [e.node_a, e.node_b])
        .filter(|&n| n != 0)
        .collect();
    node_ids.sort_unstable();
    node_ids.dedup();

    let sources: Vec<&Element> = nl
        .elements
        .iter()
        .filter(|e| e.kind == ElementKind::Vsrc)
        .collect();
    let dim = node_ids.len() + sources.len();
    let mut matrix = vec![vec![Complex64::ZERO; dim]; dim];
    let mut rhs = vec![Complex64::ZERO; dim];

    let idx = |node: usize| -> Option<usize> {
        if node == 0 {
            None
        } else {
            Some(node_ids.binary_search(&node).expect("collected above"))
        }
    };

    for e in &nl.elements {
        if e.kind == ElementKind::Vsrc {
            continue;
        }
        let y = branch_admittance(e, omega);
        let (ia, ib) = (idx(e.node_a), idx(e.node_b));
        if let Some(i) = ia {
            matrix[i][i] += y;
        }
        if let Some(i) = ib {
            matrix[i][i] += y;
        }
        if let (Some(i), Some(j)) = (ia, ib) {
            matrix[i][j] -= y;
            matrix[j][i] -= y;
        }
    }
    for (k, src) in sources.iter().enumerate() {
        let row = node_ids.len() + k;
        if let Some(i) = idx(src.node_a) {
            matrix[i][row] += Complex64::ONE;
            matrix[row][i] += Complex64::ONE;
        }
        if let Some(i) = idx(src.node_b) {
            matrix[i][row] -= Complex64::ONE;
            matrix[row][i] -= Complex64::ONE;
        }
        rhs[row] = Complex64::from_polar(src.value, src.phase);
    }

    let mut labels: Vec<String> = node_ids.iter().map(|n| format!("node {n}")).collect();
    labels.extend(sources.iter().map(|s| format!("current through {}", s.name)));

    Ok(MnaSystem {
        omega,
        dim,
        matrix,
        rhs,
        node_ids,
        labels,
    })
}

/// Gaussian elimination with partial pivoting on magnitude. A pivot is
/// declared singular when it falls below 1e-14 of its row's original
/// infinity norm (or the row was zero to begin with); the error names
/// the unknown that could not be determined.
pub fn solve(sys: &MnaSystem) -> Result<AcSolution, NetlistError> {
    let n = sys.dim;
    let mut a = sys.matrix.clone();
    let mut b = sys.rhs.clone();
    let mut scale: Vec<f64> = sys
        .matrix
        .iter()
        .map(|row| row.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();

    for k in 0..n {
        let (piv_row, piv_mag) = (k..n)
            .map(|i| (i, a[i][k].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("dim >= 1");
        if !(piv_mag > 1e-14 * scale[piv_row]) || scale[piv_row] == 0.0 {
            return Err(NetlistError::Singular {
                omega: sys.omega,
                pivot_index: k,
                location: sys.labels[k].clone(),
            });
        }
        a.swap(k, piv_row);
        b.swap(k, piv_row);
        scale.swap(k, piv_row);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == Complex64::ZERO {
                continue;
            }
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    let mut x = vec![Complex64::ZERO; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }

    // row residual check, the matrix-level form of KCL
    #[cfg(debug_assertions)]
    for i in 0..n {
        let mut lhs = Complex64::ZERO;
        let mut mag = 0.0;
        for j in 0..n {
            lhs += sys.matrix[i][j] * x[j];
            mag += (sys.matrix[i][j] * x[j]).norm();
        }
        debug_assert!(
            (lhs - sys.rhs[i]).norm() <= 1e-9 * mag.max(sys.rhs[i].norm()).max(1e-30),
            "row {i} residual {} exceeds bound",
            (lhs - sys.rhs[i]).norm()
        );
    }

    let m = sys.node_ids.len();
    Ok(AcSolution {
        omega: sys.omega,
        node_ids: sys.node_ids.clone(),
        node_voltages: x[..m].to_vec(),
        source_current: -x[m],
    })
}
