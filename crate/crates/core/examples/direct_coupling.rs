//! Optimal direct energy coupling between two qubits for fixed individual
//! energies.

use qmemtime::algebra::pauli_structure;
use qmemtime::energy::default_tolerance;
use qmemtime::interconnect::{compose_qubits, optimal_direct_coupling, partition_rk};
use qmemtime::linalg::{RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::moments::WeightingSpec;

fn main() -> qmemtime::Result<()> {
    let m1 = RMat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let m2 = RMat::from_row_slice(2, 3, &[0.5, 0.0, 0.2, 0.0, 0.7, 0.0]);
    let e1 = RVec::from_column_slice(&[0.0, 0.0, 1.0]);
    let e2 = RVec::from_column_slice(&[0.2, 0.0, 0.5]);
    let q1 = SystemParams::new(pauli_structure(), e1.clone(), m1, RVec::zeros(2))?;
    let q2 = SystemParams::new(pauli_structure(), e2.clone(), m2, RVec::zeros(2))?;
    let comp = compose_qubits(&q1, &q2, &RVec::zeros(9))?;
    let init = comp.product_initial_moments(&RVec::from_column_slice(&[0.0, 0.3, 0.5]), &RVec::from_column_slice(&[0.4, 0.0, 0.0]))?;
    let blocks = partition_rk(&comp, &init, &WeightingSpec::identity(comp.n()))?;
    let opt = optimal_direct_coupling(&blocks, &e1, &e2, default_tolerance(&blocks.r12))?;
    println!("{opt}");
    Ok(())
}
