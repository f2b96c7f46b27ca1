//! Structure constants of two coupled qubits, with variables ordered as
//! (X1, X2, X1 ⊗ X2), fitted from their tensor-product representation.

use qmemtime::algebra::pauli_structure;
use qmemtime::interconnect::compose_qubits;
use qmemtime::linalg::{RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::oracle::check_algebra;

fn main() -> qmemtime::Result<()> {
    let m = RMat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let q1 = SystemParams::new(pauli_structure(), RVec::from_column_slice(&[0.0, 0.0, 1.0]), m.clone(), RVec::zeros(2))?;
    let q2 = SystemParams::new(pauli_structure(), RVec::from_column_slice(&[0.0, 0.0, 0.5]), m * 0.5, RVec::zeros(2))?;
    let mut e12 = RVec::zeros(9);
    e12[8] = 0.25; // Z ⊗ Z
    let comp = compose_qubits(&q1, &q2, &e12)?;

    println!("n = {} (blocks {:?}, {:?}, {:?})", comp.n(), comp.block1(), comp.block2(), comp.block12());
    println!("{}", check_algebra(comp.representation(), comp.joint().sc(), 1e-10)?);
    let alpha = comp.joint().sc().alpha();
    println!("alpha is the identity: {}", (alpha - RMat::identity(15, 15)).amax() < 1e-12);
    println!("joint coupling gain M = {}", comp.joint().coupling_gain());
    Ok(())
}
