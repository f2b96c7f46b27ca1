//! Drift, forcing and averaged diffusion of a damped qubit.

use qmemtime::algebra::pauli_structure;
use qmemtime::linalg::{re, RMat, RVec};
use qmemtime::model::{coefficients, lambda_matrix, SystemParams};

fn main() -> qmemtime::Result<()> {
    let m = RMat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let sys = SystemParams::new(pauli_structure(), RVec::from_column_slice(&[0.0, 0.0, 1.0]), m, RVec::zeros(2))?;
    let co = coefficients(&sys);
    println!("A0 (isolated) = {}", co.a0);
    println!("A = {}", co.a);
    println!("b = {}", co.b.transpose());
    let mu = RVec::from_column_slice(&[0.0, 0.0, 0.5]);
    println!("Re Lambda(mu) = {}", re(&lambda_matrix(&sys, &mu)?));
    Ok(())
}
