//! Structure constants of the qubit, fitted from the Pauli matrices and checked
//! against the matrices, plus the cross-product form of the CCR array.

use qmemtime::linalg::RVec;
use qmemtime::oracle::{check_algebra, fit_structure_constants, qubit_representation};

fn main() -> qmemtime::Result<()> {
    let rep = qubit_representation();
    let sc = fit_structure_constants(&rep)?;
    println!("alpha = {}", sc.alpha());
    for l in 0..3 {
        println!("theta section {} = {}", l + 1, sc.theta().section(l));
    }
    println!("{}", check_algebra(&rep, &sc, 1e-12)?);

    let u = RVec::from_column_slice(&[1.0, 2.0, 0.5]);
    let v = RVec::from_column_slice(&[-0.3, 0.0, 1.0]);
    let w = sc.theta().diamond(&u)? * &v;
    println!("(theta <> u) v = {}", w.transpose());
    Ok(())
}
