//! Decoherence time of the damped qubit against its quadratic approximation.

use qmemtime::algebra::pauli_structure;
use qmemtime::decoherence::{decoherence_time, tau_expansion, tau_hat, TauOptions};
use qmemtime::linalg::{RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::moments::{InitialMoments, WeightingSpec};

fn main() -> qmemtime::Result<()> {
    let m = RMat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let sys = SystemParams::new(pauli_structure(), RVec::zeros(3), m, RVec::zeros(2))?;
    let init = InitialMoments::new(&sys, RVec::zeros(3))?;
    let w = WeightingSpec::identity(3);
    let exp = tau_expansion(&sys, &init, &w)?;
    println!("tau'(0) = {}, tau''(0) = {}", exp.tau_prime0, exp.tau_second0);
    for eps in [1e-3, 1e-2, 1e-1, 1.0, 2.5] {
        let tau = decoherence_time(&sys, &init, &w, eps, &TauOptions::default())?;
        println!("{tau}    tau_hat = {:.12e}", tau_hat(&exp, eps));
    }
    Ok(())
}
