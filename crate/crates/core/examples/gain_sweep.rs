//! Decoherence time over a range of coupling strengths, computed in parallel.

use qmemtime::algebra::pauli_structure;
use qmemtime::decoherence::{decoherence_time, tau_expansion, tau_hat, TauOptions};
use qmemtime::linalg::{RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::moments::{InitialMoments, WeightingSpec};
use rayon::prelude::*;

fn main() -> qmemtime::Result<()> {
    let m = RMat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let base = SystemParams::new(pauli_structure(), RVec::from_column_slice(&[0.0, 0.0, 1.0]), m, RVec::zeros(2))?;
    let init = InitialMoments::new(&base, RVec::from_column_slice(&[0.5, 0.0, 0.0]))?;
    let w = WeightingSpec::identity(3);
    let eps = 0.05;
    let gains: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
    let rows: Vec<qmemtime::Result<(f64, f64, f64)>> = gains
        .par_iter()
        .map(|&g| {
            let sys = base.with_coupling(base.coupling_gain() * g, base.coupling_offset().clone())?;
            let tau = decoherence_time(&sys, &init, &w, eps, &TauOptions::default())?;
            let approx = tau_hat(&tau_expansion(&sys, &init, &w)?, eps);
            Ok((g, tau.finite().unwrap_or(f64::INFINITY), approx))
        })
        .collect();
    println!("{:>6} {:>14} {:>14}", "gain", "tau", "tau_hat");
    for row in rows {
        let (g, tau, approx) = row?;
        println!("{g:>6.2} {tau:>14.6e} {approx:>14.6e}");
    }
    Ok(())
}
