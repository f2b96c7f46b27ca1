//! Energy vector that maximises the approximate decoherence time, compared
//! with a few alternatives.

use qmemtime::algebra::pauli_structure;
use qmemtime::decoherence::TauOptions;
use qmemtime::energy::{gradient_check, suboptimal_tau_report};
use qmemtime::linalg::{RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::moments::{InitialMoments, WeightingSpec};

fn main() -> qmemtime::Result<()> {
    let m = RMat::from_row_slice(2, 3, &[0.8, 0.1, 0.0, 0.0, 0.5, 0.3]);
    let sys = SystemParams::new(pauli_structure(), RVec::zeros(3), m, RVec::from_column_slice(&[0.1, 0.0]))?;
    let init = InitialMoments::new(&sys, RVec::from_column_slice(&[0.3, 0.2, 0.5]))?;
    let w = WeightingSpec::identity(3);
    let comparisons = [RVec::zeros(3), RVec::from_column_slice(&[0.0, 0.0, 1.0]), RVec::from_column_slice(&[1.0, 1.0, 0.0])];
    let report = suboptimal_tau_report(&sys, &init, &w, 0.05, &comparisons, &TauOptions::default())?;
    println!("{report}");
    let check = gradient_check(&sys, &init, &w, &report.optimum.e_star)?;
    println!("gradient check relative error {:.3e}", check.relative_error);
    Ok(())
}
