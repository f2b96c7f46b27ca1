//! Mean, noise covariance and mean-square deviation of a driven, damped qubit,
//! together with their limits.

use qmemtime::algebra::pauli_structure;
use qmemtime::linalg::{RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::moments::{simulate, steady_state, InitialMoments, TimeGrid, WeightingSpec};

fn main() -> qmemtime::Result<()> {
    let m = RMat::from_row_slice(2, 3, &[0.8, 0.0, 0.0, 0.0, 0.8, 0.0]);
    let sys = SystemParams::new(pauli_structure(), RVec::from_column_slice(&[0.5, 0.0, 1.0]), m, RVec::zeros(2))?;
    let init = InitialMoments::new(&sys, RVec::from_column_slice(&[0.6, 0.0, 0.0]))?;
    let w = WeightingSpec::identity(3);
    let traj = simulate(&sys, &init, &w, &TimeGrid::uniform(4.0, 8)?)?;
    println!("{:>6} {:>30} {:>10}", "t", "mu", "Delta");
    for (k, t) in traj.grid.times().iter().enumerate() {
        let mu = &traj.mu[k];
        println!("{t:>6.2} [{:>8.4} {:>8.4} {:>8.4}] {:>10.6}", mu[0], mu[1], mu[2], traj.delta[k]);
    }
    let ss = steady_state(&sys, &init, &w)?;
    println!("mu_inf = {}", ss.mu_inf.transpose());
    println!("Delta_inf = {:.6}", ss.delta_inf);
    Ok(())
}
