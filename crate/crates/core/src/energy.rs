//! Energy vector maximising the quadratic approximation `τ̂(ε)` of the
//! decoherence time. `Δ̈(0)` is a convex quadratic in `E` with gradient
//! `8(2RE + K)` and Hessian `16R`, so the optimum solves `2RE + K = 0`.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{mho_sandwich_real, mho_transpose_col};
use crate::decoherence::{decoherence_time, tau_expansion, tau_hat, DecoherenceTime, TauOptions};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, re, solve_stationary, RMat, RVec};
use crate::model::{coefficients, lambda_matrix, SystemParams};
use crate::moments::{delta_derivatives0, InitialMoments, WeightingSpec};

/// Auxiliary matrix `R` and vector `K` of the stationarity equation.
pub fn rk_matrices(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec) -> Result<(RMat, RVec)> {
    let n = sys.n();
    if init.mu0().len() != n {
        return Err(Error::dims("initial mean", n, init.mu0().len()));
    }
    if weights.n() != n {
        return Err(Error::dims("weighting", n, weights.n()));
    }
    let sc = sys.sc();
    let theta = sc.theta();
    let sigma = weights.sigma();
    let p = init.p();
    let mu0 = init.mu0();

    let r = mho_sandwich_real(theta, p, sigma);
    let r = (&r + r.transpose()) * 0.5;

    let coeffs = coefficients(sys);
    let re_l0 = re(&lambda_matrix(sys, mu0)?);
    let s = sigma * (&coeffs.a_tilde * p + re_l0 * 0.5 + &coeffs.b * mu0.transpose());
    let mut k = mho_transpose_col(theta, &s);

    // Second term: Frobenius pairings of ℧Σ℧^T with Re((β·(Θ·μ0)_{•k}) ⊗ G).
    if mu0.iter().any(|x| *x != 0.0) {
        let mho = &coeffs.mho;
        let w = mho * sigma * mho.transpose();
        let g = sys.noise_gram();
        let theta_mu = theta.dot(mu0)?;
        for kk in 0..n {
            let v = theta_mu.column(kk).map(|x| Complex64::new(x, 0.0));
            let bv = sc.beta().dot(&v)?;
            k[kk] += frobenius(&w, &re(&bv.kronecker(&g)));
        }
    }
    Ok((r, k))
}

/// Default eigenvalue threshold `1e-10 · tr(R) / n`.
pub fn default_tolerance(r: &RMat) -> f64 {
    1e-10 * r.trace().max(0.0) / r.nrows().max(1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityData {
    pub r: RMat,
    pub k: RVec,
    /// Minimum-norm solution of `2RE + K = 0`.
    pub e_star: RVec,
    /// Dimension of the null space of `R`; zero means `e_star` is unique.
    pub null_dim: usize,
    pub residual: f64,
    pub zero_energy_optimal: bool,
    pub tol: f64,
}

impl OptimalityData {
    pub fn is_unique(&self) -> bool {
        self.null_dim == 0
    }
}

impl fmt::Display for OptimalityData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "R =")?;
        for i in 0..self.r.nrows() {
            writeln!(f, "  {}", fmt_row(self.r.row(i).iter()))?;
        }
        writeln!(f, "K = [{}]", fmt_row(self.k.iter()))?;
        let kind = if self.is_unique() {
            "unique".to_string()
        } else {
            format!("nonunique, null dim {}", self.null_dim)
        };
        writeln!(f, "E_star = [{}] ({kind})", fmt_row(self.e_star.iter()))?;
        writeln!(f, "residual = {:.6e}", self.residual)?;
        write!(f, "zero_energy_optimal = {}", self.zero_energy_optimal)
    }
}

pub(crate) fn fmt_row<'a>(xs: impl Iterator<Item = &'a f64>) -> String {
    xs.map(|x| format!("{:.16e}", x + 0.0)).collect::<Vec<_>>().join(", ")
}

/// Solves `2RE + K = 0`. Singular `R` yields the minimum-norm solution when
/// `K ∈ range(R)` and an error otherwise.
pub fn optimal_energy(r: &RMat, k: &RVec, tol: f64) -> Result<OptimalityData> {
    let sol = solve_stationary(r, k, tol)?;
    if sol.min_eigenvalue < -tol.max(1e-10 * r.amax()) {
        return Err(Error::InvalidArgument(format!(
            "R is not positive semi-definite (eigenvalue {:.3e})",
            sol.min_eigenvalue
        )));
    }
    if sol.residual > tol.max(f64::EPSILON) * k.norm().max(1.0) {
        return Err(Error::InfeasibleStationarity { residual: sol.residual });
    }
    Ok(OptimalityData {
        r: r.clone(),
        k: k.clone(),
        e_star: sol.x,
        null_dim: sol.null_dim,
        residual: sol.residual,
        zero_energy_optimal: k.amax() <= tol.max(f64::EPSILON),
        tol,
    })
}

/// Builds `(R, K)` and solves for the optimal energy with the default threshold.
pub fn optimize_energy(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec) -> Result<OptimalityData> {
    let (r, k) = rk_matrices(sys, init, weights)?;
    optimal_energy(&r, &k, default_tolerance(&r))
}

/// `Δ̈(0)` as a function of the energy vector, other parameters fixed.
pub fn delta_ddot0_at(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec, energy: &RVec) -> Result<f64> {
    Ok(delta_derivatives0(&sys.with_energy(energy.clone())?, init, weights)?.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    pub analytic: RVec,
    pub finite_difference: RVec,
    pub step: f64,
    pub max_deviation: f64,
    /// `max_deviation / max(‖analytic‖∞, 1)`.
    pub relative_error: f64,
}

/// Compares `8(2RE + K)` with central differences of `Δ̈(0)` at `e_probe`.
pub fn gradient_check(
    sys: &SystemParams,
    init: &InitialMoments,
    weights: &WeightingSpec,
    e_probe: &RVec,
) -> Result<GradientReport> {
    let n = sys.n();
    if e_probe.len() != n {
        return Err(Error::dims("probe energy", n, e_probe.len()));
    }
    let (r, k) = rk_matrices(sys, init, weights)?;
    let analytic = (&r * e_probe * 2.0 + &k) * 8.0;
    let step = 1e-5 * (1.0 + e_probe.amax());
    let mut fd = RVec::zeros(n);
    for i in 0..n {
        let mut ep = e_probe.clone();
        let mut em = e_probe.clone();
        ep[i] += step;
        em[i] -= step;
        let dp = delta_ddot0_at(sys, init, weights, &ep)?;
        let dm = delta_ddot0_at(sys, init, weights, &em)?;
        fd[i] = (dp - dm) / (2.0 * step);
    }
    let max_deviation = (&fd - &analytic).amax();
    Ok(GradientReport {
        relative_error: max_deviation / analytic.amax().max(1.0),
        analytic,
        finite_difference: fd,
        step,
        max_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyComparison {
    pub label: String,
    pub energy: RVec,
    pub delta_ddot0: f64,
    pub tau_hat: f64,
    /// `None` when the crossing search is inconclusive.
    pub tau: Option<DecoherenceTime>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuboptimalityReport {
    pub epsilon: f64,
    pub optimum: OptimalityData,
    /// First entry is `E_star`, followed by the comparisons in input order.
    pub rows: Vec<EnergyComparison>,
    /// `τ̂(ε; E_star) ≥ τ̂(ε; E)` for every comparison.
    pub tau_hat_maximal: bool,
}

impl fmt::Display for SuboptimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.optimum)?;
        writeln!(f, "epsilon = {}", self.epsilon)?;
        for row in &self.rows {
            let tau = match &row.tau {
                Some(t) => match t.finite() {
                    Some(v) => format!("{v:.12e}"),
                    None => "inf".into(),
                },
                None => "inconclusive".into(),
            };
            writeln!(
                f,
                "{:>10}  E = [{}]  Delta_ddot0 = {:.12e}  tau_hat = {:.12e}  tau = {tau}",
                row.label,
                fmt_row(row.energy.iter()),
                row.delta_ddot0,
                row.tau_hat
            )?;
        }
        write!(f, "tau_hat maximal at E_star: {}", self.tau_hat_maximal)
    }
}

/// Evaluates `τ̂(ε)` and `τ(ε)` at the optimal energy and at each comparison.
pub fn suboptimal_tau_report(
    sys: &SystemParams,
    init: &InitialMoments,
    weights: &WeightingSpec,
    epsilon: f64,
    comparisons: &[RVec],
    opts: &TauOptions,
) -> Result<SuboptimalityReport> {
    let optimum = optimize_energy(sys, init, weights)?;
    let mut energies = vec![("E_star".to_string(), optimum.e_star.clone())];
    for (i, e) in comparisons.iter().enumerate() {
        if e.len() != sys.n() {
            return Err(Error::dims("comparison energy", sys.n(), e.len()));
        }
        energies.push((format!("E[{i}]"), e.clone()));
    }
    let mut rows = Vec::with_capacity(energies.len());
    for (label, energy) in energies {
        let s = sys.with_energy(energy.clone())?;
        let exp = tau_expansion(&s, init, weights)?;
        let tau = match decoherence_time(&s, init, weights, epsilon, opts) {
            Ok(t) => Some(t),
            Err(Error::Inconclusive { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push(EnergyComparison {
            label,
            energy,
            delta_ddot0: exp.delta_ddot0,
            tau_hat: tau_hat(&exp, epsilon),
            tau,
        });
    }
    let best = rows[0].tau_hat;
    let slack = 1e-12 * best.abs().max(1e-300);
    let tau_hat_maximal = rows[1..].iter().all(|r| r.tau_hat <= best + slack);
    Ok(SuboptimalityReport {
        epsilon,
        optimum,
        rows,
        tau_hat_maximal,
    })
}
