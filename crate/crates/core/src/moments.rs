//! First and second moments of the system variables and the weighted
//! mean-square deviation `Δ(t) = E[(X(t) - X(0))^T Σ (X(t) - X(0))]`.
//!
//! The mean is propagated exactly through `e^{tA}` and `ψ(t) = ∫_0^t e^{sA} ds`.
//! The noise covariance `V(t)` solves `V̇ = AV + VA^T + Λ(μ(t))`, `V(0) = 0`,
//! and is integrated with classical fixed-step RK4 using the exact mean at the
//! stage times.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    exp_and_integral, frobenius, min_eig_hermitian, min_eig_symmetric, re, solve_lyapunov, spectral_abscissa,
    spectral_norm, sqrt_psd, to_complex, CMat, RMat, RVec,
};
use crate::model::{coefficients, lambda_dot0, lambda_matrix, CoefficientSet, LambdaMap, SystemParams};

/// Admissibility slack for the initial second-moment matrix.
pub const ADMISSIBILITY_TOLERANCE: f64 = 1e-10;

/// Spectral abscissa below which `A` counts as Hurwitz.
pub const HURWITZ_MARGIN: f64 = 1e-10;

/// Moments of `X(0)`: the mean, `Π = α + β·μ(0)` and `P = Re Π`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialMoments {
    mu0: RVec,
    p: RMat,
    pi: CMat,
}

impl InitialMoments {
    pub fn new(sys: &SystemParams, mu0: RVec) -> Result<Self> {
        if mu0.len() != sys.n() {
            return Err(Error::dims("initial mean", sys.n(), mu0.len()));
        }
        if mu0.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite initial mean".into()));
        }
        let pi = sys.sc().second_moment(&mu0)?;
        let min_eigenvalue = min_eig_hermitian(&pi);
        if min_eigenvalue < -ADMISSIBILITY_TOLERANCE {
            return Err(Error::InadmissibleMean { min_eigenvalue });
        }
        let p = re(&pi);
        Ok(Self { mu0, p, pi })
    }

    pub fn mu0(&self) -> &RVec {
        &self.mu0
    }

    pub fn p(&self) -> &RMat {
        &self.p
    }

    pub fn pi(&self) -> &CMat {
        &self.pi
    }
}

/// Weighting matrix `Σ = F^T F` with `F` of full row rank.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightingSpec {
    sigma: RMat,
    factor: RMat,
}

impl WeightingSpec {
    pub fn identity(n: usize) -> Self {
        Self {
            sigma: RMat::identity(n, n),
            factor: RMat::identity(n, n),
        }
    }

    pub fn from_sigma(sigma: RMat) -> Result<Self> {
        if !sigma.is_square() {
            return Err(Error::InvalidWeighting("Sigma must be square".into()));
        }
        let scale = sigma.amax().max(f64::MIN_POSITIVE);
        if (&sigma - sigma.transpose()).amax() > 1e-10 * scale {
            return Err(Error::InvalidWeighting("Sigma is not symmetric".into()));
        }
        let sym = (&sigma + sigma.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(*x));
        let lmin = eig.eigenvalues.iter().fold(f64::INFINITY, |a, x| a.min(*x));
        if lmin < -1e-10 * lmax.max(1.0) {
            return Err(Error::InvalidWeighting(format!("Sigma is not positive semi-definite (eigenvalue {lmin:.3e})")));
        }
        let keep: Vec<usize> = (0..sym.nrows())
            .filter(|&i| eig.eigenvalues[i] > 1e-12 * lmax)
            .collect();
        let n = sym.nrows();
        let mut factor = RMat::zeros(keep.len(), n);
        for (r, &i) in keep.iter().enumerate() {
            let row = eig.eigenvectors.column(i).transpose() * eig.eigenvalues[i].sqrt();
            factor.set_row(r, &row);
        }
        let defect = (factor.transpose() * &factor - &sym).amax();
        if defect > 1e-10 * scale {
            return Err(Error::InternalConsistency(format!("Sigma factorisation defect {defect:.3e}")));
        }
        Ok(Self { sigma: sym, factor })
    }

    pub fn from_factor(factor: RMat) -> Result<Self> {
        if factor.nrows() == 0 || factor.nrows() > factor.ncols() {
            return Err(Error::InvalidWeighting(format!(
                "F must have 1..=n rows, got {}x{}",
                factor.nrows(),
                factor.ncols()
            )));
        }
        let sv = factor.clone().svd(false, false).singular_values;
        let smax = sv.iter().fold(0.0f64, |a, x| a.max(*x));
        let smin = sv.iter().fold(f64::INFINITY, |a, x| a.min(*x));
        if smin <= 1e-12 * smax || smax == 0.0 {
            return Err(Error::InvalidWeighting("F does not have full row rank".into()));
        }
        Ok(Self {
            sigma: factor.transpose() * &factor,
            factor,
        })
    }

    pub fn sigma(&self) -> &RMat {
        &self.sigma
    }

    pub fn factor(&self) -> &RMat {
        &self.factor
    }

    pub fn rank(&self) -> usize {
        self.factor.nrows()
    }

    pub fn n(&self) -> usize {
        self.sigma.nrows()
    }

    /// `Σ ↦ c Σ`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            sigma: &self.sigma * c,
            factor: &self.factor * c.sqrt(),
        }
    }
}

/// Strictly increasing times starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.first() != Some(&0.0) {
            return Err(Error::InvalidGrid("grid must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid("grid must be strictly increasing and finite".into()));
        }
        Ok(Self(times))
    }

    pub fn uniform(t_end: f64, intervals: usize) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() || intervals == 0 {
            return Err(Error::InvalidGrid(format!("uniform grid needs t_end > 0 and intervals > 0, got {t_end}, {intervals}")));
        }
        Self::new((0..=intervals).map(|k| t_end * k as f64 / intervals as f64).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `ψ(t) = ∫_0^t e^{sA} ds`.
pub fn psi_matrix(a: &RMat, t: f64) -> Result<RMat> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("psi needs t >= 0, got {t}")));
    }
    Ok(exp_and_integral(a, t).1)
}

/// `μ(t) = e^{tA} μ(0) + ψ(t) b` on the grid.
pub fn mean_trajectory(coeffs: &CoefficientSet, init: &InitialMoments, grid: &TimeGrid) -> Vec<RVec> {
    grid.times()
        .iter()
        .map(|&t| {
            let (e, psi) = exp_and_integral(&coeffs.a, t);
            e * init.mu0() + psi * &coeffs.b
        })
        .collect()
}

pub fn is_hurwitz(a: &RMat) -> bool {
    spectral_abscissa(a) < -HURWITZ_MARGIN
}

/// `μ∞ = -A^{-1} b` when `A` is Hurwitz.
pub fn mean_limit(coeffs: &CoefficientSet) -> Result<RVec> {
    let abscissa = spectral_abscissa(&coeffs.a);
    if !(abscissa < -HURWITZ_MARGIN) {
        return Err(Error::NotHurwitz { spectral_abscissa: abscissa });
    }
    coeffs
        .a
        .clone()
        .lu()
        .solve(&(-&coeffs.b))
        .ok_or_else(|| Error::InternalConsistency("Hurwitz matrix reported singular".into()))
}

/// Largest internal RK4 step for a drift matrix `A`.
pub fn max_internal_step(a: &RMat) -> f64 {
    0.01 / spectral_norm(a).max(1.0)
}

/// Snapshot of the propagated moments at time `t`.
#[derive(Debug, Clone)]
pub struct MomentState {
    pub t: f64,
    /// `e^{tA}`.
    pub phi: RMat,
    /// `ψ(t)`.
    pub psi: RMat,
    /// `V(t)`.
    pub v: CMat,
}

#[derive(Debug, Clone)]
struct StepCache {
    h: f64,
    e_full: RMat,
    psi_full: RMat,
    e_half: RMat,
    psi_half: RMat,
}

/// Fixed-step propagator of `(e^{tA}, ψ(t), V(t))`.
#[derive(Debug, Clone)]
pub struct MomentIntegrator {
    a: RMat,
    a_c: CMat,
    a_ct: CMat,
    b: RVec,
    mu0: RVec,
    lambda: LambdaMap,
    state: MomentState,
    cache: Option<StepCache>,
}

impl MomentIntegrator {
    pub fn new(sys: &SystemParams, coeffs: &CoefficientSet, init: &InitialMoments) -> Self {
        let n = sys.n();
        let a_c = to_complex(&coeffs.a);
        Self {
            a: coeffs.a.clone(),
            a_ct: a_c.transpose(),
            a_c,
            b: coeffs.b.clone(),
            mu0: init.mu0().clone(),
            lambda: LambdaMap::new(sys),
            state: MomentState {
                t: 0.0,
                phi: RMat::identity(n, n),
                psi: RMat::zeros(n, n),
                v: CMat::zeros(n, n),
            },
            cache: None,
        }
    }

    pub fn state(&self) -> &MomentState {
        &self.state
    }

    pub fn set_state(&mut self, state: MomentState) {
        self.state = state;
    }

    pub fn t(&self) -> f64 {
        self.state.t
    }

    pub fn mean(&self) -> RVec {
        mean_at(&self.state, &self.mu0, &self.b)
    }

    pub fn lambda_map(&self) -> &LambdaMap {
        &self.lambda
    }

    fn rhs(&self, v: &CMat, lambda: &CMat) -> CMat {
        &self.a_c * v + v * &self.a_ct + lambda
    }

    fn cached(&mut self, h: f64) -> StepCache {
        match &self.cache {
            Some(c) if c.h == h => c.clone(),
            _ => {
                let (e_full, psi_full) = exp_and_integral(&self.a, h);
                let (e_half, psi_half) = exp_and_integral(&self.a, 0.5 * h);
                let c = StepCache {
                    h,
                    e_full,
                    psi_full,
                    e_half,
                    psi_half,
                };
                // Keep the first step length: later odd-sized steps (bisection
                // probes, ragged grid ends) should not evict it.
                if self.cache.is_none() {
                    self.cache = Some(c.clone());
                }
                c
            }
        }
    }

    /// One RK4 step of length `h > 0`.
    pub fn step(&mut self, h: f64) {
        let c = self.cached(h);
        let mu = self.mean();
        let mu_half = &c.e_half * &mu + &c.psi_half * &self.b;
        let mu_full = &c.e_full * &mu + &c.psi_full * &self.b;
        let l0 = self.lambda.eval(&mu);
        let lh = self.lambda.eval(&mu_half);
        let l1 = self.lambda.eval(&mu_full);
        let v = &self.state.v;
        let hc = Complex64::new(h, 0.0);
        let half = Complex64::new(0.5 * h, 0.0);
        let k1 = self.rhs(v, &l0);
        let k2 = self.rhs(&(v + &k1 * half), &lh);
        let k3 = self.rhs(&(v + &k2 * half), &lh);
        let k4 = self.rhs(&(v + &k3 * hc), &l1);
        let incr = (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
        let v_new = v + incr;
        self.state.v = (&v_new + v_new.adjoint()) * Complex64::new(0.5, 0.0);
        self.state.psi += &self.state.phi * &c.psi_full;
        self.state.phi = &c.e_full * &self.state.phi;
        self.state.t += h;
    }

    /// Advances by `dt` using equal substeps no longer than `max_step`.
    pub fn advance(&mut self, dt: f64, max_step: f64) {
        if dt <= 0.0 {
            return;
        }
        let k = (dt / max_step).ceil().max(1.0) as usize;
        let h = dt / k as f64;
        for _ in 0..k {
            self.step(h);
        }
    }
}

fn mean_at(state: &MomentState, mu0: &RVec, b: &RVec) -> RVec {
    &state.phi * mu0 + &state.psi * b
}

/// Evaluates `Δ(t)` from a propagated state:
/// `‖F(e^{tA} - I)√P‖² + 2 b^T ψ^T Σ (e^{tA} - I) μ(0) + |F ψ b|² + <Σ, Re V>`.
#[derive(Debug, Clone)]
pub struct DeviationFunctional {
    sigma: RMat,
    factor: RMat,
    sqrt_p: RMat,
    mu0: RVec,
    b: RVec,
    reference: f64,
}

impl DeviationFunctional {
    pub fn new(coeffs: &CoefficientSet, init: &InitialMoments, weights: &WeightingSpec) -> Result<Self> {
        let n = init.mu0().len();
        if weights.n() != n {
            return Err(Error::dims("weighting", n, weights.n()));
        }
        let sqrt_p = sqrt_psd(init.p());
        let fp = weights.factor() * &sqrt_p;
        Ok(Self {
            sigma: weights.sigma().clone(),
            factor: weights.factor().clone(),
            sqrt_p,
            mu0: init.mu0().clone(),
            b: coeffs.b.clone(),
            reference: fp.norm_squared(),
        })
    }

    /// `‖F √P‖² = <Σ, P>`.
    pub fn reference(&self) -> f64 {
        self.reference
    }

    /// Magnitude below which negative values are treated as roundoff.
    pub fn clip_tolerance(&self) -> f64 {
        1e-10 * self.reference.max(1.0)
    }

    pub fn raw(&self, state: &MomentState) -> f64 {
        let n = self.mu0.len();
        let dphi = &state.phi - RMat::identity(n, n);
        let t1 = (&self.factor * &dphi * &self.sqrt_p).norm_squared();
        let psi_b = &state.psi * &self.b;
        let t2 = 2.0 * psi_b.dot(&(&self.sigma * &dphi * &self.mu0));
        let t3 = (&self.factor * &psi_b).norm_squared();
        let t4 = frobenius(&self.sigma, &re(&state.v));
        t1 + t2 + t3 + t4
    }

    /// `Δ` with roundoff-level negatives clipped to zero.
    pub fn eval(&self, state: &MomentState) -> Result<f64> {
        let d = self.raw(state);
        if d < -self.clip_tolerance() {
            return Err(Error::InternalConsistency(format!(
                "mean-square deviation {d:.3e} at t = {} is negative",
                state.t
            )));
        }
        Ok(d.max(0.0))
    }
}

#[derive(Debug, Clone)]
pub struct MomentTrajectory {
    pub grid: TimeGrid,
    pub mu: Vec<RVec>,
    pub v: Vec<CMat>,
    pub delta: Vec<f64>,
}

fn integrate(
    sys: &SystemParams,
    init: &InitialMoments,
    grid: &TimeGrid,
    mut visit: impl FnMut(&MomentIntegrator) -> Result<()>,
) -> Result<()> {
    check_init(sys, init)?;
    let coeffs = coefficients(sys);
    let hmax = max_internal_step(&coeffs.a);
    let mut integ = MomentIntegrator::new(sys, &coeffs, init);
    visit(&integ)?;
    for w in grid.times().windows(2) {
        integ.advance(w[1] - w[0], hmax);
        // Pin the clock to the grid node to avoid drift from summed steps.
        integ.state.t = w[1];
        visit(&integ)?;
    }
    Ok(())
}

fn check_init(sys: &SystemParams, init: &InitialMoments) -> Result<()> {
    if init.mu0().len() != sys.n() {
        return Err(Error::dims("initial mean", sys.n(), init.mu0().len()));
    }
    Ok(())
}

/// Mean, noise covariance and mean-square deviation on the grid.
pub fn simulate(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec, grid: &TimeGrid) -> Result<MomentTrajectory> {
    let coeffs = coefficients(sys);
    let dev = DeviationFunctional::new(&coeffs, init, weights)?;
    let mut mu = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    let mut delta = Vec::with_capacity(grid.len());
    integrate(sys, init, grid, |integ| {
        mu.push(integ.mean());
        v.push(integ.state().v.clone());
        delta.push(dev.eval(integ.state())?);
        Ok(())
    })?;
    Ok(MomentTrajectory {
        grid: grid.clone(),
        mu,
        v,
        delta,
    })
}

/// `V(t_k)` by RK4 integration of the Lyapunov ODE.
pub fn second_moment_v(sys: &SystemParams, init: &InitialMoments, grid: &TimeGrid) -> Result<Vec<CMat>> {
    let mut out = Vec::with_capacity(grid.len());
    integrate(sys, init, grid, |integ| {
        out.push(integ.state().v.clone());
        Ok(())
    })?;
    Ok(out)
}

/// `Δ(t_k)` on the grid.
pub fn deviation_delta(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec, grid: &TimeGrid) -> Result<Vec<f64>> {
    Ok(simulate(sys, init, weights, grid)?.delta)
}

/// `(Δ̇(0), Δ̈(0))`.
pub fn delta_derivatives0(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec) -> Result<(f64, f64)> {
    check_init(sys, init)?;
    let coeffs = coefficients(sys);
    delta_derivatives0_with(sys, &coeffs, init, weights)
}

pub(crate) fn delta_derivatives0_with(
    sys: &SystemParams,
    coeffs: &CoefficientSet,
    init: &InitialMoments,
    weights: &WeightingSpec,
) -> Result<(f64, f64)> {
    let sigma = weights.sigma();
    let a = &coeffs.a;
    let b = &coeffs.b;
    let mu0 = init.mu0();
    let re_l0 = re(&lambda_matrix(sys, mu0)?);
    let re_ld = re(&lambda_dot0(sys, coeffs, mu0)?);
    let first = frobenius(sigma, &re_l0);
    let inner = a * init.p() * a.transpose() * 2.0 + a * (&re_l0 + mu0 * b.transpose() * 2.0) * 2.0 + re_ld;
    let second = frobenius(sigma, &inner) + 2.0 * (weights.factor() * b).norm_squared();
    Ok((first, second))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub mu_inf: RVec,
    pub lambda_inf: CMat,
    pub p_inf: RMat,
    pub delta_inf: f64,
}

/// Limits as `t → ∞` for Hurwitz `A`: `μ∞`, `Λ∞`, the Gramian `P∞` solving
/// `A P∞ + P∞ A^T + Re Λ∞ = 0`, and `Δ∞`.
pub fn steady_state(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec) -> Result<SteadyState> {
    check_init(sys, init)?;
    let coeffs = coefficients(sys);
    let mu_inf = mean_limit(&coeffs)?;
    let lambda_inf = lambda_matrix(sys, &mu_inf)?;
    let p_inf = solve_lyapunov(&coeffs.a, &re(&lambda_inf))?;
    let sigma = weights.sigma();
    let delta_inf = frobenius(sigma, init.p()) - 2.0 * mu_inf.dot(&(sigma * init.mu0()))
        + (weights.factor() * &mu_inf).norm_squared()
        + frobenius(sigma, &p_inf);
    Ok(SteadyState {
        mu_inf,
        lambda_inf,
        p_inf,
        delta_inf,
    })
}

/// Smallest eigenvalue of `Re V` (diagnostic for trajectories).
pub fn min_eig_re(v: &CMat) -> f64 {
    min_eig_symmetric(&re(v))
}
