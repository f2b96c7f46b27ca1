//! Memory decoherence time `τ(ε) = inf{t ≥ 0 : Δ(t) > ε ‖F√P‖²}` and its
//! quadratic expansion in `ε`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_abscissa, spectral_norm};
use crate::model::{coefficients, LambdaMap, SystemParams};
use crate::moments::{
    delta_derivatives0_with, is_hurwitz, steady_state, DeviationFunctional, InitialMoments, MomentIntegrator,
    WeightingSpec,
};

/// `Δ̇(0)` at or below this is a violation of the positivity assumption.
pub const MIN_DELTA_DOT: f64 = 1e-14;

/// Marching and refinement controls. `None` fields resolve to defaults that
/// scale with `‖A‖₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauOptions {
    /// Marching step; default `1e-3 / max(1, ‖A‖₂)`.
    pub step: Option<f64>,
    /// Bisection tolerance on the crossing time; default `1e-9 / max(1, ‖A‖₂)`.
    pub tol: Option<f64>,
    /// Give up (inconclusive) beyond this time.
    pub horizon: f64,
    /// Settling multiple of `1 / |Re λ_max(A)|` before a steady-state certificate.
    pub settle: f64,
    /// Relative gap required between `Δ∞` and the threshold for a certificate.
    pub margin: f64,
}

impl Default for TauOptions {
    fn default() -> Self {
        Self {
            step: None,
            tol: None,
            horizon: 1e4,
            settle: 20.0,
            margin: 1e-6,
        }
    }
}

impl TauOptions {
    fn resolve(&self, a_norm: f64) -> Result<(f64, f64)> {
        let scale = 1.0 / a_norm.max(1.0);
        let step = self.step.unwrap_or(1e-3 * scale);
        let tol = self.tol.unwrap_or(1e-9 * scale);
        for (name, v) in [("step", step), ("tol", tol), ("horizon", self.horizon), ("settle", self.settle)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.margin) {
            return Err(Error::InvalidArgument(format!("margin must lie in [0, 1), got {}", self.margin)));
        }
        Ok((step, tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TauValue {
    /// First up-crossing, located inside `bracket` with
    /// `Δ(bracket.0) ≤ threshold < Δ(bracket.1)`.
    Finite { value: f64, bracket: (f64, f64) },
    /// The threshold is never exceeded.
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceTime {
    pub epsilon: f64,
    pub threshold: f64,
    pub value: TauValue,
    /// Largest `Δ` seen on the marching grid.
    pub sup_delta: f64,
    /// Time marched before the answer was settled.
    pub marched: f64,
}

impl DecoherenceTime {
    pub fn finite(&self) -> Option<f64> {
        match self.value {
            TauValue::Finite { value, .. } => Some(value),
            TauValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.value, TauValue::Infinite)
    }
}

impl fmt::Display for DecoherenceTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            TauValue::Finite { value, bracket } => write!(
                f,
                "tau({}) = {value:.12e} in [{:.12e}, {:.12e}]",
                self.epsilon, bracket.0, bracket.1
            ),
            TauValue::Infinite => write!(f, "tau({}) = inf", self.epsilon),
        }
    }
}

pub fn decoherence_time(
    sys: &SystemParams,
    init: &InitialMoments,
    weights: &WeightingSpec,
    epsilon: f64,
    opts: &TauOptions,
) -> Result<DecoherenceTime> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let coeffs = coefficients(sys);
    let dev = DeviationFunctional::new(&coeffs, init, weights)?;
    let reference = dev.reference();
    if reference <= 1e-14 {
        return Err(Error::TrivialWeighting { reference });
    }
    let threshold = epsilon * reference;
    let (step, tol) = opts.resolve(spectral_norm(&coeffs.a))?;

    // A static system (no drift, no forcing, no noise) keeps X(t) = X(0).
    let a_zero = coeffs.a.iter().all(|x| *x == 0.0);
    let b_zero = coeffs.b.iter().all(|x| *x == 0.0);
    if a_zero && b_zero && LambdaMap::new(sys).is_zero() {
        return Ok(DecoherenceTime {
            epsilon,
            threshold,
            value: TauValue::Infinite,
            sup_delta: 0.0,
            marched: 0.0,
        });
    }

    // Steady-state certificate: A Hurwitz and Δ∞ safely below the threshold.
    let certificate = if is_hurwitz(&coeffs.a) {
        let ss = steady_state(sys, init, weights)?;
        let settle_time = opts.settle / spectral_abscissa(&coeffs.a).abs();
        (ss.delta_inf <= (1.0 - opts.margin) * threshold).then_some(settle_time)
    } else {
        None
    };

    let mut integ = MomentIntegrator::new(sys, &coeffs, init);
    let mut sup_delta = 0.0f64;
    loop {
        let prev = integ.state().clone();
        integ.step(step);
        let d = dev.eval(integ.state())?;
        if d > threshold {
            let t_hi = integ.t();
            let (lo, hi) = bisect(&mut integ, &dev, prev, t_hi, threshold, tol)?;
            return Ok(DecoherenceTime {
                epsilon,
                threshold,
                value: TauValue::Finite {
                    value: 0.5 * (lo + hi),
                    bracket: (lo, hi),
                },
                sup_delta: sup_delta.max(d),
                marched: hi,
            });
        }
        sup_delta = sup_delta.max(d);
        let t = integ.t();
        if let Some(settle_time) = certificate {
            if t >= settle_time {
                return Ok(DecoherenceTime {
                    epsilon,
                    threshold,
                    value: TauValue::Infinite,
                    sup_delta,
                    marched: t,
                });
            }
        }
        if t >= opts.horizon {
            return Err(Error::Inconclusive {
                threshold,
                horizon: opts.horizon,
                sup_delta,
            });
        }
    }
}

/// Shrinks `[prev.t, hi]` around the first crossing, re-integrating from the
/// left node with a single step for every probe.
fn bisect(
    integ: &mut MomentIntegrator,
    dev: &DeviationFunctional,
    prev: crate::moments::MomentState,
    hi: f64,
    threshold: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let t0 = prev.t;
    let (mut lo, mut hi) = (t0, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        integ.set_state(prev.clone());
        integ.step(mid - t0);
        if dev.eval(integ.state())? > threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// First and second right derivatives of `τ` at `ε = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceExpansion {
    pub delta_dot0: f64,
    pub delta_ddot0: f64,
    pub tau_prime0: f64,
    pub tau_second0: f64,
    /// `‖F√P‖²`.
    pub ref_norm: f64,
}

pub fn tau_expansion(sys: &SystemParams, init: &InitialMoments, weights: &WeightingSpec) -> Result<DecoherenceExpansion> {
    let coeffs = coefficients(sys);
    let dev = DeviationFunctional::new(&coeffs, init, weights)?;
    let ref_norm = dev.reference();
    if ref_norm <= 1e-14 {
        return Err(Error::TrivialWeighting { reference: ref_norm });
    }
    let (delta_dot0, delta_ddot0) = delta_derivatives0_with(sys, &coeffs, init, weights)?;
    if delta_dot0 <= MIN_DELTA_DOT {
        return Err(Error::NoInitialNoise { delta_dot0 });
    }
    let tau_prime0 = ref_norm / delta_dot0;
    let tau_second0 = -delta_ddot0 * tau_prime0 * tau_prime0 / delta_dot0;
    Ok(DecoherenceExpansion {
        delta_dot0,
        delta_ddot0,
        tau_prime0,
        tau_second0,
        ref_norm,
    })
}

/// `τ̂(ε) = τ'(0) ε + ½ τ''(0) ε²`.
pub fn tau_hat(exp: &DecoherenceExpansion, epsilon: f64) -> f64 {
    exp.tau_prime0 * epsilon + 0.5 * exp.tau_second0 * epsilon * epsilon
}
