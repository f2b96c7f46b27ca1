//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use nalgebra::Vector3;
use qmemtime::algebra::pauli_structure;
use qmemtime::decoherence::{decoherence_time, tau_expansion, TauOptions};
use qmemtime::energy::{default_tolerance, delta_ddot0_at, optimize_energy, rk_matrices};
use qmemtime::interconnect::{compose_qubits, optimal_direct_coupling, partition_rk, CompositeSystem};
use qmemtime::linalg::{max_abs, max_abs_c, re, CMat, RMat, RVec};
use qmemtime::model::{coefficients, lambda_matrix, SystemParams};
use qmemtime::moments::{
    delta_derivatives0, deviation_delta, second_moment_v, simulate, steady_state, InitialMoments, TimeGrid, WeightingSpec,
};
use qmemtime::oracle::{check_algebra, fit_structure_constants, qubit_representation};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{name} = {got:.15e}, expected {want:.15e} (tol {tol:e})"))
}

fn rel_close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    close(name, got, want, tol * want.abs().max(1e-300))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Least-squares polynomial `Σ_{p=1..deg} c_p h^p` through the origin.
fn poly_fit(hs: &[f64], ys: &[f64], deg: usize) -> RVec {
    let v = RMat::from_fn(hs.len(), deg, |i, p| hs[i].powi(p as i32 + 1));
    let y = RVec::from_column_slice(ys);
    v.svd(true, true).solve(&y, 1e-300).unwrap()
}

fn random_unit(r: &mut ChaCha8Rng, n: usize) -> RVec {
    loop {
        let v = random_vector(r, n, 1.0);
        if v.norm() > 1e-3 {
            return v.normalize();
        }
    }
}

fn random_bloch(r: &mut ChaCha8Rng) -> RVec {
    random_unit(r, 3) * uniform(r, 0.1, 0.9)
}

fn criterion_1() -> Outcome {
    let sc = fit_structure_constants(&qubit_representation()).map_err(err)?;
    let mut worst = max_abs(&(sc.alpha() - RMat::identity(3, 3)));
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let z = sc.beta().get(j, k, l);
                worst = worst.max(z.re.abs()).max((z.im - epsilon(j, k, l)).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

fn random_qubit_sub(r: &mut ChaCha8Rng) -> SystemParams {
    SystemParams::new(pauli_structure(), random_vector(r, 3, 1.0), random_matrix(r, 2, 3, 1.0), random_vector(r, 2, 0.5)).unwrap()
}

fn random_composite(r: &mut ChaCha8Rng) -> CompositeSystem {
    let (s1, s2) = (random_qubit_sub(r), random_qubit_sub(r));
    compose_qubits(&s1, &s2, &random_vector(r, 9, 0.5)).unwrap()
}

fn criterion_2() -> Outcome {
    let q = qubit_representation();
    let sc = fit_structure_constants(&q).map_err(err)?;
    let rep_q = check_algebra(&q, &sc, 1e-12).map_err(err)?;
    ensure(rep_q.passed(), || format!("qubit: {rep_q}"))?;

    let comp = random_composite(&mut rng(2));
    ensure(comp.n() == 15, || format!("n = {}", comp.n()))?;
    let rep = comp.representation();
    let report = check_algebra(rep, comp.joint().sc(), 1e-10).map_err(err)?;
    ensure(report.passed(), || format!("composite: {report}"))?;

    // α_jk = tr(X_j X_k)/d, which must be blockdiag(I3, I3, I9) here.
    let d = rep.d() as f64;
    let x = rep.matrices();
    let alpha_dense = RMat::from_fn(15, 15, |j, k| (&x[j] * &x[k]).trace().re / d);
    let alpha = comp.joint().sc().alpha();
    let e1 = max_abs(&(alpha - &alpha_dense));
    let e2 = max_abs(&(alpha - RMat::identity(15, 15)));
    ensure(e1 <= 1e-10 && e2 <= 1e-10, || format!("alpha errors {e1:e} (trace), {e2:e} (block identity)"))?;
    Ok(format!("qubit and n=15 composite pass, alpha error {:.1e}", e1.max(e2)))
}

fn criterion_3() -> Outcome {
    let theta = pauli_structure().theta().clone();
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = random_vector(&mut r, 3, 2.0);
        let v = random_vector(&mut r, 3, 2.0);
        let lhs = theta.diamond(&u).map_err(err)? * &v;
        let cross = Vector3::new(u[0], u[1], u[2]).cross(&Vector3::new(v[0], v[1], v[2]));
        for i in 0..3 {
            worst = worst.max((lhs[i] - cross[i]).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("100 pairs, max error {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let (mut worst_ea, mut worst_re, mut worst_sym, mut worst_zero, mut worst_mag) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let e = random_vector(&mut r, 3, 2.0);
        let sys = SystemParams::new(pauli_structure(), e.clone(), worked_gain(), RVec::zeros(2)).map_err(err)?;
        let a0 = coefficients(&sys).a0;
        worst_ea = worst_ea.max((e.transpose() * &a0).amax());
        let mut ev: Vec<_> = a0.complex_eigenvalues().iter().copied().collect();
        ev.sort_by(|p, q| p.im.partial_cmp(&q.im).unwrap());
        worst_re = ev.iter().fold(worst_re, |w, z| w.max(z.re.abs()));
        worst_sym = worst_sym.max((ev[0] + ev[2]).norm());
        worst_zero = worst_zero.max(ev[1].norm());
        // For the Pauli algebra the nonzero pair is ±2i|E|.
        worst_mag = worst_mag.max((ev[2].im - 2.0 * e.norm()).abs());
    }
    ensure(worst_ea <= 1e-12, || format!("E^T A0 = {worst_ea:e}"))?;
    ensure(worst_re <= 1e-9 && worst_sym <= 1e-9 && worst_zero <= 1e-9, || {
        format!("spectrum: real {worst_re:e}, symmetry {worst_sym:e}, zero {worst_zero:e}")
    })?;
    ensure(worst_mag <= 1e-9, || format!("|eig| vs 2|E|: {worst_mag:e}"))?;
    Ok(format!("100 energies, |E^T A0| {worst_ea:.1e}, spectral defect {:.1e}", worst_re.max(worst_sym).max(worst_zero)))
}

/// Root of `Δ(t) = y` for the worked example using the dense density-matrix oracle.
fn dense_root(sys: &SystemParams, y: f64, hi: f64) -> f64 {
    let x = pauli();
    let rho = CMat::identity(2, 2) * c(0.5);
    let sigma = RMat::identity(3, 3);
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if dense_deviation(sys, &x, &rho, &sigma, mid).delta > y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_5() -> Outcome {
    let (sys, init, w) = worked();
    let alg = 1e-10;
    let der = 1e-6;
    let co = coefficients(&sys);
    let x = pauli();
    let rho = CMat::identity(2, 2) * c(0.5);

    // A, b: regression of the Heisenberg generator.
    let (a_dense, b_dense) = dense_drift(&sys, &x);
    let a_want = diag(&[-2.0, -2.0, -4.0]);
    let b_want = RVec::from_column_slice(&[0.0, 0.0, 4.0]);
    ensure(max_abs(&(&a_dense - &a_want)) <= alg && (&b_dense - &b_want).amax() <= alg, || "dense oracle disagrees with the frozen A, b".into())?;
    ensure(max_abs(&(&co.a - &a_want)) <= alg, || format!("A = {}", co.a))?;
    ensure((&co.b - &b_want).amax() <= alg, || format!("b = {}", co.b))?;

    // Re Λ(0): averaged Ito matrix of the coupling commutators.
    let lam = re(&lambda_matrix(&sys, init.mu0()).map_err(err)?);
    let lam_want = diag(&[4.0, 4.0, 8.0]);
    ensure(max_abs(&(re(&dense_lambda(&sys, &x, &rho)) - &lam_want)) <= alg, || "dense Lambda oracle".into())?;
    ensure(max_abs(&(&lam - &lam_want)) <= alg, || format!("Re Lambda(0) = {lam}"))?;

    // Δ̇(0), Δ̈(0): polynomial fit of the dense Δ(h).
    let hs: Vec<f64> = (1..=4).map(|k| k as f64 * 1e-3).collect();
    let ys: Vec<f64> = hs.iter().map(|&h| dense_deviation(&sys, &x, &rho, w.sigma(), h).delta).collect();
    let fit = poly_fit(&hs, &ys, 4);
    rel_close("fitted Delta_dot(0)", fit[0], 16.0, der)?;
    rel_close("fitted Delta_ddot(0)", 2.0 * fit[1], -48.0, der)?;
    let (d1, d2) = delta_derivatives0(&sys, &init, &w).map_err(err)?;
    close("Delta_dot(0)", d1, 16.0, alg)?;
    close("Delta_ddot(0)", d2, -48.0, alg)?;

    // τ'(0), τ''(0): fit of first crossing times of the dense Δ.
    let reference = 3.0;
    let eps: Vec<f64> = (1..=4).map(|k| k as f64 * 2e-3).collect();
    let taus: Vec<f64> = eps.iter().map(|&e| dense_root(&sys, e * reference, 0.01)).collect();
    let tfit = poly_fit(&eps, &taus, 4);
    rel_close("fitted tau'(0)", tfit[0], 3.0 / 16.0, der)?;
    rel_close("fitted tau''(0)", 2.0 * tfit[1], 27.0 / 256.0, der)?;
    let ex = tau_expansion(&sys, &init, &w).map_err(err)?;
    close("tau'(0)", ex.tau_prime0, 3.0 / 16.0, alg)?;
    close("tau''(0)", ex.tau_second0, 27.0 / 256.0, alg)?;

    // R: explicit Kronecker product; K: finite differences of Δ̈(0) in E.
    let (r, k) = rk_matrices(&sys, &init, &w).map_err(err)?;
    let m = mho(sys.sc());
    let r_kron = m.transpose() * init.p().kronecker(w.sigma()) * &m;
    ensure(max_abs(&(&r_kron - RMat::identity(3, 3) * 2.0)) <= alg, || format!("Kronecker R = {r_kron}"))?;
    ensure(max_abs(&(&r - RMat::identity(3, 3) * 2.0)) <= alg, || format!("R = {r}"))?;
    let h = 1e-3;
    let mut k_fd = RVec::zeros(3);
    for i in 0..3 {
        let mut ep = RVec::zeros(3);
        ep[i] = h;
        let fp = delta_ddot0_at(&sys, &init, &w, &ep).map_err(err)?;
        let fm = delta_ddot0_at(&sys, &init, &w, &(-ep)).map_err(err)?;
        k_fd[i] = (fp - fm) / (2.0 * h) / 8.0;
    }
    ensure(k_fd.amax() <= der, || format!("finite-difference K = {k_fd}"))?;
    ensure(k.amax() <= alg, || format!("K = {k}"))?;
    let opt = optimize_energy(&sys, &init, &w).map_err(err)?;
    ensure(opt.zero_energy_optimal, || "zero energy not flagged optimal".into())?;

    // Limits: long simulation and the Lyapunov residual.
    let ss = steady_state(&sys, &init, &w).map_err(err)?;
    let mu_want = RVec::from_column_slice(&[0.0, 0.0, 1.0]);
    let p_want = diag(&[1.0, 1.0, 0.0]);
    ensure((&ss.mu_inf - &mu_want).amax() <= alg, || format!("mu_inf = {}", ss.mu_inf))?;
    ensure(max_abs(&(&ss.p_inf - &p_want)) <= alg, || format!("P_inf = {}", ss.p_inf))?;
    close("Delta_inf", ss.delta_inf, 6.0, alg)?;
    let resid = &co.a * &ss.p_inf + &ss.p_inf * co.a.transpose() + re(&ss.lambda_inf);
    ensure(max_abs(&resid) <= alg, || format!("Lyapunov residual {}", max_abs(&resid)))?;
    let traj = simulate(&sys, &init, &w, &TimeGrid::new(vec![0.0, 15.0]).map_err(err)?).map_err(err)?;
    ensure((&traj.mu[1] - &mu_want).amax() <= der, || format!("mu(15) = {}", traj.mu[1]))?;
    ensure(max_abs(&(re(&traj.v[1]) - &p_want)) <= der, || format!("Re V(15) = {}", re(&traj.v[1])))?;
    rel_close("Delta(15)", traj.delta[1], 6.0, der)?;
    Ok("A, b, Re Lambda(0), Delta derivatives, tau derivatives, R, K, limits confirmed".into())
}

/// `V(t) = ∫_0^t e^{sA} Λ(μ(t-s)) e^{sA^T} ds` by composite Simpson, with
/// exponentials from nalgebra.
fn v_quadrature(sys: &SystemParams, init: &InitialMoments, t: f64, intervals: usize) -> CMat {
    let co = coefficients(sys);
    let n = sys.n();
    let mut aug = RMat::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&co.a);
    aug.view_mut((0, n), (n, 1)).copy_from(&co.b);
    let mu_at = |s: f64| -> RVec {
        let e = (&aug * s).exp();
        e.view((0, 0), (n, n)) * init.mu0() + e.view((0, n), (n, 1))
    };
    let h = t / intervals as f64;
    let mut acc = CMat::zeros(n, n);
    for i in 0..=intervals {
        let s = i as f64 * h;
        let wgt = if i == 0 || i == intervals { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let e = (&co.a * s).exp().map(c);
        let lam = lambda_matrix(sys, &mu_at(t - s)).unwrap();
        acc += &e * lam * e.transpose() * c(wgt);
    }
    acc * c(h / 3.0)
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let times = [0.5, 1.0, 1.5, 2.0];
    let grid = TimeGrid::new(std::iter::once(0.0).chain(times).collect()).map_err(err)?;
    let mut worst = 0.0f64;
    for i in 0..10 {
        let inst = random_qubit_instance(&mut r);
        let vs = second_moment_v(&inst.sys, &inst.init, &grid).map_err(err)?;
        ensure(max_abs_c(&vs[0]) == 0.0, || "V(0) != 0".into())?;
        for (k, &t) in times.iter().enumerate() {
            let q = v_quadrature(&inst.sys, &inst.init, t, 400);
            let rel = max_abs_c(&(&vs[k + 1] - &q)) / max_abs_c(&q);
            worst = worst.max(rel);
            ensure(rel <= 1e-6, || format!("instance {i}, t = {t}: relative error {rel:e}"))?;
        }
    }
    Ok(format!("10 instances, worst relative error {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let (sys, init, w) = worked();
    let (d1, d2) = delta_derivatives0(&sys, &init, &w).map_err(err)?;
    let hs = [1e-2, 5e-3, 2.5e-3];
    let grid = TimeGrid::new(vec![0.0, hs[2], hs[1], hs[0]]).map_err(err)?;
    let delta = deviation_delta(&sys, &init, &w, &grid).map_err(err)?;
    let ratios: Vec<f64> = [3, 2, 1]
        .iter()
        .zip(hs)
        .map(|(&k, h)| (delta[k] - d1 * h - 0.5 * d2 * h * h) / (h * h * h))
        .collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let mean = ratios.iter().sum::<f64>() / 3.0;
    let variation = (max - min) / mean.abs();
    ensure(variation <= 0.2, || format!("ratios {ratios:?}, variation {variation:.3}"))?;
    Ok(format!("ratios {:.4} {:.4} {:.4}, variation {:.1}%", ratios[0], ratios[1], ratios[2], 100.0 * variation))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for i in 0..25 {
        let inst = if i % 5 == 4 { random_qutrit_instance(&mut r) } else { random_qubit_instance(&mut r) };
        let n = inst.sys.n();
        let e = random_vector(&mut r, n, 1.0);
        let (rm, k) = rk_matrices(&inst.sys, &inst.init, &inst.weights).map_err(err)?;
        let analytic = (&rm * &e * 2.0 + k) * 8.0;
        // Δ̈(0) is quadratic in E, so central differences are exact up to rounding.
        let h = 1e-3;
        let mut fd = RVec::zeros(n);
        for j in 0..n {
            let mut ep = e.clone();
            let mut em = e.clone();
            ep[j] += h;
            em[j] -= h;
            let fp = delta_ddot0_at(&inst.sys, &inst.init, &inst.weights, &ep).map_err(err)?;
            let fm = delta_ddot0_at(&inst.sys, &inst.init, &inst.weights, &em).map_err(err)?;
            fd[j] = (fp - fm) / (2.0 * h);
        }
        let rel = (&fd - &analytic).amax() / analytic.amax().max(1e-300);
        worst = worst.max(rel);
        ensure(rel <= 1e-5, || format!("instance {i} (n = {n}): relative error {rel:e}"))?;
    }
    Ok(format!("25 instances, worst relative error {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut worst_resid = 0.0f64;
    let mut checked = 0;
    for i in 0..10 {
        let inst = if i % 3 == 2 { random_qutrit_instance(&mut r) } else { random_qubit_instance(&mut r) };
        let (sys, init, w) = (&inst.sys, &inst.init, &inst.weights);
        let opt = optimize_energy(sys, init, w).map_err(err)?;
        let e = &opt.e_star;
        let f_star = delta_ddot0_at(sys, init, w, e).map_err(err)?;
        for _ in 0..50 {
            let d = random_unit(&mut r, sys.n());
            let f = delta_ddot0_at(sys, init, w, &(e + d)).map_err(err)?;
            ensure(f_star <= f + 1e-12 * f_star.abs().max(1.0), || format!("instance {i}: {f_star} > {f}"))?;
        }
        if opt.is_unique() {
            let resid = (&opt.r * e * 2.0 + &opt.k).norm();
            worst_resid = worst_resid.max(resid);
            ensure(resid <= 1e-10, || format!("instance {i}: residual {resid:e}"))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no instance with R positive definite".into())?;
    Ok(format!("10 instances x 50 directions, {checked} with R > 0, worst residual {worst_resid:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let comp = random_composite(&mut r);
    let (mu1, mu2) = (random_bloch(&mut r), random_bloch(&mut r));
    let init = comp.product_initial_moments(&mu1, &mu2).map_err(err)?;
    let w = WeightingSpec::identity(15);
    let blocks = partition_rk(&comp, &init, &w).map_err(err)?;
    let tol = default_tolerance(&blocks.r12);

    let (e1, e2, _) = comp.energy_blocks();
    let opt = optimal_direct_coupling(&blocks, &e1, &e2, tol).map_err(err)?;

    // Q from the full (R, K) blocks.
    let (rf, kf) = rk_matrices(comp.joint(), &init, &w).map_err(err)?;
    let q = kf.rows(6, 9) + (rf.view((6, 0), (9, 3)) * &e1 + rf.view((6, 3), (9, 3)) * &e2) * 2.0;
    let q_err = (&q - &opt.q).amax();
    ensure(q_err <= 1e-12 * q.amax().max(1.0), || format!("Q assembly error {q_err:e}"))?;

    // Finite-difference gradient of Δ̈(0) over E12 at the optimum.
    let energy_for = |e12: &RVec| {
        let mut e = RVec::zeros(15);
        e.rows_mut(0, 3).copy_from(&e1);
        e.rows_mut(3, 3).copy_from(&e2);
        e.rows_mut(6, 9).copy_from(e12);
        e
    };
    let grad = |e12: &RVec| -> Result<RVec, String> {
        let h = 1e-3;
        let mut g = RVec::zeros(9);
        for j in 0..9 {
            let mut p = e12.clone();
            let mut m = e12.clone();
            p[j] += h;
            m[j] -= h;
            let fp = delta_ddot0_at(comp.joint(), &init, &w, &energy_for(&p)).map_err(err)?;
            let fm = delta_ddot0_at(comp.joint(), &init, &w, &energy_for(&m)).map_err(err)?;
            g[j] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    };
    let g0 = grad(&RVec::zeros(9))?;
    let g_star = grad(&opt.e12_star)?;
    ensure((&g0 - &q * 8.0).amax() <= 1e-6 * g0.amax().max(1.0), || "gradient at E12 = 0 is not 8Q".into())?;
    let stationarity = g_star.amax() / g0.amax().max(1.0);
    ensure(stationarity <= 1e-6, || format!("subgradient at E12_star: {stationarity:e}"))?;

    // Affinity in (E1, E2).
    let (f1, f2) = (random_vector(&mut r, 3, 1.0), random_vector(&mut r, 3, 1.0));
    let lam = 0.37;
    let mix1 = &e1 * lam + &f1 * (1.0 - lam);
    let mix2 = &e2 * lam + &f2 * (1.0 - lam);
    let other = optimal_direct_coupling(&blocks, &f1, &f2, tol).map_err(err)?;
    let mixed = optimal_direct_coupling(&blocks, &mix1, &mix2, tol).map_err(err)?;
    let sup = (&mixed.e12_star - (&opt.e12_star * lam + &other.e12_star * (1.0 - lam))).amax();
    ensure(sup <= 1e-10, || format!("superposition error {sup:e}"))?;
    Ok(format!("stationarity {stationarity:.1e}, Q error {q_err:.1e}, superposition error {sup:.1e}"))
}

fn tau_value(t: &qmemtime::decoherence::DecoherenceTime) -> f64 {
    t.finite().unwrap_or(f64::INFINITY)
}

fn criterion_11() -> Outcome {
    let opts = TauOptions::default();
    let mut r = rng(11);
    let eps = [0.02, 0.05, 0.1];
    for i in 0..20 {
        let inst = random_qubit_instance(&mut r);
        let mut prev = 0.0;
        for &e in &eps {
            let t = tau_value(&decoherence_time(&inst.sys, &inst.init, &inst.weights, e, &opts).map_err(err)?);
            ensure(t >= prev, || format!("instance {i}: tau({e}) = {t} < {prev}"))?;
            prev = t;
        }
    }

    let (sys, init, w) = worked();
    let e = 1e-4;
    let t = decoherence_time(&sys, &init, &w, e, &opts).map_err(err)?;
    let slope = tau_value(&t) / e;
    rel_close("tau(1e-4)/1e-4", slope, 3.0 / 16.0, 0.02)?;

    let still = SystemParams::new(pauli_structure(), RVec::zeros(3), RMat::zeros(2, 3), RVec::zeros(2)).map_err(err)?;
    let init0 = InitialMoments::new(&still, RVec::from_column_slice(&[0.2, -0.1, 0.3])).map_err(err)?;
    let s = decoherence_time(&still, &init0, &w, 0.1, &opts).map_err(err)?;
    ensure(s.is_infinite(), || format!("static system: {s}"))?;
    Ok(format!("20 instances x 3 eps monotone, tau(1e-4)/1e-4 = {slope:.6}, static system infinite"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Pauli golden structure constants", criterion_1),
        ("algebra and CCR oracle", criterion_2),
        ("cross-product identity", criterion_3),
        ("isolated-system invariants", criterion_4),
        ("worked example", criterion_5),
        ("ODE vs quadrature for V", criterion_6),
        ("Taylor consistency of Delta", criterion_7),
        ("energy gradient identity", criterion_8),
        ("optimal energy", criterion_9),
        ("optimal direct coupling", criterion_10),
        ("decoherence-time behaviour", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
