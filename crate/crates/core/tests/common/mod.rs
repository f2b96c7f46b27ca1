//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qmemtime::algebra::StructureConstants;
use qmemtime::linalg::{CMat, RMat, RVec};
use qmemtime::model::SystemParams;
use qmemtime::moments::{InitialMoments, WeightingSpec};
use qmemtime::oracle::{fit_structure_constants, Representation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Sign of the permutation (j, k, l) of (0, 1, 2), zero on repeats.
pub fn epsilon(j: usize, k: usize, l: usize) -> f64 {
    if j == k || k == l || j == l {
        0.0
    } else if (j, k, l) == (0, 1, 2) || (j, k, l) == (1, 2, 0) || (j, k, l) == (2, 0, 1) {
        1.0
    } else {
        -1.0
    }
}

pub fn pauli() -> Vec<CMat> {
    let z = c(0.0);
    let o = c(1.0);
    let i = Complex64::new(0.0, 1.0);
    vec![
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

pub fn diag(v: &[f64]) -> RMat {
    RMat::from_diagonal(&RVec::from_column_slice(v))
}

pub fn worked_gain() -> RMat {
    RMat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
}

pub fn worked() -> (SystemParams, InitialMoments, WeightingSpec) {
    let sys = SystemParams::new(qmemtime::algebra::pauli_structure(), RVec::zeros(3), worked_gain(), RVec::zeros(2)).unwrap();
    let init = InitialMoments::new(&sys, RVec::zeros(3)).unwrap();
    (sys, init, WeightingSpec::identity(3))
}

/// A random instance: qubit variables `T σ` for a random invertible `T`, or
/// the qutrit Gell-Mann family (where `Re β ≠ 0`).
pub struct Instance {
    pub rep: Representation,
    pub sys: SystemParams,
    pub init: InitialMoments,
    pub weights: WeightingSpec,
    /// Density matrix whose means are `init.mu0()`.
    pub rho: CMat,
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> RMat {
    RMat::from_fn(rows, cols, |_, _| uniform(r, -scale, scale))
}

pub fn random_vector(r: &mut ChaCha8Rng, n: usize, scale: f64) -> RVec {
    RVec::from_fn(n, |_, _| uniform(r, -scale, scale))
}

pub fn random_linear_qubit(r: &mut ChaCha8Rng) -> Representation {
    loop {
        let t = RMat::identity(3, 3) + random_matrix(r, 3, 3, 0.5);
        if t.determinant().abs() < 0.2 {
            continue;
        }
        let s = pauli();
        let mats = (0..3)
            .map(|j| {
                let mut x = CMat::zeros(2, 2);
                for l in 0..3 {
                    x += &s[l] * c(t[(j, l)]);
                }
                x
            })
            .collect();
        return Representation::new("linear qubit", mats).unwrap();
    }
}

/// The eight Gell-Mann matrices.
pub fn gell_mann() -> Representation {
    let z = c(0.0);
    let o = c(1.0);
    let i = Complex64::new(0.0, 1.0);
    let m = |v: [Complex64; 9]| CMat::from_row_slice(3, 3, &v);
    let r3 = 1.0 / 3f64.sqrt();
    let mats = vec![
        m([z, o, z, o, z, z, z, z, z]),
        m([z, -i, z, i, z, z, z, z, z]),
        m([o, z, z, z, -o, z, z, z, z]),
        m([z, z, o, z, z, z, o, z, z]),
        m([z, z, -i, z, z, z, i, z, z]),
        m([z, z, z, z, z, o, z, o, z]),
        m([z, z, z, z, z, -i, z, i, z]),
        m([c(r3), z, z, z, c(r3), z, z, z, c(-2.0 * r3)]),
    ];
    Representation::new("qutrit", mats).unwrap()
}

/// Random density matrix of dimension `d` with full rank.
pub fn random_state(r: &mut ChaCha8Rng, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| Complex64::new(uniform(r, -1.0, 1.0), uniform(r, -1.0, 1.0)));
    let rho = &g * g.adjoint() + CMat::identity(d, d) * c(0.1);
    let tr = rho.trace();
    rho / tr
}

pub fn means(rep: &Representation, rho: &CMat) -> RVec {
    RVec::from_iterator(rep.n(), rep.matrices().iter().map(|x| expect(rho, x).re))
}

pub fn instance_from(r: &mut ChaCha8Rng, rep: Representation) -> Instance {
    let n = rep.n();
    let sc = fit_structure_constants(&rep).unwrap();
    let sys = SystemParams::new(sc, random_vector(r, n, 1.0), random_matrix(r, 2, n, 1.0), random_vector(r, 2, 0.5)).unwrap();
    let rho = random_state(r, rep.d());
    let init = InitialMoments::new(&sys, means(&rep, &rho)).unwrap();
    let f = RMat::identity(n, n) + random_matrix(r, n, n, 0.3);
    let weights = WeightingSpec::from_factor(f).unwrap();
    Instance {
        rep,
        sys,
        init,
        weights,
        rho,
    }
}

pub fn random_qubit_instance(r: &mut ChaCha8Rng) -> Instance {
    let rep = random_linear_qubit(r);
    instance_from(r, rep)
}

pub fn random_qutrit_instance(r: &mut ChaCha8Rng) -> Instance {
    instance_from(r, gell_mann())
}

pub fn pauli_sc() -> StructureConstants {
    qmemtime::algebra::pauli_structure()
}

/// `Ω = I + iJ` assembled entry by entry.
pub fn omega(m: usize) -> CMat {
    let mut o = CMat::identity(m, m);
    for p in 0..m / 2 {
        o[(2 * p, 2 * p + 1)] = Complex64::new(0.0, 1.0);
        o[(2 * p + 1, 2 * p)] = Complex64::new(0.0, -1.0);
    }
    o
}

/// `℧` built from the θ entries.
pub fn mho(sc: &StructureConstants) -> RMat {
    let n = sc.n();
    RMat::from_fn(n * n, n, |row, k| {
        let (l, j) = (row / n, row % n);
        sc.theta().get(j, k, l)
    })
}

/// `Λ(μ) = 4 ℧^T ((α + β·μ) ⊗ M^T Ω M) ℧` with an explicit Kronecker product.
pub fn lambda_kron(sys: &SystemParams, mu: &RVec) -> CMat {
    let sc = sys.sc();
    let n = sc.n();
    let mut pi = sc.alpha().map(c);
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                pi[(j, k)] += sc.beta().get(j, k, l) * mu[l];
            }
        }
    }
    let mc = sys.coupling_gain().map(c);
    let g = mc.transpose() * omega(sys.m()) * &mc;
    let w = mho(sc).map(c);
    w.transpose() * pi.kronecker(&g) * &w * c(4.0)
}

pub fn expect(rho: &CMat, x: &CMat) -> Complex64 {
    (rho * x).trace()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Coupling operators `L = M X + N` as matrices.
pub fn coupling_operators(sys: &SystemParams, x: &[CMat]) -> Vec<CMat> {
    let d = x[0].nrows();
    let m = sys.coupling_gain();
    (0..sys.m())
        .map(|k| {
            let mut l = CMat::identity(d, d) * c(sys.coupling_offset()[k]);
            for (j, xj) in x.iter().enumerate() {
                l += xj * c(m[(k, j)]);
            }
            l
        })
        .collect()
}

/// Heisenberg drift of one operator: `i[H, Y] - ½([Y, L^T] Ω L + L^T Ω [L, Y])`.
pub fn gksl_drift(sys: &SystemParams, x: &[CMat], y: &CMat) -> CMat {
    let d = y.nrows();
    let mut h = CMat::zeros(d, d);
    for (j, xj) in x.iter().enumerate() {
        h += xj * c(sys.energy()[j]);
    }
    let l = coupling_operators(sys, x);
    let om = omega(sys.m());
    let i = Complex64::new(0.0, 1.0);
    let mut out = commutator(&h, y) * i;
    for a in 0..l.len() {
        for b in 0..l.len() {
            let w = om[(a, b)];
            if w == c(0.0) {
                continue;
            }
            out -= (commutator(y, &l[a]) * &l[b] + &l[a] * commutator(&l[b], y)) * (w * 0.5);
        }
    }
    out
}

/// Coordinates of a matrix in the basis `{I, X_1, .., X_n}` by least squares.
pub fn affine_coordinates(x: &[CMat], y: &CMat) -> (Complex64, DVector<Complex64>) {
    let d = y.nrows();
    let n = x.len();
    let mut basis = DMatrix::<Complex64>::zeros(d * d, n + 1);
    basis.set_column(0, &DVector::from_column_slice(CMat::identity(d, d).as_slice()));
    for (l, xl) in x.iter().enumerate() {
        basis.set_column(l + 1, &DVector::from_column_slice(xl.as_slice()));
    }
    let rhs = DVector::from_column_slice(y.as_slice());
    let sol = basis.svd(true, true).solve(&rhs, 1e-14).unwrap();
    (sol[0], sol.rows(1, n).into_owned())
}

/// Drift `(A, b)` read off the dense Heisenberg generator.
pub fn dense_drift(sys: &SystemParams, x: &[CMat]) -> (RMat, RVec) {
    let n = x.len();
    let mut a = RMat::zeros(n, n);
    let mut b = RVec::zeros(n);
    for j in 0..n {
        let (c0, cx) = affine_coordinates(x, &gksl_drift(sys, x, &x[j]));
        b[j] = c0.re;
        for k in 0..n {
            a[(j, k)] = cx[k].re;
        }
    }
    (a, b)
}

/// `Λ = E(B Ω B^T)` with `B_{jk} = -i [X_j, L_k]`, averaged over `rho`.
pub fn dense_lambda(sys: &SystemParams, x: &[CMat], rho: &CMat) -> CMat {
    let n = x.len();
    let l = coupling_operators(sys, x);
    let om = omega(sys.m());
    let i = Complex64::new(0.0, 1.0);
    let b: Vec<Vec<CMat>> = x
        .iter()
        .map(|xj| l.iter().map(|lk| commutator(xj, lk) * (-i)).collect())
        .collect();
    CMat::from_fn(n, n, |j, k| {
        let mut s = c(0.0);
        for a in 0..l.len() {
            for bb in 0..l.len() {
                s += om[(a, bb)] * expect(rho, &(&b[j][a] * &b[k][bb]));
            }
        }
        s
    })
}

/// Schrödinger-picture generator acting on `vec(ρ)` (column-major):
/// `L(ρ) = -i[H, ρ] + Σ Ω_ab (L_b ρ L_a - ½{L_a L_b, ρ})`.
pub fn gksl_superoperator(sys: &SystemParams, x: &[CMat]) -> CMat {
    let d = x[0].nrows();
    let mut h = CMat::zeros(d, d);
    for (j, xj) in x.iter().enumerate() {
        h += xj * c(sys.energy()[j]);
    }
    let l = coupling_operators(sys, x);
    let om = omega(sys.m());
    let i = Complex64::new(0.0, 1.0);
    let id = CMat::identity(d, d);
    // vec(A ρ B) = (B^T ⊗ A) vec(ρ).
    let mut s = (id.kronecker(&h) - h.transpose().kronecker(&id)) * (-i);
    for a in 0..l.len() {
        for b in 0..l.len() {
            let w = om[(a, b)];
            if w == c(0.0) {
                continue;
            }
            let ll = &l[a] * &l[b];
            s += (l[a].transpose().kronecker(&l[b]) - (id.kronecker(&ll) + ll.transpose().kronecker(&id)) * c(0.5)) * w;
        }
    }
    s
}

pub fn apply_super(prop: &CMat, rho: &CMat) -> CMat {
    let d = rho.nrows();
    let v = prop * DVector::from_column_slice(rho.as_slice());
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Dense quantum oracle for `Δ(t)`: second moments from `ρ(t)` and the
/// two-time correlations `E[X_j(t) X_k(0)] = tr(X_j e^{tL}(X_k ρ))`.
pub struct DenseDeviation {
    pub mean: RVec,
    pub delta: f64,
    /// `E[X(t) X(t)^T]`.
    pub second: CMat,
}

pub fn dense_deviation(inst_sys: &SystemParams, x: &[CMat], rho: &CMat, sigma: &RMat, t: f64) -> DenseDeviation {
    let n = x.len();
    let prop = (gksl_superoperator(inst_sys, x) * c(t)).exp();
    let rho_t = apply_super(&prop, rho);
    let mean = RVec::from_iterator(n, x.iter().map(|xj| expect(&rho_t, xj).re));
    let second = CMat::from_fn(n, n, |j, k| expect(&rho_t, &(&x[j] * &x[k])));
    let p0 = CMat::from_fn(n, n, |j, k| expect(rho, &(&x[j] * &x[k])));
    let mut corr = CMat::zeros(n, n);
    for k in 0..n {
        let evolved = apply_super(&prop, &(&x[k] * rho));
        for j in 0..n {
            corr[(j, k)] = (&x[j] * &evolved).trace();
        }
    }
    let mut delta = 0.0;
    for j in 0..n {
        for k in 0..n {
            let e = second[(j, k)].re - corr[(j, k)].re - corr[(k, j)].re + p0[(j, k)].re;
            delta += sigma[(j, k)] * e;
        }
    }
    DenseDeviation { mean, delta, second }
}
