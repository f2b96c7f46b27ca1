//! Small dense helpers on top of `nalgebra`: the matrix exponential, the
//! integrated exponential, PSD square roots, Lyapunov solves and
//! pseudo-inverse solves of symmetric systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn re(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Column-stacking vectorisation.
pub fn col(m: &RMat) -> RVec {
    RVec::from_column_slice(m.as_slice())
}

/// Frobenius pairing `<a, b> = tr(a^T b)`.
pub fn frobenius(a: &RMat, b: &RMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &RMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |acc: f64, s| acc.max(*s))
}

/// Largest real part over the spectrum of a real square matrix.
pub fn spectral_abscissa(a: &RMat) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |acc, z| acc.max(z.re))
}

/// Smallest eigenvalue of a Hermitian matrix (only the Hermitian part is used).
pub fn min_eig_hermitian(m: &CMat) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, x| acc.min(*x))
}

pub fn min_eig_symmetric(m: &RMat) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, x| acc.min(*x))
}

/// Principal square root of a symmetric positive semi-definite matrix.
/// Eigenvalues below zero (roundoff) are clipped.
pub fn sqrt_psd(p: &RMat) -> RMat {
    let s = (p + p.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let roots = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    &eig.eigenvectors * RMat::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

// Padé coefficients of degree 3, 5, 7, 9, 13 and the matching 1-norm bounds.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539_398_330_063_23e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068e0;
const THETA13: f64 = 5.371920351148152e0;

fn norm1(a: &RMat) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low(a: &RMat, coeffs: &[f64]) -> (RMat, RMat) {
    let n = a.nrows();
    let id = RMat::identity(n, n);
    let a2 = a * a;
    let mut even = &id * coeffs[0];
    let mut odd = &id * coeffs[1];
    let mut pow = id.clone();
    for k in 1..coeffs.len() / 2 {
        pow = &pow * &a2;
        even += &pow * coeffs[2 * k];
        odd += &pow * coeffs[2 * k + 1];
    }
    (a * odd, even)
}

fn pade13(a: &RMat) -> (RMat, RMat) {
    let b = &PADE13;
    let n = a.nrows();
    let id = RMat::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    (u, v)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree up to 13.
pub fn expm(a: &RMat) -> RMat {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.nrows();
    if n == 0 {
        return RMat::zeros(0, 0);
    }
    let nrm = norm1(a);
    let (u, v, squarings) = if nrm <= THETA3 {
        let (u, v) = pade_low(a, &PADE3);
        (u, v, 0)
    } else if nrm <= THETA5 {
        let (u, v) = pade_low(a, &PADE5);
        (u, v, 0)
    } else if nrm <= THETA7 {
        let (u, v) = pade_low(a, &PADE7);
        (u, v, 0)
    } else if nrm <= THETA9 {
        let (u, v) = pade_low(a, &PADE9);
        (u, v, 0)
    } else {
        let s = (nrm / THETA13).log2().ceil().max(0.0) as i32;
        let scaled = a / 2f64.powi(s);
        let (u, v) = pade13(&scaled);
        (u, v, s)
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the chosen norm bounds");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// `(e^{tA}, ψ(t))` with `ψ(t) = ∫_0^t e^{sA} ds`, read off the exponential of
/// the block matrix `t [[A, I], [0, 0]]`. Valid for singular `A`.
pub fn exp_and_integral(a: &RMat, t: f64) -> (RMat, RMat) {
    let n = a.nrows();
    let mut big = RMat::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&(a * t));
    big.view_mut((0, n), (n, n)).fill_with_identity();
    big.view_mut((0, n), (n, n)).scale_mut(t);
    let e = expm(&big);
    (
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, n)).into_owned(),
    )
}

/// Solves `A P + P A^T + Q = 0` by vec-linearisation.
pub fn solve_lyapunov(a: &RMat, q: &RMat) -> Result<RMat> {
    let n = a.nrows();
    if !a.is_square() || q.shape() != (n, n) {
        return Err(Error::dims("lyapunov", format!("{n}x{n}"), format!("{:?}", q.shape())));
    }
    let id = RMat::identity(n, n);
    let op = id.kronecker(a) + a.kronecker(&id);
    let rhs = -col(q);
    let sol = op.lu().solve(&rhs).ok_or_else(|| {
        Error::InternalConsistency("Lyapunov operator is singular".into())
    })?;
    let p = RMat::from_column_slice(n, n, sol.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

/// Outcome of solving `2 S x + k = 0` for symmetric PSD `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolve {
    pub x: RVec,
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// Dimension of the numerical null space (0 when `S` is positive definite).
    pub null_dim: usize,
}

/// Minimum-norm solution of `2 S x + k = 0` for symmetric PSD `S`, with
/// eigenvalues at or below `tol` treated as zero.
pub fn solve_stationary(s: &RMat, k: &RVec, tol: f64) -> Result<StationarySolve> {
    let n = s.nrows();
    if !s.is_square() || k.len() != n {
        return Err(Error::dims("stationarity", n, k.len()));
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.iter().fold(f64::INFINITY, |a, x| a.min(*x));
    let vt_k = eig.eigenvectors.transpose() * k;
    let mut coeff = RVec::zeros(n);
    let mut null_dim = 0;
    for i in 0..n {
        let lam = eig.eigenvalues[i];
        if lam > tol {
            coeff[i] = -0.5 * vt_k[i] / lam;
        } else {
            null_dim += 1;
        }
    }
    let x = &eig.eigenvectors * coeff;
    let residual = (&sym * &x * 2.0 + k).norm();
    Ok(StationarySolve {
        x,
        residual,
        min_eigenvalue,
        null_dim,
    })
}
