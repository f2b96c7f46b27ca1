//! Structure-constant arrays and the section products.
//!
//! An `n x n x n` array `γ = (γ_{jkℓ})` is stored as its `n` sections
//! `γ_ℓ = (γ_{jkℓ})_{j,k}`. Two products with a vector `u` are used
//! throughout:
//!
//! ```text
//! γ · u = Σ_ℓ γ_ℓ u_ℓ            (sections_dot)
//! γ ⋄ u = [γ_1 u | … | γ_n u]     (sections_diamond)
//! ```
//!
//! linked by `(γ · u) v = (γ ⋄ v) u`. The real sections `Θ_ℓ = Im β_ℓ`
//! stacked vertically give the `n² x n` matrix `℧` with `col(2 Θ ⋄ E) = 2 ℧ E`.

use std::fmt;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat, RVec, I};

/// Tolerance below which construction silently symmetrises α and
/// Hermitises the β sections; larger defects are rejected.
pub const REPAIR_TOLERANCE: f64 = 1e-12;

/// A cubic array held as its sections `γ_ℓ` (third index fixed).
#[derive(Debug, Clone, PartialEq)]
pub struct SectionArray<T: ComplexField> {
    sections: Vec<DMatrix<T>>,
}

impl<T: ComplexField + Copy> SectionArray<T> {
    pub fn from_sections(sections: Vec<DMatrix<T>>) -> Result<Self> {
        let n = sections.len();
        for s in &sections {
            if s.shape() != (n, n) {
                return Err(Error::dims("section array", format!("{n}x{n}"), format!("{:?}", s.shape())));
            }
        }
        Ok(Self { sections })
    }

    /// Builds `γ_{jkℓ} = f(j, k, ℓ)` (zero-based indices).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let sections = (0..n)
            .map(|l| DMatrix::from_fn(n, n, |j, k| f(j, k, l)))
            .collect();
        Self { sections }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _, _| T::zero())
    }

    pub fn n(&self) -> usize {
        self.sections.len()
    }

    pub fn sections(&self) -> &[DMatrix<T>] {
        &self.sections
    }

    /// Section `γ_ℓ` (third index fixed).
    pub fn section(&self, l: usize) -> &DMatrix<T> {
        &self.sections[l]
    }

    pub fn get(&self, j: usize, k: usize, l: usize) -> T {
        self.sections[l][(j, k)]
    }

    /// `γ_{•k•} = (γ_{jkℓ})_{j,ℓ}` (second index fixed).
    pub fn slice_second(&self, k: usize) -> DMatrix<T> {
        let n = self.n();
        DMatrix::from_fn(n, n, |j, l| self.get(j, k, l))
    }

    /// `γ_{ℓ••} = (γ_{ℓjk})_{j,k}` (first index fixed).
    pub fn slice_first(&self, l: usize) -> DMatrix<T> {
        let n = self.n();
        DMatrix::from_fn(n, n, |j, k| self.get(l, j, k))
    }

    pub fn map<U: ComplexField + Copy>(&self, f: impl Fn(T) -> U + Copy) -> SectionArray<U> {
        SectionArray {
            sections: self.sections.iter().map(|s| s.map(f)).collect(),
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::dims("section product", self.n(), len));
        }
        Ok(())
    }

    /// `γ · u = Σ_ℓ γ_ℓ u_ℓ`.
    pub fn dot(&self, u: &DVector<T>) -> Result<DMatrix<T>> {
        self.check_len(u.len())?;
        let n = self.n();
        let mut out = DMatrix::zeros(n, n);
        for (s, &ul) in self.sections.iter().zip(u.iter()) {
            out += s * ul;
        }
        Ok(out)
    }

    /// `γ ⋄ u = [γ_1 u | … | γ_n u]`.
    pub fn diamond(&self, u: &DVector<T>) -> Result<DMatrix<T>> {
        self.check_len(u.len())?;
        let n = self.n();
        let mut out = DMatrix::zeros(n, n);
        for (k, s) in self.sections.iter().enumerate() {
            out.set_column(k, &(s * u));
        }
        Ok(out)
    }
}

/// Free-function form of [`SectionArray::dot`].
pub fn sections_dot<T: ComplexField + Copy>(gamma: &SectionArray<T>, u: &DVector<T>) -> Result<DMatrix<T>> {
    gamma.dot(u)
}

/// Free-function form of [`SectionArray::diamond`].
pub fn sections_diamond<T: ComplexField + Copy>(gamma: &SectionArray<T>, u: &DVector<T>) -> Result<DMatrix<T>> {
    gamma.diamond(u)
}

/// Vertical stack `℧ = [Θ_1; …; Θ_n]` of shape `n² x n`.
pub fn stack_mho(theta: &SectionArray<f64>) -> RMat {
    let n = theta.n();
    let mut mho = RMat::zeros(n * n, n);
    for (l, s) in theta.sections().iter().enumerate() {
        mho.view_mut((l * n, 0), (n, n)).copy_from(s);
    }
    mho
}

/// `℧^T col(S) = Σ_k Θ_k^T s_k` without forming `℧`.
pub fn mho_transpose_col(theta: &SectionArray<f64>, s: &RMat) -> RVec {
    let n = theta.n();
    let mut out = RVec::zeros(n);
    for (k, th) in theta.sections().iter().enumerate() {
        out += th.tr_mul(&s.column(k));
    }
    out
}

/// `℧^T (Π ⊗ G) ℧ = Σ_{j,k} Π_{jk} Θ_j^T G Θ_k`, evaluated as a double sum.
pub fn mho_sandwich(theta: &SectionArray<f64>, pi: &CMat, g: &CMat) -> CMat {
    let n = theta.n();
    let th: Vec<CMat> = theta
        .sections()
        .iter()
        .map(|s| s.map(|x| Complex64::new(x, 0.0)))
        .collect();
    let mut out = CMat::zeros(n, n);
    for j in 0..n {
        let mut weighted = CMat::zeros(n, n);
        for k in 0..n {
            let p = pi[(j, k)];
            if p != Complex64::new(0.0, 0.0) {
                weighted += &th[k] * p;
            }
        }
        if weighted.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
            out += th[j].transpose() * g * weighted;
        }
    }
    out
}

/// Real counterpart of [`mho_sandwich`].
pub fn mho_sandwich_real(theta: &SectionArray<f64>, p: &RMat, g: &RMat) -> RMat {
    let n = theta.n();
    let mut out = RMat::zeros(n, n);
    for j in 0..n {
        let mut weighted = RMat::zeros(n, n);
        for k in 0..n {
            let c = p[(j, k)];
            if c != 0.0 {
                weighted += theta.section(k) * c;
            }
        }
        out += theta.section(j).transpose() * g * weighted;
    }
    out
}

/// Levi-Civita symbol on zero-based indices.
pub fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The structure constants `(α, β)` of `X X^T = α + β · X`, with the CCR
/// array `Θ = Im β` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    alpha: RMat,
    beta: SectionArray<Complex64>,
    theta: SectionArray<f64>,
}

impl StructureConstants {
    /// Validating constructor. Symmetry defects of α and Hermiticity defects
    /// of the β sections up to [`REPAIR_TOLERANCE`] are repaired; larger ones
    /// are rejected.
    pub fn new(alpha: RMat, beta: SectionArray<Complex64>) -> Result<Self> {
        let n = beta.n();
        if alpha.shape() != (n, n) {
            return Err(Error::dims("alpha", format!("{n}x{n}"), format!("{:?}", alpha.shape())));
        }
        if alpha.iter().chain(beta.sections().iter().flat_map(|s| s.iter().map(|z| &z.re)))
            .any(|x| !x.is_finite())
            || beta.sections().iter().flat_map(|s| s.iter()).any(|z| !z.im.is_finite())
        {
            return Err(Error::InvalidStructure("non-finite entry".into()));
        }
        let (asym, at) = alpha_asymmetry(&alpha);
        if asym > REPAIR_TOLERANCE {
            let (j, k) = at.unwrap();
            return Err(Error::InvalidStructure(format!(
                "alpha is not symmetric: |alpha[{j}][{k}] - alpha[{k}][{j}]| = {asym:.3e}"
            )));
        }
        let (herm, hat) = beta_non_hermiticity(&beta);
        if herm > REPAIR_TOLERANCE {
            let (j, k, l) = hat.unwrap();
            return Err(Error::InvalidStructure(format!(
                "beta section {l} is not Hermitian at ({j}, {k}): defect {herm:.3e}"
            )));
        }
        let alpha = (&alpha + alpha.transpose()) * 0.5;
        let half = Complex64::new(0.5, 0.0);
        let beta = SectionArray {
            sections: beta
                .sections()
                .iter()
                .map(|s| (s + s.adjoint()) * half)
                .collect(),
        };
        let theta = beta.map(|z| z.im);
        Ok(Self { alpha, beta, theta })
    }

    /// Stores the inputs verbatim. Intended for diagnostics of defective
    /// constants with [`validate_structure`] and [`crate::oracle::check_algebra`].
    pub fn from_parts_unchecked(alpha: RMat, beta: SectionArray<Complex64>) -> Self {
        let theta = beta.map(|z| z.im);
        Self { alpha, beta, theta }
    }

    pub fn n(&self) -> usize {
        self.beta.n()
    }

    pub fn alpha(&self) -> &RMat {
        &self.alpha
    }

    pub fn beta(&self) -> &SectionArray<Complex64> {
        &self.beta
    }

    /// CCR array `Θ = Im β`.
    pub fn theta(&self) -> &SectionArray<f64> {
        &self.theta
    }

    pub fn re_beta(&self) -> SectionArray<f64> {
        self.beta.map(|z| z.re)
    }

    pub fn mho(&self) -> RMat {
        stack_mho(&self.theta)
    }

    /// `Π(μ) = α + β · μ`, the second-moment matrix of variables with mean `μ`.
    pub fn second_moment(&self, mu: &RVec) -> Result<CMat> {
        let mu_c = mu.map(|x| Complex64::new(x, 0.0));
        let bm = self.beta.dot(&mu_c)?;
        Ok(self.alpha.map(|x| Complex64::new(x, 0.0)) + bm)
    }
}

fn alpha_asymmetry(alpha: &RMat) -> (f64, Option<(usize, usize)>) {
    let n = alpha.nrows();
    let mut worst = (0.0, None);
    for j in 0..n {
        for k in (j + 1)..n.min(alpha.ncols()) {
            let d = (alpha[(j, k)] - alpha[(k, j)]).abs();
            if d > worst.0 || (worst.1.is_none() && d > 0.0) {
                worst = (d, Some((j, k)));
            }
        }
    }
    worst
}

fn beta_non_hermiticity(beta: &SectionArray<Complex64>) -> (f64, Option<(usize, usize, usize)>) {
    let n = beta.n();
    let mut worst = (0.0, None);
    for l in 0..n {
        let s = beta.section(l);
        for j in 0..n {
            for k in j..n {
                let d = (s[(j, k)] - s[(k, j)].conj()).norm();
                if d > worst.0 {
                    worst = (d, Some((j, k, l)));
                }
            }
        }
    }
    worst
}

fn theta_symmetry_defect(theta: &SectionArray<f64>) -> (f64, Option<(usize, usize, usize)>) {
    let n = theta.n();
    let mut worst = (0.0, None);
    for l in 0..n {
        let s = theta.section(l);
        for j in 0..n {
            for k in j..n {
                let d = (s[(j, k)] + s[(k, j)]).abs();
                if d > worst.0 {
                    worst = (d, Some((j, k, l)));
                }
            }
        }
    }
    worst
}

/// Worst defects of the structure-constant invariants, with their locations
/// (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tol: f64,
    pub alpha_asymmetry: f64,
    pub alpha_asymmetry_at: Option<(usize, usize)>,
    pub beta_non_hermiticity: f64,
    pub beta_non_hermiticity_at: Option<(usize, usize, usize)>,
    pub theta_symmetry_defect: f64,
    pub theta_symmetry_defect_at: Option<(usize, usize, usize)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.alpha_asymmetry <= self.tol
            && self.beta_non_hermiticity <= self.tol
            && self.theta_symmetry_defect <= self.tol
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alpha_asymmetry = {:.3e} at {:?}", self.alpha_asymmetry, self.alpha_asymmetry_at)?;
        writeln!(
            f,
            "beta_non_hermiticity = {:.3e} at {:?}",
            self.beta_non_hermiticity, self.beta_non_hermiticity_at
        )?;
        writeln!(
            f,
            "theta_symmetry_defect = {:.3e} at {:?}",
            self.theta_symmetry_defect, self.theta_symmetry_defect_at
        )?;
        write!(f, "structure {}", if self.passed() { "ok" } else { "FAILED" })
    }
}

pub fn validate_structure(sc: &StructureConstants, tol: f64) -> ValidationReport {
    let (alpha_asymmetry, alpha_asymmetry_at) = alpha_asymmetry(sc.alpha());
    let (beta_non_hermiticity, beta_non_hermiticity_at) = beta_non_hermiticity(sc.beta());
    let (theta_symmetry_defect, theta_symmetry_defect_at) = theta_symmetry_defect(sc.theta());
    ValidationReport {
        tol,
        alpha_asymmetry,
        alpha_asymmetry_at,
        beta_non_hermiticity,
        beta_non_hermiticity_at,
        theta_symmetry_defect,
        theta_symmetry_defect_at,
    }
}

/// Constants of the Pauli matrices: `α = I_3`, `β = iΘ`, `θ_{jkℓ} = ε_{jkℓ}`.
pub fn pauli_structure() -> StructureConstants {
    let beta = SectionArray::from_fn(3, |j, k, l| I * levi_civita(j, k, l));
    StructureConstants::new(RMat::identity(3, 3), beta).expect("Pauli constants are consistent")
}
