//! Explicit matrix representations of the system variables, used as ground
//! truth for structure constants and commutation relations.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{SectionArray, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, RMat, I};

/// Residual threshold for [`fit_structure_constants`].
pub const FIT_THRESHOLD: f64 = 1e-10;

/// Relative singular-value cut-off below which the regression basis is
/// declared degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// `n` Hermitian `d x d` matrices standing for the system variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub label: String,
    d: usize,
    matrices: Vec<CMat>,
}

impl Representation {
    pub fn new(label: impl Into<String>, matrices: Vec<CMat>) -> Result<Self> {
        let d = matrices
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::InvalidRepresentation("no matrices".into()))?;
        for (k, m) in matrices.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::InvalidRepresentation(format!(
                    "matrix {k} has shape {:?}, expected {d}x{d}",
                    m.shape()
                )));
            }
            let defect = (m - m.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            if defect > 1e-12 {
                return Err(Error::InvalidRepresentation(format!(
                    "matrix {k} is not Hermitian (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            d,
            matrices,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The Pauli matrices `σ_1, σ_2, σ_3` on the qubit space.
pub fn qubit_representation() -> Representation {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let s1 = CMat::from_row_slice(2, 2, &[z, one, one, z]);
    let s2 = CMat::from_row_slice(2, 2, &[z, -I, I, z]);
    let s3 = CMat::from_row_slice(2, 2, &[one, z, z, -one]);
    Representation::new("qubit", vec![s1, s2, s3]).expect("Pauli matrices are Hermitian")
}

/// Joint variables `(X1 ⊗ I; I ⊗ X2; X1 ⊗ X2)` of two commuting systems. The
/// product block is ordered so that entry `j * n2 + k` is `X1_j ⊗ X2_k`.
pub fn tensor_representation(r1: &Representation, r2: &Representation) -> Representation {
    let (d1, d2) = (r1.d(), r2.d());
    let i1 = CMat::identity(d1, d1);
    let i2 = CMat::identity(d2, d2);
    let mut matrices = Vec::with_capacity(r1.n() + r2.n() + r1.n() * r2.n());
    matrices.extend(r1.matrices().iter().map(|x| x.kronecker(&i2)));
    matrices.extend(r2.matrices().iter().map(|y| i1.kronecker(y)));
    for x in r1.matrices() {
        for y in r2.matrices() {
            matrices.push(x.kronecker(y));
        }
    }
    Representation {
        label: format!("{}⊗{}", r1.label, r2.label),
        d: d1 * d2,
        matrices,
    }
}

fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Recovers `(α, β)` from a representation by one least-squares regression
/// of each product `X_j X_k` on `{I, X_1, …, X_n}`.
pub fn fit_structure_constants(rep: &Representation) -> Result<StructureConstants> {
    let (n, d) = (rep.n(), rep.d());
    let mut basis = CMat::zeros(d * d, n + 1);
    basis.set_column(0, &vec_of(&CMat::identity(d, d)));
    for (l, x) in rep.matrices().iter().enumerate() {
        basis.set_column(l + 1, &vec_of(x));
    }
    let svd = basis.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
    let smin = svd.singular_values.iter().fold(f64::INFINITY, |a, s| a.min(*s));
    let rel = if smax > 0.0 { smin / smax } else { 0.0 };
    if rel < DEGENERACY_THRESHOLD || n + 1 > d * d {
        return Err(Error::DegenerateBasis { rel_singular_value: rel });
    }
    let pinv = svd
        .pseudo_inverse(0.0)
        .map_err(|e| Error::InternalConsistency(e.to_string()))?;

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).collect();
    let coeffs: Vec<CVec> = pairs
        .par_iter()
        .map(|&(j, k)| &pinv * vec_of(&(&rep.matrices()[j] * &rep.matrices()[k])))
        .collect();

    let mut alpha = RMat::zeros(n, n);
    let mut beta = SectionArray::<Complex64>::zeros(n);
    let mut sections: Vec<CMat> = beta.sections().to_vec();
    for (&(j, k), cf) in pairs.iter().zip(&coeffs) {
        alpha[(j, k)] = cf[0].re;
        for l in 0..n {
            sections[l][(j, k)] = cf[l + 1];
        }
    }
    let half = c(0.5, 0.0);
    let sections = sections.iter().map(|s| (s + s.adjoint()) * half).collect();
    beta = SectionArray::from_sections(sections)?;
    let alpha = (&alpha + alpha.transpose()) * 0.5;
    let sc = StructureConstants::from_parts_unchecked(alpha, beta);

    let report = check_algebra(rep, &sc, f64::INFINITY)?;
    if report.algebra_residual > FIT_THRESHOLD {
        return Err(Error::NotRepresentable {
            residual: report.algebra_residual,
            threshold: FIT_THRESHOLD,
        });
    }
    StructureConstants::new(sc.alpha().clone(), sc.beta().clone())
}

/// Worst Frobenius residuals of the product and commutator identities over
/// all pairs `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport {
    pub tol: f64,
    pub algebra_residual: f64,
    pub algebra_worst_pair: (usize, usize),
    pub ccr_residual: f64,
    pub ccr_worst_pair: (usize, usize),
}

impl AlgebraReport {
    pub fn algebra_ok(&self) -> bool {
        self.algebra_residual <= self.tol
    }

    pub fn ccr_ok(&self) -> bool {
        self.ccr_residual <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.algebra_ok() && self.ccr_ok()
    }
}

impl fmt::Display for AlgebraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "algebra_residual = {:.3e} at {:?}",
            self.algebra_residual, self.algebra_worst_pair
        )?;
        writeln!(f, "ccr_residual = {:.3e} at {:?}", self.ccr_residual, self.ccr_worst_pair)?;
        write!(
            f,
            "algebra {}, CCR {}",
            if self.algebra_ok() { "ok" } else { "FAILED" },
            if self.ccr_ok() { "ok" } else { "FAILED" }
        )
    }
}

/// Checks `X_j X_k = α_{jk} I + Σ_ℓ β_{jkℓ} X_ℓ` and
/// `[X_j, X_k] = 2i Σ_ℓ θ_{jkℓ} X_ℓ` on the representation.
pub fn check_algebra(rep: &Representation, sc: &StructureConstants, tol: f64) -> Result<AlgebraReport> {
    let (n, d) = (rep.n(), rep.d());
    if sc.n() != n {
        return Err(Error::dims("check_algebra", n, sc.n()));
    }
    let x = rep.matrices();
    let id = CMat::identity(d, d);
    let mut report = AlgebraReport {
        tol,
        algebra_residual: 0.0,
        algebra_worst_pair: (0, 0),
        ccr_residual: 0.0,
        ccr_worst_pair: (0, 0),
    };
    for j in 0..n {
        for k in 0..n {
            let prod = &x[j] * &x[k];
            let mut affine = &id * c(sc.alpha()[(j, k)], 0.0);
            let mut comm_rhs = CMat::zeros(d, d);
            for (l, xl) in x.iter().enumerate() {
                affine += xl * sc.beta().get(j, k, l);
                comm_rhs += xl * (I * 2.0 * sc.theta().get(j, k, l));
            }
            let r1 = frob(&(&prod - affine));
            let r2 = frob(&(&prod - &x[k] * &x[j] - comm_rhs));
            if r1 > report.algebra_residual {
                report.algebra_residual = r1;
                report.algebra_worst_pair = (j, k);
            }
            if r2 > report.ccr_residual {
                report.ccr_residual = r2;
                report.ccr_worst_pair = (j, k);
            }
        }
    }
    Ok(report)
}
