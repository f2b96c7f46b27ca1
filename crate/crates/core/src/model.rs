//! System parameters and the coefficients of the quasilinear QSDE
//! `dX = (AX + b) dt + B(X) dW`, together with the averaged diffusion
//! matrix `Λ(μ) = 4 ℧^T ((α + β·μ) ⊗ (M^T Ω M)) ℧`.

use num_complex::Complex64;

use crate::algebra::{mho_sandwich, mho_transpose_col, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{to_complex, CMat, RMat, RVec, I};

/// `Ω = I_m + iJ` and `J = I_{m/2} ⊗ [[0, 1], [-1, 0]]`.
pub fn ito_matrix(m: usize) -> Result<(CMat, RMat)> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSystem(format!(
            "field dimension m = {m} must be even and positive"
        )));
    }
    let mut j = RMat::zeros(m, m);
    for p in 0..m / 2 {
        j[(2 * p, 2 * p + 1)] = 1.0;
        j[(2 * p + 1, 2 * p)] = -1.0;
    }
    let omega = CMat::identity(m, m) + to_complex(&j) * I;
    Ok((omega, j))
}

/// Energy vector and coupling parameters on top of the structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    sc: StructureConstants,
    energy: RVec,
    coupling_gain: RMat,
    coupling_offset: RVec,
    feedthrough: Option<RMat>,
}

impl SystemParams {
    /// `energy` is `E`, `coupling_gain` is the `m x n` matrix `M`,
    /// `coupling_offset` is the `m`-vector `N`.
    pub fn new(sc: StructureConstants, energy: RVec, coupling_gain: RMat, coupling_offset: RVec) -> Result<Self> {
        let n = sc.n();
        if energy.len() != n {
            return Err(Error::dims("energy vector", n, energy.len()));
        }
        let m = coupling_gain.nrows();
        if coupling_gain.ncols() != n {
            return Err(Error::dims("coupling gain M columns", n, coupling_gain.ncols()));
        }
        if coupling_offset.len() != m {
            return Err(Error::dims("coupling offset N", m, coupling_offset.len()));
        }
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::InvalidSystem(format!(
                "number of field channels m = {m} must be even and positive"
            )));
        }
        if energy.iter().chain(coupling_gain.iter()).chain(coupling_offset.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSystem("non-finite energy or coupling entry".into()));
        }
        Ok(Self {
            sc,
            energy,
            coupling_gain,
            coupling_offset,
            feedthrough: None,
        })
    }

    /// Attaches an output feedthrough `D` made of conjugate pairs of rows of
    /// an `m x m` permutation matrix.
    pub fn with_feedthrough(mut self, d: RMat) -> Result<Self> {
        let m = self.m();
        let r = d.nrows();
        if d.ncols() != m {
            return Err(Error::dims("feedthrough D columns", m, d.ncols()));
        }
        if r == 0 || !r.is_multiple_of(2) || r > m {
            return Err(Error::InvalidSystem(format!("feedthrough rows r = {r} must be even, 0 < r <= m")));
        }
        let mut pick = Vec::with_capacity(r);
        for i in 0..r {
            let row = d.row(i);
            let ones: Vec<usize> = (0..m).filter(|&c| row[c] == 1.0).collect();
            if ones.len() != 1 || row.iter().filter(|x| **x != 0.0).count() != 1 {
                return Err(Error::InvalidSystem(format!("feedthrough row {i} is not a unit row")));
            }
            pick.push(ones[0]);
        }
        for p in 0..r / 2 {
            let (a, b) = (pick[2 * p], pick[2 * p + 1]);
            if a % 2 != 0 || b != a + 1 {
                return Err(Error::InvalidSystem(format!(
                    "feedthrough rows {} and {} do not select a conjugate channel pair",
                    2 * p,
                    2 * p + 1
                )));
            }
        }
        let mut seen = pick.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != r {
            return Err(Error::InvalidSystem("feedthrough selects a channel twice".into()));
        }
        self.feedthrough = Some(d);
        Ok(self)
    }

    pub fn with_energy(&self, energy: RVec) -> Result<Self> {
        let mut s = Self::new(self.sc.clone(), energy, self.coupling_gain.clone(), self.coupling_offset.clone())?;
        s.feedthrough = self.feedthrough.clone();
        Ok(s)
    }

    pub fn with_coupling(&self, gain: RMat, offset: RVec) -> Result<Self> {
        let mut s = Self::new(self.sc.clone(), self.energy.clone(), gain, offset)?;
        s.feedthrough = self.feedthrough.clone();
        Ok(s)
    }

    pub fn sc(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn n(&self) -> usize {
        self.sc.n()
    }

    pub fn m(&self) -> usize {
        self.coupling_gain.nrows()
    }

    pub fn energy(&self) -> &RVec {
        &self.energy
    }

    pub fn coupling_gain(&self) -> &RMat {
        &self.coupling_gain
    }

    pub fn coupling_offset(&self) -> &RVec {
        &self.coupling_offset
    }

    pub fn feedthrough(&self) -> Option<&RMat> {
        self.feedthrough.as_ref()
    }

    /// `G = M^T Ω M`.
    pub fn noise_gram(&self) -> CMat {
        let (omega, _) = ito_matrix(self.m()).expect("m validated at construction");
        let mc = to_complex(&self.coupling_gain);
        mc.transpose() * omega * mc
    }

    pub fn is_uncoupled(&self) -> bool {
        self.coupling_gain.iter().all(|x| *x == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub a0: RMat,
    pub a_tilde: RMat,
    pub a: RMat,
    pub b: RVec,
    pub c: Option<RMat>,
    pub d: Option<RVec>,
    pub mho: RMat,
    pub omega: CMat,
    pub j: RMat,
}

pub fn coefficients(sys: &SystemParams) -> CoefficientSet {
    let sc = sys.sc();
    let theta = sc.theta();
    let re_beta = sc.re_beta();
    let n = sys.n();
    let (omega, j) = ito_matrix(sys.m()).expect("m validated at construction");
    let m = sys.coupling_gain();
    let nvec = sys.coupling_offset();

    let a0 = theta.diamond(&(sys.energy() * 2.0)).expect("n validated");

    let mt = m.transpose();
    let drift_shift = &mt * &j * nvec;
    let mut a_tilde = theta.diamond(&(drift_shift * 2.0)).expect("n validated");
    let jm = &j * m;
    for l in 0..n {
        let inner = m * theta.slice_first(l) + &jm * re_beta.slice_first(l);
        a_tilde += theta.section(l) * &mt * inner * 2.0;
    }

    let s = &mt * &j * m * sc.alpha();
    let b = mho_transpose_col(theta, &s) * -2.0;

    let (c, d) = match sys.feedthrough() {
        Some(dm) => (Some(dm * &j * m * 2.0), Some(dm * &j * nvec * 2.0)),
        None => (None, None),
    };

    CoefficientSet {
        a: &a0 + &a_tilde,
        a0,
        a_tilde,
        b,
        c,
        d,
        mho: sc.mho(),
        omega,
        j,
    }
}

/// `Λ(μ) = 4 ℧^T ((α + β·μ) ⊗ G) ℧` with `G = M^T Ω M`.
pub fn lambda_matrix(sys: &SystemParams, mu: &RVec) -> Result<CMat> {
    let pi = sys.sc().second_moment(mu)?;
    Ok(mho_sandwich(sys.sc().theta(), &pi, &sys.noise_gram()) * Complex64::new(4.0, 0.0))
}

/// `Λ̇(0) = 4 ℧^T ((β·(A μ(0) + b)) ⊗ G) ℧`.
pub fn lambda_dot0(sys: &SystemParams, coeffs: &CoefficientSet, mu0: &RVec) -> Result<CMat> {
    if mu0.len() != sys.n() {
        return Err(Error::dims("initial mean", sys.n(), mu0.len()));
    }
    let rate = &coeffs.a * mu0 + &coeffs.b;
    let rate_c = rate.map(|x| Complex64::new(x, 0.0));
    let pi_dot = sys.sc().beta().dot(&rate_c)?;
    Ok(mho_sandwich(sys.sc().theta(), &pi_dot, &sys.noise_gram()) * Complex64::new(4.0, 0.0))
}

/// Λ as an affine map of μ, with the constant part and the per-coordinate
/// slopes precomputed.
#[derive(Debug, Clone)]
pub struct LambdaMap {
    constant: CMat,
    slopes: Vec<CMat>,
}

impl LambdaMap {
    pub fn new(sys: &SystemParams) -> Self {
        let sc = sys.sc();
        let g = sys.noise_gram();
        let four = Complex64::new(4.0, 0.0);
        let constant = mho_sandwich(sc.theta(), &to_complex(sc.alpha()), &g) * four;
        let slopes = sc
            .beta()
            .sections()
            .iter()
            .map(|bl| mho_sandwich(sc.theta(), bl, &g) * four)
            .collect();
        Self { constant, slopes }
    }

    pub fn eval(&self, mu: &RVec) -> CMat {
        let mut out = self.constant.clone();
        for (s, &x) in self.slopes.iter().zip(mu.iter()) {
            if x != 0.0 {
                out += s * Complex64::new(x, 0.0);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.constant.iter().chain(self.slopes.iter().flat_map(|s| s.iter())).all(|z| z.norm() == 0.0)
    }
}
