//! Two systems with direct energy coupling. The joint variables are
//! `(X1; X2; X1 ⊗ X2)` with the product block ordered so that entry
//! `j * n2 + k` is `X1_j X2_k`, and each subsystem couples only to its own
//! external field.

use std::fmt;
use std::ops::Range;

use crate::algebra::StructureConstants;
use crate::energy::{fmt_row, optimal_energy, rk_matrices};
use crate::error::{Error, Result};
use crate::linalg::{RMat, RVec};
use crate::model::SystemParams;
use crate::moments::{InitialMoments, WeightingSpec};
use crate::oracle::{check_algebra, fit_structure_constants, qubit_representation, tensor_representation, Representation};

/// Tolerance for matching a subsystem to its representation and for
/// verifying the fitted joint constants.
pub const COMPOSITE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSystem {
    sub1: SystemParams,
    sub2: SystemParams,
    rep: Representation,
    joint: SystemParams,
}

impl CompositeSystem {
    pub fn sub1(&self) -> &SystemParams {
        &self.sub1
    }

    pub fn sub2(&self) -> &SystemParams {
        &self.sub2
    }

    /// Joint dense representation the structure constants were fitted to.
    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    /// The composite as an ordinary system.
    pub fn joint(&self) -> &SystemParams {
        &self.joint
    }

    pub fn n1(&self) -> usize {
        self.sub1.n()
    }

    pub fn n2(&self) -> usize {
        self.sub2.n()
    }

    pub fn n(&self) -> usize {
        self.joint.n()
    }

    pub fn block1(&self) -> Range<usize> {
        0..self.n1()
    }

    pub fn block2(&self) -> Range<usize> {
        self.n1()..self.n1() + self.n2()
    }

    pub fn block12(&self) -> Range<usize> {
        self.n1() + self.n2()..self.n()
    }

    /// `(E1, E2, E12)`.
    pub fn energy_blocks(&self) -> (RVec, RVec, RVec) {
        let e = self.joint.energy();
        (
            e.rows_range(self.block1()).into_owned(),
            e.rows_range(self.block2()).into_owned(),
            e.rows_range(self.block12()).into_owned(),
        )
    }

    /// Same subsystems and fitted constants with new energy blocks.
    pub fn with_energies(&self, e1: &RVec, e2: &RVec, e12: &RVec) -> Result<Self> {
        let sub1 = self.sub1.with_energy(e1.clone())?;
        let sub2 = self.sub2.with_energy(e2.clone())?;
        let energy = joint_energy(&sub1, &sub2, e12)?;
        Ok(Self {
            joint: self.joint.with_energy(energy)?,
            sub1,
            sub2,
            rep: self.rep.clone(),
        })
    }

    /// `μ0 = (μ1, μ2, μ1 ⊗ μ2)`, the mean of an uncorrelated product state.
    pub fn product_initial_moments(&self, mu1: &RVec, mu2: &RVec) -> Result<InitialMoments> {
        if mu1.len() != self.n1() {
            return Err(Error::dims("subsystem 1 initial mean", self.n1(), mu1.len()));
        }
        if mu2.len() != self.n2() {
            return Err(Error::dims("subsystem 2 initial mean", self.n2(), mu2.len()));
        }
        let mut mu = RVec::zeros(self.n());
        mu.rows_range_mut(self.block1()).copy_from(mu1);
        mu.rows_range_mut(self.block2()).copy_from(mu2);
        mu.rows_range_mut(self.block12()).copy_from(&mu1.kronecker(mu2));
        InitialMoments::new(&self.joint, mu)
    }
}

fn joint_energy(sub1: &SystemParams, sub2: &SystemParams, e12: &RVec) -> Result<RVec> {
    let (n1, n2) = (sub1.n(), sub2.n());
    if e12.len() != n1 * n2 {
        return Err(Error::dims("direct coupling energy E12", n1 * n2, e12.len()));
    }
    Ok(RVec::from_iterator(
        n1 + n2 + n1 * n2,
        sub1.energy().iter().chain(sub2.energy().iter()).chain(e12.iter()).copied(),
    ))
}

fn check_subsystem(label: &str, sys: &SystemParams, rep: &Representation) -> Result<()> {
    if rep.n() != sys.n() {
        return Err(Error::InvalidRepresentation(format!(
            "{label}: representation has {} variables, system has {}",
            rep.n(),
            sys.n()
        )));
    }
    let report = check_algebra(rep, sys.sc(), COMPOSITE_TOLERANCE)?;
    if !report.passed() {
        return Err(Error::InvalidRepresentation(format!(
            "{label}: structure constants do not match the representation ({report})"
        )));
    }
    if sys.feedthrough().is_some() {
        return Err(Error::InvalidSystem(format!("{label}: output feedthrough is not supported in a composite")));
    }
    Ok(())
}

/// Fits the joint structure constants from the tensor representation and
/// assembles `E = (E1, E2, E12)`, `M = [[M1, 0, 0], [0, M2, 0]]`, `N = (N1; N2)`.
pub fn compose(
    sub1: &SystemParams,
    rep1: &Representation,
    sub2: &SystemParams,
    rep2: &Representation,
    e12: &RVec,
) -> Result<CompositeSystem> {
    check_subsystem("subsystem 1", sub1, rep1)?;
    check_subsystem("subsystem 2", sub2, rep2)?;
    let rep = tensor_representation(rep1, rep2);
    let sc = fit_structure_constants(&rep)?;
    let report = check_algebra(&rep, &sc, COMPOSITE_TOLERANCE)?;
    if !report.passed() {
        return Err(Error::InvalidRepresentation(format!("joint constants failed verification: {report}")));
    }
    compose_with(sub1, sub2, rep, sc, e12)
}

/// Two qubits with the Pauli representation.
pub fn compose_qubits(sub1: &SystemParams, sub2: &SystemParams, e12: &RVec) -> Result<CompositeSystem> {
    let q = qubit_representation();
    compose(sub1, &q, sub2, &q, e12)
}

fn compose_with(
    sub1: &SystemParams,
    sub2: &SystemParams,
    rep: Representation,
    sc: StructureConstants,
    e12: &RVec,
) -> Result<CompositeSystem> {
    let (n1, n2) = (sub1.n(), sub2.n());
    let (m1, m2) = (sub1.m(), sub2.m());
    let n = n1 + n2 + n1 * n2;
    let mut gain = RMat::zeros(m1 + m2, n);
    gain.view_mut((0, 0), (m1, n1)).copy_from(sub1.coupling_gain());
    gain.view_mut((m1, n1), (m2, n2)).copy_from(sub2.coupling_gain());
    let offset = RVec::from_iterator(
        m1 + m2,
        sub1.coupling_offset().iter().chain(sub2.coupling_offset().iter()).copied(),
    );
    let joint = SystemParams::new(sc, joint_energy(sub1, sub2, e12)?, gain, offset)?;
    Ok(CompositeSystem {
        sub1: sub1.clone(),
        sub2: sub2.clone(),
        rep,
        joint,
    })
}

/// Bottom block row of `R` and bottom block of `K` for the composite.
#[derive(Debug, Clone, PartialEq)]
pub struct RkBlocks {
    pub r1: RMat,
    pub r2: RMat,
    pub r12: RMat,
    pub k12: RVec,
}

pub fn partition_rk(composite: &CompositeSystem, init: &InitialMoments, weights: &WeightingSpec) -> Result<RkBlocks> {
    let (r, k) = rk_matrices(composite.joint(), init, weights)?;
    let (n1, n2) = (composite.n1(), composite.n2());
    let p = n1 * n2;
    let off = n1 + n2;
    Ok(RkBlocks {
        r1: r.view((off, 0), (p, n1)).into_owned(),
        r2: r.view((off, n1), (p, n2)).into_owned(),
        r12: r.view((off, off), (p, p)).into_owned(),
        k12: k.rows(off, p).into_owned(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOptimality {
    pub blocks: RkBlocks,
    /// `Q = K12 + 2 (R1 E1 + R2 E2)`.
    pub q: RVec,
    /// Minimum-norm solution of `2 R12 E12 + Q = 0`.
    pub e12_star: RVec,
    pub null_dim: usize,
    pub residual: f64,
}

impl fmt::Display for BlockOptimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Q = [{}]", fmt_row(self.q.iter()))?;
        let kind = if self.null_dim == 0 {
            "unique".to_string()
        } else {
            format!("nonunique, null dim {}", self.null_dim)
        };
        writeln!(f, "E12_star = [{}] ({kind})", fmt_row(self.e12_star.iter()))?;
        write!(f, "residual = {:.6e}", self.residual)
    }
}

/// Optimal direct coupling for fixed individual energies.
pub fn optimal_direct_coupling(blocks: &RkBlocks, e1: &RVec, e2: &RVec, tol: f64) -> Result<BlockOptimality> {
    if e1.len() != blocks.r1.ncols() {
        return Err(Error::dims("E1", blocks.r1.ncols(), e1.len()));
    }
    if e2.len() != blocks.r2.ncols() {
        return Err(Error::dims("E2", blocks.r2.ncols(), e2.len()));
    }
    let q = &blocks.k12 + (&blocks.r1 * e1 + &blocks.r2 * e2) * 2.0;
    let opt = optimal_energy(&blocks.r12, &q, tol)?;
    Ok(BlockOptimality {
        blocks: blocks.clone(),
        q,
        e12_star: opt.e_star,
        null_dim: opt.null_dim,
        residual: opt.residual,
    })
}
