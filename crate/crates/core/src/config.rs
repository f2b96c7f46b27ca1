//! JSON run configurations and their conversion into model values.
//!
//! Matrices are arrays of rows. A complex section array `β` is given as two
//! real arrays `beta_re`, `beta_im` of `n` sections each, and a dense
//! representation as `matrices_re`, `matrices_im`.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{pauli_structure, SectionArray, StructureConstants};
use crate::decoherence::TauOptions;
use crate::interconnect::{compose, CompositeSystem};
use crate::linalg::{CMat, RMat, RVec};
use crate::model::SystemParams;
use crate::moments::{InitialMoments, TimeGrid, WeightingSpec};
use crate::oracle::{fit_structure_constants, qubit_representation, Representation};

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySpec>,
    pub coupling: CouplingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// A qubit with the Pauli matrices as variables.
    Pauli,
    /// Structure constants given directly.
    Custom { alpha: Rows, beta_re: Vec<Rows>, beta_im: Vec<Rows> },
    /// Hermitian matrices; the structure constants are fitted.
    Representation {
        #[serde(default)]
        label: String,
        matrices_re: Vec<Rows>,
        matrices_im: Vec<Rows>,
    },
    /// Two systems with direct energy coupling. Each part needs a
    /// representation, so only `pauli` and `representation` are accepted.
    Composite { sub1: Box<SystemSpec>, sub2: Box<SystemSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    Vector(Vec<f64>),
    Blocks {
        e1: Vec<f64>,
        e2: Vec<f64>,
        #[serde(default)]
        e12: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub m: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingSpec {
    Single(Coupling),
    PerSubsystem { sub1: Coupling, sub2: Coupling },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitSpec {
    Mean { mu0: Vec<f64> },
    Product { mu1: Vec<f64>, mu2: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Sigma { sigma: Rows },
    Factor { f: Rows },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Uniform { t_end: f64, intervals: usize },
    Times { times: Vec<f64> },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Uniform {
            t_end: 1.0,
            intervals: 100,
        }
    }
}

fn default_eps() -> Vec<f64> {
    vec![0.01]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    pub grid: GridSpec,
    pub eps: Vec<f64>,
    pub tau: TauOptions,
    /// Energies compared against the optimum by `optimize-energy`.
    pub comparisons: Vec<Vec<f64>>,
    /// Scalar multipliers of `M` swept by `sweep`; empty means `[1]`.
    pub gains: Vec<f64>,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            eps: default_eps(),
            tau: TauOptions::default(),
            comparisons: Vec::new(),
            gains: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Destination file; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Rendering of the report commands. Trajectories and sweeps are always CSV.
    pub format: OutputFormat,
}

/// A configuration problem, located by field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = std::result::Result<T, ConfigError>;

fn at<T>(field: &str, r: crate::Result<T>) -> CResult<T> {
    r.map_err(|e| ConfigError::new(field, e))
}

impl RunConfig {
    pub fn from_json(text: &str) -> CResult<Self> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("<document>", e))
    }

    pub fn load(path: &Path) -> CResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn build(&self) -> CResult<Problem> {
        let (sys, composite, rep) = match &self.system {
            SystemSpec::Composite { sub1, sub2 } => {
                let CouplingSpec::PerSubsystem { sub1: c1, sub2: c2 } = &self.coupling else {
                    return Err(ConfigError::new("coupling", "a composite needs `sub1` and `sub2` couplings"));
                };
                let (sc1, rep1) = structure(sub1, "system.sub1")?;
                let (sc2, rep2) = structure(sub2, "system.sub2")?;
                let rep1 = rep1.ok_or_else(|| ConfigError::new("system.sub1", "composite parts need a representation"))?;
                let rep2 = rep2.ok_or_else(|| ConfigError::new("system.sub2", "composite parts need a representation"))?;
                let (n1, n2) = (sc1.n(), sc2.n());
                let (e1, e2, e12) = match &self.energy {
                    None => (RVec::zeros(n1), RVec::zeros(n2), RVec::zeros(n1 * n2)),
                    Some(EnergySpec::Blocks { e1, e2, e12 }) => (
                        vector(e1, "energy.e1")?,
                        vector(e2, "energy.e2")?,
                        e12.as_ref().map_or(Ok(RVec::zeros(n1 * n2)), |v| vector(v, "energy.e12"))?,
                    ),
                    Some(EnergySpec::Vector(v)) => {
                        let e = vector(v, "energy")?;
                        if e.len() != n1 + n2 + n1 * n2 {
                            return Err(ConfigError::new("energy", format!("expected {} entries, found {}", n1 + n2 + n1 * n2, e.len())));
                        }
                        (e.rows(0, n1).into_owned(), e.rows(n1, n2).into_owned(), e.rows(n1 + n2, n1 * n2).into_owned())
                    }
                };
                let s1 = subsystem(sc1, e1, c1, "coupling.sub1", "energy.e1")?;
                let s2 = subsystem(sc2, e2, c2, "coupling.sub2", "energy.e2")?;
                let c = at("system", compose(&s1, &rep1, &s2, &rep2, &e12))?;
                (c.joint().clone(), Some(c), None)
            }
            spec => {
                let CouplingSpec::Single(c) = &self.coupling else {
                    return Err(ConfigError::new("coupling", "a single system needs `m` (and optionally `n`)"));
                };
                let (sc, rep) = structure(spec, "system")?;
                let e = match &self.energy {
                    None => RVec::zeros(sc.n()),
                    Some(EnergySpec::Vector(v)) => vector(v, "energy")?,
                    Some(EnergySpec::Blocks { .. }) => {
                        return Err(ConfigError::new("energy", "energy blocks apply to composite systems only"))
                    }
                };
                (subsystem(sc, e, c, "coupling", "energy")?, None, rep)
            }
        };

        let n = sys.n();
        let init = match (&self.init, &composite) {
            (None, _) => at("init", InitialMoments::new(&sys, RVec::zeros(n)))?,
            (Some(InitSpec::Mean { mu0 }), _) => at("init.mu0", InitialMoments::new(&sys, vector(mu0, "init.mu0")?))?,
            (Some(InitSpec::Product { mu1, mu2 }), Some(c)) => {
                at("init", c.product_initial_moments(&vector(mu1, "init.mu1")?, &vector(mu2, "init.mu2")?))?
            }
            (Some(InitSpec::Product { .. }), None) => {
                return Err(ConfigError::new("init", "product initial means apply to composite systems only"))
            }
        };

        let weights = match &self.weights {
            None => WeightingSpec::identity(n),
            Some(WeightsSpec::Sigma { sigma }) => at("weights.sigma", WeightingSpec::from_sigma(matrix(sigma, "weights.sigma")?))?,
            Some(WeightsSpec::Factor { f }) => at("weights.f", WeightingSpec::from_factor(matrix(f, "weights.f")?))?,
        };
        if weights.n() != n {
            return Err(ConfigError::new("weights", format!("expected {n} columns, found {}", weights.n())));
        }

        let grid = match &self.analysis.grid {
            GridSpec::Uniform { t_end, intervals } => at("analysis.grid", TimeGrid::uniform(*t_end, *intervals))?,
            GridSpec::Times { times } => at("analysis.grid.times", TimeGrid::new(times.clone()))?,
        };
        for (i, &e) in self.analysis.eps.iter().enumerate() {
            if !(e > 0.0) || !e.is_finite() {
                return Err(ConfigError::new(format!("analysis.eps[{i}]"), format!("must be positive and finite, got {e}")));
            }
        }
        for (i, &g) in self.analysis.gains.iter().enumerate() {
            if !g.is_finite() {
                return Err(ConfigError::new(format!("analysis.gains[{i}]"), "must be finite"));
            }
        }
        let comparisons = self
            .analysis
            .comparisons
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let field = format!("analysis.comparisons[{i}]");
                let v = vector(c, &field)?;
                if v.len() != n {
                    return Err(ConfigError::new(field, format!("expected {n} entries, found {}", v.len())));
                }
                Ok(v)
            })
            .collect::<CResult<Vec<_>>>()?;

        Ok(Problem {
            sys,
            composite,
            rep,
            init,
            weights,
            grid,
            comparisons,
        })
    }
}

/// Model values assembled from a configuration.
#[derive(Debug, Clone)]
pub struct Problem {
    /// The system, or the joint system of a composite.
    pub sys: SystemParams,
    pub composite: Option<CompositeSystem>,
    /// Representation of a single system, when one was given.
    pub rep: Option<Representation>,
    pub init: InitialMoments,
    pub weights: WeightingSpec,
    pub grid: TimeGrid,
    pub comparisons: Vec<RVec>,
}

fn structure(spec: &SystemSpec, field: &str) -> CResult<(StructureConstants, Option<Representation>)> {
    match spec {
        SystemSpec::Pauli => Ok((pauli_structure(), Some(qubit_representation()))),
        SystemSpec::Custom { alpha, beta_re, beta_im } => {
            let alpha = matrix(alpha, &format!("{field}.alpha"))?;
            let sections = complex_list(beta_re, beta_im, &format!("{field}.beta"))?;
            let beta = at(&format!("{field}.beta"), SectionArray::from_sections(sections))?;
            Ok((at(field, StructureConstants::new(alpha, beta))?, None))
        }
        SystemSpec::Representation {
            label,
            matrices_re,
            matrices_im,
        } => {
            let mats = complex_list(matrices_re, matrices_im, &format!("{field}.matrices"))?;
            let rep = at(field, Representation::new(label.clone(), mats))?;
            let sc = at(field, fit_structure_constants(&rep))?;
            Ok((sc, Some(rep)))
        }
        SystemSpec::Composite { .. } => Err(ConfigError::new(field, "nested composites are not supported")),
    }
}

fn subsystem(sc: StructureConstants, e: RVec, c: &Coupling, cfield: &str, efield: &str) -> CResult<SystemParams> {
    let n = sc.n();
    if e.len() != n {
        return Err(ConfigError::new(efield, format!("expected {n} entries, found {}", e.len())));
    }
    let m = matrix(&c.m, &format!("{cfield}.m"))?;
    let offset = match &c.n {
        Some(v) => vector(v, &format!("{cfield}.n"))?,
        None => RVec::zeros(m.nrows()),
    };
    at(cfield, SystemParams::new(sc, e, m, offset))
}

fn vector(v: &[f64], field: &str) -> CResult<RVec> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(ConfigError::new(format!("{field}[{i}]"), "non-finite entry"));
    }
    Ok(RVec::from_column_slice(v))
}

fn matrix(rows: &Rows, field: &str) -> CResult<RMat> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || nc == 0 {
        return Err(ConfigError::new(field, "matrix must be non-empty"));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != nc {
            return Err(ConfigError::new(format!("{field}[{i}]"), format!("row has {} entries, expected {nc}", r.len())));
        }
        if let Some(j) = r.iter().position(|x| !x.is_finite()) {
            return Err(ConfigError::new(format!("{field}[{i}][{j}]"), "non-finite entry"));
        }
    }
    Ok(RMat::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn complex_list(re: &[Rows], im: &[Rows], field: &str) -> CResult<Vec<CMat>> {
    if re.len() != im.len() {
        return Err(ConfigError::new(field, format!("{} real parts but {} imaginary parts", re.len(), im.len())));
    }
    re.iter()
        .zip(im)
        .enumerate()
        .map(|(l, (r, i))| {
            let r = matrix(r, &format!("{field}_re[{l}]"))?;
            let i = matrix(i, &format!("{field}_im[{l}]"))?;
            if r.shape() != i.shape() {
                return Err(ConfigError::new(format!("{field}[{l}]"), "real and imaginary parts differ in shape"));
            }
            Ok(CMat::from_fn(r.nrows(), r.ncols(), |a, b| Complex64::new(r[(a, b)], i[(a, b)])))
        })
        .collect()
}

/// Configuration of the damped qubit used throughout the examples.
pub fn worked_example() -> RunConfig {
    RunConfig {
        system: SystemSpec::Pauli,
        energy: Some(EnergySpec::Vector(vec![0.0; 3])),
        coupling: CouplingSpec::Single(Coupling {
            m: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            n: Some(vec![0.0, 0.0]),
        }),
        init: Some(InitSpec::Mean { mu0: vec![0.0; 3] }),
        weights: None,
        analysis: AnalysisSpec::default(),
        output: OutputSpec::default(),
    }
}
