//! Versioned TOML job files.
//!
//! ```toml
//! version = 1
//! backend = "exact"
//!
//! [group]
//! generators = ["(1,2,3,4)", "(1,3)"]
//!
//! [representation]
//! kind = "natural"
//!
//! [irreps]
//! source = "catalog"
//! family = "dihedral(4)"
//!
//! [operator]
//! source = "inline"
//! matrix = "[[10,2,1,2],[2,10,2,1],[1,2,10,2],[2,1,2,10]]"
//! ```
//!
//! With a `[problem]` section the group, representation and operator default
//! to the generated ones.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use symred_core::catalog::Family;
use symred_core::scalar::{Number, Rational};

use crate::formats::{parse_number, FormatError, MatrixLiteral};
use crate::generators::{Potential, WaterParams};

pub const JOB_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("cannot read job file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("job file syntax: {0}")]
    Syntax(String),
    #[error("unsupported job version {0} (expected {JOB_VERSION})")]
    Version(u32),
    #[error("invalid job: {0}")]
    Invalid(String),
    #[error("{field}: {source}")]
    Field { field: &'static str, source: FormatError },
}

fn invalid(msg: impl Into<String>) -> JobError {
    JobError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    version: u32,
    backend: Backend,
    #[serde(default)]
    seed: u64,
    group: Option<RawGroup>,
    representation: Option<RawRepresentation>,
    irreps: RawIrreps,
    operator: Option<RawOperator>,
    problem: Option<RawProblem>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    flags: Flags,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    generators: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawRepresentation {
    Natural,
    Regular,
    Explicit { images: Vec<String> },
    Problem,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
enum RawIrreps {
    Catalog { family: String, labels: Option<Vec<String>> },
    File { path: PathBuf, #[serde(default = "yes")] complete: bool },
    Numeric,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
enum RawOperator {
    Inline { matrix: String },
    File { path: PathBuf },
    Problem,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawProblem {
    Laplacian2d {
        n: usize,
    },
    Schrodinger2d {
        n: usize,
        v0: f64,
        #[serde(default)]
        potential: Potential,
    },
    WaterGf {
        f11: String,
        f12: String,
        f33: String,
        g11: String,
        g21: String,
        g13: String,
        g33: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative residual `max_g ‖Mφ(g) − φ(g)M‖_F / ‖M‖_F` accepted on the
    /// float backend.
    pub equivariance: f64,
    /// Character table orthogonality residual.
    pub orthogonality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { equivariance: 1e-10, orthogonality: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Flags {
    pub check_equivariance: bool,
    /// Solve one block per irrep and reuse its eigenvalues for the copies.
    pub exploit_identical_copies: bool,
    /// Also compute the full-matrix spectrum and report the deviation.
    pub baseline_comparison: bool,
    pub runs: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { check_equivariance: true, exploit_identical_copies: false, baseline_comparison: false, runs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepresentationSource {
    Natural,
    Regular,
    Explicit(Vec<MatrixLiteral>),
    Problem,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IrrepSource {
    Catalog { family: Family, labels: Option<Vec<String>> },
    File { path: PathBuf, complete: bool },
    /// Character table only (Burnside–Dixon); yields the block prevision but
    /// no basis.
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSource {
    Inline(MatrixLiteral),
    File(PathBuf),
    Problem,
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ProblemSpec {
    Laplacian2d { n: usize },
    Schrodinger2d { n: usize, v0: f64, potential: Potential },
    WaterGf(WaterParams),
}

impl ProblemSpec {
    /// Same problem on an `n × n` grid; `None` for problems without a grid.
    pub fn with_size(&self, n: usize) -> Option<ProblemSpec> {
        match self {
            ProblemSpec::Laplacian2d { .. } => Some(ProblemSpec::Laplacian2d { n }),
            ProblemSpec::Schrodinger2d { v0, potential, .. } => Some(ProblemSpec::Schrodinger2d { n, v0: *v0, potential: *potential }),
            ProblemSpec::WaterGf(_) => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Laplacian2d { .. } => "laplacian2d",
            ProblemSpec::Schrodinger2d { .. } => "schrodinger2d",
            ProblemSpec::WaterGf(_) => "water_gf",
        }
    }
}

/// A validated job.
#[derive(Clone, Debug, PartialEq)]
pub struct JobSpec {
    pub backend: Backend,
    pub seed: u64,
    /// Generators in cycle or one-line notation; empty when the group comes
    /// from the problem.
    pub generators: Vec<String>,
    pub representation: RepresentationSource,
    pub irreps: IrrepSource,
    pub operator: OperatorSource,
    pub problem: Option<ProblemSpec>,
    pub tolerances: Tolerances,
    pub flags: Flags,
}

impl JobSpec {
    pub fn load(path: &Path) -> Result<Self, JobError> {
        let text = fs::read_to_string(path).map_err(|source| JobError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses and validates; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, JobError> {
        let raw: RawJob = toml::from_str(text).map_err(|e| JobError::Syntax(e.to_string()))?;
        if raw.version != JOB_VERSION {
            return Err(JobError::Version(raw.version));
        }
        let problem = raw.problem.map(convert_problem).transpose()?;
        let representation = match raw.representation {
            Some(RawRepresentation::Natural) => RepresentationSource::Natural,
            Some(RawRepresentation::Regular) => RepresentationSource::Regular,
            Some(RawRepresentation::Explicit { images }) => RepresentationSource::Explicit(
                images
                    .iter()
                    .map(|m| MatrixLiteral::parse(m))
                    .collect::<Result<_, _>>()
                    .map_err(|source| JobError::Field { field: "representation.images", source })?,
            ),
            Some(RawRepresentation::Problem) => RepresentationSource::Problem,
            None if problem.is_some() => RepresentationSource::Problem,
            None => return Err(invalid("missing [representation]")),
        };
        let operator = match raw.operator {
            Some(RawOperator::Inline { matrix }) => OperatorSource::Inline(
                MatrixLiteral::parse(&matrix).map_err(|source| JobError::Field { field: "operator.matrix", source })?,
            ),
            Some(RawOperator::File { path }) => OperatorSource::File(base.join(path)),
            Some(RawOperator::Problem) => OperatorSource::Problem,
            None if problem.is_some() => OperatorSource::Problem,
            None => return Err(invalid("missing [operator]")),
        };
        let irreps = match raw.irreps {
            RawIrreps::Catalog { family, labels } => IrrepSource::Catalog {
                family: family.parse().map_err(|e: symred_core::catalog::FamilyParseError| invalid(format!("irreps.family: {e}")))?,
                labels,
            },
            RawIrreps::File { path, complete } => IrrepSource::File { path: base.join(path), complete },
            RawIrreps::Numeric => IrrepSource::Numeric,
        };

        let uses_problem = representation == RepresentationSource::Problem || operator == OperatorSource::Problem;
        match (&problem, uses_problem) {
            (None, true) => return Err(invalid("representation or operator refers to [problem], which is missing")),
            (Some(_), false) => return Err(invalid("[problem] is given but neither the representation nor the operator uses it")),
            _ => {}
        }
        let generators = match (raw.group, representation == RepresentationSource::Problem) {
            (Some(_), true) => return Err(invalid("the group is taken from [problem]; remove [group]")),
            (None, false) => return Err(invalid("missing [group]")),
            (Some(g), false) if g.generators.is_empty() => return Err(invalid("[group] needs at least one generator")),
            (Some(g), false) => g.generators,
            (None, true) => Vec::new(),
        };

        let spec = JobSpec {
            backend: raw.backend,
            seed: raw.seed,
            generators,
            representation,
            irreps,
            operator,
            problem,
            tolerances: raw.tolerances,
            flags: raw.flags,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Cross-field checks; rerun after command-line overrides.
    pub fn validate(&self) -> Result<(), JobError> {
        if self.backend == Backend::Exact {
            if self.irreps == IrrepSource::Numeric {
                return Err(invalid("the exact backend needs catalog or user irreps, not numeric ones"));
            }
            if matches!(self.problem, Some(ProblemSpec::Schrodinger2d { .. })) {
                return Err(invalid("schrodinger2d is complex-valued; use the float backend"));
            }
        }
        if !(self.tolerances.equivariance > 0.0 && self.tolerances.orthogonality > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        if self.flags.runs == 0 {
            return Err(invalid("flags.runs must be at least 1"));
        }
        match &self.problem {
            Some(ProblemSpec::Laplacian2d { n } | ProblemSpec::Schrodinger2d { n, .. }) if *n < 2 => {
                Err(invalid(format!("grid side must be at least 2, got {n}")))
            }
            Some(ProblemSpec::Schrodinger2d { v0, .. }) if !v0.is_finite() => Err(invalid("v0 must be finite")),
            _ => Ok(()),
        }
    }
}

fn convert_problem(raw: RawProblem) -> Result<ProblemSpec, JobError> {
    Ok(match raw {
        RawProblem::Laplacian2d { n } => ProblemSpec::Laplacian2d { n },
        RawProblem::Schrodinger2d { n, v0, potential } => ProblemSpec::Schrodinger2d { n, v0, potential },
        RawProblem::WaterGf { f11, f12, f33, g11, g21, g13, g33 } => {
            let q = |field: &'static str, text: &str| -> Result<Rational, JobError> {
                match parse_number(text).map_err(|source| JobError::Field { field, source })? {
                    Number::Exact(q) => Ok(q),
                    Number::Approx(_) => Err(invalid(format!("problem.{field} must be real"))),
                }
            };
            ProblemSpec::WaterGf(WaterParams {
                f11: q("f11", &f11)?,
                f12: q("f12", &f12)?,
                f33: q("f33", &f33)?,
                g11: q("g11", &g11)?,
                g21: q("g21", &g21)?,
                g13: q("g13", &g13)?,
                g33: q("g33", &g33)?,
            })
        }
    })
}
