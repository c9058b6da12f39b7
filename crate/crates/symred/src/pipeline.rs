//! The reduction pipeline behind `symred run`.

use std::error::Error;
use std::fmt;
use std::fs;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use symred_core::chartable::{
    catalog_character_table, catalog_irreps, numeric_character_table, user_irreps, CharacterTable, IrrepSet, NumericOptions,
};
use symred_core::group::FiniteGroup;
use symred_core::matrix::Matrix;
use symred_core::reduction::{
    block_diagonalize, full_spectrum, multiplicities, quick_block_prevision, symmetry_adapted_basis, BlockDiagonalForm,
    BlockPrevision, MultiplicityMode, MultiplicityVector, SpectrumEntry, SymmetryAdaptedBasis,
};
use symred_core::reps::{natural_representation, regular_representation, Representation};
use symred_core::scalar::{Complex64, Number, Rational, Scalar};

use crate::formats::{parse_irreps, MatrixLiteral};
use crate::generators::{laplacian2d, schrodinger2d, water_gf, Problem};
use crate::job::{Backend, IrrepSource, JobSpec, OperatorSource, ProblemSpec, RepresentationSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Group,
    Representation,
    Operator,
    CharacterTable,
    Irreps,
    Equivariance,
    Multiplicities,
    Basis,
    BlockDiagonalize,
    Spectrum,
    Baseline,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Group => "group",
            Stage::Representation => "representation",
            Stage::Operator => "operator",
            Stage::CharacterTable => "character_table",
            Stage::Irreps => "irreps",
            Stage::Equivariance => "equivariance",
            Stage::Multiplicities => "multiplicities",
            Stage::Basis => "basis",
            Stage::BlockDiagonalize => "block_diagonalize",
            Stage::Spectrum => "spectrum",
            Stage::Baseline => "baseline",
            Stage::Output => "output",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether a failure lies in the job's inputs or in the mathematics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    Input,
    Math,
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    pub kind: FailureKind,
    #[source]
    pub source: Box<dyn Error + Send + Sync>,
}

impl StageError {
    fn new(stage: Stage, kind: FailureKind, source: impl Into<Box<dyn Error + Send + Sync>>) -> Self {
        StageError { stage, kind, source: source.into() }
    }
}

fn math<E: Into<Box<dyn Error + Send + Sync>>>(stage: Stage) -> impl FnOnce(E) -> StageError {
    move |e| StageError::new(stage, FailureKind::Math, e)
}

fn input<E: Into<Box<dyn Error + Send + Sync>>>(stage: Stage) -> impl FnOnce(E) -> StageError {
    move |e| StageError::new(stage, FailureKind::Input, e)
}

/// Settings that do not belong in the job file.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads for per-block eigensolves; `None` uses all cores.
    pub workers: Option<usize>,
}

/// Wall-clock seconds of one pipeline pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timings {
    pub stages: Vec<(Stage, f64)>,
    /// Preprocessing: character table, irreps, multiplicities, basis and the
    /// similarity transform.
    pub t_p: f64,
    /// Block eigensolves.
    pub t_b: f64,
    /// Full-matrix eigensolve, when the baseline ran.
    pub t_f: Option<f64>,
}

impl Timings {
    pub fn t_s(&self) -> f64 {
        self.t_p + self.t_b
    }

    pub fn speedup(&self) -> Option<f64> {
        self.t_f.map(|f| f / self.t_s())
    }

    fn record(&mut self, stage: Stage, start: Instant) -> f64 {
        let s = start.elapsed().as_secs_f64();
        self.stages.push((stage, s));
        s
    }
}

/// Summary of the equivariance check.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceSummary {
    pub max_residual: f64,
    pub relative_residual: f64,
}

/// Block-diagonal form and spectrum, rendered to text for reports.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub basis: Option<RenderedMatrix>,
    pub blocks: Vec<RenderedBlock>,
    pub off_block_residual: f64,
    pub copy_deviation: f64,
    pub operator_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderedMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub entries: Vec<Number>,
}

impl RenderedMatrix {
    fn from_dense<T: Scalar>(m: &symred_core::matrix::DenseMatrix<T>) -> Self {
        RenderedMatrix { rows: m.rows(), cols: m.cols(), entries: m.as_slice().iter().map(Scalar::to_number).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Number {
        &self.entries[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderedBlock {
    pub label: String,
    pub copy: usize,
    pub offset: usize,
    pub matrix: RenderedMatrix,
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub backend: Backend,
    pub group_order: usize,
    pub class_sizes: Vec<usize>,
    pub degree: usize,
    pub table: CharacterTable,
    pub table_source: String,
    pub multiplicities: MultiplicityVector,
    pub prevision: Vec<BlockPrevision>,
    pub equivariance: Option<EquivarianceSummary>,
    /// `None` for numeric irreps, which give no basis.
    pub reduction: Option<Reduction>,
    pub spectrum: Vec<SpectrumEntry>,
    /// Largest deviation between the sorted block and full spectra.
    pub baseline_deviation: Option<f64>,
    pub timings: Timings,
}

/// Runs a validated job.
pub fn run_job(spec: &JobSpec, options: RunOptions) -> Result<RunOutcome, StageError> {
    match spec.backend {
        Backend::Exact => run_typed::<Rational>(spec, options),
        Backend::Float => run_typed::<Complex64>(spec, options),
    }
}

/// Group, representation and operator of a job, without any reduction.
pub struct Inputs<T: Scalar> {
    pub group: Arc<FiniteGroup>,
    pub rep: Representation<T>,
    pub operator: Matrix<T>,
    pub problem: Option<Problem<T>>,
}

pub fn build_problem<T: Scalar>(spec: &ProblemSpec) -> Result<Problem<T>, StageError> {
    let stage = Stage::Group;
    match spec {
        ProblemSpec::Laplacian2d { n } => laplacian2d::<T>(*n).map_err(input(stage)),
        ProblemSpec::WaterGf(p) => water_gf::<T>(p).map(|w| w.problem).map_err(input(stage)),
        ProblemSpec::Schrodinger2d { n, v0, potential } => {
            if T::EXACT {
                return Err(StageError::new(stage, FailureKind::Input, "schrodinger2d needs the float backend"));
            }
            let p = schrodinger2d(*n, *v0, *potential).map_err(input(stage))?;
            let conv = |z: &Complex64| T::from_number(&Number::Approx(*z)).expect("float backend");
            Ok(Problem {
                group: p.group,
                rep: p.rep.map(conv),
                operator: p.operator.map(conv),
                family: p.family,
                labels: p.labels,
            })
        }
    }
}

pub fn build_inputs<T: Scalar>(spec: &JobSpec) -> Result<Inputs<T>, StageError> {
    let problem = spec.problem.as_ref().map(build_problem::<T>).transpose()?;
    let group = match &problem {
        Some(p) if spec.representation == RepresentationSource::Problem => p.group.clone(),
        _ => Arc::new(FiniteGroup::from_generator_strings(&spec.generators).map_err(input(Stage::Group))?),
    };

    let stage = Stage::Representation;
    let rep = match &spec.representation {
        RepresentationSource::Natural => natural_representation(&group),
        RepresentationSource::Regular => regular_representation(&group).map_err(math(stage))?,
        RepresentationSource::Explicit(images) => {
            let images = images.iter().map(MatrixLiteral::to_matrix::<T>).collect::<Result<Vec<_>, _>>().map_err(input(stage))?;
            let rep = Representation::new(group.clone(), images).map_err(input(stage))?;
            let check = rep.is_representation();
            if !check.holds {
                let (a, b) = check.failing_pair.unwrap_or_default();
                return Err(StageError::new(
                    stage,
                    FailureKind::Math,
                    format!("images do not define a homomorphism (elements {a} and {b}, residual {:e})", check.max_residual),
                ));
            }
            rep
        }
        RepresentationSource::Problem => problem.as_ref().expect("validated").rep.clone(),
    };

    let stage = Stage::Operator;
    let operator = match &spec.operator {
        OperatorSource::Inline(lit) => lit.to_matrix::<T>().map_err(input(stage))?,
        OperatorSource::File(path) => MatrixLiteral::read(path).and_then(|l| l.to_matrix::<T>()).map_err(input(stage))?,
        OperatorSource::Problem => problem.as_ref().expect("validated").operator.clone(),
    };
    if operator.rows() != rep.degree() || operator.cols() != rep.degree() {
        return Err(StageError::new(
            stage,
            FailureKind::Input,
            format!("operator is {}x{} but the representation has degree {}", operator.rows(), operator.cols(), rep.degree()),
        ));
    }
    Ok(Inputs { group, rep, operator, problem })
}

/// Character table and, unless numeric, the matching irreps.
pub fn build_irreps<T: Scalar>(
    spec: &JobSpec,
    group: &Arc<FiniteGroup>,
    timings: &mut Timings,
) -> Result<(CharacterTable, Option<IrrepSet<T>>, String), StageError> {
    let start = Instant::now();
    let result = match &spec.irreps {
        IrrepSource::Catalog { family, labels } => {
            let mut table = catalog_character_table(group, family).map_err(input(Stage::CharacterTable))?;
            if let Some(l) = labels {
                table = table.with_labels(l.clone()).map_err(input(Stage::CharacterTable))?;
            }
            timings.record(Stage::CharacterTable, start);
            let start = Instant::now();
            let mut irreps = catalog_irreps::<T>(group, family).map_err(math(Stage::Irreps))?;
            if let Some(l) = labels {
                irreps = irreps.with_labels(l.clone()).map_err(input(Stage::Irreps))?;
            }
            timings.record(Stage::Irreps, start);
            (table, Some(irreps), format!("catalog {family}"))
        }
        IrrepSource::File { path, complete } => {
            let text = fs::read_to_string(path).map_err(input(Stage::Irreps))?;
            let data = parse_irreps(&text).map_err(input(Stage::Irreps))?;
            let irreps = user_irreps::<T>(group, &data, *complete).map_err(math(Stage::Irreps))?;
            timings.record(Stage::Irreps, start);
            let start = Instant::now();
            let table = irreps.character_table().map_err(math(Stage::CharacterTable))?;
            timings.record(Stage::CharacterTable, start);
            (table, Some(irreps), format!("user file {}", path.display()))
        }
        IrrepSource::Numeric => {
            let options = NumericOptions { seed: spec.seed, ..NumericOptions::default() };
            let table = numeric_character_table(group, options).map_err(math(Stage::CharacterTable))?;
            timings.record(Stage::CharacterTable, start);
            (table, None, format!("numeric (seed {})", spec.seed))
        }
    };
    result.0.verify(spec.tolerances.orthogonality).map_err(math(Stage::CharacterTable))?;
    Ok(result)
}

/// Checks `Mφ(g) = φ(g)M` on the generators: exactly on the rational tier,
/// relative to `‖M‖_F` and the job tolerance on floats.
pub fn check_equivariance<T: Scalar>(
    rep: &Representation<T>,
    operator: &Matrix<T>,
    tol: f64,
) -> Result<EquivarianceSummary, StageError> {
    let check = rep.is_equivariant(operator).map_err(input(Stage::Equivariance))?;
    let ok = if T::EXACT { check.max_residual == 0.0 } else { check.relative_residual <= tol };
    if !ok {
        let at = check.worst_entry.map(|(i, j)| format!(" at entry ({i}, {j})")).unwrap_or_default();
        return Err(StageError::new(
            Stage::Equivariance,
            FailureKind::Math,
            format!("operator does not commute with the representation: relative residual {:e}{at}", check.relative_residual),
        ));
    }
    Ok(EquivarianceSummary { max_residual: check.max_residual, relative_residual: check.relative_residual })
}

/// Eigenvalues of the selected blocks, fanned out over a worker pool and
/// merged by block index.
pub fn solve_blocks<T: Scalar>(
    form: &BlockDiagonalForm<T>,
    exploit_identical_copies: bool,
    workers: Option<usize>,
) -> Result<Vec<SpectrumEntry>, StageError> {
    let todo = form.blocks_to_solve(exploit_identical_copies);
    let solve = || todo.par_iter().map(|&i| form.block_eigenvalues(i).map(|e| (i, e))).collect::<Result<Vec<_>, _>>();
    let solved = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(input(Stage::Spectrum))?
            .install(solve),
        None => solve(),
    }
    .map_err(math(Stage::Spectrum))?;
    Ok(form.merge_spectrum(&solved))
}

/// Largest elementwise distance between two spectra sorted by `(re, im)`.
pub fn spectrum_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn run_typed<T: Scalar>(spec: &JobSpec, options: RunOptions) -> Result<RunOutcome, StageError> {
    let mut timings = Timings::default();
    let start = Instant::now();
    let inputs = build_inputs::<T>(spec)?;
    timings.record(Stage::Group, start);
    let Inputs { group, rep, operator, .. } = inputs;

    let equivariance = if spec.flags.check_equivariance {
        let start = Instant::now();
        let summary = check_equivariance(&rep, &operator, spec.tolerances.equivariance)?;
        timings.record(Stage::Equivariance, start);
        Some(summary)
    } else {
        None
    };

    let prep = Instant::now();
    let (table, irreps, table_source) = build_irreps::<T>(spec, &group, &mut timings)?;
    let start = Instant::now();
    let mults = multiplicities(&rep, &table, MultiplicityMode::ClassSum).map_err(math(Stage::Multiplicities))?;
    let prevision = quick_block_prevision(&rep, &table).map_err(math(Stage::Multiplicities))?;
    timings.record(Stage::Multiplicities, start);

    let (reduction, spectrum) = match &irreps {
        Some(irreps) => {
            let start = Instant::now();
            let basis: SymmetryAdaptedBasis<T> = symmetry_adapted_basis(&rep, irreps, &table).map_err(math(Stage::Basis))?;
            timings.record(Stage::Basis, start);
            let start = Instant::now();
            let form = block_diagonalize(&operator, &basis).map_err(math(Stage::BlockDiagonalize))?;
            timings.record(Stage::BlockDiagonalize, start);
            timings.t_p = prep.elapsed().as_secs_f64();

            let start = Instant::now();
            let spectrum = solve_blocks(&form, spec.flags.exploit_identical_copies, options.workers)?;
            timings.t_b = timings.record(Stage::Spectrum, start);
            (Some(render(&basis, &form)), spectrum)
        }
        None => {
            timings.t_p = prep.elapsed().as_secs_f64();
            let start = Instant::now();
            let full = full_spectrum(&operator).map_err(math(Stage::Spectrum))?;
            timings.t_b = timings.record(Stage::Spectrum, start);
            let spectrum = full.into_iter().map(|value| SpectrumEntry { value, label: "full".into(), copy: 0 }).collect();
            (None, spectrum)
        }
    };

    let baseline_deviation = if spec.flags.baseline_comparison {
        let start = Instant::now();
        let full = full_spectrum(&operator).map_err(math(Stage::Baseline))?;
        timings.t_f = Some(timings.record(Stage::Baseline, start));
        let blocks: Vec<Complex64> = spectrum.iter().map(|e| e.value).collect();
        Some(spectrum_deviation(&blocks, &full))
    } else {
        None
    };

    Ok(RunOutcome {
        backend: spec.backend,
        group_order: group.order(),
        class_sizes: group.class_sizes(),
        degree: rep.degree(),
        table,
        table_source,
        multiplicities: mults,
        prevision,
        equivariance,
        reduction,
        spectrum,
        baseline_deviation,
        timings,
    })
}

fn render<T: Scalar>(basis: &SymmetryAdaptedBasis<T>, form: &BlockDiagonalForm<T>) -> Reduction {
    let blocks = form
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| RenderedBlock {
            label: b.label.clone(),
            copy: b.copy,
            offset: b.offset,
            matrix: RenderedMatrix::from_dense(&form.get_block(i).expect("block index in range")),
        })
        .collect();
    Reduction {
        basis: Some(RenderedMatrix::from_dense(basis.matrix())),
        blocks,
        off_block_residual: form.off_block_residual,
        copy_deviation: form.copy_deviation,
        operator_norm: form.operator_norm,
    }
}
