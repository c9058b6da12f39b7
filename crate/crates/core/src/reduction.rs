//! Reduction of a representation and block-diagonalization of equivariant
//! operators.
//!
//! Multiplicities come from character inner products. Transference operators
//! `P^j_{kℓ} = (n_j/|G|) Σ_g d^j_{ℓk}(g⁻¹) φ(g)` give a symmetry-adapted basis:
//! for each irrep `j`, starting vectors `v_1^i` spanning the image of
//! `P^j_{11}`, then `v_k^i = P^j_{k1} v_1^i`. Columns are grouped by irrep,
//! then copy `k`, then `i`, so an equivariant operator becomes `n_j` identical
//! `c_j × c_j` blocks per irrep.
//!
//! Indices `k`, `ℓ` and copies are 0-based in the API.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::chartable::{CharacterTable, IrrepSet};
use crate::eigen::{eig_general, sort_spectrum, sort_spectrum_by};
use crate::linalg::{column_space_basis, greedy_columns, LinalgError, LuFactor};
use crate::matrix::{CsrMatrix, DenseMatrix, Matrix};
use crate::reps::Representation;
use crate::scalar::{Complex64, Number, Rational, Scalar};

/// Relative rank threshold for the float-tier column selection.
pub const RANK_TOL: f64 = 1e-9;
/// Character matching tolerance between a table row and an irrep.
const MATCH_TOL: f64 = 1e-8;
const MULTIPLICITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    #[error("representation and table are defined on different groups")]
    GroupMismatch,
    #[error("multiplicity of {label} is {value}, not a non-negative integer")]
    NonIntegerMultiplicity { label: String, value: String },
    #[error("no irrep in the set matches the character of {label}")]
    MissingIrrep { label: String },
    #[error("irrep index {index} out of range for a set of {count}")]
    IrrepOutOfRange { index: usize, count: usize },
    #[error("transference indices ({k}, {l}) out of range for {label} of degree {degree}")]
    InvalidIndex { label: String, k: usize, l: usize, degree: usize },
    #[error("{label}: projector rank {found} differs from multiplicity {expected}")]
    RankMismatch { label: String, expected: usize, found: usize },
    #[error("symmetry-adapted basis is singular: {0}")]
    SingularBasis(LinalgError),
    #[error("operator is not equivariant: generator {generator}, relative residual {residual:e}")]
    NotEquivariant { generator: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("block {index} out of range for {count} blocks")]
    BlockOutOfRange { index: usize, count: usize },
    #[error("eigensolver failed on block {block}: {source}")]
    EigensolverFailure { block: usize, source: LinalgError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplicityMode {
    /// One term per conjugacy class, weighted by class size.
    ClassSum,
    /// One term per group element (reference implementation).
    FullSum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicity {
    pub label: String,
    pub degree: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityVector {
    /// One entry per table row, in table order.
    pub entries: Vec<Multiplicity>,
}

impl MultiplicityVector {
    /// `Σ n_j c_j`, the dimension of the represented space.
    pub fn total_dimension(&self) -> usize {
        self.entries.iter().map(|e| e.degree * e.multiplicity).sum()
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.multiplicity)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.multiplicity).collect()
    }
}

fn check_group<T: Scalar>(rep: &Representation<T>, table: &CharacterTable) -> Result<(), ReductionError> {
    if crate::reps::same_group(rep.group(), table.group()) {
        Ok(())
    } else {
        Err(ReductionError::GroupMismatch)
    }
}

fn to_multiplicity(label: &str, sum: Number, order: usize) -> Result<usize, ReductionError> {
    let bad = |v: String| ReductionError::NonIntegerMultiplicity { label: label.to_string(), value: v };
    match sum {
        Number::Exact(q) => {
            let c = q / Rational::from_i64(order as i64);
            if !c.is_integer() || c < Rational::from_i64(0) {
                return Err(bad(c.to_string()));
            }
            Ok(c.to_integer().try_into().map_err(|_| bad(c.to_string()))?)
        }
        Number::Approx(z) => {
            let c = z / order as f64;
            let r = libm::round(c.re);
            if (c - Complex64::new(r, 0.0)).norm() > MULTIPLICITY_TOL || r < 0.0 {
                return Err(bad(crate::scalar::format_complex(c)));
            }
            Ok(r as usize)
        }
    }
}

/// Multiplicities `c_j = (1/|G|) Σ_k |C_k| χ_φ(g_k) conj χ_j(g_k)`, or the
/// same inner product summed over every element.
pub fn multiplicities<T: Scalar>(
    rep: &Representation<T>,
    table: &CharacterTable,
    mode: MultiplicityMode,
) -> Result<MultiplicityVector, ReductionError> {
    check_group(rep, table)?;
    let group = rep.group();
    let order = group.order();
    // Pairs (weight, χ_φ value, class index) to sum over.
    let terms: Vec<(i64, Number, usize)> = match mode {
        MultiplicityMode::ClassSum => {
            let chi = rep.character();
            group
                .conjugacy_classes()
                .iter()
                .zip(chi)
                .enumerate()
                .map(|(k, (c, x))| (c.size() as i64, x.to_number(), k))
                .collect()
        }
        MultiplicityMode::FullSum => (0..order).map(|g| (1, rep.image(g).trace().to_number(), group.class_of(g))).collect(),
    };
    let entries = table
        .values()
        .iter()
        .zip(table.labels())
        .zip(table.degrees())
        .map(|((row, label), &degree)| {
            let sum = terms
                .iter()
                .fold(Number::integer(0), |acc, (w, x, k)| acc.add(&x.mul(&row[*k].conj()).mul(&Number::integer(*w))));
            Ok(Multiplicity { label: label.clone(), degree, multiplicity: to_multiplicity(label, sum, order)? })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiplicityVector { entries })
}

/// A transference operator `P^j_{kℓ}`.
#[derive(Clone, Debug)]
pub struct Projector<T: Scalar> {
    pub label: String,
    /// Index into the irrep set.
    pub irrep: usize,
    pub k: usize,
    pub l: usize,
    pub matrix: Matrix<T>,
}

/// `P^j_{kℓ} = (n_j/|G|) Σ_g d^j_{ℓk}(g⁻¹) φ(g)` for irrep `j` of the set.
pub fn projector<T: Scalar>(
    rep: &Representation<T>,
    irreps: &IrrepSet<T>,
    j: usize,
    k: usize,
    l: usize,
) -> Result<Projector<T>, ReductionError> {
    if !crate::reps::same_group(rep.group(), irreps.group()) {
        return Err(ReductionError::GroupMismatch);
    }
    let irrep = irreps.irreps().get(j).ok_or(ReductionError::IrrepOutOfRange { index: j, count: irreps.len() })?;
    let nj = irrep.degree();
    if k >= nj || l >= nj {
        return Err(ReductionError::InvalidIndex { label: irrep.label.clone(), k, l, degree: nj });
    }
    let group = rep.group();
    let order = group.order();
    let n = rep.degree();
    let scale = T::from_ratio(nj as i64, order as i64);
    let sparse = rep.generator_images().iter().all(Matrix::is_sparse);
    let mut dense = if sparse { None } else { Some(DenseMatrix::<T>::zeros(n, n)) };
    let mut triplets: Vec<(usize, usize, T)> = Vec::new();
    for g in 0..order {
        let inv = group.inverse(g).expect("valid index");
        let d = irrep.rep.image(inv).get(l, k);
        if d.is_zero() {
            continue;
        }
        let coeff = d * scale.clone();
        match (rep.image(g), dense.as_mut()) {
            (Matrix::Dense(m), Some(acc)) => acc.add_scaled(&coeff, m),
            (Matrix::Sparse(m), Some(acc)) => {
                for (r, c, v) in m.iter() {
                    acc[(r, c)] += coeff.clone() * v.clone();
                }
            }
            (m, None) => triplets.extend(m.to_sparse().iter().map(|(r, c, v)| (r, c, coeff.clone() * v.clone()))),
        }
    }
    let matrix = match dense {
        Some(d) => Matrix::Dense(d),
        None => Matrix::Sparse(CsrMatrix::from_triplets(n, n, triplets)),
    };
    Ok(Projector { label: irrep.label.clone(), irrep: j, k, l, matrix })
}

fn irrep_for_row<T: Scalar>(irreps: &IrrepSet<T>, table: &CharacterTable, row: usize) -> Result<usize, ReductionError> {
    irreps
        .index_for_row(table, row, MATCH_TOL)
        .ok_or_else(|| ReductionError::MissingIrrep { label: table.labels()[row].clone() })
}

/// Starting vectors `v_1^1..v_1^{c_j}` spanning the image of `P^j_{11}` for
/// table row `row`: raw pivot columns on the exact tier, an orthonormal basis
/// of the selected columns on the float tier.
pub fn isotypic_component<T: Scalar>(
    rep: &Representation<T>,
    irreps: &IrrepSet<T>,
    table: &CharacterTable,
    row: usize,
) -> Result<Vec<Vec<T>>, ReductionError> {
    let mults = multiplicities(rep, table, MultiplicityMode::ClassSum)?;
    let c = mults.entries.get(row).ok_or(ReductionError::IrrepOutOfRange { index: row, count: mults.entries.len() })?.multiplicity;
    starting_vectors(rep, irreps, table, row, c)
}

fn starting_vectors<T: Scalar>(
    rep: &Representation<T>,
    irreps: &IrrepSet<T>,
    table: &CharacterTable,
    row: usize,
    c: usize,
) -> Result<Vec<Vec<T>>, ReductionError> {
    if c == 0 {
        return Ok(Vec::new());
    }
    let j = irrep_for_row(irreps, table, row)?;
    let p = projector(rep, irreps, j, 0, 0)?;
    let label = table.labels()[row].clone();
    if T::EXACT {
        let space = column_space_basis(&p.matrix, 0.0);
        if space.rank() != c {
            return Err(ReductionError::RankMismatch { label, expected: c, found: space.rank() });
        }
        return Ok(space.columns);
    }
    let sigma = crate::linalg::spectral_norm_estimate(&p.matrix);
    let (pivots, basis) = greedy_columns(&p.matrix, RANK_TOL * sigma, Some(c));
    // An idempotent has trace equal to its rank.
    let trace = p.matrix.trace().to_complex();
    let trace_rank = libm::round(trace.re) as usize;
    if pivots.len() != c || trace_rank != c || (trace - Complex64::new(c as f64, 0.0)).norm() > 1e-6 * (c as f64).max(1.0) {
        let found = if pivots.len() != c { pivots.len() } else { trace_rank };
        return Err(ReductionError::RankMismatch { label, expected: c, found });
    }
    Ok(basis)
}

/// Block metadata of one irrep in a symmetry-adapted basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepBlock {
    pub label: String,
    /// Row of the character table.
    pub row: usize,
    /// Degree `n_j` (number of identical blocks).
    pub degree: usize,
    /// Multiplicity `c_j` (size of each block).
    pub multiplicity: usize,
    /// First column of the isotypic component.
    pub offset: usize,
}

/// Origin of one basis column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnOrigin {
    /// Index into [`SymmetryAdaptedBasis::blocks`].
    pub block: usize,
    /// Copy `k` (0-based).
    pub copy: usize,
    /// Starting vector `i` (0-based).
    pub vector: usize,
}

/// Change-of-basis matrix with its block structure and factorization.
#[derive(Clone, Debug)]
pub struct SymmetryAdaptedBasis<T: Scalar> {
    matrix: DenseMatrix<T>,
    blocks: Vec<IrrepBlock>,
    columns: Vec<ColumnOrigin>,
    lu: LuFactor<T>,
}

impl<T: Scalar> SymmetryAdaptedBasis<T> {
    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn blocks(&self) -> &[IrrepBlock] {
        &self.blocks
    }

    pub fn columns(&self) -> &[ColumnOrigin] {
        &self.columns
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// Largest over smallest LU pivot modulus; a cheap conditioning hint.
    pub fn condition_hint(&self) -> f64 {
        self.lu.pivot_ratio()
    }

    /// Solves `P X = B`.
    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>, ReductionError> {
        self.lu.solve(b).map_err(ReductionError::SingularBasis)
    }
}

/// Assembles the symmetry-adapted basis for every irrep with `c_j > 0`, in
/// table order.
pub fn symmetry_adapted_basis<T: Scalar>(
    rep: &Representation<T>,
    irreps: &IrrepSet<T>,
    table: &CharacterTable,
) -> Result<SymmetryAdaptedBasis<T>, ReductionError> {
    let mults = multiplicities(rep, table, MultiplicityMode::ClassSum)?;
    let n = rep.degree();
    if mults.total_dimension() != n {
        return Err(ReductionError::DimensionMismatch { expected: n, found: mults.total_dimension() });
    }
    let mut columns: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut origins = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for (row, entry) in mults.entries.iter().enumerate() {
        let c = entry.multiplicity;
        if c == 0 {
            continue;
        }
        let starts = starting_vectors(rep, irreps, table, row, c)?;
        let j = irrep_for_row(irreps, table, row)?;
        let block = blocks.len();
        blocks.push(IrrepBlock { label: entry.label.clone(), row, degree: entry.degree, multiplicity: c, offset: columns.len() });
        for k in 0..entry.degree {
            let transfer = if k == 0 { None } else { Some(projector(rep, irreps, j, k, 0)?) };
            for (i, v) in starts.iter().enumerate() {
                let col = match &transfer {
                    None => v.clone(),
                    Some(p) => p.matrix.mul_vec(v),
                };
                columns.push(col);
                origins.push(ColumnOrigin { block, copy: k, vector: i });
            }
        }
    }
    let matrix = DenseMatrix::from_columns(n, &columns);
    let lu = LuFactor::new(&matrix).map_err(ReductionError::SingularBasis)?;
    Ok(SymmetryAdaptedBasis { matrix, blocks, columns: origins, lu })
}

/// Predicted block structure from characters alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPrevision {
    pub label: String,
    /// Block size `c_j`.
    pub size: usize,
    /// Number of identical blocks `n_j`.
    pub count: usize,
}

pub fn quick_block_prevision<T: Scalar>(
    rep: &Representation<T>,
    table: &CharacterTable,
) -> Result<Vec<BlockPrevision>, ReductionError> {
    let mults = multiplicities(rep, table, MultiplicityMode::ClassSum)?;
    Ok(mults
        .entries
        .into_iter()
        .filter(|e| e.multiplicity > 0)
        .map(|e| BlockPrevision { label: e.label, size: e.multiplicity, count: e.degree })
        .collect())
}

/// One diagonal block of a transformed operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDescriptor {
    pub label: String,
    /// Index into the basis' irrep blocks.
    pub irrep_block: usize,
    /// Copy `k` (0-based).
    pub copy: usize,
    pub offset: usize,
    pub size: usize,
}

/// `P⁻¹ M P` with its diagonal blocks and quality measures.
#[derive(Clone, Debug)]
pub struct BlockDiagonalForm<T: Scalar> {
    pub matrix: DenseMatrix<T>,
    pub blocks: Vec<BlockDescriptor>,
    /// Largest modulus of an entry outside the diagonal blocks.
    pub off_block_residual: f64,
    /// Largest entrywise deviation of a copy from copy 0 of the same irrep.
    pub copy_deviation: f64,
    /// Frobenius norm of the original operator.
    pub operator_norm: f64,
}

impl<T: Scalar> BlockDiagonalForm<T> {
    /// Dense `c_j × c_j` block at the recorded offset.
    pub fn get_block(&self, index: usize) -> Result<DenseMatrix<T>, ReductionError> {
        let b = self.blocks.get(index).ok_or(ReductionError::BlockOutOfRange { index, count: self.blocks.len() })?;
        Ok(self.matrix.submatrix(b.offset, b.offset, b.size, b.size))
    }

    /// Eigenvalues of one block, unsorted.
    pub fn block_eigenvalues(&self, index: usize) -> Result<Vec<Complex64>, ReductionError> {
        let block = self.get_block(index)?.to_complex();
        eig_general(&block).map_err(|source| ReductionError::EigensolverFailure { block: index, source })
    }

    /// Blocks whose eigenvalues must be computed; with `exploit_identical_copies`
    /// only copy 0 of each irrep.
    pub fn blocks_to_solve(&self, exploit_identical_copies: bool) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| !exploit_identical_copies || self.blocks[i].copy == 0).collect()
    }

    /// Combines per-block eigenvalues (for the indices of
    /// [`blocks_to_solve`](Self::blocks_to_solve)) into a sorted spectrum.
    pub fn merge_spectrum(&self, solved: &[(usize, Vec<Complex64>)]) -> Vec<SpectrumEntry> {
        let mut out = Vec::with_capacity(self.matrix.rows());
        for (i, b) in self.blocks.iter().enumerate() {
            let source = solved
                .iter()
                .find(|(s, _)| *s == i)
                .or_else(|| solved.iter().find(|(s, _)| self.blocks[*s].irrep_block == b.irrep_block && self.blocks[*s].copy == 0));
            if let Some((_, values)) = source {
                out.extend(values.iter().map(|&value| SpectrumEntry { value, label: b.label.clone(), copy: b.copy }));
            }
        }
        sort_spectrum_by(&mut out, |e| e.value);
        out
    }
}

/// One eigenvalue tagged with its block.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub value: Complex64,
    pub label: String,
    pub copy: usize,
}

/// `M̃ = P⁻¹ M P`, computed by solving `P X = M P`.
pub fn block_diagonalize<T: Scalar>(
    m: &Matrix<T>,
    basis: &SymmetryAdaptedBasis<T>,
) -> Result<BlockDiagonalForm<T>, ReductionError> {
    let n = basis.dimension();
    if m.rows() != n || m.cols() != n {
        return Err(ReductionError::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
    }
    let mp = m.mul_dense(&basis.matrix);
    let matrix = basis.solve(&mp)?;

    let mut blocks = Vec::new();
    for (bi, b) in basis.blocks.iter().enumerate() {
        for k in 0..b.degree {
            blocks.push(BlockDescriptor {
                label: b.label.clone(),
                irrep_block: bi,
                copy: k,
                offset: b.offset + k * b.multiplicity,
                size: b.multiplicity,
            });
        }
    }
    let mut block_of = vec![0usize; n];
    for (i, b) in blocks.iter().enumerate() {
        for x in block_of[b.offset..b.offset + b.size].iter_mut() {
            *x = i;
        }
    }
    let mut off_block_residual = 0.0f64;
    for r in 0..n {
        for (c, v) in matrix.row(r).iter().enumerate() {
            if block_of[r] != block_of[c] {
                off_block_residual = off_block_residual.max(v.modulus());
            }
        }
    }
    let mut copy_deviation = 0.0f64;
    for b in blocks.iter().filter(|b| b.copy > 0) {
        let first = b.offset - b.copy * b.size;
        for r in 0..b.size {
            for c in 0..b.size {
                let d = matrix[(b.offset + r, b.offset + c)].clone() - matrix[(first + r, first + c)].clone();
                copy_deviation = copy_deviation.max(d.modulus());
            }
        }
    }
    Ok(BlockDiagonalForm { matrix, blocks, off_block_residual, copy_deviation, operator_norm: m.frobenius_norm() })
}

/// [`block_diagonalize`] after verifying that `M` commutes with `rep`.
pub fn block_diagonalize_checked<T: Scalar>(
    m: &Matrix<T>,
    rep: &Representation<T>,
    basis: &SymmetryAdaptedBasis<T>,
) -> Result<BlockDiagonalForm<T>, ReductionError> {
    let check = rep
        .is_equivariant(m)
        .map_err(|_| ReductionError::DimensionMismatch { expected: rep.degree(), found: m.rows() })?;
    if let Some(generator) = check.failing {
        return Err(ReductionError::NotEquivariant { generator, residual: check.relative_residual });
    }
    block_diagonalize(m, basis)
}

/// Sorted union of all block spectra, solved sequentially.
pub fn block_spectrum<T: Scalar>(
    form: &BlockDiagonalForm<T>,
    exploit_identical_copies: bool,
) -> Result<Vec<SpectrumEntry>, ReductionError> {
    let solved = form
        .blocks_to_solve(exploit_identical_copies)
        .into_iter()
        .map(|i| form.block_eigenvalues(i).map(|e| (i, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(form.merge_spectrum(&solved))
}

/// Eigenvalues of a full matrix sorted by `(re, im)`; the baseline the block
/// spectrum is compared against.
pub fn full_spectrum<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex64>, LinalgError> {
    let mut e = eig_general(&m.to_dense().to_complex())?;
    sort_spectrum(&mut e);
    Ok(e)
}
