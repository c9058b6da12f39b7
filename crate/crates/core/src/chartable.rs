//! Character tables and explicit irreducible representations.
//!
//! Tables come from the catalog families, from the numeric Burnside–Dixon
//! construction, or from the traces of a user-supplied irrep set. Columns
//! always follow the group's conjugacy class order.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{build_model, Family, NumberMatrix};
use crate::eigen::eig_general;
use crate::group::FiniteGroup;
use crate::linalg::LuFactor;
use crate::matrix::{DenseMatrix, Matrix};
use crate::reps::{RepError, Representation};
use crate::scalar::{Complex64, Number, Rational, Scalar};

/// Residual bound for numeric orthogonality checks.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Default bound on the class count for the numeric construction.
pub const NUMERIC_CLASS_CAP: usize = 200;
const SNAP_TOL: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChartableError {
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("random class-matrix combination stayed degenerate after {attempts} attempts")]
    DegenerateRandomCombination { attempts: usize },
    #[error("character table verification failed: {what} residual {residual:e}")]
    VerificationFailed { what: String, residual: f64 },
    #[error("{classes} conjugacy classes exceed the numeric table cap of {cap}")]
    TooManyClasses { classes: usize, cap: usize },
    #[error("irrep {label}: not a representation (pair {pair:?} fails)")]
    NotARepresentation { label: String, pair: Option<(usize, usize)> },
    #[error("irrep {label}: character norm {norm} ≠ 1, not irreducible")]
    NotIrreducible { label: String, norm: f64 },
    #[error("irreps {first} and {second} have the same character")]
    DuplicateIrrep { first: String, second: String },
    #[error("irrep set incomplete: sum of squared degrees {sum} ≠ group order {order}")]
    IncompleteSet { sum: usize, order: usize },
    #[error("irrep {label} has entries without an exact rational value; use the float backend")]
    BackendMismatch { label: String },
    #[error("expected {expected} labels, got {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("irrep {label}: {source}")]
    Representation { label: String, source: RepError },
}

/// Character values `χ_j(g_k)` for all irreps `j` and classes `k`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    group: Arc<FiniteGroup>,
    labels: Vec<String>,
    degrees: Vec<usize>,
    values: Vec<Vec<Number>>,
}

impl CharacterTable {
    /// Builds a table from raw rows, checking only its shape.
    pub fn new(group: Arc<FiniteGroup>, labels: Vec<String>, values: Vec<Vec<Number>>) -> Result<Self, ChartableError> {
        let classes = group.conjugacy_classes().len();
        if values.len() != classes || values.iter().any(|r| r.len() != classes) {
            return Err(ChartableError::VerificationFailed { what: "shape".into(), residual: f64::INFINITY });
        }
        if labels.len() != values.len() {
            return Err(ChartableError::LabelCount { expected: values.len(), found: labels.len() });
        }
        let degrees = values.iter().map(|r| libm::round(r[0].to_complex().re) as usize).collect();
        Ok(CharacterTable { group, labels, degrees, values })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `values()[j][k] = χ_j(g_k)`.
    pub fn values(&self) -> &[Vec<Number>] {
        &self.values
    }

    pub fn num_irreps(&self) -> usize {
        self.values.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.group.class_sizes()
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().flatten().all(Number::is_exact)
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Replaces the irrep labels.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ChartableError> {
        if labels.len() != self.labels.len() {
            return Err(ChartableError::LabelCount { expected: self.labels.len(), found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    /// `(1/|G|) Σ_k |C_k| a_k conj(b_k)` for two class functions.
    pub fn inner_product(&self, a: &[Number], b: &[Number]) -> Number {
        let sizes = self.class_sizes();
        let order = self.group.order() as i64;
        let sum = a
            .iter()
            .zip(b)
            .zip(&sizes)
            .fold(Number::integer(0), |acc, ((x, y), &s)| acc.add(&x.mul(&y.conj()).mul(&Number::integer(s as i64))));
        match sum {
            Number::Exact(q) => Number::Exact(q / Rational::from_i64(order)),
            Number::Approx(z) => Number::Approx(z / order as f64),
        }
    }

    /// `max |⟨χ_i, χ_j⟩ − δ_ij|`.
    pub fn row_orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.num_irreps() {
            for j in 0..self.num_irreps() {
                let ip = self.inner_product(&self.values[i], &self.values[j]).to_complex();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `max |Σ_j χ_j(g_k) conj χ_j(g_l) · |C_k|/|G| − δ_kl|`.
    pub fn column_orthogonality_residual(&self) -> f64 {
        let sizes = self.class_sizes();
        let order = self.group.order() as f64;
        let n = sizes.len();
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in 0..n {
                let s = self
                    .values
                    .iter()
                    .fold(Complex64::new(0.0, 0.0), |acc, row| acc + row[k].to_complex() * row[l].to_complex().conj());
                let scaled = s * sizes[k] as f64 / order;
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((scaled - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Checks squareness, `Σ n_j² = |G|` and both orthogonality relations.
    /// Exact tables must satisfy them exactly.
    pub fn verify(&self, tol: f64) -> Result<(), ChartableError> {
        let tol = if self.is_exact() { 0.0 } else { tol };
        let sum: usize = self.degrees.iter().map(|d| d * d).sum();
        if sum != self.group.order() {
            return Err(ChartableError::IncompleteSet { sum, order: self.group.order() });
        }
        if self.is_exact() {
            for i in 0..self.num_irreps() {
                for j in 0..self.num_irreps() {
                    let ip = self.inner_product(&self.values[i], &self.values[j]);
                    if ip != Number::integer((i == j) as i64) {
                        return Err(ChartableError::VerificationFailed { what: "row orthogonality".into(), residual: 1.0 });
                    }
                }
            }
        }
        let row = self.row_orthogonality_residual();
        if row > tol.max(if self.is_exact() { 1e-12 } else { 0.0 }) {
            return Err(ChartableError::VerificationFailed { what: "row orthogonality".into(), residual: row });
        }
        let col = self.column_orthogonality_residual();
        if col > tol.max(if self.is_exact() { 1e-12 } else { 0.0 }) {
            return Err(ChartableError::VerificationFailed { what: "column orthogonality".into(), residual: col });
        }
        Ok(())
    }

    /// Maps each row of `self` to the row of `other` with the same degree and
    /// values within `tol`. Both tables must be over the same group.
    pub fn match_rows(&self, other: &CharacterTable, tol: f64) -> Option<Vec<usize>> {
        if self.num_irreps() != other.num_irreps() || self.group.conjugacy_classes() != other.group.conjugacy_classes() {
            return None;
        }
        let mut used = vec![false; other.num_irreps()];
        let mut map = Vec::with_capacity(self.num_irreps());
        for (i, row) in self.values.iter().enumerate() {
            let j = (0..other.num_irreps()).find(|&j| {
                !used[j]
                    && other.degrees[j] == self.degrees[i]
                    && row.iter().zip(&other.values[j]).all(|(a, b)| (a.to_complex() - b.to_complex()).norm() <= tol)
            })?;
            used[j] = true;
            map.push(j);
        }
        Some(map)
    }

    /// Row whose values match a class function within `tol`.
    pub fn find_row(&self, character: &[Complex64], tol: f64) -> Option<usize> {
        self.values
            .iter()
            .position(|row| row.iter().zip(character).all(|(a, b)| (a.to_complex() - b).norm() <= tol))
    }
}

/// Exact catalog character table of a recognized family.
pub fn catalog_character_table(group: &Arc<FiniteGroup>, family: &Family) -> Result<CharacterTable, ChartableError> {
    let model = build_model(group, family).map_err(ChartableError::FamilyMismatch)?;
    let classes = group.conjugacy_classes();
    let labels = (0..model.num_irreps()).map(|j| model.label(j)).collect();
    let values: Vec<Vec<Number>> = (0..model.num_irreps())
        .map(|j| classes.iter().map(|c| model.character(j, c.representative)).collect())
        .collect();
    if values.len() != classes.len() {
        return Err(ChartableError::FamilyMismatch(format!(
            "{family} has {} irreps but the group has {} classes",
            values.len(),
            classes.len()
        )));
    }
    CharacterTable::new(group.clone(), labels, values)
}

/// One irreducible representation with its label.
#[derive(Clone, Debug)]
pub struct Irrep<T: Scalar> {
    pub label: String,
    pub rep: Representation<T>,
}

impl<T: Scalar> Irrep<T> {
    pub fn degree(&self) -> usize {
        self.rep.degree()
    }
}

/// Generator images of one irrep in backend-neutral form, as read from an
/// irrep file or produced by the catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepData {
    pub label: String,
    /// One square matrix per group generator.
    pub images: Vec<NumberMatrix>,
}

/// Explicit matrices `D_j(g)` for a list of irreps.
#[derive(Clone, Debug)]
pub struct IrrepSet<T: Scalar> {
    group: Arc<FiniteGroup>,
    irreps: Vec<Irrep<T>>,
}

impl<T: Scalar> IrrepSet<T> {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep<T>] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.irreps.iter().map(|i| i.label.clone()).collect()
    }

    /// Relabels the irreps in order.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ChartableError> {
        if labels.len() != self.irreps.len() {
            return Err(ChartableError::LabelCount { expected: self.irreps.len(), found: labels.len() });
        }
        for (irrep, label) in self.irreps.iter_mut().zip(labels) {
            irrep.label = label;
        }
        Ok(self)
    }

    /// Character table built from the traces of the irreps.
    pub fn character_table(&self) -> Result<CharacterTable, ChartableError> {
        let values = self.irreps.iter().map(|i| i.rep.character().iter().map(Scalar::to_number).collect()).collect();
        CharacterTable::new(self.group.clone(), self.labels(), values)
    }

    /// Index of the irrep whose character matches row `row` of `table`.
    pub fn index_for_row(&self, table: &CharacterTable, row: usize, tol: f64) -> Option<usize> {
        let target: Vec<Complex64> = table.values()[row].iter().map(Number::to_complex).collect();
        self.irreps.iter().position(|i| {
            i.rep.character().iter().zip(&target).all(|(a, b)| (a.to_complex() - b).norm() <= tol)
        })
    }

    /// Generator images of every irrep, for serialization.
    pub fn to_data(&self) -> Vec<IrrepData> {
        self.irreps
            .iter()
            .map(|i| IrrepData {
                label: i.label.clone(),
                images: i
                    .rep
                    .generator_images()
                    .iter()
                    .map(|m| {
                        let d = m.to_dense();
                        (0..d.rows()).map(|r| d.row(r).iter().map(Scalar::to_number).collect()).collect()
                    })
                    .collect(),
            })
            .collect()
    }
}

fn to_backend<T: Scalar>(label: &str, m: &NumberMatrix) -> Result<Matrix<T>, ChartableError> {
    let rows = m
        .iter()
        .map(|r| r.iter().map(|x| T::from_number(x).ok_or_else(|| ChartableError::BackendMismatch { label: label.into() })).collect())
        .collect::<Result<Vec<Vec<T>>, _>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(ChartableError::Representation {
            label: label.into(),
            source: RepError::DimensionMismatch { generator: 0, rows: rows.len(), cols: rows.first().map_or(0, Vec::len), degree: rows.len() },
        });
    }
    Ok(Matrix::Dense(DenseMatrix::from_rows(rows)))
}

fn build_irrep<T: Scalar>(group: &Arc<FiniteGroup>, data: &IrrepData) -> Result<Irrep<T>, ChartableError> {
    let images = data.images.iter().map(|m| to_backend::<T>(&data.label, m)).collect::<Result<Vec<_>, _>>()?;
    let rep = Representation::new(group.clone(), images)
        .map_err(|source| ChartableError::Representation { label: data.label.clone(), source })?;
    Ok(Irrep { label: data.label.clone(), rep })
}

/// Catalog irrep matrices over the backend `T`. On the exact tier, dihedral
/// irreps without a rational rotation matrix use a rational realization with
/// the same character.
pub fn catalog_irreps<T: Scalar>(group: &Arc<FiniteGroup>, family: &Family) -> Result<IrrepSet<T>, ChartableError> {
    catalog_irrep_data(group, family, T::EXACT).and_then(|data| {
        let irreps = data.iter().map(|d| build_irrep(group, d)).collect::<Result<Vec<_>, _>>()?;
        Ok(IrrepSet { group: group.clone(), irreps })
    })
}

/// Catalog irrep generator images as backend-neutral data.
pub fn catalog_irrep_data(group: &Arc<FiniteGroup>, family: &Family, prefer_exact: bool) -> Result<Vec<IrrepData>, ChartableError> {
    let model = build_model(group, family).map_err(ChartableError::FamilyMismatch)?;
    let gens: Vec<usize> = group.generators().iter().map(|g| group.index_of(g).expect("generator is an element")).collect();
    Ok((0..model.num_irreps())
        .map(|j| IrrepData {
            label: model.label(j),
            images: gens.iter().map(|&g| model.matrix(j, g, prefer_exact)).collect(),
        })
        .collect())
}

/// Validates user-supplied irreps: each must be a representation with
/// character norm 1, characters must be distinct, and when `complete` the
/// squared degrees must sum to `|G|`.
pub fn user_irreps<T: Scalar>(
    group: &Arc<FiniteGroup>,
    data: &[IrrepData],
    complete: bool,
) -> Result<IrrepSet<T>, ChartableError> {
    let irreps = data.iter().map(|d| build_irrep::<T>(group, d)).collect::<Result<Vec<_>, _>>()?;
    let sizes = group.class_sizes();
    let order = group.order();
    let inner = |a: &[T], b: &[T]| -> T {
        let s = a.iter().zip(b).zip(&sizes).fold(T::zero(), |acc, ((x, y), &n)| acc + x.clone() * y.conj() * T::from_i64(n as i64));
        s / T::from_i64(order as i64)
    };
    let characters: Vec<Vec<T>> = irreps.iter().map(|i| i.rep.character()).collect();
    for (irrep, chi) in irreps.iter().zip(&characters) {
        let check = irrep.rep.is_representation();
        if !check.holds {
            return Err(ChartableError::NotARepresentation { label: irrep.label.clone(), pair: check.failing_pair });
        }
        let norm = inner(chi, chi);
        if !norm.near(&T::one(), ORTHOGONALITY_TOL) {
            return Err(ChartableError::NotIrreducible { label: irrep.label.clone(), norm: norm.modulus() });
        }
    }
    for i in 0..irreps.len() {
        for j in i + 1..irreps.len() {
            if inner(&characters[i], &characters[j]).modulus() > 0.5 {
                return Err(ChartableError::DuplicateIrrep { first: irreps[i].label.clone(), second: irreps[j].label.clone() });
            }
        }
    }
    if complete {
        let sum: usize = irreps.iter().map(|i| i.degree() * i.degree()).sum();
        if sum != order {
            return Err(ChartableError::IncompleteSet { sum, order });
        }
    }
    Ok(IrrepSet { group: group.clone(), irreps })
}

/// Options of the numeric table construction.
#[derive(Clone, Copy, Debug)]
pub struct NumericOptions {
    pub seed: u64,
    pub max_classes: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { seed: 0, max_classes: NUMERIC_CLASS_CAP }
    }
}

/// Character table by the Burnside–Dixon method: common eigenvectors of the
/// class-multiplication matrices give the central characters.
pub fn numeric_character_table(group: &Arc<FiniteGroup>, options: NumericOptions) -> Result<CharacterTable, ChartableError> {
    let classes = group.conjugacy_classes();
    let r = classes.len();
    if r > options.max_classes {
        return Err(ChartableError::TooManyClasses { classes: r, cap: options.max_classes });
    }
    let order = group.order();
    let sizes = group.class_sizes();

    // coeff[c][s][t] = #{x ∈ C_c : x⁻¹ g_t ∈ C_s}
    let mut coeff = vec![vec![vec![0u32; r]; r]; r];
    for (t, ct) in classes.iter().enumerate() {
        for (c, cc) in classes.iter().enumerate() {
            for &x in &cc.members {
                let y = group.multiply(group.inverse(x).expect("valid index"), ct.representative);
                coeff[c][group.class_of(y)][t] += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut rows = None;
    for _ in 0..MAX_ATTEMPTS {
        let weights: Vec<f64> = (0..r).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = DenseMatrix::from_fn(r, r, |s, t| {
            Complex64::new((0..r).map(|c| weights[c] * coeff[c][s][t] as f64).sum(), 0.0)
        });
        if let Some(found) = central_characters(&a) {
            rows = Some(found);
            break;
        }
    }
    let omegas = rows.ok_or(ChartableError::DegenerateRandomCombination { attempts: MAX_ATTEMPTS })?;

    let mut values = Vec::with_capacity(r);
    for omega in omegas {
        let denom: f64 = omega.iter().zip(&sizes).map(|(w, &s)| w.norm_sqr() / s as f64).sum();
        let degree = libm::sqrt(order as f64 / denom);
        let rounded = libm::round(degree);
        if (degree - rounded).abs() > SNAP_TOL || rounded < 1.0 {
            return Err(ChartableError::VerificationFailed { what: "irrep degree".into(), residual: (degree - rounded).abs() });
        }
        let row: Vec<Complex64> = omega.iter().zip(&sizes).map(|(w, &s)| w * rounded / s as f64).collect();
        values.push(row);
    }
    values.sort_by(|a, b| compare_rows(a, b));

    let raw: Vec<Vec<Number>> = values.iter().map(|r| r.iter().map(|z| Number::Approx(*z)).collect()).collect();
    let snapped: Vec<Vec<Number>> = values.iter().map(|r| r.iter().map(|z| snap(*z)).collect()).collect();
    let labels: Vec<String> = (0..r).map(|j| format!("irr_{j}")).collect();
    let raw_table = CharacterTable::new(group.clone(), labels.clone(), raw)?;
    let snapped_table = CharacterTable::new(group.clone(), labels, snapped)?;
    let table = if snapped_table.row_orthogonality_residual() <= raw_table.row_orthogonality_residual() {
        snapped_table
    } else {
        raw_table
    };
    let residual = table.row_orthogonality_residual();
    if residual > ORTHOGONALITY_TOL {
        return Err(ChartableError::VerificationFailed { what: "row orthogonality".into(), residual });
    }
    Ok(table)
}

/// Rows by degree ascending, then values descending (real, then imaginary).
fn compare_rows(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let key = |x: f64, y: f64| if (x - y).abs() <= SNAP_TOL { Ordering::Equal } else { x.total_cmp(&y) };
    key(a[0].re, b[0].re).then_with(|| {
        for (x, y) in a.iter().zip(b).skip(1) {
            let o = key(y.re, x.re).then(key(y.im, x.im));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

/// Eigenvectors of `a` normalized to 1 at the identity class, if all
/// eigenvalues are well separated.
fn central_characters(a: &DenseMatrix<Complex64>) -> Option<Vec<Vec<Complex64>>> {
    let r = a.rows();
    let eigs = eig_general(a).ok()?;
    let scale = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..r {
        for j in i + 1..r {
            if (eigs[i] - eigs[j]).norm() < 1e-6 * scale {
                return None;
            }
        }
    }
    let mut out = Vec::with_capacity(r);
    for &lambda in &eigs {
        out.push(inverse_iteration(a, lambda, scale)?);
    }
    Some(out)
}

fn inverse_iteration(a: &DenseMatrix<Complex64>, lambda: Complex64, scale: f64) -> Option<Vec<Complex64>> {
    let r = a.rows();
    let mut shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let lu = loop {
        let mut m = a.clone();
        for i in 0..r {
            m[(i, i)] -= shift;
        }
        match LuFactor::new(&m) {
            Ok(lu) => break lu,
            Err(_) if shift != lambda + Complex64::new(1e-7 * scale, 0.0) => shift = lambda + Complex64::new(1e-7 * scale, 0.0),
            Err(_) => return None,
        }
    };
    let mut v = DenseMatrix::from_fn(r, 1, |i, _| Complex64::new(1.0 + i as f64 * 0.1, 0.0));
    for _ in 0..3 {
        v = lu.solve(&v).ok()?;
        let norm = libm::sqrt(v.as_slice().iter().map(|z| z.norm_sqr()).sum());
        v = v.scale(&Complex64::new(1.0 / norm, 0.0));
    }
    let pivot = v[(0, 0)];
    if pivot.norm() < 1e-12 {
        return None;
    }
    Some(v.as_slice().iter().map(|z| z / pivot).collect())
}

/// Snaps a value to an integer (exact) or to a nearby quadratic irrational
/// `(a + b√m)/2` per component, leaving it untouched otherwise.
fn snap(z: Complex64) -> Number {
    let part = |x: f64| -> Option<(f64, bool)> {
        let n = libm::round(x);
        if (x - n).abs() <= SNAP_TOL {
            return Some((n, true));
        }
        for m in [2.0f64, 3.0, 5.0, 6.0, 7.0] {
            let root = libm::sqrt(m);
            for b in [1.0f64, -1.0, 2.0, -2.0] {
                let a = libm::round(2.0 * x - b * root);
                let candidate = (a + b * root) / 2.0;
                if (x - candidate).abs() <= SNAP_TOL {
                    return Some((candidate, false));
                }
            }
        }
        None
    };
    match (part(z.re), part(z.im)) {
        (Some((re, true)), Some((0.0, true))) => Number::integer(re as i64),
        (re, im) => Number::Approx(Complex64::new(re.map_or(z.re, |p| p.0), im.map_or(z.im, |p| p.0))),
    }
}
