//! Linear representations of finite permutation groups.
//!
//! A [`Representation`] stores the images of the group generators; the image
//! of any other element is built along the element's generator word and
//! memoized, so every image is computed at most once.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

use crate::group::FiniteGroup;
use crate::linalg::{LinalgError, LuFactor};
use crate::matrix::{CsrMatrix, DenseMatrix, Matrix};
use crate::scalar::Scalar;

/// Float representations at or above this degree store images sparsely.
pub const SPARSE_DEGREE_THRESHOLD: usize = 64;
/// Relative tolerance of the float-tier homomorphism and commutation checks.
pub const FLOAT_CHECK_TOL: f64 = 1e-10;
/// Default bound on the order of a group for its regular representation.
pub const REGULAR_ORDER_CAP: usize = 5_000;
/// Groups up to this order get an all-pairs homomorphism check.
pub const ALL_PAIRS_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RepError {
    #[error("expected {expected} generator images, got {found}")]
    WrongImageCount { expected: usize, found: usize },
    #[error("image of generator {generator} is {rows}x{cols}, expected {degree}x{degree}")]
    DimensionMismatch { generator: usize, rows: usize, cols: usize, degree: usize },
    #[error("image of generator {generator} is singular")]
    SingularImage { generator: usize },
    #[error("representations are defined on different groups")]
    GroupMismatch,
    #[error("group order {order} exceeds the regular representation cap of {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("operator is {rows}x{cols} but the representation has degree {degree}")]
    OperatorDimension { rows: usize, cols: usize, degree: usize },
}

/// A homomorphism from a finite group into invertible matrices.
#[derive(Debug)]
pub struct Representation<T: Scalar> {
    group: Arc<FiniteGroup>,
    degree: usize,
    generator_images: Vec<Matrix<T>>,
    cache: Vec<OnceBox<Matrix<T>>>,
}

impl<T: Scalar> Clone for Representation<T> {
    fn clone(&self) -> Self {
        Self::build(self.group.clone(), self.degree, self.generator_images.clone())
    }
}

/// Outcome of [`Representation::is_representation`].
#[derive(Clone, Debug, PartialEq)]
pub struct HomomorphismCheck {
    pub holds: bool,
    /// First pair `(g, h)` of element indices with `φ(g)φ(h) ≠ φ(gh)`.
    pub failing_pair: Option<(usize, usize)>,
    /// Largest entrywise deviation seen over the checked pairs.
    pub max_residual: f64,
}

/// Outcome of an equivariance check.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceCheck {
    pub holds: bool,
    /// Generator index (or element index for the exhaustive check) that fails.
    pub failing: Option<usize>,
    /// Largest entry of `Mφ(g) − φ(g)M` over the checked elements.
    pub max_residual: f64,
    /// Position of that entry.
    pub worst_entry: Option<(usize, usize)>,
    /// `max_residual / ‖M‖_F` (equal to `max_residual` when `M = 0`).
    pub relative_residual: f64,
}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn storage_policy<T: Scalar>(m: Matrix<T>, degree: usize) -> Matrix<T> {
    match m {
        Matrix::Dense(d) if !T::EXACT && degree >= SPARSE_DEGREE_THRESHOLD => Matrix::Sparse(CsrMatrix::from_dense(&d)),
        other => other,
    }
}

fn identity_like<T: Scalar>(degree: usize, sparse: bool) -> Matrix<T> {
    if sparse {
        Matrix::Sparse(CsrMatrix::identity(degree))
    } else {
        Matrix::Dense(DenseMatrix::identity(degree))
    }
}

impl<T: Scalar> Representation<T> {
    /// Builds a representation from one square invertible image per generator.
    pub fn new(group: Arc<FiniteGroup>, generator_images: Vec<Matrix<T>>) -> Result<Self, RepError> {
        let expected = group.generators().len();
        if generator_images.len() != expected {
            return Err(RepError::WrongImageCount { expected, found: generator_images.len() });
        }
        let degree = generator_images[0].rows();
        for (gi, m) in generator_images.iter().enumerate() {
            if m.rows() != degree || m.cols() != degree {
                return Err(RepError::DimensionMismatch { generator: gi, rows: m.rows(), cols: m.cols(), degree });
            }
        }
        for (gi, m) in generator_images.iter().enumerate() {
            if !is_invertible(m, group.generators()[gi].order()) {
                return Err(RepError::SingularImage { generator: gi });
            }
        }
        let images = generator_images.into_iter().map(|m| storage_policy(m, degree)).collect();
        Ok(Self::build(group, degree, images))
    }

    fn build(group: Arc<FiniteGroup>, degree: usize, generator_images: Vec<Matrix<T>>) -> Self {
        let cache: Vec<OnceBox<Matrix<T>>> = (0..group.order()).map(|_| OnceBox::new()).collect();
        let sparse = generator_images.iter().all(Matrix::is_sparse);
        let _ = cache[0].set(Box::new(identity_like(degree, sparse)));
        Representation { group, degree, generator_images, cache }
    }

    /// The degree-`n` representation sending every element to the identity.
    pub fn trivial(group: Arc<FiniteGroup>, degree: usize) -> Self {
        let images = group.generators().iter().map(|_| storage_policy(identity_like(degree, false), degree)).collect();
        Self::build(group, degree, images)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generator_images(&self) -> &[Matrix<T>] {
        &self.generator_images
    }

    /// `φ(g)` for the element with the given index. Panics if out of range.
    pub fn image(&self, index: usize) -> &Matrix<T> {
        if let Some(m) = self.cache[index].get() {
            return m;
        }
        // Walk up to the nearest cached ancestor, then fill downwards.
        let mut chain = Vec::new();
        let mut cur = index;
        while self.cache[cur].get().is_none() {
            let (parent, gen) = self.group.parent(cur).expect("identity is always cached");
            chain.push((cur, parent, gen));
            cur = parent;
        }
        for &(idx, parent, gen) in chain.iter().rev() {
            let base = self.cache[parent].get().expect("filled in order");
            let m = base.mul(&self.generator_images[gen]);
            let _ = self.cache[idx].set(Box::new(m));
        }
        self.cache[index].get().expect("just filled")
    }

    /// Forces every image into the cache.
    pub fn populate(&self) {
        for i in 0..self.group.order() {
            self.image(i);
        }
    }

    /// Character values on the class representatives, in class order.
    pub fn character(&self) -> Vec<T> {
        self.group.conjugacy_classes().iter().map(|c| self.image(c.representative).trace()).collect()
    }

    /// Checks `φ(g)φ(h) = φ(gh)` on all pairs for small groups, otherwise on
    /// (generator, element) pairs.
    pub fn is_representation(&self) -> HomomorphismCheck {
        let order = self.group.order();
        let gens: Vec<usize> = self
            .group
            .generators()
            .iter()
            .map(|g| self.group.index_of(g).expect("generator is an element"))
            .collect();
        let lefts: Vec<usize> = if order <= ALL_PAIRS_LIMIT { (0..order).collect() } else { gens.clone() };
        let mut max_residual = 0.0f64;
        let mut failing_pair = None;
        // A generator reached by a different word (or equal to the identity)
        // must still map to its given image.
        for (gi, &g) in gens.iter().enumerate() {
            let diff = self.generator_images[gi].max_abs_diff(self.image(g));
            max_residual = max_residual.max(diff);
            if !self.within_tol(diff, &self.generator_images[gi]) {
                return HomomorphismCheck { holds: false, failing_pair: Some((g, 0)), max_residual };
            }
        }
        'outer: for &g in &lefts {
            for h in 0..order {
                let lhs = self.image(g).mul(self.image(h));
                let rhs = self.image(self.group.multiply(g, h));
                let diff = lhs.max_abs_diff(rhs);
                max_residual = max_residual.max(diff);
                if !self.within_tol(diff, &lhs) {
                    failing_pair = Some((g, h));
                    break 'outer;
                }
            }
        }
        HomomorphismCheck { holds: failing_pair.is_none(), failing_pair, max_residual }
    }

    fn within_tol(&self, diff: f64, reference: &Matrix<T>) -> bool {
        if T::EXACT {
            diff == 0.0
        } else {
            diff <= FLOAT_CHECK_TOL * reference.frobenius_norm().max(1.0)
        }
    }

    /// Checks `Mφ(g) = φ(g)M` for every generator.
    pub fn is_equivariant(&self, m: &Matrix<T>) -> Result<EquivarianceCheck, RepError> {
        let gens: Vec<&Matrix<T>> = self.generator_images.iter().collect();
        self.commutation_check(m, &gens)
    }

    /// Checks `Mφ(g) = φ(g)M` for every group element (debug mode).
    pub fn is_equivariant_exhaustive(&self, m: &Matrix<T>) -> Result<EquivarianceCheck, RepError> {
        let all: Vec<&Matrix<T>> = (0..self.group.order()).map(|i| self.image(i)).collect();
        self.commutation_check(m, &all)
    }

    fn commutation_check(&self, m: &Matrix<T>, images: &[&Matrix<T>]) -> Result<EquivarianceCheck, RepError> {
        if m.rows() != self.degree || m.cols() != self.degree {
            return Err(RepError::OperatorDimension { rows: m.rows(), cols: m.cols(), degree: self.degree });
        }
        let norm = m.frobenius_norm();
        let scale = if norm > 0.0 { norm } else { 1.0 };
        let mut max_residual = 0.0f64;
        let mut worst_entry = None;
        let mut failing = None;
        for (idx, phi) in images.iter().enumerate() {
            let diff = m.mul(phi).to_sparse().add_scaled(&-T::one(), &phi.mul(m).to_sparse());
            let mut local = 0.0f64;
            let mut local_entry = None;
            for (i, j, v) in diff.iter() {
                let a = v.modulus();
                if a > local {
                    local = a;
                    local_entry = Some((i, j));
                }
            }
            if local > max_residual {
                max_residual = local;
                worst_entry = local_entry;
            }
            let ok = if T::EXACT { local == 0.0 } else { local <= FLOAT_CHECK_TOL * scale };
            if !ok && failing.is_none() {
                failing = Some(idx);
            }
        }
        Ok(EquivarianceCheck {
            holds: failing.is_none(),
            failing,
            max_residual,
            worst_entry,
            relative_residual: max_residual / scale,
        })
    }

    /// Block-diagonal stacking `φ ⊕ ψ`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, RepError> {
        if !same_group(&self.group, &other.group) {
            return Err(RepError::GroupMismatch);
        }
        let images = self
            .generator_images
            .iter()
            .zip(&other.generator_images)
            .map(|(a, b)| storage_policy(matrix_direct_sum(a, b), self.degree + other.degree))
            .collect();
        Ok(Self::build(self.group.clone(), self.degree + other.degree, images))
    }

    /// Kronecker product `φ ⊗ ψ`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self, RepError> {
        if !same_group(&self.group, &other.group) {
            return Err(RepError::GroupMismatch);
        }
        let images = self
            .generator_images
            .iter()
            .zip(&other.generator_images)
            .map(|(a, b)| storage_policy(matrix_kron(a, b), self.degree * other.degree))
            .collect();
        Ok(Self::build(self.group.clone(), self.degree * other.degree, images))
    }

    /// Converts every image into another scalar tier.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Representation<U> {
        let images = self.generator_images.iter().map(|m| storage_policy(m.map(&f), self.degree)).collect();
        Representation::build(self.group.clone(), self.degree, images)
    }
}

/// Permutation action on the points: `φ(g) e_i = e_{g(i)}`.
pub fn natural_representation<T: Scalar>(group: &Arc<FiniteGroup>) -> Representation<T> {
    let images = group.generators().iter().map(|g| Matrix::Sparse(CsrMatrix::permutation(g.images()))).collect();
    Representation::build(group.clone(), group.degree(), images)
}

/// Left multiplication on the group elements: `φ(g) e_h = e_{gh}`.
pub fn regular_representation<T: Scalar>(group: &Arc<FiniteGroup>) -> Result<Representation<T>, RepError> {
    regular_representation_with_cap(group, REGULAR_ORDER_CAP)
}

pub fn regular_representation_with_cap<T: Scalar>(
    group: &Arc<FiniteGroup>,
    cap: usize,
) -> Result<Representation<T>, RepError> {
    let order = group.order();
    if order > cap {
        return Err(RepError::OrderCapExceeded { order, cap });
    }
    let images = group
        .generators()
        .iter()
        .map(|g| {
            let gi = group.index_of(g).expect("generator is an element");
            let action: Vec<usize> = (0..order).map(|h| group.multiply(gi, h)).collect();
            Matrix::Sparse(CsrMatrix::permutation(&action))
        })
        .collect();
    Ok(Representation::build(group.clone(), order, images))
}

fn is_invertible<T: Scalar>(m: &Matrix<T>, order: usize) -> bool {
    let n = m.rows();
    // A homomorphic image satisfies M^ord = I, which certifies invertibility cheaply.
    let mut power = m.clone();
    for _ in 1..order {
        power = power.mul(m);
    }
    let id = identity_like::<T>(n, power.is_sparse());
    let tol = if T::EXACT { 0.0 } else { FLOAT_CHECK_TOL * (n as f64).max(1.0) };
    if power.max_abs_diff(&id) <= tol {
        return true;
    }
    !matches!(LuFactor::new(&m.to_dense()), Err(LinalgError::SingularMatrix { .. }))
}

fn matrix_direct_sum<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    match (a, b) {
        (Matrix::Dense(x), Matrix::Dense(y)) => Matrix::Dense(x.direct_sum(y)),
        _ => {
            let off = a.rows();
            let mut t: Vec<(usize, usize, T)> = a.to_sparse().iter().map(|(i, j, v)| (i, j, v.clone())).collect();
            t.extend(b.to_sparse().iter().map(|(i, j, v)| (i + off, j + off, v.clone())));
            Matrix::Sparse(CsrMatrix::from_triplets(off + b.rows(), off + b.cols(), t))
        }
    }
}

fn matrix_kron<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    match (a, b) {
        (Matrix::Dense(x), Matrix::Dense(y)) => Matrix::Dense(x.kron(y)),
        _ => {
            let (sa, sb) = (a.to_sparse(), b.to_sparse());
            let (br, bc) = (b.rows(), b.cols());
            let mut t = Vec::with_capacity(sa.nnz() * sb.nnz());
            for (i, j, x) in sa.iter() {
                for (k, l, y) in sb.iter() {
                    t.push((i * br + k, j * bc + l, x.clone() * y.clone()));
                }
            }
            Matrix::Sparse(CsrMatrix::from_triplets(a.rows() * br, a.cols() * bc, t))
        }
    }
}

/// Convenience for tests and callers holding plain rows.
pub fn dense_images<T: Scalar>(rows: Vec<Vec<Vec<T>>>) -> Vec<Matrix<T>> {
    rows.into_iter().map(|m| Matrix::Dense(DenseMatrix::from_rows(m))).collect()
}

/// Images of all generators equal to the identity of the given degree.
pub fn identity_images<T: Scalar>(count: usize, degree: usize) -> Vec<Matrix<T>> {
    vec![Matrix::Dense(DenseMatrix::identity(degree)); count]
}
