//! Rank, column space and linear solves over either scalar tier.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::matrix::{DenseMatrix, Matrix};
use crate::scalar::{Number, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular: pivot {pivot:e} at elimination step {step}")]
    SingularMatrix { step: usize, pivot: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: left has {left} rows, right has {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
}

/// Relative pivot threshold below which the float tier reports singularity.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-13;

/// Selected columns of a matrix spanning its column space.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSpace<T> {
    /// Indices of the selected columns, increasing.
    pub pivots: Vec<usize>,
    /// The selected columns of the input, in pivot order.
    pub columns: Vec<Vec<T>>,
}

impl<T> ColumnSpace<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduced row echelon form (exact tier) returning the pivot columns.
pub fn rref<T: Scalar>(a: &DenseMatrix<T>) -> (DenseMatrix<T>, Vec<usize>) {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = T::one() / m[(r, c)].clone();
        for v in m.row_mut(r)[c..].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row: Vec<T> = m.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for (v, p) in m.row_mut(i)[c..].iter_mut().zip(&pivot_row) {
                *v -= f.clone() * p.clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Columns of `a` spanning its column space.
///
/// On the exact tier `tol` must be zero and the pivot columns of the reduced
/// row echelon form are returned. On the float tier columns are scanned in
/// order and kept when their component orthogonal to the already kept columns
/// exceeds `tol * sigma_max`, where `sigma_max` is estimated by power
/// iteration. A zero matrix yields an empty basis.
pub fn column_space_basis<T: Scalar>(a: &Matrix<T>, tol: f64) -> ColumnSpace<T> {
    column_space_basis_limited(a, tol, None)
}

/// Like [`column_space_basis`] but stops once `limit` columns were selected.
pub fn column_space_basis_limited<T: Scalar>(
    a: &Matrix<T>,
    tol: f64,
    limit: Option<usize>,
) -> ColumnSpace<T> {
    if T::EXACT {
        debug_assert!(tol == 0.0, "exact tier uses tol = 0");
        let dense = a.to_dense();
        let (_, mut pivots) = rref(&dense);
        if let Some(l) = limit {
            pivots.truncate(l);
        }
        let columns = pivots.iter().map(|&j| dense.column(j)).collect();
        return ColumnSpace { pivots, columns };
    }
    let sigma = spectral_norm_estimate(a);
    if sigma == 0.0 {
        return ColumnSpace { pivots: Vec::new(), columns: Vec::new() };
    }
    let (pivots, _) = greedy_columns(a, tol * sigma, limit);
    let columns: Vec<Vec<T>> = if pivots.is_empty() {
        Vec::new()
    } else {
        let cols = column_access(a);
        pivots.iter().map(|&j| cols(j)).collect()
    };
    ColumnSpace { pivots, columns }
}

/// Greedy in-order column selection with re-orthogonalized Gram-Schmidt.
/// Returns the pivot indices and an orthonormal basis of their span.
pub(crate) fn greedy_columns<T: Scalar>(
    a: &Matrix<T>,
    threshold: f64,
    limit: Option<usize>,
) -> (Vec<usize>, Vec<Vec<T>>) {
    let n = a.rows();
    let mut pivots = Vec::new();
    let mut basis: Vec<Vec<T>> = Vec::new();
    let max_rank = limit.unwrap_or(usize::MAX).min(a.rows()).min(a.cols());
    let cols = column_access(a);
    for j in 0..a.cols() {
        if basis.len() >= max_rank {
            break;
        }
        let mut v = cols(j);
        if v.iter().all(Scalar::is_zero) {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let d = dot_conj(q, &v);
                for (x, qi) in v.iter_mut().zip(q) {
                    *x -= d.clone() * qi.clone();
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > threshold {
            let inv = T::from_f64(1.0 / norm);
            for x in v.iter_mut() {
                *x = x.clone() * inv.clone();
            }
            pivots.push(j);
            basis.push(v);
        }
    }
    debug_assert!(basis.iter().all(|b| b.len() == n));
    (pivots, basis)
}

/// Column extractor; sparse input is transposed once so columns are rows.
fn column_access<T: Scalar>(a: &Matrix<T>) -> impl Fn(usize) -> Vec<T> + '_ {
    let n = a.rows();
    let transposed = match a {
        Matrix::Sparse(s) => Some(s.transpose()),
        Matrix::Dense(_) => None,
    };
    move |j| match (a, &transposed) {
        (Matrix::Dense(d), _) => d.column(j),
        (Matrix::Sparse(_), Some(t)) => {
            let mut v = vec![T::zero(); n];
            let (idx, vals) = t.row(j);
            for (&i, x) in idx.iter().zip(vals) {
                v[i] = x.clone();
            }
            v
        }
        _ => unreachable!(),
    }
}

/// `sum conj(a_i) * b_i`
pub fn dot_conj<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y.clone();
    }
    acc
}

pub fn vec_norm<T: Scalar>(v: &[T]) -> f64 {
    libm::sqrt(v.iter().map(|x| {
        let m = x.modulus();
        m * m
    }).sum())
}

/// Power-iteration estimate of the largest singular value.
pub fn spectral_norm_estimate<T: Scalar>(a: &Matrix<T>) -> f64 {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return 0.0;
    }
    let adj = match a {
        Matrix::Dense(d) => Matrix::Dense(d.conj_transpose()),
        Matrix::Sparse(s) => Matrix::Sparse(s.transpose().map(|v| v.conj())),
    };
    // deterministic, non-symmetric starting vector
    let mut v: Vec<T> = (0..a.cols()).map(|i| T::from_ratio(1 + (i % 7) as i64, 7)).collect();
    let mut sigma = 0.0;
    for _ in 0..100 {
        let nv = vec_norm(&v);
        if nv == 0.0 {
            break;
        }
        let w = a.mul_vec(&v);
        let s = vec_norm(&w) / nv;
        let u = adj.mul_vec(&w);
        let nu = vec_norm(&u);
        if nu == 0.0 {
            sigma = s;
            break;
        }
        let inv = T::from_f64(1.0 / nu);
        v = u.into_iter().map(|x| x * inv.clone()).collect();
        let converged = (s - sigma).abs() <= 1e-6 * s;
        sigma = s;
        if converged {
            break;
        }
    }
    // power iteration from below; never report less than fro/sqrt(rank bound)
    sigma.max(fro / libm::sqrt(a.rows().min(a.cols()) as f64))
}

/// Rank over the matrix's tier (`tol` relative on float).
pub fn rank<T: Scalar>(a: &Matrix<T>, tol: f64) -> usize {
    column_space_basis(a, if T::EXACT { 0.0 } else { tol }).rank()
}

/// LU factorization with row pivoting `P A = L U`.
///
/// Exact tier pivots on the first nonzero entry; float tier uses partial
/// pivoting on the largest modulus.
#[derive(Clone, Debug)]
pub struct LuFactor<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl<T: Scalar> LuFactor<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let norm = inf_norm(a);
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut min_pivot, mut max_pivot) = (f64::INFINITY, 0.0f64);
        for k in 0..n {
            let p = if T::EXACT {
                (k..n).find(|&i| !lu[(i, k)].is_zero())
            } else {
                let mut best = k;
                let mut best_mod = lu[(k, k)].modulus();
                for i in k + 1..n {
                    let m = lu[(i, k)].modulus();
                    if m > best_mod {
                        best = i;
                        best_mod = m;
                    }
                }
                Some(best)
            };
            let singular = match p {
                None => true,
                Some(p) => {
                    let m = lu[(p, k)].modulus();
                    lu[(p, k)].is_zero() || (!T::EXACT && m <= SINGULAR_PIVOT_TOL * norm)
                }
            };
            if singular {
                let pivot = p.map_or(0.0, |p| lu[(p, k)].modulus());
                return Err(LinalgError::SingularMatrix { step: k, pivot });
            }
            let p = p.unwrap();
            lu.swap_rows(k, p);
            perm.swap(k, p);
            let pm = lu[(k, k)].modulus();
            min_pivot = min_pivot.min(pm);
            max_pivot = max_pivot.max(pm);
            let inv = T::one() / lu[(k, k)].clone();
            let pivot_row: Vec<T> = lu.row(k)[k + 1..].to_vec();
            for i in k + 1..n {
                if lu[(i, k)].is_zero() {
                    continue;
                }
                let l = lu[(i, k)].clone() * inv.clone();
                let row = lu.row_mut(i);
                row[k] = l.clone();
                for (v, u) in row[k + 1..].iter_mut().zip(&pivot_row) {
                    *v -= l.clone() * u.clone();
                }
            }
        }
        Ok(LuFactor { lu, perm, min_pivot, max_pivot })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Ratio of largest to smallest pivot modulus, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        if self.dim() == 0 {
            1.0
        } else {
            self.max_pivot / self.min_pivot
        }
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>, LinalgError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch { left: n, right: b.rows() });
        }
        let m = b.cols();
        let mut x = DenseMatrix::<T>::zeros(n, m);
        for i in 0..n {
            let mut row: Vec<T> = b.row(self.perm[i]).to_vec();
            for k in 0..i {
                let l = &self.lu[(i, k)];
                if l.is_zero() {
                    continue;
                }
                for (r, xv) in row.iter_mut().zip(x.row(k)) {
                    *r -= l.clone() * xv.clone();
                }
            }
            x.row_mut(i).clone_from_slice(&row);
        }
        for i in (0..n).rev() {
            let mut row: Vec<T> = x.row(i).to_vec();
            for k in i + 1..n {
                let u = &self.lu[(i, k)];
                if u.is_zero() {
                    continue;
                }
                for (r, xv) in row.iter_mut().zip(x.row(k)) {
                    *r -= u.clone() * xv.clone();
                }
            }
            let inv = T::one() / self.lu[(i, i)].clone();
            for r in row.iter_mut() {
                *r = r.clone() * inv.clone();
            }
            x.row_mut(i).clone_from_slice(&row);
        }
        Ok(x)
    }
}

fn inf_norm<T: Scalar>(a: &DenseMatrix<T>) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(Scalar::modulus).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solution of `A X = B`.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub x: DenseMatrix<T>,
    /// `max |A X - B|` on the float tier; `None` on the exact tier.
    pub residual: Option<f64>,
}

/// Solves `A X = B`: fraction-free (Bareiss) elimination on the exact tier,
/// partially pivoted LU on the float tier.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Solution<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.rows() != b.rows() {
        return Err(LinalgError::DimensionMismatch { left: a.rows(), right: b.rows() });
    }
    let a_dense = a.to_dense();
    let b_dense = b.to_dense();
    if T::EXACT {
        let x = bareiss_solve(&a_dense, &b_dense)?;
        return Ok(Solution { x, residual: None });
    }
    let x = LuFactor::new(&a_dense)?.solve(&b_dense)?;
    let residual = a.mul_dense(&x).max_abs_diff(&b_dense);
    Ok(Solution { x, residual: Some(residual) })
}

fn to_rational<T: Scalar>(v: &T) -> Rational {
    match v.to_number() {
        Number::Exact(q) => q,
        Number::Approx(_) => unreachable!("exact tier"),
    }
}

/// Integer-preserving Gaussian elimination on `[A | B]` after clearing
/// denominators row by row, followed by exact back substitution.
fn bareiss_solve<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>, LinalgError> {
    let n = a.rows();
    let m = b.cols();
    let width = n + m;
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let entries: Vec<Rational> = a.row(i).iter().chain(b.row(i)).map(to_rational).collect();
            let lcm = entries.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            entries.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !rows[i][k].is_zero()) else {
            return Err(LinalgError::SingularMatrix { step: k, pivot: 0.0 });
        };
        rows.swap(k, p);
        let pivot_row = rows[k].clone();
        for row in rows.iter_mut().skip(k + 1) {
            let factor = row[k].clone();
            for j in k + 1..width {
                // exact division by the previous pivot (Sylvester identity)
                row[j] = (&pivot_row[k] * &row[j] - &factor * &pivot_row[j]) / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    let mut x = DenseMatrix::<T>::zeros(n, m);
    for c in 0..m {
        let mut sol: Vec<Rational> = vec![<Rational as Zero>::zero(); n];
        for i in (0..n).rev() {
            let mut acc = Rational::from_integer(rows[i][n + c].clone());
            for k in i + 1..n {
                acc -= Rational::from_integer(rows[i][k].clone()) * &sol[k];
            }
            sol[i] = acc / Rational::from_integer(rows[i][i].clone());
        }
        for (i, q) in sol.into_iter().enumerate() {
            x[(i, c)] = T::from_number(&Number::Exact(q)).expect("exact tier");
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CsrMatrix;
    use crate::scalar::Complex64;

    type Q = Rational;

    #[test]
    fn zero_matrix_has_empty_basis() {
        let z = Matrix::Dense(DenseMatrix::<Q>::zeros(3, 3));
        assert_eq!(column_space_basis(&z, 0.0).rank(), 0);
        let zf = Matrix::Dense(DenseMatrix::<Complex64>::zeros(3, 3));
        assert_eq!(column_space_basis(&zf, 1e-9).rank(), 0);
    }

    #[test]
    fn rank_one_exact() {
        let a = Matrix::Dense(DenseMatrix::<Q>::from_i64_rows(&[&[1, 2], &[2, 4]]));
        let cs = column_space_basis(&a, 0.0);
        assert_eq!(cs.pivots, alloc::vec![0]);
        assert_eq!(cs.columns[0], alloc::vec![Q::from_i64(1), Q::from_i64(2)]);
    }

    #[test]
    fn rank_one_float_sparse() {
        let d = DenseMatrix::<Complex64>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let cs = column_space_basis(&Matrix::Sparse(CsrMatrix::from_dense(&d)), 1e-9);
        assert_eq!(cs.pivots, alloc::vec![0]);
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = DenseMatrix::<Q>::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6]]);
        let x = solve(&Matrix::Dense(DenseMatrix::identity(2)), &Matrix::Dense(b.clone())).unwrap();
        assert_eq!(x.x, b);
    }

    #[test]
    fn diagonal_inverse_exact() {
        let a = DenseMatrix::<Q>::from_i64_rows(&[&[2, 0], &[0, 4]]);
        let x = solve(&Matrix::Dense(a), &Matrix::Dense(DenseMatrix::identity(2))).unwrap().x;
        assert_eq!(x[(0, 0)], Q::from_ratio(1, 2));
        assert_eq!(x[(1, 1)], Q::from_ratio(1, 4));
        assert_eq!(x[(0, 1)], Q::from_i64(0));
    }

    #[test]
    fn exact_singular_is_reported() {
        let a = DenseMatrix::<Q>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let err = solve(&Matrix::Dense(a.clone()), &Matrix::Dense(DenseMatrix::identity(2))).unwrap_err();
        assert!(matches!(err, LinalgError::SingularMatrix { .. }));
        assert!(LuFactor::new(&a).is_err());
    }

    #[test]
    fn float_singular_is_reported() {
        let a = DenseMatrix::<Complex64>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(matches!(
            solve(&Matrix::Dense(a), &Matrix::Dense(DenseMatrix::identity(2))),
            Err(LinalgError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn bareiss_agrees_with_lu_on_rationals() {
        let a = DenseMatrix::<Q>::from_rows(alloc::vec![
            alloc::vec![Q::from_ratio(1, 2), Q::from_i64(3), Q::from_ratio(-2, 3)],
            alloc::vec![Q::from_i64(0), Q::from_ratio(5, 7), Q::from_i64(1)],
            alloc::vec![Q::from_i64(4), Q::from_i64(0), Q::from_ratio(1, 3)],
        ]);
        let b = DenseMatrix::<Q>::from_i64_rows(&[&[1, 0], &[2, 1], &[3, -1]]);
        let x = solve(&Matrix::Dense(a.clone()), &Matrix::Dense(b.clone())).unwrap().x;
        assert_eq!(a.mul(&x), b);
        assert_eq!(LuFactor::new(&a).unwrap().solve(&b).unwrap(), x);
    }

    #[test]
    fn rref_pivots() {
        let a = DenseMatrix::<Q>::from_i64_rows(&[&[0, 1, 2, 1], &[0, 2, 4, 3], &[0, 0, 0, 1]]);
        let (_, piv) = rref(&a);
        assert_eq!(piv, alloc::vec![1, 3]);
    }
}
