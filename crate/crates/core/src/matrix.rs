//! Dense row-major and compressed sparse row matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::scalar::{Complex64, Scalar};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must be `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        DenseMatrix { rows: nrows, cols: ncols, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| T::from_i64(v)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_complex(&self) -> DenseMatrix<Complex64> {
        self.map(|v| v.to_complex())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: &T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += s.clone() * b.clone();
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += a.clone() * b.clone();
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)].clone();
        }
        t
    }

    pub fn submatrix(&self, row0: usize, col0: usize, nrows: usize, ncols: usize) -> Self {
        Self::from_fn(nrows, ncols, |i, j| self[(row0 + i, col0 + j)].clone())
    }

    /// Block-diagonal stacking `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)].clone() * other[(i % other.rows, j % other.cols)].clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| {
            let m = v.modulus();
            m * m
        }).sum())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Compressed sparse row matrix. Stores no explicit zeros; column indices are
/// strictly increasing within each row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    /// Permutation matrix sending basis vector `e_i` to `e_{images[i]}`.
    pub fn permutation(images: &[usize]) -> Self {
        let n = images.len();
        let mut col_of_row = vec![0; n];
        for (i, &img) in images.iter().enumerate() {
            col_of_row[img] = i;
        }
        CsrMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: col_of_row,
            values: vec![T::one(); n],
        }
    }

    /// Builds from `(row, col, value)` triplets. Duplicates are summed and
    /// resulting zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet out of range");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                rows_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows_of.into_iter().zip(col_idx).zip(values) {
            if !v.is_zero() {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { rows, cols, row_ptr, col_idx: keep_cols, values: keep_vals }
    }

    pub fn from_dense(m: &DenseMatrix<T>) -> Self {
        let mut row_ptr = Vec::with_capacity(m.rows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..m.rows() {
            for (j, v) in m.row(i).iter().enumerate() {
                if !v.is_zero() {
                    col_idx.push(j);
                    values.push(v.clone());
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { rows: m.rows(), cols: m.cols(), row_ptr, col_idx, values }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, x)| (i, j, x))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (c, v) = self.row(i);
        match c.binary_search(&j) {
            Ok(p) => v[p].clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for (i, j, v) in self.iter() {
            let p = next[j];
            col_idx[p] = i;
            values[p] = v.clone();
            next[j] += 1;
        }
        CsrMatrix { rows: self.cols, cols: self.rows, row_ptr, col_idx, values }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CsrMatrix<U> {
        CsrMatrix::from_triplets(self.rows, self.cols, self.iter().map(|(i, j, v)| (i, j, f(v))).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let (c, x) = self.row(i);
                let mut acc = T::zero();
                for (&j, a) in c.iter().zip(x) {
                    acc += a.clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn mul_dense(&self, other: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(self.cols, other.rows());
        let mut out = DenseMatrix::zeros(self.rows, other.cols());
        for i in 0..self.rows {
            let (c, x) = self.row(i);
            let out_row = out.row_mut(i);
            for (&k, a) in c.iter().zip(x) {
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a.clone() * b.clone();
                }
            }
        }
        out
    }

    /// `dense * self`
    pub fn left_mul_dense(&self, other: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(other.cols(), self.rows);
        let mut out = DenseMatrix::zeros(other.rows(), self.cols);
        for i in 0..other.rows() {
            let src = other.row(i);
            let out_row = out.row_mut(i);
            for (k, a) in src.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (c, x) = self.row(k);
                for (&j, b) in c.iter().zip(x) {
                    out_row[j] += a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut acc: Vec<Option<T>> = vec![None; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            let (c, x) = self.row(i);
            for (&k, a) in c.iter().zip(x) {
                let (c2, x2) = other.row(k);
                for (&j, b) in c2.iter().zip(x2) {
                    let p = a.clone() * b.clone();
                    match &mut acc[j] {
                        Some(v) => *v += p,
                        slot @ None => {
                            *slot = Some(p);
                            touched.push(j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let v = acc[j].take().unwrap();
                if !v.is_zero() {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            touched.clear();
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { rows: self.rows, cols: other.cols, row_ptr, col_idx, values }
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: &T, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut t: Vec<(usize, usize, T)> = self.iter().map(|(i, j, v)| (i, j, v.clone())).collect();
        t.extend(other.iter().map(|(i, j, v)| (i, j, s.clone() * v.clone())));
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| {
            let m = v.modulus();
            m * m
        }).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }
}

/// A matrix in either storage format.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix<T> {
    Dense(DenseMatrix<T>),
    Sparse(CsrMatrix<T>),
}

impl<T: Scalar> From<DenseMatrix<T>> for Matrix<T> {
    fn from(m: DenseMatrix<T>) -> Self {
        Matrix::Dense(m)
    }
}

impl<T: Scalar> From<CsrMatrix<T>> for Matrix<T> {
    fn from(m: CsrMatrix<T>) -> Self {
        Matrix::Sparse(m)
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows(),
            Matrix::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols(),
            Matrix::Sparse(m) => m.cols(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match self {
            Matrix::Dense(m) => m[(i, j)].clone(),
            Matrix::Sparse(m) => m.get(i, j),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix<T> {
        match self {
            Matrix::Dense(m) => CsrMatrix::from_dense(m),
            Matrix::Sparse(m) => m.clone(),
        }
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        match self {
            Matrix::Dense(m) => m,
            Matrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn trace(&self) -> T {
        match self {
            Matrix::Dense(m) => m.trace(),
            Matrix::Sparse(m) => m.trace(),
        }
    }

    /// Product keeping sparse storage only when both factors are sparse.
    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Matrix::Sparse(a), Matrix::Sparse(b)) => Matrix::Sparse(a.mul(b)),
            (Matrix::Sparse(a), Matrix::Dense(b)) => Matrix::Dense(a.mul_dense(b)),
            (Matrix::Dense(a), Matrix::Sparse(b)) => Matrix::Dense(b.left_mul_dense(a)),
            (Matrix::Dense(a), Matrix::Dense(b)) => Matrix::Dense(a.mul(b)),
        }
    }

    pub fn mul_dense(&self, other: &DenseMatrix<T>) -> DenseMatrix<T> {
        match self {
            Matrix::Dense(a) => a.mul(other),
            Matrix::Sparse(a) => a.mul_dense(other),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        match self {
            Matrix::Dense(a) => a.mul_vec(v),
            Matrix::Sparse(a) => a.mul_vec(v),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.frobenius_norm(),
            Matrix::Sparse(m) => m.frobenius_norm(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.max_abs(),
            Matrix::Sparse(m) => m.max_abs(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match (self, other) {
            (Matrix::Dense(a), Matrix::Dense(b)) => a.max_abs_diff(b),
            _ => {
                let a = self.to_sparse();
                let b = other.to_sparse();
                a.add_scaled(&-T::one(), &b).max_abs()
            }
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        match self {
            Matrix::Dense(m) => Matrix::Dense(m.map(f)),
            Matrix::Sparse(m) => Matrix::Sparse(m.map(f)),
        }
    }
}
