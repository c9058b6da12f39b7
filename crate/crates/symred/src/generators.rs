//! Built-in problems: the 2-D Dirichlet Laplacian, a non-Hermitian
//! Schrödinger operator on the same grid, and the water GF product.

use std::sync::Arc;

use serde::Deserialize;
use symred_core::catalog::Family;
use symred_core::group::{FiniteGroup, GroupError, Permutation};
use symred_core::matrix::{CsrMatrix, DenseMatrix, Matrix};
use symred_core::reps::{natural_representation, RepError, Representation};
use symred_core::scalar::{Complex64, Rational, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("grid side must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Representation(#[from] RepError),
}

/// A group, its action and an operator that commutes with it.
#[derive(Clone, Debug)]
pub struct Problem<T: Scalar> {
    pub group: Arc<FiniteGroup>,
    pub rep: Representation<T>,
    pub operator: Matrix<T>,
    /// Catalog family matching `group`.
    pub family: Family,
    /// Conventional irrep names replacing the catalog labels, if any.
    pub labels: Option<Vec<String>>,
}

/// Row-major index of grid point `(i, j)`.
fn point(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// D4 acting on the points of an `n × n` grid: rotation `(i,j) → (j, n−1−i)`
/// and reflection `(i,j) → (i, n−1−j)`.
pub fn grid_d4(n: usize) -> Result<Arc<FiniteGroup>, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::GridTooSmall(n));
    }
    let mut rot = vec![0; n * n];
    let mut refl = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            rot[point(n, i, j)] = point(n, j, n - 1 - i);
            refl[point(n, i, j)] = point(n, i, n - 1 - j);
        }
    }
    let gens = vec![Permutation::from_images(rot)?, Permutation::from_images(refl)?];
    Ok(Arc::new(FiniteGroup::close(gens)?))
}

fn laplacian_triplets<T: Scalar>(n: usize) -> Vec<(usize, usize, T)> {
    let mut t = Vec::with_capacity(5 * n * n);
    for i in 0..n {
        for j in 0..n {
            let p = point(n, i, j);
            t.push((p, p, T::from_i64(4)));
            let mut nb = |q: usize| t.push((p, q, T::from_i64(-1)));
            if i > 0 {
                nb(point(n, i - 1, j));
            }
            if i + 1 < n {
                nb(point(n, i + 1, j));
            }
            if j > 0 {
                nb(point(n, i, j - 1));
            }
            if j + 1 < n {
                nb(point(n, i, j + 1));
            }
        }
    }
    t
}

/// Five-point Laplacian with Dirichlet boundary on an `n × n` grid (diagonal
/// 4, neighbours −1, no mesh scaling).
pub fn laplacian2d<T: Scalar>(n: usize) -> Result<Problem<T>, GeneratorError> {
    let group = grid_d4(n)?;
    let operator = Matrix::Sparse(CsrMatrix::from_triplets(n * n, n * n, laplacian_triplets(n)));
    Ok(Problem { rep: natural_representation(&group), group, operator, family: Family::Dihedral(4), labels: None })
}

/// Eigenvalues `4 − 2cos(pπ/(n+1)) − 2cos(qπ/(n+1))`, `p, q = 1..n`, sorted.
pub fn laplacian2d_eigenvalues(n: usize) -> Vec<f64> {
    let h = std::f64::consts::PI / (n + 1) as f64;
    let mut out: Vec<f64> = (1..=n)
        .flat_map(|p| (1..=n).map(move |q| 4.0 - 2.0 * (p as f64 * h).cos() - 2.0 * (q as f64 * h).cos()))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    /// `V0 (x² + y²)`
    #[default]
    Quadratic,
    /// `V0 (x⁴ + y⁴)`
    Quartic,
}

/// Grid coordinate `−1 + (i+1)·2/(n+1)` of index `i`, written so that mirrored
/// indices give exactly negated values.
pub fn grid_coordinate(n: usize, i: usize) -> f64 {
    (2 * i as i64 + 1 - n as i64) as f64 / (n + 1) as f64
}

/// `H = L + i·diag(V(x, y))` on the `n × n` grid.
pub fn schrodinger2d(n: usize, v0: f64, potential: Potential) -> Result<Problem<Complex64>, GeneratorError> {
    let group = grid_d4(n)?;
    let mut t = laplacian_triplets::<Complex64>(n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (grid_coordinate(n, i), grid_coordinate(n, j));
            let v = match potential {
                Potential::Quadratic => x * x + y * y,
                Potential::Quartic => x.powi(4) + y.powi(4),
            };
            let p = point(n, i, j);
            t.push((p, p, Complex64::new(0.0, v0 * v)));
        }
    }
    let operator = Matrix::Sparse(CsrMatrix::from_triplets(n * n, n * n, t));
    Ok(Problem { rep: natural_representation(&group), group, operator, family: Family::Dihedral(4), labels: None })
}

/// Force-constant and kinetic parameters of the water molecule. `g21` plays
/// the role of the coupling usually written `g12`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaterParams {
    pub f11: Rational,
    pub f12: Rational,
    pub f33: Rational,
    pub g11: Rational,
    pub g21: Rational,
    pub g13: Rational,
    pub g33: Rational,
}

pub struct WaterProblem<T: Scalar> {
    pub f: DenseMatrix<T>,
    pub g: DenseMatrix<T>,
    /// Operator `F·G` under the C2v action on the atoms (H, H, O).
    pub problem: Problem<T>,
}

/// C2v generators `C2, σv(xz), σv'(yz)` as permutations of four points, and
/// the matrices they induce on the atoms (H, H, O).
pub const WATER_GENERATORS: [&str; 3] = ["[2,1,4,3]", "[1,2,4,3]", "[2,1,3,4]"];
pub const WATER_LABELS: [&str; 4] = ["A1", "B2", "B1", "A2"];

pub fn water_gf<T: Scalar>(p: &WaterParams) -> Result<WaterProblem<T>, GeneratorError> {
    let c = |q: &Rational| T::from_number(&symred_core::scalar::Number::Exact(q.clone())).expect("rationals embed in every backend");
    let z = T::zero();
    let f = DenseMatrix::from_rows(vec![
        vec![c(&p.f11), c(&p.f12), z.clone()],
        vec![c(&p.f12), c(&p.f11), z.clone()],
        vec![z.clone(), z, c(&p.f33)],
    ]);
    let g = DenseMatrix::from_rows(vec![
        vec![c(&p.g11), c(&p.g21), c(&p.g13)],
        vec![c(&p.g21), c(&p.g11), c(&p.g13)],
        vec![c(&p.g13), c(&p.g13), c(&p.g33)],
    ]);
    let group = Arc::new(FiniteGroup::from_generator_strings(&WATER_GENERATORS)?);
    let swap = Matrix::Sparse(CsrMatrix::permutation(&[1, 0, 2]));
    let images = vec![swap.clone(), Matrix::Sparse(CsrMatrix::identity(3)), swap];
    let rep = Representation::new(group.clone(), images)?;
    let operator = Matrix::Dense(f.mul(&g));
    Ok(WaterProblem {
        f,
        g,
        problem: Problem {
            group,
            rep,
            operator,
            family: Family::Product(vec![Family::Cyclic(2), Family::Cyclic(2)]),
            labels: Some(WATER_LABELS.iter().map(|s| s.to_string()).collect()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_small_grid() {
        let p = laplacian2d::<Rational>(2).unwrap();
        let expect = DenseMatrix::from_i64_rows(&[&[4, -1, -1, 0], &[-1, 4, 0, -1], &[-1, 0, 4, -1], &[0, -1, -1, 4]]);
        assert_eq!(p.operator.to_dense(), expect);
        assert_eq!(p.group.order(), 8);
    }

    #[test]
    fn generated_operators_are_equivariant() {
        for n in [2, 3, 4, 7] {
            let p = laplacian2d::<Rational>(n).unwrap();
            assert!(p.rep.is_equivariant(&p.operator).unwrap().holds, "laplacian n={n}");
            for pot in [Potential::Quadratic, Potential::Quartic] {
                let s = schrodinger2d(n, 10.0, pot).unwrap();
                let check = s.rep.is_equivariant_exhaustive(&s.operator).unwrap();
                assert!(check.max_residual == 0.0, "schrodinger n={n} {pot:?}: {}", check.max_residual);
            }
        }
    }

    #[test]
    fn zero_potential_is_the_laplacian() {
        let s = schrodinger2d(5, 0.0, Potential::Quadratic).unwrap();
        let l = laplacian2d::<Complex64>(5).unwrap();
        assert_eq!(s.operator.to_dense(), l.operator.to_dense());
    }

    #[test]
    fn odd_grid_fixes_centre() {
        let g = grid_d4(5).unwrap();
        assert!(g.elements().iter().all(|e| e.apply(point(5, 2, 2)) == point(5, 2, 2)));
        assert_eq!(grid_coordinate(5, 2), 0.0);
        assert_eq!(grid_coordinate(4, 0), -grid_coordinate(4, 3));
    }

    #[test]
    fn water_operator_commutes() {
        let r = |n: i64| Rational::from_i64(n);
        let p = WaterParams { f11: r(3), f12: r(1), f33: r(5), g11: r(2), g21: r(-1), g13: r(4), g33: r(7) };
        let w = water_gf::<Rational>(&p).unwrap();
        assert!(w.problem.rep.is_representation().holds);
        assert!(w.problem.rep.is_equivariant(&w.problem.operator).unwrap().holds);
    }
}
