use std::sync::Arc;

use proptest::prelude::*;
use symred_core::catalog::Family;
use symred_core::chartable::{catalog_character_table, catalog_irreps, CharacterTable, IrrepSet};
use symred_core::group::{evaluate_word, FiniteGroup, Permutation};
use symred_core::linalg::{column_space_basis, rank};
use symred_core::matrix::{CsrMatrix, DenseMatrix, Matrix};
use symred_core::reduction::{
    block_diagonalize, block_spectrum, full_spectrum, multiplicities, projector, symmetry_adapted_basis,
    MultiplicityMode,
};
use symred_core::reps::{natural_representation, regular_representation, Representation};
use symred_core::scalar::{Complex64, Rational, Scalar};

fn permutation(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn small_group() -> impl Strategy<Value = FiniteGroup> {
    (2usize..=5).prop_flat_map(|d| proptest::collection::vec(permutation(d), 1..=2)).prop_map(|g| FiniteGroup::close(g).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn int_matrix(n: usize) -> impl Strategy<Value = DenseMatrix<Rational>> {
    proptest::collection::vec(-3i64..=3, n * n)
        .prop_map(move |v| DenseMatrix::from_row_major(n, n, v.into_iter().map(Rational::from_i64).collect()))
}

/// Rank by plain elimination on an array of rationals.
fn oracle_rank(m: &DenseMatrix<Rational>) -> usize {
    let mut a: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) {
            a.swap(r, p);
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone() / a[r][c].clone();
                    for k in 0..cols {
                        let v = a[r][k].clone();
                        a[i][k] -= f.clone() * v;
                    }
                }
            }
            r += 1;
        }
    }
    r
}

fn d4() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_generator_strings(&["(1,2,3,4)", "(1,3)"]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_words_classes_inverses(g in small_group()) {
        let n = g.order();
        for a in 0..n {
            for b in 0..n {
                let p = g.element(a).unwrap().compose(g.element(b).unwrap()).unwrap();
                prop_assert!(g.index_of(&p).is_some());
            }
            let w = evaluate_word(g.generators(), g.word(a)).unwrap();
            prop_assert_eq!(&w, g.element(a).unwrap());
            let inv = g.inverse(a).unwrap();
            prop_assert_eq!(g.inverse(inv).unwrap(), a);
            prop_assert!(g.element(a).unwrap().compose(g.element(inv).unwrap()).unwrap().is_identity());
        }
        prop_assert_eq!(g.class_sizes().iter().sum::<usize>(), n);
        prop_assert_eq!(&g.conjugacy_classes()[0].members, &vec![0]);
        prop_assert!(g.element(0).unwrap().is_identity());
        prop_assert!(g.word(0).is_empty());
        for c in g.conjugacy_classes() {
            prop_assert_eq!(c.representative, c.members[0]);
            let rep = g.element(c.representative).unwrap();
            for &m in &c.members {
                let found = (0..n).any(|h| {
                    let hh = g.element(h).unwrap();
                    hh.compose(rep).unwrap().compose(&hh.inverse()).unwrap() == *g.element(m).unwrap()
                });
                prop_assert!(found);
            }
        }
    }

    #[test]
    fn permutation_text_round_trip(p in permutation(7)) {
        let text = p.to_string();
        let back = Permutation::parse(&text).unwrap().padded(7);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
    }

    #[test]
    fn rank_matches_oracle(m in int_matrix(5), zero_rows in proptest::collection::vec(0usize..5, 0..3)) {
        let mut m = m;
        for r in zero_rows {
            for v in m.row_mut(r) {
                *v = Rational::from_i64(0);
            }
        }
        let expect = oracle_rank(&m);
        prop_assert_eq!(rank(&Matrix::Dense(m.clone()), 0.0), expect);
        prop_assert_eq!(rank(&Matrix::Sparse(CsrMatrix::from_dense(&m)), 0.0), expect);
        let float = Matrix::Dense(m.to_complex());
        prop_assert_eq!(rank(&float, 1e-9), expect);
        prop_assert_eq!(column_space_basis(&float, 1e-9).rank(), expect);
    }

    #[test]
    fn sparse_and_dense_agree(a in int_matrix(6), b in int_matrix(6)) {
        let (sa, sb) = (CsrMatrix::from_dense(&a), CsrMatrix::from_dense(&b));
        prop_assert_eq!(sa.to_dense(), a.clone());
        prop_assert_eq!(sa.mul(&sb).to_dense(), a.mul(&b));
        prop_assert_eq!(sa.mul_dense(&b), a.mul(&b));
        prop_assert_eq!(sb.left_mul_dense(&a), a.mul(&b));
        let (fa, fb) = (a.to_complex(), b.to_complex());
        let sparse_float = CsrMatrix::from_dense(&fa).mul_dense(&fb);
        prop_assert!(sparse_float.max_abs_diff(&fa.mul(&fb)) < 1e-12);
    }

    #[test]
    fn characters_of_sums_and_products(g in small_group()) {
        let g = Arc::new(g);
        let nat = natural_representation::<Rational>(&g);
        let reg = regular_representation::<Rational>(&g).unwrap();
        let sum = nat.direct_sum(&reg).unwrap();
        let prod = nat.tensor_product(&nat).unwrap();
        let (cn, cr) = (nat.character(), reg.character());
        for k in 0..cn.len() {
            prop_assert_eq!(&sum.character()[k], &(&cn[k] + &cr[k]));
            prop_assert_eq!(&prod.character()[k], &(&cn[k] * &cn[k]));
            let rep = g.conjugacy_classes()[k].representative;
            prop_assert_eq!(cn[k].clone(), Rational::from_i64(g.element(rep).unwrap().fixed_points() as i64));
        }
        prop_assert!(nat.is_representation().holds);
        prop_assert!(reg.is_representation().holds);
    }

    #[test]
    fn generator_check_agrees_with_exhaustive(v in proptest::collection::vec(-2i64..=2, 16), symmetrize in any::<bool>()) {
        let g = d4();
        let phi = natural_representation::<Rational>(&g);
        let mut m = Matrix::Dense(DenseMatrix::from_row_major(4, 4, v.into_iter().map(Rational::from_i64).collect()));
        if symmetrize {
            m = Matrix::Dense(average(&phi, &m.to_dense()));
        }
        let quick = phi.is_equivariant(&m).unwrap().holds;
        let full = phi.is_equivariant_exhaustive(&m).unwrap().holds;
        prop_assert_eq!(quick, full);
        if symmetrize {
            prop_assert!(quick);
        }
    }
}

/// `(1/|G|) Σ φ(g) R φ(g)⁻¹`
fn average<T: Scalar>(phi: &Representation<T>, r: &DenseMatrix<T>) -> DenseMatrix<T> {
    let g = phi.group();
    let n = phi.degree();
    let mut acc = DenseMatrix::<T>::zeros(n, n);
    for e in 0..g.order() {
        let inv = g.inverse(e).unwrap();
        let full = phi.image(e).mul_dense(&r.mul(&phi.image(inv).to_dense()));
        acc = acc.add(&full);
    }
    acc.scale(&T::from_ratio(1, g.order() as i64))
}

struct Case {
    name: &'static str,
    group: Arc<FiniteGroup>,
    family: Family,
}

fn cases() -> Vec<Case> {
    let g = |s: &[&str]| Arc::new(FiniteGroup::from_generator_strings(s).unwrap());
    vec![
        Case { name: "C2", group: g(&["(1,2)"]), family: Family::Cyclic(2) },
        Case {
            name: "C2v",
            group: g(&["[2,1,4,3]", "[1,2,4,3]", "[2,1,3,4]"]),
            family: Family::Product(vec![Family::Cyclic(2), Family::Cyclic(2)]),
        },
        Case { name: "S3", group: g(&["(1,2)", "(1,2,3)"]), family: Family::Symmetric(3) },
        Case { name: "D4", group: g(&["(1,2,3,4)", "(1,3)"]), family: Family::Dihedral(4) },
    ]
}

fn projector_algebra<T: Scalar>(phi: &Representation<T>, irreps: &IrrepSet<T>, table: &CharacterTable, tol: f64) {
    let n = phi.degree();
    let mults = multiplicities(phi, table, MultiplicityMode::ClassSum).unwrap();
    assert_eq!(mults, multiplicities(phi, table, MultiplicityMode::FullSum).unwrap());
    let mut total = DenseMatrix::<T>::zeros(n, n);
    for (row, entry) in mults.entries.iter().enumerate() {
        let j = irreps.index_for_row(table, row, 1e-9).unwrap();
        let nj = entry.degree;
        let p: Vec<Vec<DenseMatrix<T>>> =
            (0..nj).map(|k| (0..nj).map(|l| projector(phi, irreps, j, k, l).unwrap().matrix.to_dense()).collect()).collect();
        for k in 0..nj {
            assert!(p[k][k].mul(&p[k][k]).max_abs_diff(&p[k][k]) <= tol, "idempotent {}", entry.label);
            total = total.add(&p[k][k]);
            for l in 0..nj {
                for m in 0..nj {
                    assert!(p[k][l].mul(&p[l][m]).max_abs_diff(&p[k][m]) <= tol, "transference {}", entry.label);
                }
            }
        }
        let p11 = Matrix::Dense(p[0][0].clone());
        let r = if p11.max_abs() < 1e-9 { 0 } else { rank(&p11, 1e-9) };
        assert_eq!(r, entry.multiplicity, "rank of P_11 for {}", entry.label);
    }
    assert!(total.max_abs_diff(&DenseMatrix::identity(n)) <= tol);
}

#[test]
fn projector_algebra_exact_and_float() {
    for case in cases() {
        let table = catalog_character_table(&case.group, &case.family).unwrap();
        let exact = catalog_irreps::<Rational>(&case.group, &case.family).unwrap();
        let float = catalog_irreps::<Complex64>(&case.group, &case.family).unwrap();
        let nat = natural_representation::<Rational>(&case.group);
        let reg = regular_representation::<Rational>(&case.group).unwrap();
        let mixed = nat.direct_sum(&exact.irreps().last().unwrap().rep).unwrap().tensor_product(&exact.irreps()[0].rep).unwrap();
        for phi in [&nat, &reg, &mixed] {
            projector_algebra(phi, &exact, &table, 0.0);
            let fphi = phi.map(Scalar::to_complex);
            projector_algebra(&fphi, &float, &table, 1e-8);
        }
        let _ = case.name;
    }
}

#[test]
fn catalog_traces_match_tables() {
    for case in cases() {
        let table = catalog_character_table(&case.group, &case.family).unwrap();
        let irreps = catalog_irreps::<Rational>(&case.group, &case.family).unwrap();
        for (row, irrep) in irreps.irreps().iter().enumerate() {
            let chi: Vec<_> = irrep.rep.character().iter().map(Scalar::to_number).collect();
            assert_eq!(chi, table.values()[row], "{} {}", case.name, irrep.label);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_equivariant_operators_block_diagonalize(seed in proptest::collection::vec(-1.0f64..1.0, 2 * 64), which in 0usize..4) {
        let case = &cases()[which];
        let table = catalog_character_table(&case.group, &case.family).unwrap();
        let irreps = catalog_irreps::<Complex64>(&case.group, &case.family).unwrap();
        let nat = natural_representation::<Complex64>(&case.group);
        let phi = nat.direct_sum(&nat).unwrap();
        let n = phi.degree();
        let r = DenseMatrix::from_fn(n, n, |i, j| Complex64::new(seed[i * n + j], seed[64 + i * n + j]));
        let m = Matrix::Dense(average(&phi, &r));
        let basis = symmetry_adapted_basis(&phi, &irreps, &table).unwrap();
        let form = block_diagonalize(&m, &basis).unwrap();
        let norm = m.frobenius_norm();
        prop_assert!(form.off_block_residual <= 1e-9 * norm);
        prop_assert!(form.copy_deviation <= 1e-8 * norm);
        let blocks = block_spectrum(&form, false).unwrap();
        let full = full_spectrum(&m).unwrap();
        prop_assert_eq!(blocks.len(), full.len());
        // Compare as multisets: greedy nearest matching.
        let mut used = vec![false; full.len()];
        for e in &blocks {
            let (best, dist) = full
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, (z - e.value).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[best] = true;
            prop_assert!(dist <= 1e-8 * norm.max(1.0), "{} vs {}", e.value, full[best]);
        }
    }
}
