//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symred::bench::{benchmark, format_table};
use symred::generators::{laplacian2d, schrodinger2d, water_gf, Potential, WaterParams};
use symred::job::JobSpec;
use symred::pipeline::{run_job, spectrum_deviation, RunOptions};
use symred_core::catalog::Family;
use symred_core::chartable::{catalog_character_table, catalog_irreps, numeric_character_table, IrrepSet, NumericOptions};
use symred_core::group::FiniteGroup;
use symred_core::matrix::{DenseMatrix, Matrix};
use symred_core::reduction::{
    block_diagonalize, block_spectrum, full_spectrum, multiplicities, projector, quick_block_prevision,
    symmetry_adapted_basis, BlockPrevision, MultiplicityMode,
};
use symred_core::reps::{natural_representation, regular_representation, Representation};
use symred_core::scalar::{Complex64, Rational, Scalar};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn group(gens: &[&str]) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_generator_strings(gens).unwrap())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.random_range(-30..=30), rng.random_range(1..=9))
}

fn water() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let beta = [[2i64, 0, 2], [2, 0, -2], [0, 4, 0]];
    for draw in 0..20 {
        let p = WaterParams {
            f11: random_rational(&mut rng),
            f12: random_rational(&mut rng),
            f33: random_rational(&mut rng),
            g11: random_rational(&mut rng),
            g21: random_rational(&mut rng),
            g13: random_rational(&mut rng),
            g33: random_rational(&mut rng),
        };
        let w = water_gf::<Rational>(&p).map_err(|e| e.to_string())?;
        let prob = &w.problem;
        let labels = prob.labels.clone().unwrap();
        let table = catalog_character_table(&prob.group, &prob.family).unwrap().with_labels(labels.clone()).unwrap();
        let irreps = catalog_irreps::<Rational>(&prob.group, &prob.family).unwrap().with_labels(labels).unwrap();
        let prevision = quick_block_prevision(&prob.rep, &table).map_err(|e| e.to_string())?;
        let expect = vec![
            BlockPrevision { label: "A1".into(), size: 2, count: 1 },
            BlockPrevision { label: "B1".into(), size: 1, count: 1 },
        ];
        ensure(prevision == expect, || format!("draw {draw}: prevision {prevision:?}"))?;

        let basis = symmetry_adapted_basis(&prob.rep, &irreps, &table).map_err(|e| e.to_string())?;
        let form = block_diagonalize(&prob.operator, &basis).map_err(|e| e.to_string())?;
        ensure(form.off_block_residual == 0.0, || format!("draw {draw}: off-block residual {}", form.off_block_residual))?;

        let (s1, s2) = (&p.f11 + &p.f12, &p.g11 + &p.g21);
        let two = q(2, 1);
        let displayed = DenseMatrix::from_rows(vec![
            vec![&s1 * &s2, &two * &s1 * &p.g13],
            vec![&p.f33 * &p.g13, &p.f33 * &p.g33],
        ]);
        let a1 = form.get_block(0).unwrap();
        ensure(form.blocks[0].label == "A1" && a1 == displayed, || format!("draw {draw}: A1 block {a1:?}"))?;
        let b1 = form.get_block(1).unwrap();
        let b1_expect = (&p.f11 - &p.f12) * (&p.g11 - &p.g21);
        ensure(form.blocks[1].label == "B1" && b1[(0, 0)] == b1_expect, || format!("draw {draw}: B1 block {b1:?}"))?;

        let m = basis.matrix();
        for c in 0..3 {
            let col = m.column(c);
            let (r, _) = beta.iter().enumerate().find(|(_, row)| row[c] != 0).unwrap();
            let scale = col[r].clone() / q(beta[r][c], 1);
            let proportional = !scale.is_zero() && (0..3).all(|i| col[i] == &scale * q(beta[i][c], 1));
            ensure(proportional, || format!("draw {draw}: basis column {c} = {col:?}"))?;
        }
    }
    Ok("20 draws: A1 2x2 and B1 1x1 blocks match exactly; basis columns proportional to beta".into())
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                if a[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (c, s) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..n {
                    let (akp, akr) = (a[k][p], a[k][r]);
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let (apk, ark) = (a[p][k], a[r][k]);
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

fn d4_walkthrough() -> Outcome {
    let g = group(&["(1,2,3,4)", "(1,3)"]);
    let phi = natural_representation::<Rational>(&g);
    let table = catalog_character_table(&g, &Family::Dihedral(4)).unwrap();
    let irreps = catalog_irreps::<Rational>(&g, &Family::Dihedral(4)).unwrap();
    let mults = multiplicities(&phi, &table, MultiplicityMode::ClassSum).map_err(|e| e.to_string())?;
    for m in &mults.entries {
        let want = usize::from(matches!(m.label.as_str(), "A1" | "B1" | "E"));
        ensure(m.multiplicity == want, || format!("multiplicity of {} is {}", m.label, m.multiplicity))?;
    }
    let (a, b, c) = (10i64, 2i64, 1i64);
    let rows = [[a, b, c, b], [b, a, b, c], [c, b, a, b], [b, c, b, a]];
    let m = Matrix::Dense(DenseMatrix::from_i64_rows(&rows.iter().map(|r| &r[..]).collect::<Vec<_>>()));
    let basis = symmetry_adapted_basis(&phi, &irreps, &table).map_err(|e| e.to_string())?;
    let form = block_diagonalize(&m, &basis).map_err(|e| e.to_string())?;
    ensure(form.off_block_residual == 0.0, || format!("off-block residual {}", form.off_block_residual))?;
    let sizes: Vec<usize> = form.blocks.iter().map(|b| b.size).collect();
    ensure(sizes == [1, 1, 1, 1], || format!("block sizes {sizes:?}"))?;
    let mut blocks: Vec<f64> = block_spectrum(&form, false).unwrap().iter().map(|e| e.value.re).collect();
    blocks.sort_by(f64::total_cmp);
    let oracle = jacobi_eigenvalues(rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect());
    ensure(blocks == [7.0, 9.0, 9.0, 15.0], || format!("block spectrum {blocks:?}"))?;
    ensure(oracle.iter().zip(&blocks).all(|(x, y)| (x - y).abs() < 1e-12), || format!("oracle {oracle:?}"))?;
    Ok("theta = A1 + B1 + E, exact off-block residual 0, spectrum {7, 9, 9, 15}".into())
}

fn values(spectrum: &[symred_core::reduction::SpectrumEntry]) -> Vec<Complex64> {
    spectrum.iter().map(|e| e.value).collect()
}

fn laplacian() -> Outcome {
    let n = 10;
    let p = laplacian2d::<Complex64>(n).map_err(|e| e.to_string())?;
    let table = catalog_character_table(&p.group, &p.family).unwrap();
    let irreps = catalog_irreps::<Complex64>(&p.group, &p.family).unwrap();
    let basis = symmetry_adapted_basis(&p.rep, &irreps, &table).map_err(|e| e.to_string())?;
    let form = block_diagonalize(&p.operator, &basis).map_err(|e| e.to_string())?;
    let blocks = values(&block_spectrum(&form, false).unwrap());
    let full = full_spectrum(&p.operator).unwrap();
    let dev = spectrum_deviation(&blocks, &full);
    ensure(dev < 1e-8, || format!("block vs full deviation {dev:e}"))?;
    let h = std::f64::consts::PI / (n + 1) as f64;
    let mut closed: Vec<f64> =
        (1..=n).flat_map(|a| (1..=n).map(move |b| 4.0 - 2.0 * (a as f64 * h).cos() - 2.0 * (b as f64 * h).cos())).collect();
    closed.sort_by(f64::total_cmp);
    for (name, s) in [("block", &blocks), ("full", &full)] {
        let worst = s.iter().zip(&closed).map(|(z, c)| (z - Complex64::new(*c, 0.0)).norm()).fold(0.0, f64::max);
        ensure(worst < 1e-8, || format!("{name} spectrum vs closed form {worst:e}"))?;
    }
    Ok(format!("N=100, block vs full {dev:.1e}, both within 1e-8 of the closed form"))
}

fn schrodinger() -> Outcome {
    let p = schrodinger2d(30, 10.0, Potential::Quadratic).map_err(|e| e.to_string())?;
    let check = p.rep.is_equivariant(&p.operator).map_err(|e| e.to_string())?;
    ensure(check.holds && check.relative_residual < 1e-12, || format!("equivariance residual {:e}", check.relative_residual))?;

    let text = "version = 1\nbackend = \"float\"\n[problem]\nkind = \"schrodinger2d\"\nn = 30\nv0 = 10.0\n[irreps]\nsource = \"catalog\"\nfamily = \"dihedral(4)\"\n[flags]\nbaseline_comparison = true\n";
    let spec = JobSpec::parse(text, std::path::Path::new(".")).map_err(|e| e.to_string())?;
    let run = run_job(&spec, RunOptions::default()).map_err(|e| e.to_string())?;
    let dev = run.baseline_deviation.unwrap();
    ensure(dev < 1e-6, || format!("block vs full deviation {dev:e}"))?;
    let total: usize = run.prevision.iter().map(|b| b.size * b.count).sum();
    let largest = run.prevision.iter().map(|b| b.size).max().unwrap_or(0);
    ensure(total == 900 && largest < 900, || format!("sum n_j c_j = {total}, largest block {largest}"))?;

    let rows = benchmark(&spec, &[30], 3, RunOptions::default()).map_err(|e| e.to_string())?;
    let r = &rows[0];
    ensure(r.runs.len() == 3 && r.t_f.mean > 0.0 && r.t_p.mean > 0.0 && r.t_b.mean > 0.0, || format!("benchmark row {r:?}"))?;
    ensure((r.t_s.mean - r.t_p.mean - r.t_b.mean).abs() < 1e-9, || "T_s != T_p + T_b".into())?;
    println!("{}", format_table(&rows));
    Ok(format!(
        "N=900, deviation {dev:.1e}, equivariance residual {:.1e}, largest block {largest}, speedup {:.2} ± {:.2}",
        check.relative_residual, r.speedup.mean, r.speedup.std
    ))
}

struct Case {
    name: &'static str,
    group: Arc<FiniteGroup>,
    family: Family,
}

fn grid() -> Vec<Case> {
    vec![
        Case { name: "C2", group: group(&["(1,2)"]), family: Family::Cyclic(2) },
        Case {
            name: "C2v",
            group: group(&["[2,1,4,3]", "[1,2,4,3]", "[2,1,3,4]"]),
            family: Family::Product(vec![Family::Cyclic(2), Family::Cyclic(2)]),
        },
        Case { name: "S3", group: group(&["(1,2)", "(1,2,3)"]), family: Family::Symmetric(3) },
        Case { name: "D4", group: group(&["(1,2,3,4)", "(1,3)"]), family: Family::Dihedral(4) },
    ]
}

/// Natural, regular and seeded random sums and tensor products with irreps.
fn representations(case: &Case, irreps: &IrrepSet<Rational>, rng: &mut ChaCha8Rng) -> Vec<(String, Representation<Rational>)> {
    let nat = natural_representation::<Rational>(&case.group);
    let reg = regular_representation::<Rational>(&case.group).unwrap();
    let mut out = vec![("natural".to_string(), nat.clone()), ("regular".to_string(), reg)];
    for _ in 0..3 {
        let a = &irreps.irreps()[rng.random_range(0..irreps.len())];
        let b = &irreps.irreps()[rng.random_range(0..irreps.len())];
        let sum = nat.direct_sum(&a.rep).unwrap().direct_sum(&b.rep).unwrap();
        out.push((format!("natural+{}+{}", a.label, b.label), sum));
        out.push((format!("natural*{}", a.label), nat.tensor_product(&a.rep).unwrap()));
    }
    out
}

fn projector_residuals<T: Scalar>(phi: &Representation<T>, irreps: &IrrepSet<T>, table: &symred_core::chartable::CharacterTable) -> Result<f64, String> {
    let n = phi.degree();
    let mults = multiplicities(phi, table, MultiplicityMode::ClassSum).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut total = DenseMatrix::<T>::zeros(n, n);
    for (row, entry) in mults.entries.iter().enumerate() {
        let j = irreps.index_for_row(table, row, 1e-9).ok_or("irrep for row")?;
        let d = entry.degree;
        let p: Vec<Vec<DenseMatrix<T>>> = (0..d)
            .map(|k| (0..d).map(|l| projector(phi, irreps, j, k, l).map(|p| p.matrix.to_dense())).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for k in 0..d {
            worst = worst.max(p[k][k].mul(&p[k][k]).max_abs_diff(&p[k][k]));
            total = total.add(&p[k][k]);
            for l in 0..d {
                for m in 0..d {
                    worst = worst.max(p[k][l].mul(&p[l][m]).max_abs_diff(&p[k][m]));
                }
            }
        }
        // Rank tolerances are relative, so a projector that vanishes up to
        // rounding is recognized by its entries first.
        let p11 = Matrix::Dense(p[0][0].clone());
        let r = if T::EXACT {
            symred_core::linalg::rank(&p11, 0.0)
        } else if p11.max_abs() < 1e-9 {
            0
        } else {
            symred_core::linalg::rank(&p11, 1e-9)
        };
        if r != entry.multiplicity {
            return Err(format!("rank of P^{}_11 is {r}, multiplicity {}", entry.label, entry.multiplicity));
        }
    }
    Ok(worst.max(total.max_abs_diff(&DenseMatrix::identity(n))))
}

fn projector_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut count = 0;
    for case in grid() {
        let table = catalog_character_table(&case.group, &case.family).unwrap();
        let exact = catalog_irreps::<Rational>(&case.group, &case.family).unwrap();
        let float = catalog_irreps::<Complex64>(&case.group, &case.family).unwrap();
        for (name, phi) in representations(&case, &exact, &mut rng) {
            let e = projector_residuals(&phi, &exact, &table).map_err(|m| format!("{} {name}: {m}", case.name))?;
            ensure(e == 0.0, || format!("{} {name}: exact residual {e}", case.name))?;
            let f = projector_residuals(&phi.map(Scalar::to_complex), &float, &table).map_err(|m| format!("{} {name} (float): {m}", case.name))?;
            ensure(f < 1e-8, || format!("{} {name}: float residual {f:e}", case.name))?;
            count += 1;
        }
    }
    Ok(format!("{count} representations: idempotency, transference, completeness and ranks hold"))
}

fn class_sum_vs_full_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut count = 0;
    for case in grid() {
        let table = catalog_character_table(&case.group, &case.family).unwrap();
        let exact = catalog_irreps::<Rational>(&case.group, &case.family).unwrap();
        for (name, phi) in representations(&case, &exact, &mut rng) {
            let a = multiplicities(&phi, &table, MultiplicityMode::ClassSum).map_err(|e| e.to_string())?;
            let b = multiplicities(&phi, &table, MultiplicityMode::FullSum).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{} {name}: {a:?} vs {b:?}", case.name))?;
            let fa = multiplicities(&phi.map(Scalar::to_complex), &table, MultiplicityMode::ClassSum).map_err(|e| e.to_string())?;
            let fb = multiplicities(&phi.map(Scalar::to_complex), &table, MultiplicityMode::FullSum).map_err(|e| e.to_string())?;
            ensure(fa == a && fb == a, || format!("{} {name}: float multiplicities differ", case.name))?;
            count += 1;
        }
    }
    Ok(format!("{count} representations agree"))
}

/// `(1/|G|) Σ_g φ(g) R φ(g⁻¹)`
fn group_average(phi: &Representation<Complex64>, r: &DenseMatrix<Complex64>) -> DenseMatrix<Complex64> {
    let g = phi.group();
    let mut acc = DenseMatrix::zeros(r.rows(), r.cols());
    for e in 0..g.order() {
        let inv = g.inverse(e).unwrap();
        acc = acc.add(&phi.image(e).mul_dense(&r.mul(&phi.image(inv).to_dense())));
    }
    acc.scale(&Complex64::new(1.0 / g.order() as f64, 0.0))
}

fn random_equivariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = [
        ("D4", group(&["(1,2,3,4)", "(1,3)"]), Family::Dihedral(4)),
        ("S3", group(&["(1,2)", "(1,2,3)"]), Family::Symmetric(3)),
    ];
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let (name, g, family) = &cases[i % 2];
        let table = catalog_character_table(g, family).unwrap();
        let irreps = catalog_irreps::<Complex64>(g, family).unwrap();
        let phi = regular_representation::<Complex64>(g).unwrap().direct_sum(&natural_representation(g)).unwrap();
        let n = phi.degree();
        let r = DenseMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = Matrix::Dense(group_average(&phi, &r));
        let norm = m.frobenius_norm();
        let basis = symmetry_adapted_basis(&phi, &irreps, &table).map_err(|e| e.to_string())?;
        let form = block_diagonalize(&m, &basis).map_err(|e| e.to_string())?;
        let off = form.off_block_residual / norm;
        let copy = form.copy_deviation / norm;
        ensure(off < 1e-9, || format!("{name} #{i}: off-block {off:e}"))?;
        ensure(copy < 1e-8, || format!("{name} #{i}: copy deviation {copy:e}"))?;
        let blocks = values(&block_spectrum(&form, false).unwrap());
        let full = full_spectrum(&m).unwrap();
        let mut used = vec![false; full.len()];
        let mut spec = 0.0f64;
        for z in &blocks {
            let (k, d) = full
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, w)| (k, (w - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[k] = true;
            spec = spec.max(d / norm);
        }
        ensure(spec < 1e-8, || format!("{name} #{i}: spectrum deviation {spec:e}"))?;
        worst = (worst.0.max(off), worst.1.max(copy), worst.2.max(spec));
    }
    Ok(format!("100 operators, worst relative off-block {:.1e}, copy {:.1e}, spectrum {:.1e}", worst.0, worst.1, worst.2))
}

fn character_tables() -> Outcome {
    for case in grid() {
        let catalog = catalog_character_table(&case.group, &case.family).map_err(|e| e.to_string())?;
        catalog.verify(0.0).map_err(|e| format!("{} catalog: {e}", case.name))?;
        let numeric = numeric_character_table(&case.group, NumericOptions::default()).map_err(|e| e.to_string())?;
        numeric.verify(1e-9).map_err(|e| format!("{} numeric: {e}", case.name))?;
        ensure(catalog.match_rows(&numeric, 1e-9).is_some(), || format!("{}: tables differ beyond row order", case.name))?;
        let sum: usize = catalog.degrees().iter().map(|d| d * d).sum();
        ensure(sum == case.group.order(), || format!("{}: sum of squared degrees {sum}", case.name))?;
    }
    Ok("C2, C2v, S3, D4: orthogonal, catalog = numeric up to row order, sum n_j^2 = |G|".into())
}

fn determinism() -> Outcome {
    let jobs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../jobs");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for job in ["water.toml", "d4.toml"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = tmp.path().join(format!("{job}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_symred"))
                .arg("run")
                .arg(jobs.join(job))
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || format!("{job}: {}", String::from_utf8_lossy(&status.stderr)))?;
            let read = |f: &str| std::fs::read(out.join(f)).map_err(|e| e.to_string());
            outputs.push((read("blocks.txt")?, read("spectrum.csv")?));
        }
        ensure(outputs[0] == outputs[1], || format!("{job}: outputs differ between runs"))?;
    }
    Ok("water and D4 runs give byte-identical blocks.txt and spectrum.csv".into())
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 9] = [
        ("1 water GF reproduction", 1.0, water),
        ("2 D4 walkthrough", 1.0, d4_walkthrough),
        ("3 Laplacian spectrum agreement", 5.0, laplacian),
        ("4 Schrodinger non-Hermitian agreement", 120.0, schrodinger),
        ("5 projector algebra", f64::INFINITY, projector_algebra),
        ("6 class sum = full sum", f64::INFINITY, class_sum_vs_full_sum),
        ("7 random equivariant operators", f64::INFINITY, random_equivariant),
        ("8 character table integrity", f64::INFINITY, character_tables),
        ("9 determinism", f64::INFINITY, determinism),
    ];
    let mut failed = Vec::new();
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let result = match result {
            Ok(msg) if secs > budget => Err(format!("{msg}; took {secs:.2} s, budget {budget} s")),
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS criterion {name} ({secs:.2} s): {msg}"),
            Err(msg) => {
                println!("FAIL criterion {name} ({secs:.2} s): {msg}");
                failed.push(name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
