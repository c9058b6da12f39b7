//! Catalog families with known characters and irrep matrices: cyclic,
//! dihedral, symmetric (n ≤ 5) and direct products of these.
//!
//! A family is matched against a concrete permutation group by finding the
//! defining elements (a generator, a rotation/reflection pair, a faithful
//! orbit, or the point orbits of the factors). All values are produced as
//! [`Number`]s: exact where rational, floating-point otherwise.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;

use crate::group::{FiniteGroup, Permutation};
use crate::scalar::{cos_two_pi_fraction, root_of_unity, sin_two_pi_fraction, Number, Rational, Scalar};

/// Dense matrix of catalog values, row-major nested rows.
pub type NumberMatrix = Vec<Vec<Number>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Vec<Family>),
}

impl Family {
    /// Order of the abstract group.
    pub fn order(&self) -> usize {
        match self {
            Family::Cyclic(n) => *n,
            Family::Dihedral(n) => 2 * n,
            Family::Symmetric(n) => (1..=*n).product(),
            Family::Product(fs) => fs.iter().map(Family::order).product(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cyclic(n) => write!(f, "cyclic({n})"),
            Family::Dihedral(n) => write!(f, "dihedral({n})"),
            Family::Symmetric(n) => write!(f, "symmetric({n})"),
            Family::Product(fs) => {
                f.write_str("product(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse family {text:?}: {reason}")]
pub struct FamilyParseError {
    pub text: String,
    pub reason: String,
}

impl FromStr for Family {
    type Err = FamilyParseError;

    /// Accepts `cyclic(n)`, `dihedral(n)`, `symmetric(n)` and
    /// `product(f1, f2, ...)`; the short names `C`, `D`, `S` are aliases.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| FamilyParseError { text: s.to_string(), reason: reason.to_string() };
        let t = s.trim();
        let open = t.find('(').ok_or_else(|| err("expected name(arguments)"))?;
        let body = t[open + 1..].strip_suffix(')').ok_or_else(|| err("missing closing ')'"))?;
        let name = t[..open].trim().to_ascii_lowercase();
        let number = || body.trim().parse::<usize>().map_err(|_| err("expected a positive integer"));
        match name.as_str() {
            "cyclic" | "c" => Ok(Family::Cyclic(number()?)),
            "dihedral" | "d" => Ok(Family::Dihedral(number()?)),
            "symmetric" | "s" => Ok(Family::Symmetric(number()?)),
            "product" => {
                let mut parts = Vec::new();
                let mut depth = 0usize;
                let mut start = 0;
                for (i, ch) in body.char_indices() {
                    match ch {
                        '(' => depth += 1,
                        ')' => depth = depth.checked_sub(1).ok_or_else(|| err("unbalanced parentheses"))?,
                        ',' if depth == 0 => {
                            parts.push(&body[start..i]);
                            start = i + 1;
                        }
                        _ => {}
                    }
                }
                parts.push(&body[start..]);
                let factors = parts.into_iter().map(str::parse).collect::<Result<Vec<Family>, _>>()?;
                if factors.len() < 2 {
                    return Err(err("a product needs at least two factors"));
                }
                Ok(Family::Product(factors))
            }
            _ => Err(err("unknown family")),
        }
    }
}

/// Concrete identification of a family with a permutation group.
pub(crate) trait Model {
    fn num_irreps(&self) -> usize;
    fn label(&self, irrep: usize) -> String;
    fn character(&self, irrep: usize, element: usize) -> Number;
    /// `D(g)`; `prefer_exact` selects rational realizations where one exists.
    fn matrix(&self, irrep: usize, element: usize, prefer_exact: bool) -> NumberMatrix;
}

pub(crate) fn build_model(group: &FiniteGroup, family: &Family) -> Result<Box<dyn Model>, String> {
    if group.order() != family.order() {
        return Err(format!("{family} has order {} but the group has order {}", family.order(), group.order()));
    }
    Ok(match family {
        Family::Cyclic(n) => Box::new(CyclicModel::new(group, *n)?),
        Family::Dihedral(n) => Box::new(DihedralModel::new(group, *n)?),
        Family::Symmetric(n) => Box::new(SymmetricModel::new(group, *n)?),
        Family::Product(fs) => Box::new(ProductModel::new(group, fs)?),
    })
}

fn int(v: i64) -> Number {
    Number::integer(v)
}

fn num_mat_mul(a: &NumberMatrix, b: &NumberMatrix) -> NumberMatrix {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..m).fold(int(0), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

fn num_kron(a: &NumberMatrix, b: &NumberMatrix) -> NumberMatrix {
    let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
    (0..ar * br).map(|i| (0..ac * bc).map(|j| a[i / br][j / bc].mul(&b[i % br][j % bc])).collect()).collect()
}

fn first_element_of_order(group: &FiniteGroup, order: usize) -> Option<usize> {
    (0..group.order()).find(|&i| group.elements()[i].order() == order)
}

struct CyclicModel {
    n: usize,
    log: Vec<usize>,
}

impl CyclicModel {
    fn new(group: &FiniteGroup, n: usize) -> Result<Self, String> {
        if n == 0 {
            return Err("cyclic(0) is not a group".into());
        }
        let a = first_element_of_order(group, n).ok_or_else(|| format!("no element of order {n}: not cyclic"))?;
        let mut log = vec![0; n];
        let mut cur = 0;
        for t in 0..n {
            log[cur] = t;
            cur = group.multiply(cur, a);
        }
        Ok(CyclicModel { n, log })
    }
}

impl Model for CyclicModel {
    fn num_irreps(&self) -> usize {
        self.n
    }
    fn label(&self, m: usize) -> String {
        if m == 0 {
            "A".into()
        } else if 2 * m == self.n {
            "B".into()
        } else {
            format!("E{m}")
        }
    }
    fn character(&self, m: usize, element: usize) -> Number {
        root_of_unity((m * self.log[element]) as i64, self.n as i64)
    }
    fn matrix(&self, m: usize, element: usize, _: bool) -> NumberMatrix {
        vec![vec![self.character(m, element)]]
    }
}

#[derive(Clone, Copy, Debug)]
enum DihedralIrrep {
    A1,
    A2,
    B1,
    B2,
    E(usize),
}

struct DihedralModel {
    n: usize,
    /// Element index → `(a, b)` with element `r^a s^b`.
    coords: Vec<(usize, usize)>,
    irreps: Vec<DihedralIrrep>,
}

impl DihedralModel {
    fn new(group: &FiniteGroup, n: usize) -> Result<Self, String> {
        if n < 3 {
            return Err("dihedral(n) needs n ≥ 3; use a product of cyclic groups".into());
        }
        let r = first_element_of_order(group, n).ok_or_else(|| format!("no rotation of order {n}"))?;
        let mut powers = vec![0usize; n];
        for a in 1..n {
            powers[a] = group.multiply(powers[a - 1], r);
        }
        let s = (0..group.order())
            .find(|&i| group.elements()[i].order() == 2 && !powers.contains(&i))
            .ok_or_else(|| "no reflection outside the rotation subgroup".to_string())?;
        let r_inv = group.inverse(r).map_err(|e| e.to_string())?;
        if group.multiply(group.multiply(s, r), s) != r_inv {
            return Err("s r s ≠ r⁻¹: not dihedral".into());
        }
        let mut coords = vec![(usize::MAX, 0); group.order()];
        for (a, &p) in powers.iter().enumerate() {
            coords[p] = (a, 0);
            coords[group.multiply(p, s)] = (a, 1);
        }
        if coords.iter().any(|c| c.0 == usize::MAX) {
            return Err("rotation and reflection do not generate the group".into());
        }
        let mut irreps = vec![DihedralIrrep::A1, DihedralIrrep::A2];
        if n % 2 == 0 {
            irreps.extend([DihedralIrrep::B1, DihedralIrrep::B2]);
        }
        irreps.extend((1..n.div_ceil(2)).map(DihedralIrrep::E));
        Ok(DihedralModel { n, coords, irreps })
    }

    fn two_dim_count(&self) -> usize {
        (self.n - 1) / 2
    }
}

fn sign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

impl Model for DihedralModel {
    fn num_irreps(&self) -> usize {
        self.irreps.len()
    }
    fn label(&self, j: usize) -> String {
        match self.irreps[j] {
            DihedralIrrep::A1 => "A1".into(),
            DihedralIrrep::A2 => "A2".into(),
            DihedralIrrep::B1 => "B1".into(),
            DihedralIrrep::B2 => "B2".into(),
            DihedralIrrep::E(_) if self.two_dim_count() == 1 => "E".into(),
            DihedralIrrep::E(k) => format!("E{k}"),
        }
    }
    fn character(&self, j: usize, element: usize) -> Number {
        let (a, b) = self.coords[element];
        match self.irreps[j] {
            DihedralIrrep::A1 => int(1),
            DihedralIrrep::A2 => int(sign(b == 1)),
            DihedralIrrep::B1 => int(sign(a % 2 == 1)),
            DihedralIrrep::B2 => int(sign((a + b) % 2 == 1)),
            DihedralIrrep::E(k) => {
                if b == 1 {
                    int(0)
                } else {
                    let c = cos_two_pi_fraction((k * a) as i64, self.n as i64);
                    c.add(&c)
                }
            }
        }
    }
    fn matrix(&self, j: usize, element: usize, prefer_exact: bool) -> NumberMatrix {
        let k = match self.irreps[j] {
            DihedralIrrep::E(k) => k,
            _ => return vec![vec![self.character(j, element)]],
        };
        let (a, b) = self.coords[element];
        let (n, k) = (self.n as i64, k as i64);
        let rational_rotation = sin_two_pi_fraction(k, n).is_exact() && cos_two_pi_fraction(k, n).is_exact();
        let companion = !rational_rotation && prefer_exact && cos_two_pi_fraction(k, n).is_exact();
        if companion {
            // Rational realization with the same character: r ↦ [[0,-1],[1,2c]], s ↦ [[0,1],[1,0]].
            let c = cos_two_pi_fraction(k, n);
            let r = vec![vec![int(0), int(-1)], vec![int(1), c.add(&c)]];
            let s = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
            let mut m = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
            for _ in 0..a {
                m = num_mat_mul(&m, &r);
            }
            if b == 1 {
                m = num_mat_mul(&m, &s);
            }
            return m;
        }
        // Rotation by 2πka/n, followed by the reflection diag(1, -1) when b = 1.
        let c = cos_two_pi_fraction(k * a as i64, n);
        let s = sin_two_pi_fraction(k * a as i64, n);
        let neg = |x: &Number| x.mul(&int(-1));
        if b == 0 {
            vec![vec![c.clone(), neg(&s)], vec![s, c]]
        } else {
            vec![vec![c.clone(), s.clone()], vec![s, neg(&c)]]
        }
    }
}

type StoredTable = (&'static [&'static [usize]], &'static [&'static [usize]], &'static [&'static [i64]]);

const S3_PARTITIONS: &[&[usize]] = &[&[3], &[2, 1], &[1, 1, 1]];
const S3_CLASSES: &[&[usize]] = &[&[1, 1, 1], &[2, 1], &[3]];
const S3_VALUES: &[&[i64]] = &[&[1, 1, 1], &[2, 0, -1], &[1, -1, 1]];

const S4_PARTITIONS: &[&[usize]] = &[&[4], &[3, 1], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]];
const S4_CLASSES: &[&[usize]] = &[&[1, 1, 1, 1], &[2, 1, 1], &[2, 2], &[3, 1], &[4]];
const S4_VALUES: &[&[i64]] = &[
    &[1, 1, 1, 1, 1],
    &[3, 1, -1, 0, -1],
    &[2, 0, 2, -1, 0],
    &[3, -1, -1, 0, 1],
    &[1, -1, 1, 1, -1],
];

const S5_PARTITIONS: &[&[usize]] =
    &[&[5], &[4, 1], &[3, 2], &[3, 1, 1], &[2, 2, 1], &[2, 1, 1, 1], &[1, 1, 1, 1, 1]];
const S5_CLASSES: &[&[usize]] =
    &[&[1, 1, 1, 1, 1], &[2, 1, 1, 1], &[2, 2, 1], &[3, 1, 1], &[3, 2], &[4, 1], &[5]];
const S5_VALUES: &[&[i64]] = &[
    &[1, 1, 1, 1, 1, 1, 1],
    &[4, 2, 0, 1, -1, 0, -1],
    &[5, 1, 1, -1, 1, -1, 0],
    &[6, 0, -2, 0, 0, 0, 1],
    &[5, -1, 1, -1, -1, 1, 0],
    &[4, -2, 0, 1, 1, 0, -1],
    &[1, -1, 1, 1, -1, -1, 1],
];

const S2_PARTITIONS: &[&[usize]] = &[&[2], &[1, 1]];
const S2_CLASSES: &[&[usize]] = &[&[1, 1], &[2]];
const S2_VALUES: &[&[i64]] = &[&[1, 1], &[1, -1]];

const S1_PARTITIONS: &[&[usize]] = &[&[1]];
const S1_CLASSES: &[&[usize]] = &[&[1]];
const S1_VALUES: &[&[i64]] = &[&[1]];

fn stored_table(n: usize) -> Option<StoredTable> {
    match n {
        1 => Some((S1_PARTITIONS, S1_CLASSES, S1_VALUES)),
        2 => Some((S2_PARTITIONS, S2_CLASSES, S2_VALUES)),
        3 => Some((S3_PARTITIONS, S3_CLASSES, S3_VALUES)),
        4 => Some((S4_PARTITIONS, S4_CLASSES, S4_VALUES)),
        5 => Some((S5_PARTITIONS, S5_CLASSES, S5_VALUES)),
        _ => None,
    }
}

/// Standard Young tableaux of a shape, each stored as the `(row, col)` cell
/// of every letter `0..n`.
pub(crate) fn standard_tableaux(shape: &[usize]) -> Vec<Vec<(usize, usize)>> {
    fn fill(shape: &[usize], lens: &mut Vec<usize>, cells: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if cells.len() == shape.iter().sum::<usize>() {
            out.push(cells.clone());
            return;
        }
        for row in 0..shape.len() {
            if lens[row] < shape[row] && (row == 0 || lens[row - 1] > lens[row]) {
                cells.push((row, lens[row]));
                lens[row] += 1;
                fill(shape, lens, cells, out);
                lens[row] -= 1;
                cells.pop();
            }
        }
    }
    let mut out = Vec::new();
    fill(shape, &mut vec![0; shape.len()], &mut Vec::new(), &mut out);
    out
}

/// Young's seminormal matrices of the adjacent transpositions `(i, i+1)`.
pub(crate) fn seminormal_generators(shape: &[usize]) -> Vec<Vec<Vec<Rational>>> {
    let tableaux = standard_tableaux(shape);
    let n: usize = shape.iter().sum();
    let d = tableaux.len();
    let index: HashMap<Vec<(usize, usize)>, usize> = tableaux.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let content = |(r, c): (usize, usize)| c as i64 - r as i64;
    (0..n.saturating_sub(1))
        .map(|i| {
            let mut m = vec![vec![Rational::from_i64(0); d]; d];
            for (t, cells) in tableaux.iter().enumerate() {
                let (a, b) = (cells[i], cells[i + 1]);
                if a.0 == b.0 {
                    m[t][t] = Rational::from_i64(1);
                } else if a.1 == b.1 {
                    m[t][t] = Rational::from_i64(-1);
                } else {
                    let rho = content(b) - content(a);
                    m[t][t] = Rational::from_ratio(1, rho);
                    let mut swapped = cells.clone();
                    swapped.swap(i, i + 1);
                    let u = index[&swapped];
                    m[u][t] = if a.0 < b.0 {
                        Rational::from_i64(1)
                    } else {
                        Rational::from_i64(1) - Rational::from_ratio(1, rho * rho)
                    };
                }
            }
            m
        })
        .collect()
}

/// Writes a permutation of `0..n` as adjacent transpositions: returns `w` with
/// `π = s_{w[m-1]} ⋯ s_{w[0]}`.
pub(crate) fn adjacent_transpositions(images: &[usize]) -> Vec<usize> {
    let mut p = images.to_vec();
    let mut word = Vec::new();
    loop {
        match (0..p.len().saturating_sub(1)).find(|&i| p[i] > p[i + 1]) {
            Some(i) => {
                p.swap(i, i + 1);
                word.push(i);
            }
            None => return word,
        }
    }
}

fn rat_mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..m).fold(Rational::from_i64(0), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

struct SymmetricModel {
    /// Element index → permutation of the letters `0..n`.
    letters: Vec<Vec<usize>>,
    labels: Vec<String>,
    degrees: Vec<usize>,
    /// `values[j][c]` for stored class `c`.
    values: Vec<Vec<i64>>,
    class_types: Vec<Vec<usize>>,
    generators: Vec<Vec<Vec<Vec<Rational>>>>,
}

impl SymmetricModel {
    fn new(group: &FiniteGroup, n: usize) -> Result<Self, String> {
        let (partitions, classes, values) = stored_table(n).ok_or_else(|| format!("symmetric({n}) is only stored for n ≤ 5"))?;
        // Find an orbit of size n on which the group acts as the full S_n.
        let orbit = group
            .orbits()
            .into_iter()
            .find(|o| o.len() == n && restrict_faithful(group, o))
            .ok_or_else(|| format!("no orbit of {n} points carrying a faithful action"))?;
        let letters = group.elements().iter().map(|g| restrict(g, &orbit)).collect();
        let degrees: Vec<usize> = values.iter().map(|row| row[0] as usize).collect();
        let generators = partitions.iter().map(|p| seminormal_generators(p)).collect();
        Ok(SymmetricModel {
            letters,
            labels: partitions.iter().map(|p| partition_label(p)).collect(),
            degrees,
            values: values.iter().map(|r| r.to_vec()).collect(),
            class_types: classes.iter().map(|c| c.to_vec()).collect(),
            generators,
        })
    }
}

fn partition_label(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn restrict(g: &Permutation, orbit: &[usize]) -> Vec<usize> {
    orbit.iter().map(|&p| orbit.binary_search(&g.apply(p)).expect("orbit is invariant")).collect()
}

fn restrict_faithful(group: &FiniteGroup, orbit: &[usize]) -> bool {
    let mut seen = hashbrown::HashSet::new();
    group.elements().iter().all(|g| seen.insert(restrict(g, orbit)))
}

impl Model for SymmetricModel {
    fn num_irreps(&self) -> usize {
        self.labels.len()
    }
    fn label(&self, j: usize) -> String {
        self.labels[j].clone()
    }
    fn character(&self, j: usize, element: usize) -> Number {
        let ty = Permutation::from_images(self.letters[element].clone()).expect("bijection").cycle_type();
        let c = self.class_types.iter().position(|t| *t == ty).expect("every cycle type is stored");
        int(self.values[j][c])
    }
    fn matrix(&self, j: usize, element: usize, _: bool) -> NumberMatrix {
        let d = self.degrees[j];
        let mut m: Vec<Vec<Rational>> =
            (0..d).map(|r| (0..d).map(|c| Rational::from_i64((r == c) as i64)).collect()).collect();
        for i in adjacent_transpositions(&self.letters[element]) {
            m = rat_mat_mul(&self.generators[j][i], &m);
        }
        m.into_iter().map(|row| row.into_iter().map(Number::Exact).collect()).collect()
    }
}

struct ProductModel {
    factors: Vec<Box<dyn Model>>,
    /// `projections[f][g]`: index in factor `f` of the projection of element `g`.
    projections: Vec<Vec<usize>>,
    /// Irrep index → per-factor irrep indices (first factor varies slowest).
    tuples: Vec<Vec<usize>>,
}

impl ProductModel {
    fn new(group: &FiniteGroup, families: &[Family]) -> Result<Self, String> {
        let orbits: Vec<Vec<usize>> = group.orbits().into_iter().filter(|o| o.len() > 1).collect();
        if orbits.len() != families.len() {
            return Err(format!(
                "a product of {} factors needs {} nontrivial point orbits, found {}",
                families.len(),
                families.len(),
                orbits.len()
            ));
        }
        let mut factors = Vec::new();
        let mut projections = Vec::new();
        let mut order = 1usize;
        for (orbit, family) in orbits.iter().zip(families) {
            let gens = group
                .generators()
                .iter()
                .map(|g| Permutation::from_images(restrict(g, orbit)).expect("bijection"))
                .collect();
            let h = FiniteGroup::close(gens).map_err(|e| e.to_string())?;
            order *= h.order();
            projections.push(
                group
                    .elements()
                    .iter()
                    .map(|g| h.index_of(&Permutation::from_images(restrict(g, orbit)).expect("bijection")).expect("closed"))
                    .collect(),
            );
            factors.push(build_model(&h, family)?);
        }
        if order != group.order() {
            return Err(format!("factor orders multiply to {order}, not {}: not a direct product", group.order()));
        }
        let mut tuples = vec![Vec::new()];
        for f in &factors {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..f.num_irreps()).map(move |j| {
                        let mut t = t.clone();
                        t.push(j);
                        t
                    })
                })
                .collect();
        }
        Ok(ProductModel { factors, projections, tuples })
    }
}

impl Model for ProductModel {
    fn num_irreps(&self) -> usize {
        self.tuples.len()
    }
    fn label(&self, j: usize) -> String {
        let parts: Vec<String> = self.tuples[j].iter().zip(&self.factors).map(|(&i, f)| f.label(i)).collect();
        parts.join("x")
    }
    fn character(&self, j: usize, element: usize) -> Number {
        self.tuples[j]
            .iter()
            .enumerate()
            .fold(int(1), |acc, (f, &i)| acc.mul(&self.factors[f].character(i, self.projections[f][element])))
    }
    fn matrix(&self, j: usize, element: usize, prefer_exact: bool) -> NumberMatrix {
        self.tuples[j].iter().enumerate().fold(vec![vec![int(1)]], |acc, (f, &i)| {
            num_kron(&acc, &self.factors[f].matrix(i, self.projections[f][element], prefer_exact))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_text_round_trip() {
        for text in ["cyclic(2)", "dihedral(4)", "symmetric(3)", "product(cyclic(2), cyclic(2))"] {
            let f: Family = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert_eq!("D(6)".parse::<Family>().unwrap(), Family::Dihedral(6));
        assert!("product(cyclic(2))".parse::<Family>().is_err());
        assert!("torus(3)".parse::<Family>().is_err());
        assert!("cyclic(x)".parse::<Family>().is_err());
    }

    #[test]
    fn tableaux_counts_match_degrees() {
        for n in 1..=5 {
            let (parts, _, values) = stored_table(n).unwrap();
            for (p, row) in parts.iter().zip(values) {
                assert_eq!(standard_tableaux(p).len() as i64, row[0]);
            }
        }
    }

    #[test]
    fn bubble_decomposition_reproduces_permutation() {
        let images = [2usize, 0, 3, 1];
        let word = adjacent_transpositions(&images);
        let mut p = Permutation::identity(4);
        for &i in word.iter().rev() {
            let mut t: Vec<usize> = (0..4).collect();
            t.swap(i, i + 1);
            p = p.compose(&Permutation::from_images(t).unwrap()).unwrap();
        }
        assert_eq!(p.images(), &images);
    }
}
