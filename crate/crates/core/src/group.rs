//! Finite permutation groups generated by a list of permutations.
//!
//! Composition convention: `(g·h)(i) = g(h(i))`, i.e. `h` acts first. Points
//! are 0-based internally; the text forms (cycle notation `"(1,2,3)"` and
//! one-line image arrays `"[2,1,3]"`) are 1-based.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;

/// Default bound on the enumerated group order.
pub const DEFAULT_ORDER_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("permutations of different degree: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("group order exceeds the cap of {cap} elements")]
    OrderCapExceeded { cap: usize },
    #[error("element index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("not a bijection: {0}")]
    NotABijection(String),
    #[error("cannot parse permutation {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A bijection of `{0, .., degree-1}` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    /// Validates that `images` is a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GroupError::NotABijection(format!("{:?}", images)));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of `degree` points from disjoint 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree || used[p] {
                    return Err(GroupError::NotABijection(format!("cycles {:?}", cycles)));
                }
                used[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self · other`, the permutation `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, GroupError> {
        if self.degree() != other.degree() {
            return Err(GroupError::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p] = i;
        }
        Permutation { images: inv }
    }

    /// Extends to a larger degree by fixing the new points.
    pub fn padded(&self, degree: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(self.degree()..degree);
        Permutation { images }
    }

    /// Disjoint cycles of length at least two, each starting at its smallest
    /// point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Cycle lengths including fixed points, sorted decreasingly.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        let moved: usize = lens.iter().sum();
        lens.extend(core::iter::repeat_n(1, self.degree() - moved));
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, p)| i == *p).count()
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().map(Vec::len).fold(1, num_integer::lcm)
    }

    /// Parses one permutation. The degree is the largest point mentioned.
    pub fn parse(text: &str) -> Result<Permutation, GroupError> {
        let raw = RawPermutation::parse(text)?;
        raw.build(raw.min_degree())
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Permutation::parse(s)
    }
}

/// A parsed permutation whose degree is not fixed yet.
enum RawPermutation {
    Cycles(Vec<Vec<usize>>),
    Images(Vec<usize>),
}

impl RawPermutation {
    fn parse(text: &str) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Parse { text: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        let number = |s: &str| -> Result<usize, GroupError> {
            let v: usize = s.trim().parse().map_err(|_| err("expected a positive integer point"))?;
            if v == 0 {
                return Err(err("points are numbered from 1"));
            }
            Ok(v - 1)
        };
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| err("missing closing ']'"))?;
            if inner.trim().is_empty() {
                return Ok(RawPermutation::Images(Vec::new()));
            }
            let images = inner.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
            return Ok(RawPermutation::Images(images));
        }
        let mut cycles = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| err("expected '(' or '['"))?;
            let close = body.find(')').ok_or_else(|| err("missing closing ')'"))?;
            let inner = &body[..close];
            if !inner.trim().is_empty() {
                let cycle = inner.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        if t.is_empty() {
            return Err(err("empty input"));
        }
        Ok(RawPermutation::Cycles(cycles))
    }

    fn min_degree(&self) -> usize {
        match self {
            RawPermutation::Images(v) => v.len(),
            RawPermutation::Cycles(c) => c.iter().flatten().map(|p| p + 1).max().unwrap_or(0),
        }
    }

    fn build(&self, degree: usize) -> Result<Permutation, GroupError> {
        match self {
            RawPermutation::Images(v) => {
                if v.len() > degree {
                    return Err(GroupError::DegreeMismatch { left: v.len(), right: degree });
                }
                Ok(Permutation::from_images(v.clone())?.padded(degree))
            }
            RawPermutation::Cycles(c) => Permutation::from_cycles(degree, c),
        }
    }
}

/// Parses a generator list; cycle-notation entries are padded to the common
/// degree (the largest point or image-array length seen). Image arrays must
/// all have that degree.
pub fn parse_generators<S: AsRef<str>>(texts: &[S]) -> Result<Vec<Permutation>, GroupError> {
    let raws = texts.iter().map(|t| RawPermutation::parse(t.as_ref())).collect::<Result<Vec<_>, _>>()?;
    let degree = raws.iter().map(RawPermutation::min_degree).max().unwrap_or(0).max(1);
    for r in &raws {
        if let RawPermutation::Images(v) = r {
            if v.len() != degree {
                return Err(GroupError::DegreeMismatch { left: v.len(), right: degree });
            }
        }
    }
    raws.iter().map(|r| r.build(degree)).collect()
}

/// A conjugacy class: element indices with the smallest as representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub members: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// A finite permutation group with all elements enumerated.
///
/// Elements are in breadth-first discovery order from the identity, each new
/// element being `parent · generator`; `word(i)` lists the generator indices
/// whose left-to-right product is element `i`.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    lookup: HashMap<Vec<usize>, usize>,
    parents: Vec<Option<(usize, usize)>>,
    words: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl FiniteGroup {
    pub fn close(generators: Vec<Permutation>) -> Result<Self, GroupError> {
        Self::close_with_cap(generators, DEFAULT_ORDER_CAP)
    }

    pub fn close_with_cap(generators: Vec<Permutation>, cap: usize) -> Result<Self, GroupError> {
        let degree = generators.first().ok_or(GroupError::NoGenerators)?.degree();
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::DegreeMismatch { left: degree, right: g.degree() });
        }
        let id = Permutation::identity(degree);
        let mut lookup = HashMap::new();
        lookup.insert(id.images.clone(), 0);
        let mut elements = vec![id];
        let mut parents = vec![None];
        let mut words = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for (gi, gen) in generators.iter().enumerate() {
                let next = elements[cur].compose(gen)?;
                if lookup.contains_key(&next.images) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(GroupError::OrderCapExceeded { cap });
                }
                let idx = elements.len();
                lookup.insert(next.images.clone(), idx);
                let mut w = words[cur].clone();
                w.push(gi);
                words.push(w);
                parents.push(Some((cur, gi)));
                elements.push(next);
                queue.push_back(idx);
            }
        }
        let inverses = elements.iter().map(|e| lookup[&e.inverse().images]).collect();
        let mut group = FiniteGroup {
            generators,
            elements,
            lookup,
            parents,
            words,
            inverses,
            classes: Vec::new(),
            class_of: Vec::new(),
        };
        group.compute_classes();
        Ok(group)
    }

    /// Convenience: closes the group generated by text permutations.
    pub fn from_generator_strings<S: AsRef<str>>(texts: &[S]) -> Result<Self, GroupError> {
        Self::close(parse_generators(texts)?)
    }

    fn compute_classes(&mut self) {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        let gen_inv: Vec<Permutation> = self.generators.iter().map(Permutation::inverse).collect();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let cid = classes.len();
            class_of[start] = cid;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(cur) = queue.pop_front() {
                for (g, gi) in self.generators.iter().zip(&gen_inv) {
                    let conj = g.compose(&self.elements[cur]).and_then(|x| x.compose(gi)).expect("same degree");
                    let idx = self.lookup[&conj.images];
                    if class_of[idx] == usize::MAX {
                        class_of[idx] = cid;
                        members.push(idx);
                        queue.push_back(idx);
                    }
                }
            }
            members.sort_unstable();
            classes.push(ConjugacyClass { representative: start, members });
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.elements[0].degree()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> Result<&Permutation, GroupError> {
        self.elements.get(index).ok_or(GroupError::IndexOutOfRange { index, order: self.order() })
    }

    /// Index of a permutation in this group, if it belongs to it.
    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.lookup.get(&p.images).copied()
    }

    /// Generator word of element `index` (empty for the identity).
    pub fn word(&self, index: usize) -> &[usize] {
        &self.words[index]
    }

    /// `(parent, generator)` with `element = parent · generator`; `None` for the identity.
    pub fn parent(&self, index: usize) -> Option<(usize, usize)> {
        self.parents[index]
    }

    pub fn inverse(&self, index: usize) -> Result<usize, GroupError> {
        self.inverses.get(index).copied().ok_or(GroupError::IndexOutOfRange { index, order: self.order() })
    }

    /// Index of `elements[a] · elements[b]`.
    pub fn multiply(&self, a: usize, b: usize) -> usize {
        let p = self.elements[a].compose(&self.elements[b]).expect("same degree");
        self.lookup[&p.images]
    }

    pub fn conjugacy_classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, index: usize) -> usize {
        self.class_of[index]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(ConjugacyClass::size).collect()
    }

    /// Orbits of the points under the group, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut k = 0;
            while k < orbit.len() {
                let p = orbit[k];
                for g in &self.generators {
                    let q = g.apply(p);
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }
}

/// Evaluates a generator word as a product of permutations.
pub fn evaluate_word(generators: &[Permutation], word: &[usize]) -> Result<Permutation, GroupError> {
    let degree = generators.first().ok_or(GroupError::NoGenerators)?.degree();
    word.iter().try_fold(Permutation::identity(degree), |acc, &g| acc.compose(&generators[g]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("(1,2,3,4)").images(), &[1, 2, 3, 0]);
        assert_eq!(p("[2,1,4,3]").images(), &[1, 0, 3, 2]);
        assert_eq!(p("(1,2)(3,4)").to_string(), "(1,2)(3,4)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(Permutation::parse("(1,2").is_err());
        assert!(Permutation::parse("(0,1)").is_err());
        assert!(Permutation::parse("[1,1]").is_err());
        assert!(Permutation::parse("(1,2)(2,3)").is_err());
        assert!(Permutation::parse("1,2").is_err());
    }

    #[test]
    fn generators_share_degree() {
        let gens = parse_generators(&["(1,2)", "(3,4,5)"]).unwrap();
        assert!(gens.iter().all(|g| g.degree() == 5));
        assert!(matches!(parse_generators(&["[2,1]", "(1,2,3)"]), Err(GroupError::DegreeMismatch { .. })));
    }

    #[test]
    fn multiply_examples() {
        let t = p("(1,2)");
        assert!(t.compose(&t).unwrap().is_identity());
        let c = p("(1,2,3)");
        assert_eq!(c.compose(&c).unwrap(), p("(1,3,2)"));
        let id = Permutation::identity(3);
        assert_eq!(c.compose(&id).unwrap(), c);
        // right-to-left: (1,2)·(2,3) sends 2 -> 3 -> 3 and 3 -> 2 -> 1
        let g = p("(1,2)").padded(3).compose(&p("(2,3)")).unwrap();
        assert_eq!(g, p("(1,2,3)"));
        assert!(matches!(p("(1,2)").compose(&c), Err(GroupError::DegreeMismatch { .. })));
    }

    #[test]
    fn dihedral_square() {
        let g = FiniteGroup::from_generator_strings(&["(1,2,3,4)", "(1,3)"]).unwrap();
        assert_eq!(g.order(), 8);
        let mut sizes = g.class_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, alloc::vec![1, 1, 2, 2, 2]);
        assert_eq!(g.conjugacy_classes()[0].members, alloc::vec![0]);
    }

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::from_generator_strings(&["[1,2,3]"]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.conjugacy_classes().len(), 1);
        assert_eq!(g.inverse(0).unwrap(), 0);
    }

    #[test]
    fn symmetric_three() {
        let g = FiniteGroup::from_generator_strings(&["(1,2)", "(1,2,3)"]).unwrap();
        assert_eq!(g.order(), 6);
        let sizes: Vec<usize> = g.class_sizes();
        assert_eq!(sizes, alloc::vec![1, 3, 2]);
        let c = g.index_of(&p("(1,2,3)")).unwrap();
        assert_eq!(g.element(g.inverse(c).unwrap()).unwrap(), &p("(1,3,2)"));
        assert!(matches!(g.inverse(6), Err(GroupError::IndexOutOfRange { .. })));
    }

    #[test]
    fn order_cap() {
        let gens = parse_generators(&["(1,2)", "(1,2,3,4,5,6,7,8)"]).unwrap();
        assert_eq!(FiniteGroup::close_with_cap(gens, 1000).unwrap_err(), GroupError::OrderCapExceeded { cap: 1000 });
    }

    #[test]
    fn empty_and_mismatched_generators() {
        assert_eq!(FiniteGroup::close(Vec::new()).unwrap_err(), GroupError::NoGenerators);
        let gens = alloc::vec![Permutation::identity(2), Permutation::identity(3)];
        assert!(matches!(FiniteGroup::close(gens), Err(GroupError::DegreeMismatch { .. })));
    }

    #[test]
    fn orbits_of_water_group() {
        let g = FiniteGroup::from_generator_strings(&["[2,1,4,3]", "[1,2,4,3]", "[2,1,3,4]"]).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.orbits(), alloc::vec![alloc::vec![0, 1], alloc::vec![2, 3]]);
    }
}
