//! Mazes over a finite ring and their formal integer combinations: the
//! morphisms of the labyrinth category.
//!
//! A maze from a source set `Z` to a target set `X` is a multiset of labeled
//! passages `(x <- z, label)` covering both endpoints, with nonzero labels.
//! Normalization sends anything with a zero label or an uncovered vertex to
//! the zero morphism. Composition sums over all covering subsets of the
//! passage-compatibility relation, multiplying labels; terms acquiring a zero
//! label vanish again through normalization.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::ring::RingSpec;
use crate::sets::IndexSet;

/// Bound on passages per maze entering a composition; the covering
/// enumeration is exponential in the size of the compatibility relation, so
/// the relation itself is capped at twice this bound.
pub const DEFAULT_MAX_PASSAGES: usize = 8;

/// One passage, stored by position into the target and source sets.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Passage {
    pub to: usize,
    pub from: usize,
    pub label: u64,
}

/// A canonical maze: passages sorted, labels nonzero and reduced, both
/// endpoint sets covered. Middle-set names are forgotten; two mazes are equal
/// exactly when the endpoint sets and the passage multisets agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Maze {
    ring: RingSpec,
    target: IndexSet,
    source: IndexSet,
    passages: Vec<Passage>,
}

impl Maze {
    /// Canonicalizes raw passages; `None` is the zero morphism (a zero label
    /// or an uncovered vertex).
    pub fn normalized(
        ring: RingSpec,
        target: IndexSet,
        source: IndexSet,
        mut passages: Vec<Passage>,
    ) -> Option<Maze> {
        for p in &mut passages {
            p.label = ring.normalize_u64(p.label);
            if p.label == 0 {
                return None;
            }
        }
        let mut covered_to = vec![false; target.len()];
        let mut covered_from = vec![false; source.len()];
        for p in &passages {
            covered_to[p.to] = true;
            covered_from[p.from] = true;
        }
        if covered_to.iter().any(|&c| !c) || covered_from.iter().any(|&c| !c) {
            return None;
        }
        passages.sort();
        Some(Maze { ring, target, source, passages })
    }

    /// The identity maze on a set: one passage `(x <- x, 1)` per element.
    pub fn identity(ring: RingSpec, set: &IndexSet) -> Maze {
        let passages = (0..set.len()).map(|i| Passage { to: i, from: i, label: 1 }).collect();
        Maze::normalized(ring, set.clone(), set.clone(), passages)
            .expect("identity passages cover the set")
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn target(&self) -> &IndexSet {
        &self.target
    }

    pub fn source(&self) -> &IndexSet {
        &self.source
    }

    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.source
            && self.passages.len() == self.target.len()
            && self
                .passages
                .iter()
                .all(|p| p.to == p.from && p.label == 1)
    }
}

impl fmt::Display for Maze {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self
            .passages
            .iter()
            .map(|p| {
                format!("{}<-[{}]-{}", self.target.name(p.to), p.label, self.source.name(p.from))
            })
            .collect();
        write!(f, "maze({})", ps.join(", "))
    }
}

/// Builds the normalization of raw named passages as a `MazeSum`: either the
/// zero morphism or a single canonical maze with coefficient one.
pub fn normalize(
    ring: RingSpec,
    target: &IndexSet,
    source: &IndexSet,
    passages: &[(String, String, i64)],
) -> Result<MazeSum> {
    let mut resolved = Vec::with_capacity(passages.len());
    for (to, from, label) in passages {
        resolved.push(Passage {
            to: target.position(to)?,
            from: source.position(from)?,
            label: ring.normalize(*label),
        });
    }
    let mut sum = MazeSum::zero(ring, source.clone(), target.clone());
    if let Some(m) = Maze::normalized(ring, target.clone(), source.clone(), resolved) {
        sum.add_term(m, 1)?;
    }
    Ok(sum)
}

/// A formal integer combination of canonical mazes sharing endpoints. The
/// empty combination is the zero morphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MazeSum {
    ring: RingSpec,
    source: IndexSet,
    target: IndexSet,
    terms: BTreeMap<Maze, i64>,
}

impl MazeSum {
    pub fn zero(ring: RingSpec, source: IndexSet, target: IndexSet) -> MazeSum {
        MazeSum { ring, source, target, terms: BTreeMap::new() }
    }

    pub fn from_maze(m: Maze) -> MazeSum {
        let mut sum = MazeSum::zero(m.ring, m.source.clone(), m.target.clone());
        sum.terms.insert(m, 1);
        sum
    }

    pub fn identity(ring: RingSpec, set: &IndexSet) -> MazeSum {
        MazeSum::from_maze(Maze::identity(ring, set))
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn source(&self) -> &IndexSet {
        &self.source
    }

    pub fn target(&self) -> &IndexSet {
        &self.target
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Maze, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Maze, coeff: i64) -> Result<()> {
        if m.ring != self.ring {
            return Err(Error::RingMismatch(m.ring, self.ring));
        }
        if m.source != self.source || m.target != self.target {
            return Err(Error::Endpoints(format!(
                "term {} -> {} does not match the sum's {} -> {}",
                m.source, m.target, self.source, self.target
            )));
        }
        if coeff == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            let key = self
                .terms
                .iter()
                .find(|(_, &c)| c == 0)
                .map(|(m, _)| m.clone())
                .expect("just inserted");
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add(&self, other: &MazeSum) -> Result<MazeSum> {
        let mut out = self.clone();
        if other.source != self.source || other.target != self.target {
            return Err(Error::Endpoints("sum of morphisms with different endpoints".into()));
        }
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> MazeSum {
        let mut out = MazeSum::zero(self.ring, self.source.clone(), self.target.clone());
        if c != 0 {
            for (m, coeff) in self.terms() {
                out.terms.insert(m.clone(), coeff * c);
            }
        }
        out
    }

    /// Bilinear composition `self ∘ other` for `other: V -> Z`,
    /// `self: Z -> X`. Inputs are guarded by `max_passages` per maze and by a
    /// relation bound of twice that.
    pub fn compose(&self, other: &MazeSum, max_passages: usize) -> Result<MazeSum> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        if self.source != other.target {
            return Err(Error::Endpoints(format!(
                "cannot compose: left factor starts at {}, right factor ends at {}",
                self.source, other.target
            )));
        }
        let mut out = MazeSum::zero(self.ring, other.source.clone(), self.target.clone());
        for (p, pc) in self.terms() {
            for (q, qc) in other.terms() {
                let partial = compose_mazes(p, q, max_passages)?;
                for (m, c) in partial.terms() {
                    out.add_term(m.clone(), c * pc * qc)?;
                }
            }
        }
        Ok(out)
    }

    /// Drops every term with more passages than `n`; such a maze factors
    /// through a middle set of cardinality exceeding `n`.
    pub fn truncate(&self, n: usize) -> MazeSum {
        let mut out = MazeSum::zero(self.ring, self.source.clone(), self.target.clone());
        for (m, c) in self.terms() {
            if m.passages.len() <= n {
                out.terms.insert(m.clone(), c);
            }
        }
        out
    }
}

/// Composition of two single mazes: one term per covering subset of the
/// compatibility relation `{(p, q) : from(p) = to(q)}`, with passage
/// `(to(p) <- from(q), label(p)·label(q))` for each selected pair.
pub fn compose_mazes(p: &Maze, q: &Maze, max_passages: usize) -> Result<MazeSum> {
    if p.ring != q.ring {
        return Err(Error::RingMismatch(p.ring, q.ring));
    }
    if p.source != q.target {
        return Err(Error::Endpoints(format!(
            "cannot compose maze from {} with maze into {}",
            p.source, q.target
        )));
    }
    if p.passages.len() > max_passages || q.passages.len() > max_passages {
        return Err(Error::Guard(format!(
            "composition of mazes with {} and {} passages exceeds the bound {max_passages}",
            p.passages.len(),
            q.passages.len()
        )));
    }
    let mut relation = Vec::new();
    for (i, pp) in p.passages.iter().enumerate() {
        for (j, qp) in q.passages.iter().enumerate() {
            if pp.from == qp.to {
                relation.push((i, j));
            }
        }
    }
    if relation.len() > 2 * max_passages {
        return Err(Error::Guard(format!(
            "compatibility relation has {} pairs, bound is {}",
            relation.len(),
            2 * max_passages
        )));
    }
    let coverings =
        crate::crosseffects::covering_subsets(p.passages.len(), q.passages.len(), &relation);
    let mut out = MazeSum::zero(p.ring, q.source.clone(), p.target.clone());
    for members in coverings {
        let passages: Vec<Passage> = members
            .iter()
            .map(|&(i, j)| Passage {
                to: p.passages[i].to,
                from: q.passages[j].from,
                label: p.ring.mul(p.passages[i].label, q.passages[j].label),
            })
            .collect();
        if let Some(m) = Maze::normalized(p.ring, p.target.clone(), q.source.clone(), passages) {
            out.add_term(m, 1)?;
        }
    }
    Ok(out)
}

/// The presentation of a maze as a contraction after an extension: surjections
/// `f : Y -> X` and `g : Y -> Z` from the middle set with a structure map
/// `alpha : Omega^Z -> Omega^Y` supported on the fibers of `g`.
#[derive(Clone, Debug)]
pub struct StructuredMaze {
    pub ring: RingSpec,
    pub target: IndexSet,
    pub middle: IndexSet,
    pub source: IndexSet,
    /// `f` by positions: `f[y]` indexes into `target`.
    pub f: Vec<usize>,
    /// `g` by positions: `g[y]` indexes into `source`.
    pub g: Vec<usize>,
    /// `|Y| x |Z|`, entry `(y, z)` zero unless `g(y) = z`.
    pub alpha: ExactMatrix,
}

impl StructuredMaze {
    pub fn new(
        ring: RingSpec,
        target: IndexSet,
        middle: IndexSet,
        source: IndexSet,
        f: Vec<usize>,
        g: Vec<usize>,
        alpha: ExactMatrix,
    ) -> Result<StructuredMaze> {
        if f.len() != middle.len() || g.len() != middle.len() {
            return Err(Error::Dim("f and g must be defined on the middle set".into()));
        }
        if (alpha.rows(), alpha.cols()) != (middle.len(), source.len()) {
            return Err(Error::Dim(format!(
                "structure map must be {}x{}, got {}x{}",
                middle.len(),
                source.len(),
                alpha.rows(),
                alpha.cols()
            )));
        }
        let mut onto_target = vec![false; target.len()];
        for &fy in &f {
            if fy >= target.len() {
                return Err(Error::Dim("f lands outside the target set".into()));
            }
            onto_target[fy] = true;
        }
        if onto_target.iter().any(|&c| !c) {
            return Err(Error::Invariant("f is not onto".into()));
        }
        let mut onto_source = vec![false; source.len()];
        for &gy in &g {
            if gy >= source.len() {
                return Err(Error::Dim("g lands outside the source set".into()));
            }
            onto_source[gy] = true;
        }
        if onto_source.iter().any(|&c| !c) {
            return Err(Error::Invariant("g is not onto".into()));
        }
        for (y, &gy) in g.iter().enumerate() {
            for z in 0..source.len() {
                if z != gy && alpha.get(y, z) != 0 {
                    return Err(Error::Invariant(
                        "structure map is supported off the fibers of g".into(),
                    ));
                }
            }
        }
        Ok(StructuredMaze { ring, target, middle, source, f, g, alpha })
    }
}

/// Reads off the structured presentation: the middle set is the passage list
/// in canonical order, `f` takes endpoints, `g` takes starting points, and
/// the structure map carries the labels on the fibers.
pub fn to_structured(m: &Maze) -> StructuredMaze {
    let middle = IndexSet::prefixed("y", m.passages.len());
    let f: Vec<usize> = m.passages.iter().map(|p| p.to).collect();
    let g: Vec<usize> = m.passages.iter().map(|p| p.from).collect();
    let mut alpha = ExactMatrix::zeros(m.ring, m.passages.len(), m.source.len());
    for (y, p) in m.passages.iter().enumerate() {
        alpha.set(y, p.from, p.label);
    }
    StructuredMaze::new(m.ring, m.target.clone(), middle, m.source.clone(), f, g, alpha)
        .expect("a canonical maze always has a valid presentation")
}

/// Collapses a structured presentation back to a labeled maze: one passage per
/// middle element, labeled by its structure-map entry. Zero entries on the
/// permitted support produce the zero morphism.
pub fn from_structured(s: &StructuredMaze) -> Result<MazeSum> {
    let passages: Vec<Passage> = (0..s.middle.len())
        .map(|y| Passage { to: s.f[y], from: s.g[y], label: s.alpha.get(y, s.g[y]) })
        .collect();
    let mut sum = MazeSum::zero(s.ring, s.source.clone(), s.target.clone());
    if let Some(m) = Maze::normalized(s.ring, s.target.clone(), s.source.clone(), passages) {
        sum.add_term(m, 1)?;
    }
    Ok(sum)
}

/// The passage-splitting rewrite: for `a + b = label(p)`, the maze equals the
/// sum of three terms, each with coefficient one — `p` doubled into parallel
/// passages labeled `a` and `b`, `p` relabeled `a`, and `p` relabeled `b`.
/// Terms with a zero label die through normalization.
pub fn split_passage(m: &Maze, passage_idx: usize, a: i64, b: i64) -> Result<MazeSum> {
    let ring = m.ring;
    let p = *m
        .passages
        .get(passage_idx)
        .ok_or_else(|| Error::Dim(format!("maze has no passage {passage_idx}")))?;
    let (a, b) = (ring.normalize(a), ring.normalize(b));
    if ring.add(a, b) != p.label {
        return Err(Error::Invariant(format!(
            "{a} + {b} is not the label {} of the chosen passage",
            p.label
        )));
    }
    gen_split(m, passage_idx, &[a as i64, b as i64])
}

/// The generalized splitting rewrite: for a decomposition of the label of `p`
/// into `parts`, the maze equals the sum over all nonempty subsets `I` of the
/// parts of the maze with `p` replaced by parallel passages labeled by `I`.
/// With one part this is the identity rewrite; with two it is
/// `split_passage`.
pub fn gen_split(m: &Maze, passage_idx: usize, parts: &[i64]) -> Result<MazeSum> {
    let ring = m.ring;
    let p = *m
        .passages
        .get(passage_idx)
        .ok_or_else(|| Error::Dim(format!("maze has no passage {passage_idx}")))?;
    if parts.is_empty() || parts.len() > 16 {
        return Err(Error::Guard(format!("label decomposition into {} parts", parts.len())));
    }
    let normalized: Vec<u64> = parts.iter().map(|&x| ring.normalize(x)).collect();
    let total = normalized.iter().fold(0u64, |acc, &x| ring.add(acc, x));
    if total != p.label {
        return Err(Error::Invariant(format!(
            "parts sum to {total}, passage label is {}",
            p.label
        )));
    }
    let mut rest: Vec<Passage> = m.passages.clone();
    rest.remove(passage_idx);
    let mut out = MazeSum::zero(ring, m.source.clone(), m.target.clone());
    for mask in 1u32..(1 << normalized.len()) {
        let mut passages = rest.clone();
        for (i, &label) in normalized.iter().enumerate() {
            if mask >> i & 1 == 1 {
                passages.push(Passage { to: p.to, from: p.from, label });
            }
        }
        if let Some(maze) = Maze::normalized(ring, m.target.clone(), m.source.clone(), passages) {
            out.add_term(maze, 1)?;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct PassageJson {
    pub to: String,
    #[serde(rename = "from")]
    pub from_: String,
    pub label: i64,
}

/// `{"ring":...,"source":[...],"target":[...],"passages":[...]}`; loading
/// normalizes, so reading a maze may yield the zero morphism.
#[derive(Serialize, Deserialize)]
pub struct MazeJson {
    pub ring: RingSpec,
    pub source: IndexSet,
    pub target: IndexSet,
    pub passages: Vec<PassageJson>,
}

impl From<&Maze> for MazeJson {
    fn from(m: &Maze) -> Self {
        MazeJson {
            ring: m.ring,
            source: m.source.clone(),
            target: m.target.clone(),
            passages: m
                .passages
                .iter()
                .map(|p| PassageJson {
                    to: m.target.name(p.to).to_string(),
                    from_: m.source.name(p.from).to_string(),
                    label: p.label as i64,
                })
                .collect(),
        }
    }
}

impl MazeJson {
    pub fn normalize(&self) -> Result<MazeSum> {
        let passages: Vec<(String, String, i64)> = self
            .passages
            .iter()
            .map(|p| (p.to.clone(), p.from_.clone(), p.label))
            .collect();
        normalize(self.ring, &self.target, &self.source, &passages)
    }
}

#[derive(Serialize, Deserialize)]
pub struct MazeTermJson {
    pub coeff: i64,
    pub maze: MazeJson,
}

/// `{"ring":...,"source":[...],"target":[...],"terms":[{"coeff":...,"maze":...}]}`.
/// The envelope keeps the endpoints of the zero morphism.
#[derive(Serialize, Deserialize)]
pub struct MazeSumJson {
    pub ring: RingSpec,
    pub source: IndexSet,
    pub target: IndexSet,
    pub terms: Vec<MazeTermJson>,
}

impl From<&MazeSum> for MazeSumJson {
    fn from(s: &MazeSum) -> Self {
        MazeSumJson {
            ring: s.ring,
            source: s.source.clone(),
            target: s.target.clone(),
            terms: s
                .terms()
                .map(|(m, c)| MazeTermJson { coeff: c, maze: MazeJson::from(m) })
                .collect(),
        }
    }
}

impl MazeSumJson {
    pub fn normalize(&self) -> Result<MazeSum> {
        let mut out = MazeSum::zero(self.ring, self.source.clone(), self.target.clone());
        for term in &self.terms {
            let partial = term.maze.normalize()?;
            if partial.ring() != self.ring
                || partial.source() != &self.source
                || partial.target() != &self.target
            {
                return Err(Error::Endpoints("term endpoints differ from the envelope".into()));
            }
            out = out.add(&partial.scale(term.coeff))?;
        }
        Ok(out)
    }
}

impl Serialize for MazeSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MazeSumJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MazeSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MazeSumJson::deserialize(d)?;
        j.normalize().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> RingSpec {
        RingSpec::zmod(4).unwrap()
    }

    fn z2() -> RingSpec {
        RingSpec::zmod(2).unwrap()
    }

    fn set(n: usize) -> IndexSet {
        IndexSet::numeric(n)
    }

    fn named(passages: &[(&str, &str, i64)]) -> Vec<(String, String, i64)> {
        passages.iter().map(|&(t, f, l)| (t.to_string(), f.to_string(), l)).collect()
    }

    #[test]
    fn zero_label_normalizes_to_zero() {
        let s = normalize(z4(), &set(1), &set(1), &named(&[("1", "1", 0)])).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn diagonal_passages_normalize_to_one_maze() {
        let s = normalize(z4(), &set(2), &set(2), &named(&[("1", "1", 1), ("2", "2", 3)])).unwrap();
        assert_eq!(s.num_terms(), 1);
        let (m, c) = s.terms().next().unwrap();
        assert_eq!(c, 1);
        assert_eq!(m.passages().len(), 2);
    }

    #[test]
    fn uncovered_vertex_normalizes_to_zero() {
        let s = normalize(z4(), &set(2), &set(1), &named(&[("1", "1", 1)])).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn unknown_element_is_an_error() {
        assert!(normalize(z4(), &set(1), &set(1), &named(&[("9", "1", 1)])).is_err());
    }

    fn twist(ring: RingSpec) -> MazeSum {
        normalize(ring, &set(2), &set(2), &named(&[("2", "1", 1), ("1", "2", 1)])).unwrap()
    }

    #[test]
    fn twist_squares_to_the_identity() {
        let t = twist(z4());
        let tt = t.compose(&t, DEFAULT_MAX_PASSAGES).unwrap();
        assert_eq!(tt, MazeSum::identity(z4(), &set(2)));
    }

    #[test]
    fn identity_is_two_sided_neutral_and_zero_absorbs() {
        let ring = z4();
        let id2 = MazeSum::identity(ring, &set(2));
        let m = normalize(ring, &set(2), &set(2), &named(&[("1", "1", 2), ("2", "1", 3), ("1", "2", 1), ("2", "2", 1)]))
            .unwrap();
        assert_eq!(id2.compose(&m, 8).unwrap(), m);
        assert_eq!(m.compose(&id2, 8).unwrap(), m);
        let zero = MazeSum::zero(ring, set(2), set(2));
        assert!(zero.compose(&m, 8).unwrap().is_zero());
        assert!(m.compose(&zero, 8).unwrap().is_zero());
    }

    #[test]
    fn parallel_composition_forces_both_pairs() {
        let ring = z4();
        let p = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 3)])).unwrap();
        let q = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 1), ("1", "1", 2)])).unwrap();
        let out = p.compose(&q, 8).unwrap();
        assert_eq!(out.num_terms(), 1);
        let (m, c) = out.terms().next().unwrap();
        assert_eq!(c, 1);
        let labels: Vec<u64> = m.passages().iter().map(|p| p.label).collect();
        assert_eq!(labels, vec![2, 3]); // 3*1 and 3*2 mod 4, sorted
    }

    #[test]
    fn hourglass_composition_has_seven_terms() {
        // Two passages out of one source vertex composed with two passages
        // into one target vertex: the full 2x2 relation, hence 7 coverings.
        let ring = z4();
        let h = normalize(ring, &set(2), &set(1), &named(&[("1", "1", 1), ("2", "1", 1)])).unwrap();
        let p = normalize(ring, &set(1), &set(2), &named(&[("1", "1", 1), ("1", "2", 1)])).unwrap();
        let out = h.compose(&p, 8).unwrap();
        let total: usize = out.terms().map(|(_, c)| c as usize).sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn composition_kills_terms_with_zero_products() {
        let ring = z4();
        let a = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 2)])).unwrap();
        let out = a.compose(&a, 8).unwrap();
        assert!(out.is_zero(), "2*2 = 0 mod 4 kills the only covering");
    }

    #[test]
    fn composition_is_bilinear() {
        let ring = z4();
        let a = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 1)])).unwrap();
        let b = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 3)])).unwrap();
        let c = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 2)])).unwrap();
        let lhs = a.add(&b.scale(2)).unwrap().compose(&c, 8).unwrap();
        let rhs = a.compose(&c, 8).unwrap().add(&b.compose(&c, 8).unwrap().scale(2)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn endpoint_mismatch_is_an_error() {
        let ring = z4();
        let a = normalize(ring, &set(2), &set(2), &named(&[("1", "1", 1), ("2", "2", 1)])).unwrap();
        let b = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 1)])).unwrap();
        assert!(matches!(a.compose(&b, 8), Err(Error::Endpoints(_))));
    }

    #[test]
    fn structured_roundtrip_on_a_singleton() {
        let ring = z4();
        let s = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 3)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        let st = to_structured(m);
        assert_eq!(st.middle.len(), 1);
        assert_eq!(st.alpha.get(0, 0), 3);
        let back = from_structured(&st).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn structured_roundtrip_on_the_three_passage_maze() {
        // Passages (1<-1, a), (2<-1, b), (2<-2, c): the middle set has three
        // elements and the structure map is the label pattern on the fibers.
        let ring = z4();
        let (a, b, c) = (1, 2, 3);
        let s = normalize(
            ring,
            &set(2),
            &set(2),
            &named(&[("1", "1", a), ("2", "1", b), ("2", "2", c)]),
        )
        .unwrap();
        let (m, _) = s.terms().next().unwrap();
        let st = to_structured(m);
        assert_eq!(st.middle.len(), 3);
        assert_eq!(st.f, vec![0, 1, 1]);
        assert_eq!(st.g, vec![0, 0, 1]);
        let expected_alpha =
            ExactMatrix::from_rows(ring, &[vec![a, 0], vec![b, 0], vec![0, c]]).unwrap();
        assert_eq!(st.alpha, expected_alpha);
        assert_eq!(from_structured(&st).unwrap(), s);
    }

    #[test]
    fn structured_zero_entry_collapses_to_zero() {
        let ring = z4();
        let st = StructuredMaze::new(
            ring,
            set(1),
            IndexSet::prefixed("y", 1),
            set(1),
            vec![0],
            vec![0],
            ExactMatrix::zeros(ring, 1, 1),
        )
        .unwrap();
        assert!(from_structured(&st).unwrap().is_zero());
    }

    #[test]
    fn structured_rejects_off_support_entries() {
        let ring = z4();
        let alpha = ExactMatrix::from_rows(ring, &[vec![1, 1]]).unwrap();
        let st = StructuredMaze::new(
            ring,
            set(1),
            IndexSet::prefixed("y", 1),
            set(2),
            vec![0],
            vec![0],
            alpha,
        );
        assert!(st.is_err());
    }

    #[test]
    fn split_with_a_zero_part_is_the_identity_rewrite() {
        let ring = z2();
        let s = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 1)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        let out = split_passage(m, 0, 1, 0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn split_two_into_one_plus_one_mod_four() {
        let ring = z4();
        let s = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 2)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        let out = split_passage(m, 0, 1, 1).unwrap();
        // [2] = [1 || 1] + [1] + [1]: the doubled maze once, the single
        // relabeled maze with multiplicity two.
        assert_eq!(out.num_terms(), 2);
        let doubled = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 1), ("1", "1", 1)])).unwrap();
        let single = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 1)])).unwrap();
        let expected = doubled.add(&single.scale(2)).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn split_sum_mismatch_is_an_error() {
        let ring = z4();
        let s = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 2)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        assert!(split_passage(m, 0, 1, 2).is_err());
    }

    #[test]
    fn gen_split_with_one_part_is_identity() {
        let ring = z4();
        let s = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 3)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        assert_eq!(gen_split(m, 0, &[3]).unwrap(), s);
    }

    #[test]
    fn gen_split_with_two_parts_matches_split_passage() {
        let ring = z4();
        let s = normalize(ring, &set(2), &set(1), &named(&[("1", "1", 3), ("2", "1", 1)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        assert_eq!(gen_split(m, 0, &[1, 2]).unwrap(), split_passage(m, 0, 1, 2).unwrap());
    }

    #[test]
    fn gen_split_three_parts_has_seven_terms() {
        let ring = RingSpec::zmod(8).unwrap();
        let s = normalize(ring, &set(1), &set(1), &named(&[("1", "1", 3)])).unwrap();
        let (m, _) = s.terms().next().unwrap();
        let out = gen_split(m, 0, &[1, 1, 1]).unwrap();
        let total: i64 = out.terms().map(|(_, c)| c).sum();
        assert_eq!(total, 7, "one term per nonempty subset of the three parts");
    }

    #[test]
    fn truncation_drops_large_terms() {
        let ring = z4();
        let h = normalize(ring, &set(2), &set(1), &named(&[("1", "1", 1), ("2", "1", 1)])).unwrap();
        let p = normalize(ring, &set(1), &set(2), &named(&[("1", "1", 1), ("1", "2", 1)])).unwrap();
        let composite = h.compose(&p, 8).unwrap();
        let truncated = composite.truncate(2);
        assert_eq!(truncated.num_terms(), 2, "only the two matched-pair terms survive");
        let zero = MazeSum::zero(ring, set(1), set(1));
        assert!(zero.truncate(2).is_zero());
    }

    #[test]
    fn truncation_is_compatible_with_composition() {
        let ring = z4();
        let h = normalize(ring, &set(2), &set(1), &named(&[("1", "1", 1), ("2", "1", 3)])).unwrap();
        let p = normalize(ring, &set(1), &set(2), &named(&[("1", "1", 2), ("1", "2", 1)])).unwrap();
        for n in 0..=4usize {
            let lhs = h.compose(&p, 8).unwrap().truncate(n);
            let rhs = h.truncate(n).compose(&p.truncate(n), 8).unwrap().truncate(n);
            assert_eq!(lhs, rhs, "truncation at {n}");
        }
    }

    #[test]
    fn empty_maze_is_the_identity_of_the_empty_set() {
        let ring = z4();
        let empty = IndexSet::empty();
        let id = MazeSum::identity(ring, &empty);
        assert_eq!(id.num_terms(), 1);
        assert_eq!(id.compose(&id, 8).unwrap(), id);
    }

    #[test]
    fn maze_sum_json_roundtrip() {
        let ring = z4();
        let t = twist(ring);
        let text = serde_json::to_string(&t).unwrap();
        let back: MazeSum = serde_json::from_str(&text).unwrap();
        assert_eq!(t, back);
        // A sum with an explicitly zero-labeled passage loads as zero.
        let zero_text = r#"{"ring":"zmod:4","source":["1"],"target":["1"],
            "terms":[{"coeff":2,"maze":{"ring":"zmod:4","source":["1"],"target":["1"],
            "passages":[{"to":"1","from":"1","label":4}]}}]}"#;
        let z: MazeSum = serde_json::from_str(zero_text).unwrap();
        assert!(z.is_zero(), "label 4 = 0 mod 4");
    }
}
