//! Finite presentations and brute-force homomorphism search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::caps::Caps;
use crate::error::{LoopError, Result};

/// One letter of a word: a generator (possibly inverted) or a fixed group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Gen { index: usize, inverse: bool },
    Const(usize),
}

impl Letter {
    pub fn gen(index: usize) -> Self {
        Letter::Gen { index, inverse: false }
    }

    pub fn inv(index: usize) -> Self {
        Letter::Gen { index, inverse: true }
    }
}

/// A word evaluated left to right: `[l₁, l₂, …]` is `l₁ l₂ ⋯`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// From signed 1-based generator indices: `2` is the second generator, `-2` its inverse.
    pub fn from_signed(ints: &[i64]) -> Result<Self> {
        ints.iter()
            .map(|&k| match k {
                0 => Err(LoopError::InvalidPresentation(
                    "generator index 0 is not allowed (indices are 1-based)".into(),
                )),
                k if k > 0 => Ok(Letter::gen(k as usize - 1)),
                k => Ok(Letter::inv((-k) as usize - 1)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn to_signed(&self) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|l| match *l {
                Letter::Gen { index, inverse } => {
                    let k = index as i64 + 1;
                    Ok(if inverse { -k } else { k })
                }
                Letter::Const(_) => Err(LoopError::InvalidPresentation(
                    "words with constants have no wire form".into(),
                )),
            })
            .collect()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// The inverse word.
    pub fn inverse(&self, g: &FiniteGroup) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|l| match *l {
                    Letter::Gen { index, inverse } => Letter::Gen {
                        index,
                        inverse: !inverse,
                    },
                    Letter::Const(x) => Letter::Const(g.inv(x)),
                })
                .collect(),
        )
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0
            .iter()
            .filter_map(|l| match *l {
                Letter::Gen { index, .. } => Some(index),
                Letter::Const(_) => None,
            })
            .max()
    }

    pub fn eval(&self, g: &FiniteGroup, assignment: &[usize]) -> usize {
        self.0.iter().fold(g.identity(), |acc, l| {
            let x = match *l {
                Letter::Gen { index, inverse: false } => assignment[index],
                Letter::Gen { index, inverse: true } => g.inv(assignment[index]),
                Letter::Const(c) => c,
            };
            g.mul(acc, x)
        })
    }
}

/// Parses a whitespace or comma separated list of signed 1-based generator indices.
pub fn parse_word(s: &str) -> Result<Word> {
    let ints = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| LoopError::InvalidPresentation(format!("bad letter '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Word::from_signed(&ints)
}

/// A finite presentation, optionally with base-point data for groupoid generators.
///
/// `boundary_words[j]` is the image of the j-th boundary generator. When
/// `endpoints` is present, generator `i` is a path from base point
/// `endpoints[i].0` to `endpoints[i].1`, and gauge transformations act on it as
/// `x ↦ g_target x g_source⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupPresentation {
    pub num_generators: usize,
    pub relators: Vec<Word>,
    pub boundary_words: Vec<Word>,
    pub endpoints: Option<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct PresentationWire {
    num_generators: usize,
    #[serde(default)]
    relators: Vec<Vec<i64>>,
    #[serde(default)]
    boundary_words: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    endpoints: Option<Vec<(usize, usize)>>,
}

impl Serialize for GroupPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let conv = |ws: &[Word]| {
            ws.iter()
                .map(Word::to_signed)
                .collect::<Result<Vec<_>>>()
                .map_err(serde::ser::Error::custom)
        };
        PresentationWire {
            num_generators: self.num_generators,
            relators: conv(&self.relators)?,
            boundary_words: conv(&self.boundary_words)?,
            endpoints: self.endpoints.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PresentationWire::deserialize(d)?;
        let conv = |ws: &[Vec<i64>]| {
            ws.iter()
                .map(|v| Word::from_signed(v))
                .collect::<Result<Vec<_>>>()
                .map_err(serde::de::Error::custom)
        };
        Ok(GroupPresentation {
            num_generators: w.num_generators,
            relators: conv(&w.relators)?,
            boundary_words: conv(&w.boundary_words)?,
            endpoints: w.endpoints,
        })
    }
}

impl GroupPresentation {
    pub fn new(num_generators: usize, relators: Vec<Word>) -> Self {
        GroupPresentation {
            num_generators,
            relators,
            boundary_words: Vec::new(),
            endpoints: None,
        }
    }

    /// Checks generator indices and endpoint data.
    pub fn validate(&self, group_order: usize) -> Result<()> {
        let check = |w: &Word, what: &str| -> Result<()> {
            for l in &w.0 {
                match *l {
                    Letter::Gen { index, .. } if index >= self.num_generators => {
                        return Err(LoopError::InvalidPresentation(format!(
                            "{what} uses generator {} but only {} exist",
                            index + 1,
                            self.num_generators
                        )))
                    }
                    Letter::Const(c) if c >= group_order => {
                        return Err(LoopError::InvalidPresentation(format!(
                            "{what} uses element {c} outside the group"
                        )))
                    }
                    _ => {}
                }
            }
            Ok(())
        };
        for r in &self.relators {
            check(r, "relator")?;
        }
        for b in &self.boundary_words {
            check(b, "boundary word")?;
        }
        if let Some(ep) = &self.endpoints {
            if ep.len() != self.num_generators {
                return Err(LoopError::InvalidPresentation(
                    "endpoints must list one (source, target) pair per generator".into(),
                ));
            }
        }
        Ok(())
    }

    /// Evaluates all boundary words on an assignment.
    pub fn boundary_values(&self, g: &FiniteGroup, assignment: &[usize]) -> Vec<usize> {
        self.boundary_words.iter().map(|w| w.eval(g, assignment)).collect()
    }
}

/// Depth-first search over generator assignments with relator pruning.
///
/// Generators are assigned in index order; a relator is tested as soon as its
/// largest generator is assigned. Solutions come out in lexicographic order.
#[derive(Debug, Clone)]
pub struct HomSearch<'g> {
    group: &'g FiniteGroup,
    domains: Vec<Vec<usize>>,
    checks: Vec<Vec<Word>>,
    constant_relators: Vec<Word>,
}

impl<'g> HomSearch<'g> {
    pub fn new(group: &'g FiniteGroup, num_generators: usize, relators: &[Word]) -> Result<Self> {
        let mut checks = vec![Vec::new(); num_generators];
        let mut constant_relators = Vec::new();
        for r in relators {
            match r.max_generator() {
                Some(i) if i >= num_generators => {
                    return Err(LoopError::InvalidPresentation(format!(
                        "relator uses generator {} but only {num_generators} exist",
                        i + 1
                    )))
                }
                Some(i) => checks[i].push(r.clone()),
                None => constant_relators.push(r.clone()),
            }
        }
        Ok(HomSearch {
            group,
            domains: vec![group.all_elements(); num_generators],
            checks,
            constant_relators,
        })
    }

    pub fn from_presentation(group: &'g FiniteGroup, pres: &GroupPresentation) -> Result<Self> {
        pres.validate(group.order())?;
        Self::new(group, pres.num_generators, &pres.relators)
    }

    /// Pins a generator to one value.
    pub fn fix(&mut self, gen: usize, value: usize) -> &mut Self {
        self.domains[gen] = vec![value];
        self
    }

    /// Keeps only the values of a generator's domain that satisfy `keep`.
    pub fn restrict(&mut self, gen: usize, keep: impl Fn(usize) -> bool) -> &mut Self {
        self.domains[gen].retain(|&x| keep(x));
        self
    }

    /// Adds an extra relator.
    pub fn add_relator(&mut self, w: Word) -> &mut Self {
        match w.max_generator() {
            Some(i) => self.checks[i].push(w),
            None => self.constant_relators.push(w),
        }
        self
    }

    /// Size of the raw search space.
    pub fn search_space(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    fn check_cap(&self, caps: &Caps) -> Result<()> {
        let space = self.search_space();
        if space > caps.homs {
            return Err(LoopError::CapExceeded {
                what: "homomorphism search".into(),
                needed: space,
                cap: caps.homs,
            });
        }
        Ok(())
    }

    fn constants_hold(&self) -> bool {
        self.constant_relators.iter().all(|w| w.eval(self.group, &[]) == 0)
    }

    /// Visits every solution in lexicographic order.
    pub fn for_each(&self, caps: &Caps, mut f: impl FnMut(&[usize])) -> Result<()> {
        self.check_cap(caps)?;
        if !self.constants_hold() {
            return Ok(());
        }
        let n = self.domains.len();
        let mut assign = vec![0usize; n];
        self.visit(0, &mut assign, &mut f);
        Ok(())
    }

    fn visit(&self, depth: usize, assign: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if depth == assign.len() {
            f(assign);
            return;
        }
        for &x in &self.domains[depth] {
            assign[depth] = x;
            if self.checks[depth].iter().all(|w| w.eval(self.group, assign) == 0) {
                self.visit(depth + 1, assign, f);
            }
        }
    }

    fn count_from(&self, depth: usize, assign: &mut [usize]) -> u128 {
        if depth == assign.len() {
            return 1;
        }
        let mut total = 0;
        for &x in &self.domains[depth] {
            assign[depth] = x;
            if self.checks[depth].iter().all(|w| w.eval(self.group, assign) == 0) {
                total += self.count_from(depth + 1, assign);
            }
        }
        total
    }

    /// Number of solutions; large searches are split over the first generator.
    pub fn count(&self, caps: &Caps) -> Result<u128> {
        self.check_cap(caps)?;
        if !self.constants_hold() {
            return Ok(0);
        }
        let n = self.domains.len();
        if n == 0 {
            return Ok(1);
        }
        if self.search_space() < 50_000 {
            let mut assign = vec![0usize; n];
            return Ok(self.count_from(0, &mut assign));
        }
        Ok(self.domains[0]
            .par_iter()
            .map(|&x| {
                let mut assign = vec![0usize; n];
                assign[0] = x;
                if self.checks[0].iter().all(|w| w.eval(self.group, &assign) == 0) {
                    self.count_from(1, &mut assign)
                } else {
                    0
                }
            })
            .sum())
    }

    pub fn collect(&self, caps: &Caps) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.for_each(caps, |a| out.push(a.to_vec()))?;
        Ok(out)
    }
}

/// All homomorphisms from the presented group to `g`, as generator images in lexicographic order.
pub fn enumerate_homs(g: &FiniteGroup, pres: &GroupPresentation, caps: &Caps) -> Result<Vec<Vec<usize>>> {
    HomSearch::from_presentation(g, pres)?.collect(caps)
}

pub fn count_homs(g: &FiniteGroup, pres: &GroupPresentation, caps: &Caps) -> Result<u128> {
    HomSearch::from_presentation(g, pres)?.count(caps)
}

pub fn for_each_hom(
    g: &FiniteGroup,
    pres: &GroupPresentation,
    caps: &Caps,
    f: impl FnMut(&[usize]),
) -> Result<()> {
    HomSearch::from_presentation(g, pres)?.for_each(caps, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;

    fn commutator_pres() -> GroupPresentation {
        GroupPresentation::new(2, vec![Word::from_signed(&[1, 2, -1, -2]).unwrap()])
    }

    #[test]
    fn commuting_pairs_in_d6() {
        let g = parse_group("D6").unwrap();
        let homs = enumerate_homs(&g, &commutator_pres(), &Caps::default()).unwrap();
        assert_eq!(homs.len(), 18);
        let mut sorted = homs.clone();
        sorted.sort();
        assert_eq!(homs, sorted);
    }

    #[test]
    fn involutions_and_trivial_relator() {
        let s3 = parse_group("S3").unwrap();
        let sq = GroupPresentation::new(1, vec![Word::from_signed(&[1, 1]).unwrap()]);
        assert_eq!(count_homs(&s3, &sq, &Caps::default()).unwrap(), 4);
        let triv = GroupPresentation::new(1, vec![Word::from_signed(&[1]).unwrap()]);
        for name in ["Z1", "Q8", "S4"] {
            let g = parse_group(name).unwrap();
            assert_eq!(count_homs(&g, &triv, &Caps::default()).unwrap(), 1);
        }
    }

    #[test]
    fn q8_commuting_pairs() {
        let g = parse_group("Q8").unwrap();
        assert_eq!(count_homs(&g, &commutator_pres(), &Caps::default()).unwrap(), 40);
    }

    #[test]
    fn cap_and_bad_index_are_errors() {
        let g = parse_group("S4").unwrap();
        let free = GroupPresentation::new(6, vec![]);
        assert!(matches!(
            count_homs(&g, &free, &Caps::default()),
            Err(LoopError::CapExceeded { .. })
        ));
        let bad = GroupPresentation::new(1, vec![Word::from_signed(&[2]).unwrap()]);
        assert!(count_homs(&g, &bad, &Caps::default()).is_err());
        assert!(Word::from_signed(&[0]).is_err());
    }
}
