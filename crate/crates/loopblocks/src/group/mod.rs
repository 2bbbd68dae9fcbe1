//! Finite groups as dense Cayley tables.
//!
//! Elements are indices `0..order` with the identity at 0. Conjugacy classes are
//! ordered by their least element, which is also the class representative.

mod builtin;
mod presentation;

pub use builtin::{builtin, catalog, parse_group, GroupFamily};
pub use presentation::{
    count_homs, enumerate_homs, for_each_hom, parse_word, GroupPresentation, HomSearch, Letter,
    Word,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{LoopError, Result};

/// Groups up to this order get an exhaustive associativity check.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const SAMPLED_ASSOC_TRIPLES: usize = 20_000;

/// A finite group given by its multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    labels: Vec<String>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

/// Wire format of an explicit Cayley table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CayleyJson {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication rule, validating all group axioms.
    pub fn from_fn(
        name: impl Into<String>,
        order: usize,
        mul: impl Fn(usize, usize) -> usize,
        labels: Vec<String>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(LoopError::InvalidGroup("order must be positive".into()));
        }
        if order > u32::MAX as usize {
            return Err(LoopError::InvalidGroup("order too large".into()));
        }
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                let c = mul(a, b);
                if c >= order {
                    return Err(LoopError::InvalidGroup(format!(
                        "product {a}*{b} = {c} out of range"
                    )));
                }
                table.push(c as u32);
            }
        }
        Self::from_table(name.into(), order, table, labels)
    }

    /// Builds a group from a row-major Cayley table.
    pub fn from_cayley(name: impl Into<String>, cayley: &[Vec<usize>]) -> Result<Self> {
        let order = cayley.len();
        for (i, row) in cayley.iter().enumerate() {
            if row.len() != order {
                return Err(LoopError::InvalidGroup(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
        }
        let labels = (0..order).map(|i| i.to_string()).collect();
        Self::from_fn(name, order, |a, b| cayley[a][b], labels)
    }

    fn from_table(name: String, order: usize, table: Vec<u32>, labels: Vec<String>) -> Result<Self> {
        let at = |a: usize, b: usize| table[a * order + b] as usize;
        // identity must be element 0
        for a in 0..order {
            if at(0, a) != a || at(a, 0) != a {
                return Err(LoopError::InvalidGroup(
                    "element 0 is not a two-sided identity".into(),
                ));
            }
        }
        // latin square
        let mut seen = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                let c = at(a, b);
                if seen[c] == a {
                    return Err(LoopError::InvalidGroup(format!("row {a} repeats element {c}")));
                }
                seen[c] = a;
            }
        }
        let mut seen = vec![usize::MAX; order];
        for b in 0..order {
            for a in 0..order {
                let c = at(a, b);
                if seen[c] == b {
                    return Err(LoopError::InvalidGroup(format!(
                        "column {b} repeats element {c}"
                    )));
                }
                seen[c] = b;
            }
        }
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if at(at(a, b), c) != at(a, at(b, c)) {
                return Err(LoopError::InvalidGroup(format!(
                    "not associative at ({a},{b},{c})"
                )));
            }
            Ok(())
        };
        if order <= EXHAUSTIVE_ASSOC_LIMIT {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                check(
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                )?;
            }
        }
        let mut inverse = vec![0u32; order];
        for a in 0..order {
            let b = (0..order)
                .find(|&b| at(a, b) == 0)
                .ok_or_else(|| LoopError::InvalidGroup(format!("element {a} has no inverse")))?;
            inverse[a] = b as u32;
        }
        let labels = if labels.len() == order {
            labels
        } else {
            (0..order).map(|i| i.to_string()).collect()
        };
        let mut g = FiniteGroup {
            name,
            order,
            table,
            inverse,
            labels,
            classes: Vec::new(),
            class_of: Vec::new(),
        };
        g.compute_classes();
        Ok(g)
    }

    fn compute_classes(&mut self) {
        let n = self.order;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members: Vec<usize> = (0..n).map(|g| self.conj(g, x)).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(members);
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `g x g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    #[inline]
    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(x) } else { x };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    /// Resolves an element by label, by `#index`, or by a bare index.
    pub fn element_by_label(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        if let Some(i) = self.labels.iter().position(|l| l == s) {
            return Ok(i);
        }
        let digits = s.strip_prefix('#').unwrap_or(s);
        match digits.parse::<usize>() {
            Ok(i) if i < self.order => Ok(i),
            _ => Err(LoopError::InvalidInput(format!(
                "unknown element '{s}' in group {}",
                self.name
            ))),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Conjugacy classes, each sorted, ordered by least element.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn class_rep(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.classes[class].len()
    }

    /// Least element of the class of `x`.
    pub fn rep_of(&self, x: usize) -> usize {
        self.classes[self.class_of[x]][0]
    }

    pub fn class_reps(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    /// Class of `x⁻¹` for the class of `x`.
    pub fn inverse_class(&self, class: usize) -> usize {
        self.class_of(self.inv(self.class_rep(class)))
    }

    pub fn centralizer(&self, x: usize) -> Vec<usize> {
        (0..self.order).filter(|&g| self.commute(g, x)).collect()
    }

    /// Elements commuting with every entry of `xs`.
    pub fn centralizer_of(&self, xs: &[usize]) -> Vec<usize> {
        (0..self.order)
            .filter(|&g| xs.iter().all(|&x| self.commute(g, x)))
            .collect()
    }

    /// `(g x₁ g⁻¹, …, g xₘ g⁻¹)`.
    pub fn conj_tuple(&self, g: usize, xs: &[usize]) -> Vec<usize> {
        xs.iter().map(|&x| self.conj(g, x)).collect()
    }

    /// Lexicographically least conjugate of a tuple under simultaneous conjugation.
    pub fn canonical_conjugate(&self, xs: &[usize]) -> Vec<usize> {
        let mut best = xs.to_vec();
        let mut cand = vec![0; xs.len()];
        for g in 1..self.order {
            for (c, &x) in cand.iter_mut().zip(xs) {
                *c = self.conj(g, x);
            }
            if cand < best {
                best.clone_from(&cand);
            }
        }
        best
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order
    }

    /// Checks that `elements` is a subgroup.
    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        let mut mask = vec![false; self.order];
        for &e in elements {
            if e >= self.order {
                return false;
            }
            mask[e] = true;
        }
        if !mask[0] {
            return false;
        }
        elements
            .iter()
            .all(|&a| elements.iter().all(|&b| mask[self.mul(a, self.inv(b))]))
    }

    /// Extracts a subgroup as a group in its own right.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup> {
        let mut elems = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if !self.is_subgroup(&elems) {
            return Err(LoopError::InvalidGroup("element set is not a subgroup".into()));
        }
        let mut local = vec![usize::MAX; self.order];
        for (i, &e) in elems.iter().enumerate() {
            local[e] = i;
        }
        let labels = elems.iter().map(|&e| self.labels[e].clone()).collect();
        let group = FiniteGroup::from_fn(
            format!("{}<{}>", self.name, elems.len()),
            elems.len(),
            |a, b| local[self.mul(elems[a], elems[b])],
            labels,
        )?;
        Ok(Subgroup {
            group,
            elements: elems,
            local,
        })
    }

    /// Number of pairwise commuting `m`-tuples drawn from `within`.
    pub fn count_commuting_tuples(&self, m: usize, within: &[usize]) -> u128 {
        if m == 0 {
            return 1;
        }
        if m == 1 {
            return within.len() as u128;
        }
        within
            .iter()
            .map(|&x| {
                let next: Vec<usize> = within.iter().copied().filter(|&y| self.commute(x, y)).collect();
                self.count_commuting_tuples(m - 1, &next)
            })
            .sum()
    }

    /// Pairwise commuting `m`-tuples from `within`, in lexicographic order.
    pub fn commuting_tuples(&self, m: usize, within: &[usize], caps: &Caps) -> Result<Vec<Vec<usize>>> {
        let count = self.count_commuting_tuples(m, within);
        if count > caps.list {
            return Err(LoopError::CapExceeded {
                what: format!("listing commuting {m}-tuples"),
                needed: count,
                cap: caps.list,
            });
        }
        let mut sorted = within.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::with_capacity(count as usize);
        let mut cur = Vec::with_capacity(m);
        self.commuting_rec(m, &sorted, &mut cur, &mut out);
        Ok(out)
    }

    fn commuting_rec(&self, m: usize, within: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for &x in within {
            let next: Vec<usize> = within.iter().copied().filter(|&y| self.commute(x, y)).collect();
            cur.push(x);
            self.commuting_rec(m, &next, cur, out);
            cur.pop();
        }
    }

    pub fn all_elements(&self) -> Vec<usize> {
        (0..self.order).collect()
    }

    pub fn to_cayley_json(&self) -> CayleyJson {
        CayleyJson {
            order: self.order,
            cayley: (0..self.order)
                .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
                .collect(),
        }
    }
}

/// A subgroup re-indexed as a standalone group.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub group: FiniteGroup,
    /// Parent indices of the members, sorted; local index `i` is `elements[i]`.
    pub elements: Vec<usize>,
    local: Vec<usize>,
}

impl Subgroup {
    /// Local index of a parent element, if it is a member.
    pub fn local(&self, parent: usize) -> Option<usize> {
        match self.local.get(parent) {
            Some(&i) if i != usize::MAX => Some(i),
            _ => None,
        }
    }

    pub fn contains(&self, parent: usize) -> bool {
        self.local(parent).is_some()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_latin_table() {
        let t = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_cayley("bad", &t).is_err());
    }

    #[test]
    fn rejects_identity_not_first() {
        let t = vec![vec![1, 0], vec![0, 1]];
        assert!(FiniteGroup::from_cayley("bad", &t).is_err());
    }

    #[test]
    fn rejects_non_associative_latin_square() {
        // a non-commutative loop of order 5, hence not a group
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_cayley("loop", &t).unwrap_err();
        assert!(err.to_string().contains("associative") || err.to_string().contains("repeats"));
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let g = builtin(GroupFamily::Cyclic, 5).unwrap();
        assert_eq!(g.pow(1, -1), 4);
        assert_eq!(g.pow(2, 0), 0);
        assert_eq!(g.pow(2, 7), 4);
    }
}
