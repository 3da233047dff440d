use std::collections::VecDeque;
use std::fmt;

use super::EqError;
use crate::complex_geom::{FreeWord, Letter};

/// Coset enumeration gives up beyond this many live cosets.
const MAX_COSETS: usize = 100_000;

/// Element of a [`QuotientGroup`], as an index into its element table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem(pub usize);

impl GroupElem {
    pub const IDENTITY: GroupElem = GroupElem(0);

    pub fn index(self) -> usize {
        self.0
    }
}

/// A finite group given by generators and relator words, enumerated into an
/// element table with a full multiplication table.
///
/// Element 0 is the identity; elements are numbered in shortlex order of
/// their representative words (generator `k` before its inverse, before
/// generator `k + 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGroup {
    names: Vec<String>,
    relators: Vec<FreeWord>,
    /// `right[e][c]`: `e · letter(c)`, column `2k` for `Bk`, `2k + 1` for `Bk⁻¹`.
    right: Vec<Vec<usize>>,
    words: Vec<FreeWord>,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

/// Parses a product of generator names with optional `^-1`; `e` is empty.
pub(crate) fn parse_word(names: &[String], s: &str) -> Result<FreeWord, EqError> {
    let s = s.trim();
    if s == "e" || s.is_empty() {
        return Ok(FreeWord::empty());
    }
    let mut letters = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let (k, name) = names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len())
            .ok_or_else(|| EqError::Parse(format!("`{s}`: unknown generator at `{rest}`")))?;
        rest = &rest[name.len()..];
        let sign = match rest.strip_prefix("^-1") {
            Some(r) => {
                rest = r;
                -1
            }
            None => 1,
        };
        letters.push(Letter::new(k, sign));
    }
    Ok(FreeWord::from_letters(letters))
}

fn column(l: Letter) -> usize {
    2 * l.generator + usize::from(l.sign < 0)
}

fn letter(col: usize) -> Letter {
    Letter::new(col / 2, if col % 2 == 0 { 1 } else { -1 })
}

/// Coset table under construction (Felsch-free HLT with coincidences).
struct Enumerator {
    cols: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    live: usize,
}

impl Enumerator {
    fn new(cols: usize) -> Self {
        Self {
            cols,
            table: vec![vec![None; cols]],
            parent: vec![0],
            live: 1,
        }
    }

    fn find(&mut self, mut c: usize) -> usize {
        while self.parent[c] != c {
            self.parent[c] = self.parent[self.parent[c]];
            c = self.parent[c];
        }
        c
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<usize, EqError> {
        if self.live >= MAX_COSETS {
            return Err(EqError::GroupTooLarge(MAX_COSETS));
        }
        let n = self.table.len();
        self.table.push(vec![None; self.cols]);
        self.parent.push(n);
        self.live += 1;
        self.table[c][x] = Some(n);
        self.table[n][x ^ 1] = Some(c);
        Ok(n)
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = VecDeque::new();
        self.merge(a, b, &mut queue);
        while let Some(g) = queue.pop_front() {
            for x in 0..self.cols {
                let Some(d) = self.table[g][x] else { continue };
                self.table[d][x ^ 1] = None;
                let (mu, nu) = (self.find(g), self.find(d));
                if let Some(t) = self.table[mu][x] {
                    self.merge(nu, t, &mut queue);
                } else if let Some(t) = self.table[nu][x ^ 1] {
                    self.merge(mu, t, &mut queue);
                } else {
                    self.table[mu][x] = Some(nu);
                    self.table[nu][x ^ 1] = Some(mu);
                }
            }
        }
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut VecDeque<usize>) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.parent[drop] = keep;
        self.live -= 1;
        queue.push_back(drop);
    }

    /// Scans `c · rel = c`, defining cosets as needed and processing any
    /// deduction or coincidence.
    fn scan_and_fill(&mut self, c: usize, rel: &[usize]) -> Result<(), EqError> {
        let n = rel.len();
        let (mut i, mut j) = (0usize, n);
        let (mut f, mut b) = (c, c);
        loop {
            while i < j {
                match self.table[f][rel[i]] {
                    Some(t) => {
                        f = t;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                match self.table[b][rel[j - 1] ^ 1] {
                    Some(t) => {
                        b = t;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            if i + 1 == j {
                self.table[f][rel[i]] = Some(b);
                self.table[b][rel[i] ^ 1] = Some(f);
                return Ok(());
            }
            self.define(f, rel[i])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>]) -> Result<(), EqError> {
        let mut c = 0;
        while c < self.table.len() {
            for rel in relators {
                if !self.is_live(c) {
                    break;
                }
                self.scan_and_fill(c, rel)?;
            }
            if self.is_live(c) {
                for x in 0..self.cols {
                    if self.table[c][x].is_none() {
                        self.define(c, x)?;
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }
}

impl QuotientGroup {
    /// Enumerates the group `⟨names | relators⟩`, which must be finite.
    pub fn from_presentation(names: Vec<String>, relators: Vec<FreeWord>) -> Result<Self, EqError> {
        let ngen = names.len();
        if ngen == 0 {
            return Err(EqError::InvalidGroup("no generators".into()));
        }
        for r in &relators {
            if let Some(l) = r.letters().iter().find(|l| l.generator >= ngen) {
                return Err(EqError::InvalidGroup(format!(
                    "relator uses generator {} of {ngen}",
                    l.generator + 1
                )));
            }
        }
        let cols = 2 * ngen;
        let rels: Vec<Vec<usize>> = relators
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.letters().iter().map(|&l| column(l)).collect())
            .collect();
        let mut en = Enumerator::new(cols);
        en.run(&rels)?;

        // Renumber live cosets in shortlex order by breadth-first search.
        let mut index = vec![usize::MAX; en.table.len()];
        let mut order = vec![0usize];
        let mut words = vec![FreeWord::empty()];
        index[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            for x in 0..cols {
                let t = en.table[c][x].expect("complete table");
                let t = en.find(t);
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                    words.push(words[head].concat(&FreeWord::from_letters([letter(x)])));
                }
            }
            head += 1;
        }
        let right: Vec<Vec<usize>> = order
            .iter()
            .map(|&c| {
                (0..cols)
                    .map(|x| {
                        let t = en.table[c][x].expect("complete table");
                        index[en.find(t)]
                    })
                    .collect()
            })
            .collect();
        let n = order.len();
        let mut group = Self {
            names,
            relators,
            right,
            words,
            mult: Vec::new(),
            inv: Vec::new(),
        };
        group.mult = (0..n)
            .map(|a| (0..n).map(|b| group.apply_word(a, &group.words[b].clone())).collect())
            .collect();
        group.inv = (0..n)
            .map(|a| (0..n).find(|&b| group.mult[a][b] == 0).expect("inverse exists"))
            .collect();
        Ok(group)
    }

    /// `⟨B1, B2 | B1², B2², (B1B2)⁴⟩`, the dihedral group of order eight.
    pub fn dihedral8() -> Self {
        let b1 = Letter::new(0, 1);
        let b2 = Letter::new(1, 1);
        let relators = vec![
            FreeWord::from_letters([b1, b1]),
            FreeWord::from_letters([b2, b2]),
            FreeWord::from_letters([b1, b2, b1, b2, b1, b2, b1, b2]),
        ];
        Self::from_presentation(vec!["B1".into(), "B2".into()], relators)
            .expect("finite presentation")
    }

    fn apply_word(&self, mut e: usize, w: &FreeWord) -> usize {
        for &l in w.letters() {
            e = self.right[e][column(l)];
        }
        e
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> {
        (0..self.order()).map(GroupElem)
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem::IDENTITY
    }

    pub fn generator(&self, k: usize) -> GroupElem {
        GroupElem(self.right[0][2 * k])
    }

    pub fn mul(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        GroupElem(self.mult[a.0][b.0])
    }

    pub fn inverse(&self, a: GroupElem) -> GroupElem {
        GroupElem(self.inv[a.0])
    }

    /// Image of a free-group word.
    pub fn reduce(&self, w: &FreeWord) -> Result<GroupElem, EqError> {
        if let Some(l) = w.letters().iter().find(|l| l.generator >= self.names.len()) {
            return Err(EqError::InvalidGroup(format!("unknown generator index {}", l.generator)));
        }
        Ok(GroupElem(self.apply_word(0, w)))
    }

    /// Shortlex-least word representing `a`.
    pub fn word(&self, a: GroupElem) -> &FreeWord {
        &self.words[a.0]
    }

    /// Representative word as text, e.g. `B1B2`, `B2^-1` or `e`.
    pub fn name(&self, a: GroupElem) -> String {
        let w = &self.words[a.0];
        if w.is_empty() {
            return "e".into();
        }
        w.letters()
            .iter()
            .map(|l| {
                let n = &self.names[l.generator];
                if l.sign > 0 {
                    n.clone()
                } else {
                    format!("{n}^-1")
                }
            })
            .collect()
    }

    /// Parses a product of generator names with optional `^-1`, or `e`.
    pub fn parse(&self, s: &str) -> Result<GroupElem, EqError> {
        self.reduce(&parse_word(&self.names, s)?)
    }

    /// Exhaustive check of the group axioms and the relators.
    pub fn verify(&self) -> Result<(), EqError> {
        let n = self.order();
        let bad = |m: String| Err(EqError::InvalidGroup(m));
        for a in 0..n {
            if self.mult[0][a] != a || self.mult[a][0] != a {
                return bad(format!("element {a} breaks the identity law"));
            }
            if self.mult[a][self.inv[a]] != 0 || self.mult[self.inv[a]][a] != 0 {
                return bad(format!("element {a} has no two-sided inverse"));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mult[self.mult[a][b]][c] != self.mult[a][self.mult[b][c]] {
                        return bad(format!("({a}·{b})·{c} differs from {a}·({b}·{c})"));
                    }
                }
            }
        }
        for r in &self.relators {
            if self.apply_word(0, r) != 0 {
                return bad(format!("relator {r} is not trivial"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for QuotientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| r.render(&self.names)).collect();
        write!(f, "<{} | {}> of order {}", self.names.join(", "), rels.join(", "), self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dihedral_of_order_eight() {
        let g = QuotientGroup::dihedral8();
        assert_eq!(g.order(), 8);
        g.verify().unwrap();
        let names: Vec<String> = g.elements().map(|a| g.name(a)).collect();
        assert_eq!(names, ["e", "B1", "B2", "B1B2", "B2B1", "B1B2B1", "B2B1B2", "B1B2B1B2"]);
        let b1 = g.generator(0);
        let b2 = g.generator(1);
        assert_eq!(g.inverse(b1), b1);
        assert_eq!(g.parse("B2^-1B1B2").unwrap(), g.parse("B2B1B2").unwrap());
        assert_eq!(g.parse("B2B1B2B1").unwrap(), g.parse("B1B2B1B2").unwrap());
        assert_ne!(g.mul(b1, b2), g.mul(b2, b1));
        assert_eq!(g.inverse(g.mul(b1, b2)), g.mul(b2, b1));
    }

    #[test]
    fn other_presentations() {
        let a = Letter::new(0, 1);
        let cyclic = QuotientGroup::from_presentation(vec!["a".into()], vec![FreeWord::from_letters([a; 5])]).unwrap();
        assert_eq!(cyclic.order(), 5);
        cyclic.verify().unwrap();
        let b = Letter::new(1, 1);
        // S3 = <a, b | a², b³, (ab)²>.
        let s3 = QuotientGroup::from_presentation(
            vec!["a".into(), "b".into()],
            vec![
                FreeWord::from_letters([a, a]),
                FreeWord::from_letters([b, b, b]),
                FreeWord::from_letters([a, b, a, b]),
            ],
        )
        .unwrap();
        assert_eq!(s3.order(), 6);
        s3.verify().unwrap();
        // Quaternion group <i, j | i⁴, i²j⁻², j⁻¹iji>.
        let (i, j) = (a, b);
        let q8 = QuotientGroup::from_presentation(
            vec!["i".into(), "j".into()],
            vec![
                FreeWord::from_letters([i; 4]),
                FreeWord::from_letters([i, i, j.inverse(), j.inverse()]),
                FreeWord::from_letters([j.inverse(), i, j, i]),
            ],
        )
        .unwrap();
        assert_eq!(q8.order(), 8);
        q8.verify().unwrap();
        assert!(matches!(
            QuotientGroup::from_presentation(vec![], vec![]),
            Err(EqError::InvalidGroup(_))
        ));
    }

    #[test]
    fn unknown_names_are_rejected() {
        let g = QuotientGroup::dihedral8();
        assert!(matches!(g.parse("B3"), Err(EqError::Parse(_))));
    }

    proptest! {
        #[test]
        fn reduction_is_a_homomorphism(
            u in proptest::collection::vec((0usize..2, prop::bool::ANY), 0..12),
            v in proptest::collection::vec((0usize..2, prop::bool::ANY), 0..12),
        ) {
            let g = QuotientGroup::dihedral8();
            let word = |w: &[(usize, bool)]| FreeWord::from_letters(
                w.iter().map(|&(k, s)| Letter::new(k, if s { 1 } else { -1 })),
            );
            let (wu, wv) = (word(&u), word(&v));
            let lhs = g.reduce(&wu.concat(&wv)).unwrap();
            prop_assert_eq!(lhs, g.mul(g.reduce(&wu).unwrap(), g.reduce(&wv).unwrap()));
            prop_assert_eq!(g.reduce(&wu.inverse()).unwrap(), g.inverse(g.reduce(&wu).unwrap()));
            prop_assert_eq!(g.reduce(g.word(lhs)).unwrap(), lhs);
        }
    }
}
