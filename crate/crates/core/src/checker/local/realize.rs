//! Whether an abstract structure occurs as a neighbourhood in the presented
//! structure, decided by multi-track searches.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::canon::{canonical_key, sphere_key};
use super::sphere::{adjacency, all_tuples, extract_with, Sphere};
use crate::automata::explore::{find, Constraint, Query};
use crate::automata::image::image;
use crate::automata::ops::is_empty;
use crate::automata::{Nfa, Symbol};
use crate::error::{Error, Result};
use crate::presentation::{gaifman_automaton, Presentation};

type Word = Vec<Symbol>;

#[derive(Clone, Copy, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RealizeStats {
    /// Multi-track searches run.
    pub queries: usize,
    /// Checks answered by an earlier witness.
    pub witness_reuses: usize,
    pub memo_hits: usize,
    pub explored_states: usize,
}

/// What is known about a partially determined structure: tuples known to
/// hold, tuples known not to hold, and elements whose neighbourhood is
/// complete.
pub(crate) struct Facts<'s> {
    pub size: usize,
    pub present: &'s [BTreeSet<Vec<usize>>],
    pub absent: &'s [BTreeSet<Vec<usize>>],
    pub closed: &'s [bool],
}

pub struct Realizer<'p> {
    p: &'p Presentation,
    rels: Vec<Arc<Nfa>>,
    gaifman: Arc<Nfa>,
    budget: usize,
    /// Whether a relation has tuples with a given equality pattern.
    patterns: HashMap<(usize, Vec<usize>), bool>,
    images: HashMap<Word, Option<BTreeSet<Word>>>,
    memo: HashMap<Vec<u64>, Option<Vec<Word>>>,
    local_memo: HashMap<Vec<u64>, bool>,
    pub stats: RealizeStats,
    /// Caches verdicts by canonical form.
    pub memoize: bool,
}

fn equality_pattern(t: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    t.iter()
        .map(|x| match seen.iter().position(|y| y == x) {
            Some(i) => i,
            None => {
                seen.push(*x);
                seen.len() - 1
            }
        })
        .collect()
}

impl<'p> Realizer<'p> {
    /// The presentation must be injective.
    pub fn new(p: &'p Presentation, budget: usize) -> Result<Self> {
        if !p.is_injective() {
            return Err(Error::Precondition("sphere realizability needs an injective presentation".into()));
        }
        Ok(Realizer {
            p,
            rels: p.relations.values().map(|r| r.nfa.clone()).collect(),
            gaifman: gaifman_automaton(p)?,
            budget,
            patterns: HashMap::new(),
            images: HashMap::new(),
            memo: HashMap::new(),
            local_memo: HashMap::new(),
            stats: RealizeStats::default(),
            memoize: true,
        })
    }

    pub fn presentation(&self) -> &'p Presentation {
        self.p
    }

    fn pattern_possible(&mut self, rel: usize, pattern: Vec<usize>) -> Result<bool> {
        if let Some(&b) = self.patterns.get(&(rel, pattern.clone())) {
            return Ok(b);
        }
        let out = pattern.iter().max().map_or(0, |m| m + 1);
        let b = !is_empty(&self.rels[rel].rearrange(&pattern, out)?)?;
        self.patterns.insert((rel, pattern), b);
        Ok(b)
    }

    /// Absent tuples that the search must exclude explicitly. A tuple with
    /// a closed element and another element outside its neighbourhood is
    /// already excluded by the closure constraint.
    fn needs_reject(&mut self, adj: &[BTreeSet<usize>], closed: &[bool], rel: usize, t: &[usize]) -> Result<bool> {
        let covered = t.iter().any(|&e| closed[e] && t.iter().any(|&y| y != e && !adj[e].contains(&y)));
        if covered {
            return Ok(false);
        }
        let pattern = equality_pattern(t);
        if pattern.iter().enumerate().all(|(i, &x)| i == x) {
            return Ok(true);
        }
        self.pattern_possible(rel, pattern)
    }

    fn query(&mut self, f: &Facts) -> Result<Query> {
        let adj = adjacency(f.size, f.present);
        let mut constraints: Vec<Constraint> =
            (0..f.size).map(|i| Constraint::Accept { nfa: self.p.domain.clone(), tracks: vec![i] }).collect();
        let pairs: Vec<(usize, usize)> = (0..f.size).flat_map(|i| (i + 1..f.size).map(move |j| (i, j))).collect();
        if !pairs.is_empty() {
            constraints.push(Constraint::Distinct { pairs });
        }
        for (r, set) in f.present.iter().enumerate() {
            for t in set {
                constraints.push(Constraint::Accept { nfa: self.rels[r].clone(), tracks: t.clone() });
            }
        }
        for (r, set) in f.absent.iter().enumerate() {
            for t in set {
                if self.needs_reject(&adj, f.closed, r, t)? {
                    constraints.push(Constraint::Reject { nfa: self.rels[r].clone(), tracks: t.clone() });
                }
            }
        }
        for e in (0..f.size).filter(|&e| f.closed[e]) {
            if adj[e].len() > 64 {
                return Err(Error::Unsupported(format!("element with {} neighbours", adj[e].len())));
            }
            constraints.push(Constraint::Closed {
                rel: self.gaifman.clone(),
                center: e,
                allowed: adj[e].iter().copied().collect(),
            });
        }
        Ok(Query { tracks: f.size, constraints })
    }

    fn neighbours(&mut self, u: &Word) -> Result<Option<BTreeSet<Word>>> {
        if let Some(n) = self.images.get(u) {
            return Ok(n.clone());
        }
        let img = image(&self.gaifman, u, u.len() + 64)?;
        let n = (!img.truncated).then_some(img.words);
        self.images.insert(u.clone(), n.clone());
        Ok(n)
    }

    /// Whether the words realize the facts.
    fn verify(&mut self, f: &Facts, words: &[Word]) -> Result<bool> {
        if words.iter().any(|w| !self.p.domain.accepts_words(std::slice::from_ref(w))) {
            return Ok(false);
        }
        if words.iter().collect::<HashSet<_>>().len() != words.len() {
            return Ok(false);
        }
        let pick = |t: &Vec<usize>| t.iter().map(|&x| words[x].clone()).collect::<Vec<_>>();
        for (r, set) in f.present.iter().enumerate() {
            if set.iter().any(|t| !self.rels[r].accepts_words(&pick(t))) {
                return Ok(false);
            }
        }
        for (r, set) in f.absent.iter().enumerate() {
            if set.iter().any(|t| self.rels[r].accepts_words(&pick(t))) {
                return Ok(false);
            }
        }
        let adj = adjacency(f.size, f.present);
        for e in (0..f.size).filter(|&e| f.closed[e]) {
            let Some(nb) = self.neighbours(&words[e])? else {
                return Ok(false);
            };
            let allowed: BTreeSet<&Word> = adj[e].iter().map(|&q| &words[q]).collect();
            if nb.iter().any(|v| !allowed.contains(v)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Words for the facts taken from the hint, if they realize them.
    pub(crate) fn reuse(&mut self, f: &Facts, hint: &[Option<Word>]) -> Result<Option<Vec<Word>>> {
        let w = self.complete(f, hint)?;
        if w.is_some() {
            self.stats.witness_reuses += 1;
        }
        Ok(w)
    }

    /// A necessary condition: the facts restricted to the focus elements and
    /// their neighbours are realizable.
    pub(crate) fn check_local(&mut self, f: &Facts, focus: &[usize]) -> Result<bool> {
        let adj = adjacency(f.size, f.present);
        let keep: BTreeSet<usize> = focus.iter().flat_map(|&e| adj[e].iter().copied().chain([e])).collect();
        let keep: Vec<usize> = keep.into_iter().collect();
        let mut map = vec![usize::MAX; f.size];
        for (i, &e) in keep.iter().enumerate() {
            map[e] = i;
        }
        let restrict = |sets: &[BTreeSet<Vec<usize>>]| -> Vec<BTreeSet<Vec<usize>>> {
            sets.iter()
                .map(|set| {
                    set.iter()
                        .filter(|t| t.iter().all(|&x| map[x] != usize::MAX))
                        .map(|t| t.iter().map(|&x| map[x]).collect())
                        .collect()
                })
                .collect()
        };
        let present = restrict(f.present);
        let absent = restrict(f.absent);
        let closed: Vec<bool> =
            keep.iter().map(|&e| f.closed[e] && adj[e].iter().all(|&y| map[y] != usize::MAX)).collect();
        let colors: Vec<u64> = closed.iter().map(|&c| u64::from(c)).collect();
        let both: Vec<BTreeSet<Vec<usize>>> = present.iter().chain(&absent).cloned().collect();
        let key = canonical_key(keep.len(), &colors, &both);
        if let Some(&b) = self.local_memo.get(&key).filter(|_| self.memoize) {
            self.stats.memo_hits += 1;
            return Ok(b);
        }
        let sub = Facts { size: keep.len(), present: &present, absent: &absent, closed: &closed };
        let b = self.check(&sub, None)?.is_some();
        self.local_memo.insert(key, b);
        Ok(b)
    }

    /// The sphere of concrete centre words, using the neighbour cache.
    pub(crate) fn extract(&mut self, centers: &[Word], budget: usize) -> Result<(Sphere, Vec<Word>)> {
        let p = self.p;
        extract_with(p, centers, budget, &mut |u| match self.neighbours(&u.to_vec())? {
            Some(n) => Ok(n.into_iter().collect()),
            None => Err(Error::Resource("neighbourhood exceeds the length cutoff".into())),
        })
    }

    /// Completes a partial witness, giving each missing element a neighbour
    /// word of an adjacent element that already has one.
    fn complete(&mut self, f: &Facts, hint: &[Option<Word>]) -> Result<Option<Vec<Word>>> {
        if hint.len() != f.size {
            return Ok(None);
        }
        let adj = adjacency(f.size, f.present);
        let mut words = hint.to_vec();
        let mut attempts = 0;
        self.assign(f, &adj, &mut words, &mut attempts)
    }

    fn assign(
        &mut self,
        f: &Facts,
        adj: &[BTreeSet<usize>],
        words: &mut Vec<Option<Word>>,
        attempts: &mut usize,
    ) -> Result<Option<Vec<Word>>> {
        let missing = (0..f.size).filter(|&x| words[x].is_none());
        let mut next = None;
        for x in missing {
            match adj[x].iter().find(|&&y| words[y].is_some()) {
                Some(&y) => {
                    next = Some((x, y));
                    break;
                }
                None => next = next.or(Some((x, usize::MAX))),
            }
        }
        let Some((x, y)) = next else {
            *attempts += 1;
            let full: Vec<Word> = words.iter().map(|w| w.clone().unwrap()).collect();
            return Ok(self.verify(f, &full)?.then_some(full));
        };
        if y == usize::MAX {
            return Ok(None);
        }
        let Some(nb) = self.neighbours(words[y].as_ref().unwrap())? else {
            return Ok(None);
        };
        for c in nb {
            if *attempts >= 16 {
                break;
            }
            if words.iter().flatten().any(|w| *w == c) {
                continue;
            }
            words[x] = Some(c);
            if let Some(w) = self.assign(f, adj, words, attempts)? {
                return Ok(Some(w));
            }
        }
        words[x] = None;
        Ok(None)
    }

    /// A realization of the facts, reusing the hint when it extends to one.
    pub(crate) fn check(&mut self, f: &Facts, hint: Option<&[Option<Word>]>) -> Result<Option<Vec<Word>>> {
        if f.size == 0 {
            return Ok(Some(Vec::new()));
        }
        if let Some(h) = hint {
            if let Some(w) = self.reuse(f, h)? {
                return Ok(Some(w));
            }
        }
        let q = self.query(f)?;
        self.stats.queries += 1;
        let (w, s) = find(&q, self.budget)?;
        self.stats.explored_states += s.states;
        Ok(w)
    }

    /// Words realizing the sphere around their centres, if any.
    pub fn realize(&mut self, s: &Sphere) -> Result<Option<Vec<Word>>> {
        self.realize_with(s, None)
    }

    pub(crate) fn realize_with(&mut self, s: &Sphere, hint: Option<&[Option<Word>]>) -> Result<Option<Vec<Word>>> {
        s.check()?;
        if s.relations.len() != self.rels.len() {
            return Err(Error::Dimension("sphere and presentation signatures differ".into()));
        }
        for (r, set) in s.relations.iter().enumerate() {
            if set.iter().any(|t| t.len() != self.p.relations[r].arity) {
                return Err(Error::Dimension("sphere tuple of the wrong arity".into()));
            }
        }
        let key = sphere_key(s);
        if let Some(w) = self.memo.get(&key).filter(|_| self.memoize) {
            self.stats.memo_hits += 1;
            return Ok(w.clone());
        }
        let absent: Vec<BTreeSet<Vec<usize>>> = s
            .relations
            .iter()
            .enumerate()
            .map(|(r, set)| {
                all_tuples(s.size, self.p.relations[r].arity).into_iter().filter(|t| !set.contains(t)).collect()
            })
            .collect();
        let closed = s.interior();
        let facts = Facts { size: s.size, present: &s.relations, absent: &absent, closed: &closed };
        let w = self.check(&facts, hint)?;
        self.memo.insert(key, w.clone());
        Ok(w)
    }
}

/// Whether some tuple of domain words has exactly this sphere.
pub fn realizable(p: &Presentation, s: &Sphere, budget: usize) -> Result<bool> {
    Ok(Realizer::new(p, budget)?.realize(s)?.is_some())
}
