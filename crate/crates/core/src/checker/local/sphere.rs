//! Finite structures with marked centres, the abstract shapes of
//! neighbourhoods of element tuples.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::Symbol;
use crate::error::{Error, Result};
use crate::presentation::{neighbors, Presentation};

/// A structure on elements `0..size` with centres `b_1 … b_k`, where every
/// element lies within distance `2^(budget − i)` of centre `b_i` for some
/// `i`. Relations are listed in the order of the presentation's signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sphere {
    pub budget: usize,
    pub size: usize,
    pub centers: Vec<usize>,
    pub relations: Vec<BTreeSet<Vec<usize>>>,
}

/// Radius around the centre with 0-based index `i` under budget `n`.
pub fn radius(n: usize, i: usize) -> usize {
    1usize << (n - i - 1)
}

impl Sphere {
    /// The sphere with no centres and no elements.
    pub fn empty(budget: usize, relations: usize) -> Sphere {
        Sphere { budget, size: 0, centers: Vec::new(), relations: vec![BTreeSet::new(); relations] }
    }

    pub fn radius(&self, i: usize) -> usize {
        radius(self.budget, i)
    }

    pub fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        adjacency(self.size, &self.relations)
    }

    /// Distances from `from`, `usize::MAX` for unreachable elements.
    pub fn distances(&self, from: usize) -> Vec<usize> {
        distances(&self.adjacency(), from)
    }

    /// Elements strictly inside some centre's radius; their neighbourhoods
    /// lie entirely within the sphere.
    pub fn interior(&self) -> Vec<bool> {
        let adj = self.adjacency();
        let mut out = vec![false; self.size];
        for (i, &b) in self.centers.iter().enumerate() {
            let d = distances(&adj, b);
            for v in 0..self.size {
                if d[v] < self.radius(i) {
                    out[v] = true;
                }
            }
        }
        out
    }

    /// Checks index bounds and the covering condition.
    pub fn check(&self) -> Result<()> {
        if self.centers.len() > self.budget {
            return Err(Error::Malformed(format!(
                "{} centres exceed the budget {}",
                self.centers.len(),
                self.budget
            )));
        }
        if self.centers.iter().any(|&c| c >= self.size)
            || self.relations.iter().flatten().flatten().any(|&x| x >= self.size)
        {
            return Err(Error::Malformed("sphere refers to a missing element".into()));
        }
        let adj = self.adjacency();
        let mut covered = vec![false; self.size];
        for (i, &b) in self.centers.iter().enumerate() {
            for (v, d) in distances(&adj, b).into_iter().enumerate() {
                if d <= self.radius(i) {
                    covered[v] = true;
                }
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::Malformed(format!("element {v} is outside every centre's radius")));
        }
        Ok(())
    }

    /// The maximal number of neighbours of an element.
    pub fn degree(&self) -> usize {
        self.adjacency().iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// The sub-sphere around the first `k` centres with their radii,
    /// renumbered in increasing element order.
    pub fn restrict(&self, k: usize) -> Sphere {
        let adj = self.adjacency();
        let mut keep = vec![false; self.size];
        for (i, &b) in self.centers.iter().enumerate().take(k) {
            for (v, d) in distances(&adj, b).into_iter().enumerate() {
                if d <= self.radius(i) {
                    keep[v] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; self.size];
        let mut size = 0;
        for v in 0..self.size {
            if keep[v] {
                map[v] = size;
                size += 1;
            }
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|t| t.iter().all(|&x| keep[x]))
                    .map(|t| t.iter().map(|&x| map[x]).collect())
                    .collect()
            })
            .collect();
        Sphere { budget: self.budget, size, centers: self.centers[..k].iter().map(|&c| map[c]).collect(), relations }
    }

    /// Whether the centres with the given 0-based indices satisfy the atom.
    pub fn holds(&self, rel: usize, centers: &[usize]) -> bool {
        let t: Vec<usize> = centers.iter().map(|&i| self.centers[i]).collect();
        self.relations[rel].contains(&t)
    }
}

pub(crate) fn adjacency(size: usize, relations: &[BTreeSet<Vec<usize>>]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); size];
    for t in relations.iter().flatten() {
        for &x in t {
            for &y in t {
                if x != y {
                    adj[x].insert(y);
                }
            }
        }
    }
    adj
}

pub(crate) fn distances(adj: &[BTreeSet<usize>], from: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[from] = 0;
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if d[w] == usize::MAX {
                d[w] = d[v] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

/// All tuples of the given arity over `0..size`.
pub(crate) fn all_tuples(size: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..size).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// The sphere of a tuple of domain words: the union of the balls of radius
/// `2^(budget − i)` around the `i`-th word, with the induced relations.
/// Elements are numbered in breadth-first discovery order; the words are
/// returned alongside.
pub fn extract_sphere(p: &Presentation, centers: &[Vec<Symbol>], budget: usize) -> Result<(Sphere, Vec<Vec<Symbol>>)> {
    let mut cache: HashMap<Vec<Symbol>, Vec<Vec<Symbol>>> = HashMap::new();
    extract_with(p, centers, budget, &mut |u| {
        if let Some(n) = cache.get(u) {
            return Ok(n.clone());
        }
        let n: Vec<Vec<Symbol>> = neighbors(p, u, u.len() + 64)?.into_iter().collect();
        cache.insert(u.to_vec(), n.clone());
        Ok(n)
    })
}

pub(crate) fn extract_with(
    p: &Presentation,
    centers: &[Vec<Symbol>],
    budget: usize,
    nb: &mut dyn FnMut(&[Symbol]) -> Result<Vec<Vec<Symbol>>>,
) -> Result<(Sphere, Vec<Vec<Symbol>>)> {
    if centers.len() > budget {
        return Err(Error::Usage(format!("{} centres exceed the budget {budget}", centers.len())));
    }
    let mut words: Vec<Vec<Symbol>> = Vec::new();
    let mut index: HashMap<Vec<Symbol>, usize> = HashMap::new();
    let mut intern = |w: &Vec<Symbol>, words: &mut Vec<Vec<Symbol>>| {
        *index.entry(w.clone()).or_insert_with(|| {
            words.push(w.clone());
            words.len() - 1
        })
    };
    let mut center_ids = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        if !p.domain.accepts_words(std::slice::from_ref(c)) {
            return Err(Error::Domain(p.alphabet.render_word(c)));
        }
        center_ids.push(intern(c, &mut words));
        let mut seen = BTreeSet::from([c.clone()]);
        let mut frontier = vec![c.clone()];
        for _ in 0..radius(budget, i) {
            let mut next = Vec::new();
            for u in &frontier {
                for v in nb(u)? {
                    if seen.insert(v.clone()) {
                        intern(&v, &mut words);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
    }
    let size = words.len();
    let relations = p
        .relations
        .values()
        .map(|r| {
            all_tuples(size, r.arity)
                .into_iter()
                .filter(|t| {
                    let ws: Vec<Vec<Symbol>> = t.iter().map(|&x| words[x].clone()).collect();
                    r.nfa.accepts_words(&ws)
                })
                .collect()
        })
        .collect();
    Ok((Sphere { budget, size, centers: center_ids, relations }, words))
}
