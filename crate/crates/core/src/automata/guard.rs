//! Cube guards: one symbol set per track.

use std::fmt;

use super::alphabet::{Symbol, SymbolSet};

/// A product of per-track symbol sets. A transition labelled with a cube
/// fires on every letter tuple whose i-th entry lies in the i-th set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube(pub Vec<SymbolSet>);

impl Cube {
    pub fn new(sets: Vec<SymbolSet>) -> Self {
        Cube(sets)
    }

    pub fn full(tracks: usize, all: SymbolSet) -> Self {
        Cube(vec![all; tracks])
    }

    /// The cube holding exactly one letter tuple.
    pub fn point(tuple: &[Symbol]) -> Self {
        Cube(tuple.iter().map(|&s| SymbolSet::single(s)).collect())
    }

    pub fn tracks(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().any(SymbolSet::is_empty)
    }

    pub fn track(&self, i: usize) -> &SymbolSet {
        &self.0[i]
    }

    pub fn contains(&self, tuple: &[Symbol]) -> bool {
        self.0.iter().zip(tuple).all(|(s, &x)| s.contains(x))
    }

    pub fn intersect(&self, o: &Cube) -> Cube {
        Cube(self.0.iter().zip(&o.0).map(|(a, b)| a.and(b)).collect())
    }

    /// Intersection, or `None` when it is empty.
    pub fn meet(&self, o: &Cube) -> Option<Cube> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            let c = a.and(b);
            if c.is_empty() {
                return None;
            }
            out.push(c);
        }
        Some(Cube(out))
    }

    pub fn is_subset(&self, o: &Cube) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a.is_subset(b))
    }

    /// `self \ o` as a list of pairwise disjoint cubes (at most one per track).
    pub fn difference(&self, o: &Cube) -> Vec<Cube> {
        if self.meet(o).is_none() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut prefix = self.0.clone();
        for i in 0..self.0.len() {
            let outside = self.0[i].minus(&o.0[i]);
            if !outside.is_empty() {
                let mut c = prefix.clone();
                c[i] = outside;
                out.push(Cube(c));
            }
            prefix[i] = self.0[i].and(&o.0[i]);
        }
        out
    }

    /// The lexicographically least tuple (track 0 most significant).
    pub fn min_tuple(&self) -> Option<Vec<Symbol>> {
        self.0.iter().map(SymbolSet::first).collect()
    }

    /// Keeps only the listed tracks, in the listed order.
    pub fn select(&self, tracks: &[usize]) -> Cube {
        Cube(tracks.iter().map(|&t| self.0[t]).collect())
    }

    /// Number of letter tuples covered.
    pub fn size(&self) -> u128 {
        self.0.iter().map(|s| s.len() as u128).product()
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Splits the letter space covered by `universe` into disjoint cubes such
/// that each piece lies entirely inside or entirely outside every input
/// guard. Returns each piece together with the indices of the guards that
/// contain it. Pieces covered by no guard are dropped.
pub fn refine(universe: &Cube, guards: &[&Cube]) -> Vec<(Cube, Vec<usize>)> {
    let mut pieces = refine_all(universe, guards);
    pieces.retain(|(_, m)| !m.is_empty());
    pieces
}

/// Like [`refine`], but also returns the pieces covered by no guard.
pub fn refine_all(universe: &Cube, guards: &[&Cube]) -> Vec<(Cube, Vec<usize>)> {
    let mut pieces: Vec<(Cube, Vec<usize>)> = vec![(universe.clone(), Vec::new())];
    for (gi, g) in guards.iter().enumerate() {
        let mut next = Vec::with_capacity(pieces.len() + 4);
        for (p, members) in pieces {
            match p.meet(g) {
                None => next.push((p, members)),
                Some(inside) => {
                    for rest in p.difference(g) {
                        next.push((rest, members.clone()));
                    }
                    let mut m = members;
                    m.push(gi);
                    next.push((inside, m));
                }
            }
        }
        pieces = next;
    }
    pieces
}

/// Merges cubes that differ in exactly one track, repeatedly, until no
/// two cubes can be joined that way.
pub fn merge_cubes(mut cubes: Vec<Cube>) -> Vec<Cube> {
    if cubes.len() < 2 {
        return cubes;
    }
    let tracks = cubes[0].tracks();
    loop {
        let before = cubes.len();
        for t in 0..tracks {
            let mut groups: std::collections::HashMap<Vec<super::alphabet::SymbolSet>, usize> =
                std::collections::HashMap::new();
            let mut out: Vec<Cube> = Vec::with_capacity(cubes.len());
            for c in cubes {
                let mut key = c.0.clone();
                key[t] = super::alphabet::SymbolSet::EMPTY;
                match groups.get(&key) {
                    Some(&i) => {
                        let merged = out[i].0[t].or(&c.0[t]);
                        out[i].0[t] = merged;
                    }
                    None => {
                        groups.insert(key, out.len());
                        out.push(c);
                    }
                }
            }
            cubes = out;
        }
        if cubes.len() == before {
            return cubes;
        }
    }
}
