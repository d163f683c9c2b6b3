//! Multi-track nondeterministic automata with cube-guarded transitions.
//!
//! The language of an automaton is the set of well-formed convolutions
//! (end-padded, no all-pad tuple) along which some run reaches a final
//! state. Runs on ill-formed inputs are ignored, so complementation can work
//! on the raw transition structure and still be exact on well-formed words.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Symbol, SymbolSet};
use super::guard::{merge_cubes, Cube};
use super::word::ConvWord;
use crate::error::{Error, Result};

pub type StateId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub guard: Cube,
    pub to: StateId,
}

#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Arc<Alphabet>,
    tracks: usize,
    initial: Vec<StateId>,
    finals: Vec<bool>,
    edges: Vec<Vec<Edge>>,
}

impl Nfa {
    /// An automaton with no states.
    pub fn new(alphabet: Arc<Alphabet>, tracks: usize) -> Self {
        Nfa { alphabet, tracks, initial: Vec::new(), finals: Vec::new(), edges: Vec::new() }
    }

    /// The automaton accepting nothing.
    pub fn empty(alphabet: Arc<Alphabet>, tracks: usize) -> Self {
        let mut a = Nfa::new(alphabet, tracks);
        let s = a.add_state(false);
        a.set_initial(s);
        a
    }

    /// The automaton accepting every well-formed convolution.
    pub fn universal(alphabet: Arc<Alphabet>, tracks: usize) -> Self {
        let mut a = Nfa::new(alphabet.clone(), tracks);
        let s = a.add_state(true);
        a.set_initial(s);
        let g = a.full_cube();
        a.add_edge(s, g, s);
        a
    }

    /// One-track automaton accepting exactly the given words.
    pub fn from_words(alphabet: Arc<Alphabet>, words: &[Vec<Symbol>]) -> Self {
        let mut a = Nfa::new(alphabet, 1);
        let root = a.add_state(false);
        a.set_initial(root);
        let mut trie: FxHashMap<(StateId, Symbol), StateId> = FxHashMap::default();
        for w in words {
            let mut cur = root;
            for &x in w {
                cur = match trie.get(&(cur, x)) {
                    Some(&n) => n,
                    None => {
                        let n = a.add_state(false);
                        a.add_edge(cur, Cube::point(&[x]), n);
                        trie.insert((cur, x), n);
                        n
                    }
                };
            }
            a.finals[cur as usize] = true;
        }
        a
    }

    /// Automaton accepting exactly the given word tuples.
    pub fn from_tuples(alphabet: Arc<Alphabet>, tracks: usize, tuples: &[Vec<Vec<Symbol>>]) -> Result<Self> {
        let pad = alphabet.pad();
        let mut a = Nfa::new(alphabet, tracks);
        let root = a.add_state(false);
        a.set_initial(root);
        let mut trie: FxHashMap<(StateId, Vec<Symbol>), StateId> = FxHashMap::default();
        for t in tuples {
            if t.len() != tracks {
                return Err(Error::Dimension(format!("expected {tracks} words, got {}", t.len())));
            }
            let w = super::word::convolve(t, pad)?;
            let mut cur = root;
            for x in w.tuples() {
                cur = match trie.get(&(cur, x.clone())) {
                    Some(&n) => n,
                    None => {
                        let n = a.add_state(false);
                        a.add_edge(cur, Cube::point(x), n);
                        trie.insert((cur, x.clone()), n);
                        n
                    }
                };
            }
            a.finals[cur as usize] = true;
        }
        Ok(a)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i as StateId)
    }

    pub fn edges(&self, s: StateId) -> &[Edge] {
        &self.edges[s as usize]
    }

    pub fn add_state(&mut self, is_final: bool) -> StateId {
        self.finals.push(is_final);
        self.edges.push(Vec::new());
        (self.finals.len() - 1) as StateId
    }

    pub fn set_final(&mut self, s: StateId, f: bool) {
        self.finals[s as usize] = f;
    }

    pub fn set_initial(&mut self, s: StateId) {
        if !self.initial.contains(&s) {
            self.initial.push(s);
        }
    }

    pub fn add_edge(&mut self, from: StateId, guard: Cube, to: StateId) {
        debug_assert_eq!(guard.tracks(), self.tracks);
        if !guard.is_empty() {
            self.edges[from as usize].push(Edge { guard, to });
        }
    }

    /// The cube allowing every symbol (letters and pad) on every track.
    pub fn full_cube(&self) -> Cube {
        Cube::full(self.tracks, self.alphabet.full_set())
    }

    pub fn pad(&self) -> Symbol {
        self.alphabet.pad()
    }

    /// Raw run on a tuple sequence; well-formedness is not checked.
    pub fn run_raw(&self, tuples: &[Vec<Symbol>]) -> Vec<StateId> {
        let mut cur: Vec<StateId> = self.initial.clone();
        cur.sort_unstable();
        cur.dedup();
        for t in tuples {
            let mut next = Vec::new();
            for &s in &cur {
                for e in &self.edges[s as usize] {
                    if e.guard.contains(t) {
                        next.push(e.to);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    /// Membership of a convolution in the language.
    pub fn accepts(&self, w: &ConvWord) -> bool {
        if w.tracks() != self.tracks || !w.is_well_formed(self.pad()) {
            return false;
        }
        self.run_raw(w.tuples()).iter().any(|&s| self.is_final(s))
    }

    /// Membership of a word tuple.
    pub fn accepts_words(&self, words: &[Vec<Symbol>]) -> bool {
        match super::word::convolve(words, self.pad()) {
            Ok(w) => self.accepts(&w),
            Err(_) => false,
        }
    }

    pub fn same_shape(&self, o: &Nfa) -> Result<()> {
        if self.tracks != o.tracks {
            return Err(Error::Dimension(format!(
                "track counts differ: {} vs {}",
                self.tracks, o.tracks
            )));
        }
        if self.alphabet != o.alphabet {
            return Err(Error::Dimension("alphabets differ".into()));
        }
        Ok(())
    }

    /// Keeps only states that are reachable and can reach a final state.
    pub fn trim(&self) -> Nfa {
        let n = self.num_states();
        let mut fwd = vec![false; n];
        let mut stack: Vec<StateId> = self.initial.clone();
        for &s in &stack {
            fwd[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for e in &self.edges[s as usize] {
                if !fwd[e.to as usize] {
                    fwd[e.to as usize] = true;
                    stack.push(e.to);
                }
            }
        }
        let bwd = self.coreachable();
        let keep: Vec<bool> = (0..n).map(|i| fwd[i] && bwd[i]).collect();
        self.restrict_states(&keep)
    }

    /// States from which some final state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for s in 0..n {
            for e in &self.edges[s] {
                rev[e.to as usize].push(s as StateId);
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<StateId> = self.finals().collect();
        for &s in &stack {
            bwd[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s as usize] {
                if !bwd[p as usize] {
                    bwd[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        bwd
    }

    fn restrict_states(&self, keep: &[bool]) -> Nfa {
        let mut map = vec![u32::MAX; keep.len()];
        let mut out = Nfa::new(self.alphabet.clone(), self.tracks);
        for (i, &k) in keep.iter().enumerate() {
            if k {
                map[i] = out.add_state(self.finals[i]);
            }
        }
        for &s in &self.initial {
            if keep[s as usize] {
                out.set_initial(map[s as usize]);
            }
        }
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                continue;
            }
            for e in &self.edges[i] {
                if keep[e.to as usize] {
                    out.add_edge(map[i], e.guard.clone(), map[e.to as usize]);
                }
            }
        }
        if out.num_states() == 0 {
            return Nfa::empty(self.alphabet.clone(), self.tracks);
        }
        out
    }

    /// Merges parallel edges whose guards differ in one track.
    pub fn compact_edges(&mut self) {
        for list in &mut self.edges {
            let mut by_target: FxHashMap<StateId, Vec<Cube>> = FxHashMap::default();
            let mut order = Vec::new();
            for e in list.drain(..) {
                let v = by_target.entry(e.to).or_insert_with(|| {
                    order.push(e.to);
                    Vec::new()
                });
                if !v.iter().any(|c| e.guard.is_subset(c)) {
                    v.retain(|c| !c.is_subset(&e.guard));
                    v.push(e.guard);
                }
            }
            for t in order {
                for g in merge_cubes(by_target.remove(&t).unwrap()) {
                    list.push(Edge { guard: g, to: t });
                }
            }
        }
    }

    /// Trims, then merges forward-bisimilar states. The language is
    /// unchanged; the result is often much smaller after products.
    pub fn reduce(&self) -> Nfa {
        let mut a = self.trim();
        a.compact_edges();
        let n = a.num_states();
        if n <= 1 {
            return a;
        }
        let mut block: Vec<u32> = a.finals.iter().map(|&f| f as u32).collect();
        let mut nblocks = block.iter().collect::<FxHashSet<_>>().len();
        loop {
            let mut sig_ids: FxHashMap<(u32, Vec<(Cube, u32)>), u32> = FxHashMap::default();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let mut sig: Vec<(Cube, u32)> = a.edges[s]
                    .iter()
                    .map(|e| (e.guard.clone(), block[e.to as usize]))
                    .collect();
                sig.sort();
                sig.dedup();
                let len = sig_ids.len() as u32;
                next[s] = *sig_ids.entry((block[s], sig)).or_insert(len);
            }
            let count = sig_ids.len();
            block = next;
            if count == nblocks {
                break;
            }
            nblocks = count;
        }
        let mut out = Nfa::new(a.alphabet.clone(), a.tracks);
        for _ in 0..nblocks {
            out.add_state(false);
        }
        let mut seen = vec![false; nblocks];
        for s in 0..n {
            let b = block[s];
            if a.finals[s] {
                out.finals[b as usize] = true;
            }
            if !seen[b as usize] {
                seen[b as usize] = true;
                for e in &a.edges[s] {
                    out.add_edge(b, e.guard.clone(), block[e.to as usize]);
                }
            }
        }
        for &s in &a.initial {
            out.set_initial(block[s as usize]);
        }
        out.compact_edges();
        out
    }

    /// Disjoint union of the state spaces; the languages are united.
    pub fn union(&self, o: &Nfa) -> Result<Nfa> {
        self.same_shape(o)?;
        let mut out = self.clone();
        let off = out.num_states() as StateId;
        for s in 0..o.num_states() {
            out.add_state(o.finals[s]);
        }
        for s in 0..o.num_states() {
            for e in &o.edges[s] {
                out.add_edge(s as StateId + off, e.guard.clone(), e.to + off);
            }
        }
        for &s in &o.initial {
            out.set_initial(s + off);
        }
        Ok(out)
    }

    /// Breadth-first search for the states reachable from the initial ones.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut q: VecDeque<StateId> = VecDeque::new();
        for &s in &self.initial {
            if !seen[s as usize] {
                seen[s as usize] = true;
                q.push_back(s);
            }
        }
        while let Some(s) = q.pop_front() {
            for e in &self.edges[s as usize] {
                if !seen[e.to as usize] {
                    seen[e.to as usize] = true;
                    q.push_back(e.to);
                }
            }
        }
        seen
    }

    /// Moves input track `t` to output track `target[t]`. Input tracks sent
    /// to the same output track must carry the same word, so their guards
    /// are intersected. Every output track must receive some input track.
    pub fn rearrange(&self, target: &[usize], out_tracks: usize) -> Result<Nfa> {
        if target.len() != self.tracks || target.iter().any(|&t| t >= out_tracks) {
            return Err(Error::Dimension("invalid track rearrangement".into()));
        }
        let full = self.alphabet.full_set();
        let mut out = Nfa::new(self.alphabet.clone(), out_tracks);
        for s in 0..self.num_states() {
            out.add_state(self.finals[s]);
        }
        for &s in &self.initial {
            out.set_initial(s);
        }
        let covered: Vec<bool> = (0..out_tracks).map(|o| target.contains(&o)).collect();
        if covered.iter().any(|c| !c) {
            return Err(Error::Dimension("rearrangement leaves an output track unused".into()));
        }
        for s in 0..self.num_states() {
            for e in &self.edges[s] {
                let mut sets = vec![full; out_tracks];
                for (t, &o) in target.iter().enumerate() {
                    sets[o] = sets[o].and(e.guard.track(t));
                }
                out.add_edge(s as StateId, Cube(sets), e.to);
            }
        }
        Ok(out)
    }

    /// Adds new unconstrained tracks. Output track `positions[i]` carries
    /// input track `i`; the remaining output tracks may hold any word, of
    /// any length.
    pub fn cylindrify(&self, positions: &[usize], out_tracks: usize) -> Result<Nfa> {
        if positions.len() != self.tracks || positions.iter().any(|&p| p >= out_tracks) {
            return Err(Error::Dimension("invalid cylindrification".into()));
        }
        let mut seen = vec![false; out_tracks];
        for &p in positions {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Dimension("duplicate track in cylindrification".into()));
            }
        }
        let full = self.alphabet.full_set();
        let pad = self.alphabet.pad_set();
        let mut out = Nfa::new(self.alphabet.clone(), out_tracks);
        for s in 0..self.num_states() {
            out.add_state(self.finals[s]);
        }
        for &s in &self.initial {
            out.set_initial(s);
        }
        if out_tracks == self.tracks {
            for s in 0..self.num_states() {
                for e in &self.edges[s] {
                    let mut sets = vec![full; out_tracks];
                    for (i, &p) in positions.iter().enumerate() {
                        sets[p] = *e.guard.track(i);
                    }
                    out.add_edge(s as StateId, Cube(sets), e.to);
                }
            }
            return Ok(out);
        }
        // Positions where every old track is padding belong to the tail
        // state; inside the original run those letters are excluded.
        let all_pad_old = {
            let mut sets = vec![full; out_tracks];
            for &p in positions {
                sets[p] = pad;
            }
            Cube(sets)
        };
        for s in 0..self.num_states() {
            for e in &self.edges[s] {
                let mut sets = vec![full; out_tracks];
                for (i, &p) in positions.iter().enumerate() {
                    sets[p] = *e.guard.track(i);
                }
                for c in Cube(sets).difference(&all_pad_old) {
                    out.add_edge(s as StateId, c, e.to);
                }
            }
        }
        let tail = out.add_state(true);
        out.add_edge(tail, all_pad_old.clone(), tail);
        for s in 0..self.num_states() {
            if self.finals[s] {
                out.add_edge(s as StateId, all_pad_old.clone(), tail);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> AutomatonJson {
        let a = &self.alphabet;
        let entry = |set: &SymbolSet| -> TrackEntry {
            let names: Vec<String> = set.iter().map(|x| a.name(x).to_string()).collect();
            if names.len() == 1 {
                TrackEntry::One(names.into_iter().next().unwrap())
            } else {
                TrackEntry::Many(names)
            }
        };
        let mut transitions = Vec::new();
        for s in 0..self.num_states() {
            for e in &self.edges[s] {
                transitions.push((s as u32, e.guard.0.iter().map(entry).collect(), e.to));
            }
        }
        AutomatonJson {
            tracks: self.tracks,
            alphabet: a.letters().to_vec(),
            pad: a.pad_name().to_string(),
            states: self.num_states(),
            initial: self.initial.clone(),
            finals: self.finals().collect(),
            transitions,
        }
    }

    /// Builds an automaton from its JSON form, reusing `alphabet` when the
    /// declared letters and pad coincide with it.
    pub fn from_json(j: &AutomatonJson, alphabet: Option<&Arc<Alphabet>>) -> Result<Nfa> {
        let a = match alphabet {
            Some(a) if a.letters() == j.alphabet.as_slice() && a.pad_name() == j.pad => a.clone(),
            Some(_) => {
                return Err(Error::Alphabet(
                    "automaton alphabet differs from the presentation alphabet".into(),
                ))
            }
            None => Alphabet::new(j.alphabet.iter().cloned(), j.pad.clone())?,
        };
        if j.tracks == 0 {
            return Err(Error::Dimension("automata need at least one track".into()));
        }
        let mut out = Nfa::new(a.clone(), j.tracks);
        for _ in 0..j.states {
            out.add_state(false);
        }
        let check = |s: u32| -> Result<StateId> {
            if (s as usize) < j.states {
                Ok(s)
            } else {
                Err(Error::Malformed(format!("state {s} out of range (0..{})", j.states)))
            }
        };
        for &s in &j.initial {
            out.set_initial(check(s)?);
        }
        for &s in &j.finals {
            out.finals[check(s)? as usize] = true;
        }
        for (src, letters, dst) in &j.transitions {
            if letters.len() != j.tracks {
                return Err(Error::Malformed(format!(
                    "transition {src}->{dst} has {} entries, expected {}",
                    letters.len(),
                    j.tracks
                )));
            }
            let mut sets = Vec::with_capacity(j.tracks);
            for l in letters {
                let set = match l {
                    TrackEntry::One(x) => SymbolSet::single(a.symbol(x)?),
                    TrackEntry::Many(xs) => {
                        xs.iter().map(|x| a.symbol(x)).collect::<Result<SymbolSet>>()?
                    }
                };
                sets.push(set);
            }
            let (s, d) = (check(*src)?, check(*dst)?);
            out.add_edge(s, Cube(sets), d);
        }
        if out.num_states() == 0 {
            return Ok(Nfa::empty(a, j.tracks));
        }
        Ok(out)
    }
}

/// One track entry of a JSON transition: a single letter or, as a compact
/// extension, a list of letters standing for all of them.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum TrackEntry {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AutomatonJson {
    pub tracks: usize,
    pub alphabet: Vec<String>,
    pub pad: String,
    pub states: usize,
    pub initial: Vec<u32>,
    pub finals: Vec<u32>,
    pub transitions: Vec<(u32, Vec<TrackEntry>, u32)>,
}

impl FromIterator<SymbolSet> for Cube {
    fn from_iter<T: IntoIterator<Item = SymbolSet>>(iter: T) -> Self {
        Cube(iter.into_iter().collect())
    }
}
