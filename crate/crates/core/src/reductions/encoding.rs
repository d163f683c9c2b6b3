//! Alphabet and shared automata of the machine reductions.
//!
//! The universe holds plain words over `Π` together with pairs of words
//! over `Δ ⊆ Π`. A pair is flattened into a single word over letters
//! `[x,y]` (with `.` for the padding of the shorter component), so every
//! relation of the reductions is an ordinary two-track automaton.

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;

use super::machine::{Cell, TuringMachine};
use super::regex::{alt, cat, compile, star, sym, Re};
use crate::automata::ops::product;
use crate::automata::{Alphabet, Cube, Nfa, StateId, Symbol, SymbolSet};
use crate::error::{Error, Result};
use crate::presentation::{Presentation, Relation};

pub(crate) const HASH: &str = "#";
pub(crate) const MARK: &str = ">";
pub(crate) const BITS: [&str; 2] = ["0", "1"];
/// `MARKED[b][over]`: bit `b` underlined (`over = 0`) or overlined.
pub(crate) const MARKED: [[&str; 2]; 2] = [["0_", "0^"], ["1_", "1^"]];
const PAD: &str = "_";
const PAIR_PAD: &str = ".";

pub(crate) struct Encoding {
    pub tm: TuringMachine,
    pub alphabet: Arc<Alphabet>,
    /// Letter of each configuration symbol.
    pub omega: Vec<Symbol>,
    pub hash: Symbol,
    pub mark: Symbol,
    pub bits: Option<[Symbol; 2]>,
    pub marked: Option<[[Symbol; 2]; 2]>,
    /// `Δ`: configuration symbols, `#`, and bits when present.
    pub delta: Vec<Symbol>,
    /// `Π`: every non-pair letter.
    pub pi: Vec<Symbol>,
    /// `pairs[(i, j)]` for positions in `delta`, `None` meaning padding.
    pairs: HashMap<(Option<usize>, Option<usize>), Symbol>,
    delta_pos: HashMap<Symbol, usize>,
}

pub(crate) fn identifier(name: &str) -> bool {
    let mut cs = name.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Encoding {
    pub fn new(tm: &TuringMachine, counters: bool) -> Result<Self> {
        tm.validate()?;
        let mut reserved = vec![HASH, MARK, PAD, PAIR_PAD];
        if counters {
            reserved.extend(BITS);
            reserved.extend(MARKED.iter().flatten());
        }
        for c in 0..tm.omega() {
            let n = tm.name(c);
            if reserved.contains(&n) || n.contains(['[', ']', ',']) || n.chars().any(char::is_whitespace) {
                return Err(Error::Malformed(format!("machine symbol {n:?} clashes with the reduction alphabet")));
            }
        }
        let mut names: Vec<String> = (0..tm.omega()).map(|c| tm.name(c).to_string()).collect();
        names.push(HASH.into());
        if counters {
            names.extend(BITS.iter().map(|s| s.to_string()));
        }
        let delta_names = names.clone();
        if counters {
            names.extend(MARKED.iter().flatten().map(|s| s.to_string()));
        }
        names.push(MARK.into());
        let pi_len = names.len();
        let comp = |i: Option<usize>| i.map_or(PAIR_PAD, |i| delta_names[i].as_str());
        let mut pair_keys = Vec::new();
        for i in (0..delta_names.len()).map(Some).chain([None]) {
            for j in (0..delta_names.len()).map(Some).chain([None]) {
                if i.is_some() || j.is_some() {
                    pair_keys.push((i, j));
                    names.push(format!("[{},{}]", comp(i), comp(j)));
                }
            }
        }
        let alphabet = Alphabet::new(names, PAD)?;
        let sym = |n: &str| alphabet.letter(n).unwrap();
        let pairs = pair_keys.into_iter().enumerate().map(|(k, key)| (key, (pi_len + k) as Symbol)).collect();
        let delta: Vec<Symbol> = (0..delta_names.len() as Symbol).collect();
        let delta_pos = delta.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Encoding {
            tm: tm.clone(),
            omega: (0..tm.omega() as Symbol).collect(),
            hash: sym(HASH),
            mark: sym(MARK),
            bits: counters.then(|| [sym(BITS[0]), sym(BITS[1])]),
            marked: counters.then(|| MARKED.map(|r| r.map(sym))),
            delta,
            pi: (0..pi_len as Symbol).collect(),
            pairs,
            delta_pos,
            alphabet,
        })
    }

    pub fn set(&self, syms: impl IntoIterator<Item = Symbol>) -> SymbolSet {
        syms.into_iter().collect()
    }

    pub fn omega_set(&self) -> SymbolSet {
        self.set(self.omega.iter().copied())
    }

    pub fn delta_set(&self) -> SymbolSet {
        self.set(self.delta.iter().copied())
    }

    pub fn cells(&self, cells: &[Cell]) -> SymbolSet {
        self.set(cells.iter().map(|&c| self.omega[c]))
    }

    pub fn states(&self) -> SymbolSet {
        self.cells(&(0..self.tm.states.len()).collect::<Vec<_>>())
    }

    pub fn tape(&self) -> SymbolSet {
        self.cells(&self.tm.tape_letters())
    }

    pub fn input(&self) -> SymbolSet {
        self.cells(&self.tm.input_letters())
    }

    pub fn bit_set(&self) -> SymbolSet {
        self.set(self.bits.expect("counters").iter().copied())
    }

    /// The pair letter `[x,y]` for `x, y ∈ Δ`, or padding when `None`.
    pub fn pair(&self, x: Option<Symbol>, y: Option<Symbol>) -> Symbol {
        self.pairs[&(x.map(|s| self.delta_pos[&s]), y.map(|s| self.delta_pos[&s]))]
    }

    /// Pair letters `[x,y]` with `x ∈ xs` and `y ∈ ys` (no padding).
    pub fn pairs_of(&self, xs: SymbolSet, ys: SymbolSet) -> SymbolSet {
        let mut out = SymbolSet::EMPTY;
        for x in xs.iter() {
            for y in ys.iter() {
                out.insert(self.pair(Some(x), Some(y)));
            }
        }
        out
    }

    pub fn compile(&self, tracks: usize, r: &Re) -> Nfa {
        compile(&self.alphabet, tracks, r)
    }

    /// `{(x, x) | x ∈ letters}` as an alternative of two-track letters.
    pub fn copy(&self, letters: SymbolSet) -> Re {
        alt(letters.iter().map(|x| sym(Cube(vec![SymbolSet::single(x), SymbolSet::single(x)]))))
    }

    pub fn one(&self, set: SymbolSet) -> Re {
        sym(Cube(vec![set]))
    }

    pub fn two(&self, a: SymbolSet, b: SymbolSet) -> Re {
        sym(Cube(vec![a, b]))
    }

    /// `Π* ∪ (Δ* ⊗ Δ*)`.
    pub fn domain(&self) -> Nfa {
        let pi = self.one(self.set(self.pi.iter().copied()));
        let d = self.delta_set();
        let both = self.one(self.pairs_of(d, d));
        let left = self.one(self.set(d.iter().map(|x| self.pair(Some(x), None))));
        let right = self.one(self.set(d.iter().map(|y| self.pair(None, Some(y)))));
        let pairs = cat([star(both), alt([star(left), star(right)])]);
        self.compile(1, &alt([star(pi), pairs]))
    }

    /// A `tracks`-track automaton running the one-track `a` on track `t`,
    /// where a letter `ℓ` on track `t` stands for the letters of `a` in
    /// `map(ℓ)`'s preimage and letters in `skip` are passed over.
    pub fn lift(&self, a: &Nfa, tracks: usize, t: usize, preimage: &dyn Fn(SymbolSet) -> SymbolSet, skip: SymbolSet) -> Nfa {
        let full = self.alphabet.full_set();
        let mut out = Nfa::new(self.alphabet.clone(), tracks);
        for s in 0..a.num_states() as StateId {
            out.add_state(a.is_final(s));
        }
        for &s in a.initial() {
            out.set_initial(s);
        }
        for s in 0..a.num_states() as StateId {
            for e in a.edges(s) {
                let mut sets = vec![full; tracks];
                sets[t] = preimage(*e.guard.track(0));
                out.add_edge(s, Cube(sets), e.to);
            }
            if !skip.is_empty() {
                let mut sets = vec![full; tracks];
                sets[t] = skip;
                out.add_edge(s, Cube(sets), s);
            }
        }
        out
    }

    /// `{(w, w ⊗ w) | w ∈ lang}`.
    pub fn duplicate(&self, lang: &Nfa) -> Result<Nfa> {
        let d = self.delta_set();
        let r = star(alt(d.iter().map(|x| {
            self.two(SymbolSet::single(x), SymbolSet::single(self.pair(Some(x), Some(x))))
        })));
        let base = self.compile(2, &r);
        Ok(product(&base, &lang.cylindrify(&[0], 2)?)?.reduce())
    }

    /// `{(p v, p ▷ v) | v ∈ Δ*, p v ∈ lang}` for a fixed prefix `p`.
    pub fn insert_after(&self, prefix: &[Symbol], lang: &Nfa) -> Result<Nfa> {
        let pad = self.alphabet.pad();
        let mut a = Nfa::new(self.alphabet.clone(), 2);
        let mut cur = a.add_state(false);
        a.set_initial(cur);
        for &x in prefix {
            let next = a.add_state(false);
            a.add_edge(cur, Cube::point(&[x, x]), next);
            cur = next;
        }
        let end = a.add_state(true);
        let pend: HashMap<Symbol, StateId> = self.delta.iter().map(|&x| (x, a.add_state(false))).collect();
        a.add_edge(cur, Cube::point(&[pad, self.mark]), end);
        for &x in &self.delta {
            a.add_edge(cur, Cube::point(&[x, self.mark]), pend[&x]);
            for &y in &self.delta {
                a.add_edge(pend[&x], Cube::point(&[y, x]), pend[&y]);
            }
            a.add_edge(pend[&x], Cube::point(&[pad, x]), end);
        }
        let check = self.lift(lang, 2, 0, &|s| s, SymbolSet::single(pad));
        Ok(product(&a, &check)?.reduce())
    }

    /// `{(u ▷ a v, u a ▷ v) | a ∈ letters, u, v ∈ Δ*, |u| ≥ min_u, u a v ∈ lang}`.
    pub fn advance(&self, letters: SymbolSet, min_u: usize, lang: &Nfa) -> Result<Nfa> {
        let copy = self.copy(self.delta_set());
        let mark = SymbolSet::single(self.mark);
        let step = alt(letters.iter().map(|a| {
            let a = SymbolSet::single(a);
            cat([self.two(mark, a), self.two(a, mark)])
        }));
        let mut parts: Vec<Re> = vec![copy.clone(); min_u];
        parts.extend([star(copy.clone()), step, star(copy)]);
        let base = self.compile(2, &cat(parts));
        let check = self.lift(lang, 2, 1, &|s| s, mark);
        Ok(product(&base, &check)?.reduce())
    }

    /// Pair letters whose second component lies in `g` and whose first
    /// component is any letter of `Δ`.
    pub fn second_in(&self, g: SymbolSet) -> SymbolSet {
        self.pairs_of(self.delta_set(), g.and(&self.delta_set()))
    }

    /// Relation name for a per-letter family, e.g. `iota_a`.
    pub fn family(&self, base: &str, c: Cell) -> String {
        let n = self.tm.name(c);
        if identifier(n) {
            format!("{base}_{n}")
        } else {
            format!("{base}_{c}")
        }
    }

    pub fn presentation(&self, relations: Vec<(String, Nfa)>) -> Result<Presentation> {
        let rels: IndexMap<String, Relation> = relations
            .into_iter()
            .map(|(n, a)| (n, Relation { arity: a.tracks(), nfa: Arc::new(a) }))
            .collect();
        Presentation::new(self.alphabet.clone(), self.domain(), None, rels)
    }
}
