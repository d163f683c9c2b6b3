//! Sphere sizes and the growth function.
//!
//! The size of the largest radius-`n` sphere is computed from a minimal
//! deterministic automaton for the relation "distance at most `n`": for each
//! prefix of the centre word `u` the search keeps, per automaton state, the
//! number of partial right-hand words leading there. Completing `u` and
//! counting the ways to finish those partial words gives `|S(n, u)|`, and
//! the largest such count over all reachable count vectors is `g(n)`.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::degree::{fan_witness, max_degree, DegreeResult, DEFAULT_DEGREE_CAP};
use super::gaifman::gaifman_automaton;
use super::model::Presentation;
use crate::automata::guard::{merge_cubes, Cube};
use crate::automata::ops::{compose, identity_on};
use crate::automata::{Alphabet, Nfa, Symbol};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// A deterministic automaton over explicitly enumerated letter tuples.
#[derive(Clone, Debug)]
pub struct LetterDfa {
    pub letters: Vec<Vec<Symbol>>,
    pub next: Vec<Vec<u32>>,
    pub finals: Vec<bool>,
    pub initial: u32,
}

fn all_letters(alphabet: &Alphabet, tracks: usize) -> Vec<Vec<Symbol>> {
    let syms: Vec<Symbol> = alphabet.full_set().iter().collect();
    let mut out: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..tracks {
        out = out
            .into_iter()
            .flat_map(|p| {
                syms.iter().map(move |&s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    let pad = alphabet.pad();
    out.retain(|t| t.iter().any(|&x| x != pad));
    out
}

impl LetterDfa {
    /// Subset construction over explicit letters.
    pub fn determinize(a: &Nfa, budget: usize) -> Result<LetterDfa> {
        let letters = all_letters(a.alphabet(), a.tracks());
        if letters.len() > 1 << 16 {
            return Err(Error::Resource(format!("{} letter tuples are too many to enumerate", letters.len())));
        }
        let mut ids: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
        let mut sets: Vec<Vec<u32>> = Vec::new();
        let mut next: Vec<Vec<u32>> = Vec::new();
        let mut start: Vec<u32> = a.initial().to_vec();
        start.sort_unstable();
        start.dedup();
        ids.insert(start.clone(), 0);
        sets.push(start);
        let mut i = 0;
        while i < sets.len() {
            let cur = sets[i].clone();
            let mut row = Vec::with_capacity(letters.len());
            for l in &letters {
                let mut t: Vec<u32> = Vec::new();
                for &s in &cur {
                    for e in a.edges(s) {
                        if e.guard.contains(l) {
                            t.push(e.to);
                        }
                    }
                }
                t.sort_unstable();
                t.dedup();
                if t.is_empty() {
                    row.push(NONE);
                    continue;
                }
                let id = match ids.get(&t) {
                    Some(&x) => x,
                    None => {
                        if sets.len() >= budget {
                            return Err(Error::Resource(format!("determinization exceeded {budget} states")));
                        }
                        let x = sets.len() as u32;
                        ids.insert(t.clone(), x);
                        sets.push(t);
                        x
                    }
                };
                row.push(id);
            }
            next.push(row);
            i += 1;
        }
        let finals = sets.iter().map(|s| s.iter().any(|&x| a.is_final(x))).collect();
        Ok(LetterDfa { letters, next, finals, initial: 0 })
    }

    fn num_states(&self) -> usize {
        self.finals.len()
    }

    /// Removes states that cannot reach a final state, then merges
    /// equivalent states.
    pub fn minimize(&self) -> LetterDfa {
        let n = self.num_states();
        let mut alive = self.finals.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if !alive[s] && self.next[s].iter().any(|&t| t != NONE && alive[t as usize]) {
                    alive[s] = true;
                    changed = true;
                }
            }
        }
        let target = |t: u32| if t != NONE && alive[t as usize] { t } else { NONE };
        let mut block: Vec<u32> = (0..n).map(|s| if alive[s] { self.finals[s] as u32 } else { NONE }).collect();
        let mut count = 0;
        loop {
            let mut sigs: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
            let mut nb = vec![NONE; n];
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                let mut sig = vec![block[s]];
                sig.extend(self.next[s].iter().map(|&t| {
                    let t = target(t);
                    if t == NONE {
                        NONE
                    } else {
                        block[t as usize]
                    }
                }));
                let len = sigs.len() as u32;
                nb[s] = *sigs.entry(sig).or_insert(len);
            }
            let c = sigs.len();
            block = nb;
            if c == count {
                break;
            }
            count = c;
        }
        if !alive[self.initial as usize] {
            return LetterDfa {
                letters: self.letters.clone(),
                next: vec![vec![NONE; self.letters.len()]],
                finals: vec![false],
                initial: 0,
            };
        }
        let mut next = vec![Vec::new(); count];
        let mut finals = vec![false; count];
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            let b = block[s] as usize;
            if next[b].is_empty() {
                next[b] = self.next[s]
                    .iter()
                    .map(|&t| {
                        let t = target(t);
                        if t == NONE {
                            NONE
                        } else {
                            block[t as usize]
                        }
                    })
                    .collect();
                finals[b] = self.finals[s];
            }
        }
        LetterDfa { letters: self.letters.clone(), next, finals, initial: block[self.initial as usize] }
    }

    pub fn to_nfa(&self, alphabet: &Arc<Alphabet>, tracks: usize) -> Nfa {
        let mut out = Nfa::new(alphabet.clone(), tracks);
        for &f in &self.finals {
            out.add_state(f);
        }
        out.set_initial(self.initial);
        for (s, row) in self.next.iter().enumerate() {
            let mut by_target: FxHashMap<u32, Vec<Cube>> = FxHashMap::default();
            for (li, &t) in row.iter().enumerate() {
                if t != NONE {
                    by_target.entry(t).or_default().push(Cube::point(&self.letters[li]));
                }
            }
            let mut targets: Vec<u32> = by_target.keys().copied().collect();
            targets.sort_unstable();
            for t in targets {
                for c in merge_cubes(by_target.remove(&t).unwrap()) {
                    out.add_edge(s as u32, c, t);
                }
            }
        }
        out
    }
}

/// Minimal automata for "distance at most i" for i = 0..=n.
pub fn distance_automata(p: &Presentation, n: usize, budget: usize) -> Result<Vec<LetterDfa>> {
    let g = gaifman_automaton(p)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = LetterDfa::determinize(&identity_on(&p.domain)?, budget)?.minimize();
    out.push(cur.clone());
    for _ in 0..n {
        let prev = cur.to_nfa(&p.alphabet, 2);
        let step = compose(&prev, &g)?;
        let joined = prev.union(&step)?;
        cur = LetterDfa::determinize(&joined, budget)?.minimize();
        out.push(cur.clone());
    }
    Ok(out)
}

/// `max_u |{v | (u, v) ∈ R(d)}|` for a two-track deterministic automaton,
/// or `None` when some image is infinite.
pub fn max_image_size(d: &LetterDfa, alphabet: &Alphabet, budget: usize) -> Result<Option<u64>> {
    let pad = alphabet.pad();
    let letter_index: FxHashMap<(Symbol, Symbol), usize> =
        d.letters.iter().enumerate().map(|(i, l)| ((l[0], l[1]), i)).collect();
    let step = |s: u32, a: Symbol, b: Symbol| -> u32 {
        match letter_index.get(&(a, b)) {
            Some(&i) if s != NONE => d.next[s as usize][i],
            _ => NONE,
        }
    };
    let lets: Vec<Symbol> = alphabet.letter_set().iter().collect();
    // Completions of v alone after u has ended.
    let n = d.finals.len();
    let mut tail: Vec<Option<u64>> = vec![None; n];
    let mut on_stack = vec![false; n];
    fn tail_count(
        s: u32,
        d: &LetterDfa,
        lets: &[Symbol],
        step: &dyn Fn(u32, Symbol, Symbol) -> u32,
        pad: Symbol,
        memo: &mut Vec<Option<u64>>,
        on_stack: &mut Vec<bool>,
    ) -> Option<u64> {
        if let Some(c) = memo[s as usize] {
            return Some(c);
        }
        if on_stack[s as usize] {
            return None;
        }
        on_stack[s as usize] = true;
        let mut c = d.finals[s as usize] as u64;
        for &b in lets {
            let t = step(s, pad, b);
            if t != NONE {
                c = c.saturating_add(tail_count(t, d, lets, step, pad, memo, on_stack)?);
            }
        }
        on_stack[s as usize] = false;
        memo[s as usize] = Some(c);
        Some(c)
    }
    // Count vectors: sorted (state, v ended, count).
    type Vector = Vec<(u32, bool, u64)>;
    let start: Vector = vec![(d.initial, false, 1)];
    let mut seen: FxHashSet<Vector> = FxHashSet::default();
    seen.insert(start.clone());
    let mut queue: VecDeque<Vector> = VecDeque::from([start]);
    let mut best = 0u64;
    while let Some(v) = queue.pop_front() {
        // End u here.
        let mut total = 0u64;
        for &(s, ended, c) in &v {
            let k = if ended {
                d.finals[s as usize] as u64
            } else {
                match tail_count(s, d, &lets, &step, pad, &mut tail, &mut on_stack) {
                    Some(k) => k,
                    None => return Ok(None),
                }
            };
            total = total.saturating_add(c.saturating_mul(k));
        }
        best = best.max(total);
        // Extend u by one letter.
        for &a in &lets {
            let mut acc: FxHashMap<(u32, bool), u64> = FxHashMap::default();
            for &(s, ended, c) in &v {
                let t = step(s, a, pad);
                if t != NONE {
                    *acc.entry((t, true)).or_insert(0) += c;
                }
                if !ended {
                    for &b in &lets {
                        let t = step(s, a, b);
                        if t != NONE {
                            *acc.entry((t, false)).or_insert(0) += c;
                        }
                    }
                }
            }
            if acc.is_empty() {
                continue;
            }
            let mut nv: Vector = acc.into_iter().map(|((s, e), c)| (s, e, c)).collect();
            nv.sort_unstable();
            if seen.insert(nv.clone()) {
                if seen.len() > budget {
                    return Err(Error::Resource(format!("growth search exceeded {budget} count vectors")));
                }
                queue.push_back(nv);
            }
        }
    }
    Ok(Some(best))
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthResult {
    pub radius: usize,
    /// Largest sphere size, capped.
    pub sphere: u64,
    /// The normalized value `max(n, sphere)`.
    pub value: u64,
    pub cap: u64,
    pub saturated: bool,
}

/// `1 + δ + … + δ^n`, saturating.
pub fn geometric_bound(delta: usize, n: usize) -> u64 {
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for _ in 0..=n {
        total = total.saturating_add(term);
        term = term.saturating_mul(delta as u64);
    }
    total
}

/// The normalized growth value at every radius up to `n`.
pub fn growth_series(p: &Presentation, n: usize, cap: Option<u64>, budget: usize) -> Result<Vec<GrowthResult>> {
    if !p.is_injective() {
        return Err(Error::Precondition("growth needs an injective presentation".into()));
    }
    let delta = match max_degree(p, DEFAULT_DEGREE_CAP, budget)? {
        DegreeResult::Bounded { degree } => degree,
        DegreeResult::ExceedsCap { .. } => {
            return Err(Error::Precondition("growth needs a presentation of bounded degree".into()))
        }
    };
    let dfas = distance_automata(p, n, budget)?;
    let mut out = Vec::with_capacity(n + 1);
    for (r, d) in dfas.iter().enumerate() {
        let cap = cap.unwrap_or_else(|| geometric_bound(delta, r));
        let size = max_image_size(d, &p.alphabet, budget)?.ok_or_else(|| {
            Error::Precondition("some element has infinitely many elements within the radius".into())
        })?;
        let saturated = size > cap;
        let sphere = size.min(cap);
        out.push(GrowthResult { radius: r, sphere, value: sphere.max(r as u64), cap, saturated });
    }
    Ok(out)
}

pub fn growth(p: &Presentation, n: usize, cap: Option<u64>, budget: usize) -> Result<GrowthResult> {
    Ok(growth_series(p, n, cap, budget)?.pop().expect("series has n + 1 entries"))
}

/// Whether some radius-`n` sphere has at least `m` elements, decided with
/// an `(m+1)`-track query over the distance automaton.
pub fn sphere_size_at_least(p: &Presentation, n: usize, m: usize, budget: usize) -> Result<bool> {
    let d = distance_automata(p, n, budget)?.pop().unwrap();
    let rel = Arc::new(d.to_nfa(&p.alphabet, 2));
    Ok(fan_witness(&rel, &p.domain, m, budget)?.is_some())
}
