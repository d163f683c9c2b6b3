//! Boolean and track operations, emptiness and inclusion.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::alphabet::{Alphabet, Symbol, SymbolSet};
use super::guard::{merge_cubes, refine_all, Cube};
use super::nfa::{Nfa, StateId};
use super::word::ConvWord;
use crate::error::{Error, Result};

/// Default limit on the number of subset states a determinization may create.
pub const DEFAULT_SUBSET_BUDGET: usize = 1_000_000;

/// Intersection of two automata with the same tracks and alphabet.
pub fn product(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    a.same_shape(b)?;
    let mut out = Nfa::new(a.alphabet().clone(), a.tracks());
    let mut ids: FxHashMap<(StateId, StateId), StateId> = FxHashMap::default();
    let mut queue = VecDeque::new();
    for &p in a.initial() {
        for &q in b.initial() {
            let id = *ids.entry((p, q)).or_insert_with(|| {
                queue.push_back((p, q));
                out.add_state(a.is_final(p) && b.is_final(q))
            });
            out.set_initial(id);
        }
    }
    while let Some((p, q)) = queue.pop_front() {
        let src = ids[&(p, q)];
        for ea in a.edges(p) {
            for eb in b.edges(q) {
                if let Some(g) = ea.guard.meet(&eb.guard) {
                    let key = (ea.to, eb.to);
                    let dst = match ids.get(&key) {
                        Some(&d) => d,
                        None => {
                            let d = out.add_state(a.is_final(ea.to) && b.is_final(eb.to));
                            ids.insert(key, d);
                            queue.push_back(key);
                            d
                        }
                    };
                    out.add_edge(src, g, dst);
                }
            }
        }
    }
    if out.num_states() == 0 {
        return Ok(Nfa::empty(a.alphabet().clone(), a.tracks()));
    }
    Ok(out)
}

/// Intersection of several automata.
pub fn product_all(parts: &[&Nfa]) -> Result<Nfa> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::Dimension("product of zero automata".into()))?;
    let mut acc = (*first).clone();
    for p in rest {
        acc = product(&acc, p)?.reduce();
    }
    Ok(acc)
}

/// Groups a subset's outgoing edges by guard, uniting their targets.
fn grouped_edges(a: &Nfa, subset: &[StateId]) -> Vec<(Cube, Vec<StateId>)> {
    let mut by_guard: FxHashMap<&Cube, Vec<StateId>> = FxHashMap::default();
    let mut order: Vec<&Cube> = Vec::new();
    for &s in subset {
        for e in a.edges(s) {
            by_guard
                .entry(&e.guard)
                .or_insert_with(|| {
                    order.push(&e.guard);
                    Vec::new()
                })
                .push(e.to);
        }
    }
    order
        .into_iter()
        .map(|g| {
            let mut t = by_guard.remove(g).unwrap();
            t.sort_unstable();
            t.dedup();
            (g.clone(), t)
        })
        .collect()
}

/// Successor subsets of `subset` restricted to letters in `universe`:
/// disjoint cubes, each with the (possibly empty) target subset.
pub fn subset_successors(a: &Nfa, subset: &[StateId], universe: &Cube) -> Vec<(Cube, Vec<StateId>)> {
    let groups = grouped_edges(a, subset);
    let guards: Vec<&Cube> = groups.iter().map(|(g, _)| g).collect();
    let pieces = refine_all(universe, &guards);
    let mut by_target: FxHashMap<Vec<StateId>, Vec<Cube>> = FxHashMap::default();
    let mut order = Vec::new();
    for (cube, members) in pieces {
        let mut t: Vec<StateId> = members.iter().flat_map(|&i| groups[i].1.iter().copied()).collect();
        t.sort_unstable();
        t.dedup();
        by_target
            .entry(t.clone())
            .or_insert_with(|| {
                order.push(t);
                Vec::new()
            })
            .push(cube);
    }
    let mut out = Vec::new();
    for t in order {
        for c in merge_cubes(by_target.remove(&t).unwrap()) {
            out.push((c, t.clone()));
        }
    }
    out
}

fn initial_subset(a: &Nfa) -> Vec<StateId> {
    let mut s = a.initial().to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Deterministic automaton for the complement with respect to all
/// well-formed convolutions of the same width.
pub fn complement(a: &Nfa, budget: usize) -> Result<Nfa> {
    let full = a.full_cube();
    let mut out = Nfa::new(a.alphabet().clone(), a.tracks());
    let mut ids: FxHashMap<Vec<StateId>, StateId> = FxHashMap::default();
    let mut queue = VecDeque::new();
    let start = initial_subset(a);
    let s0 = out.add_state(!start.iter().any(|&s| a.is_final(s)));
    out.set_initial(s0);
    ids.insert(start.clone(), s0);
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        let src = ids[&cur];
        for (cube, target) in subset_successors(a, &cur, &full) {
            let dst = match ids.get(&target) {
                Some(&d) => d,
                None => {
                    if ids.len() >= budget {
                        return Err(Error::Resource(format!(
                            "complementation exceeded {budget} subset states"
                        )));
                    }
                    let d = out.add_state(!target.iter().any(|&s| a.is_final(s)));
                    ids.insert(target.clone(), d);
                    queue.push_back(target);
                    d
                }
            };
            out.add_edge(src, cube, dst);
        }
    }
    Ok(out)
}

/// Determinizes without complementing.
pub fn determinize(a: &Nfa, budget: usize) -> Result<Nfa> {
    let mut d = complement(a, budget)?;
    for s in 0..d.num_states() as StateId {
        let f = d.is_final(s);
        d.set_final(s, !f);
    }
    Ok(d)
}

/// Splits `guard` according to the end-padding discipline of the tracks
/// listed in `tracked`: returns pieces with the updated ended-mask (bit `i`
/// refers to `tracked[i]`). Pieces that consist only of the all-pad tuple
/// are removed.
pub fn wf_pieces(guard: &Cube, tracked: &[usize], mask: u64, pad: Symbol) -> Vec<(Cube, u64)> {
    let pad_set = SymbolSet::single(pad);
    let mut pieces: Vec<(Cube, u64)> = vec![(guard.clone(), mask)];
    for (bit, &t) in tracked.iter().enumerate() {
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for (c, m) in pieces {
            let set = *c.track(t);
            if m & (1 << bit) != 0 {
                let only_pad = set.and(&pad_set);
                if !only_pad.is_empty() {
                    let mut c2 = c;
                    c2.0[t] = only_pad;
                    next.push((c2, m));
                }
            } else {
                let letters = set.minus(&pad_set);
                if !letters.is_empty() {
                    let mut c2 = c.clone();
                    c2.0[t] = letters;
                    next.push((c2, m));
                }
                if set.contains(pad) {
                    let mut c2 = c;
                    c2.0[t] = pad_set;
                    next.push((c2, m | (1 << bit)));
                }
            }
        }
        pieces = next;
    }
    let all_pad = Cube(vec![pad_set; guard.tracks()]);
    let mut out = Vec::with_capacity(pieces.len());
    for (c, m) in pieces {
        for d in c.difference(&all_pad) {
            out.push((d, m));
        }
    }
    out
}

fn check_track_limit(tracks: usize) -> Result<()> {
    if tracks > 63 {
        return Err(Error::Dimension(format!("{tracks} tracks exceed the supported maximum of 63")));
    }
    Ok(())
}

/// Projection onto `keep` (in that order). The dropped tracks are guessed
/// nondeterministically; trailing positions where all kept tracks are
/// padding are absorbed into acceptance.
pub fn project(a: &Nfa, keep: &[usize]) -> Result<Nfa> {
    if keep.is_empty() {
        return Err(Error::Dimension("projection must keep at least one track".into()));
    }
    let mut seen = vec![false; a.tracks()];
    for &k in keep {
        if k >= a.tracks() || std::mem::replace(&mut seen[k], true) {
            return Err(Error::Dimension(format!("invalid projection track list {keep:?}")));
        }
    }
    check_track_limit(a.tracks())?;
    let dropped: Vec<usize> = (0..a.tracks()).filter(|t| !seen[*t]).collect();
    let pad = a.pad();
    // Explicit product with the padding tracker of the dropped tracks.
    let mut ids: FxHashMap<(StateId, u64), StateId> = FxHashMap::default();
    let mut nodes: Vec<(StateId, u64)> = Vec::new();
    let mut edges: Vec<Vec<(Cube, StateId)>> = Vec::new();
    let mut queue = VecDeque::new();
    let intern = |key: (StateId, u64),
                      ids: &mut FxHashMap<(StateId, u64), StateId>,
                      nodes: &mut Vec<(StateId, u64)>,
                      edges: &mut Vec<Vec<(Cube, StateId)>>,
                      queue: &mut VecDeque<(StateId, u64)>|
     -> StateId {
        *ids.entry(key).or_insert_with(|| {
            nodes.push(key);
            edges.push(Vec::new());
            queue.push_back(key);
            (nodes.len() - 1) as StateId
        })
    };
    let mut initial = Vec::new();
    for &s in a.initial() {
        initial.push(intern((s, 0), &mut ids, &mut nodes, &mut edges, &mut queue));
    }
    while let Some((q, m)) = queue.pop_front() {
        let src = ids[&(q, m)];
        for e in a.edges(q) {
            for (piece, m2) in wf_pieces(&e.guard, &dropped, m, pad) {
                let dst = intern((e.to, m2), &mut ids, &mut nodes, &mut edges, &mut queue);
                edges[src as usize].push((piece, dst));
            }
        }
    }
    // Nodes that reach a final node reading only padding on the kept tracks.
    let n = nodes.len();
    let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (s, list) in edges.iter().enumerate() {
        for (c, d) in list {
            if keep.iter().all(|&k| c.track(k).contains(pad)) {
                rev[*d as usize].push(s as StateId);
            }
        }
    }
    let mut fin = vec![false; n];
    let mut stack: Vec<StateId> = Vec::new();
    for (i, &(q, _)) in nodes.iter().enumerate() {
        if a.is_final(q) {
            fin[i] = true;
            stack.push(i as StateId);
        }
    }
    while let Some(s) = stack.pop() {
        for &p in &rev[s as usize] {
            if !fin[p as usize] {
                fin[p as usize] = true;
                stack.push(p);
            }
        }
    }
    let mut out = Nfa::new(a.alphabet().clone(), keep.len());
    for &f in &fin {
        out.add_state(f);
    }
    for s in initial {
        out.set_initial(s);
    }
    for (s, list) in edges.into_iter().enumerate() {
        for (c, d) in list {
            out.add_edge(s as StateId, c.select(keep), d);
        }
    }
    Ok(out.reduce())
}

/// Adds the padding tracker over all tracks: an explicit automaton whose raw
/// language already consists of well-formed words only.
pub fn well_formed_part(a: &Nfa) -> Result<Nfa> {
    check_track_limit(a.tracks())?;
    let all: Vec<usize> = (0..a.tracks()).collect();
    let pad = a.pad();
    let mut out = Nfa::new(a.alphabet().clone(), a.tracks());
    let mut ids: FxHashMap<(StateId, u64), StateId> = FxHashMap::default();
    let mut queue = VecDeque::new();
    for &s in a.initial() {
        let id = *ids.entry((s, 0)).or_insert_with(|| {
            queue.push_back((s, 0));
            out.add_state(a.is_final(s))
        });
        out.set_initial(id);
    }
    while let Some((q, m)) = queue.pop_front() {
        let src = ids[&(q, m)];
        for e in a.edges(q) {
            for (piece, m2) in wf_pieces(&e.guard, &all, m, pad) {
                let dst = match ids.get(&(e.to, m2)) {
                    Some(&d) => d,
                    None => {
                        let d = out.add_state(a.is_final(e.to));
                        ids.insert((e.to, m2), d);
                        queue.push_back((e.to, m2));
                        d
                    }
                };
                out.add_edge(src, piece, dst);
            }
        }
    }
    Ok(out)
}

/// Emptiness test. Returns a shortest accepted convolution, choosing the
/// lexicographically least tuple at every position among those that still
/// permit a shortest completion.
pub fn shortest_witness(a: &Nfa) -> Result<Option<ConvWord>> {
    let w = well_formed_part(a)?;
    let n = w.num_states();
    let mut rev: Vec<Vec<(StateId, usize)>> = vec![Vec::new(); n];
    for s in 0..n {
        for (i, e) in w.edges(s as StateId).iter().enumerate() {
            rev[e.to as usize].push((s as StateId, i));
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    for f in w.finals() {
        dist[f as usize] = 0;
        q.push_back(f);
    }
    while let Some(s) = q.pop_front() {
        for &(p, _) in &rev[s as usize] {
            if dist[p as usize] == usize::MAX {
                dist[p as usize] = dist[s as usize] + 1;
                q.push_back(p);
            }
        }
    }
    let best = w.initial().iter().map(|&s| dist[s as usize]).min().unwrap_or(usize::MAX);
    if best == usize::MAX {
        return Ok(None);
    }
    let mut cur: Vec<StateId> = w
        .initial()
        .iter()
        .copied()
        .filter(|&s| dist[s as usize] == best)
        .collect();
    let mut tuples = Vec::with_capacity(best);
    for rem in (1..=best).rev() {
        let mut choice: Option<Vec<Symbol>> = None;
        for &s in &cur {
            for e in w.edges(s) {
                if dist[e.to as usize] == rem - 1 {
                    let t = e.guard.min_tuple().expect("non-empty guard");
                    if choice.as_ref().map_or(true, |c| t < *c) {
                        choice = Some(t);
                    }
                }
            }
        }
        let t = choice.expect("distance labels guarantee a successor");
        let mut next: Vec<StateId> = Vec::new();
        for &s in &cur {
            for e in w.edges(s) {
                if dist[e.to as usize] == rem - 1 && e.guard.contains(&t) {
                    next.push(e.to);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        cur = next;
        tuples.push(t);
    }
    Ok(Some(ConvWord::from_tuples(a.tracks(), tuples)))
}

pub fn is_empty(a: &Nfa) -> Result<bool> {
    Ok(shortest_witness(a)?.is_none())
}

/// Outcome of an on-the-fly difference check.
#[derive(Clone, Debug)]
pub struct DifferenceOutcome {
    /// A shortest word in `L(b) \ L(a)`, if any.
    pub witness: Option<ConvWord>,
    /// Number of distinct subsets of `a` that were materialized.
    pub subsets: usize,
    /// Number of product states explored.
    pub explored: usize,
}

/// Searches `L(b) \ L(a)` breadth-first, determinizing `a` on the fly.
pub fn difference_witness(b: &Nfa, a: &Nfa, budget: usize) -> Result<DifferenceOutcome> {
    a.same_shape(b)?;
    check_track_limit(b.tracks())?;
    let all: Vec<usize> = (0..b.tracks()).collect();
    let pad = b.pad();
    type Key = (StateId, u64, u32);
    let mut subset_ids: FxHashMap<Vec<StateId>, u32> = FxHashMap::default();
    let mut subsets: Vec<Vec<StateId>> = Vec::new();
    let mut intern_subset = |s: Vec<StateId>, subsets: &mut Vec<Vec<StateId>>| -> u32 {
        let len = subset_ids.len() as u32;
        *subset_ids.entry(s.clone()).or_insert_with(|| {
            subsets.push(s);
            len
        })
    };
    let start = intern_subset(initial_subset(a), &mut subsets);
    let mut parent: FxHashMap<Key, Option<(Key, Vec<Symbol>)>> = FxHashMap::default();
    let mut queue: VecDeque<Key> = VecDeque::new();
    for &q in b.initial() {
        let k = (q, 0u64, start);
        if parent.insert(k, None).is_none() {
            queue.push_back(k);
        }
    }
    let accepting = |k: &Key, subsets: &Vec<Vec<StateId>>| {
        b.is_final(k.0) && !subsets[k.2 as usize].iter().any(|&s| a.is_final(s))
    };
    let mut found: Option<Key> = None;
    while let Some(k) = queue.pop_front() {
        if accepting(&k, &subsets) {
            found = Some(k);
            break;
        }
        let (q, m, sid) = k;
        for e in b.edges(q) {
            for (piece, m2) in wf_pieces(&e.guard, &all, m, pad) {
                let cur = subsets[sid as usize].clone();
                for (cube, target) in subset_successors(a, &cur, &piece) {
                    let tid = intern_subset(target, &mut subsets);
                    if subsets.len() > budget {
                        return Err(Error::Resource(format!(
                            "on-the-fly determinization exceeded {budget} subset states"
                        )));
                    }
                    let nk = (e.to, m2, tid);
                    if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(nk) {
                        v.insert(Some((k, cube.min_tuple().unwrap())));
                        queue.push_back(nk);
                    }
                }
            }
        }
        if parent.len() > budget.saturating_mul(4) {
            return Err(Error::Resource(format!(
                "on-the-fly search exceeded {} product states",
                budget.saturating_mul(4)
            )));
        }
    }
    let explored = parent.len();
    let witness = found.map(|mut k| {
        let mut tuples = Vec::new();
        while let Some(Some((p, t))) = parent.get(&k) {
            tuples.push(t.clone());
            k = *p;
        }
        tuples.reverse();
        ConvWord::from_tuples(b.tracks(), tuples)
    });
    Ok(DifferenceOutcome { witness, subsets: subsets.len(), explored })
}

/// Inclusion `L(b) ⊆ L(a)`; on failure returns a counterexample from `L(b) \ L(a)`.
pub fn includes(a: &Nfa, b: &Nfa, budget: usize) -> Result<Option<ConvWord>> {
    Ok(difference_witness(b, a, budget)?.witness)
}

/// Complement relative to `within`, i.e. `L(within) \ L(a)`.
pub fn complement_within(a: &Nfa, within: &Nfa, budget: usize) -> Result<Nfa> {
    Ok(product(&complement(a, budget)?, within)?.reduce())
}

/// Composition of binary relations: `{(x,z) | ∃y. (x,y) ∈ r ∧ (y,z) ∈ s}`.
pub fn compose(r: &Nfa, s: &Nfa) -> Result<Nfa> {
    if r.tracks() != 2 || s.tracks() != 2 {
        return Err(Error::Dimension("composition needs two-track automata".into()));
    }
    let r3 = r.cylindrify(&[0, 1], 3)?;
    let s3 = s.cylindrify(&[1, 2], 3)?;
    project(&product(&r3, &s3)?.reduce(), &[0, 2])
}

/// Swaps the two tracks of a binary relation.
pub fn inverse(r: &Nfa) -> Result<Nfa> {
    r.rearrange(&[1, 0], 2)
}

/// `{(w, w) | w ∈ L(domain)}` for a one-track automaton.
pub fn identity_on(domain: &Nfa) -> Result<Nfa> {
    if domain.tracks() != 1 {
        return Err(Error::Dimension("identity needs a one-track domain".into()));
    }
    let pad = domain.pad();
    let mut out = Nfa::new(domain.alphabet().clone(), 2);
    for s in 0..domain.num_states() as StateId {
        out.add_state(domain.is_final(s));
    }
    for &s in domain.initial() {
        out.set_initial(s);
    }
    for s in 0..domain.num_states() as StateId {
        for e in domain.edges(s) {
            for x in e.guard.track(0).iter().filter(|&x| x != pad) {
                out.add_edge(s, Cube::point(&[x, x]), e.to);
            }
        }
    }
    Ok(out)
}

/// Two-track automaton for `u ≠ v` over all words.
pub fn distinct(alphabet: &Arc<Alphabet>) -> Nfa {
    let full = alphabet.full_set();
    let mut out = Nfa::new(alphabet.clone(), 2);
    let same = out.add_state(false);
    let diff = out.add_state(true);
    out.set_initial(same);
    for x in alphabet.letter_set().iter() {
        out.add_edge(same, Cube::point(&[x, x]), same);
    }
    for x in full.iter() {
        let mut others = full;
        others.remove(x);
        out.add_edge(same, Cube(vec![SymbolSet::single(x), others]), diff);
    }
    out.add_edge(diff, Cube(vec![full, full]), diff);
    out
}

/// Two-track automaton for `u <llex v`: shorter words first, equal lengths
/// compared letter by letter in alphabet order.
pub fn llex_less(alphabet: &Arc<Alphabet>) -> Nfa {
    let letters = alphabet.letter_set();
    let pad = alphabet.pad_set();
    let mut out = Nfa::new(alphabet.clone(), 2);
    let eq = out.add_state(false);
    let less = out.add_state(true);
    let greater = out.add_state(false);
    let shorter = out.add_state(true);
    out.set_initial(eq);
    for x in letters.iter() {
        out.add_edge(eq, Cube::point(&[x, x]), eq);
        let above: SymbolSet = letters.iter().filter(|&y| y > x).collect();
        let below: SymbolSet = letters.iter().filter(|&y| y < x).collect();
        out.add_edge(eq, Cube(vec![SymbolSet::single(x), above]), less);
        out.add_edge(eq, Cube(vec![SymbolSet::single(x), below]), greater);
    }
    let both = Cube(vec![letters, letters]);
    out.add_edge(less, both.clone(), less);
    out.add_edge(greater, both, greater);
    let first_ends = Cube(vec![pad, letters]);
    for s in [eq, less, greater, shorter] {
        out.add_edge(s, first_ends.clone(), shorter);
    }
    out
}

/// The `k`-fold power of a one-track domain: all tuples of domain words.
pub fn domain_power(domain: &Nfa, k: usize) -> Result<Nfa> {
    let mut acc = domain.cylindrify(&[0], k)?;
    for i in 1..k {
        acc = product(&acc, &domain.cylindrify(&[i], k)?)?.reduce();
    }
    Ok(acc)
}
