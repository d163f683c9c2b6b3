//! Existence queries over many tracks at once.
//!
//! A query asks for a tuple of words, one per track, satisfying a list of
//! constraints. Each constraint reads only a few of the tracks, so instead of
//! building the product automaton over the full tuple alphabet the explorer
//! assigns letters track by track and discards partial tuples as soon as a
//! positive constraint has no run left.

use std::sync::Arc;

use rustc_hash::FxHashSet;
use smallvec::SmallVec;

use super::alphabet::{Symbol, SymbolSet};
use super::nfa::{Nfa, StateId};
use crate::error::{Error, Result};

/// One constraint on the explored tuple.
#[derive(Clone, Debug)]
pub enum Constraint {
    /// The words on `tracks` (in order) must be accepted by `nfa`.
    Accept { nfa: Arc<Nfa>, tracks: Vec<usize> },
    /// The words on `tracks` must not be accepted by `nfa`.
    Reject { nfa: Arc<Nfa>, tracks: Vec<usize> },
    /// The words on each listed pair of tracks must differ.
    Distinct { pairs: Vec<(usize, usize)> },
    /// Every word `v` with `(w_center, v)` accepted by the two-track `rel`
    /// must equal `w_q` for some `q` in `allowed` (at most 64 entries).
    Closed { rel: Arc<Nfa>, center: usize, allowed: Vec<usize> },
}

/// Statistics of one exploration.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExploreStats {
    pub states: usize,
}

#[derive(Clone, Debug)]
pub struct Query {
    pub tracks: usize,
    pub constraints: Vec<Constraint>,
}

/// Per-constraint precomputed data.
struct Prepared {
    nfa: Option<Arc<Nfa>>,
    tracks: Vec<usize>,
    /// For `Closed`: states that reach a final state reading
    /// (pad, letter)+ only, i.e. by extending `v` alone.
    tail_plus: Vec<bool>,
    /// For `Accept`: states from which a final state is reachable.
    live: Vec<bool>,
}

type States = SmallVec<[StateId; 4]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum CState {
    Set(States),
    Bits(Vec<u64>),
    /// Sorted triples (rel state, equality mask over `allowed`, v ended).
    Triples(Vec<(StateId, u64, bool)>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct PState {
    ended: Vec<u64>,
    comps: Vec<CState>,
}

pub struct Explorer<'a> {
    q: &'a Query,
    prep: Vec<Prepared>,
    /// Accept constraints whose highest track is the index.
    completes_at: Vec<Vec<usize>>,
    /// Accept constraints touching the track.
    touching: Vec<Vec<usize>>,
    /// Distinct pairs `(constraint, pair index, other track)` whose higher
    /// track is the index.
    pairs_at: Vec<Vec<(usize, usize, usize)>>,
    /// Reject constraints whose highest track is the index.
    rejects_at: Vec<Vec<usize>>,
    pad: Symbol,
    letters: SymbolSet,
    budget: usize,
}

fn bit(v: &[u64], i: usize) -> bool {
    v[i / 64] & (1u64 << (i % 64)) != 0
}

fn set_bit(v: &mut [u64], i: usize) {
    v[i / 64] |= 1u64 << (i % 64);
}

impl<'a> Explorer<'a> {
    pub fn new(q: &'a Query, budget: usize) -> Result<Self> {
        let mut pad = None;
        let mut letters = SymbolSet::EMPTY;
        let mut prep = Vec::new();
        let mut completes_at = vec![Vec::new(); q.tracks];
        let mut touching = vec![Vec::new(); q.tracks];
        let mut pairs_at = vec![Vec::new(); q.tracks];
        let mut rejects_at = vec![Vec::new(); q.tracks];
        for (ci, c) in q.constraints.iter().enumerate() {
            match c {
                Constraint::Distinct { pairs } => {
                    for (i, &(a, b)) in pairs.iter().enumerate() {
                        if a < q.tracks && b < q.tracks && a != b {
                            pairs_at[a.max(b)].push((ci, i, a.min(b)));
                        }
                    }
                }
                Constraint::Reject { tracks, .. } => {
                    if let Some(&m) = tracks.iter().max() {
                        if m < q.tracks {
                            rejects_at[m].push(ci);
                        }
                    }
                }
                _ => {}
            }
            let (nfa, tracks) = match c {
                Constraint::Accept { nfa, tracks } | Constraint::Reject { nfa, tracks } => {
                    if nfa.tracks() != tracks.len() {
                        return Err(Error::Dimension("constraint track count mismatch".into()));
                    }
                    (Some(nfa.clone()), tracks.clone())
                }
                Constraint::Distinct { pairs } => {
                    (None, pairs.iter().flat_map(|&(a, b)| [a, b]).collect())
                }
                Constraint::Closed { rel, center, allowed } => {
                    if rel.tracks() != 2 || allowed.len() > 64 {
                        return Err(Error::Dimension("closure constraint misconfigured".into()));
                    }
                    let mut t = vec![*center];
                    t.extend(allowed);
                    (Some(rel.clone()), t)
                }
            };
            if tracks.iter().any(|&t| t >= q.tracks) {
                return Err(Error::Dimension("constraint refers to a missing track".into()));
            }
            if let Some(n) = &nfa {
                let p = n.pad();
                if pad.is_some_and(|x| x != p) {
                    return Err(Error::Dimension("constraints use different alphabets".into()));
                }
                pad = Some(p);
                letters = n.alphabet().letter_set();
            }
            let mut tail_plus = Vec::new();
            if let (Constraint::Closed { .. }, Some(n)) = (c, &nfa) {
                let p = n.pad();
                let lets = n.alphabet().letter_set();
                let size = n.num_states();
                let mut star = vec![false; size];
                for f in n.finals() {
                    star[f as usize] = true;
                }
                let step = |s: usize, set: &[bool]| {
                    n.edges(s as StateId).iter().any(|e| {
                        e.guard.track(0).contains(p)
                            && !e.guard.track(1).and(&lets).is_empty()
                            && set[e.to as usize]
                    })
                };
                let mut changed = true;
                while changed {
                    changed = false;
                    for s in 0..size {
                        if !star[s] && step(s, &star) {
                            star[s] = true;
                            changed = true;
                        }
                    }
                }
                tail_plus = (0..size).map(|s| step(s, &star)).collect();
            }
            if let Constraint::Accept { tracks, .. } = c {
                if let Some(&m) = tracks.iter().max() {
                    completes_at[m].push(ci);
                }
                for &t in tracks {
                    if !touching[t].contains(&ci) {
                        touching[t].push(ci);
                    }
                }
            }
            let live = match (c, &nfa) {
                (Constraint::Accept { .. }, Some(n)) => n.coreachable(),
                _ => Vec::new(),
            };
            prep.push(Prepared { nfa, tracks, tail_plus, live });
        }
        let pad = pad.ok_or_else(|| Error::Dimension("query has no automaton constraint".into()))?;
        Ok(Explorer { q, prep, completes_at, touching, pairs_at, rejects_at, pad, letters, budget })
    }

    fn initial(&self) -> PState {
        let words = self.q.tracks.div_ceil(64).max(1);
        let comps = self
            .q
            .constraints
            .iter()
            .zip(&self.prep)
            .map(|(c, p)| match c {
                Constraint::Accept { nfa, .. } | Constraint::Reject { nfa, .. } => {
                    let mut s: States =
                        nfa.initial().iter().copied().filter(|&x| p.live.is_empty() || p.live[x as usize]).collect();
                    s.sort_unstable();
                    s.dedup();
                    CState::Set(s)
                }
                Constraint::Distinct { pairs } => CState::Bits(vec![0; pairs.len().div_ceil(64).max(1)]),
                Constraint::Closed { rel, allowed, .. } => {
                    let all = if allowed.len() == 64 { u64::MAX } else { (1u64 << allowed.len()) - 1 };
                    let mut t: Vec<(StateId, u64, bool)> =
                        rel.initial().iter().map(|&g| (g, all, false)).collect();
                    t.sort_unstable();
                    t.dedup();
                    CState::Triples(t)
                }
            })
            .collect();
        PState { ended: vec![0; words], comps }
    }

    fn accepting(&self, s: &PState) -> bool {
        for ((c, p), st) in self.q.constraints.iter().zip(&self.prep).zip(&s.comps) {
            let ok = match (c, st) {
                (Constraint::Accept { nfa, .. }, CState::Set(set)) => set.iter().any(|&x| nfa.is_final(x)),
                (Constraint::Reject { nfa, .. }, CState::Set(set)) => !set.iter().any(|&x| nfa.is_final(x)),
                (Constraint::Distinct { pairs }, CState::Bits(b)) => (0..pairs.len()).all(|i| bit(b, i)),
                (Constraint::Closed { rel, .. }, CState::Triples(ts)) => !ts.iter().any(|&(g, eq, ve)| {
                    (rel.is_final(g) && eq == 0) || (!ve && p.tail_plus[g as usize])
                }),
                _ => unreachable!("constraint state mismatch"),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Whether a constraint whose tracks have all ended is already violated.
    fn settled_failure(&self, ended: &[u64], comps: &[CState]) -> bool {
        for ((c, p), st) in self.q.constraints.iter().zip(&self.prep).zip(comps) {
            match (c, st) {
                (Constraint::Accept { nfa, .. }, CState::Set(set)) => {
                    if p.tracks.iter().all(|&t| bit(ended, t)) && !set.iter().any(|&x| nfa.is_final(x)) {
                        return true;
                    }
                }
                (Constraint::Reject { nfa, .. }, CState::Set(set)) => {
                    if p.tracks.iter().all(|&t| bit(ended, t)) && set.iter().any(|&x| nfa.is_final(x)) {
                        return true;
                    }
                }
                (Constraint::Distinct { pairs }, CState::Bits(b)) => {
                    for (i, &(x, y)) in pairs.iter().enumerate() {
                        if bit(ended, x) && bit(ended, y) && !bit(b, i) {
                            return true;
                        }
                    }
                }
                _ => {}
            }
        }
        false
    }

    /// Advances an automaton subset on the letters of `tracks`; a component
    /// whose tracks have all ended stays where it is.
    fn step_set(nfa: &Nfa, tracks: &[usize], set: &[StateId], tuple: &[Symbol], pad: Symbol) -> States {
        if tracks.iter().all(|&t| tuple[t] == pad) {
            return SmallVec::from_slice(set);
        }
        let mut next = States::new();
        for &s in set {
            for e in nfa.edges(s) {
                if tracks.iter().enumerate().all(|(i, &t)| e.guard.track(i).contains(tuple[t])) {
                    next.push(e.to);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        next
    }

    fn step_closed(
        &self,
        rel: &Nfa,
        center: usize,
        allowed: &[usize],
        ts: &[(StateId, u64, bool)],
        tuple: &[Symbol],
    ) -> Vec<(StateId, u64, bool)> {
        let pad = self.pad;
        let xc = tuple[center];
        let mask_for = |y: Symbol| -> u64 {
            let mut m = 0u64;
            for (i, &q) in allowed.iter().enumerate() {
                if tuple[q] == y {
                    m |= 1 << i;
                }
            }
            m
        };
        let pad_mask = mask_for(pad);
        let mut out = Vec::new();
        for &(g, eq, ve) in ts {
            // v ends here (or has ended).
            if xc == pad {
                out.push((g, eq & pad_mask, true));
            } else {
                for e in rel.edges(g) {
                    if e.guard.track(0).contains(xc) && e.guard.track(1).contains(pad) {
                        out.push((e.to, eq & pad_mask, true));
                    }
                }
            }
            if ve {
                continue;
            }
            for e in rel.edges(g) {
                if !e.guard.track(0).contains(xc) {
                    continue;
                }
                let ys = e.guard.track(1).and(&self.letters);
                if ys.is_empty() {
                    continue;
                }
                let mut rest = ys;
                for &q in allowed {
                    let y = tuple[q];
                    if y != pad && ys.contains(y) {
                        rest.remove(y);
                        out.push((e.to, eq & mask_for(y), false));
                    }
                }
                if !rest.is_empty() {
                    out.push((e.to, 0, false));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn successors(&self, s: &PState, out: &mut Vec<(Vec<Symbol>, PState)>) {
        let n = self.q.tracks;
        // Per-track letter options from the positive constraints.
        let mut options: Vec<SymbolSet> = Vec::with_capacity(n);
        let full = self.letters.or(&SymbolSet::single(self.pad));
        for t in 0..n {
            let mut o = if bit(&s.ended, t) { SymbolSet::single(self.pad) } else { full };
            for &ci in &self.touching[t] {
                let p = &self.prep[ci];
                let nfa = p.nfa.as_ref().unwrap();
                let CState::Set(set) = &s.comps[ci] else { unreachable!() };
                if p.tracks.iter().all(|&x| bit(&s.ended, x)) {
                    continue;
                }
                let pos: Vec<usize> = p.tracks.iter().enumerate().filter(|(_, &x)| x == t).map(|(i, _)| i).collect();
                let mut u = SymbolSet::EMPTY;
                for &st in set {
                    for e in nfa.edges(st) {
                        let mut g = full;
                        for &i in &pos {
                            g = g.and(e.guard.track(i));
                        }
                        u = u.or(&g);
                    }
                }
                // A component may also be frozen if all its tracks end now.
                u.insert(self.pad);
                o = o.and(&u);
            }
            options.push(o);
        }
        if options.iter().any(SymbolSet::is_empty) {
            return;
        }
        let mut tuple = vec![self.pad; n];
        let mut accept_states: Vec<Option<States>> = vec![None; self.q.constraints.len()];
        self.assign(s, 0, &options, &mut tuple, &mut accept_states, out);
    }

    fn assign(
        &self,
        s: &PState,
        t: usize,
        options: &[SymbolSet],
        tuple: &mut Vec<Symbol>,
        accept_states: &mut Vec<Option<States>>,
        out: &mut Vec<(Vec<Symbol>, PState)>,
    ) {
        let n = self.q.tracks;
        if t == n {
            if tuple.iter().all(|&x| x == self.pad) {
                return;
            }
            let mut ended = s.ended.clone();
            for (i, &x) in tuple.iter().enumerate() {
                if x == self.pad {
                    set_bit(&mut ended, i);
                }
            }
            let mut comps = Vec::with_capacity(s.comps.len());
            for (ci, (c, st)) in self.q.constraints.iter().zip(&s.comps).enumerate() {
                let next = match (c, st) {
                    (Constraint::Accept { .. }, _) => CState::Set(accept_states[ci].clone().unwrap()),
                    (Constraint::Reject { nfa, tracks }, CState::Set(set)) => {
                        CState::Set(Self::step_set(nfa, tracks, set, tuple, self.pad))
                    }
                    (Constraint::Distinct { pairs }, CState::Bits(b)) => {
                        let mut b = b.clone();
                        for (i, &(x, y)) in pairs.iter().enumerate() {
                            if tuple[x] != tuple[y] {
                                set_bit(&mut b, i);
                            }
                        }
                        CState::Bits(b)
                    }
                    (Constraint::Closed { rel, center, allowed }, CState::Triples(ts)) => {
                        CState::Triples(self.step_closed(rel, *center, allowed, ts, tuple))
                    }
                    _ => unreachable!(),
                };
                comps.push(next);
            }
            if self.settled_failure(&ended, &comps) {
                return;
            }
            out.push((tuple.clone(), PState { ended, comps }));
            return;
        }
        for x in options[t].iter() {
            tuple[t] = x;
            if !self.partially_consistent(s, t, tuple) || self.settles_badly(s, t, tuple) {
                continue;
            }
            let mut ok = true;
            let mut touched = Vec::new();
            for &ci in &self.completes_at[t] {
                let (Constraint::Accept { nfa, tracks }, CState::Set(set)) =
                    (&self.q.constraints[ci], &s.comps[ci])
                else {
                    unreachable!()
                };
                let mut next = Self::step_set(nfa, tracks, set, tuple, self.pad);
                let live = &self.prep[ci].live;
                next.retain(|x| live[*x as usize]);
                if next.is_empty() {
                    ok = false;
                    break;
                }
                accept_states[ci] = Some(next);
                touched.push(ci);
            }
            if ok {
                self.assign(s, t + 1, options, tuple, accept_states, out);
            }
            for ci in touched {
                accept_states[ci] = None;
            }
        }
        tuple[t] = self.pad;
    }

    /// Whether a distinct pair or a rejected tuple completed at track `t`
    /// ends in violation with the letters chosen so far.
    fn settles_badly(&self, s: &PState, t: usize, tuple: &[Symbol]) -> bool {
        if tuple[t] != self.pad {
            return false;
        }
        for &(ci, i, other) in &self.pairs_at[t] {
            let CState::Bits(b) = &s.comps[ci] else { unreachable!() };
            if tuple[other] == self.pad && !bit(b, i) {
                return true;
            }
        }
        for &ci in &self.rejects_at[t] {
            let p = &self.prep[ci];
            if p.tracks.iter().all(|&x| tuple[x] == self.pad) {
                let CState::Set(set) = &s.comps[ci] else { unreachable!() };
                if set.iter().any(|&x| p.nfa.as_ref().unwrap().is_final(x)) {
                    return true;
                }
            }
        }
        false
    }

    /// Whether every positive constraint touching track `t` has a live
    /// transition agreeing with the letters chosen for tracks up to `t`.
    fn partially_consistent(&self, s: &PState, t: usize, tuple: &[Symbol]) -> bool {
        for &ci in &self.touching[t] {
            let p = &self.prep[ci];
            if self.completes_at[t].contains(&ci) {
                continue;
            }
            let CState::Set(set) = &s.comps[ci] else { unreachable!() };
            let assigned = |i: usize| p.tracks[i] <= t;
            if p.tracks.iter().enumerate().all(|(i, &x)| !assigned(i) || tuple[x] == self.pad) {
                continue;
            }
            let nfa = p.nfa.as_ref().unwrap();
            let ok = set.iter().any(|&st| {
                nfa.edges(st).iter().any(|e| {
                    p.live[e.to as usize]
                        && p.tracks.iter().enumerate().all(|(i, &x)| !assigned(i) || e.guard.track(i).contains(tuple[x]))
                })
            });
            if !ok {
                return false;
            }
        }
        true
    }

    /// Depth-first search for a satisfying tuple.
    pub fn find(&self) -> Result<(Option<Vec<Vec<Symbol>>>, ExploreStats)> {
        let start = self.initial();
        let mut visited: FxHashSet<PState> = FxHashSet::default();
        visited.insert(start.clone());
        // Each frame: remaining successors and the tuple that led here.
        let mut path: Vec<Vec<Symbol>> = Vec::new();
        if self.accepting(&start) {
            return Ok((Some(vec![Vec::new(); self.q.tracks]), ExploreStats { states: 1 }));
        }
        let mut first = Vec::new();
        self.successors(&start, &mut first);
        let mut stack: Vec<Vec<(Vec<Symbol>, PState)>> = vec![first];
        while let Some(frame) = stack.last_mut() {
            let Some((tuple, next)) = frame.pop() else {
                stack.pop();
                path.pop();
                continue;
            };
            if visited.contains(&next) {
                continue;
            }
            if visited.len() >= self.budget {
                return Err(Error::Resource(format!(
                    "exploration exceeded {} product states",
                    self.budget
                )));
            }
            path.push(tuple);
            if self.accepting(&next) {
                let mut words = vec![Vec::new(); self.q.tracks];
                for t in &path {
                    for (i, &x) in t.iter().enumerate() {
                        if x != self.pad {
                            words[i].push(x);
                        }
                    }
                }
                return Ok((Some(words), ExploreStats { states: visited.len() }));
            }
            let mut succ = Vec::new();
            self.successors(&next, &mut succ);
            visited.insert(next);
            stack.push(succ);
        }
        Ok((None, ExploreStats { states: visited.len() }))
    }
}

/// Runs a query, returning a satisfying word tuple if one exists.
pub fn find(q: &Query, budget: usize) -> Result<(Option<Vec<Vec<Symbol>>>, ExploreStats)> {
    Explorer::new(q, budget)?.find()
}
