//! Finite images of a word under a two-track relation.

use std::collections::BTreeSet;

use super::alphabet::{Symbol, SymbolSet};
use super::nfa::{Nfa, StateId};
use crate::error::{Error, Result};

/// The words related to a fixed left component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub words: BTreeSet<Vec<Symbol>>,
    /// Set when some related word is longer than the cutoff.
    pub truncated: bool,
}

/// `{v | (u, v) ∈ R(a), |v| ≤ max_len}`.
pub fn image(a: &Nfa, u: &[Symbol], max_len: usize) -> Result<Image> {
    if a.tracks() != 2 {
        return Err(Error::Dimension("image needs a two-track automaton".into()));
    }
    if max_len < u.len() {
        return Err(Error::Precondition(format!(
            "cutoff {max_len} is shorter than the input word ({})",
            u.len()
        )));
    }
    let pad = a.pad();
    let n = a.num_states();
    let letters = a.alphabet().letter_set();
    // live[j]: states that may still accept after reading j letters of u.
    let tail = {
        let mut live = vec![false; n];
        for f in a.finals() {
            live[f as usize] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if live[s] {
                    continue;
                }
                if a.edges(s as StateId).iter().any(|e| {
                    e.guard.track(0).contains(pad)
                        && !e.guard.track(1).and(&letters).is_empty()
                        && live[e.to as usize]
                }) {
                    live[s] = true;
                    changed = true;
                }
            }
        }
        live
    };
    let mut live = vec![tail.clone(); u.len() + 1];
    for j in (0..u.len()).rev() {
        let mut cur = vec![false; n];
        for (s, slot) in cur.iter_mut().enumerate() {
            *slot = a.edges(s as StateId).iter().any(|e| {
                e.guard.track(0).contains(u[j]) && live[j + 1][e.to as usize]
            });
        }
        live[j] = cur;
    }
    let mut out = Image { words: BTreeSet::new(), truncated: false };
    let mut start: Vec<StateId> = a.initial().iter().copied().filter(|&s| live[0][s as usize]).collect();
    start.sort_unstable();
    start.dedup();
    let mut v = Vec::new();
    search(a, u, max_len, &live, &tail, start, 0, false, &mut v, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &Nfa,
    u: &[Symbol],
    max_len: usize,
    live: &[Vec<bool>],
    tail: &[bool],
    states: Vec<StateId>,
    j: usize,
    v_ended: bool,
    v: &mut Vec<Symbol>,
    out: &mut Image,
) {
    if states.is_empty() {
        return;
    }
    let pad = a.pad();
    if j >= u.len() {
        if states.iter().any(|&s| a.is_final(s)) {
            out.words.insert(v.clone());
        }
        if v_ended {
            return;
        }
        if v.len() >= max_len {
            // Any further letter on v would exceed the cutoff.
            let letters = a.alphabet().letter_set();
            if states.iter().any(|&s| {
                a.edges(s).iter().any(|e| {
                    e.guard.track(0).contains(pad)
                        && !e.guard.track(1).and(&letters).is_empty()
                        && tail[e.to as usize]
                })
            }) {
                out.truncated = true;
            }
            return;
        }
    }
    let ulet = if j < u.len() { u[j] } else { pad };
    let mut options = SymbolSet::EMPTY;
    for &s in &states {
        for e in a.edges(s) {
            if e.guard.track(0).contains(ulet) {
                options = options.or(e.guard.track(1));
            }
        }
    }
    for x in options.iter() {
        let is_pad = x == pad;
        if v_ended && !is_pad {
            continue;
        }
        if !is_pad && v.len() >= max_len {
            continue;
        }
        if is_pad && ulet == pad {
            continue;
        }
        let live_next = if j < u.len() { &live[j + 1] } else { &live[u.len()] };
        let mut next: Vec<StateId> = Vec::new();
        for &s in &states {
            for e in a.edges(s) {
                if e.guard.track(0).contains(ulet)
                    && e.guard.track(1).contains(x)
                    && live_next[e.to as usize]
                {
                    next.push(e.to);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        if !is_pad {
            v.push(x);
        }
        search(a, u, max_len, live, tail, next, j + 1, v_ended || is_pad, v, out);
        if !is_pad {
            v.pop();
        }
    }
}
