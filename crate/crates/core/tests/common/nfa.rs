//! Random small automata and brute-force language oracles.

use std::sync::Arc;

use autstruct::automata::{Alphabet, Cube, Nfa, StateId, Symbol, SymbolSet};
use rand::Rng;

use super::words;

pub fn ab() -> Arc<Alphabet> {
    Alphabet::new(["a", "b"], "_").unwrap()
}

/// A random automaton with at most `max_states` states. Guards are
/// random non-empty letter sets, occasionally containing the padding.
pub fn random_nfa<R: Rng>(rng: &mut R, al: &Arc<Alphabet>, tracks: usize, max_states: usize) -> Nfa {
    let full: Vec<Symbol> = al.full_set().iter().collect();
    let pad = al.pad();
    let mut a = Nfa::new(al.clone(), tracks);
    let n = rng.gen_range(1..=max_states);
    for _ in 0..n {
        a.add_state(rng.gen_bool(0.4));
    }
    a.set_initial(0);
    if n > 1 && rng.gen_bool(0.3) {
        a.set_initial(rng.gen_range(1..n) as StateId);
    }
    for s in 0..n {
        for _ in 0..rng.gen_range(0..=3) {
            let sets: Vec<SymbolSet> = (0..tracks)
                .map(|_| loop {
                    let set: SymbolSet =
                        full.iter().copied().filter(|&x| rng.gen_bool(if x == pad { 0.15 } else { 0.5 })).collect();
                    if !set.is_empty() {
                        break set;
                    }
                })
                .collect();
            a.add_edge(s as StateId, Cube(sets), rng.gen_range(0..n) as StateId);
        }
    }
    a
}

/// Every tuple of `tracks` words over the letters of `al`, each of length
/// at most `max_len`.
pub fn word_tuples(al: &Alphabet, tracks: usize, max_len: usize) -> Vec<Vec<Vec<Symbol>>> {
    let letters: Vec<Symbol> = al.letter_set().iter().collect();
    let ws = words(&letters, max_len);
    let mut out: Vec<Vec<Vec<Symbol>>> = vec![vec![]];
    for _ in 0..tracks {
        out = out
            .into_iter()
            .flat_map(|t| {
                ws.iter().map(move |w| {
                    let mut u = t.clone();
                    u.push(w.clone());
                    u
                })
            })
            .collect();
    }
    out
}

/// Whether some extension of `kept` (words on tracks `keep`) by words of
/// length at most `max_len` on the other tracks is accepted.
pub fn projection_accepts(a: &Nfa, keep: &[usize], kept: &[Vec<Symbol>], max_len: usize) -> bool {
    let others = a.tracks() - keep.len();
    word_tuples(a.alphabet(), others, max_len).into_iter().any(|rest| {
        let mut rest = rest.into_iter();
        let full: Vec<Vec<Symbol>> = (0..a.tracks())
            .map(|t| match keep.iter().position(|&k| k == t) {
                Some(i) => kept[i].clone(),
                None => rest.next().unwrap(),
            })
            .collect();
        a.accepts_words(&full)
    })
}
