//! A small zoo of example presentations.

use std::sync::Arc;

use indexmap::IndexMap;

use crate::automata::{Alphabet, Cube, Nfa, SymbolSet};
use crate::error::{Error, Result};
use crate::presentation::{Presentation, Relation};

pub const BUILTIN_NAMES: [&str; 5] = ["nat-succ", "prefix", "intermediate-tree", "e1", "e2"];

/// Letter set from a `|`-separated list of names, or `*` for every
/// non-padding letter.
pub(crate) fn letters(alphabet: &Alphabet, spec: &str) -> SymbolSet {
    if spec == "*" {
        return alphabet.letter_set();
    }
    spec.split('|').map(|n| alphabet.symbol(n).expect("builtin letter")).collect()
}

pub(crate) fn edge(a: &mut Nfa, from: u32, spec: &[&str], to: u32) {
    let cube = Cube(spec.iter().map(|s| letters(a.alphabet(), s)).collect());
    a.add_edge(from, cube, to);
}

/// One-track automaton accepting `letters*`.
pub(crate) fn star(alphabet: &Arc<Alphabet>, spec: &str) -> Nfa {
    let mut a = Nfa::new(alphabet.clone(), 1);
    let s = a.add_state(true);
    a.set_initial(s);
    edge(&mut a, s, &[spec], s);
    a
}

fn relations(items: Vec<(&str, Nfa)>) -> IndexMap<String, Relation> {
    items
        .into_iter()
        .map(|(n, a)| (n.to_string(), Relation { arity: a.tracks(), nfa: Arc::new(a) }))
        .collect()
}

/// `(ℕ, succ)` with `n` written as `aⁿ`.
pub fn nat_succ() -> Presentation {
    let al = Alphabet::new(["a"], "_").unwrap();
    let mut succ = Nfa::new(al.clone(), 2);
    let s = succ.add_state(false);
    let f = succ.add_state(true);
    succ.set_initial(s);
    edge(&mut succ, s, &["a", "a"], s);
    edge(&mut succ, s, &["_", "a"], f);
    Presentation::new(al.clone(), star(&al, "a"), None, relations(vec![("succ", succ)])).unwrap()
}

/// Binary words with the two successor functions and the prefix order.
pub fn prefix() -> Presentation {
    let al = Alphabet::new(["0", "1"], "_").unwrap();
    let append = |b: &str| {
        let mut a = Nfa::new(al.clone(), 2);
        let s = a.add_state(false);
        let f = a.add_state(true);
        a.set_initial(s);
        for x in ["0", "1"] {
            edge(&mut a, s, &[x, x], s);
        }
        edge(&mut a, s, &["_", b], f);
        a
    };
    let mut le = Nfa::new(al.clone(), 2);
    let s = le.add_state(true);
    let t = le.add_state(true);
    le.set_initial(s);
    for x in ["0", "1"] {
        edge(&mut le, s, &[x, x], s);
    }
    edge(&mut le, s, &["_", "*"], t);
    edge(&mut le, t, &["_", "*"], t);
    let rels = relations(vec![("s0", append("0")), ("s1", append("1")), ("prefix", le)]);
    Presentation::new(al.clone(), star(&al, "*"), None, rels).unwrap()
}

/// A binary tree whose edges from depth `n` are stretched into paths of
/// length `n + 1`, written over `{0,1}*${0,1}*`.
pub fn intermediate_tree() -> Presentation {
    let al = Alphabet::new(["0", "1", "$"], "_").unwrap();
    let mut dom = Nfa::new(al.clone(), 1);
    let s = dom.add_state(false);
    let t = dom.add_state(true);
    dom.set_initial(s);
    edge(&mut dom, s, &["0|1"], s);
    edge(&mut dom, s, &["$"], t);
    edge(&mut dom, t, &["0|1"], t);

    let mut e = Nfa::new(al.clone(), 2);
    // (u$bv, ub$v)
    let pre = e.add_state(false);
    let moved = [e.add_state(false), e.add_state(false)];
    let post = e.add_state(true);
    // (u$, $ub)
    let shift_start = e.add_state(false);
    let carry = [e.add_state(false), e.add_state(false)];
    let wait = e.add_state(false);
    let done = e.add_state(true);
    e.set_initial(pre);
    e.set_initial(shift_start);
    for (i, b) in ["0", "1"].into_iter().enumerate() {
        edge(&mut e, pre, &[b, b], pre);
        edge(&mut e, pre, &["$", b], moved[i]);
        edge(&mut e, moved[i], &[b, "$"], post);
        edge(&mut e, post, &[b, b], post);
        edge(&mut e, shift_start, &[b, "$"], carry[i]);
        for (j, c) in ["0", "1"].into_iter().enumerate() {
            edge(&mut e, carry[i], &[c, b], carry[j]);
        }
        edge(&mut e, carry[i], &["$", b], wait);
    }
    edge(&mut e, shift_start, &["$", "$"], wait);
    edge(&mut e, wait, &["_", "0|1"], done);
    Presentation::new(al.clone(), dom, None, relations(vec![("E", e)])).unwrap()
}

/// `({a,b}*, E_n)` with `E_n = {(uw, vw) : |u| = |v| = n}`.
pub fn e_n(n: usize) -> Presentation {
    let al = Alphabet::new(["a", "b"], "_").unwrap();
    let mut e = Nfa::new(al.clone(), 2);
    let states: Vec<u32> = (0..=n).map(|i| e.add_state(i == n)).collect();
    e.set_initial(states[0]);
    for i in 0..n {
        edge(&mut e, states[i], &["*", "*"], states[i + 1]);
    }
    for x in ["a", "b"] {
        edge(&mut e, states[n], &[x, x], states[n]);
    }
    Presentation::new(al.clone(), star(&al, "*"), None, relations(vec![("E", e)])).unwrap()
}

pub fn builtin(name: &str) -> Result<Presentation> {
    match name {
        "nat-succ" => Ok(nat_succ()),
        "prefix" => Ok(prefix()),
        "intermediate-tree" => Ok(intermediate_tree()),
        "e1" => Ok(e_n(1)),
        "e2" => Ok(e_n(2)),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}
