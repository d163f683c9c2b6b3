//! Deterministic Turing machines on a tape of fixed width.
//!
//! A configuration is written as a string over `Q ∪ Γ`: the tape with the
//! state symbol inserted just before the scanned cell, so a tape of `c`
//! cells gives a configuration of length `c + 1`.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

/// One transition `(state, read) → (next, write, move)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition(pub String, pub String, pub String, pub String, pub Move);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: String,
    pub input_alphabet: Vec<String>,
    pub tape_alphabet: Vec<String>,
    pub blank: String,
    pub transitions: Vec<Transition>,
}

/// A symbol of a configuration string: a state or a tape letter, by index
/// into `states` followed by `tape_alphabet`.
pub type Cell = usize;

/// Outcome of a run on a bounded tape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub accepted: bool,
    /// Configurations visited, first to last.
    pub trace: Vec<Vec<Cell>>,
}

/// Pairs of aligned three-letter windows `(before, after)` over `Ω ∪ {#}`,
/// where `#` (encoded as `omega()`) marks a configuration boundary.
pub type Windows = HashSet<([Cell; 3], [Cell; 3])>;

impl TuringMachine {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: TuringMachine = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("machines serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Malformed(format!("turing machine: {m}")));
        let mut names = BTreeSet::new();
        for n in self.states.iter().chain(&self.tape_alphabet) {
            if n.is_empty() || !names.insert(n.as_str()) {
                return bad(format!("symbol {n:?} is empty or not unique across states and tape letters"));
            }
        }
        if !self.states.contains(&self.initial) || !self.states.contains(&self.accepting) {
            return bad("initial and accepting states must be listed".into());
        }
        if self.initial == self.accepting {
            return bad("initial and accepting states must differ".into());
        }
        if !self.tape_alphabet.contains(&self.blank) || self.input_alphabet.contains(&self.blank) {
            return bad("the blank must be a tape letter outside the input alphabet".into());
        }
        if let Some(a) = self.input_alphabet.iter().find(|a| !self.tape_alphabet.contains(a)) {
            return bad(format!("input letter {a:?} is not a tape letter"));
        }
        let mut seen = HashSet::new();
        for Transition(q, a, p, b, _) in &self.transitions {
            if !self.states.contains(q) || !self.states.contains(p) {
                return bad(format!("transition uses an unknown state ({q:?} or {p:?})"));
            }
            if !self.tape_alphabet.contains(a) || !self.tape_alphabet.contains(b) {
                return bad(format!("transition uses an unknown letter ({a:?} or {b:?})"));
            }
            if q == &self.accepting {
                return bad("the accepting state has an outgoing transition".into());
            }
            if !seen.insert((q, a)) {
                return bad(format!("two transitions for ({q}, {a})"));
            }
        }
        Ok(())
    }

    /// Number of configuration symbols `|Q| + |Γ|`.
    pub fn omega(&self) -> usize {
        self.states.len() + self.tape_alphabet.len()
    }

    /// Name of a configuration symbol.
    pub fn name(&self, c: Cell) -> &str {
        if c < self.states.len() {
            &self.states[c]
        } else {
            &self.tape_alphabet[c - self.states.len()]
        }
    }

    pub fn is_state(&self, c: Cell) -> bool {
        c < self.states.len()
    }

    pub fn state(&self, name: &str) -> Cell {
        self.states.iter().position(|s| s == name).expect("known state")
    }

    pub fn letter(&self, name: &str) -> Result<Cell> {
        self.tape_alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| self.states.len() + i)
            .ok_or_else(|| Error::Usage(format!("{name:?} is not a tape letter")))
    }

    pub fn input_letters(&self) -> Vec<Cell> {
        self.input_alphabet.iter().map(|a| self.letter(a).unwrap()).collect()
    }

    pub fn tape_letters(&self) -> Vec<Cell> {
        (self.states.len()..self.omega()).collect()
    }

    /// Splits an input word into letters: characters when every input
    /// letter is one character, whitespace-separated names otherwise.
    pub fn parse_input(&self, text: &str) -> Result<Vec<Cell>> {
        let parts: Vec<String> = if self.input_alphabet.iter().all(|a| a.chars().count() == 1) {
            text.chars().map(String::from).collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        parts
            .iter()
            .map(|p| {
                if self.input_alphabet.contains(p) {
                    self.letter(p)
                } else {
                    Err(Error::Usage(format!("{p:?} is not an input letter")))
                }
            })
            .collect()
    }

    fn delta(&self, q: Cell, a: Cell) -> Option<(Cell, Cell, Move)> {
        let (qn, an) = (self.name(q), self.name(a));
        self.transitions
            .iter()
            .find(|t| t.0 == qn && t.1 == an)
            .map(|t| (self.state(&t.2), self.letter(&t.3).unwrap(), t.4))
    }

    /// The successor of a configuration of the same length, if the machine
    /// has a transition and the head stays on the tape.
    pub fn step(&self, u: &[Cell]) -> Option<Vec<Cell>> {
        let p = u.iter().position(|&c| self.is_state(c))?;
        let a = *u.get(p + 1)?;
        let (q2, b, mv) = self.delta(u[p], a)?;
        let mut v = u.to_vec();
        match mv {
            Move::S => {
                v[p] = q2;
                v[p + 1] = b;
            }
            Move::R => {
                if p + 2 >= u.len() {
                    return None;
                }
                v[p] = b;
                v[p + 1] = q2;
            }
            Move::L => {
                if p == 0 {
                    return None;
                }
                v[p - 1] = q2;
                v[p] = u[p - 1];
                v[p + 1] = b;
            }
        }
        Some(v)
    }

    /// Whether `u` is a configuration: exactly one state, followed by at
    /// least one tape letter.
    pub fn is_configuration(&self, u: &[Cell]) -> bool {
        let states: Vec<usize> = (0..u.len()).filter(|&i| self.is_state(u[i])).collect();
        states.len() == 1 && states[0] + 1 < u.len() && u.iter().all(|&c| c < self.omega())
    }

    /// The initial configuration on a tape of `cells` cells, or `None`
    /// when the input does not fit.
    pub fn initial_configuration(&self, input: &[Cell], cells: usize) -> Option<Vec<Cell>> {
        if input.len() > cells || cells == 0 {
            return None;
        }
        let blank = self.letter(&self.blank).unwrap();
        let mut u = vec![self.state(&self.initial)];
        u.extend_from_slice(input);
        u.resize(cells + 1, blank);
        Some(u)
    }

    /// Runs on a tape of `cells` cells. Falling off the tape, a missing
    /// transition, or a repeated configuration means rejection.
    pub fn run(&self, input: &[Cell], cells: usize) -> Run {
        let accept = self.state(&self.accepting);
        let Some(mut u) = self.initial_configuration(input, cells) else {
            return Run { accepted: false, trace: Vec::new() };
        };
        let mut seen = HashSet::new();
        let mut trace = Vec::new();
        loop {
            trace.push(u.clone());
            if u.contains(&accept) {
                return Run { accepted: true, trace };
            }
            if !seen.insert(u.clone()) {
                trace.pop();
                return Run { accepted: false, trace };
            }
            match self.step(&u) {
                Some(v) => u = v,
                None => return Run { accepted: false, trace },
            }
        }
    }

    /// The local consistency relation: all aligned window pairs of
    /// `#u#` and `#v#` over steps `u ⊢ v`. For configurations `u`, `v` of
    /// equal length, `u ⊢ v` iff every aligned window pair belongs to it.
    pub fn windows(&self) -> Windows {
        let hash = self.omega();
        let mut out = Windows::new();
        // Every window's successor depends on at most six consecutive
        // cells, so configurations up to length 8 exhibit all of them.
        for len in 2..=8 {
            for u in self.configurations(len) {
                if let Some(v) = self.step(&u) {
                    let bu: Vec<Cell> = std::iter::once(hash).chain(u).chain(std::iter::once(hash)).collect();
                    let bv: Vec<Cell> = std::iter::once(hash).chain(v).chain(std::iter::once(hash)).collect();
                    for i in 0..bu.len() - 2 {
                        out.insert(([bu[i], bu[i + 1], bu[i + 2]], [bv[i], bv[i + 1], bv[i + 2]]));
                    }
                }
            }
        }
        out
    }

    /// All configurations of length `len` from which some transition
    /// applies.
    fn configurations(&self, len: usize) -> Vec<Vec<Cell>> {
        let tape = self.tape_letters();
        let movable: Vec<(Cell, Cell)> = self
            .transitions
            .iter()
            .map(|t| (self.state(&t.0), self.letter(&t.1).unwrap()))
            .collect();
        let mut out = Vec::new();
        for p in 0..len - 1 {
            for &(q, a) in &movable {
                let mut fills = vec![Vec::new()];
                for _ in 0..len - 2 {
                    fills = fills
                        .into_iter()
                        .flat_map(|f: Vec<Cell>| {
                            tape.iter().map(move |&t| {
                                let mut g = f.clone();
                                g.push(t);
                                g
                            })
                        })
                        .collect();
                }
                for f in fills {
                    let mut u = f[..p].to_vec();
                    u.push(q);
                    u.push(a);
                    u.extend_from_slice(&f[p..]);
                    out.push(u);
                }
            }
        }
        out
    }

    /// Window criterion for `u ⊢ v`.
    pub fn consistent(windows: &Windows, hash: Cell, u: &[Cell], v: &[Cell]) -> bool {
        if u.len() != v.len() {
            return false;
        }
        let bu: Vec<Cell> = std::iter::once(hash).chain(u.iter().copied()).chain(std::iter::once(hash)).collect();
        let bv: Vec<Cell> = std::iter::once(hash).chain(v.iter().copied()).chain(std::iter::once(hash)).collect();
        (0..bu.len() - 2).all(|i| windows.contains(&([bu[i], bu[i + 1], bu[i + 2]], [bv[i], bv[i + 1], bv[i + 2]])))
    }
}

/// Small machines used in examples and tests, as `(name, machine)`.
pub fn tiny_machines() -> Vec<(&'static str, TuringMachine)> {
    let tm = |trans: &[(&str, &str, &str, &str, Move)], states: &[&str]| TuringMachine {
        states: states.iter().map(|s| s.to_string()).collect(),
        initial: "q0".into(),
        accepting: "qf".into(),
        input_alphabet: vec!["a".into(), "b".into()],
        tape_alphabet: vec!["a".into(), "b".into(), "B".into()],
        blank: "B".into(),
        transitions: trans
            .iter()
            .map(|&(q, a, p, b, m)| Transition(q.into(), a.into(), p.into(), b.into(), m))
            .collect(),
    };
    vec![
        // Accepts exactly the words starting with `a`.
        ("immediate", tm(&[("q0", "a", "qf", "a", Move::S)], &["q0", "qf"])),
        // Never reaches the accepting state.
        ("never", tm(&[("q0", "a", "q0", "a", Move::S), ("q0", "b", "q0", "a", Move::S)], &["q0", "qf"])),
        // Accepts when the last input letter is `b`: walks right to the
        // first blank, steps back and inspects the letter.
        (
            "ends-in-b",
            tm(
                &[
                    ("q0", "a", "q0", "a", Move::R),
                    ("q0", "b", "q0", "b", Move::R),
                    ("q0", "B", "q1", "B", Move::L),
                    ("q1", "b", "qf", "b", Move::S),
                ],
                &["q0", "q1", "qf"],
            ),
        ),
        // Rewrites the first letter to `b`, then accepts on reading `b`
        // one cell to the right.
        (
            "second-is-b",
            tm(
                &[("q0", "a", "q1", "b", Move::R), ("q0", "b", "q1", "b", Move::R), ("q1", "b", "qf", "b", Move::S)],
                &["q0", "q1", "qf"],
            ),
        ),
    ]
}
