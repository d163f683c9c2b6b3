//! Presentations of degree at most two whose first-order theory encodes
//! acceptance of an exponentially space-bounded machine.
//!
//! A witness `x` lists the configurations `c₁ # c₂ # … # cₖ #` of an
//! accepting run on `m − 1` cells. Pairing `x` with itself and rotating
//! the first component `m` times lines up every configuration with its
//! successor, where a single automaton checks the window relation.

use std::collections::{HashMap, VecDeque};

use super::encoding::Encoding;
use super::machine::{Cell, TuringMachine, Windows};
use super::regex::{cat, plus, star};
use super::{power, ReductionMetadata, ReductionOutput};
use crate::automata::ops::product;
use crate::automata::{Cube, Nfa, StateId, SymbolSet};
use crate::error::{Error, Result};
use crate::logic::formula::{and_all, exists, rel, Formula};

/// Largest input length for which `2ⁿ` cells are generated.
pub const MAX_INPUT: usize = 20;

/// `(Γ* Q Γ⁺ #)⁺ ∩ q₀ Σ* □* # Δ* ∩ Δ* q_f (Δ∖#)* #`.
pub(crate) fn configurations(e: &Encoding) -> Result<Nfa> {
    let tm = &e.tm;
    let hash = SymbolSet::single(e.hash);
    let delta = e.delta_set();
    let blank = e.cells(&[tm.letter(&tm.blank)?]);
    let q0 = e.cells(&[tm.state(&tm.initial)]);
    let qf = e.cells(&[tm.state(&tm.accepting)]);
    let one = |s| e.one(s);
    let shape = plus(cat([star(one(e.tape())), one(e.states()), plus(one(e.tape())), one(hash)]));
    let start = cat([one(q0), star(one(e.input())), star(one(blank)), one(hash), star(one(delta))]);
    let end = cat([star(one(delta)), one(qf), star(one(delta.minus(&hash))), one(hash)]);
    let parts: Vec<Nfa> = [shape, start, end].iter().map(|r| e.compile(1, r)).collect();
    Ok(product(&product(&parts[0], &parts[1])?, &parts[2])?.reduce())
}

/// `{(a s ⊗ w, s a ⊗ w) | a ∈ Ω, w ∈ lang}` for `first` letters `a`:
/// rotates the first component of a pair word by one letter.
fn rotate_word(e: &Encoding, lang: &Nfa) -> Result<Nfa> {
    let mut a = Nfa::new(e.alphabet.clone(), 2);
    let start = a.add_state(false);
    a.set_initial(start);
    let mut ids: HashMap<(u8, u8), StateId> = HashMap::new();
    for &f in &e.omega {
        for &p in &e.delta {
            ids.insert((f, p), a.add_state(f == p));
        }
    }
    for &f in &e.omega {
        for &r in &e.delta {
            for &w in &e.delta {
                let g = Cube::point(&[e.pair(Some(f), Some(w)), e.pair(Some(r), Some(w))]);
                a.add_edge(start, g, ids[&(f, r)]);
                for &p in &e.delta {
                    let g = Cube::point(&[e.pair(Some(p), Some(w)), e.pair(Some(r), Some(w))]);
                    a.add_edge(ids[&(f, p)], g, ids[&(f, r)]);
                }
            }
        }
    }
    let check = e.lift(lang, 2, 0, &|g| e.second_in(g), SymbolSet::EMPTY);
    Ok(product(&a, &check)?.reduce())
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Scan {
    /// Between blocks; whether a checked block was seen.
    Boundary(bool),
    /// Inside a checked block: pending letters of the later and the
    /// earlier configuration, aligned at the same offset.
    Checked(Vec<Cell>, Vec<Cell>),
    Last,
    Done,
}

/// Pair words `[#,v₁][u₁,v₂]…[uₖ,#]` block by block, where every block
/// but the last has `u ⊢ v` reversed (`v` is the earlier configuration)
/// under the window relation, and the last block is unchecked.
pub(crate) fn successor_blocks(e: &Encoding, windows: &Windows) -> Nfa {
    let hash = e.tm.omega();
    let omega: Vec<Cell> = (0..hash).collect();
    let mut a = Nfa::new(e.alphabet.clone(), 1);
    let mut ids: HashMap<Scan, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let id = |a: &mut Nfa, s: Scan, queue: &mut VecDeque<Scan>, ids: &mut HashMap<Scan, StateId>| -> StateId {
        *ids.entry(s.clone()).or_insert_with(|| {
            queue.push_back(s.clone());
            a.add_state(s == Scan::Done)
        })
    };
    let init = id(&mut a, Scan::Boundary(false), &mut queue, &mut ids);
    a.set_initial(init);
    let letter = |x: Cell, y: Cell| {
        let s = |c: Cell| if c == hash { e.hash } else { e.omega[c] };
        Cube::point(&[e.pair(Some(s(x)), Some(s(y)))])
    };
    let holds = |u: &[Cell], v: &[Cell]| windows.contains(&([v[0], v[1], v[2]], [u[0], u[1], u[2]]));
    while let Some(s) = queue.pop_front() {
        let from = ids[&s];
        match &s {
            Scan::Boundary(seen) => {
                for &y in &omega {
                    let to = id(&mut a, Scan::Checked(vec![hash], vec![hash, y]), &mut queue, &mut ids);
                    a.add_edge(from, letter(hash, y), to);
                    if *seen {
                        let to = id(&mut a, Scan::Last, &mut queue, &mut ids);
                        a.add_edge(from, letter(hash, y), to);
                    }
                }
            }
            Scan::Checked(u, v) => {
                for &x in &omega {
                    for y in omega.iter().copied().chain([hash]) {
                        let (mut u, mut v) = (u.clone(), v.clone());
                        u.push(x);
                        v.push(y);
                        if u.len() == 3 {
                            if !holds(&u, &v) {
                                continue;
                            }
                            u.remove(0);
                            v.remove(0);
                        }
                        let next = if y == hash {
                            u.push(hash);
                            if u.len() == 3 && !holds(&u, &v) {
                                continue;
                            }
                            Scan::Boundary(true)
                        } else {
                            Scan::Checked(u, v)
                        };
                        let to = id(&mut a, next, &mut queue, &mut ids);
                        a.add_edge(from, letter(x, y), to);
                    }
                }
            }
            Scan::Last => {
                for &x in &omega {
                    for &y in &omega {
                        a.add_edge(from, letter(x, y), from);
                    }
                    let to = id(&mut a, Scan::Done, &mut queue, &mut ids);
                    a.add_edge(from, letter(x, hash), to);
                }
            }
            Scan::Done => {}
        }
    }
    a.reduce()
}

/// `m`, defaulting to `2ⁿ` for inputs of length `n`, and the exponent
/// `n` when not overridden.
pub(crate) fn length(n: usize, m_override: Option<usize>, max_input: usize) -> Result<(usize, Option<usize>)> {
    if n == 0 {
        return Err(Error::Usage("the input word must be non-empty".into()));
    }
    match m_override {
        Some(0) => Err(Error::Usage("m must be positive".into())),
        Some(m) => Ok((m, None)),
        None if n > max_input => Err(Error::Usage(format!("inputs longer than {max_input} letters are not supported"))),
        None => Ok((1 << n, Some(n))),
    }
}

/// The ι chain `ι_{a₁}(x, y₁) ∧ ι_{a₂}(y₁, y₂) ∧ …`, ending with a blank
/// check when the tape has room after the input.
pub(crate) fn chain(names: &[String], x: &str, prefix: &str) -> Formula {
    let vars: Vec<String> = (1..=names.len()).map(|i| format!("{prefix}{i}")).collect();
    let mut prev = x.to_string();
    let mut parts = Vec::new();
    for (name, v) in names.iter().zip(&vars) {
        parts.push(rel(name, [prev.as_str(), v.as_str()]));
        prev = v.clone();
    }
    vars.iter().rev().fold(and_all(parts), |f, v| exists(v, f))
}

/// Builds the presentation and sentence for `tm` on `input`. The sentence
/// holds iff `tm` accepts `input` within `m − 1` tape cells.
pub fn reduce(tm: &TuringMachine, input: &[Cell], m_override: Option<usize>) -> Result<ReductionOutput> {
    let e = Encoding::new(tm, false)?;
    let (m, exponent) = length(input.len(), m_override, MAX_INPUT)?;
    let cells = m - 1;
    let u0 = configurations(&e)?;
    let delta = e.duplicate(&u0)?;
    let sigma = rotate_word(&e, &u0)?;
    let u1 = successor_blocks(&e, &tm.windows());
    let mut relations = vec![("U0".to_string(), u0.clone()), ("U1".into(), u1), ("delta".into(), delta), ("sigma".into(), sigma)];
    let q0 = e.omega[tm.state(&tm.initial)];
    let blank = tm.letter(&tm.blank)?;
    let mut iota: HashMap<Cell, String> = HashMap::new();
    for c in tm.input_letters().into_iter().chain([blank]) {
        let s = SymbolSet::single(e.omega[c]);
        let r = e.insert_after(&[q0, e.omega[c]], &u0)?.union(&e.advance(s, 2, &u0)?)?.reduce();
        let name = e.family("iota", c);
        relations.push((name.clone(), r));
        iota.insert(c, name);
    }
    let mut letters: Vec<String> = input.iter().map(|c| iota[c].clone()).collect();
    if input.len() < cells {
        letters.push(iota[&blank].clone());
    }
    let rotation = power("sigma", m, exponent, "y1", "y2");
    let run = exists("y1", exists("y2", and_all([rel("delta", ["x", "y1"]), rotation, rel("U1", ["y2"])])));
    let sentence = exists("x", and_all([rel("U0", ["x"]), run, chain(&letters, "x", "c")]));
    Ok(ReductionOutput {
        presentation: e.presentation(relations)?,
        sentence,
        metadata: ReductionMetadata {
            construction: "expspace".into(),
            input: input.iter().map(|&c| tm.name(c)).collect::<Vec<_>>().join(" "),
            n: input.len(),
            m,
            cells,
        },
    })
}
