//! A fixed structure of bounded degree whose first-order theory encodes
//! doubly exponentially space-bounded machines.
//!
//! Every configuration symbol carries an `m`-bit counter. Rotations check
//! that counters count, a marking relation `μ` singles out one counter
//! value at a time, and an automaton compares the windows around marked
//! positions in successive configurations.

use std::collections::{HashMap, VecDeque};

use super::encoding::Encoding;
use super::expspace::length;
use super::machine::{Cell, TuringMachine, Windows};
use super::regex::{alt, cat, plus, star, Re};
use super::{power, ReductionMetadata, ReductionOutput};
use crate::automata::ops::product;
use crate::automata::{Cube, Nfa, StateId, Symbol, SymbolSet};
use crate::error::Result;
use crate::logic::formula::{and_all, exists, forall, implies, rel, Formula};

/// Largest input length for which the counter length `2ⁿ` is generated.
pub const MAX_INPUT: usize = 5;

/// The four constraints on candidate computations: bit-annotated
/// configurations, counters from `0⁺` to `1⁺`, an initial first and an
/// accepting last configuration.
pub(crate) fn configurations(e: &Encoding) -> Result<Nfa> {
    let tm = &e.tm;
    let [z, o] = e.bits.expect("counters");
    let (zero, one_) = (SymbolSet::single(z), SymbolSet::single(o));
    let bits = e.bit_set();
    let hash = SymbolSet::single(e.hash);
    let delta = e.delta_set();
    let omega = e.omega_set();
    let blank = e.cells(&[tm.letter(&tm.blank)?]);
    let q0 = e.cells(&[tm.state(&tm.initial)]);
    let qf = e.cells(&[tm.state(&tm.accepting)]);
    let l = |s| e.one(s);
    let annotated = |s| cat([star(l(bits)), l(s)]);
    let shape = cat([
        star(cat([star(annotated(e.tape())), annotated(e.states()), plus(annotated(e.tape())), annotated(hash)])),
        star(l(bits)),
    ]);
    let counters = plus(cat([
        plus(l(zero)),
        l(omega),
        star(cat([plus(l(bits)), l(omega)])),
        plus(l(one_)),
        l(omega),
        l(hash),
    ]));
    let start = cat([
        plus(l(zero)),
        l(q0),
        star(cat([plus(l(bits)), l(e.input())])),
        star(cat([plus(l(bits)), l(blank)])),
        l(hash),
        star(l(delta)),
    ]);
    let end = cat([star(l(delta)), l(qf), star(l(delta.minus(&hash))), l(hash)]);
    let mut out: Option<Nfa> = None;
    for r in [shape, counters, start, end] {
        let a = e.compile(1, &r);
        out = Some(match out {
            None => a,
            Some(b) => product(&b, &a)?.reduce(),
        });
    }
    Ok(out.unwrap())
}

/// Rotates, in every `#`-terminated block of the first component, the
/// leading letter (which must lie in `first`) to just before the `#`.
fn rotate_blocks(e: &Encoding, first: &[Symbol], lang: &Nfa) -> Result<Nfa> {
    let body: Vec<Symbol> = e.delta.iter().copied().filter(|&s| s != e.hash).collect();
    let mut a = Nfa::new(e.alphabet.clone(), 2);
    let boundary = a.add_state(true);
    a.set_initial(boundary);
    let mut ids: HashMap<(Symbol, Symbol), StateId> = HashMap::new();
    for &f in first {
        for &p in &body {
            ids.insert((f, p), a.add_state(false));
        }
    }
    for &f in first {
        for &w in &e.delta {
            let pw = |x: Symbol| e.pair(Some(x), Some(w));
            for &r in &body {
                a.add_edge(boundary, Cube::point(&[pw(f), pw(r)]), ids[&(f, r)]);
                for &p in &body {
                    a.add_edge(ids[&(f, p)], Cube::point(&[pw(p), pw(r)]), ids[&(f, r)]);
                }
            }
            a.add_edge(ids[&(f, f)], Cube::point(&[pw(e.hash), pw(e.hash)]), boundary);
        }
    }
    let check = e.lift(lang, 2, 0, &|g| e.second_in(g), SymbolSet::EMPTY);
    Ok(product(&a, &check)?.reduce())
}

/// `((C (Ω×Ω))⁺ (#,#))⁺` where `C` holds the counter pairs `u ⊗ v` with
/// `val(u) = val(v) + 1 mod 2^|u|`.
fn increments(e: &Encoding) -> Nfa {
    let [z, o] = e.bits.expect("counters");
    let p = |x: Symbol, y: Symbol| e.one(SymbolSet::single(e.pair(Some(x), Some(y))));
    let same = alt([p(z, z), p(o, o)]);
    let carry = cat([star(same), p(o, z), star(p(z, o))]);
    let wrap = plus(p(z, o));
    let omega = e.omega_set();
    let cell = e.one(e.pairs_of(omega, omega));
    let r = plus(cat([plus(cat([alt([carry, wrap]), cell])), p(e.hash, e.hash)]));
    e.compile(1, &r)
}

/// `μ = f₀ ∪ f₁`: marks the first unmarked bit of every counter,
/// overlining it when it equals `b` and underlining it otherwise.
fn marking(e: &Encoding) -> Nfa {
    let bits = e.bits.expect("counters");
    let marked = e.marked.expect("counters");
    let marks = e.set(marked.iter().flatten().copied());
    let copy = |s: SymbolSet| e.copy(s);
    let branch = |b: usize| -> Re {
        let first = alt((0..2).map(|c| {
            let to = marked[c][usize::from(c == b)];
            e.two(SymbolSet::single(bits[c]), SymbolSet::single(to))
        }));
        let counter = cat([star(copy(marks)), first, star(copy(e.bit_set())), copy(e.omega_set())]);
        star(cat([plus(counter), copy(SymbolSet::single(e.hash))]))
    };
    e.compile(2, &alt([branch(0), branch(1)]))
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Scan {
    /// Last configuration symbol, or `#` at the start of a configuration.
    prev: Cell,
    /// Bits read since `prev`: none, all overlined, or not all.
    counter: u8,
    /// Window awaiting its right neighbour.
    pending: Option<(Cell, Cell)>,
    /// Marked window of the previous configuration, not yet compared.
    stored: Option<[Cell; 3]>,
    /// Whether the current configuration had its marked window.
    found: bool,
}

/// `A₂`: in every configuration exactly one counter is fully overlined,
/// and the windows `(left, marked, right)` of successive configurations
/// (with `#` at the borders) are related by the machine's windows.
fn consistency(e: &Encoding, windows: &Windows) -> Nfa {
    let hash = e.tm.omega();
    let marked = e.marked.expect("counters");
    let over = e.set([marked[0][1], marked[1][1]]);
    let bits = e.bit_set().or(&e.set([marked[0][0], marked[1][0]])).or(&over);
    let mut a = Nfa::new(e.alphabet.clone(), 1);
    let mut ids: HashMap<Scan, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let intern = |a: &mut Nfa, s: Scan, ids: &mut HashMap<Scan, StateId>, queue: &mut VecDeque<Scan>| {
        *ids.entry(s.clone()).or_insert_with(|| {
            let fin = s.prev == hash && s.counter == 0 && s.pending.is_none() && !s.found;
            queue.push_back(s);
            a.add_state(fin)
        })
    };
    let init = Scan { prev: hash, counter: 0, pending: None, stored: None, found: false };
    let start = intern(&mut a, init, &mut ids, &mut queue);
    a.set_initial(start);
    // Records a completed marked window; `false` rejects.
    let record = |s: &mut Scan, w: [Cell; 3]| -> bool {
        if s.found {
            return false;
        }
        if let Some(prev) = s.stored.take() {
            if !windows.contains(&(prev, w)) {
                return false;
            }
        }
        s.stored = Some(w);
        s.found = true;
        true
    };
    while let Some(s) = queue.pop_front() {
        let from = ids[&s];
        for letter in bits.iter() {
            let mut t = s.clone();
            t.counter = match (s.counter, over.contains(letter)) {
                (0 | 1, true) => 1,
                _ => 2,
            };
            let to = intern(&mut a, t, &mut ids, &mut queue);
            a.add_edge(from, Cube::point(&[letter]), to);
        }
        for c in (0..hash).chain([hash]) {
            let mut t = s.clone();
            if let Some((l, m)) = t.pending.take() {
                if !record(&mut t, [l, m, c]) {
                    continue;
                }
            }
            if c == hash {
                if !t.found || s.counter != 0 {
                    continue;
                }
                t.found = false;
                t.prev = hash;
            } else {
                if s.counter == 1 {
                    t.pending = Some((s.prev, c));
                }
                t.prev = c;
            }
            t.counter = 0;
            let sym = if c == hash { e.hash } else { e.omega[c] };
            let to = intern(&mut a, t, &mut ids, &mut queue);
            a.add_edge(from, Cube::point(&[sym]), to);
        }
    }
    a.reduce()
}

/// Builds the presentation and sentence for `tm` on `input` with `m`-bit
/// counters, i.e. `2^m − 1` tape cells.
pub fn reduce(tm: &TuringMachine, input: &[Cell], m_override: Option<usize>) -> Result<ReductionOutput> {
    let e = Encoding::new(tm, true)?;
    let (m, exponent) = length(input.len(), m_override, MAX_INPUT)?;
    let cells = 1usize.checked_shl(m as u32).map_or(usize::MAX, |c| c - 1);
    let u0 = configurations(&e)?;
    let [z, o] = e.bits.expect("counters");
    let mut relations = vec![
        ("U0".to_string(), u0.clone()),
        ("U1".into(), increments(&e)),
        ("U2".into(), consistency(&e, &tm.windows())),
        ("delta".into(), e.duplicate(&u0)?),
        ("sigma0".into(), rotate_blocks(&e, &[z], &u0)?),
        ("sigma".into(), rotate_blocks(&e, &e.omega, &u0)?),
        ("mu".into(), marking(&e)),
        ("iota01".into(), e.insert_after(&[z], &u0)?.union(&e.advance(e.set([z, o]), 0, &u0)?)?.reduce()),
    ];
    let mut iota: HashMap<Cell, String> = HashMap::new();
    for c in 0..tm.omega() {
        let name = e.family("iota", c);
        relations.push((name.clone(), e.advance(SymbolSet::single(e.omega[c]), 0, &u0)?));
        iota.insert(c, name);
    }
    let blank = tm.letter(&tm.blank)?;
    let mut letters: Vec<Cell> = vec![tm.state(&tm.initial)];
    letters.extend_from_slice(input);
    if input.len() < cells {
        letters.push(blank);
    }
    let pw = |r: &str, x: &str, y: &str| power(r, m, exponent, x, y);
    let counters = exists(
        "y1",
        exists(
            "y2",
            exists(
                "y3",
                and_all([rel("delta", ["x", "y1"]), pw("sigma0", "y1", "y2"), rel("sigma", ["y2", "y3"]), rel("U1", ["y3"])]),
            ),
        ),
    );
    let marks = forall("y", implies(pw("mu", "x", "y"), rel("U2", ["y"])));
    let sentence = exists("x", and_all([rel("U0", ["x"]), counters, marks, spell(&letters, &iota, &pw)]));
    Ok(ReductionOutput {
        presentation: e.presentation(relations)?,
        sentence,
        metadata: ReductionMetadata {
            construction: "2expspace".into(),
            input: input.iter().map(|&c| tm.name(c)).collect::<Vec<_>>().join(" "),
            n: input.len(),
            m,
            cells,
        },
    })
}

/// `∃y₀ z₀ … (ι₀₁^m(x, y₀) ∧ ι_{c₀}(y₀, z₀) ∧ ι₀₁^m(z₀, y₁) ∧ …)`.
fn spell(cells: &[Cell], iota: &HashMap<Cell, String>, pw: &dyn Fn(&str, &str, &str) -> Formula) -> Formula {
    let mut parts = Vec::new();
    let mut vars = Vec::new();
    let mut prev = "x".to_string();
    for (i, c) in cells.iter().enumerate() {
        let (y, z) = (format!("a{i}"), format!("b{i}"));
        parts.push(pw("iota01", &prev, &y));
        parts.push(rel(&iota[c], [y.as_str(), z.as_str()]));
        vars.push(y);
        vars.push(z.clone());
        prev = z;
    }
    vars.iter().rev().fold(and_all(parts), |f, v| exists(v, f))
}
