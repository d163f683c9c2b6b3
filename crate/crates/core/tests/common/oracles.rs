//! Direct definitions of the reduction languages, on letter names.

use autstruct::automata::ops::determinize;
use autstruct::automata::{Alphabet, Nfa, Symbol};
use autstruct::reductions::TuringMachine;

pub type Word = Vec<String>;

pub fn names(al: &Alphabet, w: &[Symbol]) -> Word {
    w.iter().map(|&s| al.name(s).to_string()).collect()
}

pub fn symbols(al: &Alphabet, w: &[String]) -> Option<Vec<Symbol>> {
    w.iter().map(|n| al.letter(n).ok()).collect()
}

pub fn member(a: &Nfa, w: &[String]) -> bool {
    symbols(a.alphabet(), w).is_some_and(|s| a.accepts_words(&[s]))
}

pub fn word(text: &str) -> Word {
    text.split_whitespace().map(String::from).collect()
}

pub fn pair_name(a: Option<&str>, b: Option<&str>) -> String {
    format!("[{},{}]", a.unwrap_or("."), b.unwrap_or("."))
}

/// Components of a pair letter name.
pub fn split_pair(n: &str) -> Option<(Option<String>, Option<String>)> {
    let inner = n.strip_prefix('[')?.strip_suffix(']')?;
    let (a, b) = inner.split_once(',')?;
    let c = |s: &str| (s != ".").then(|| s.to_string());
    Some((c(a), c(b)))
}

/// `a ⊗ b` as a word of pair letters.
pub fn flatten(a: &[String], b: &[String]) -> Word {
    (0..a.len().max(b.len())).map(|i| pair_name(a.get(i).map(|s| s.as_str()), b.get(i).map(|s| s.as_str()))).collect()
}

/// Both components of a pair word without padding.
pub fn unflatten(w: &[String]) -> Option<(Word, Word)> {
    let mut a = Word::new();
    let mut b = Word::new();
    for n in w {
        let (x, y) = split_pair(n)?;
        a.push(x?);
        b.push(y?);
    }
    Some((a, b))
}

/// The blocks of a `#`-terminated word.
pub fn blocks(w: &[String]) -> Option<Vec<Word>> {
    if w.last().is_some_and(|l| l != "#") {
        return None;
    }
    let mut out = vec![Word::new()];
    for n in w {
        if n == "#" {
            out.push(Word::new());
        } else {
            out.last_mut().unwrap().push(n.clone());
        }
    }
    out.pop();
    Some(out)
}

pub fn cell(tm: &TuringMachine, n: &str) -> Option<usize> {
    tm.states
        .iter()
        .position(|s| s == n)
        .or_else(|| tm.tape_alphabet.iter().position(|s| s == n).map(|i| tm.states.len() + i))
}

pub fn cells(tm: &TuringMachine, w: &[String]) -> Option<Vec<usize>> {
    w.iter().map(|n| cell(tm, n)).collect()
}

pub fn cell_names(tm: &TuringMachine, c: &[usize]) -> Word {
    c.iter().map(|&c| tm.name(c).to_string()).collect()
}

fn is_initial(tm: &TuringMachine, c: &[String]) -> bool {
    c.first() == Some(&tm.initial) && {
        let rest = &c[1..];
        let k = rest.iter().take_while(|a| tm.input_alphabet.contains(a)).count();
        rest[k..].iter().all(|a| *a == tm.blank)
    }
}

/// Sequences `c₁ # … # cₖ #` of configurations, the first initial and the
/// last accepting.
pub fn exp_u0(tm: &TuringMachine, w: &[String]) -> bool {
    let Some(bs) = blocks(w) else { return false };
    !bs.is_empty()
        && bs.iter().all(|b| cells(tm, b).is_some_and(|c| tm.is_configuration(&c)))
        && is_initial(tm, &bs[0])
        && bs.last().unwrap().contains(&tm.accepting)
}

/// Pair words `[#,v₁][u₁,v₂]…[uₖ,#]` per block, with `v ⊢ u` in all but
/// the last of at least two blocks. `None` when a block component is not a
/// configuration.
pub fn exp_u1(tm: &TuringMachine, w: &[String]) -> Option<bool> {
    let Some((s, t)) = unflatten(w) else { return Some(false) };
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if s[i] != "#" || t[i] == "#" {
            return Some(false);
        }
        let (mut u, mut v) = (Word::new(), vec![t[i].clone()]);
        i += 1;
        loop {
            if i == s.len() || s[i] == "#" {
                return Some(false);
            }
            u.push(s[i].clone());
            i += 1;
            if t[i - 1] == "#" {
                break;
            }
            v.push(t[i - 1].clone());
        }
        pairs.push((u, v));
    }
    if pairs.len() < 2 {
        return Some(false);
    }
    let mut ok = true;
    for (u, v) in &pairs[..pairs.len() - 1] {
        let (u, v) = (cells(tm, u)?, cells(tm, v)?);
        if !tm.is_configuration(&u) || !tm.is_configuration(&v) {
            return None;
        }
        ok &= tm.step(&v).as_ref() == Some(&u);
    }
    Some(ok)
}

pub fn is_bit(n: &str) -> bool {
    n == "0" || n == "1"
}

pub fn is_marked(n: &str) -> bool {
    matches!(n, "0_" | "0^" | "1_" | "1^")
}

/// `(counter, symbol)` groups of a block; `None` when the block does not
/// end in a configuration symbol or a letter is out of place.
pub fn groups(tm: &TuringMachine, block: &[String], bit: impl Fn(&str) -> bool) -> Option<Vec<(Word, String)>> {
    let mut out = Vec::new();
    let mut cur = Word::new();
    for n in block {
        if bit(n) {
            cur.push(n.clone());
        } else if cell(tm, n).is_some() {
            out.push((std::mem::take(&mut cur), n.clone()));
        } else {
            return None;
        }
    }
    cur.is_empty().then_some(out)
}

/// Candidate computations with bit counters.
pub fn two_u0(tm: &TuringMachine, w: &[String]) -> bool {
    let Some(bs) = blocks(w) else { return false };
    if bs.is_empty() {
        return false;
    }
    for (i, b) in bs.iter().enumerate() {
        let Some(gs) = groups(tm, b, is_bit) else { return false };
        if gs.len() < 2 || gs.iter().any(|(c, _)| c.is_empty()) {
            return false;
        }
        if !gs[0].0.iter().all(|b| b == "0") || !gs.last().unwrap().0.iter().all(|b| b == "1") {
            return false;
        }
        let config: Word = gs.iter().map(|(_, a)| a.clone()).collect();
        if !tm.is_configuration(&cells(tm, &config).unwrap()) {
            return false;
        }
        if i == 0 && !is_initial(tm, &config) {
            return false;
        }
        if i == bs.len() - 1 && !config.contains(&tm.accepting) {
            return false;
        }
    }
    true
}

pub fn value(bits: &[String]) -> u64 {
    bits.iter().fold(0, |v, b| 2 * v + u64::from(b.starts_with('1')))
}

/// Blocks of counter increments `u ⊗ v`, `val(u) = val(v) + 1 mod 2^|u|`,
/// each followed by a pair of configuration symbols.
pub fn two_u1(tm: &TuringMachine, w: &[String]) -> bool {
    let Some((s, t)) = unflatten(w) else { return false };
    if s.is_empty() || s.last().unwrap() != "#" {
        return false;
    }
    let mut i = 0;
    while i < s.len() {
        let mut groups = 0;
        loop {
            let start = i;
            while i < s.len() && is_bit(&s[i]) && is_bit(&t[i]) {
                i += 1;
            }
            if i == start || i == s.len() || cell(tm, &s[i]).is_none() || cell(tm, &t[i]).is_none() {
                return false;
            }
            let (u, v) = (value(&s[start..i]), value(&t[start..i]));
            if u != (v + 1) % (1 << (i - start)) {
                return false;
            }
            i += 1;
            groups += 1;
            if i < s.len() && s[i] == "#" {
                break;
            }
        }
        if groups == 0 || t[i] != "#" {
            return false;
        }
        i += 1;
    }
    true
}

/// Every configuration has exactly one fully overlined counter, and the
/// windows around those positions agree with the machine between
/// successive configurations.
pub fn two_u2(tm: &TuringMachine, w: &[String]) -> bool {
    let windows = tm.windows();
    let hash = tm.omega();
    let Some(bs) = blocks(w) else { return false };
    let mut prev: Option<[usize; 3]> = None;
    for b in &bs {
        let Some(gs) = groups(tm, b, |n| is_bit(n) || is_marked(n)) else { return false };
        let marked: Vec<usize> =
            (0..gs.len()).filter(|&j| !gs[j].0.is_empty() && gs[j].0.iter().all(|x| x.ends_with('^'))).collect();
        if marked.len() != 1 {
            return false;
        }
        let j = marked[0];
        let c = |k: Option<usize>| k.and_then(|k| gs.get(k)).map_or(hash, |g| cell(tm, &g.1).unwrap());
        let win = [c(j.checked_sub(1)), c(Some(j)), c(Some(j + 1))];
        if let Some(p) = prev {
            if !windows.contains(&(p, win)) {
                return false;
            }
        }
        prev = Some(win);
    }
    true
}

/// `f_b`: marks the first unmarked bit of every counter.
pub fn mark(tm: &TuringMachine, x: &[String], b: char) -> Option<Word> {
    let bs = blocks(x)?;
    let mut out = Word::new();
    for block in &bs {
        let gs = groups(tm, block, |n| is_bit(n) || is_marked(n))?;
        if gs.is_empty() {
            return None;
        }
        for (counter, a) in gs {
            let k = counter.iter().take_while(|n| is_marked(n)).count();
            if k == counter.len() || counter[k..].iter().any(|n| is_marked(n)) {
                return None;
            }
            for (i, n) in counter.iter().enumerate() {
                if i == k {
                    let over = n.starts_with(b);
                    out.push(format!("{n}{}", if over { "^" } else { "_" }));
                } else {
                    out.push(n.clone());
                }
            }
            out.push(a);
        }
        out.push("#".into());
    }
    Some(out)
}

/// Counters of length `m` that increment within each configuration, the
/// increment taken modulo `2^m` (`modular`) or in the integers.
pub fn counters_ok(tm: &TuringMachine, x: &[String], m: usize, modular: bool) -> bool {
    let Some(bs) = blocks(x) else { return false };
    bs.iter().all(|b| {
        groups(tm, b, is_bit).is_some_and(|gs| {
            gs.iter().all(|(c, _)| c.len() == m)
                && gs.windows(2).all(|p| {
                    let (u, v) = (value(&p[0].0), value(&p[1].0));
                    if modular {
                        v == (u + 1) % (1 << m)
                    } else {
                        v == u + 1
                    }
                })
        })
    })
}

/// Counter values marked in `y`: every occurrence fully overlined and
/// every other counter with an underlined bit.
pub fn marked_counters(tm: &TuringMachine, y: &[String]) -> Vec<u64> {
    let Some(bs) = blocks(y) else { return vec![] };
    let mut all: Vec<(u64, bool, bool)> = Vec::new();
    for b in &bs {
        let Some(gs) = groups(tm, b, is_marked) else { return vec![] };
        for (c, _) in gs {
            all.push((value(&c), c.iter().all(|n| n.ends_with('^')), c.iter().any(|n| n.ends_with('_'))));
        }
    }
    let mut values: Vec<u64> = all.iter().map(|t| t.0).collect();
    values.sort_unstable();
    values.dedup();
    values
        .into_iter()
        .filter(|&u| all.iter().all(|&(v, over, under)| if v == u { over } else { under }))
        .collect()
}

/// A complete deterministic transition table over all letters.
pub struct Table {
    pub next: Vec<Vec<u32>>,
    pub fin: Vec<bool>,
    pub init: u32,
}

pub const NONE: u32 = u32::MAX;

impl Table {
    pub fn new(a: &Nfa) -> Table {
        let d = determinize(a, 1_000_000).unwrap();
        let letters = d.alphabet().len();
        let n = d.num_states();
        let mut next = vec![vec![NONE; letters]; n];
        for (s, row) in next.iter_mut().enumerate() {
            for e in d.edges(s as u32) {
                for l in e.guard.track(0).iter().filter(|&l| (l as usize) < letters) {
                    row[l as usize] = e.to;
                }
            }
        }
        Table { next, fin: (0..n as u32).map(|s| d.is_final(s)).collect(), init: d.initial()[0] }
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut s = self.init;
        for &l in w {
            s = self.next[s as usize][l as usize];
            if s == NONE {
                return false;
            }
        }
        self.fin[s as usize]
    }

    /// States from which some accepted word of length at most `k` remains.
    pub fn alive(&self, k: usize) -> Vec<Vec<bool>> {
        let mut out = vec![self.fin.clone()];
        for _ in 0..k {
            let last = out.last().unwrap();
            let row: Vec<bool> = (0..self.fin.len())
                .map(|s| last[s] || self.next[s].iter().any(|&t| t != NONE && last[t as usize]))
                .collect();
            out.push(row);
        }
        out
    }
}

/// Outcome of the exhaustive counter checks over `U₀` words.
#[derive(Debug, Default)]
pub struct FactReport {
    pub words: u64,
    /// Words whose counters are correct (modular increments).
    pub counting: u64,
    /// A word on which the definable set of the counter test and the
    /// direct validator disagree.
    pub fact1_mismatch: Option<Word>,
    /// A counting word whose `μ`-images do not mark exactly one counter
    /// each, or do not mark distinct counters.
    pub fact2_failure: Option<Word>,
    /// A word accepted with wrap-around increments inside a configuration
    /// that the integer reading rejects.
    pub wraparound: Option<Word>,
}

#[derive(Clone, Copy)]
struct Counting {
    len: usize,
    val: u64,
    prev: Option<u64>,
    ok: bool,
    strict: bool,
}

/// Checks the counter reading and counting properties with 1-bit counters over every `U₀` word of
/// length at most `max_len`.
pub fn fact_checks(tm: &TuringMachine, max_len: usize) -> FactReport {
    use autstruct::automata::image::image;
    use autstruct::checker::{ClassicChecker, ClassicOptions};
    use autstruct::logic::parse_formula;
    use autstruct::reductions::two_expspace;

    let m = 1;
    let input = tm.parse_input(&tm.input_alphabet[0]).unwrap();
    let out = two_expspace::reduce(tm, &input, Some(m)).unwrap();
    let p = &out.presentation;
    let al = p.alphabet.clone();
    let u0 = Table::new(&p.relation("U0").unwrap().nfa);
    let test = parse_formula("U0(x) & (E y1. E y2. E y3. delta(x,y1) & sigma0(y1,y2) & sigma(y2,y3) & U1(y3))").unwrap();
    let d = ClassicChecker::new(p, ClassicOptions::default()).unwrap().definable(&test).unwrap();
    let f1 = Table::new(&d.nfa);
    let mu = p.relation("mu").unwrap().nfa.clone();
    let alive = u0.alive(max_len);
    let kind: Vec<Option<u64>> = (0..al.len()).map(|s| match al.name(s as Symbol) {
        "0" => Some(0),
        "1" => Some(1),
        _ => None,
    }).collect();
    let hash = al.letter("#").unwrap();
    let moves: Vec<Vec<(Symbol, u32)>> = u0
        .next
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &t)| t != NONE).map(|(l, &t)| (l as Symbol, t)).collect())
        .collect();
    let mut report = FactReport::default();
    let mut word: Vec<Symbol> = Vec::new();
    let start = Counting { len: 0, val: 0, prev: None, ok: true, strict: true };
    #[allow(clippy::too_many_arguments)]
    fn go(
        s: u32,
        f: u32,
        c: Counting,
        word: &mut Vec<Symbol>,
        ctx: &(&Table, &Table, &Vec<Vec<(Symbol, u32)>>, &Vec<Vec<bool>>, &Vec<Option<u64>>, Symbol, usize),
        leaf: &mut dyn FnMut(&[Symbol], bool, Counting),
    ) {
        let (u0, f1, moves, alive, kind, hash, max_len) = *ctx;
        if u0.fin[s as usize] {
            leaf(word, f != NONE && f1.fin[f as usize], c);
        }
        if word.len() == max_len {
            return;
        }
        let left = max_len - word.len() - 1;
        for &(l, t) in &moves[s as usize] {
            if !alive[left][t as usize] {
                continue;
            }
            let mut d = c;
            if let Some(b) = kind[l as usize] {
                d.len += 1;
                d.val = 2 * d.val + b;
            } else if l == hash {
                d.prev = None;
            } else {
                d.ok &= d.len == 1;
                d.strict &= d.len == 1;
                if let Some(p) = d.prev {
                    d.ok &= d.val == (p + 1) % 2;
                    d.strict &= d.val == p + 1;
                }
                d.prev = Some(d.val);
                d.len = 0;
                d.val = 0;
            }
            let g = if f == NONE { NONE } else { f1.next[f as usize][l as usize] };
            word.push(l);
            go(t, g, d, word, ctx, leaf);
            word.pop();
        }
    }
    let ctx = (&u0, &f1, &moves, &alive, &kind, hash, max_len);
    let mut leaf = |w: &[Symbol], accepted: bool, c: Counting| {
        report.words += 1;
        if accepted != c.ok && report.fact1_mismatch.is_none() {
            report.fact1_mismatch = Some(names(&al, w));
        }
        if c.ok && !c.strict && report.wraparound.is_none() {
            report.wraparound = Some(names(&al, w));
        }
        if !c.ok {
            return;
        }
        report.counting += 1;
        let x = names(&al, w);
        let img = image(&mu, w, w.len()).unwrap();
        let marked: Vec<Vec<u64>> = img.words.iter().map(|y| marked_counters(tm, &names(&al, y))).collect();
        let expected: std::collections::BTreeSet<Word> =
            ['0', '1'].iter().filter_map(|&b| mark(tm, &x, b)).collect();
        let got: std::collections::BTreeSet<Word> = img.words.iter().map(|y| names(&al, y)).collect();
        let ok = img.words.len() == 2
            && got == expected
            && marked.iter().all(|v| v.len() == 1)
            && marked[0] != marked[1];
        if !ok && report.fact2_failure.is_none() {
            report.fact2_failure = Some(x);
        }
    };
    go(u0.init, f1.init, start, &mut word, &ctx, &mut leaf);
    report
}
