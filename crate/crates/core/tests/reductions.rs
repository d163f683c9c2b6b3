mod common;

use std::collections::BTreeSet;

use autstruct::automata::image::image;
use autstruct::checker::{decide_classic, ClassicOptions};
use autstruct::logic::FragmentClass;
use autstruct::presentation::{max_degree, validate, DegreeResult};
use autstruct::reductions::{expspace, tiny_machines, two_expspace, TuringMachine};
use autstruct::Error;
use common::oracles::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn machine(name: &str) -> TuringMachine {
    tiny_machines().into_iter().find(|(n, _)| *n == name).unwrap().1
}

fn random_config<R: Rng>(tm: &TuringMachine, len: usize, rng: &mut R) -> Vec<usize> {
    let tape = tm.tape_letters();
    if rng.gen_bool(0.4) {
        let input = tm.input_letters();
        let k = rng.gen_range(0..len);
        let mut c = vec![tm.states.iter().position(|s| *s == tm.initial).unwrap()];
        c.extend((0..k).map(|_| *input.choose(rng).unwrap()));
        c.resize(len, tm.letter(&tm.blank).unwrap());
        return c;
    }
    let mut c: Vec<usize> = (0..len - 1).map(|_| *tape.choose(rng).unwrap()).collect();
    c.insert(rng.gen_range(0..len - 1), rng.gen_range(0..tm.states.len()));
    c
}

/// A run prefix from a random configuration, sometimes disturbed.
fn config_sequence<R: Rng>(tm: &TuringMachine, len: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut c = random_config(tm, len, rng);
    let k = rng.gen_range(1..=4);
    let mut out = vec![c.clone()];
    while out.len() < k {
        match tm.step(&c) {
            Some(n) => {
                c = n;
                out.push(c.clone());
            }
            None => break,
        }
    }
    if rng.gen_bool(0.25) {
        out.push(random_config(tm, len, rng));
    }
    if rng.gen_bool(0.15) {
        out.shuffle(rng);
    }
    out
}

/// Accepting runs on `len − 1` cells over all inputs that fit.
fn accepting_traces(tm: &TuringMachine, len: usize) -> Vec<Vec<Vec<usize>>> {
    let input = tm.input_letters();
    let mut out = Vec::new();
    let mut words = vec![vec![]];
    for _ in 0..len - 1 {
        words = words.iter().flat_map(|w: &Vec<usize>| input.iter().map(move |&a| [w.clone(), vec![a]].concat())).collect();
        for w in &words {
            let run = tm.run(w, len - 1);
            if run.accepted {
                out.push(run.trace);
            }
        }
    }
    out
}

/// An initial configuration, random ones, and one in the accepting state.
fn candidate<R: Rng>(tm: &TuringMachine, len: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let q0 = tm.states.iter().position(|s| *s == tm.initial).unwrap();
    let qf = tm.states.iter().position(|s| *s == tm.accepting).unwrap();
    let mut out = vec![];
    while out.is_empty() {
        let c = random_config(tm, len, rng);
        if c[0] == q0 {
            out.push(c);
        }
    }
    for _ in 0..rng.gen_range(0..2) {
        out.push(random_config(tm, len, rng));
    }
    let mut last = random_config(tm, len, rng);
    let p = last.iter().position(|&c| tm.is_state(c)).unwrap();
    last[p] = qf;
    out.push(last);
    out
}

fn exp_word(tm: &TuringMachine, configs: &[Vec<usize>]) -> Word {
    configs.iter().flat_map(|c| cell_names(tm, c).into_iter().chain(["#".to_string()])).collect()
}

fn bin(j: usize, m: usize) -> Word {
    (0..m).rev().map(|i| ((j >> i) & 1).to_string()).collect()
}

fn two_word(tm: &TuringMachine, configs: &[Vec<usize>], m: usize) -> Word {
    let mut out = Word::new();
    for c in configs {
        for (j, name) in cell_names(tm, c).into_iter().enumerate() {
            out.extend(bin(j, m));
            out.push(name);
        }
        out.push("#".into());
    }
    out
}

fn mutate<R: Rng>(w: &[String], pool: &[String], rng: &mut R) -> Word {
    let mut w = w.to_vec();
    for _ in 0..rng.gen_range(1..=2) {
        let n = w.len();
        match rng.gen_range(0..4) {
            0 if n > 0 => w[rng.gen_range(0..n)] = pool.choose(rng).unwrap().clone(),
            1 if n > 0 => {
                w.remove(rng.gen_range(0..n));
            }
            2 => w.insert(rng.gen_range(0..=n), pool.choose(rng).unwrap().clone()),
            _ if n > 1 => {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                w.swap(i, j);
            }
            _ => {}
        }
    }
    w
}

fn delta_names(tm: &TuringMachine, bits: bool) -> Word {
    let mut out: Word = (0..tm.omega()).map(|c| tm.name(c).to_string()).collect();
    out.push("#".into());
    if bits {
        out.extend(["0".to_string(), "1".to_string()]);
    }
    out
}

fn pair_pool(delta: &[String]) -> Word {
    delta.iter().flat_map(|a| delta.iter().map(move |b| pair_name(Some(a), Some(b)))).collect()
}

#[derive(Default)]
struct Tally {
    pos: usize,
    neg: usize,
}

impl Tally {
    fn add(&mut self, verdict: bool) {
        if verdict {
            self.pos += 1;
        } else {
            self.neg += 1;
        }
    }

    fn assert_both(&self, what: &str) {
        assert!(self.pos >= 10 && self.neg >= 10, "{what}: {} positive, {} negative", self.pos, self.neg);
    }
}

#[test]
fn expspace_languages_match_their_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, tm) in tiny_machines() {
        let out = expspace::reduce(&tm, &tm.parse_input("a").unwrap(), None).unwrap();
        let u0 = &out.presentation.relation("U0").unwrap().nfa;
        let u1 = &out.presentation.relation("U1").unwrap().nfa;
        let delta = delta_names(&tm, false);
        let pairs = pair_pool(&delta);
        let (mut t0, mut t1) = (Tally::default(), Tally::default());
        let traces: Vec<Vec<Vec<usize>>> = (2..=4).flat_map(|len| accepting_traces(&tm, len)).collect();
        for i in 0..300 {
            let len = rng.gen_range(2..=4);
            let configs = match traces.get(i / 3 % traces.len().max(1)) {
                Some(t) if i % 3 == 0 => t.clone(),
                _ if i % 3 == 1 => candidate(&tm, len, &mut rng),
                _ => config_sequence(&tm, len, &mut rng),
            };
            let len = configs[0].len();
            let x = exp_word(&tm, &configs);
            for w in [x.clone(), mutate(&x, &delta, &mut rng)] {
                let expected = exp_u0(&tm, &w);
                assert_eq!(member(u0, &w), expected, "{name} U0 {w:?}");
                t0.add(expected);
            }
            let rotated: Word = x[len..].iter().chain(&x[..len]).cloned().collect();
            let y = flatten(&rotated, &x);
            for w in [y.clone(), mutate(&y, &pairs, &mut rng)] {
                if let Some(expected) = exp_u1(&tm, &w) {
                    assert_eq!(member(u1, &w), expected, "{name} U1 {w:?}");
                    t1.add(expected);
                }
            }
        }
        t0.assert_both(&format!("{name} U0"));
        t1.assert_both(&format!("{name} U1"));
    }
}

/// Rotates the first counter and symbol of every block behind the block.
fn rotate_blocks(x: &[String], m: usize) -> Option<Word> {
    let mut out = Word::new();
    for b in blocks(x)? {
        if b.len() < m + 1 {
            return None;
        }
        out.extend(b[m + 1..].iter().cloned());
        out.extend(b[..m + 1].iter().cloned());
        out.push("#".into());
    }
    Some(out)
}

#[test]
fn two_expspace_languages_match_their_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, tm) in tiny_machines() {
        let out = two_expspace::reduce(&tm, &tm.parse_input("a").unwrap(), Some(1)).unwrap();
        let rel = |n: &str| out.presentation.relation(n).unwrap().nfa.clone();
        let (u0, u1, u2, mu) = (rel("U0"), rel("U1"), rel("U2"), rel("mu"));
        let al = out.presentation.alphabet.clone();
        let delta = delta_names(&tm, true);
        let pairs = pair_pool(&delta);
        let mut pi: Word = delta.iter().filter(|n| !is_bit(n)).cloned().collect();
        pi.extend(["0_", "0^", "1_", "1^", ">"].map(String::from));
        let (mut t0, mut t1, mut t2) = (Tally::default(), Tally::default(), Tally::default());
        let traces: Vec<(usize, Vec<Vec<usize>>)> =
            (1..=2).flat_map(|m| accepting_traces(&tm, 1 << m).into_iter().map(move |t| (m, t))).collect();
        for i in 0..200 {
            let (m, configs) = match traces.get(i / 3 % traces.len().max(1)) {
                Some(t) if i % 3 == 0 => t.clone(),
                _ => {
                    let m = rng.gen_range(1..=2);
                    if i % 3 == 1 {
                        (m, candidate(&tm, 1 << m, &mut rng))
                    } else {
                        (m, config_sequence(&tm, 1 << m, &mut rng))
                    }
                }
            };
            let x = two_word(&tm, &configs, m);
            for w in [x.clone(), mutate(&x, &delta, &mut rng)] {
                let expected = two_u0(&tm, &w);
                assert_eq!(member(&u0, &w), expected, "{name} U0 {w:?}");
                t0.add(expected);
            }
            let y = flatten(&rotate_blocks(&x, m).unwrap(), &x);
            for w in [y.clone(), mutate(&y, &pairs, &mut rng)] {
                let expected = two_u1(&tm, &w);
                assert_eq!(member(&u1, &w), expected, "{name} U1 {w:?}");
                t1.add(expected);
            }
            let mut y = x.clone();
            for _ in 0..m {
                let b = if rng.gen_bool(0.5) { '0' } else { '1' };
                y = mark(&tm, &y, b).unwrap();
            }
            for w in [y.clone(), mutate(&y, &pi, &mut rng)] {
                let expected = two_u2(&tm, &w);
                assert_eq!(member(&u2, &w), expected, "{name} U2 {w:?}");
                t2.add(expected);
            }
            let xs = symbols(&al, &x).unwrap();
            let got: BTreeSet<Word> = image(&mu, &xs, xs.len()).unwrap().words.iter().map(|w| names(&al, w)).collect();
            let expected: BTreeSet<Word> = ['0', '1'].iter().filter_map(|&b| mark(&tm, &x, b)).collect();
            assert_eq!(got, expected, "{name} mu {x:?}");
        }
        t0.assert_both(&format!("{name} U0"));
        t1.assert_both(&format!("{name} U1"));
        t2.assert_both(&format!("{name} U2"));
    }
}

#[test]
fn hand_written_words() {
    let tm = machine("immediate");
    let out = expspace::reduce(&tm, &tm.parse_input("a").unwrap(), None).unwrap();
    let u0 = &out.presentation.relation("U0").unwrap().nfa;
    for (w, expected) in [
        ("q0 a # qf a #", true),
        ("q0 B # qf a #", true),
        ("q0 a # a qf B #", true),
        ("q0 a #", false),
        ("q0 B a # qf a #", false),
        ("q0 a # qf a", false),
        ("q0 # qf a #", false),
        ("a q0 # qf a #", false),
    ] {
        assert_eq!(member(u0, &word(w)), expected, "{w}");
        assert_eq!(exp_u0(&tm, &word(w)), expected, "{w}");
    }
    let out = two_expspace::reduce(&tm, &tm.parse_input("a").unwrap(), Some(1)).unwrap();
    let u0 = &out.presentation.relation("U0").unwrap().nfa;
    let u2 = &out.presentation.relation("U2").unwrap().nfa;
    for (w, expected) in [
        ("0 q0 1 a # 0 qf 1 a #", true),
        ("0 q0 1 a # 0 qf 1 1 a #", true),
        ("0 q0 1 a #", false),
        ("q0 1 a # 0 qf 1 a #", false),
        ("0 q0 1 a # 0 qf 0 a #", false),
    ] {
        assert_eq!(member(u0, &word(w)), expected, "{w}");
        assert_eq!(two_u0(&tm, &word(w)), expected, "{w}");
    }
    for (w, expected) in [
        ("0^ q0 1_ a # 0^ qf 1_ a #", true),
        ("0_ q0 1^ a # 0_ qf 1^ a #", true),
        ("0^ q0 1_ a # 0^ q0 1_ a #", false),
        ("0^ q0 1^ a #", false),
        ("0_ q0 1_ a #", false),
        ("", true),
    ] {
        assert_eq!(member(u2, &word(w)), expected, "{w}");
        assert_eq!(two_u2(&tm, &word(w)), expected, "{w}");
    }
}

#[test]
fn counter_facts_on_short_words() {
    let r = fact_checks(&machine("immediate"), 14);
    assert!(r.words > 5000, "{r:?}");
    assert!(r.counting > 10, "{r:?}");
    assert_eq!(r.fact1_mismatch, None);
    assert_eq!(r.fact2_failure, None);
    // Counters may wrap around inside a configuration; the second marking
    // inside one configuration is what rejects such words.
    assert!(r.wraparound.is_some());
}

#[test]
fn generated_presentations_are_valid() {
    let tm = machine("ends-in-b");
    let input = tm.parse_input("ab").unwrap();
    let out = expspace::reduce(&tm, &input, None).unwrap();
    assert!(validate(&out.presentation, 1_000_000).unwrap().passed);
    let degree = max_degree(&out.presentation, 8, 1_000_000).unwrap();
    assert!(matches!(degree, DegreeResult::Bounded { degree } if degree <= 2), "{degree:?}");
    let out = two_expspace::reduce(&tm, &input, Some(1)).unwrap();
    assert!(validate(&out.presentation, 1_000_000).unwrap().passed);
}

#[test]
fn sentences_and_metadata() {
    let tm = machine("immediate");
    let input = tm.parse_input("ab").unwrap();
    let out = expspace::reduce(&tm, &input, None).unwrap();
    assert_eq!((out.metadata.n, out.metadata.m, out.metadata.cells), (2, 4, 3));
    assert!(out.sentence.is_sentence());
    // Succinct powers introduce universal quantifiers.
    assert_eq!(out.sentence.to_string().matches("A x_").count(), 2);
    let out = expspace::reduce(&tm, &input, Some(4)).unwrap();
    let class = autstruct::logic::prenex(&out.sentence).to_formula().classify();
    assert_eq!(class, FragmentClass::Sigma(1));
    // The blank check is dropped when the input fills the tape.
    let full = expspace::reduce(&tm, &input, Some(3)).unwrap();
    assert!(!full.sentence.to_string().contains("iota_B"));
    assert!(out.sentence.to_string().contains("iota_B"));

    let out = two_expspace::reduce(&tm, &input, Some(2)).unwrap();
    assert_eq!((out.metadata.m, out.metadata.cells), (2, 3));
    let class = autstruct::logic::prenex(&out.sentence).to_formula().classify();
    assert_eq!(class, FragmentClass::Sigma(2));
    assert_eq!(two_expspace::reduce(&tm, &input, None).unwrap().metadata.m, 4);
}

#[test]
fn rejects_bad_requests() {
    let tm = machine("immediate");
    assert!(matches!(expspace::reduce(&tm, &[], None), Err(Error::Usage(_))));
    assert!(matches!(expspace::reduce(&tm, &tm.parse_input("a").unwrap(), Some(0)), Err(Error::Usage(_))));
    let long = tm.parse_input(&"a".repeat(6)).unwrap();
    assert!(matches!(two_expspace::reduce(&tm, &long, None), Err(Error::Usage(_))));
    let mut clash = tm.clone();
    clash.tape_alphabet.push("#".into());
    assert!(matches!(expspace::reduce(&clash, &[], None), Err(Error::Malformed(_))));
    let mut bits = tm.clone();
    bits.tape_alphabet.push("0".into());
    let input = bits.parse_input("a").unwrap();
    assert!(expspace::reduce(&bits, &input, None).is_ok());
    assert!(matches!(two_expspace::reduce(&bits, &input, None), Err(Error::Malformed(_))));
}

#[test]
fn small_end_to_end_runs() {
    let opts = ClassicOptions::default;
    for (name, w, expected) in [("immediate", "a", true), ("never", "a", false)] {
        let tm = machine(name);
        let input = tm.parse_input(w).unwrap();
        assert_eq!(tm.run(&input, 1).accepted, expected);
        let out = expspace::reduce(&tm, &input, None).unwrap();
        assert_eq!(decide_classic(&out.presentation, &out.sentence, opts()).unwrap().0, expected, "{name}");
    }
    let tm = machine("immediate");
    let out = two_expspace::reduce(&tm, &tm.parse_input("a").unwrap(), Some(1)).unwrap();
    assert!(decide_classic(&out.presentation, &out.sentence, opts()).unwrap().0);
}
