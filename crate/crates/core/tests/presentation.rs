use std::collections::{BTreeSet, HashMap, VecDeque};

use autstruct::automata::ops::DEFAULT_SUBSET_BUDGET;
use autstruct::automata::{convolve, Nfa, Symbol};
use autstruct::presentation::growth::{growth_series, sphere_size_at_least};
use autstruct::presentation::{
    canonize, gaifman_automaton, max_degree, max_degree_by_search, neighbors, validate, Check, DegreeResult, Presentation,
};
use autstruct::reductions::builtin;

const BUDGET: usize = DEFAULT_SUBSET_BUDGET;

fn words(letters: &[Symbol], max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in letters {
                let mut v: Vec<Symbol> = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn word(p: &Presentation, s: &str) -> Vec<Symbol> {
    p.alphabet.parse_word(s).unwrap()
}

fn brute_degree(p: &Presentation, max_len: usize) -> usize {
    let letters: Vec<Symbol> = p.alphabet.letter_set().iter().collect();
    let g = gaifman_automaton(p).unwrap();
    let ws: Vec<_> = words(&letters, max_len).into_iter().filter(|w| p.domain.accepts_words(&[w.clone()])).collect();
    ws.iter()
        .map(|u| ws.iter().filter(|v| g.accepts_words(&[u.clone(), (*v).clone()])).count())
        .max()
        .unwrap_or(0)
}

#[test]
fn builtins_validate() {
    for name in autstruct::reductions::BUILTIN_NAMES {
        let p = builtin(name).unwrap();
        let r = validate(&p, BUDGET).unwrap();
        assert!(r.passed, "{name}: {:?}", r.failed().collect::<Vec<_>>());
    }
}

#[test]
fn gaifman_of_successor() {
    let p = builtin("nat-succ").unwrap();
    let g = gaifman_automaton(&p).unwrap();
    for i in 0..=6usize {
        for j in 0..=6usize {
            let u = vec![0; i];
            let v = vec![0; j];
            assert_eq!(g.accepts_words(&[u, v]), i.abs_diff(j) == 1, "{i} {j}");
        }
    }
    let n = |s: &str| -> BTreeSet<Vec<Symbol>> { [word(&p, s)].into_iter().collect() };
    assert_eq!(neighbors(&p, &word(&p, "aa"), 10).unwrap(), n("a").union(&n("aaa")).cloned().collect());
    assert_eq!(neighbors(&p, &word(&p, ""), 10).unwrap(), n("a"));
}

#[test]
fn gaifman_of_e1_differs_in_first_position() {
    let p = builtin("e1").unwrap();
    let g = gaifman_automaton(&p).unwrap();
    let ws = words(&[0, 1], 4);
    for u in &ws {
        for v in &ws {
            let expected = u.len() == v.len() && !u.is_empty() && u[0] != v[0] && u[1..] == v[1..];
            assert_eq!(g.accepts_words(&[u.clone(), v.clone()]), expected);
        }
    }
}

#[test]
fn gaifman_is_symmetric() {
    for name in ["nat-succ", "intermediate-tree", "e2", "prefix"] {
        let p = builtin(name).unwrap();
        let g = gaifman_automaton(&p).unwrap();
        let letters: Vec<Symbol> = p.alphabet.letter_set().iter().collect();
        let ws = words(&letters, 4);
        for u in &ws {
            for v in &ws {
                assert_eq!(g.accepts_words(&[u.clone(), v.clone()]), g.accepts_words(&[v.clone(), u.clone()]));
            }
        }
    }
}

#[test]
fn tree_root_has_two_children() {
    let p = builtin("intermediate-tree").unwrap();
    let got = neighbors(&p, &word(&p, "$"), 6).unwrap();
    let want: BTreeSet<_> = ["$0", "$1"].iter().map(|s| word(&p, s)).collect();
    assert_eq!(got, want);
}

#[test]
fn degrees_match_brute_force() {
    for (name, want) in [("nat-succ", 2), ("e1", 1), ("e2", 3)] {
        let p = builtin(name).unwrap();
        assert_eq!(max_degree(&p, 8, BUDGET).unwrap(), DegreeResult::Bounded { degree: want }, "{name}");
        assert_eq!(max_degree_by_search(&p, 4, BUDGET).unwrap(), DegreeResult::Bounded { degree: want }, "{name}");
        assert_eq!(brute_degree(&p, 5), want, "{name}");
    }
    let p = builtin("e2").unwrap();
    assert_eq!(max_degree(&p, 16, BUDGET).unwrap(), DegreeResult::Bounded { degree: 3 });
    let p = builtin("prefix").unwrap();
    assert_eq!(max_degree(&p, 8, BUDGET).unwrap(), DegreeResult::ExceedsCap { cap: 8 });
    assert_eq!(max_degree_by_search(&p, 8, BUDGET).unwrap(), DegreeResult::ExceedsCap { cap: 8 });
    assert!(brute_degree(&p, 5) > 8);
}

/// Sphere sizes by breadth-first search over an explicit neighbour function.
fn bfs_growth<F: Fn(&Vec<Symbol>) -> Vec<Vec<Symbol>>>(centres: &[Vec<Symbol>], n: usize, nb: F) -> usize {
    let mut best = 0;
    for c in centres {
        let mut dist: HashMap<Vec<Symbol>, usize> = HashMap::from([(c.clone(), 0)]);
        let mut q = VecDeque::from([c.clone()]);
        while let Some(u) = q.pop_front() {
            let d = dist[&u];
            if d == n {
                continue;
            }
            for v in nb(&u) {
                if !dist.contains_key(&v) {
                    dist.insert(v.clone(), d + 1);
                    q.push_back(v);
                }
            }
        }
        best = best.max(dist.len());
    }
    best
}

#[test]
fn growth_of_successor() {
    let p = builtin("nat-succ").unwrap();
    let series = growth_series(&p, 8, None, BUDGET).unwrap();
    assert_eq!(series[0].value, 1);
    for n in 1..=8 {
        assert_eq!(series[n].value, 2 * n as u64 + 1);
        assert!(!series[n].saturated);
    }
}

#[test]
fn growth_of_tree_matches_bfs() {
    let p = builtin("intermediate-tree").unwrap();
    // Symbols: 0 -> '0', 1 -> '1', 2 -> '$'.
    let nb = |w: &Vec<Symbol>| -> Vec<Vec<Symbol>> {
        let k = w.iter().position(|&x| x == 2).unwrap();
        let (u, v) = (&w[..k], &w[k + 1..]);
        let mut out = Vec::new();
        let join = |a: &[Symbol], b: &[Symbol]| [a, &[2], b].concat();
        if !v.is_empty() {
            out.push(join(&[u, &v[..1]].concat(), &v[1..]));
        } else {
            out.push(join(&[], &[u, &[0]].concat()));
            out.push(join(&[], &[u, &[1]].concat()));
        }
        if !u.is_empty() {
            out.push(join(&u[..u.len() - 1], &[&u[u.len() - 1..], v].concat()));
        }
        if u.is_empty() && !v.is_empty() {
            out.push([&v[..v.len() - 1], &[2][..]].concat());
        }
        out
    };
    let letters = [0, 1];
    let centres: Vec<Vec<Symbol>> = words(&letters, 7)
        .into_iter()
        .flat_map(|w| (0..=w.len()).map(move |k| [&w[..k], &[2], &w[k..]].concat()))
        .collect();
    let series = growth_series(&p, 12, None, BUDGET).unwrap();
    let expected = [1, 4, 7, 10, 15, 21, 27, 33, 45, 57, 69, 81, 97];
    for n in 0..=12 {
        assert_eq!(bfs_growth(&centres, n, nb) as u64, expected[n], "oracle at {n}");
        assert_eq!(series[n].value, expected[n], "radius {n}");
    }
    assert!(sphere_size_at_least(&p, 1, 4, BUDGET).unwrap());
    assert!(!sphere_size_at_least(&p, 1, 5, BUDGET).unwrap());
}

#[test]
fn validation_flags_broken_symmetry() {
    let p = builtin("nat-succ").unwrap();
    let succ = p.relation("succ").unwrap().nfa.as_ref().clone();
    let broken = p.with_equality(Some(succ)).unwrap();
    let r = validate(&broken, BUDGET).unwrap();
    assert!(!r.passed);
    let f = r.finding(Check::Symmetric).unwrap();
    assert!(!f.passed);
    assert_eq!(f.counterexample.as_deref(), Some(&["".to_string(), "a".to_string()][..]));
}

#[test]
fn validation_flags_domain_escape() {
    let al = autstruct::automata::Alphabet::new(["a", "b"], "_").unwrap();
    let w = |s: &str| al.parse_word(s).unwrap();
    let dom = Nfa::from_words(al.clone(), &[w(""), w("a"), w("aa")]);
    let rel = Nfa::from_words(al.clone(), &[]);
    let _ = rel;
    let mut succ = Nfa::new(al.clone(), 2);
    let s = succ.add_state(false);
    let f = succ.add_state(true);
    succ.set_initial(s);
    for word in [convolve(&[w("a"), w("aa")], al.pad()).unwrap(), convolve(&[w("b"), w("bb")], al.pad()).unwrap()] {
        let mut cur = s;
        for (i, t) in word.tuples().iter().enumerate() {
            let next = if i + 1 == word.len() { f } else { succ.add_state(false) };
            succ.add_edge(cur, autstruct::automata::Cube::point(t), next);
            cur = next;
        }
    }
    let p = Presentation::new(
        al.clone(),
        dom,
        None,
        [("succ".to_string(), autstruct::presentation::Relation { arity: 2, nfa: succ.into() })].into_iter().collect(),
    )
    .unwrap();
    let r = validate(&p, BUDGET).unwrap();
    let f = r.finding(Check::DomainContainment).unwrap();
    assert!(!f.passed);
    assert_eq!(f.counterexample.as_deref(), Some(&["b".to_string(), "bb".to_string()][..]));
}

#[test]
fn canonize_keeps_least_representatives() {
    let al = autstruct::automata::Alphabet::new(["a", "b"], "_").unwrap();
    let w = |s: &str| al.parse_word(s).unwrap();
    let dom = Nfa::from_words(al.clone(), &[w("a"), w("b")]);
    let mut eq = Nfa::new(al.clone(), 2);
    let s = eq.add_state(false);
    let f = eq.add_state(true);
    eq.set_initial(s);
    let all = al.letter_set();
    eq.add_edge(s, autstruct::automata::Cube(vec![all, all]), f);
    let unary = Nfa::from_words(al.clone(), &[w("b")]);
    let p = Presentation::new(
        al.clone(),
        dom,
        Some(eq),
        [("U".to_string(), autstruct::presentation::Relation { arity: 1, nfa: unary.into() })].into_iter().collect(),
    )
    .unwrap();
    let c = canonize(&p, BUDGET).unwrap();
    assert!(c.is_injective());
    for (s, want) in [("a", true), ("b", false), ("", false)] {
        assert_eq!(c.domain.accepts_words(&[w(s)]), want);
        assert_eq!(c.relation("U").unwrap().nfa.accepts_words(&[w(s)]), want);
    }
}
