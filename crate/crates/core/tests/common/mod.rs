//! Shared oracles and generators for integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use autstruct::automata::{Alphabet, Nfa, Symbol};
use autstruct::logic::formula::{and, eq, exists, forall, implies, not, or, Formula};
use autstruct::presentation::{Presentation, Relation};
use rand::Rng;

pub mod nfa;
pub mod oracles;

/// All words over `letters` of length at most `max_len`, shortest first.
pub fn words(letters: &[Symbol], max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in letters {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// All tuples of `k` elements from `0..n`.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

/// An explicit finite structure.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub universe: Vec<Vec<Symbol>>,
    pub relations: HashMap<String, (usize, HashSet<Vec<usize>>)>,
}

impl FiniteModel {
    /// The restriction of a presentation to its domain words of length at
    /// most `max_len`. Exact when the domain has no longer words.
    pub fn of(p: &Presentation, max_len: usize) -> Self {
        let letters: Vec<Symbol> = p.alphabet.letter_set().iter().collect();
        let universe: Vec<Vec<Symbol>> =
            words(&letters, max_len).into_iter().filter(|w| p.domain.accepts_words(std::slice::from_ref(w))).collect();
        let mut relations = HashMap::new();
        for (name, r) in &p.relations {
            let set: HashSet<Vec<usize>> = tuples(universe.len(), r.arity)
                .into_iter()
                .filter(|t| {
                    let ws: Vec<Vec<Symbol>> = t.iter().map(|&i| universe[i].clone()).collect();
                    r.nfa.accepts_words(&ws)
                })
                .collect();
            relations.insert(name.clone(), (r.arity, set));
        }
        FiniteModel { universe, relations }
    }

    pub fn eval(&self, f: &Formula, env: &mut HashMap<String, usize>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Rel { name, args } => {
                let t: Vec<usize> = args.iter().map(|a| env[a]).collect();
                self.relations[name].1.contains(&t)
            }
            Formula::Eq { left, right } => env[left] == env[right],
            Formula::Not { body } => !self.eval(body, env),
            Formula::And { left, right } => self.eval(left, env) && self.eval(right, env),
            Formula::Or { left, right } => self.eval(left, env) || self.eval(right, env),
            Formula::Implies { left, right } => !self.eval(left, env) || self.eval(right, env),
            Formula::Exists { var, body } | Formula::Forall { var, body } => {
                let is_exists = matches!(f, Formula::Exists { .. });
                let saved = env.get(var).copied();
                let mut result = !is_exists;
                for i in 0..self.universe.len() {
                    env.insert(var.clone(), i);
                    if self.eval(body, env) == is_exists {
                        result = is_exists;
                        break;
                    }
                }
                match saved {
                    Some(v) => env.insert(var.clone(), v),
                    None => env.remove(var),
                };
                result
            }
        }
    }

    pub fn holds(&self, sentence: &Formula) -> bool {
        self.eval(sentence, &mut HashMap::new())
    }
}

/// A presentation of a random finite structure over words of length ≤ 2.
pub fn random_finite_presentation<R: Rng>(rng: &mut R, signature: &[(&str, usize)]) -> Presentation {
    let al = Alphabet::new(["a", "b"], "_").unwrap();
    let all = words(&[0, 1], 2);
    let mut universe: Vec<Vec<Symbol>> = all.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if universe.is_empty() {
        universe.push(all[rng.gen_range(0..all.len())].clone());
    }
    let domain = Nfa::from_words(al.clone(), &universe);
    let mut relations = indexmap::IndexMap::new();
    for &(name, arity) in signature {
        let density = rng.gen_range(0.1..0.6);
        let chosen: Vec<Vec<Vec<Symbol>>> = tuples(universe.len(), arity)
            .into_iter()
            .filter(|_| rng.gen_bool(density))
            .map(|t| t.iter().map(|&i| universe[i].clone()).collect())
            .collect();
        let nfa = Nfa::from_tuples(al.clone(), arity, &chosen).unwrap();
        relations.insert(name.to_string(), Relation { arity, nfa: Arc::new(nfa) });
    }
    Presentation::new(al, domain, None, relations).unwrap()
}

/// A random formula of quantifier depth at most `depth` whose free
/// variables are among `scope`.
pub fn random_formula<R: Rng>(rng: &mut R, signature: &[(&str, usize)], depth: usize, scope: &mut Vec<String>) -> Formula {
    sized_formula(rng, signature, depth, 12, scope)
}

fn sized_formula<R: Rng>(
    rng: &mut R,
    signature: &[(&str, usize)],
    depth: usize,
    size: usize,
    scope: &mut Vec<String>,
) -> Formula {
    let atom = |rng: &mut R, scope: &[String]| -> Formula {
        if scope.is_empty() {
            return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        let pick = |rng: &mut R| scope[rng.gen_range(0..scope.len())].clone();
        if rng.gen_bool(0.2) {
            let (a, b) = (pick(rng), pick(rng));
            return eq(&a, &b);
        }
        let (name, arity) = signature[rng.gen_range(0..signature.len())];
        Formula::Rel { name: name.to_string(), args: (0..arity).map(|_| pick(rng)).collect() }
    };
    let quantifier = depth > 0 && (scope.is_empty() || rng.gen_bool(0.4));
    if quantifier {
        let var = format!("x{}", scope.len());
        scope.push(var.clone());
        let body = sized_formula(rng, signature, depth - 1, size.saturating_sub(1), scope);
        scope.pop();
        return if rng.gen_bool(0.5) { exists(&var, body) } else { forall(&var, body) };
    }
    if size <= 1 || rng.gen_bool(0.3) {
        return atom(rng, scope);
    }
    let half = size / 2;
    let sub = |rng: &mut R, scope: &mut Vec<String>| sized_formula(rng, signature, depth, half, scope);
    match rng.gen_range(0..4) {
        0 => not(sized_formula(rng, signature, depth, size - 1, scope)),
        1 => {
            let l = sub(rng, scope);
            and(l, sub(rng, scope))
        }
        2 => {
            let l = sub(rng, scope);
            or(l, sub(rng, scope))
        }
        _ => {
            let l = sub(rng, scope);
            implies(l, sub(rng, scope))
        }
    }
}

/// A random sentence with quantifier depth between 1 and `depth`.
pub fn random_sentence<R: Rng>(rng: &mut R, signature: &[(&str, usize)], depth: usize) -> Formula {
    loop {
        let f = random_formula(rng, signature, depth, &mut Vec::new());
        if f.quantifier_depth() > 0 && f.size() <= 40 {
            return f;
        }
    }
}

/// A random prenex sentence `∃x̄ ∀ȳ φ` with `n_exists` and `n_forall`
/// variables; the matrix usually mentions every variable.
pub fn random_prenex<R: Rng>(rng: &mut R, signature: &[(&str, usize)], n_exists: usize, n_forall: usize) -> Formula {
    let mut scope: Vec<String> = (0..n_exists + n_forall).map(|i| format!("x{i}")).collect();
    let matrix = loop {
        let m = random_formula(rng, signature, 0, &mut scope);
        if m.free_vars().len() == scope.len() || rng.gen_bool(0.2) {
            break m;
        }
    };
    scope.iter().enumerate().rev().fold(matrix, |f, (i, v)| if i < n_exists { exists(v, f) } else { forall(v, f) })
}

/// Signatures of the builtin presentations used across tests.
pub const BUILTIN_SIGNATURES: [(&str, &[(&str, usize)]); 4] = [
    ("nat-succ", &[("succ", 2)]),
    ("e1", &[("E", 2)]),
    ("intermediate-tree", &[("E", 2)]),
    ("prefix", &[("s0", 2), ("s1", 2), ("prefix", 2)]),
];
