//! Deciders for the Σ₁ and Σ₂ fragments.
//!
//! Σ₁ sentences are decided by one multi-track existence query per disjunct
//! of the matrix, so no product automaton is ever built. Σ₂ sentences
//! `∃x̄ ∀ȳ φ` are rewritten as `∃x̄ ¬∃ȳ ¬φ`; the automaton for `∃ȳ ¬φ` is
//! built and the complement is searched with an on-the-fly subset
//! construction.

use std::sync::Arc;

use serde::Serialize;

use crate::automata::explore::{find, Constraint, Query};
use crate::automata::ops::{difference_witness, domain_power, is_empty, project, DEFAULT_SUBSET_BUDGET};
use crate::checker::{decide_classic, ClassicChecker, ClassicOptions};
use crate::error::{Error, Result};
use crate::logic::formula::{and, and_all, eq, not, Formula, FragmentClass, Quantifier};
use crate::logic::prenex::{prenex, Prenex};
use crate::presentation::{canonize, Presentation};

pub const DEFAULT_DNF_LIMIT: usize = 512;

#[derive(Clone, Copy, Debug)]
pub struct FragmentOptions {
    /// State budget for explorations and subset constructions.
    pub budget: usize,
    /// Largest number of disjuncts the Σ₁ decider expands before handing
    /// the sentence to the classic checker.
    pub dnf_limit: usize,
}

impl Default for FragmentOptions {
    fn default() -> Self {
        FragmentOptions { budget: DEFAULT_SUBSET_BUDGET, dnf_limit: DEFAULT_DNF_LIMIT }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Sigma1Stats {
    pub disjuncts: usize,
    pub queries: usize,
    pub explored_states: usize,
    /// The matrix had too many disjuncts and the classic checker decided.
    pub fallback: bool,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Sigma2Stats {
    /// States of the automaton for `∃ȳ ¬φ` over the outer variables.
    pub inner_states: usize,
    /// Largest automaton built by the classic checker for the matrix.
    pub matrix_states: usize,
    /// Subset states materialized by the complement search.
    pub peak_subsets: usize,
    pub explored_states: usize,
}

fn check_fragment(p: &Presentation, sentence: &Formula, allowed: &[FragmentClass], name: &str) -> Result<Prenex> {
    if !sentence.is_sentence() {
        return Err(Error::Binding(format!(
            "formula has free variables: {}",
            sentence.free_vars().into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    sentence.check_signature(|n| p.relations.get(n).map(|r| r.arity))?;
    let pf = prenex(sentence);
    let class = pf.to_formula().classify();
    if !allowed.contains(&class) {
        return Err(Error::Usage(format!("sentence is {class}, not in the {name} fragment")));
    }
    Ok(pf)
}

fn injective(p: &Presentation, budget: usize) -> Result<std::borrow::Cow<'_, Presentation>> {
    if p.is_injective() {
        Ok(std::borrow::Cow::Borrowed(p))
    } else {
        Ok(std::borrow::Cow::Owned(canonize(p, budget)?))
    }
}

/// A literal of a quantifier-free matrix in negation normal form.
#[derive(Clone, Debug)]
enum Literal {
    Rel { positive: bool, name: String, args: Vec<String> },
    Eq { positive: bool, left: String, right: String },
}

/// Disjunctive normal form as a list of conjunctions; `None` when the
/// number of disjuncts exceeds `limit`.
fn dnf(f: &Formula, limit: usize) -> Option<Vec<Vec<Literal>>> {
    match f {
        Formula::True => Some(vec![vec![]]),
        Formula::False => Some(vec![]),
        Formula::Rel { name, args } => {
            Some(vec![vec![Literal::Rel { positive: true, name: name.clone(), args: args.clone() }]])
        }
        Formula::Eq { left, right } => {
            Some(vec![vec![Literal::Eq { positive: true, left: left.clone(), right: right.clone() }]])
        }
        Formula::Not { body } => match &**body {
            Formula::Rel { name, args } => {
                Some(vec![vec![Literal::Rel { positive: false, name: name.clone(), args: args.clone() }]])
            }
            Formula::Eq { left, right } => {
                Some(vec![vec![Literal::Eq { positive: false, left: left.clone(), right: right.clone() }]])
            }
            _ => dnf(&f.nnf(), limit),
        },
        Formula::Or { left, right } => {
            let mut l = dnf(left, limit)?;
            l.extend(dnf(right, limit)?);
            (l.len() <= limit).then_some(l)
        }
        Formula::And { left, right } => {
            let l = dnf(left, limit)?;
            let r = dnf(right, limit)?;
            if l.len().saturating_mul(r.len()) > limit {
                return None;
            }
            Some(l.iter().flat_map(|a| r.iter().map(move |b| a.iter().chain(b).cloned().collect())).collect())
        }
        Formula::Implies { .. } | Formula::Exists { .. } | Formula::Forall { .. } => dnf(&f.nnf(), limit),
    }
}

/// Decides a sentence whose prenex form is Σ₁ (or quantifier free).
pub fn decide_sigma1(p: &Presentation, sentence: &Formula, options: FragmentOptions) -> Result<(bool, Sigma1Stats)> {
    let pf = check_fragment(p, sentence, &[FragmentClass::Sigma(0), FragmentClass::Sigma(1)], "sigma1")?;
    let p = injective(p, options.budget)?;
    let mut stats = Sigma1Stats::default();
    let Some(disjuncts) = dnf(&pf.matrix, options.dnf_limit) else {
        stats.fallback = true;
        let (v, _) = decide_classic(&p, sentence, ClassicOptions { budget: options.budget, ..Default::default() })?;
        return Ok((v, stats));
    };
    stats.disjuncts = disjuncts.len();
    let vars: Vec<&str> = pf.prefix.iter().map(|(_, v)| v.as_str()).collect();
    for d in &disjuncts {
        if satisfiable(&p, &vars, d, options.budget, &mut stats)? {
            return Ok((true, stats));
        }
    }
    Ok((false, stats))
}

/// Whether some assignment of domain elements to `vars` satisfies every
/// literal of a conjunction.
fn satisfiable(p: &Presentation, vars: &[&str], lits: &[Literal], budget: usize, stats: &mut Sigma1Stats) -> Result<bool> {
    let index = |v: &str| vars.iter().position(|w| *w == v).expect("matrix variables are bound");
    // Positive equalities merge variables onto one track.
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for l in lits {
        if let Literal::Eq { positive: true, left, right } = l {
            let (a, b) = (root(&mut parent, index(left)), root(&mut parent, index(right)));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut track_of_root = vec![usize::MAX; vars.len()];
    let mut tracks = 0;
    let mut track = vec![0; vars.len()];
    for i in 0..vars.len() {
        let r = root(&mut parent, i);
        if track_of_root[r] == usize::MAX {
            track_of_root[r] = tracks;
            tracks += 1;
        }
        track[i] = track_of_root[r];
    }
    if tracks == 0 {
        return Ok(lits.is_empty());
    }
    let mut constraints: Vec<Constraint> =
        (0..tracks).map(|t| Constraint::Accept { nfa: p.domain.clone(), tracks: vec![t] }).collect();
    let mut pairs = Vec::new();
    for l in lits {
        match l {
            Literal::Eq { positive: true, .. } => {}
            Literal::Eq { positive: false, left, right } => {
                let (a, b) = (track[index(left)], track[index(right)]);
                if a == b {
                    return Ok(false);
                }
                pairs.push((a.min(b), a.max(b)));
            }
            Literal::Rel { positive, name, args } => {
                let nfa: Arc<_> = p.relation(name)?.nfa.clone();
                let tracks = args.iter().map(|a| track[index(a)]).collect();
                constraints.push(if *positive {
                    Constraint::Accept { nfa, tracks }
                } else {
                    Constraint::Reject { nfa, tracks }
                });
            }
        }
    }
    if !pairs.is_empty() {
        pairs.sort_unstable();
        pairs.dedup();
        constraints.push(Constraint::Distinct { pairs });
    }
    let (w, s) = find(&Query { tracks, constraints }, budget)?;
    stats.queries += 1;
    stats.explored_states += s.states;
    Ok(w.is_some())
}

/// Decides a sentence whose prenex form is Σ₂ or simpler.
pub fn decide_sigma2(p: &Presentation, sentence: &Formula, options: FragmentOptions) -> Result<(bool, Sigma2Stats)> {
    let allowed =
        [FragmentClass::Sigma(0), FragmentClass::Sigma(1), FragmentClass::Sigma(2), FragmentClass::Pi(1)];
    let pf = check_fragment(p, sentence, &allowed, "sigma2")?;
    let p = injective(p, options.budget)?;
    let n = pf.prefix.iter().take_while(|(q, _)| *q == Quantifier::Exists).count();
    let vars: Vec<String> = pf.prefix.iter().map(|(_, v)| v.clone()).collect();
    let mut stats = Sigma2Stats::default();
    if vars.is_empty() {
        let (v, _) = decide_classic(&p, sentence, ClassicOptions { budget: options.budget, ..Default::default() })?;
        return Ok((v, stats));
    }
    // Satisfying assignments of ¬φ over x̄ȳ; the leading x = x atoms fix
    // the track order and restrict every track to the domain.
    let negated = and(and_all(vars.iter().map(|v| eq(v, v))), not(pf.matrix.clone()).nnf());
    let mut classic = ClassicChecker::new(&p, ClassicOptions { budget: options.budget, ..Default::default() })?;
    let d = classic.definable(&negated)?;
    debug_assert_eq!(d.vars, vars);
    stats.matrix_states = classic.stats.max_states.max(d.nfa.num_states());
    if n == 0 {
        return Ok((is_empty(&d.nfa)?, stats));
    }
    let keep: Vec<usize> = (0..n).collect();
    let bad = if n == vars.len() { (*d.nfa).clone() } else { project(&d.nfa, &keep)?.reduce() };
    stats.inner_states = bad.num_states();
    let outer = domain_power(&p.domain, n)?;
    let out = difference_witness(&outer, &bad, options.budget)?;
    stats.peak_subsets = out.subsets;
    stats.explored_states = out.explored;
    Ok((out.witness.is_some(), stats))
}
