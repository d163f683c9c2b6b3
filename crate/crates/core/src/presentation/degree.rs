//! Exact degree computation below a cap.

use std::sync::Arc;

use serde::Serialize;

use super::gaifman::gaifman_automaton;
use super::growth::{max_image_size, LetterDfa};
use super::model::Presentation;
use crate::automata::explore::{find, Constraint, Query};
use crate::automata::image::image;
use crate::automata::ops::llex_less;
use crate::automata::{Nfa, Symbol};
use crate::error::{Error, Result};

/// Default cap for degree searches.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Count vectors explored before falling back to the multi-track search.
const COUNT_BUDGET: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum DegreeResult {
    Bounded { degree: usize },
    ExceedsCap { cap: usize },
}

impl DegreeResult {
    pub fn bound(self) -> Option<usize> {
        match self {
            DegreeResult::Bounded { degree } => Some(degree),
            DegreeResult::ExceedsCap { .. } => None,
        }
    }
}

/// Query for a word related by `rel` to `m` distinct words, given in
/// strictly increasing length-lexicographic order to avoid permutations.
pub(crate) fn fan_query(rel: &Arc<Nfa>, m: usize) -> Query {
    let lt = Arc::new(llex_less(rel.alphabet()));
    let mut constraints: Vec<Constraint> =
        (1..=m).map(|i| Constraint::Accept { nfa: rel.clone(), tracks: vec![0, i] }).collect();
    for i in 1..m {
        constraints.push(Constraint::Accept { nfa: lt.clone(), tracks: vec![i, i + 1] });
    }
    Query { tracks: m + 1, constraints }
}

/// A word with at least `m` distinct images under `rel`, with those images.
pub fn fan_witness(rel: &Arc<Nfa>, domain: &Arc<Nfa>, m: usize, budget: usize) -> Result<Option<Vec<Vec<Symbol>>>> {
    if m == 0 {
        let q = Query { tracks: 1, constraints: vec![Constraint::Accept { nfa: domain.clone(), tracks: vec![0] }] };
        return Ok(find(&q, budget)?.0);
    }
    Ok(find(&fan_query(rel, m), budget)?.0)
}

/// Domain words in length-lexicographic order, at most `limit` of them.
pub(crate) fn short_words(domain: &Nfa, limit: usize) -> Vec<Vec<Symbol>> {
    let letters: Vec<Symbol> = domain.alphabet().letter_set().iter().collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    let mut scanned = 0;
    while !layer.is_empty() && scanned < 50 * limit {
        let mut next = Vec::new();
        for w in &layer {
            scanned += 1;
            if domain.accepts_words(std::slice::from_ref(w)) {
                out.push(w.clone());
                if out.len() >= limit {
                    return out;
                }
            }
            for &x in &letters {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        layer = next;
    }
    out
}

fn sampled_degree(p: &Presentation, g: &Nfa) -> Result<usize> {
    let mut best = 0;
    for u in short_words(&p.domain, 64) {
        let img = image(g, &u, u.len() + 4)?;
        best = best.max(img.words.len());
    }
    Ok(best)
}

/// Exact maximal image size of the Gaifman relation by counting over its
/// minimal deterministic automaton: `Some(None)` for an infinite image,
/// `None` when the counting search does not settle within its budget.
fn counted_degree(p: &Presentation, g: &Nfa, budget: usize) -> Result<Option<Option<u64>>> {
    let settle = |r: Result<Option<u64>>| match r {
        Ok(x) => Ok(Some(x)),
        Err(e) if e.is_resource() => Ok(None),
        Err(e) => Err(e),
    };
    let dfa = match LetterDfa::determinize(g, budget.min(COUNT_BUDGET)) {
        Ok(d) => d.minimize(),
        Err(e) if e.is_resource() => return Ok(None),
        Err(e) => return Err(e),
    };
    settle(max_image_size(&dfa, &p.alphabet, COUNT_BUDGET))
}

/// The maximal number of Gaifman neighbours, when it is at most `cap`.
///
/// Short domain words are sampled first; then the degree is counted exactly
/// on a deterministic automaton for the Gaifman relation. When that does not
/// settle, the answer comes from [`max_degree_by_search`].
pub fn max_degree(p: &Presentation, cap: usize, budget: usize) -> Result<DegreeResult> {
    check_degree_args(p, cap)?;
    let g = gaifman_automaton(p)?;
    let sampled = sampled_degree(p, &g)?;
    if sampled > cap {
        return Ok(DegreeResult::ExceedsCap { cap });
    }
    match counted_degree(p, &g, budget)? {
        Some(Some(d)) if d as usize <= cap => Ok(DegreeResult::Bounded { degree: d as usize }),
        Some(_) => Ok(DegreeResult::ExceedsCap { cap }),
        None => search(p, &g, sampled, cap, budget),
    }
}

/// The degree from multi-track searches for a word with `m` distinct
/// neighbours: first `m = cap + 1`, then a binary search below the cap.
pub fn max_degree_by_search(p: &Presentation, cap: usize, budget: usize) -> Result<DegreeResult> {
    check_degree_args(p, cap)?;
    search(p, &gaifman_automaton(p)?, 0, cap, budget)
}

fn check_degree_args(p: &Presentation, cap: usize) -> Result<()> {
    if !p.is_injective() {
        return Err(Error::Precondition("degree computation needs an injective presentation".into()));
    }
    if cap == 0 {
        return Err(Error::Usage("the degree cap must be positive".into()));
    }
    Ok(())
}

fn search(p: &Presentation, g: &Arc<Nfa>, lower: usize, cap: usize, budget: usize) -> Result<DegreeResult> {
    if fan_witness(g, &p.domain, cap + 1, budget)?.is_some() {
        return Ok(DegreeResult::ExceedsCap { cap });
    }
    let (mut lo, mut hi) = (lower, cap);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if fan_witness(g, &p.domain, mid, budget)?.is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(DegreeResult::Bounded { degree: lo })
}
