//! The automaton of the Gaifman graph.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::model::Presentation;
use crate::automata::image::image;
use crate::automata::ops::{compose, distinct, product, project, DEFAULT_SUBSET_BUDGET};
use crate::automata::{Nfa, Symbol};
use crate::error::{Error, Result};

/// Two-track automaton relating `u` and `v` exactly when their classes are
/// distinct and occur together in some relation tuple.
pub fn gaifman_automaton(p: &Presentation) -> Result<Arc<Nfa>> {
    if let Some(g) = p.gaifman_cell().get() {
        return Ok(g.clone());
    }
    let g = Arc::new(build(p)?);
    let _ = p.gaifman_cell().set(g.clone());
    Ok(g)
}

fn build(p: &Presentation) -> Result<Nfa> {
    let mut acc = Nfa::empty(p.alphabet.clone(), 2);
    for r in p.relations.values() {
        for i in 0..r.arity {
            for j in 0..r.arity {
                if i != j {
                    let pair = project(&r.nfa, &[i, j])?;
                    acc = acc.union(&pair)?.reduce();
                }
            }
        }
    }
    match &p.equality {
        None => Ok(product(&acc, &distinct(&p.alphabet))?.reduce()),
        Some(eq) => {
            // Saturate through the equality on both sides, then remove
            // pairs of equal classes.
            let sat = compose(&compose(eq, &acc)?, eq)?;
            let not_eq = crate::automata::ops::complement(eq, DEFAULT_SUBSET_BUDGET)?;
            Ok(product(&sat, &not_eq)?.reduce())
        }
    }
}

/// Gaifman neighbours of `u` of length at most `max_len`.
pub fn neighbors(p: &Presentation, u: &[Symbol], max_len: usize) -> Result<BTreeSet<Vec<Symbol>>> {
    if !p.domain.accepts_words(&[u.to_vec()]) {
        return Err(Error::Domain(p.alphabet.render_word(u)));
    }
    let g = gaifman_automaton(p)?;
    let img = image(&g, u, max_len.max(u.len()))?;
    if img.truncated {
        return Err(Error::Resource(format!(
            "neighbours of {:?} exceed the length cutoff {max_len}",
            p.alphabet.render_word(u)
        )));
    }
    Ok(img.words)
}
