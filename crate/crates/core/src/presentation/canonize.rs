//! Passing to an injective presentation by keeping the length-lexicographically
//! least representative of each equality class.

use std::sync::Arc;

use indexmap::IndexMap;

use super::model::{Presentation, Relation};
use super::validate::{validate, Check};
use crate::automata::ops::{complement, domain_power, llex_less, product, project};
use crate::error::{Error, Result};

/// Requires the equality to be an equivalence on the domain. A relation that
/// is not closed under the equality is replaced by its saturation: a class
/// tuple belongs to the result when some representative tuple is related.
pub fn canonize(p: &Presentation, budget: usize) -> Result<Presentation> {
    let report = validate(p, budget)?;
    let ids: Vec<&str> =
        report.failed().filter(|f| f.check != Check::CongruenceCompat).map(|f| f.check.id()).collect();
    if !ids.is_empty() {
        return Err(Error::Precondition(format!("presentation is invalid: {}", ids.join(", "))));
    }
    canonize_unchecked(p, budget)
}

/// Canonization without running the validator first.
pub fn canonize_unchecked(p: &Presentation, budget: usize) -> Result<Presentation> {
    let Some(eq) = &p.equality else {
        return Ok(p.clone());
    };
    // (u, v) with v <llex u and u ≡ v: u is not the least of its class.
    let greater = llex_less(&p.alphabet).rearrange(&[1, 0], 2)?;
    let beaten = project(&product(eq, &greater)?.reduce(), &[0])?;
    let domain = product(&p.domain, &complement(&beaten, budget)?)?.reduce();
    let mut relations = IndexMap::new();
    for (name, r) in &p.relations {
        let m = r.arity;
        let mut acc = r.nfa.cylindrify(&(0..m).collect::<Vec<_>>(), 2 * m)?;
        for i in 0..m {
            acc = product(&acc, &eq.cylindrify(&[i, m + i], 2 * m)?)?.reduce();
        }
        let moved = project(&acc, &(m..2 * m).collect::<Vec<_>>())?;
        let restricted = product(&moved, &domain_power(&domain, m)?)?.reduce();
        relations.insert(name.clone(), Relation { arity: m, nfa: Arc::new(restricted) });
    }
    Presentation::new(p.alphabet.clone(), domain, None, relations)
}
