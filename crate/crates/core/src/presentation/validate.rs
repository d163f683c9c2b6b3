//! Structural checks on a presentation.

use serde::Serialize;

use super::model::Presentation;
use crate::automata::ops::{self, compose, domain_power, identity_on, includes, inverse, product};
use crate::automata::{ConvWord, Nfa};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    DomainContainment,
    NoAllPad,
    Reflexive,
    Symmetric,
    Transitive,
    CongruenceCompat,
    Injectivity,
    EmptyWordInDomain,
}

impl Check {
    pub fn id(self) -> &'static str {
        match self {
            Check::DomainContainment => "domain-containment",
            Check::NoAllPad => "no-all-pad",
            Check::Reflexive => "reflexive",
            Check::Symmetric => "symmetric",
            Check::Transitive => "transitive",
            Check::CongruenceCompat => "congruence-compat",
            Check::Injectivity => "injectivity",
            Check::EmptyWordInDomain => "empty-word-in-domain",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub check: Check,
    /// The relation the finding is about, or `"="` for the equality automaton.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub passed: bool,
    /// Failed mandatory findings make the presentation invalid; the others
    /// are informational.
    pub mandatory: bool,
    pub counterexample: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn failed(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| !f.passed && f.mandatory)
    }

    pub fn finding(&self, check: Check) -> Option<&Finding> {
        self.findings.iter().find(|f| f.check == check && !f.passed)
            .or_else(|| self.findings.iter().find(|f| f.check == check))
    }
}

/// Raw runs that read an ill-formed tuple sequence. Such runs never
/// contribute to the language; the finding flags automata that rely on the
/// implicit restriction to well-formed words.
fn ill_formed_run(a: &Nfa) -> Result<Option<ConvWord>> {
    let t = a.trim();
    let pad = t.pad();
    for s in 0..t.num_states() as u32 {
        for e in t.edges(s) {
            if (0..t.tracks()).all(|i| e.guard.track(i).contains(pad)) {
                // The all-pad tuple occurs on a useful transition.
                let mut w = vec![vec![pad; t.tracks()]];
                if let Some(prefix) = ops::shortest_witness(&{
                    let mut p = t.clone();
                    for f in 0..p.num_states() as u32 {
                        p.set_final(f, f == s);
                    }
                    p
                })? {
                    let mut tuples = prefix.tuples().to_vec();
                    tuples.append(&mut w);
                    return Ok(Some(ConvWord::from_tuples(t.tracks(), tuples)));
                }
                return Ok(Some(ConvWord::from_tuples(t.tracks(), w)));
            }
        }
    }
    Ok(None)
}

pub fn validate(p: &Presentation, budget: usize) -> Result<ValidationReport> {
    let alphabet = &p.alphabet;
    let render = |w: &ConvWord| w.render(alphabet);
    let mut findings = Vec::new();
    let mut push = |check: Check, subject: Option<&str>, mandatory: bool, cex: Option<ConvWord>| {
        findings.push(Finding {
            check,
            subject: subject.map(str::to_string),
            passed: cex.is_none(),
            mandatory,
            counterexample: cex.as_ref().map(render),
        });
    };

    // Per-track containment in the domain.
    let mut subjects: Vec<(String, &Nfa)> =
        p.relations.iter().map(|(k, r)| (k.clone(), r.nfa.as_ref())).collect();
    if let Some(eq) = &p.equality {
        subjects.push(("=".to_string(), eq.as_ref()));
    }
    for (name, a) in &subjects {
        let dom = domain_power(&p.domain, a.tracks())?;
        push(Check::DomainContainment, Some(name), true, includes(&dom, a, budget)?);
    }
    push(Check::NoAllPad, Some("domain"), false, ill_formed_run(&p.domain)?);
    for (name, a) in &subjects {
        push(Check::NoAllPad, Some(name), false, ill_formed_run(a)?);
    }

    if let Some(eq) = &p.equality {
        let eq = eq.as_ref();
        let id = identity_on(&p.domain)?;
        push(Check::Reflexive, Some("="), true, includes(eq, &id, budget)?);
        push(Check::Symmetric, Some("="), true, includes(&inverse(eq)?, eq, budget)?);
        let comp = compose(eq, eq)?;
        push(Check::Transitive, Some("="), true, includes(eq, &comp, budget)?);
        for (name, r) in &p.relations {
            let m = r.arity;
            let mut acc = r.nfa.cylindrify(&(0..m).collect::<Vec<_>>(), 2 * m)?;
            for i in 0..m {
                acc = product(&acc, &eq.cylindrify(&[i, m + i], 2 * m)?)?.reduce();
            }
            let moved = ops::project(&acc, &(m..2 * m).collect::<Vec<_>>())?;
            push(Check::CongruenceCompat, Some(name), true, includes(&r.nfa, &moved, budget)?);
        }
        push(Check::Injectivity, Some("="), false, includes(&id, eq, budget)?);
    } else {
        push(Check::Injectivity, None, false, None);
    }

    let empty = ConvWord::empty(1);
    push(
        Check::EmptyWordInDomain,
        Some("domain"),
        false,
        if p.domain.accepts(&empty) { Some(empty) } else { None },
    );

    let passed = findings.iter().all(|f| f.passed || !f.mandatory);
    Ok(ValidationReport { passed, findings })
}
