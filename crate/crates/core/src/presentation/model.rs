use std::path::Path;
use std::sync::{Arc, OnceLock};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, AutomatonJson, Nfa};
use crate::error::{Error, Result};

/// A named relation of a presentation.
#[derive(Clone, Debug)]
pub struct Relation {
    pub arity: usize,
    pub nfa: Arc<Nfa>,
}

/// A string automatic presentation: a domain automaton, an optional
/// equality automaton (absent means the presentation is injective) and one
/// automaton per relation symbol.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub alphabet: Arc<Alphabet>,
    pub domain: Arc<Nfa>,
    pub equality: Option<Arc<Nfa>>,
    pub relations: IndexMap<String, Relation>,
    gaifman: OnceLock<Arc<Nfa>>,
}

impl Presentation {
    pub fn new(
        alphabet: Arc<Alphabet>,
        domain: Nfa,
        equality: Option<Nfa>,
        relations: IndexMap<String, Relation>,
    ) -> Result<Self> {
        if domain.tracks() != 1 {
            return Err(Error::Dimension("the domain automaton must have one track".into()));
        }
        if *domain.alphabet() != alphabet {
            return Err(Error::Alphabet("domain alphabet differs from the presentation".into()));
        }
        if let Some(e) = &equality {
            if e.tracks() != 2 || *e.alphabet() != alphabet {
                return Err(Error::Dimension("the equality automaton must have two tracks".into()));
            }
        }
        for (name, r) in &relations {
            if r.arity == 0 || r.nfa.tracks() != r.arity {
                return Err(Error::Dimension(format!(
                    "relation {name} has arity {} but its automaton has {} tracks",
                    r.arity,
                    r.nfa.tracks()
                )));
            }
            if *r.nfa.alphabet() != alphabet {
                return Err(Error::Alphabet(format!("relation {name} uses a different alphabet")));
            }
        }
        Ok(Presentation {
            alphabet,
            domain: Arc::new(domain),
            equality: equality.map(Arc::new),
            relations,
            gaifman: OnceLock::new(),
        })
    }

    pub fn is_injective(&self) -> bool {
        self.equality.is_none()
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::Binding(format!("unknown relation {name:?}")))
    }

    /// Replaces one relation automaton, keeping everything else.
    pub fn with_relation(&self, name: &str, nfa: Nfa) -> Result<Self> {
        let mut rels = self.relations.clone();
        rels.insert(name.to_string(), Relation { arity: nfa.tracks(), nfa: Arc::new(nfa) });
        Presentation::new(
            self.alphabet.clone(),
            (*self.domain).clone(),
            self.equality.as_deref().cloned(),
            rels,
        )
    }

    /// Replaces the equality automaton.
    pub fn with_equality(&self, equality: Option<Nfa>) -> Result<Self> {
        Presentation::new(self.alphabet.clone(), (*self.domain).clone(), equality, self.relations.clone())
    }

    pub(crate) fn gaifman_cell(&self) -> &OnceLock<Arc<Nfa>> {
        &self.gaifman
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            alphabet: self.alphabet.letters().to_vec(),
            pad: self.alphabet.pad_name().to_string(),
            domain: self.domain.to_json(),
            equality: self.equality.as_ref().map(|e| e.to_json()),
            relations: self
                .relations
                .iter()
                .map(|(k, r)| (k.clone(), RelationJson { arity: r.arity, automaton: r.nfa.to_json() }))
                .collect(),
        }
    }

    pub fn from_json(j: &PresentationJson) -> Result<Self> {
        let alphabet = Alphabet::new(j.alphabet.iter().cloned(), j.pad.clone())?;
        let domain = Nfa::from_json(&j.domain, Some(&alphabet))?;
        let equality = j.equality.as_ref().map(|e| Nfa::from_json(e, Some(&alphabet))).transpose()?;
        let mut relations = IndexMap::new();
        for (name, r) in &j.relations {
            let nfa = Nfa::from_json(&r.automaton, Some(&alphabet))?;
            relations.insert(name.clone(), Relation { arity: r.arity, nfa: Arc::new(nfa) });
        }
        Presentation::new(alphabet, domain, equality, relations)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let j: PresentationJson = serde_json::from_str(&text)?;
        Presentation::from_json(&j)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationJson {
    pub arity: usize,
    pub automaton: AutomatonJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationJson {
    pub alphabet: Vec<String>,
    pub pad: String,
    pub domain: AutomatonJson,
    #[serde(default)]
    pub equality: Option<AutomatonJson>,
    #[serde(default)]
    pub relations: IndexMap<String, RelationJson>,
}
