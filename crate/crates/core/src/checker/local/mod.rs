//! Model checking by enumerating realizable neighbourhood types.
//!
//! For a sentence of quantifier depth `N`, the truth of a subformula at a
//! tuple of `k` elements only depends on the isomorphism type of the
//! neighbourhood of radius `2^(N − i)` around the `i`-th element. The
//! checker walks the tree of such types: a quantifier ranges over the
//! realizable one-centre extensions of the current type.

mod canon;
mod extend;
mod realize;
mod sphere;

use std::collections::HashMap;

use serde::Serialize;

pub use canon::{canonical_key, sphere_iso, sphere_key};
pub use realize::{realizable, RealizeStats, Realizer};
pub use sphere::{extract_sphere, radius, Sphere};

use crate::automata::ops::DEFAULT_SUBSET_BUDGET;
use crate::automata::Symbol;
use crate::error::{Error, Result};
use crate::logic::Formula;
use crate::presentation::{max_degree, DegreeResult, Presentation, DEFAULT_DEGREE_CAP};
use extend::Extender;

#[derive(Clone, Copy, Debug)]
pub struct LocalOptions {
    /// State budget for each multi-track search.
    pub budget: usize,
    /// Structures of larger degree are rejected.
    pub degree_cap: usize,
    /// Largest sphere built before giving up; by default `N` times the
    /// number of elements within distance `2^N` in a tree of the degree.
    pub size_cap: Option<usize>,
    /// Caches realizability verdicts by canonical form.
    pub memoize: bool,
}

impl Default for LocalOptions {
    fn default() -> Self {
        LocalOptions { budget: DEFAULT_SUBSET_BUDGET, degree_cap: DEFAULT_DEGREE_CAP, size_cap: None, memoize: true }
    }
}

/// `n · (1 + δ + … + δ^(2^n))`, saturating.
fn default_size_cap(n: usize, degree: usize) -> usize {
    let radius = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    let mut total: usize = 1;
    let mut layer: usize = 1;
    for _ in 0..radius.min(64) {
        layer = layer.saturating_mul(degree);
        total = total.saturating_add(layer);
        if layer == 0 {
            break;
        }
    }
    total.saturating_mul(n.max(1))
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalStats {
    pub degree: usize,
    /// Distinct neighbourhood types enumerated.
    pub spheres: usize,
    pub realizability: RealizeStats,
    /// Subformula values answered from the cache.
    pub eval_hits: usize,
}

struct Node {
    sphere: Sphere,
    words: Vec<Vec<Symbol>>,
    children: Option<Vec<usize>>,
}

/// A checker keeping the enumerated types between sentences.
pub struct LocalChecker<'p> {
    realizer: Realizer<'p>,
    options: LocalOptions,
    degree: usize,
    nodes: Vec<Node>,
    index: HashMap<Vec<u64>, usize>,
    values: HashMap<(usize, usize), bool>,
    stats: LocalStats,
}

impl<'p> LocalChecker<'p> {
    /// The presentation must be injective with degree at most the cap.
    pub fn new(p: &'p Presentation, options: LocalOptions) -> Result<Self> {
        let mut realizer = Realizer::new(p, options.budget)?;
        realizer.memoize = options.memoize;
        let degree = match max_degree(p, options.degree_cap, options.budget)? {
            DegreeResult::Bounded { degree } => degree,
            DegreeResult::ExceedsCap { cap } => {
                return Err(Error::Unsupported(format!("the Gaifman graph has degree above {cap}")))
            }
        };
        Ok(LocalChecker {
            realizer,
            options,
            degree,
            nodes: Vec::new(),
            index: HashMap::new(),
            values: HashMap::new(),
            stats: LocalStats { degree, ..LocalStats::default() },
        })
    }

    pub fn stats(&self) -> LocalStats {
        LocalStats { spheres: self.nodes.len(), realizability: self.realizer.stats, ..self.stats }
    }

    fn intern(&mut self, sphere: Sphere, words: Vec<Vec<Symbol>>) -> usize {
        let key = sphere_key(&sphere);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.nodes.push(Node { sphere, words, children: None });
        self.index.insert(key, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn children(&mut self, node: usize) -> Result<Vec<usize>> {
        if let Some(c) = &self.nodes[node].children {
            return Ok(c.clone());
        }
        let (sphere, words) = (self.nodes[node].sphere.clone(), self.nodes[node].words.clone());
        let cap = self.options.size_cap.unwrap_or_else(|| default_size_cap(sphere.budget, self.degree));
        let exts = Extender::new(&mut self.realizer, self.degree, cap).extensions(&sphere, &words)?;
        let ids: Vec<usize> = exts.into_iter().map(|(s, w)| self.intern(s, w)).collect();
        self.nodes[node].children = Some(ids.clone());
        Ok(ids)
    }

    /// Decides a sentence.
    pub fn decide(&mut self, sentence: &Formula) -> Result<bool> {
        if !sentence.is_sentence() {
            return Err(Error::Binding(format!(
                "formula has free variables: {}",
                sentence.free_vars().into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
        let p = self.realizer.presentation();
        sentence.check_signature(|name| p.relations.get(name).map(|r| r.arity))?;
        let n = sentence.quantifier_depth();
        let root = self.intern(Sphere::empty(n, p.relations.len()), Vec::new());
        self.values.clear();
        self.eval(sentence, root, &mut Vec::new())
    }

    fn eval(&mut self, f: &Formula, node: usize, env: &mut Vec<String>) -> Result<bool> {
        let center = |env: &[String], v: &str| env.iter().rposition(|x| x == v).expect("bound variable");
        let key = (f as *const Formula as usize, node);
        if let Some(&b) = self.values.get(&key) {
            self.stats.eval_hits += 1;
            return Ok(b);
        }
        let value = match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Rel { name, args } => {
                let r = self.realizer.presentation().relations.get_index_of(name).expect("checked signature");
                let idx: Vec<usize> = args.iter().map(|a| center(env, a)).collect();
                self.nodes[node].sphere.holds(r, &idx)
            }
            Formula::Eq { left, right } => {
                let s = &self.nodes[node].sphere;
                s.centers[center(env, left)] == s.centers[center(env, right)]
            }
            Formula::Not { body } => !self.eval(body, node, env)?,
            Formula::And { left, right } => self.eval(left, node, env)? && self.eval(right, node, env)?,
            Formula::Or { left, right } => self.eval(left, node, env)? || self.eval(right, node, env)?,
            Formula::Implies { left, right } => !self.eval(left, node, env)? || self.eval(right, node, env)?,
            Formula::Exists { var, body } | Formula::Forall { var, body } => {
                let want = matches!(f, Formula::Exists { .. });
                env.push(var.clone());
                let mut found = !want;
                for child in self.children(node)? {
                    if self.eval(body, child, env)? == want {
                        found = want;
                        break;
                    }
                }
                env.pop();
                found
            }
        };
        self.values.insert(key, value);
        Ok(value)
    }

    /// The value of a formula on a sphere whose centres stand for `vars`.
    pub fn eval_sphere(&mut self, f: &Formula, vars: &[String], sphere: &Sphere) -> Result<bool> {
        if vars.len() != sphere.centers.len() {
            return Err(Error::Binding("one variable per centre is needed".into()));
        }
        if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(Error::Binding(format!("variable {v} is not bound to a centre")));
        }
        if f.quantifier_depth() + vars.len() > sphere.budget {
            return Err(Error::Usage("the formula is deeper than the sphere's budget allows".into()));
        }
        let p = self.realizer.presentation();
        f.check_signature(|name| p.relations.get(name).map(|r| r.arity))?;
        let Some(words) = self.realizer.realize(sphere)? else {
            return Err(Error::Precondition("the sphere is not realizable".into()));
        };
        let node = self.intern(sphere.clone(), words);
        self.values.clear();
        self.eval(f, node, &mut vars.to_vec())
    }

    /// The realizable one-centre extensions of a sphere, up to isomorphism.
    pub fn extensions(&mut self, sphere: &Sphere) -> Result<Vec<Sphere>> {
        let Some(words) = self.realizer.realize(sphere)? else {
            return Err(Error::Precondition("the sphere is not realizable".into()));
        };
        let node = self.intern(sphere.clone(), words);
        let ids = self.children(node)?;
        Ok(ids.into_iter().map(|i| self.nodes[i].sphere.clone()).collect())
    }
}

/// Decides a sentence on an injective presentation of bounded degree.
pub fn decide_local(p: &Presentation, sentence: &Formula, options: LocalOptions) -> Result<(bool, LocalStats)> {
    let mut c = LocalChecker::new(p, options)?;
    let verdict = c.decide(sentence)?;
    Ok((verdict, c.stats()))
}
