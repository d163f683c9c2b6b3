//! Model checking by building the automaton of satisfying assignments.
//!
//! Each subformula is turned into an automaton over one track per free
//! variable whose language is the set of satisfying assignments, always
//! contained in the domain power. Conjunction is a product after
//! cylindrification, disjunction a union, negation a complement within the
//! domain power, and quantifiers are projections.

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::automata::ops::{
    complement_within, domain_power, identity_on, includes, is_empty, product, project, DEFAULT_SUBSET_BUDGET,
};
use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::logic::formula::{and, exists, forall, not, or, Formula};
use crate::presentation::{canonize, Presentation};

/// Satisfying assignments of a formula: one track per variable, in the
/// order of `vars`.
#[derive(Clone, Debug)]
pub struct Definable {
    pub vars: Vec<String>,
    pub nfa: Arc<Nfa>,
}

#[derive(Clone, Copy, Debug)]
pub struct ClassicOptions {
    /// Subset-state budget for complementation and inclusion checks.
    pub budget: usize,
    /// Eliminates quantifiers bound by an equality with another variable
    /// before building automata (`∀x(¬x=t ∨ ψ)` becomes `ψ[t/x]`).
    pub one_point: bool,
}

impl Default for ClassicOptions {
    fn default() -> Self {
        ClassicOptions { budget: DEFAULT_SUBSET_BUDGET, one_point: true }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassicStats {
    pub operations: usize,
    pub max_states: usize,
    pub cache_hits: usize,
}

/// Result of a subformula: a constant truth value or an automaton.
#[derive(Clone, Debug)]
enum Value {
    Const(bool),
    Rel(Definable),
}

pub struct ClassicChecker<'a> {
    p: &'a Presentation,
    options: ClassicOptions,
    domain_powers: Vec<Arc<Nfa>>,
    domain_nonempty: bool,
    cache: FxHashMap<String, Value>,
    pub stats: ClassicStats,
}

impl<'a> ClassicChecker<'a> {
    /// The presentation must be injective.
    pub fn new(p: &'a Presentation, options: ClassicOptions) -> Result<Self> {
        if !p.is_injective() {
            return Err(Error::Precondition("the classic checker needs an injective presentation".into()));
        }
        let domain_nonempty = !is_empty(&p.domain)?;
        Ok(ClassicChecker {
            p,
            options,
            domain_powers: Vec::new(),
            domain_nonempty,
            cache: FxHashMap::default(),
            stats: ClassicStats::default(),
        })
    }

    fn domain_power(&mut self, k: usize) -> Result<Arc<Nfa>> {
        while self.domain_powers.len() <= k {
            let n = self.domain_powers.len();
            let a = if n == 0 { Nfa::universal(self.p.alphabet.clone(), 0) } else { domain_power(&self.p.domain, n)? };
            self.domain_powers.push(Arc::new(a));
        }
        Ok(self.domain_powers[k].clone())
    }

    fn record(&mut self, a: Nfa) -> Arc<Nfa> {
        let a = a.reduce();
        self.stats.operations += 1;
        self.stats.max_states = self.stats.max_states.max(a.num_states());
        Arc::new(a)
    }

    /// Decides a sentence.
    pub fn decide(&mut self, sentence: &Formula) -> Result<bool> {
        if !sentence.is_sentence() {
            return Err(Error::Binding(format!(
                "formula has free variables: {}",
                sentence.free_vars().into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
        self.check_signature(sentence)?;
        match self.eval_top(sentence)? {
            Value::Const(b) => Ok(b),
            Value::Rel(_) => unreachable!("sentences evaluate to constants"),
        }
    }

    /// Satisfying assignments of a formula with at least one free variable,
    /// with tracks in order of first occurrence.
    pub fn definable(&mut self, f: &Formula) -> Result<Definable> {
        self.check_signature(f)?;
        let order = f.free_vars_ordered();
        if order.is_empty() {
            return Err(Error::Binding("formula has no free variables".into()));
        }
        let v = self.eval_top(f)?;
        self.expand(v, &order)
    }

    fn check_signature(&self, f: &Formula) -> Result<()> {
        f.check_signature(|n| self.p.relations.get(n).map(|r| r.arity))
    }

    fn eval_top(&mut self, f: &Formula) -> Result<Value> {
        let mut g = f.nnf();
        if self.options.one_point {
            g = one_point(&g);
        }
        self.eval(&g)
    }

    /// Re-expresses a value over exactly the variables `vars`.
    fn expand(&mut self, v: Value, vars: &[String]) -> Result<Definable> {
        let k = vars.len();
        match v {
            Value::Const(true) => Ok(Definable { vars: vars.to_vec(), nfa: self.domain_power(k)? }),
            Value::Const(false) => {
                Ok(Definable { vars: vars.to_vec(), nfa: Arc::new(Nfa::empty(self.p.alphabet.clone(), k)) })
            }
            Value::Rel(d) => {
                if d.vars == vars {
                    return Ok(d);
                }
                let positions: Vec<usize> = d
                    .vars
                    .iter()
                    .map(|v| vars.iter().position(|w| w == v).expect("expansion keeps variables"))
                    .collect();
                let mut a = d.nfa.cylindrify(&positions, k)?;
                for (i, v) in vars.iter().enumerate() {
                    if !d.vars.contains(v) {
                        a = product(&a, &self.p.domain.cylindrify(&[i], k)?)?;
                    }
                }
                let nfa = self.record(a);
                Ok(Definable { vars: vars.to_vec(), nfa })
            }
        }
    }

    fn eval(&mut self, f: &Formula) -> Result<Value> {
        match f {
            Formula::True => Ok(Value::Const(true)),
            Formula::False => Ok(Value::Const(false)),
            Formula::Rel { name, args } => {
                let r = self.p.relation(name)?;
                let vars = distinct_in_order(args);
                let target: Vec<usize> = args.iter().map(|a| vars.iter().position(|v| v == a).unwrap()).collect();
                let a = r.nfa.rearrange(&target, vars.len())?;
                let nfa = self.record(a);
                Ok(Value::Rel(Definable { vars, nfa }))
            }
            Formula::Eq { left, right } => {
                if left == right {
                    Ok(Value::Rel(Definable { vars: vec![left.clone()], nfa: self.p.domain.clone() }))
                } else {
                    let nfa = self.record(identity_on(&self.p.domain)?);
                    Ok(Value::Rel(Definable { vars: vec![left.clone(), right.clone()], nfa }))
                }
            }
            Formula::Not { body } => {
                let v = self.eval(body)?;
                self.negate(v)
            }
            Formula::And { left, right } => {
                let l = self.eval(left)?;
                if matches!(l, Value::Const(false)) {
                    return Ok(l);
                }
                let r = self.eval(right)?;
                match (l, r) {
                    (Value::Const(true), x) | (x, Value::Const(true)) => Ok(x),
                    (_, Value::Const(false)) => Ok(Value::Const(false)),
                    (Value::Rel(a), Value::Rel(b)) => {
                        let vars = union_vars(&a.vars, &b.vars);
                        let ca = cylinder(&a, &vars)?;
                        let cb = cylinder(&b, &vars)?;
                        let nfa = self.record(product(&ca, &cb)?);
                        Ok(Value::Rel(Definable { vars, nfa }))
                    }
                    (Value::Const(false), _) => unreachable!(),
                }
            }
            Formula::Or { left, right } => {
                let l = self.eval(left)?;
                if matches!(l, Value::Const(true)) {
                    return Ok(l);
                }
                let r = self.eval(right)?;
                match (l, r) {
                    (Value::Const(false), x) | (x, Value::Const(false)) => Ok(x),
                    (_, Value::Const(true)) => Ok(Value::Const(true)),
                    (Value::Rel(a), Value::Rel(b)) => {
                        let vars = union_vars(&a.vars, &b.vars);
                        let ea = self.expand(Value::Rel(a), &vars)?;
                        let eb = self.expand(Value::Rel(b), &vars)?;
                        let nfa = self.record(ea.nfa.union(&eb.nfa)?);
                        Ok(Value::Rel(Definable { vars, nfa }))
                    }
                    (Value::Const(true), _) => unreachable!(),
                }
            }
            Formula::Implies { left, right } => self.eval(&or(not((**left).clone()), (**right).clone()).nnf()),
            Formula::Exists { var, body } | Formula::Forall { var, body } => {
                let (key, names) = cache_key(f);
                if let Some(v) = self.cache.get(&key) {
                    self.stats.cache_hits += 1;
                    return Ok(rename_value(v.clone(), &names));
                }
                let is_exists = matches!(f, Formula::Exists { .. });
                let inner = self.eval(body)?;
                let v = self.quantify(is_exists, var, inner)?;
                self.cache.insert(key, canonical_value(&v, &names));
                Ok(v)
            }
        }
    }

    fn negate(&mut self, v: Value) -> Result<Value> {
        match v {
            Value::Const(b) => Ok(Value::Const(!b)),
            Value::Rel(d) => {
                let dom = self.domain_power(d.vars.len())?;
                let nfa = self.record(complement_within(&d.nfa, &dom, self.options.budget)?);
                Ok(Value::Rel(Definable { vars: d.vars, nfa }))
            }
        }
    }

    fn quantify(&mut self, is_exists: bool, var: &str, inner: Value) -> Result<Value> {
        let d = match inner {
            // A vacuous quantifier over a nonempty domain changes nothing.
            Value::Const(b) => return Ok(Value::Const(if self.domain_nonempty { b } else { !is_exists })),
            Value::Rel(d) => d,
        };
        let Some(pos) = d.vars.iter().position(|v| v == var) else {
            if self.domain_nonempty {
                return Ok(Value::Rel(d));
            }
            return Ok(Value::Const(!is_exists));
        };
        if d.vars.len() == 1 {
            // The outermost quantifier of a block: an emptiness or
            // universality check.
            return if is_exists {
                Ok(Value::Const(!is_empty(&d.nfa)?))
            } else {
                Ok(Value::Const(includes(&d.nfa, &self.p.domain, self.options.budget)?.is_none()))
            };
        }
        let keep: Vec<usize> = (0..d.vars.len()).filter(|&i| i != pos).collect();
        let vars: Vec<String> = keep.iter().map(|&i| d.vars[i].clone()).collect();
        if is_exists {
            let nfa = self.record(project(&d.nfa, &keep)?);
            Ok(Value::Rel(Definable { vars, nfa }))
        } else {
            let dom = self.domain_power(d.vars.len())?;
            let neg = complement_within(&d.nfa, &dom, self.options.budget)?.reduce();
            let proj = project(&neg, &keep)?.reduce();
            let dom_k = self.domain_power(keep.len())?;
            let nfa = self.record(complement_within(&proj, &dom_k, self.options.budget)?);
            Ok(Value::Rel(Definable { vars, nfa }))
        }
    }
}

fn distinct_in_order(args: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in args {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for v in b {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

fn cylinder(d: &Definable, vars: &[String]) -> Result<Nfa> {
    let positions: Vec<usize> = d.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
    d.nfa.cylindrify(&positions, vars.len())
}

/// Cache key of a quantified subformula: its text with free variables
/// renamed by first occurrence, and the original free variable names.
fn cache_key(f: &Formula) -> (String, Vec<String>) {
    let names = f.free_vars_ordered();
    let mut g = f.clone();
    // Rename through temporary names to avoid collisions.
    for (i, v) in names.iter().enumerate() {
        g = g.substitute(v, &format!("\u{1}{i}"));
    }
    (g.to_string(), names)
}

fn canonical_value(v: &Value, names: &[String]) -> Value {
    match v {
        Value::Const(b) => Value::Const(*b),
        Value::Rel(d) => Value::Rel(Definable {
            vars: d.vars.iter().map(|x| format!("\u{1}{}", names.iter().position(|n| n == x).unwrap())).collect(),
            nfa: d.nfa.clone(),
        }),
    }
}

fn rename_value(v: Value, names: &[String]) -> Value {
    match v {
        Value::Const(b) => Value::Const(b),
        Value::Rel(d) => Value::Rel(Definable {
            vars: d
                .vars
                .iter()
                .map(|x| names[x.trim_start_matches('\u{1}').parse::<usize>().unwrap()].clone())
                .collect(),
            nfa: d.nfa,
        }),
    }
}

/// One-point rule on a formula in negation normal form:
/// `∀x(¬x=t ∨ ψ) ≡ ψ[t/x]` and `∃x(x=t ∧ ψ) ≡ ψ[t/x]` for a variable
/// `t ≠ x`. Universal quantifiers are pushed through conjunctions and
/// existential ones through disjunctions to expose such patterns.
pub fn one_point(f: &Formula) -> Formula {
    match f {
        Formula::Not { body } => not(one_point(body)),
        Formula::And { left, right } => and(one_point(left), one_point(right)),
        Formula::Or { left, right } => or(one_point(left), one_point(right)),
        Formula::Implies { .. } => one_point(&f.nnf()),
        Formula::Forall { var, body } => {
            let body = one_point(body);
            if let Formula::And { left, right } = &body {
                return and(one_point(&forall(var, (**left).clone())), one_point(&forall(var, (**right).clone())));
            }
            let mut parts = Vec::new();
            flatten(&body, false, &mut parts);
            if let Some(i) = parts.iter().position(|p| matches!(p, Formula::Not { body } if other_side(body, var).is_some()))
            {
                let Formula::Not { body: e } = &parts[i] else { unreachable!() };
                let t = other_side(e, var).unwrap();
                parts.remove(i);
                let rest = parts.into_iter().reduce(or).unwrap_or(Formula::False);
                return one_point(&rest.substitute(var, &t));
            }
            if let Some(split) = distribute(&parts, var, false) {
                return one_point(&forall(var, split));
            }
            forall(var, body)
        }
        Formula::Exists { var, body } => {
            let body = one_point(body);
            if let Formula::Or { left, right } = &body {
                return or(one_point(&exists(var, (**left).clone())), one_point(&exists(var, (**right).clone())));
            }
            let mut parts = Vec::new();
            flatten(&body, true, &mut parts);
            if let Some(i) = parts.iter().position(|p| other_side(p, var).is_some()) {
                let t = other_side(&parts[i], var).unwrap();
                parts.remove(i);
                let rest = parts.into_iter().reduce(and).unwrap_or(Formula::True);
                return one_point(&rest.substitute(var, &t));
            }
            if let Some(split) = distribute(&parts, var, true) {
                return one_point(&exists(var, split));
            }
            exists(var, body)
        }
        _ => f.clone(),
    }
}

/// Distributes one part of a disjunction (or, dually, a conjunction) over
/// the others when every branch of that part pins `var` by an equality:
/// `(A ∧ B) ∨ ψ` becomes `(A ∨ ψ) ∧ (B ∨ ψ)`, which the quantifier then
/// splits into one-point patterns.
fn distribute(parts: &[Formula], var: &str, conj: bool) -> Option<Formula> {
    let pins = |f: &Formula| {
        let mut lits = Vec::new();
        flatten(f, conj, &mut lits);
        lits.iter().any(|l| match l {
            Formula::Not { body } if !conj => other_side(body, var).is_some(),
            _ if conj => other_side(l, var).is_some(),
            _ => false,
        })
    };
    let i = parts.iter().position(|p| {
        let mut branches = Vec::new();
        flatten(p, !conj, &mut branches);
        branches.len() > 1 && branches.iter().all(pins)
    })?;
    let mut branches = Vec::new();
    flatten(&parts[i], !conj, &mut branches);
    let rest: Vec<Formula> = parts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
    let join = |b: Formula| {
        rest.iter().cloned().fold(b, |acc, r| if conj { and(acc, r) } else { or(acc, r) })
    };
    branches.into_iter().map(join).reduce(|a, b| if conj { or(a, b) } else { and(a, b) })
}

fn flatten(f: &Formula, conj: bool, out: &mut Vec<Formula>) {
    match (f, conj) {
        (Formula::And { left, right }, true) | (Formula::Or { left, right }, false) => {
            flatten(left, conj, out);
            flatten(right, conj, out);
        }
        _ => out.push(f.clone()),
    }
}

/// For an equality `x = t` or `t = x` with `t ≠ x`, the variable `t`.
fn other_side(f: &Formula, x: &str) -> Option<String> {
    match f {
        Formula::Eq { left, right } if left == x && right != x => Some(right.clone()),
        Formula::Eq { left, right } if right == x && left != x => Some(left.clone()),
        _ => None,
    }
}

/// Decides a sentence, canonizing a non-injective presentation first.
pub fn decide_classic(p: &Presentation, sentence: &Formula, options: ClassicOptions) -> Result<(bool, ClassicStats)> {
    let canonical;
    let p = if p.is_injective() {
        p
    } else {
        canonical = canonize(p, options.budget)?;
        &canonical
    };
    let mut c = ClassicChecker::new(p, options)?;
    let verdict = c.decide(sentence)?;
    Ok((verdict, c.stats))
}
