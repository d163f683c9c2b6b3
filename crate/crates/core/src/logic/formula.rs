//! First-order formulas over a relational signature.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Formula {
    True,
    False,
    Rel { name: String, args: Vec<String> },
    Eq { left: String, right: String },
    Not { body: Box<Formula> },
    And { left: Box<Formula>, right: Box<Formula> },
    Or { left: Box<Formula>, right: Box<Formula> },
    Implies { left: Box<Formula>, right: Box<Formula> },
    Exists { var: String, body: Box<Formula> },
    Forall { var: String, body: Box<Formula> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// Position of a prenex formula in the quantifier alternation hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "level", rename_all = "camelCase")]
pub enum FragmentClass {
    Sigma(usize),
    Pi(usize),
    Unclassified,
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentClass::Sigma(n) => write!(f, "sigma{n}"),
            FragmentClass::Pi(n) => write!(f, "pi{n}"),
            FragmentClass::Unclassified => write!(f, "unclassified"),
        }
    }
}

pub fn rel<S: Into<String>>(name: &str, args: impl IntoIterator<Item = S>) -> Formula {
    Formula::Rel { name: name.to_string(), args: args.into_iter().map(Into::into).collect() }
}

pub fn eq(left: &str, right: &str) -> Formula {
    Formula::Eq { left: left.to_string(), right: right.to_string() }
}

pub fn not(body: Formula) -> Formula {
    Formula::Not { body: Box::new(body) }
}

pub fn and(left: Formula, right: Formula) -> Formula {
    Formula::And { left: Box::new(left), right: Box::new(right) }
}

pub fn or(left: Formula, right: Formula) -> Formula {
    Formula::Or { left: Box::new(left), right: Box::new(right) }
}

pub fn implies(left: Formula, right: Formula) -> Formula {
    Formula::Implies { left: Box::new(left), right: Box::new(right) }
}

pub fn exists(var: &str, body: Formula) -> Formula {
    Formula::Exists { var: var.to_string(), body: Box::new(body) }
}

pub fn forall(var: &str, body: Formula) -> Formula {
    Formula::Forall { var: var.to_string(), body: Box::new(body) }
}

/// Conjunction of all parts; `true` when empty.
pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
    parts.into_iter().reduce(and).unwrap_or(Formula::True)
}

/// Disjunction of all parts; `false` when empty.
pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
    parts.into_iter().reduce(or).unwrap_or(Formula::False)
}

pub fn quantify(q: Quantifier, var: &str, body: Formula) -> Formula {
    match q {
        Quantifier::Exists => exists(var, body),
        Quantifier::Forall => forall(var, body),
    }
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut see = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel { args, .. } => args.iter().for_each(|v| see(v, bound)),
            Formula::Eq { left, right } => {
                see(left, bound);
                see(right, bound);
            }
            Formula::Not { body } => body.collect_free(bound, out),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                left.collect_free(bound, out);
                right.collect_free(bound, out);
            }
            Formula::Exists { var, body } | Formula::Forall { var, body } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_free(&mut Vec::new(), &mut |v| {
            if !out.iter().any(|x| x == v) {
                out.push(v.to_string());
            }
        });
        out
    }

    fn visit_free(&self, bound: &mut Vec<String>, f: &mut dyn FnMut(&str)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel { args, .. } => {
                for v in args {
                    if !bound.contains(v) {
                        f(v);
                    }
                }
            }
            Formula::Eq { left, right } => {
                for v in [left, right] {
                    if !bound.contains(v) {
                        f(v);
                    }
                }
            }
            Formula::Not { body } => body.visit_free(bound, f),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                left.visit_free(bound, f);
                right.visit_free(bound, f);
            }
            Formula::Exists { var, body } | Formula::Forall { var, body } => {
                bound.push(var.clone());
                body.visit_free(bound, f);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel { .. } | Formula::Eq { .. } => 0,
            Formula::Not { body } => body.quantifier_depth(),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                left.quantifier_depth().max(right.quantifier_depth())
            }
            Formula::Exists { body, .. } | Formula::Forall { body, .. } => 1 + body.quantifier_depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel { .. } | Formula::Eq { .. } => 1,
            Formula::Not { body } | Formula::Exists { body, .. } | Formula::Forall { body, .. } => 1 + body.size(),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                1 + left.size() + right.size()
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.quantifier_depth() == 0
    }

    /// Relation names with the arities they are used at.
    pub fn relations(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.each_atom(&mut |f| {
            if let Formula::Rel { name, args } = f {
                if !out.iter().any(|(n, a)| n == name && *a == args.len()) {
                    out.push((name.clone(), args.len()));
                }
            }
        });
        out
    }

    fn each_atom(&self, f: &mut dyn FnMut(&Formula)) {
        match self {
            Formula::True | Formula::False | Formula::Rel { .. } | Formula::Eq { .. } => f(self),
            Formula::Not { body } | Formula::Exists { body, .. } | Formula::Forall { body, .. } => body.each_atom(f),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                left.each_atom(f);
                right.each_atom(f);
            }
        }
    }

    /// Checks relation names and arities against a signature lookup.
    pub fn check_signature(&self, arity_of: impl Fn(&str) -> Option<usize>) -> Result<()> {
        for (name, n) in self.relations() {
            match arity_of(&name) {
                None => return Err(Error::Binding(format!("unknown relation {name:?}"))),
                Some(a) if a != n => {
                    return Err(Error::Binding(format!("relation {name:?} has arity {a}, used with {n} arguments")))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// The quantifier prefix and the remaining matrix.
    pub fn split_prefix(&self) -> (Vec<(Quantifier, &str)>, &Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Exists { var, body } => {
                    prefix.push((Quantifier::Exists, var.as_str()));
                    cur = body;
                }
                Formula::Forall { var, body } => {
                    prefix.push((Quantifier::Forall, var.as_str()));
                    cur = body;
                }
                _ => return (prefix, cur),
            }
        }
    }

    /// Σₙ/Πₙ class of a prenex formula; quantifier-free formulas are Σ₀.
    pub fn classify(&self) -> FragmentClass {
        let (prefix, matrix) = self.split_prefix();
        if !matrix.is_quantifier_free() {
            return FragmentClass::Unclassified;
        }
        let Some(&(first, _)) = prefix.first() else {
            return FragmentClass::Sigma(0);
        };
        let blocks = 1 + prefix.windows(2).filter(|w| w[0].0 != w[1].0).count();
        match first {
            Quantifier::Exists => FragmentClass::Sigma(blocks),
            Quantifier::Forall => FragmentClass::Pi(blocks),
        }
    }

    /// Replaces free occurrences of `var` by `by`, renaming bound variables
    /// that would capture `by`.
    pub fn substitute(&self, var: &str, by: &str) -> Formula {
        let sub = |v: &String| if v == var { by.to_string() } else { v.clone() };
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel { name, args } => Formula::Rel { name: name.clone(), args: args.iter().map(sub).collect() },
            Formula::Eq { left, right } => Formula::Eq { left: sub(left), right: sub(right) },
            Formula::Not { body } => not(body.substitute(var, by)),
            Formula::And { left, right } => and(left.substitute(var, by), right.substitute(var, by)),
            Formula::Or { left, right } => or(left.substitute(var, by), right.substitute(var, by)),
            Formula::Implies { left, right } => implies(left.substitute(var, by), right.substitute(var, by)),
            Formula::Exists { var: v, body } | Formula::Forall { var: v, body } => {
                let q = if matches!(self, Formula::Exists { .. }) { Quantifier::Exists } else { Quantifier::Forall };
                if v == var {
                    return self.clone();
                }
                if v == by && body.free_vars().contains(var) {
                    let avoid: BTreeSet<String> = body.free_vars().into_iter().chain([by.to_string()]).collect();
                    let fresh = fresh_name(v, &avoid);
                    let renamed = body.substitute(v, &fresh);
                    return quantify(q, &fresh, renamed.substitute(var, by));
                }
                quantify(q, v, body.substitute(var, by))
            }
        }
    }

    /// Negation normal form over ¬, ∧, ∨, ∃, ∀ with implications removed.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::True, true) | (Formula::False, false) => Formula::True,
            (Formula::True, false) | (Formula::False, true) => Formula::False,
            (Formula::Rel { .. } | Formula::Eq { .. }, true) => self.clone(),
            (Formula::Rel { .. } | Formula::Eq { .. }, false) => not(self.clone()),
            (Formula::Not { body }, p) => body.nnf_signed(!p),
            (Formula::And { left, right }, true) => and(left.nnf_signed(true), right.nnf_signed(true)),
            (Formula::And { left, right }, false) => or(left.nnf_signed(false), right.nnf_signed(false)),
            (Formula::Or { left, right }, true) => or(left.nnf_signed(true), right.nnf_signed(true)),
            (Formula::Or { left, right }, false) => and(left.nnf_signed(false), right.nnf_signed(false)),
            (Formula::Implies { left, right }, true) => or(left.nnf_signed(false), right.nnf_signed(true)),
            (Formula::Implies { left, right }, false) => and(left.nnf_signed(true), right.nnf_signed(false)),
            (Formula::Exists { var, body }, true) => exists(var, body.nnf_signed(true)),
            (Formula::Exists { var, body }, false) => forall(var, body.nnf_signed(false)),
            (Formula::Forall { var, body }, true) => forall(var, body.nnf_signed(true)),
            (Formula::Forall { var, body }, false) => exists(var, body.nnf_signed(false)),
        }
    }
}

/// `base`, or `base` with the smallest numeric suffix, avoiding `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|n| !taken.contains(n)).unwrap()
}

// Printing, with precedence ! > & > | > -> and quantifiers extending as far
// right as possible.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

impl Formula {
    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let (prec, quantifier) = match self {
            Formula::Implies { .. } => (PREC_IMPLIES, false),
            Formula::Or { .. } => (PREC_OR, false),
            Formula::And { .. } => (PREC_AND, false),
            Formula::Exists { .. } | Formula::Forall { .. } => (0, true),
            _ => (PREC_UNARY, false),
        };
        let paren = if quantifier { ctx > 0 } else { prec < ctx };
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Rel { name, args } => write!(f, "{name}({})", args.join(","))?,
            Formula::Eq { left, right } => write!(f, "{left} = {right}")?,
            Formula::Not { body } => {
                write!(f, "!")?;
                body.write(f, PREC_UNARY)?;
            }
            Formula::And { left, right } => {
                left.write(f, PREC_AND)?;
                write!(f, " & ")?;
                right.write(f, PREC_AND + 1)?;
            }
            Formula::Or { left, right } => {
                left.write(f, PREC_OR)?;
                write!(f, " | ")?;
                right.write(f, PREC_OR + 1)?;
            }
            Formula::Implies { left, right } => {
                left.write(f, PREC_IMPLIES + 1)?;
                write!(f, " -> ")?;
                right.write(f, PREC_IMPLIES)?;
            }
            Formula::Exists { var, body } => {
                write!(f, "E {var}. ")?;
                body.write(f, 0)?;
            }
            Formula::Forall { var, body } => {
                write!(f, "A {var}. ")?;
                body.write(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_takes_the_deepest_branch() {
        let a = rel("r", ["x", "y"]);
        assert_eq!(a.quantifier_depth(), 0);
        assert_eq!(exists("x", forall("y", a.clone())).quantifier_depth(), 2);
        let f = or(exists("x", a.clone()), exists("y", exists("z", a.clone())));
        assert_eq!(f.quantifier_depth(), 2);
    }

    #[test]
    fn classification() {
        let a = rel("r", ["x", "y"]);
        assert_eq!(exists("x", exists("y", a.clone())).classify(), FragmentClass::Sigma(1));
        assert_eq!(exists("x", forall("y", a.clone())).classify(), FragmentClass::Sigma(2));
        assert_eq!(forall("x", a.clone()).classify(), FragmentClass::Pi(1));
        assert_eq!(a.classify(), FragmentClass::Sigma(0));
        let f = exists("x", and(a.clone(), forall("y", a.clone())));
        assert_eq!(f.classify(), FragmentClass::Unclassified);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = exists("y", rel("r", ["x", "y"]));
        let g = f.substitute("x", "y");
        assert_eq!(g.free_vars(), BTreeSet::from(["y".to_string()]));
        assert_eq!(g, exists("y_1", rel("r", ["y", "y_1"])));
    }

    #[test]
    fn printing_uses_precedence() {
        let f = implies(and(rel("p", ["x"]), or(rel("q", ["x"]), eq("x", "y"))), not(exists("z", rel("p", ["z"]))));
        assert_eq!(f.to_string(), "p(x) & (q(x) | x = y) -> !(E z. p(z))");
    }
}
