//! Conversion to prenex normal form.

use std::collections::BTreeSet;

use super::formula::{and, fresh_name, or, quantify, Formula, Quantifier};

/// A prenex formula: quantifier prefix over a quantifier-free matrix in
/// negation normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prenex {
    pub prefix: Vec<(Quantifier, String)>,
    pub matrix: Formula,
}

impl Prenex {
    pub fn to_formula(&self) -> Formula {
        self.prefix.iter().rev().fold(self.matrix.clone(), |f, (q, v)| quantify(*q, v, f))
    }

    /// Number of quantifier alternation blocks.
    pub fn blocks(&self) -> usize {
        blocks_of(&self.prefix).len()
    }
}

type Block = (Quantifier, Vec<String>);

fn blocks_of(prefix: &[(Quantifier, String)]) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::new();
    for (q, v) in prefix {
        match out.last_mut() {
            Some((p, vs)) if p == q => vs.push(v.clone()),
            _ => out.push((*q, vec![v.clone()])),
        }
    }
    out
}

/// Interleaves two block sequences, keeping each one's order, with as few
/// alternations as possible; ties prefer an existential first block.
fn merge(a: &[Block], b: &[Block]) -> Vec<Block> {
    if a.is_empty() {
        return b.to_vec();
    }
    if b.is_empty() {
        return a.to_vec();
    }
    let push_front = |first: &Block, rest: Vec<Block>| {
        let mut out = vec![first.clone()];
        for blk in rest {
            match out.last_mut() {
                Some((p, vs)) if *p == blk.0 => vs.extend(blk.1),
                _ => out.push(blk),
            }
        }
        out
    };
    if a[0].0 == b[0].0 {
        let mut first = a[0].clone();
        first.1.extend(b[0].1.iter().cloned());
        return push_front(&first, merge(&a[1..], &b[1..]));
    }
    let x = push_front(&a[0], merge(&a[1..], b));
    let y = push_front(&b[0], merge(a, &b[1..]));
    if x.len() < y.len() || (x.len() == y.len() && x[0].0 == Quantifier::Exists) {
        x
    } else {
        y
    }
}

/// Renames bound variables so that each is bound once and none coincides
/// with a free variable; renamed variables get a numeric suffix.
pub fn rename_apart(f: &Formula) -> Formula {
    let mut taken: BTreeSet<String> = f.free_vars();
    go(f, &mut taken)
}

fn go(f: &Formula, taken: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Rel { .. } | Formula::Eq { .. } => f.clone(),
        Formula::Not { body } => super::formula::not(go(body, taken)),
        Formula::And { left, right } => {
            let l = go(left, taken);
            and(l, go(right, taken))
        }
        Formula::Or { left, right } => {
            let l = go(left, taken);
            or(l, go(right, taken))
        }
        Formula::Implies { left, right } => {
            let l = go(left, taken);
            super::formula::implies(l, go(right, taken))
        }
        Formula::Exists { var, body } | Formula::Forall { var, body } => {
            let q = if matches!(f, Formula::Exists { .. }) { Quantifier::Exists } else { Quantifier::Forall };
            let fresh = fresh_name(var, taken);
            taken.insert(fresh.clone());
            let body = if &fresh == var { (**body).clone() } else { body.substitute(var, &fresh) };
            quantify(q, &fresh, go(&body, taken))
        }
    }
}

/// Prenex form with as few quantifier alternations as the formula's
/// structure allows. Bound variables are renamed apart first.
pub fn prenex(f: &Formula) -> Prenex {
    let (blocks, matrix) = pull(&rename_apart(f).nnf());
    let prefix = blocks.into_iter().flat_map(|(q, vs)| vs.into_iter().map(move |v| (q, v))).collect();
    Prenex { prefix, matrix }
}

fn pull(f: &Formula) -> (Vec<Block>, Formula) {
    match f {
        Formula::Exists { var, body } | Formula::Forall { var, body } => {
            let q = if matches!(f, Formula::Exists { .. }) { Quantifier::Exists } else { Quantifier::Forall };
            let (inner, m) = pull(body);
            let mut blocks = vec![(q, vec![var.clone()])];
            for b in inner {
                match blocks.last_mut() {
                    Some((p, vs)) if *p == b.0 => vs.extend(b.1),
                    _ => blocks.push(b),
                }
            }
            (blocks, m)
        }
        Formula::And { left, right } | Formula::Or { left, right } => {
            let (a, ml) = pull(left);
            let (b, mr) = pull(right);
            let m = if matches!(f, Formula::And { .. }) { and(ml, mr) } else { or(ml, mr) };
            (merge(&a, &b), m)
        }
        _ => (Vec::new(), f.clone()),
    }
}
