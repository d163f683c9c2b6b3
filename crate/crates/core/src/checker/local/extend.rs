//! Realizable one-centre extensions of a sphere.
//!
//! The ball around the new centre is built breadth first. Each element at
//! distance below the radius is closed in turn: its tuples with the open
//! elements and with fresh elements are chosen, and every partial choice is
//! checked for realizability before going deeper. Tuples among the remaining
//! open elements are decided last.

use std::collections::{BTreeSet, HashMap};

use super::canon::sphere_key;
use super::realize::{Facts, Realizer};
use super::sphere::{adjacency, all_tuples, distances, radius, Sphere};
use crate::automata::Symbol;
use crate::presentation::degree::short_words;
use crate::error::{Error, Result};

type Word = Vec<Symbol>;

#[derive(Clone, Debug)]
struct Partial {
    size: usize,
    /// Elements below this index belong to the sphere being extended.
    old: usize,
    centers: Vec<usize>,
    present: Vec<BTreeSet<Vec<usize>>>,
    absent: Vec<BTreeSet<Vec<usize>>>,
    closed: Vec<bool>,
    words: Vec<Option<Word>>,
}

impl Partial {
    fn facts(&self) -> Facts<'_> {
        Facts { size: self.size, present: &self.present, absent: &self.absent, closed: &self.closed }
    }

    fn add_element(&mut self) -> usize {
        self.size += 1;
        self.closed.push(false);
        self.words.push(None);
        self.size - 1
    }

    fn decided(&self, r: usize, t: &Vec<usize>) -> bool {
        self.present[r].contains(t) || self.absent[r].contains(t)
    }
}

pub(crate) struct Extender<'r, 'p> {
    pub realizer: &'r mut Realizer<'p>,
    pub arities: Vec<usize>,
    pub degree: usize,
    pub size_cap: usize,
    /// All arities are at most two, so fresh neighbours of the element
    /// being closed are interchangeable.
    binary: bool,
}

/// The tuples over `pool` that contain every element of `must`.
fn tuples_over(arities: &[usize], pool: &[usize], must: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (r, &a) in arities.iter().enumerate() {
        for idx in all_tuples(pool.len(), a) {
            let t: Vec<usize> = idx.into_iter().map(|i| pool[i]).collect();
            if must.iter().all(|m| t.contains(m)) {
                out.push((r, t));
            }
        }
    }
    out
}

impl<'r, 'p> Extender<'r, 'p> {
    pub fn new(realizer: &'r mut Realizer<'p>, degree: usize, size_cap: usize) -> Self {
        let arities: Vec<usize> = realizer.presentation().relations.values().map(|r| r.arity).collect();
        let binary = arities.iter().all(|&a| a <= 2);
        Extender { realizer, arities, degree, size_cap, binary }
    }

    /// A cheap test passed by every realizable partial structure: a witness
    /// extends, or the neighbourhood of the focus elements is realizable.
    fn plausible(&mut self, part: &mut Partial, focus: &[usize]) -> Result<bool> {
        if part.size > self.size_cap {
            return Err(Error::Resource(format!("sphere exceeds {} elements", self.size_cap)));
        }
        let hint = part.words.clone();
        if let Some(w) = self.realizer.reuse(&part.facts(), &hint)? {
            part.words = w.into_iter().map(Some).collect();
            return Ok(true);
        }
        if !self.realizer.check_local(&part.facts(), focus)? {
            return Ok(false);
        }
        for &e in focus {
            if e >= part.old {
                part.words[e] = None;
            }
        }
        Ok(true)
    }

    /// Concrete extensions of the witness of `base` by nearby and short words.
    fn samples(&mut self, base: &Sphere, words: &[Word]) -> Result<HashMap<Vec<u64>, Vec<Word>>> {
        let p = self.realizer.presentation();
        let r = radius(base.budget, base.centers.len());
        let mut candidates: BTreeSet<Word> = short_words(&p.domain, 32).into_iter().collect();
        let mut frontier: Vec<Word> = words.to_vec();
        candidates.extend(frontier.iter().cloned());
        for _ in 0..=r {
            let mut next = Vec::new();
            for u in &frontier {
                let (ball, ws) = self.realizer.extract(std::slice::from_ref(u), 1)?;
                for v in ws.into_iter().take(ball.size) {
                    if candidates.insert(v.clone()) {
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        let mut centers: Vec<Word> = base.centers.iter().map(|&c| words[c].clone()).collect();
        let mut out = HashMap::new();
        for b in candidates {
            centers.push(b);
            let (s, ws) = self.realizer.extract(&centers, base.budget)?;
            centers.pop();
            out.entry(sphere_key(&s)).or_insert(ws);
        }
        Ok(out)
    }

    fn degree_ok(&self, part: &Partial) -> bool {
        adjacency(part.size, &part.present).iter().all(|n| n.len() <= self.degree)
    }

    /// Adds the chosen subset of `tuples`, recording the others as absent.
    fn with_choice(part: &Partial, tuples: &[(usize, Vec<usize>)], mask: u64) -> Partial {
        let mut child = part.clone();
        for (i, (r, t)) in tuples.iter().enumerate() {
            if mask >> i & 1 == 1 {
                child.present[*r].insert(t.clone());
            } else {
                child.absent[*r].insert(t.clone());
            }
        }
        child
    }

    /// All realizable extensions of `base` (with witness words) by one
    /// centre, up to isomorphism.
    pub fn extensions(&mut self, base: &Sphere, words: &[Word]) -> Result<Vec<(Sphere, Vec<Word>)>> {
        let k = base.centers.len();
        if k >= base.budget {
            return Err(Error::Usage("the sphere already has all its centres".into()));
        }
        let absent = base
            .relations
            .iter()
            .zip(&self.arities)
            .map(|(set, &a)| all_tuples(base.size, a).into_iter().filter(|t| !set.contains(t)).collect())
            .collect();
        let start = Partial {
            size: base.size,
            old: base.size,
            centers: base.centers.clone(),
            present: base.relations.clone(),
            absent,
            closed: base.interior(),
            words: words.iter().cloned().map(Some).collect(),
        };
        let r = radius(base.budget, k);
        let mut done = Vec::new();
        for c in 0..=base.size {
            let mut part = start.clone();
            if c == base.size {
                part.add_element();
                if !self.plausible(&mut part, &[c])? {
                    continue;
                }
            }
            part.centers.push(c);
            self.grow(part, r, &mut done)?;
        }
        let mut seen = HashMap::new();
        for part in done {
            let s = Sphere { budget: base.budget, size: part.size, centers: part.centers, relations: part.present };
            seen.entry(sphere_key(&s)).or_insert((s, part.words));
        }
        let samples = self.samples(base, words)?;
        let mut out = Vec::new();
        for (key, (s, hint)) in seen {
            if let Some(w) = samples.get(&key) {
                out.push((s, w.clone()));
            } else if let Some(w) = self.realizer.realize_with(&s, Some(&hint))? {
                out.push((s, w));
            }
        }
        out.sort_by(|a, b| (a.0.size, &a.0.centers).cmp(&(b.0.size, &b.0.centers)));
        Ok(out)
    }

    fn grow(&mut self, part: Partial, r: usize, done: &mut Vec<Partial>) -> Result<()> {
        let c = *part.centers.last().unwrap();
        let dist = distances(&adjacency(part.size, &part.present), c);
        let next = (0..part.size).filter(|&e| !part.closed[e] && dist[e] < r).min_by_key(|&e| (dist[e], e));
        match next {
            Some(e) => {
                let mut closed = Vec::new();
                self.close(part, e, &mut closed)?;
                for p in closed {
                    self.grow(p, r, done)?;
                }
                Ok(())
            }
            None => {
                let open: Vec<usize> = (0..part.size).filter(|&e| !part.closed[e]).collect();
                let pending: Vec<(usize, Vec<usize>)> = tuples_over(&self.arities, &open, &[])
                    .into_iter()
                    .filter(|(r, t)| t.iter().any(|&x| x >= part.old) && !part.decided(*r, t))
                    .collect();
                self.settle(part, &pending, 0, done)
            }
        }
    }

    /// Decides the pending tuples one at a time, trying the witness's value
    /// first.
    fn settle(&mut self, part: Partial, pending: &[(usize, Vec<usize>)], i: usize, done: &mut Vec<Partial>) -> Result<()> {
        let Some((r, t)) = pending.get(i) else {
            done.push(part);
            return Ok(());
        };
        let holds = {
            let ws: Option<Vec<Word>> = t.iter().map(|&x| part.words[x].clone()).collect();
            ws.is_some_and(|ws| self.realizer.presentation().relations[*r].nfa.accepts_words(&ws))
        };
        for value in [holds, !holds] {
            let mut child = part.clone();
            if value {
                child.present[*r].insert(t.clone());
                if !self.degree_ok(&child) {
                    continue;
                }
            } else {
                child.absent[*r].insert(t.clone());
            }
            if self.plausible(&mut child, t)? {
                self.settle(child, pending, i + 1, done)?;
            }
        }
        Ok(())
    }

    /// Realizable ways of completing the neighbourhood of `e`.
    fn close(&mut self, part: Partial, e: usize, out: &mut Vec<Partial>) -> Result<()> {
        let is_new = |x: usize| x >= part.old;
        let candidates: Vec<usize> = (0..part.size)
            .filter(|&x| x != e && !part.closed[x] && (is_new(e) || is_new(x)))
            .collect();
        let mut steps: Vec<(usize, Vec<(usize, Vec<usize>)>)> = Vec::new();
        if is_new(e) {
            steps.push((e, tuples_over(&self.arities, &[e], &[e])));
        }
        for j in 0..candidates.len() {
            let mut pool = vec![e];
            pool.extend(&candidates[..=j]);
            let ts = tuples_over(&self.arities, &pool, &[e, candidates[j]]);
            let ts = ts.into_iter().filter(|(_, t)| t.iter().any(|&x| is_new(x))).collect();
            steps.push((candidates[j], ts));
        }
        self.existing(part, e, &candidates, &steps, 0, out)
    }

    fn existing(
        &mut self,
        part: Partial,
        e: usize,
        candidates: &[usize],
        steps: &[(usize, Vec<(usize, Vec<usize>)>)],
        i: usize,
        out: &mut Vec<Partial>,
    ) -> Result<()> {
        let Some((other, tuples)) = steps.get(i) else {
            return self.fresh(part, e, candidates, 0, out);
        };
        let tuples: Vec<_> = tuples.iter().filter(|(r, t)| !part.decided(*r, t)).cloned().collect();
        if tuples.len() > 20 {
            return Err(Error::Resource("too many candidate tuples around one element".into()));
        }
        for mask in 0..1u64 << tuples.len() {
            let mut child = Self::with_choice(&part, &tuples, mask);
            if self.degree_ok(&child) && self.plausible(&mut child, &[e, *other])? {
                self.existing(child, e, candidates, steps, i + 1, out)?;
            }
        }
        Ok(())
    }

    /// Either closes `e` or gives it another fresh neighbour. With binary
    /// signatures the fresh neighbours are added in increasing order of
    /// their tuple choice.
    fn fresh(&mut self, part: Partial, e: usize, candidates: &[usize], min: u64, out: &mut Vec<Partial>) -> Result<()> {
        let mut closed = part.clone();
        closed.closed[e] = true;
        if self.plausible(&mut closed, &[e])? {
            out.push(closed);
        }
        if adjacency(part.size, &part.present)[e].len() >= self.degree {
            return Ok(());
        }
        let mut base = part;
        let x = base.add_element();
        let others: BTreeSet<usize> =
            candidates.iter().copied().chain(base.old..x).filter(|&y| y != e && !base.closed[y]).collect();
        let mut pool = vec![e];
        pool.extend(others);
        pool.push(x);
        let tuples: Vec<_> = tuples_over(&self.arities, &pool, &[e, x])
            .into_iter()
            .filter(|(r, t)| !base.decided(*r, t))
            .collect();
        if tuples.len() > 20 {
            return Err(Error::Resource("too many candidate tuples around one element".into()));
        }
        let lowest = if self.binary { min.max(1) } else { 1 };
        for mask in lowest..1u64 << tuples.len() {
            let mut child = Self::with_choice(&base, &tuples, mask);
            if self.degree_ok(&child) && self.plausible(&mut child, &[e, x])? {
                self.fresh(child, e, candidates, if self.binary { mask } else { 1 }, out)?;
            }
        }
        Ok(())
    }
}
