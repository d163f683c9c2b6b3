//! Canonical labelling of small coloured structures by colour refinement
//! and individualization.

use std::collections::BTreeSet;

use super::sphere::Sphere;

/// A labelling-independent key: two structures get equal keys exactly when
/// they are isomorphic by a colour-preserving map.
pub fn canonical_key(size: usize, colors: &[u64], relations: &[BTreeSet<Vec<usize>>]) -> Vec<u64> {
    let mut incident: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); size];
    for (r, set) in relations.iter().enumerate() {
        for t in set {
            let mut seen = Vec::new();
            for &x in t {
                if !seen.contains(&x) {
                    seen.push(x);
                    incident[x].push((r, t));
                }
            }
        }
    }
    let ctx = Ctx { size, colors, relations, incident };
    let start = ranks(&colors.iter().map(|&c| vec![c]).collect::<Vec<_>>());
    let mut best = None;
    ctx.search(start, &mut best);
    best.unwrap_or_default()
}

pub fn sphere_key(s: &Sphere) -> Vec<u64> {
    let mut colors = vec![0u64; s.size];
    for (i, &c) in s.centers.iter().enumerate() {
        colors[c] |= 1 << i;
    }
    let mut key = canonical_key(s.size, &colors, &s.relations);
    key.insert(0, s.budget as u64);
    key.insert(1, s.centers.len() as u64);
    key
}

/// Whether two spheres are isomorphic by a map sending centres to centres
/// in order.
pub fn sphere_iso(a: &Sphere, b: &Sphere) -> bool {
    a.size == b.size
        && a.centers.len() == b.centers.len()
        && a.relations.iter().map(BTreeSet::len).eq(b.relations.iter().map(BTreeSet::len))
        && sphere_key(a) == sphere_key(b)
}

struct Ctx<'a> {
    size: usize,
    colors: &'a [u64],
    relations: &'a [BTreeSet<Vec<usize>>],
    incident: Vec<Vec<(usize, &'a Vec<usize>)>>,
}

/// Dense ranks of the given keys, preserving their order.
fn ranks<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let sorted: BTreeSet<K> = keys.iter().cloned().collect();
    let sorted: Vec<K> = sorted.into_iter().collect();
    keys.iter().map(|k| sorted.binary_search(k).unwrap_or(0) as u32).collect()
}

impl Ctx<'_> {
    fn refine(&self, mut col: Vec<u32>) -> Vec<u32> {
        let mut classes = col.iter().collect::<BTreeSet<_>>().len();
        loop {
            let keys: Vec<(u32, Vec<(usize, Vec<u32>, usize)>)> = (0..self.size)
                .map(|v| {
                    let mut sig: Vec<(usize, Vec<u32>, usize)> = self.incident[v]
                        .iter()
                        .map(|&(r, t)| {
                            let pos = t.iter().enumerate().fold(0usize, |m, (i, &x)| m | (usize::from(x == v) << i));
                            (r, t.iter().map(|&x| col[x]).collect(), pos)
                        })
                        .collect();
                    sig.sort_unstable();
                    (col[v], sig)
                })
                .collect();
            let next = ranks(&keys);
            let n = next.iter().collect::<BTreeSet<_>>().len();
            col = next;
            if n == classes {
                return col;
            }
            classes = n;
        }
    }

    fn encode(&self, col: &[u32]) -> Vec<u64> {
        let mut order = vec![0; self.size];
        for v in 0..self.size {
            order[col[v] as usize] = v;
        }
        let mut out = vec![self.size as u64];
        out.extend(order.iter().map(|&v| self.colors[v]));
        for set in self.relations {
            let mut ts: Vec<Vec<u64>> =
                set.iter().map(|t| t.iter().map(|&x| col[x] as u64).collect()).collect();
            ts.sort_unstable();
            out.push(u64::MAX);
            out.push(ts.len() as u64);
            out.extend(ts.into_iter().flatten());
        }
        out
    }

    fn search(&self, col: Vec<u32>, best: &mut Option<Vec<u64>>) {
        let col = self.refine(col);
        let mut count = vec![0usize; self.size];
        for &c in &col {
            count[c as usize] += 1;
        }
        let Some(cell) = (0..self.size).find(|&c| count[c] > 1) else {
            let key = self.encode(&col);
            if best.as_ref().is_none_or(|b| key < *b) {
                *best = Some(key);
            }
            return;
        };
        for v in (0..self.size).filter(|&v| col[v] as usize == cell) {
            let split: Vec<u32> = (0..self.size)
                .map(|w| {
                    let c = 2 * col[w];
                    if col[w] as usize == cell && w != v {
                        c + 1
                    } else {
                        c
                    }
                })
                .collect();
            self.search(ranks(&split), best);
        }
    }
}
