//! Regular expressions over cube letters, compiled without ε-moves.

use std::sync::Arc;

use crate::automata::{Alphabet, Cube, Nfa};

#[derive(Clone, Debug)]
pub(crate) enum Re {
    #[cfg_attr(not(test), allow(dead_code))]
    Eps,
    Sym(Cube),
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    Star(Box<Re>),
}

pub(crate) fn sym(c: Cube) -> Re {
    Re::Sym(c)
}

/// One-track letter from a set.
#[cfg(test)]
pub(crate) fn set(s: crate::automata::SymbolSet) -> Re {
    Re::Sym(Cube(vec![s]))
}

pub(crate) fn cat(parts: impl IntoIterator<Item = Re>) -> Re {
    Re::Cat(parts.into_iter().collect())
}

pub(crate) fn alt(parts: impl IntoIterator<Item = Re>) -> Re {
    Re::Alt(parts.into_iter().collect())
}

pub(crate) fn star(r: Re) -> Re {
    Re::Star(Box::new(r))
}

pub(crate) fn plus(r: Re) -> Re {
    cat([r.clone(), star(r)])
}

struct Info {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

struct Builder {
    guards: Vec<Cube>,
    follow: Vec<Vec<usize>>,
}

impl Builder {
    fn walk(&mut self, r: &Re) -> Info {
        match r {
            Re::Eps => Info { nullable: true, first: vec![], last: vec![] },
            Re::Sym(c) => {
                let p = self.guards.len();
                self.guards.push(c.clone());
                self.follow.push(Vec::new());
                Info { nullable: false, first: vec![p], last: vec![p] }
            }
            Re::Alt(parts) => {
                let mut out = Info { nullable: false, first: vec![], last: vec![] };
                for p in parts {
                    let i = self.walk(p);
                    out.nullable |= i.nullable;
                    out.first.extend(i.first);
                    out.last.extend(i.last);
                }
                out
            }
            Re::Cat(parts) => {
                let mut out = Info { nullable: true, first: vec![], last: vec![] };
                for p in parts {
                    let i = self.walk(p);
                    for &l in &out.last {
                        self.follow[l].extend(i.first.iter().copied());
                    }
                    if out.nullable {
                        out.first.extend(i.first.iter().copied());
                    }
                    if i.nullable {
                        out.last.extend(i.last);
                    } else {
                        out.last = i.last;
                    }
                    out.nullable &= i.nullable;
                }
                out
            }
            Re::Star(body) => {
                let i = self.walk(body);
                for &l in &i.last {
                    self.follow[l].extend(i.first.iter().copied());
                }
                Info { nullable: true, first: i.first, last: i.last }
            }
        }
    }
}

/// Position automaton of `r` with `tracks` tracks.
pub(crate) fn compile(alphabet: &Arc<Alphabet>, tracks: usize, r: &Re) -> Nfa {
    let mut b = Builder { guards: Vec::new(), follow: Vec::new() };
    let info = b.walk(r);
    let mut a = Nfa::new(alphabet.clone(), tracks);
    let start = a.add_state(info.nullable);
    a.set_initial(start);
    let mut is_last = vec![false; b.guards.len()];
    for &l in &info.last {
        is_last[l] = true;
    }
    for &f in &is_last {
        a.add_state(f);
    }
    let mut firsts = info.first.clone();
    firsts.sort_unstable();
    firsts.dedup();
    for p in firsts {
        a.add_edge(start, b.guards[p].clone(), p as u32 + 1);
    }
    for (q, fol) in b.follow.iter_mut().enumerate() {
        fol.sort_unstable();
        fol.dedup();
        for &p in fol.iter() {
            a.add_edge(q as u32 + 1, b.guards[p].clone(), p as u32 + 1);
        }
    }
    a.reduce()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::SymbolSet;

    #[test]
    fn compiles_basic_expressions() {
        let al = Alphabet::new(["a", "b"], "_").unwrap();
        let (a, b) = (SymbolSet::single(0), SymbolSet::single(1));
        // a (b a)* b?
        let r = cat([set(a), star(cat([set(b), set(a)])), alt([set(b), Re::Eps])]);
        let n = compile(&al, 1, &r);
        let acc = |w: &str| n.accepts_words(&[al.parse_word(w).unwrap()]);
        for w in ["a", "ab", "aba", "ababab", "abab"] {
            assert!(acc(w), "{w}");
        }
        for w in ["", "b", "aa", "abb", "ba"] {
            assert!(!acc(w), "{w}");
        }
        let p = compile(&al, 1, &plus(set(a)));
        assert!(!p.accepts_words(&[vec![]]));
        assert!(p.accepts_words(&[vec![0, 0]]));
    }
}
