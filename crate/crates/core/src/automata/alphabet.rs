//! Letters, symbol indices and small symbol sets.

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// Index of a letter of the base alphabet, or of the padding mark.
pub type Symbol = u8;

/// Largest number of base letters an alphabet may hold (the padding mark
/// takes the last slot of a 256-symbol set).
pub const MAX_LETTERS: usize = 255;

/// A finite base alphabet together with a distinguished padding mark.
///
/// Base letters get indices `0..len()` in the order they were given; that
/// order is the fixed letter order used for length-lexicographic comparisons
/// and witness tie-breaking. The padding mark has index `len()` and sorts
/// after every letter.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    pad: String,
    index: FxHashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        letters: impl IntoIterator<Item = S>,
        pad: impl Into<String>,
    ) -> Result<Arc<Self>> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        let pad = pad.into();
        if letters.len() > MAX_LETTERS {
            return Err(Error::Alphabet(format!(
                "at most {MAX_LETTERS} letters are supported, got {}",
                letters.len()
            )));
        }
        let mut index = FxHashMap::default();
        for (i, l) in letters.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::Alphabet("letters must be non-empty strings".into()));
            }
            if index.insert(l.clone(), i as Symbol).is_some() {
                return Err(Error::Alphabet(format!("duplicate letter {l:?}")));
            }
        }
        if pad.is_empty() {
            return Err(Error::Alphabet("padding mark must be a non-empty string".into()));
        }
        if index.contains_key(&pad) {
            return Err(Error::Alphabet(format!("padding mark {pad:?} occurs in the alphabet")));
        }
        Ok(Arc::new(Alphabet { letters, pad, index }))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    #[inline]
    pub fn pad(&self) -> Symbol {
        self.letters.len() as Symbol
    }

    pub fn pad_name(&self) -> &str {
        &self.pad
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, s: Symbol) -> &str {
        if s == self.pad() {
            &self.pad
        } else {
            &self.letters[s as usize]
        }
    }

    /// Looks up a base letter (the padding mark is rejected).
    pub fn letter(&self, name: &str) -> Result<Symbol> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Alphabet(format!("letter {name:?} is not in the alphabet")))
    }

    /// Looks up a base letter or the padding mark.
    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        if name == self.pad {
            Ok(self.pad())
        } else {
            self.letter(name)
        }
    }

    /// All base letters.
    pub fn letter_set(&self) -> SymbolSet {
        SymbolSet::range(self.len())
    }

    /// All base letters plus the padding mark.
    pub fn full_set(&self) -> SymbolSet {
        SymbolSet::range(self.len() + 1)
    }

    pub fn pad_set(&self) -> SymbolSet {
        SymbolSet::single(self.pad())
    }

    /// Splits a word given as one string per letter, or as a plain string
    /// when every letter is a single character.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        let single_chars = self.letters.iter().all(|l| l.chars().count() == 1);
        if single_chars {
            text.chars().map(|c| self.letter(&c.to_string())).collect()
        } else if text.is_empty() {
            Ok(Vec::new())
        } else {
            text.split_whitespace().map(|t| self.letter(t)).collect()
        }
    }

    /// Renders a word; letters are separated by spaces unless all letters
    /// are single characters.
    pub fn render_word(&self, word: &[Symbol]) -> String {
        let single_chars = self.letters.iter().all(|l| l.chars().count() == 1);
        let parts: Vec<&str> = word.iter().map(|&s| self.name(s)).collect();
        if single_chars {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?}, pad={:?})", self.letters, self.pad)
    }
}

/// A set of symbols, stored as a 256-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SymbolSet([u64; 4]);

impl SymbolSet {
    pub const EMPTY: SymbolSet = SymbolSet([0; 4]);

    #[inline]
    pub fn single(s: Symbol) -> Self {
        let mut set = Self::EMPTY;
        set.insert(s);
        set
    }

    /// The set `{0, .., n-1}`.
    pub fn range(n: usize) -> Self {
        let mut words = [0u64; 4];
        for (i, w) in words.iter_mut().enumerate() {
            let lo = i * 64;
            if n >= lo + 64 {
                *w = u64::MAX;
            } else if n > lo {
                *w = (1u64 << (n - lo)) - 1;
            }
        }
        SymbolSet(words)
    }

    #[inline]
    pub fn insert(&mut self, s: Symbol) {
        self.0[(s >> 6) as usize] |= 1u64 << (s & 63);
    }

    #[inline]
    pub fn remove(&mut self, s: Symbol) {
        self.0[(s >> 6) as usize] &= !(1u64 << (s & 63));
    }

    #[inline]
    pub fn contains(&self, s: Symbol) -> bool {
        self.0[(s >> 6) as usize] & (1u64 << (s & 63)) != 0
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    #[inline]
    pub fn and(&self, o: &Self) -> Self {
        SymbolSet([
            self.0[0] & o.0[0],
            self.0[1] & o.0[1],
            self.0[2] & o.0[2],
            self.0[3] & o.0[3],
        ])
    }

    #[inline]
    pub fn or(&self, o: &Self) -> Self {
        SymbolSet([
            self.0[0] | o.0[0],
            self.0[1] | o.0[1],
            self.0[2] | o.0[2],
            self.0[3] | o.0[3],
        ])
    }

    #[inline]
    pub fn minus(&self, o: &Self) -> Self {
        SymbolSet([
            self.0[0] & !o.0[0],
            self.0[1] & !o.0[1],
            self.0[2] & !o.0[2],
            self.0[3] & !o.0[3],
        ])
    }

    #[inline]
    pub fn is_subset(&self, o: &Self) -> bool {
        self.minus(o).is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Smallest member.
    pub fn first(&self) -> Option<Symbol> {
        for (i, w) in self.0.iter().enumerate() {
            if *w != 0 {
                return Some((i * 64 + w.trailing_zeros() as usize) as Symbol);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros();
                    w &= w - 1;
                    Some((i as u32 * 64 + t) as Symbol)
                }
            })
        })
    }
}

impl FromIterator<Symbol> for SymbolSet {
    fn from_iter<T: IntoIterator<Item = Symbol>>(iter: T) -> Self {
        let mut s = SymbolSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
