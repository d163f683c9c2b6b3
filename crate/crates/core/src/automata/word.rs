//! Convolutions of word tuples.

use serde::Serialize;

use super::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};

/// A convolution: a sequence of letter tuples of equal width, obeying the
/// end-padding discipline.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConvWord {
    tracks: usize,
    tuples: Vec<Vec<Symbol>>,
}

impl ConvWord {
    /// The empty convolution of the given width.
    pub fn empty(tracks: usize) -> Self {
        ConvWord { tracks, tuples: Vec::new() }
    }

    /// Builds a convolution from raw tuples without checking well-formedness.
    pub fn from_tuples(tracks: usize, tuples: Vec<Vec<Symbol>>) -> Self {
        debug_assert!(tuples.iter().all(|t| t.len() == tracks));
        ConvWord { tracks, tuples }
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<Symbol>] {
        &self.tuples
    }

    /// Checks the end-padding discipline and the absence of all-pad tuples.
    pub fn is_well_formed(&self, pad: Symbol) -> bool {
        let mut ended = vec![false; self.tracks];
        for t in &self.tuples {
            if t.iter().all(|&x| x == pad) {
                return false;
            }
            for (e, &x) in ended.iter_mut().zip(t) {
                if x == pad {
                    *e = true;
                } else if *e {
                    return false;
                }
            }
        }
        true
    }

    /// Splits into the component words (padding removed).
    pub fn split(&self, pad: Symbol) -> Vec<Vec<Symbol>> {
        (0..self.tracks)
            .map(|i| self.tuples.iter().map(|t| t[i]).filter(|&x| x != pad).collect())
            .collect()
    }

    pub fn render(&self, alphabet: &Alphabet) -> Vec<String> {
        self.split(alphabet.pad())
            .iter()
            .map(|w| alphabet.render_word(w))
            .collect()
    }
}

/// Zips words into a convolution, padding shorter words at the end.
pub fn convolve(words: &[Vec<Symbol>], pad: Symbol) -> Result<ConvWord> {
    if words.is_empty() {
        return Err(Error::Dimension("cannot convolve zero words".into()));
    }
    if let Some(bad) = words.iter().flatten().find(|&&x| x >= pad) {
        return Err(Error::Alphabet(format!("symbol index {bad} is not a letter")));
    }
    let len = words.iter().map(Vec::len).max().unwrap_or(0);
    let tuples = (0..len)
        .map(|j| words.iter().map(|w| w.get(j).copied().unwrap_or(pad)).collect())
        .collect();
    Ok(ConvWord { tracks: words.len(), tuples })
}

/// Parses textual words and convolves them.
pub fn convolve_text(alphabet: &Alphabet, words: &[&str]) -> Result<ConvWord> {
    let parsed: Vec<Vec<Symbol>> = words
        .iter()
        .map(|w| alphabet.parse_word(w))
        .collect::<Result<_>>()?;
    convolve(&parsed, alphabet.pad())
}

/// Serializable rendering of a convolution, used in reports.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RenderedWord {
    pub words: Vec<String>,
}

impl RenderedWord {
    pub fn new(w: &ConvWord, alphabet: &Alphabet) -> Self {
        RenderedWord { words: w.render(alphabet) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolve_pads_the_shorter_word() {
        let a = Alphabet::new(["a", "b"], "#").unwrap();
        let w = convolve_text(&a, &["ab", "a"]).unwrap();
        assert_eq!(w.tuples(), &[vec![0, 0], vec![1, 2]]);
        let w = convolve_text(&a, &["", "ab"]).unwrap();
        assert_eq!(w.tuples(), &[vec![2, 0], vec![2, 1]]);
        assert!(w.is_well_formed(2));
        assert_eq!(w.render(&a), vec!["".to_string(), "ab".to_string()]);
    }

    #[test]
    fn well_formedness() {
        let bad = ConvWord::from_tuples(2, vec![vec![2, 0], vec![0, 0]]);
        assert!(!bad.is_well_formed(2));
        let all_pad = ConvWord::from_tuples(2, vec![vec![0, 0], vec![2, 2]]);
        assert!(!all_pad.is_well_formed(2));
    }
}
