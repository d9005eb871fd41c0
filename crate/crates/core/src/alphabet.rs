//! Inverse-closed generating alphabets and the words built over them.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of an [`Alphabet`], identified by its position.
pub type Letter = usize;

/// A finite, inverse-closed set of letters with a fixed involution.
///
/// Letter order is the declaration order; it doubles as the enumeration
/// order used everywhere words are listed.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    inverse: Vec<Letter>,
    lookup: FxHashMap<String, Letter>,
}

/// Serialized form: each entry is `[x, x⁻¹]` or `[x]` for an involution.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct LetterPairs(pub Vec<Vec<String>>);

impl Alphabet {
    pub fn empty() -> Self {
        Self::from_pairs::<&str>(&[]).expect("empty alphabet is valid")
    }

    /// Builds an alphabet from `(letter, inverse)` pairs. A pair whose two
    /// names coincide declares an involution.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self> {
        let mut names = Vec::new();
        let mut inverse = Vec::new();
        let mut lookup = FxHashMap::default();
        for (x, y) in pairs {
            let (x, y) = (x.as_ref(), y.as_ref());
            let fresh: &[&str] = if x == y { &[x] } else { &[x, y] };
            for &name in fresh {
                if lookup.contains_key(name) {
                    return Err(Error::AlphabetCollision(name.to_string()));
                }
                lookup.insert(name.to_string(), names.len());
                names.push(name.to_string());
                inverse.push(usize::MAX);
            }
            let ix = lookup[x];
            let iy = lookup[y];
            inverse[ix] = iy;
            inverse[iy] = ix;
        }
        Ok(Self { names, inverse, lookup })
    }

    /// Builds an alphabet where every letter `x` has inverse `X` (ASCII case swap).
    pub fn with_case_inverses(generators: &[&str]) -> Result<Self> {
        let pairs: Vec<(String, String)> = generators.iter().map(|g| (g.to_string(), swap_case(g))).collect();
        Self::from_pairs(&pairs)
    }

    pub fn from_letter_pairs(pairs: &LetterPairs) -> Result<Self> {
        let mut out = Vec::new();
        for entry in &pairs.0 {
            match entry.as_slice() {
                [x] => out.push((x.clone(), x.clone())),
                [x, y] => out.push((x.clone(), y.clone())),
                _ => return Err(Error::Schema(format!("letter entry must have one or two names, got {entry:?}"))),
            }
        }
        Self::from_pairs(&out)
    }

    pub fn to_letter_pairs(&self) -> LetterPairs {
        let mut out = Vec::new();
        for (i, name) in self.names.iter().enumerate() {
            let j = self.inverse[i];
            if j == i {
                out.push(vec![name.clone()]);
            } else if i < j {
                out.push(vec![name.clone(), self.names[j].clone()]);
            }
        }
        LetterPairs(out)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        0..self.names.len()
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn inverse(&self, letter: Letter) -> Letter {
        self.inverse[letter]
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.lookup.get(name).copied().ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup.contains_key(name)
    }

    /// Formal inverse: reverse the word and invert every letter.
    pub fn invert_word(&self, word: &[Letter]) -> Vec<Letter> {
        word.iter().rev().map(|&x| self.inverse[x]).collect()
    }

    /// Parses a word. Letters may be separated by whitespace or commas; an
    /// unseparated string is split greedily by longest matching letter name.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        if text.contains(|c: char| c.is_whitespace() || c == ',') {
            return text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| self.letter(s))
                .collect();
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            match best {
                Some((i, n)) => {
                    out.push(i);
                    rest = &rest[n.len()..];
                }
                None => return Err(Error::UnknownSymbol(rest.to_string())),
            }
        }
        Ok(out)
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.names.iter().all(|n| n.chars().count() == 1) { "" } else { " " };
        word.iter().map(|&x| self.names[x].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// All words of length at most `max_len`, in length-lexicographic order.
    pub fn words_up_to(&self, max_len: usize) -> WordsUpTo {
        WordsUpTo::new(self.len(), max_len)
    }

    /// Union of two alphabets with disjoint letter names.
    pub fn disjoint_union(&self, other: &Alphabet) -> Result<Alphabet> {
        let mut pairs = Vec::new();
        for a in [self, other] {
            for i in a.letters() {
                let j = a.inverse(i);
                if i <= j {
                    pairs.push((a.name(i).to_string(), a.name(j).to_string()));
                }
            }
        }
        for i in other.letters() {
            if self.contains(other.name(i)) {
                return Err(Error::AlphabetCollision(other.name(i).to_string()));
            }
        }
        Alphabet::from_pairs(&pairs)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.letters().map(|i| (&self.names[i], &self.names[self.inverse[i]]))).finish()
    }
}

fn swap_case(s: &str) -> String {
    s.chars()
        .map(
            |c| {
                if c.is_uppercase() {
                    c.to_lowercase().next().unwrap_or(c)
                } else {
                    c.to_uppercase().next().unwrap_or(c)
                }
            },
        )
        .collect()
}

/// Length-lexicographic enumeration of `A^{≤n}`.
pub struct WordsUpTo {
    size: usize,
    max_len: usize,
    current: Option<Vec<Letter>>,
}

impl WordsUpTo {
    pub fn new(size: usize, max_len: usize) -> Self {
        Self { size, max_len, current: Some(Vec::new()) }
    }
}

impl Iterator for WordsUpTo {
    type Item = Vec<Letter>;

    fn next(&mut self) -> Option<Vec<Letter>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        // odometer increment, growing the length on overflow
        let mut i = next.len();
        loop {
            if i == 0 {
                if next.len() >= self.max_len || self.size == 0 {
                    self.current = None;
                } else {
                    self.current = Some(vec![0; next.len() + 1]);
                }
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.size {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

/// Number of words of length at most `n` over `k` letters.
pub fn count_words_up_to(k: usize, n: usize) -> usize {
    (0..=n).map(|l| k.pow(l as u32)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_inverses() {
        let a = Alphabet::with_case_inverses(&["a", "b"]).unwrap();
        assert_eq!(a.len(), 4);
        let x = a.letter("a").unwrap();
        assert_eq!(a.name(a.inverse(x)), "A");
        assert_eq!(a.inverse(a.inverse(x)), x);
    }

    #[test]
    fn involutions_take_one_slot() {
        let a = Alphabet::from_pairs(&[("x", "x"), ("y", "Y")]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.inverse(0), 0);
    }

    #[test]
    fn collision_is_rejected() {
        assert!(matches!(Alphabet::from_pairs(&[("x", "X"), ("X", "y")]), Err(Error::AlphabetCollision(_))));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let a = Alphabet::with_case_inverses(&["a", "b"]).unwrap();
        let words: Vec<_> = a.words_up_to(3).collect();
        assert_eq!(words.len(), count_words_up_to(4, 3));
        assert_eq!(words[0], Vec::<Letter>::new());
        assert_eq!(words[1], vec![0]);
        assert_eq!(words[5], vec![0, 0]);
        assert_eq!(Alphabet::empty().words_up_to(5).count(), 1);
    }

    #[test]
    fn parse_and_format() {
        let a = Alphabet::with_case_inverses(&["a", "b"]).unwrap();
        let w = a.parse_word("abBA").unwrap();
        assert_eq!(a.format_word(&w), "abBA");
        assert_eq!(a.parse_word("a b").unwrap(), vec![0, 2]);
        assert!(a.parse_word("ε").unwrap().is_empty());
        assert!(a.parse_word("q").is_err());
    }
}
