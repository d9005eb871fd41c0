use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::GroupOracle;
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// A word in `QΣ*`: a root index in `0..r` followed by letters in `0..n`.
pub type HtWord = Vec<usize>;

pub fn format_ht_word(w: &[usize]) -> String {
    let mut out = String::new();
    for (i, &x) in w.iter().enumerate() {
        out.push(if i == 0 { 'q' } else { 's' });
        out.push_str(&(x + 1).to_string());
    }
    out
}

/// Parses `q1s2s1`-style words (whitespace allowed between symbols).
pub fn parse_ht_word(text: &str) -> Result<HtWord> {
    let bad = || Error::InvalidAntichain(format!("cannot parse word `{text}`"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut chars = compact.chars().peekable();
    while let Some(c) = chars.next() {
        let want = if out.is_empty() { 'q' } else { 's' };
        if c != want {
            return Err(bad());
        }
        let mut digits = String::new();
        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            digits.push(*d);
            chars.next();
        }
        let k: usize = digits.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        out.push(k - 1);
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Checks that `words` is a finite complete antichain of `QΣ*`.
pub fn validate_antichain(n: usize, r: usize, words: &[HtWord]) -> Result<()> {
    for w in words {
        if w.is_empty() || w[0] >= r || w[1..].iter().any(|&s| s >= n) {
            return Err(Error::InvalidAntichain(format!("`{}` is not a word of QΣ*", format_ht_word(w))));
        }
    }
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if i != j && b.starts_with(a) {
                return Err(Error::InvalidAntichain(format!(
                    "`{}` is a prefix of `{}`",
                    format_ht_word(a),
                    format_ht_word(b)
                )));
            }
        }
    }
    fn covered(n: usize, words: &[HtWord], prefix: &mut Vec<usize>) -> bool {
        if words.contains(prefix) {
            return true;
        }
        if !words.iter().any(|w| w.starts_with(prefix)) {
            return false;
        }
        (0..n).all(|s| {
            prefix.push(s);
            let ok = covered(n, words, prefix);
            prefix.pop();
            ok
        })
    }
    for q in 0..r {
        if !covered(n, words, &mut vec![q]) {
            return Err(Error::InvalidAntichain(format!("strings below q{} are not covered", q + 1)));
        }
    }
    Ok(())
}

/// Element of `G_{n,r}` given by a bijection between complete antichains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HtElement {
    pub n: usize,
    pub r: usize,
    pub pairs: Vec<(HtWord, HtWord)>,
}

impl HtElement {
    pub fn new(n: usize, r: usize, pairs: Vec<(HtWord, HtWord)>) -> Result<Self> {
        if n < 2 || r < 1 {
            return Err(Error::IncompatibleParameters(format!("need n ≥ 2 and r ≥ 1, got n={n}, r={r}")));
        }
        let domain: Vec<HtWord> = pairs.iter().map(|p| p.0.clone()).collect();
        let range: Vec<HtWord> = pairs.iter().map(|p| p.1.clone()).collect();
        validate_antichain(n, r, &domain)?;
        validate_antichain(n, r, &range)?;
        Ok(Self { n, r, pairs })
    }

    pub fn identity(n: usize, r: usize) -> Self {
        Self { n, r, pairs: (0..r).map(|q| (vec![q], vec![q])).collect() }
    }

    pub fn inverse(&self) -> Self {
        Self { n: self.n, r: self.r, pairs: self.pairs.iter().map(|(b, c)| (c.clone(), b.clone())).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(b, c)| b == c)
    }

    /// Longest antichain word on either side.
    pub fn max_len(&self) -> usize {
        self.pairs.iter().map(|(b, c)| b.len().max(c.len())).max().unwrap_or(0)
    }

    /// Image of a finite string, if it is long enough to contain a domain
    /// word as a prefix.
    pub fn apply(&self, x: &[usize]) -> Option<HtWord> {
        self.pairs.iter().find(|(b, _)| x.starts_with(b)).map(|(b, c)| {
            let mut out = c.clone();
            out.extend_from_slice(&x[b.len()..]);
            out
        })
    }

    /// The product acting first by `self`, then by `other`.
    pub fn compose(&self, other: &HtElement) -> Result<HtElement> {
        if self.n != other.n || self.r != other.r {
            return Err(Error::IncompatibleParameters(format!(
                "G_{{{},{}}} and G_{{{},{}}}",
                self.n, self.r, other.n, other.r
            )));
        }
        let mut pairs = Vec::new();
        for (b, c) in &self.pairs {
            if let Some((b2, c2)) = other.pairs.iter().find(|(b2, _)| c.starts_with(b2)) {
                let mut img = c2.clone();
                img.extend_from_slice(&c[b2.len()..]);
                pairs.push((b.clone(), img));
                continue;
            }
            for (b2, c2) in other.pairs.iter().filter(|(b2, _)| b2.starts_with(c)) {
                let mut dom = b.clone();
                dom.extend_from_slice(&b2[c.len()..]);
                pairs.push((dom, c2.clone()));
            }
        }
        let mut out = HtElement { n: self.n, r: self.r, pairs };
        out.reduce();
        Ok(out)
    }

    /// Merges complete carets `bσ ↦ cσ` back into `b ↦ c`.
    fn reduce(&mut self) {
        loop {
            let mut groups: FxHashMap<(&[usize], &[usize]), usize> = FxHashMap::default();
            for (b, c) in &self.pairs {
                if b.len() >= 2 && c.len() >= 2 && b.last() == c.last() {
                    *groups.entry((&b[..b.len() - 1], &c[..c.len() - 1])).or_default() += 1;
                }
            }
            let Some((&(b, c), _)) = groups.iter().find(|(_, &k)| k == self.n) else { return };
            let (b, c) = (b.to_vec(), c.to_vec());
            self.pairs.retain(|(x, y)| {
                !(x.len() == b.len() + 1
                    && x.starts_with(&b)
                    && y.len() == c.len() + 1
                    && y.starts_with(&c)
                    && x.last() == y.last())
            });
            self.pairs.push((b, c));
            self.pairs.sort();
        }
    }
}

/// Word problem of a finitely generated subgroup of `G_{n,r}`.
#[derive(Clone, Debug)]
pub struct HtOracle {
    alphabet: Alphabet,
    pub n: usize,
    pub r: usize,
    /// Element for every letter, inverses included.
    pub elements: Vec<HtElement>,
}

impl HtOracle {
    /// `generators` names an element for at least one letter of every
    /// inverse pair; missing inverses are computed.
    pub fn new(alphabet: Alphabet, n: usize, r: usize, generators: &BTreeMap<String, HtElement>) -> Result<Self> {
        let mut elements = Vec::with_capacity(alphabet.len());
        for x in alphabet.letters() {
            let e = match generators.get(alphabet.name(x)) {
                Some(e) => e.clone(),
                None => generators
                    .get(alphabet.name(alphabet.inverse(x)))
                    .map(HtElement::inverse)
                    .ok_or_else(|| Error::MissingInverse(alphabet.name(x).to_string()))?,
            };
            if e.n != n || e.r != r {
                return Err(Error::IncompatibleParameters(format!("generator `{}`", alphabet.name(x))));
            }
            elements.push(e);
        }
        for x in alphabet.letters() {
            if !elements[x].compose(&elements[alphabet.inverse(x)])?.is_identity() {
                return Err(Error::MissingInverse(alphabet.name(x).to_string()));
            }
        }
        Ok(Self { alphabet, n, r, elements })
    }

    pub fn element(&self, w: &[Letter]) -> HtElement {
        w.iter().fold(HtElement::identity(self.n, self.r), |acc, &x| {
            acc.compose(&self.elements[x]).expect("parameters checked")
        })
    }

    /// Longest antichain word over all generators.
    pub fn max_len(&self) -> usize {
        self.elements.iter().map(HtElement::max_len).max().unwrap_or(1)
    }
}

impl GroupOracle for HtOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        self.element(w).is_identity()
    }
}
