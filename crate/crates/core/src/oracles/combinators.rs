use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::vf::NormalForm;
use super::{GroupOracle, VirtuallyFreeData};
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

pub type SharedOracle = Arc<dyn GroupOracle>;

/// `H × K` over the disjoint union of the factor alphabets (H letters first).
pub struct DirectProductOracle {
    alphabet: Alphabet,
    h: SharedOracle,
    k: SharedOracle,
}

pub fn oracle_direct_product(h: SharedOracle, k: SharedOracle) -> Result<DirectProductOracle> {
    let alphabet = h.alphabet().disjoint_union(k.alphabet())?;
    Ok(DirectProductOracle { alphabet, h, k })
}

fn split(w: &[Letter], nh: usize) -> (Vec<Letter>, Vec<Letter>) {
    let h = w.iter().copied().filter(|&x| x < nh).collect();
    let k = w.iter().copied().filter(|&x| x >= nh).map(|x| x - nh).collect();
    (h, k)
}

impl GroupOracle for DirectProductOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        let (h, k) = split(w, self.h.alphabet().len());
        self.h.is_trivial(&h) && self.k.is_trivial(&k)
    }
}

/// Finite extension of `H`: `data` rewrites letters of the new alphabet
/// into words over `H`'s alphabet and a transversal element.
pub struct FiniteExtensionOracle {
    data: VirtuallyFreeData,
    h: SharedOracle,
}

pub fn oracle_finite_extension(h: SharedOracle, data: VirtuallyFreeData) -> Result<FiniteExtensionOracle> {
    if data.basis.names() != h.alphabet().names() {
        return Err(Error::AlphabetMismatch("rewrite words must be over the base group's alphabet".into()));
    }
    let o = FiniteExtensionOracle { data, h };
    for t in 0..o.data.cosets() {
        for a in o.data.alphabet.letters() {
            let (w1, t1) = o.data.rewrite(t, a);
            let (w2, t2) = o.data.rewrite(t1, o.data.alphabet.inverse(a));
            let mut w = w1.to_vec();
            w.extend_from_slice(w2);
            if t2 != t || !o.h.is_trivial(&w) {
                return Err(Error::InvalidGenerator(format!(
                    "rows for `{}` and its inverse do not cancel at coset `{}`",
                    o.data.alphabet.name(a),
                    o.data.coset_name(t)
                )));
            }
        }
    }
    Ok(o)
}

impl FiniteExtensionOracle {
    /// Accumulated base word and final coset.
    pub fn fold(&self, w: &[Letter]) -> (Vec<Letter>, usize) {
        let mut hw = Vec::new();
        let mut t = 0;
        for &a in w {
            let (piece, to) = self.data.rewrite(t, a);
            hw.extend_from_slice(piece);
            t = to;
        }
        (hw, t)
    }
}

impl GroupOracle for FiniteExtensionOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.data.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        let (hw, t) = self.fold(w);
        t == 0 && self.h.is_trivial(&hw)
    }
}

/// `H * K` over the disjoint union of the factor alphabets.
pub struct FreeProductOracle {
    alphabet: Alphabet,
    factors: [SharedOracle; 2],
}

pub fn oracle_free_product(h: SharedOracle, k: SharedOracle) -> Result<FreeProductOracle> {
    let alphabet = h.alphabet().disjoint_union(k.alphabet())?;
    Ok(FreeProductOracle { alphabet, factors: [h, k] })
}

impl GroupOracle for FreeProductOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        let nh = self.factors[0].alphabet().len();
        // alternating syllables; a syllable is popped as soon as it is trivial
        let mut stack: Vec<(usize, Vec<Letter>)> = Vec::new();
        for &x in w {
            let (f, y) = if x < nh { (0, x) } else { (1, x - nh) };
            match stack.last_mut() {
                Some((g, buf)) if *g == f => buf.push(y),
                _ => stack.push((f, vec![y])),
            }
            let (g, buf) = stack.last().expect("just pushed");
            if self.factors[*g].is_trivial(buf) {
                stack.pop();
            }
        }
        stack.is_empty()
    }
}

/// Restricted wreath product `H ≀ K` with `K` virtually free.
///
/// An element is a pair `(f, k)`; a letter of `H` multiplies `f(k)` on the
/// right, a letter of `K` multiplies `k` on the right. Positions are keyed
/// by `K`-normal forms.
pub struct WreathOracle {
    alphabet: Alphabet,
    h: SharedOracle,
    k: VirtuallyFreeData,
}

pub fn oracle_wreath(h: SharedOracle, k: VirtuallyFreeData) -> Result<WreathOracle> {
    k.validate_free()?;
    let alphabet = h.alphabet().disjoint_union(&k.alphabet)?;
    Ok(WreathOracle { alphabet, h, k })
}

impl WreathOracle {
    pub fn top(&self) -> &VirtuallyFreeData {
        &self.k
    }

    /// Base words per position and the final position.
    pub fn fold(&self, w: &[Letter]) -> (FxHashMap<NormalForm, Vec<Letter>>, NormalForm) {
        let nh = self.h.alphabet().len();
        let mut f: FxHashMap<NormalForm, Vec<Letter>> = FxHashMap::default();
        let mut pos = NormalForm::default();
        for &x in w {
            if x < nh {
                f.entry(pos.clone()).or_default().push(x);
            } else {
                self.k.step(&mut pos, x - nh);
            }
        }
        (f, pos)
    }
}

impl GroupOracle for WreathOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        let (f, pos) = self.fold(w);
        pos == NormalForm::default() && f.values().all(|hw| self.h.is_trivial(hw))
    }
}

/// A group presented over new letters, each standing for a word over the
/// alphabet of `inner`.
pub struct RewrittenOracle {
    alphabet: Alphabet,
    inner: SharedOracle,
    images: Vec<Vec<Letter>>,
}

pub fn oracle_rewritten(inner: SharedOracle, alphabet: Alphabet, images: Vec<Vec<Letter>>) -> Result<RewrittenOracle> {
    if images.len() != alphabet.len() {
        return Err(Error::TableIncomplete("one image per letter is required".into()));
    }
    for x in alphabet.letters() {
        if images[x].is_empty() {
            return Err(Error::EmptyReplacement(alphabet.name(x).to_string()));
        }
        let mut w = images[x].clone();
        w.extend_from_slice(&images[alphabet.inverse(x)]);
        if !inner.is_trivial(&w) {
            return Err(Error::MissingInverse(alphabet.name(x).to_string()));
        }
    }
    Ok(RewrittenOracle { alphabet, inner, images })
}

impl GroupOracle for RewrittenOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        let expanded: Vec<Letter> = w.iter().flat_map(|&x| self.images[x].iter().copied()).collect();
        self.inner.is_trivial(&expanded)
    }
}
