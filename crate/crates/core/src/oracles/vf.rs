use serde::{Deserialize, Serialize};

use super::GroupOracle;
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// Freely reduces `w`, cancelling adjacent letters that are mutual inverses.
pub fn free_reduce(alphabet: &Alphabet, w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &x in w {
        push_reduced(alphabet, &mut out, x);
    }
    out
}

fn push_reduced(alphabet: &Alphabet, out: &mut Vec<Letter>, x: Letter) {
    if out.last() == Some(&alphabet.inverse(x)) {
        out.pop();
    } else {
        out.push(x);
    }
}

type Row = (Vec<Letter>, usize);

/// One row of a transversal rewriting table: `from · letter = word · to`.
/// An empty coset name stands for the identity coset.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RewriteEntry {
    #[serde(default)]
    pub from: String,
    pub letter: String,
    #[serde(default)]
    pub word: String,
    #[serde(default)]
    pub to: String,
}

/// Transversal rewriting data for a group with a finite-index subgroup
/// generated by `basis`. Coset index 0 is the subgroup itself.
///
/// When the subgroup is free on `basis` this is a virtually free group;
/// the same table over an arbitrary base alphabet describes a finite
/// extension.
#[derive(Clone, Debug)]
pub struct VirtuallyFreeData {
    pub alphabet: Alphabet,
    pub basis: Alphabet,
    pub transversal: Vec<String>,
    table: Vec<Vec<(Vec<Letter>, usize)>>,
}

/// A normal form `w t` with `w` over the basis and `t` a coset index.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct NormalForm {
    pub word: Vec<Letter>,
    pub coset: usize,
}

impl VirtuallyFreeData {
    /// Free group on `alphabet`, with no transversal.
    pub fn free(alphabet: Alphabet) -> Self {
        let table = vec![alphabet.letters().map(|a| (vec![a], 0)).collect()];
        Self { basis: alphabet.clone(), alphabet, transversal: Vec::new(), table }
    }

    /// Builds the table from explicit rows. Rows `(ε, b)` for a letter `b`
    /// that is also a basis letter default to `(b, ε)`.
    pub fn new(alphabet: Alphabet, basis: Alphabet, transversal: Vec<String>, rows: &[RewriteEntry]) -> Result<Self> {
        let coset = |name: &str| -> Result<usize> {
            if name.is_empty() || name == "ε" {
                return Ok(0);
            }
            transversal
                .iter()
                .position(|t| t == name)
                .map(|i| i + 1)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
        };
        let mut table: Vec<Vec<Option<Row>>> = vec![vec![None; alphabet.len()]; transversal.len() + 1];
        for row in rows {
            let t = coset(&row.from)?;
            let a = alphabet.letter(&row.letter)?;
            let w = basis.parse_word(&row.word)?;
            let to = coset(&row.to)?;
            if table[t][a].replace((w, to)).is_some() {
                return Err(Error::InvalidGenerator(format!("duplicate row ({}, {})", row.from, row.letter)));
            }
        }
        for a in alphabet.letters() {
            if table[0][a].is_none() {
                if let Ok(b) = basis.letter(alphabet.name(a)) {
                    table[0][a] = Some((vec![b], 0));
                }
            }
        }
        let mut full = Vec::with_capacity(table.len());
        for (t, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (a, cell) in row.into_iter().enumerate() {
                match cell {
                    Some(c) => out.push(c),
                    None => {
                        let tn = if t == 0 { "ε" } else { transversal[t - 1].as_str() };
                        return Err(Error::TableIncomplete(format!("no row for ({tn}, {})", alphabet.name(a))));
                    }
                }
            }
            full.push(out);
        }
        Ok(Self { alphabet, basis, transversal, table: full })
    }

    pub fn cosets(&self) -> usize {
        self.transversal.len() + 1
    }

    pub fn coset_name(&self, t: usize) -> &str {
        if t == 0 {
            ""
        } else {
            &self.transversal[t - 1]
        }
    }

    /// `t · a = w · t'`.
    pub fn rewrite(&self, t: usize, a: Letter) -> (&[Letter], usize) {
        let (w, to) = &self.table[t][a];
        (w, *to)
    }

    pub fn rows(&self) -> Vec<RewriteEntry> {
        let mut out = Vec::new();
        for t in 0..self.cosets() {
            for a in self.alphabet.letters() {
                let (w, to) = self.rewrite(t, a);
                out.push(RewriteEntry {
                    from: self.coset_name(t).to_string(),
                    letter: self.alphabet.name(a).to_string(),
                    word: if w.is_empty() {
                        String::new()
                    } else {
                        w.iter().map(|&b| self.basis.name(b)).collect::<Vec<_>>().join(" ")
                    },
                    to: self.coset_name(to).to_string(),
                });
            }
        }
        out
    }

    /// Checks that `a` followed by its inverse returns every normal form
    /// `ε t` to itself, with a freely trivial basis word.
    pub fn validate_free(&self) -> Result<()> {
        for t in 0..self.cosets() {
            for a in self.alphabet.letters() {
                let mut nf = NormalForm { word: Vec::new(), coset: t };
                self.step(&mut nf, a);
                self.step(&mut nf, self.alphabet.inverse(a));
                if nf.coset != t || !nf.word.is_empty() {
                    return Err(Error::InvalidGenerator(format!(
                        "rows for `{}` and its inverse do not cancel at coset `{}`",
                        self.alphabet.name(a),
                        self.coset_name(t)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn step(&self, nf: &mut NormalForm, a: Letter) {
        let (w, to) = self.rewrite(nf.coset, a);
        for &b in w {
            push_reduced(&self.basis, &mut nf.word, b);
        }
        nf.coset = to;
    }

    pub fn normal_form(&self, w: &[Letter]) -> NormalForm {
        let mut nf = NormalForm::default();
        for &a in w {
            self.step(&mut nf, a);
        }
        nf
    }
}

/// Triviality by folding the rewriting table over the word.
#[derive(Clone, Debug)]
pub struct VirtuallyFreeOracle {
    pub data: VirtuallyFreeData,
}

impl VirtuallyFreeOracle {
    pub fn new(data: VirtuallyFreeData) -> Result<Self> {
        data.validate_free()?;
        Ok(Self { data })
    }
}

impl GroupOracle for VirtuallyFreeOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.data.alphabet
    }

    fn is_trivial(&self, w: &[Letter]) -> bool {
        self.data.normal_form(w) == NormalForm::default()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::oracles::laws::check_group_laws;

    fn row(from: &str, letter: &str, word: &str, to: &str) -> RewriteEntry {
        RewriteEntry { from: from.into(), letter: letter.into(), word: word.into(), to: to.into() }
    }

    /// D∞ = ⟨a, b | a², b²⟩ over the free subgroup on x = ab, with
    /// transversal {1, a}.
    pub fn dihedral() -> VirtuallyFreeData {
        let a = Alphabet::from_pairs(&[("a", "a"), ("b", "b")]).unwrap();
        let basis = Alphabet::with_case_inverses(&["x"]).unwrap();
        VirtuallyFreeData::new(
            a,
            basis,
            vec!["a".into()],
            &[row("", "a", "", "a"), row("", "b", "X", "a"), row("a", "a", "", ""), row("a", "b", "x", "")],
        )
        .unwrap()
    }

    #[test]
    fn dihedral_relations() {
        let o = VirtuallyFreeOracle::new(dihedral()).unwrap();
        let w = |s: &str| o.alphabet().parse_word(s).unwrap();
        assert!(o.is_trivial(&w("aa")));
        assert!(o.is_trivial(&w("bb")));
        assert!(!o.is_trivial(&w("ab")));
        assert!(!o.is_trivial(&w("abab")));
        assert!(o.is_trivial(&w("abba")));
        assert!(o.is_trivial(&[]));
        check_group_laws(&o, 8, 500, 2);
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let a = Alphabet::from_pairs(&[("a", "a")]).unwrap();
        let err = VirtuallyFreeData::new(a, Alphabet::empty(), vec!["a".into()], &[row("", "a", "", "a")]);
        assert!(matches!(err, Err(Error::TableIncomplete(_))));
    }

    #[test]
    fn inconsistent_table_is_rejected() {
        let a = Alphabet::from_pairs(&[("a", "a")]).unwrap();
        let data = VirtuallyFreeData::new(
            a,
            Alphabet::with_case_inverses(&["x"]).unwrap(),
            vec!["a".into()],
            &[row("", "a", "x", "a"), row("a", "a", "x", "")],
        )
        .unwrap();
        assert!(VirtuallyFreeOracle::new(data).is_err());
    }
}
