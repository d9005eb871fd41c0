use super::program::{compile, spec_alphabet, ControlProgram, Init, Inner, Layout};
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::machine::{CspdaSpec, Observation, StackOp, StateId, StateKind, Symbol};
use crate::oracles::VirtuallyFreeData;

/// Feeds each new letter to the inner machine as a word over its own
/// letters, tracking a coset of a finite transversal on the side.
struct Program {
    inner: Inner,
    input: Vec<Symbol>,
    /// `[coset][letter]` to inner input word and next coset.
    table: Vec<Vec<(Vec<Symbol>, usize)>>,
    cosets: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Ctrl {
    q: StateId,
    pending: Vec<Symbol>,
    coset: usize,
}

impl ControlProgram for Program {
    type Ctrl = Ctrl;

    fn kind(&self, c: &Ctrl) -> StateKind {
        let k = self.inner.kind(c.q);
        if !c.pending.is_empty() || !k.is_reading() {
            StateKind::NonReading
        } else if k == StateKind::Entry && c.coset == 0 {
            StateKind::Entry
        } else {
            StateKind::AcceptingReading
        }
    }

    fn name(&self, c: &Ctrl) -> String {
        let mut s = self.inner.name(c.q).to_string();
        if c.coset != 0 {
            s.push('/');
            s.push_str(&self.cosets[c.coset - 1]);
        }
        if !c.pending.is_empty() {
            s.push('<');
            s.push_str(&self.inner.spec().format_symbols(&c.pending));
        }
        s
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        Some(if c.pending.is_empty() { "simulate" } else { "replay" }.into())
    }

    fn read(&self, c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let a = self.input.iter().position(|&s| s == a)?;
        let (word, coset) = &self.table[c.coset][a];
        let Some((&first, rest)) = word.split_first() else {
            return Some((Ctrl { q: c.q, pending: Vec::new(), coset: *coset }, StackOp::Stay));
        };
        let (q, op) = self.inner.step(c.q, Some(first), self.inner.obs(obs)?)?;
        Some((Ctrl { q, pending: rest.to_vec(), coset: *coset }, op))
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let obs = self.inner.obs(obs)?;
        if !self.inner.kind(c.q).is_reading() {
            let (q, op) = self.inner.step(c.q, None, obs)?;
            return Some((Ctrl { q, ..c.clone() }, op));
        }
        let (&first, rest) = c.pending.split_first()?;
        let (q, op) = self.inner.step(c.q, Some(first), obs)?;
        Some((Ctrl { q, pending: rest.to_vec(), coset: c.coset }, op))
    }
}

fn build(
    m: &CspdaSpec,
    old: &Alphabet,
    alphabet: &Alphabet,
    table: Vec<Vec<(Vec<Letter>, usize)>>,
    cosets: Vec<String>,
) -> Result<CspdaSpec> {
    let mut layout = Layout::new();
    let inner = Inner::embed(m, &mut layout)?;
    let input = layout.inputs(alphabet)?;
    let sym = |x: Letter| inner.spec().symbol(old.name(x)).expect("letter of the inner machine");
    let table = table
        .into_iter()
        .map(|row| row.into_iter().map(|(w, t)| (w.iter().map(|&x| sym(x)).collect(), t)).collect())
        .collect();
    let mut init = Init::new();
    let offset = inner.copy_init(&mut init, "");
    init.start = inner.init_start() + offset;
    for (s, q) in inner.labels() {
        init.accepting.push((s + offset, Ctrl { q, pending: Vec::new(), coset: 0 }));
    }
    let program = Program { inner, input, table, cosets };
    Ok(compile(&program, &layout, &init))
}

/// Machine over new letters, each standing for a nonempty word over the
/// letters of `m` (letters of [`spec_alphabet`] of `m`).
pub fn rewrite_generators(m: &CspdaSpec, alphabet: &Alphabet, images: &[Vec<Letter>]) -> Result<CspdaSpec> {
    if images.len() != alphabet.len() {
        return Err(Error::TableIncomplete("one image per letter is required".into()));
    }
    if let Some(x) = alphabet.letters().find(|&x| images[x].is_empty()) {
        return Err(Error::EmptyReplacement(alphabet.name(x).to_string()));
    }
    let old = spec_alphabet(m);
    if images.iter().flatten().any(|&y| y >= old.len()) {
        return Err(Error::UnknownSymbol("image letter out of range".into()));
    }
    build(m, &old, alphabet, vec![images.iter().map(|w| (w.clone(), 0)).collect()], Vec::new())
}

/// Machine for a finite extension of the group of `m`; the rewriting
/// words of `data` are over `m`'s alphabet.
pub fn extend_finite(m: &CspdaSpec, data: &VirtuallyFreeData) -> Result<CspdaSpec> {
    let base = spec_alphabet(m);
    if data.basis.names() != base.names() {
        return Err(Error::AlphabetMismatch("rewrite words must be over the base machine's alphabet".into()));
    }
    let table = (0..data.cosets())
        .map(|t| {
            data.alphabet
                .letters()
                .map(|a| {
                    let (w, to) = data.rewrite(t, a);
                    (w.to_vec(), to)
                })
                .collect()
        })
        .collect();
    build(m, &base, &data.alphabet, table, data.transversal.clone())
}
