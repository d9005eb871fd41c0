use std::collections::BTreeMap;

use super::program::{compile, ControlProgram, Init, Layout};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::machine::{CspdaSpec, Observation, StackOp, StateKind, Symbol};
use crate::oracles::{format_ht_word, HtElement, HtOracle, HtWord};

struct Program {
    elements: Vec<HtElement>,
    input: Vec<Symbol>,
    roots: Vec<Symbol>,
    letters: Vec<Symbol>,
    pad: Symbol,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Ctrl {
    Q1,
    Q2,
    Restore(usize),
    Peeked(usize),
    Copy(usize, Symbol),
    /// Prefix popped so far, root first.
    Find(usize, HtWord),
    Emit(Vec<Symbol>),
    Compare,
}

impl Program {
    fn root(&self, s: Option<Symbol>) -> Option<usize> {
        self.roots.iter().position(|&q| Some(q) == s)
    }

    fn letter(&self, s: Option<Symbol>) -> Option<usize> {
        self.letters.iter().position(|&q| Some(q) == s)
    }
}

impl ControlProgram for Program {
    type Ctrl = Ctrl;

    fn kind(&self, c: &Ctrl) -> StateKind {
        match c {
            Ctrl::Q1 => StateKind::Entry,
            Ctrl::Q2 => StateKind::AcceptingReading,
            _ => StateKind::NonReading,
        }
    }

    fn name(&self, c: &Ctrl) -> String {
        match c {
            Ctrl::Q1 => "q1".into(),
            Ctrl::Q2 => "q2".into(),
            Ctrl::Restore(g) => format!("restore[{g}]"),
            Ctrl::Peeked(g) => format!("peek[{g}]"),
            Ctrl::Copy(g, s) => format!("copy[{g}:{}]", s.0),
            Ctrl::Find(g, w) if w.is_empty() => format!("find[{g}]"),
            Ctrl::Find(g, w) => format!("find[{g}:{}]", format_ht_word(w)),
            Ctrl::Emit(w) => format!("emit[{}]", w.iter().map(|s| s.0.to_string()).collect::<Vec<_>>().join(",")),
            Ctrl::Compare => "compare".into(),
        }
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        let r = match c {
            Ctrl::Q1 => "entry",
            Ctrl::Q2 => "accepting",
            Ctrl::Restore(_) | Ctrl::Peeked(_) | Ctrl::Copy(..) => "reconstitute",
            Ctrl::Find(..) | Ctrl::Emit(_) => "replace",
            Ctrl::Compare => "compare",
        };
        Some(r.into())
    }

    fn read(&self, _c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let g = self.input.iter().position(|&s| s == a)?;
        if self.root(obs.push).is_some() {
            Some((Ctrl::Find(g, Vec::new()), StackOp::Stay))
        } else {
            Some((Ctrl::Peeked(g), StackOp::Push(self.pad)))
        }
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        match c {
            Ctrl::Q1 | Ctrl::Q2 => None,
            Ctrl::Restore(g) => Some((Ctrl::Peeked(*g), StackOp::Push(self.pad))),
            Ctrl::Peeked(g) => {
                let cell = obs.check.filter(|&s| s != self.pad)?;
                Some((Ctrl::Copy(*g, cell), StackOp::Pop))
            }
            Ctrl::Copy(g, s) => {
                let next = if self.root(Some(*s)).is_some() { Ctrl::Find(*g, Vec::new()) } else { Ctrl::Restore(*g) };
                Some((next, StackOp::Push(*s)))
            }
            Ctrl::Find(g, w) => {
                let el = &self.elements[*g];
                if let Some((_, image)) = el.pairs.iter().find(|(b, _)| b == w) {
                    let mut push: Vec<Symbol> = image[1..].iter().rev().map(|&x| self.letters[x]).collect();
                    push.push(self.roots[image[0]]);
                    return Some((Ctrl::Emit(push), StackOp::Stay));
                }
                let next = if w.is_empty() { self.root(obs.push)? } else { self.letter(obs.push)? };
                let mut w = w.clone();
                w.push(next);
                // a prefix of some domain word is always reachable
                el.pairs.iter().any(|(b, _)| b.starts_with(&w)).then_some((Ctrl::Find(*g, w), StackOp::Pop))
            }
            Ctrl::Emit(push) => match push.split_first() {
                Some((&s, rest)) => Some((Ctrl::Emit(rest.to_vec()), StackOp::Push(s))),
                None => Some((Ctrl::Compare, StackOp::Stay)),
            },
            Ctrl::Compare => {
                if obs == Observation::BOTTOM {
                    Some((Ctrl::Q1, StackOp::Stay))
                } else if obs.push == obs.check {
                    Some((Ctrl::Compare, StackOp::Pop))
                } else {
                    Some((Ctrl::Q2, StackOp::Stay))
                }
            }
        }
    }
}

pub fn ht_root(q: usize) -> String {
    format!("q{}", q + 1)
}

pub fn ht_letter(s: usize) -> String {
    format!("s{}", s + 1)
}

/// Machine for the subgroup of `G_{n,r}` generated by the given elements.
/// Letters without an element use the inverse of their partner's. The
/// init language is `Σ* Q ⍟⁺`, with the root symbol on top of the string.
pub fn build_higman_thompson(
    alphabet: &Alphabet,
    n: usize,
    r: usize,
    generators: &BTreeMap<String, HtElement>,
) -> Result<CspdaSpec> {
    let oracle = HtOracle::new(alphabet.clone(), n, r, generators)?;
    let mut layout = Layout::new();
    let input = layout.inputs(alphabet)?;
    let mut fresh = |name: String| {
        if layout.has(&name) {
            Err(Error::AlphabetCollision(name))
        } else {
            Ok(layout.both(&name))
        }
    };
    let roots = (0..r).map(|q| fresh(ht_root(q))).collect::<Result<Vec<_>>>()?;
    let letters = (0..n).map(|s| fresh(ht_letter(s))).collect::<Result<Vec<_>>>()?;
    let program = Program {
        elements: oracle.elements.clone(),
        input,
        roots: roots.clone(),
        letters: letters.clone(),
        pad: layout.pad,
    };
    let mut init = Init::new();
    let x = init.state("string");
    let top = init.state("root");
    let p = init.state("pad");
    for &s in &letters {
        init.edge(x, s, x);
    }
    for &q in &roots {
        init.edge(x, q, top);
    }
    init.edge(top, layout.pad, p);
    init.edge(p, layout.pad, p);
    init.accepting.push((p, Ctrl::Q1));
    Ok(compile(&program, &layout, &init))
}
