use super::program::{compile, ControlProgram, Init, Layout};
use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::machine::{CspdaSpec, Observation, StackOp, StateKind, Symbol};
use crate::oracles::VirtuallyFreeData;

struct Program {
    data: VirtuallyFreeData,
    input: Vec<Symbol>,
    basis: Vec<Symbol>,
    cosets: Vec<Symbol>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Ctrl {
    Q1,
    Q2,
    /// Basis letters still to push, then the new coset.
    Apply(Vec<Letter>, usize),
}

impl Program {
    fn coset_on_top(&self, obs: Observation) -> Option<usize> {
        let top = obs.push?;
        self.cosets.iter().position(|&s| s == top).map(|i| i + 1)
    }
}

impl ControlProgram for Program {
    type Ctrl = Ctrl;

    fn kind(&self, c: &Ctrl) -> StateKind {
        match c {
            Ctrl::Q1 => StateKind::Entry,
            Ctrl::Q2 => StateKind::AcceptingReading,
            Ctrl::Apply(..) => StateKind::NonReading,
        }
    }

    fn name(&self, c: &Ctrl) -> String {
        match c {
            Ctrl::Q1 => "q1".into(),
            Ctrl::Q2 => "q2".into(),
            Ctrl::Apply(w, t) => {
                let w: Vec<&str> = w.iter().map(|&b| self.data.basis.name(b)).collect();
                format!("apply[{}|{}]", w.join(" "), self.data.coset_name(*t))
            }
        }
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        Some(
            match c {
                Ctrl::Q1 => "entry",
                Ctrl::Q2 => "accepting",
                Ctrl::Apply(..) => "rewrite",
            }
            .into(),
        )
    }

    fn read(&self, _c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let a = self.input.iter().position(|&s| s == a)?;
        let (t, op) = match self.coset_on_top(obs) {
            Some(t) => (t, StackOp::Pop),
            None => (0, StackOp::Stay),
        };
        let (w, to) = self.data.rewrite(t, a);
        Some((Ctrl::Apply(w.to_vec(), to), op))
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let Ctrl::Apply(w, t) = c else { return None };
        if let Some((&b, rest)) = w.split_first() {
            let inv = self.basis[self.data.basis.inverse(b)];
            let op = if obs.push == Some(inv) { StackOp::Pop } else { StackOp::Push(self.basis[b]) };
            return Some((Ctrl::Apply(rest.to_vec(), *t), op));
        }
        if *t != 0 {
            Some((Ctrl::Q2, StackOp::Push(self.cosets[*t - 1])))
        } else if obs == Observation::BOTTOM {
            Some((Ctrl::Q1, StackOp::Stay))
        } else {
            Some((Ctrl::Q2, StackOp::Stay))
        }
    }
}

/// Machine for the group given by normal-form rewriting data. The init
/// language is `⍟*`.
pub fn build_virtually_free(data: &VirtuallyFreeData) -> Result<CspdaSpec> {
    data.validate_free()?;
    if let Some(t) = data.transversal.iter().find(|t| data.basis.contains(t)) {
        return Err(Error::AlphabetCollision(t.clone()));
    }
    let mut layout = Layout::new();
    let input = layout.inputs(&data.alphabet)?;
    let basis = data.basis.names().iter().map(|n| layout.push_symbol(n)).collect();
    let cosets = data.transversal.iter().map(|n| layout.push_symbol(n)).collect();
    let program = Program { data: data.clone(), input, basis, cosets };
    let mut init = Init::new();
    let s = init.state("pad");
    init.edge(s, layout.pad, s);
    init.accepting.push((s, Ctrl::Q1));
    Ok(compile(&program, &layout, &init))
}
