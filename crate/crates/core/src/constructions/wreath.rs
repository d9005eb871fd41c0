use super::program::{compile, ControlProgram, Init, Inner, Layout};
use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::machine::{CspdaSpec, Observation, StackOp, StateId, StateKind, Symbol};
use crate::oracles::VirtuallyFreeData;

struct Program {
    h: Inner,
    k: VirtuallyFreeData,
    k_input: Vec<Symbol>,
    basis: Vec<Symbol>,
    cosets: Vec<Symbol>,
    pad: Symbol,
    fill: Symbol,
    base: Symbol,
    sep: Symbol,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Stage {
    Entry,
    Read,
    /// Padding up to the separator, then copying the normal form from the
    /// check stack before processing the pending letter.
    Climb(Option<Symbol>),
    PlaceBase(Option<Symbol>),
    Copy(Option<Symbol>),
    Peeked(Option<Symbol>),
    CopyPush(Option<Symbol>, Symbol),
    Process(Option<Symbol>),
    KApply(Vec<Letter>, usize),
    HDescend(Symbol),
    HRun,
    HClimb,
    HBase,
    Probe,
    ProbePeek,
    Compare,
    Restore,
    RestorePeek,
    RestorePush(Symbol),
    Collapse,
}

/// Entry state of the base machine, its current state, and the stage.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Ctrl {
    e: StateId,
    q: StateId,
    stage: Stage,
}

impl Program {
    fn at(&self, c: &Ctrl, q: StateId, stage: Stage) -> Ctrl {
        Ctrl { e: c.e, q, stage }
    }

    fn h_obs(&self, obs: Observation) -> Option<Observation> {
        if obs.check == Some(self.sep) {
            return None;
        }
        self.h.obs(obs)
    }

    fn coset_on_top(&self, obs: Observation) -> Option<usize> {
        let top = obs.push?;
        self.cosets.iter().position(|&s| s == top).map(|i| i + 1)
    }

    fn is_k_symbol(&self, s: Option<Symbol>) -> bool {
        s.is_some_and(|s| self.basis.contains(&s) || self.cosets.contains(&s))
    }

    fn process(&self, c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        if let Some(x) = self.k_input.iter().position(|&s| s == a) {
            let (t, op) = match self.coset_on_top(obs) {
                Some(t) => (t, StackOp::Pop),
                None => (0, StackOp::Stay),
            };
            let (w, to) = self.k.rewrite(t, x);
            return Some((self.at(c, c.q, Stage::KApply(w.to_vec(), to)), op));
        }
        let b = self.h.input(a)?;
        if obs.push == Some(self.base) {
            Some((self.at(c, c.q, Stage::HDescend(b)), StackOp::Pop))
        } else {
            Some((self.at(c, c.q, Stage::Probe), StackOp::Stay))
        }
    }
}

impl ControlProgram for Program {
    type Ctrl = Ctrl;

    fn kind(&self, c: &Ctrl) -> StateKind {
        match c.stage {
            Stage::Entry => StateKind::Entry,
            Stage::Read => StateKind::AcceptingReading,
            _ => StateKind::NonReading,
        }
    }

    fn name(&self, c: &Ctrl) -> String {
        let q = self.h.name(c.q);
        let e = self.h.name(c.e);
        match &c.stage {
            Stage::Entry => format!("entry[{e}]"),
            Stage::Read => format!("{q}|{e}"),
            other => format!("{q}|{e}:{other:?}"),
        }
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        let r = match c.stage {
            Stage::Entry => "entry",
            Stage::Read => "accepting",
            Stage::Climb(_) | Stage::PlaceBase(_) | Stage::Copy(_) | Stage::Peeked(_) | Stage::CopyPush(..) => "load",
            Stage::Process(_) | Stage::KApply(..) => "top group",
            Stage::HDescend(_) | Stage::HRun | Stage::HClimb | Stage::HBase => "base group",
            _ => "probe",
        };
        Some(r.into())
    }

    fn read(&self, c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        match c.stage {
            Stage::Entry => Some((self.at(c, c.q, Stage::Climb(Some(a))), StackOp::Push(self.fill))),
            Stage::Read => self.process(c, a, obs),
            _ => None,
        }
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let go = |stage: Stage, op: StackOp| Some((self.at(c, c.q, stage), op));
        match &c.stage {
            Stage::Entry | Stage::Read => None,
            Stage::Climb(x) => {
                if obs.check == Some(self.sep) {
                    go(Stage::PlaceBase(*x), StackOp::Pop)
                } else {
                    go(Stage::Climb(*x), StackOp::Push(self.fill))
                }
            }
            Stage::PlaceBase(x) => go(Stage::Copy(*x), StackOp::Push(self.base)),
            Stage::Copy(x) => go(Stage::Peeked(*x), StackOp::Push(self.pad)),
            Stage::Peeked(x) => match obs.check {
                Some(s) if self.is_k_symbol(Some(s)) => go(Stage::CopyPush(*x, s), StackOp::Pop),
                Some(s) if s == self.pad => go(Stage::Process(*x), StackOp::Pop),
                _ => None,
            },
            Stage::CopyPush(x, s) => go(Stage::Copy(*x), StackOp::Push(*s)),
            Stage::Process(Some(a)) => self.process(c, *a, obs),
            Stage::Process(None) => go(Stage::Read, StackOp::Stay),
            Stage::KApply(w, t) => {
                if let Some((&b, rest)) = w.split_first() {
                    let inv = self.basis[self.k.basis.inverse(b)];
                    let op = if obs.push == Some(inv) { StackOp::Pop } else { StackOp::Push(self.basis[b]) };
                    return go(Stage::KApply(rest.to_vec(), *t), op);
                }
                if *t != 0 {
                    go(Stage::Probe, StackOp::Push(self.cosets[*t - 1]))
                } else {
                    go(Stage::Probe, StackOp::Stay)
                }
            }
            Stage::HDescend(b) => {
                if obs.push == Some(self.fill) {
                    return go(Stage::HDescend(*b), StackOp::Pop);
                }
                let (q, op) = self.h.step(c.q, Some(*b), self.h_obs(obs)?)?;
                Some((self.at(c, q, Stage::HRun), op))
            }
            Stage::HRun => {
                let inner = self.h_obs(obs)?;
                if self.h.kind(c.q).is_reading() {
                    go(Stage::HClimb, StackOp::Push(self.fill))
                } else {
                    let (q, op) = self.h.step(c.q, None, inner)?;
                    Some((self.at(c, q, Stage::HRun), op))
                }
            }
            Stage::HClimb => {
                if obs.check == Some(self.sep) {
                    go(Stage::HBase, StackOp::Pop)
                } else {
                    go(Stage::HClimb, StackOp::Push(self.fill))
                }
            }
            Stage::HBase => go(Stage::Probe, StackOp::Push(self.base)),
            Stage::Probe => {
                if c.q == c.e {
                    go(Stage::ProbePeek, StackOp::Push(self.pad))
                } else {
                    go(Stage::Read, StackOp::Stay)
                }
            }
            Stage::ProbePeek => {
                if obs.check == Some(self.pad) {
                    go(Stage::Compare, StackOp::Pop)
                } else {
                    go(Stage::Read, StackOp::Pop)
                }
            }
            Stage::Compare => {
                if obs.push == Some(self.base) {
                    go(Stage::Collapse, StackOp::Pop)
                } else if obs.push == obs.check {
                    go(Stage::Compare, StackOp::Pop)
                } else {
                    go(Stage::Restore, StackOp::Stay)
                }
            }
            Stage::Restore => go(Stage::RestorePeek, StackOp::Push(self.pad)),
            Stage::RestorePeek => match obs.check {
                Some(s) if self.is_k_symbol(Some(s)) => go(Stage::RestorePush(s), StackOp::Pop),
                _ => go(Stage::Read, StackOp::Pop),
            },
            Stage::RestorePush(s) => go(Stage::Restore, StackOp::Push(*s)),
            Stage::Collapse => {
                if obs.push == Some(self.fill) {
                    go(Stage::Collapse, StackOp::Pop)
                } else if obs == Observation::BOTTOM {
                    go(Stage::Entry, StackOp::Stay)
                } else {
                    go(Stage::Climb(None), StackOp::Push(self.fill))
                }
            }
        }
    }
}

/// Machine for the restricted wreath product of the group of `m_h` by the
/// group given by `k`. The init word is an init word of `m_h`, a separator,
/// a normal form of `k` with its coset symbol on top, and padding.
pub fn product_wreath(m_h: &CspdaSpec, k: &VirtuallyFreeData) -> Result<CspdaSpec> {
    k.validate_free()?;
    if let Some(t) = k.transversal.iter().find(|t| k.basis.contains(t)) {
        return Err(Error::AlphabetCollision(t.clone()));
    }
    let mut layout = Layout::new();
    let h = Inner::embed(m_h, &mut layout)?;
    let inputs = layout.inputs(&h.alphabet().disjoint_union(&k.alphabet)?)?;
    let k_input = inputs[h.spec().input_alphabet.len()..].to_vec();
    let basis: Vec<Symbol> = k.basis.names().iter().map(|n| layout.both(n)).collect();
    let cosets: Vec<Symbol> = k.transversal.iter().map(|n| layout.both(n)).collect();
    let prefix = layout.fresh_prefix("wr");
    let fill = layout.push_symbol(&format!("{prefix}pad"));
    let base = layout.push_symbol(&format!("{prefix}base"));
    let sep = layout.check_symbol(&format!("{prefix}sep"));

    let mut init = Init::new();
    let offset = h.copy_init(&mut init, "H:");
    init.start = h.init_start() + offset;
    for (s, e) in h.labels() {
        let en = h.name(e).to_string();
        let start = init.state(format!("{en}/nf"));
        let after: Vec<usize> = (0..basis.len()).map(|b| init.state(format!("{en}/nf:{}", k.basis.name(b)))).collect();
        let coset = init.state(format!("{en}/coset"));
        let pads = init.state(format!("{en}/pad"));
        init.edge(s + offset, sep, start);
        for from in std::iter::once(None).chain((0..basis.len()).map(Some)) {
            let node = from.map_or(start, |b| after[b]);
            for b in 0..basis.len() {
                if from != Some(k.basis.inverse(b)) {
                    init.edge(node, basis[b], after[b]);
                }
            }
            for &t in &cosets {
                init.edge(node, t, coset);
            }
            init.edge(node, layout.pad, pads);
        }
        init.edge(coset, layout.pad, pads);
        init.edge(pads, layout.pad, pads);
        init.accepting.push((pads, Ctrl { e, q: e, stage: Stage::Entry }));
    }
    let program = Program { h, k: k.clone(), k_input, basis, cosets, pad: layout.pad, fill, base, sep };
    Ok(compile(&program, &layout, &init))
}
