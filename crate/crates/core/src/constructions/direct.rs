use super::program::{compile, ControlProgram, Init, Inner, Layout};
use crate::error::Result;
use crate::machine::{CspdaSpec, Observation, StackOp, StateId, StateKind, Symbol};

struct Program {
    factors: [Inner; 2],
    tags: [Symbol; 2],
    pad: Symbol,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Ctrl {
    /// Factor `x` at its entry state with empty pushdown.
    Entry(usize, StateId),
    Feed(usize, StateId, Symbol),
    Run(usize, StateId),
    Read(usize, StateId),
}

const FACTOR: [&str; 2] = ["H", "K"];

impl Program {
    fn obs(&self, x: usize, obs: Observation) -> Option<Observation> {
        if obs.check == Some(self.tags[x]) {
            return (obs.push == Some(self.pad)).then_some(Observation::BOTTOM);
        }
        if obs == Observation::BOTTOM {
            return None;
        }
        self.factors[x].obs(obs)
    }
}

impl ControlProgram for Program {
    type Ctrl = Ctrl;

    fn kind(&self, c: &Ctrl) -> StateKind {
        match c {
            Ctrl::Entry(..) => StateKind::Entry,
            Ctrl::Feed(..) | Ctrl::Run(..) => StateKind::NonReading,
            Ctrl::Read(x, q) => self.factors[*x].kind(*q),
        }
    }

    fn name(&self, c: &Ctrl) -> String {
        match c {
            Ctrl::Entry(x, q) => format!("{}:{}@entry", FACTOR[*x], self.factors[*x].name(*q)),
            Ctrl::Feed(x, q, a) => {
                let f = &self.factors[*x];
                format!("{}:{}+{}", FACTOR[*x], f.name(*q), f.spec().symbol_name(*a))
            }
            Ctrl::Run(x, q) => format!("{}:{}~", FACTOR[*x], self.factors[*x].name(*q)),
            Ctrl::Read(x, q) => format!("{}:{}", FACTOR[*x], self.factors[*x].name(*q)),
        }
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        let x = match c {
            Ctrl::Entry(x, _) | Ctrl::Feed(x, ..) | Ctrl::Run(x, _) | Ctrl::Read(x, _) => *x,
        };
        Some(format!("factor {}", FACTOR[x]))
    }

    fn read(&self, c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        match c {
            Ctrl::Entry(x, q) => match self.factors[*x].input(a) {
                Some(b) => Some((Ctrl::Feed(*x, *q, b), StackOp::Push(self.pad))),
                None => Some((c.clone(), StackOp::Stay)),
            },
            Ctrl::Read(x, q) => match self.factors[*x].input(a) {
                Some(b) => {
                    let (q, op) = self.factors[*x].step(*q, Some(b), self.obs(*x, obs)?)?;
                    Some((Ctrl::Run(*x, q), op))
                }
                None => Some((c.clone(), StackOp::Stay)),
            },
            _ => None,
        }
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        match c {
            Ctrl::Feed(x, q, b) => {
                let (q, op) = self.factors[*x].step(*q, Some(*b), self.obs(*x, obs)?)?;
                Some((Ctrl::Run(*x, q), op))
            }
            Ctrl::Run(x, q) => {
                let f = &self.factors[*x];
                let inner = self.obs(*x, obs)?;
                if !f.kind(*q).is_reading() {
                    let (q, op) = f.step(*q, None, inner)?;
                    return Some((Ctrl::Run(*x, q), op));
                }
                if f.kind(*q) == StateKind::Entry && inner == Observation::BOTTOM {
                    Some((Ctrl::Entry(*x, *q), StackOp::Pop))
                } else {
                    Some((Ctrl::Read(*x, *q), StackOp::Stay))
                }
            }
            _ => None,
        }
    }
}

/// Machine for `H × K`. The init word starts with a factor tag; the run
/// then simulates that factor and ignores the other factor's letters.
pub fn product_direct(m_h: &CspdaSpec, m_k: &CspdaSpec) -> Result<CspdaSpec> {
    let mut layout = Layout::new();
    let h = Inner::embed(m_h, &mut layout)?;
    let k = Inner::embed(m_k, &mut layout)?;
    layout.inputs(&h.alphabet().disjoint_union(&k.alphabet())?)?;
    let prefix = layout.fresh_prefix("dp");
    let tags = [layout.check_symbol(&format!("{prefix}H")), layout.check_symbol(&format!("{prefix}K"))];
    let mut init = Init::new();
    init.start = init.state("start");
    for (x, f) in [&h, &k].into_iter().enumerate() {
        let offset = f.copy_init(&mut init, &format!("{}:", FACTOR[x]));
        init.edge(init.start, tags[x], f.init_start() + offset);
        for (s, q) in f.labels() {
            init.accepting.push((s + offset, Ctrl::Entry(x, q)));
        }
    }
    let program = Program { factors: [h, k], tags, pad: layout.pad };
    Ok(compile(&program, &layout, &init))
}
