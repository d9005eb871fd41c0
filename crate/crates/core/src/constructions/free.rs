use rustc_hash::FxHashMap;

use super::program::{compile, ControlProgram, Init, Inner, Layout};
use crate::error::Result;
use crate::machine::{CspdaSpec, Observation, StackOp, StateId, StateKind, Symbol};

const FACTOR: [&str; 2] = ["H", "K"];

struct Program {
    factors: [Inner; 2],
    pad: Symbol,
    /// Recorded reading states, as pushdown symbols.
    states: FxHashMap<Symbol, (usize, StateId)>,
    state_symbol: FxHashMap<(usize, StateId), Symbol>,
    /// Entry states closing a check substack.
    entries: FxHashMap<Symbol, (usize, StateId)>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Ctrl {
    /// Factor, state, entry state of the current substack.
    Read(usize, StateId, StateId),
    Arrive(usize, StateId, StateId),
    /// Padding up to the current substack's entry cell.
    Ascend(usize, StateId, Symbol),
    Record(usize, StateId, Symbol),
    /// Padding up to the next substack's entry cell.
    Climb(Symbol),
    Down(usize, StateId, Symbol),
    /// Removing padding below a recorded state.
    Descend(usize, StateId, StateId),
}

impl Program {
    fn factor_of(&self, a: Symbol) -> Option<(usize, Symbol)> {
        (0..2).find_map(|x| self.factors[x].input(a).map(|b| (x, b)))
    }

    fn at_base(&self, obs: Observation) -> bool {
        obs == Observation::BOTTOM
            || (obs.push.is_some_and(|g| self.states.contains_key(&g))
                && obs.check.is_some_and(|d| self.entries.contains_key(&d)))
    }

    /// Observation as seen by factor `x` inside the current substack.
    fn obs(&self, x: usize, obs: Observation) -> Option<Observation> {
        if self.at_base(obs) {
            return Some(Observation::BOTTOM);
        }
        if obs.check.is_some_and(|d| self.entries.contains_key(&d)) {
            return None;
        }
        self.factors[x].obs(obs)
    }

    fn state_name(&self, x: usize, q: StateId) -> String {
        format!("{}:{}", FACTOR[x], self.factors[x].name(q))
    }
}

impl ControlProgram for Program {
    type Ctrl = Ctrl;

    fn kind(&self, c: &Ctrl) -> StateKind {
        match c {
            Ctrl::Read(x, q, _) => self.factors[*x].kind(*q),
            _ => StateKind::NonReading,
        }
    }

    fn name(&self, c: &Ctrl) -> String {
        let letter = |a: &Symbol| {
            let (x, b) = self.factor_of(*a).expect("input letter");
            self.factors[x].spec().symbol_name(b).to_string()
        };
        match c {
            Ctrl::Read(x, q, e) => format!("{}|{}", self.state_name(*x, *q), self.factors[*x].name(*e)),
            Ctrl::Arrive(x, q, e) => format!("{}|{}~", self.state_name(*x, *q), self.factors[*x].name(*e)),
            Ctrl::Ascend(x, q, a) => format!("ascend[{}+{}]", self.state_name(*x, *q), letter(a)),
            Ctrl::Record(x, q, a) => format!("record[{}+{}]", self.state_name(*x, *q), letter(a)),
            Ctrl::Climb(a) => format!("climb[{}]", letter(a)),
            Ctrl::Down(x, e, a) => format!("down[{}+{}]", self.state_name(*x, *e), letter(a)),
            Ctrl::Descend(x, q, e) => format!("descend[{}|{}]", self.state_name(*x, *q), self.factors[*x].name(*e)),
        }
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        let r = match c {
            Ctrl::Read(..) | Ctrl::Arrive(..) => "simulate",
            Ctrl::Ascend(..) | Ctrl::Record(..) | Ctrl::Climb(_) | Ctrl::Down(..) => "switch up",
            Ctrl::Descend(..) => "switch down",
        };
        Some(r.into())
    }

    fn read(&self, c: &Ctrl, a: Symbol, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let Ctrl::Read(x, q, e) = c else { return None };
        let (y, b) = self.factor_of(a)?;
        if y == *x {
            let (q, op) = self.factors[*x].step(*q, Some(b), self.obs(*x, obs)?)?;
            Some((Ctrl::Arrive(*x, q, *e), op))
        } else {
            Some((Ctrl::Ascend(*x, *q, a), StackOp::Push(self.pad)))
        }
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let entry = obs.check.and_then(|d| self.entries.get(&d).copied());
        match c {
            Ctrl::Read(..) => None,
            Ctrl::Arrive(x, q, e) => {
                let f = &self.factors[*x];
                let inner = self.obs(*x, obs)?;
                if !f.kind(*q).is_reading() {
                    let (q, op) = f.step(*q, None, inner)?;
                    return Some((Ctrl::Arrive(*x, q, *e), op));
                }
                match obs.push.and_then(|g| self.states.get(&g).copied()) {
                    Some((y, qy)) if q == e && inner == Observation::BOTTOM => {
                        let (_, ey) = entry?;
                        Some((Ctrl::Descend(y, qy, ey), StackOp::Pop))
                    }
                    _ => Some((Ctrl::Read(*x, *q, *e), StackOp::Stay)),
                }
            }
            Ctrl::Ascend(x, q, a) => match entry {
                Some(_) => Some((Ctrl::Record(*x, *q, *a), StackOp::Pop)),
                None => Some((c.clone(), StackOp::Push(self.pad))),
            },
            Ctrl::Record(x, q, a) => Some((Ctrl::Climb(*a), StackOp::Push(self.state_symbol[&(*x, *q)]))),
            Ctrl::Climb(a) => {
                if obs.push == Some(self.pad) {
                    if let Some((y, e)) = entry {
                        return (Some(y) == self.factor_of(*a).map(|f| f.0))
                            .then_some((Ctrl::Down(y, e, *a), StackOp::Pop));
                    }
                }
                Some((Ctrl::Climb(*a), StackOp::Push(self.pad)))
            }
            Ctrl::Down(y, e, a) => {
                if obs.push == Some(self.pad) {
                    return Some((c.clone(), StackOp::Pop));
                }
                let (_, b) = self.factor_of(*a)?;
                let (q, op) = self.factors[*y].step(*e, Some(b), self.obs(*y, obs)?)?;
                Some((Ctrl::Arrive(*y, q, *e), op))
            }
            Ctrl::Descend(y, q, e) => {
                if obs.push == Some(self.pad) {
                    Some((c.clone(), StackOp::Pop))
                } else {
                    Some((Ctrl::Arrive(*y, *q, *e), StackOp::Stay))
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Start,
    /// First substack's entry (if closed), factor, factor init state.
    In(Option<(usize, StateId)>, usize, usize),
    After((usize, StateId), usize),
}

/// Machine for `H * K`. The init word is a sequence of check substacks of
/// alternating factors, each a factor init word closed by an entry symbol.
pub fn product_free(m_h: &CspdaSpec, m_k: &CspdaSpec) -> Result<CspdaSpec> {
    let mut layout = Layout::new();
    let factors = [Inner::embed(m_h, &mut layout)?, Inner::embed(m_k, &mut layout)?];
    layout.inputs(&factors[0].alphabet().disjoint_union(&factors[1].alphabet())?)?;
    let prefix = layout.fresh_prefix("fp");
    let pad = layout.push_symbol(&format!("{prefix}pad"));
    let mut states = FxHashMap::default();
    let mut state_symbol = FxHashMap::default();
    let mut entries = FxHashMap::default();
    let mut entry_symbol = FxHashMap::default();
    for (x, f) in factors.iter().enumerate() {
        for (i, d) in f.spec().states.iter().enumerate() {
            let q = StateId(i as u32);
            if d.kind.is_reading() {
                let s = layout.push_symbol(&format!("{prefix}st:{}:{}", FACTOR[x], d.name));
                states.insert(s, (x, q));
                state_symbol.insert((x, q), s);
            }
            if d.kind == StateKind::Entry {
                let s = layout.check_symbol(&format!("{prefix}en:{}:{}", FACTOR[x], d.name));
                entries.insert(s, (x, q));
                entry_symbol.insert((x, q), s);
            }
        }
    }

    let mut init: Init<Ctrl> = Init::new();
    let mut nodes: FxHashMap<Node, usize> = FxHashMap::default();
    let mut queue = vec![Node::Start];
    let name = |n: Node| match n {
        Node::Start => "start".to_string(),
        Node::In(f, x, s) => {
            let first = f.map_or(String::new(), |(y, e)| format!("{}:{}/", FACTOR[y], factors[y].name(e)));
            format!("{first}{}:{}", FACTOR[x], factors[x].spec().init.states[s])
        }
        Node::After((y, e), x) => format!("{}:{}/after {}", FACTOR[y], factors[y].name(e), FACTOR[x]),
    };
    nodes.insert(Node::Start, init.state(name(Node::Start)));
    init.start = 0;
    let mut i = 0;
    while i < queue.len() {
        let node = queue[i];
        i += 1;
        let from = nodes[&node];
        let mut out: Vec<(Symbol, Node)> = Vec::new();
        let enter = |first: Option<(usize, StateId)>, x: usize, s: usize, out: &mut Vec<(Symbol, Node)>| {
            let f = &factors[x];
            for e in f.spec().init.edges.iter().filter(|e| e.from == s) {
                out.push((f.outer(e.symbol), Node::In(first, x, e.to)));
            }
            for (t, q) in f.labels() {
                if t == s {
                    out.push((entry_symbol[&(x, q)], Node::After(first.unwrap_or((x, q)), x)));
                }
            }
        };
        match node {
            Node::Start => {
                for (x, f) in factors.iter().enumerate() {
                    enter(None, x, f.init_start(), &mut out);
                }
            }
            Node::In(first, x, s) => enter(first, x, s, &mut out),
            Node::After(first, x) => {
                init.accepting.push((from, Ctrl::Read(first.0, first.1, first.1)));
                enter(Some(first), 1 - x, factors[1 - x].init_start(), &mut out);
            }
        }
        for (sym, to) in out {
            let idx = match nodes.get(&to) {
                Some(&idx) => idx,
                None => {
                    let idx = init.state(name(to));
                    nodes.insert(to, idx);
                    queue.push(to);
                    idx
                }
            };
            init.edge(from, sym, idx);
        }
    }

    let program = Program { factors, pad, states, state_symbol, entries };
    Ok(compile(&program, &layout, &init))
}
