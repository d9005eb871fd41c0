use super::program::{compile, ControlProgram, Init, Layout};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::machine::{CspdaSpec, Observation, StackOp, StateKind, Symbol};
use crate::oracles::{apply_finitary, BoundedOracle, Generator};

struct Program {
    generators: Vec<Generator>,
    input: Vec<Symbol>,
    tree: Vec<Symbol>,
    pad: Symbol,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Ctrl {
    Q1,
    Q2,
    Restore(usize),
    /// Peek pushed; the check cell decides between copying and applying.
    Peeked(usize),
    Copy(usize, usize),
    PopFinitary(usize, Vec<usize>),
    PopSpine(usize, usize),
    /// Left the spine at class `c` with letter `y`; popping the tail prefix.
    PopTail {
        g: usize,
        c: usize,
        y: usize,
        popped: Vec<usize>,
    },
    /// Tree letters to push in order, then continue down the spine.
    Emit {
        g: usize,
        push: Vec<usize>,
        spine: Option<usize>,
    },
    PushSpine(usize, usize),
    /// Counting pads up to and back down from the marker probe.
    ProbeUp(usize, usize),
    ProbeDown {
        g: usize,
        left: usize,
        marker: bool,
    },
    Compare,
}

impl Program {
    fn letter(&self, s: Option<Symbol>) -> Option<usize> {
        let s = s?;
        self.tree.iter().position(|&x| x == s)
    }

    fn emit(&self, g: usize, mut push: Vec<usize>, spine: Option<usize>) -> Ctrl {
        push.reverse();
        Ctrl::Emit { g, push, spine }
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
        let w = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<String>();
        match c {
            Ctrl::Q1 => "q1".into(),
            Ctrl::Q2 => "q2".into(),
            Ctrl::Restore(g) => format!("restore[{g}]"),
            Ctrl::Peeked(g) => format!("peek[{g}]"),
            Ctrl::Copy(g, y) => format!("copy[{g}:{y}]"),
            Ctrl::PopFinitary(g, p) => format!("finitary[{g}:{}]", w(p)),
            Ctrl::PopSpine(g, c) => format!("spine[{g}:{c}]"),
            Ctrl::PopTail { g, c, y, popped } => format!("tail[{g}:{c}:{y}:{}]", w(popped)),
            Ctrl::Emit { g, push, spine } => match spine {
                Some(c) => format!("emit[{g}:{}>{c}]", w(push)),
                None => format!("emit[{g}:{}]", w(push)),
            },
            Ctrl::PushSpine(g, c) => format!("unwind[{g}:{c}]"),
            Ctrl::ProbeUp(g, k) => format!("probe-up[{g}:{k}]"),
            Ctrl::ProbeDown { g, left, marker } => format!("probe-down[{g}:{left}:{}]", u8::from(*marker)),
            Ctrl::Compare => "compare".into(),
        }
    }

    fn role(&self, c: &Ctrl) -> Option<String> {
        let r = match c {
            Ctrl::Q1 => "entry",
            Ctrl::Q2 => "accepting",
            Ctrl::Restore(_) | Ctrl::Peeked(_) | Ctrl::Copy(..) => "restore",
            Ctrl::PopFinitary(..) => "finitary",
            Ctrl::Compare => "compare",
            _ => "directed",
        };
        Some(r.into())
    }

    fn read(&self, _c: &Ctrl, a: Symbol, _obs: Observation) -> Option<(Ctrl, StackOp)> {
        let g = self.input.iter().position(|&s| s == a)?;
        Some((Ctrl::Peeked(g), StackOp::Push(self.pad)))
    }

    fn step(&self, c: &Ctrl, obs: Observation) -> Option<(Ctrl, StackOp)> {
        let top = self.letter(obs.push);
        match c {
            Ctrl::Q1 | Ctrl::Q2 => None,
            Ctrl::Restore(g) => Some((Ctrl::Peeked(*g), StackOp::Push(self.pad))),
            Ctrl::Peeked(g) => {
                if obs.push != Some(self.pad) {
                    return None;
                }
                match self.letter(obs.check) {
                    Some(y) => Some((Ctrl::Copy(*g, y), StackOp::Pop)),
                    None => {
                        let next = match &self.generators[*g] {
                            Generator::Finitary(_) => Ctrl::PopFinitary(*g, Vec::new()),
                            Generator::Directed(_) => Ctrl::PopSpine(*g, 0),
                        };
                        Some((next, StackOp::Pop))
                    }
                }
            }
            Ctrl::Copy(g, y) => Some((Ctrl::Restore(*g), StackOp::Push(self.tree[*y]))),
            Ctrl::PopFinitary(g, popped) => {
                let Generator::Finitary(phi) = &self.generators[*g] else { return None };
                match top {
                    Some(y) if popped.len() < phi.depth => {
                        let mut p = popped.clone();
                        p.push(y);
                        Some((Ctrl::PopFinitary(*g, p), StackOp::Pop))
                    }
                    _ => Some((self.emit(*g, apply_finitary(phi, popped), None), StackOp::Stay)),
                }
            }
            Ctrl::PopSpine(g, c) => {
                let Generator::Directed(d) = &self.generators[*g] else { return None };
                match top {
                    None => Some((Ctrl::PushSpine(*g, *c), StackOp::Stay)),
                    Some(y) if y == d.spine_letter(*c) => Some((Ctrl::PopSpine(*g, d.next_class(*c)), StackOp::Pop)),
                    Some(y) => Some((Ctrl::PopTail { g: *g, c: *c, y, popped: Vec::new() }, StackOp::Pop)),
                }
            }
            Ctrl::PopTail { g, c, y, popped } => {
                let Generator::Directed(d) = &self.generators[*g] else { return None };
                let (image, tail) = d.off(*c, *y);
                let depth = tail.map_or(0, |t| t.depth);
                match top {
                    Some(z) if popped.len() < depth => {
                        let mut p = popped.clone();
                        p.push(z);
                        Some((Ctrl::PopTail { g: *g, c: *c, y: *y, popped: p }, StackOp::Pop))
                    }
                    _ => {
                        let mut out = vec![image];
                        out.extend(tail.map_or_else(|| popped.clone(), |t| apply_finitary(t, popped)));
                        Some((self.emit(*g, out, Some(*c)), StackOp::Stay))
                    }
                }
            }
            Ctrl::Emit { g, push, spine } => match push.split_first() {
                Some((&y, rest)) => {
                    Some((Ctrl::Emit { g: *g, push: rest.to_vec(), spine: *spine }, StackOp::Push(self.tree[y])))
                }
                None => match spine {
                    Some(c) => Some((Ctrl::PushSpine(*g, *c), StackOp::Stay)),
                    None => Some((Ctrl::Compare, StackOp::Stay)),
                },
            },
            Ctrl::PushSpine(g, c) => {
                let Generator::Directed(d) = &self.generators[*g] else { return None };
                let (s, c) = (d.s(), *c);
                if c == s {
                    Some((Ctrl::ProbeUp(*g, 1), StackOp::Push(self.pad)))
                } else if c == 0 {
                    Some((Ctrl::Compare, StackOp::Stay))
                } else {
                    Some((Ctrl::PushSpine(*g, c - 1), StackOp::Push(self.tree[d.spine_image(c - 1)])))
                }
            }
            Ctrl::ProbeUp(g, k) => {
                let Generator::Directed(d) = &self.generators[*g] else { return None };
                if *k <= d.s() {
                    Some((Ctrl::ProbeUp(*g, k + 1), StackOp::Push(self.pad)))
                } else {
                    let marker = obs.check == Some(self.pad);
                    Some((Ctrl::ProbeDown { g: *g, left: *k, marker }, StackOp::Pop))
                }
            }
            Ctrl::ProbeDown { g, left, marker } => {
                let Generator::Directed(d) = &self.generators[*g] else { return None };
                if *left > 1 {
                    return Some((Ctrl::ProbeDown { g: *g, left: left - 1, marker: *marker }, StackOp::Pop));
                }
                let s = d.s();
                match (*marker, s) {
                    (true, 0) => Some((Ctrl::Compare, StackOp::Stay)),
                    (true, _) => Some((Ctrl::PushSpine(*g, s - 1), StackOp::Push(self.tree[d.spine_image(s - 1)]))),
                    (false, _) => {
                        let last = d.classes() - 1;
                        Some((Ctrl::PushSpine(*g, last), StackOp::Push(self.tree[d.spine_image(last)])))
                    }
                }
            }
            Ctrl::Compare => match (top, self.letter(obs.check)) {
                (None, _) if obs == Observation::BOTTOM => Some((Ctrl::Q1, StackOp::Stay)),
                (Some(y), Some(x)) if y == x => Some((Ctrl::Compare, StackOp::Pop)),
                (Some(_), _) => Some((Ctrl::Q2, StackOp::Stay)),
                _ => None,
            },
        }
    }
}

/// Tree letter names `0..degree`.
pub fn tree_letter(i: usize) -> String {
    i.to_string()
}

/// Machine for the group generated by bounded automorphisms, one per
/// letter. The init language is `Σ* ⍟⁺`, read bottom to top, so the first
/// letter of the tree string sits just below the padding.
pub fn build_bounded_automata(alphabet: &Alphabet, generators: &[Generator]) -> Result<CspdaSpec> {
    let oracle = BoundedOracle::new(alphabet.clone(), generators)?;
    let mut layout = Layout::new();
    let input = layout.inputs(alphabet)?;
    let mut tree = Vec::new();
    for i in 0..oracle.degree {
        let name = tree_letter(i);
        if layout.has(&name) {
            return Err(Error::AlphabetCollision(name));
        }
        tree.push(layout.both(&name));
    }
    let program = Program { generators: generators.to_vec(), input, tree: tree.clone(), pad: layout.pad };
    let mut init = Init::new();
    let x = init.state("tree");
    let p = init.state("pad");
    for &t in &tree {
        init.edge(x, t, x);
    }
    init.edge(x, layout.pad, p);
    init.edge(p, layout.pad, p);
    init.accepting.push((p, Ctrl::Q1));
    Ok(compile(&program, &layout, &init))
}
