//! Compiles a finite-control program into an explicit transition table by
//! exploring every control state reachable from the entry labels.

use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::machine::{
    CspdaSpec, InitAccept, InitAutomaton, InitEdge, Machine, Observation, StackOp, StateDescriptor, StateId, StateKind,
    StepAction, Symbol, Transition,
};

/// Symbol universe and alphabets of a machine under construction.
#[derive(Clone, Debug)]
pub struct Layout {
    names: Vec<String>,
    lookup: FxHashMap<String, Symbol>,
    pub input: Vec<Symbol>,
    pub inverse_of: Vec<(Symbol, Symbol)>,
    pub check: Vec<Symbol>,
    pub push: Vec<Symbol>,
    pub pad: Symbol,
}

pub const PAD: &str = "⍟";

impl Layout {
    pub fn new() -> Self {
        let mut l = Layout {
            names: Vec::new(),
            lookup: FxHashMap::default(),
            input: Vec::new(),
            inverse_of: Vec::new(),
            check: Vec::new(),
            push: Vec::new(),
            pad: Symbol(0),
        };
        l.pad = l.both(PAD);
        l
    }

    pub fn intern(&mut self, name: &str) -> Symbol {
        if let Some(&s) = self.lookup.get(name) {
            return s;
        }
        let s = Symbol(self.names.len() as u32);
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), s);
        s
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn has(&self, name: &str) -> bool {
        self.lookup.contains_key(name)
    }

    pub fn check_symbol(&mut self, name: &str) -> Symbol {
        let s = self.intern(name);
        if !self.check.contains(&s) {
            self.check.push(s);
        }
        s
    }

    pub fn push_symbol(&mut self, name: &str) -> Symbol {
        let s = self.intern(name);
        if !self.push.contains(&s) {
            self.push.push(s);
        }
        s
    }

    pub fn both(&mut self, name: &str) -> Symbol {
        self.check_symbol(name);
        self.push_symbol(name)
    }

    /// Declares the input alphabet; letters join both stack alphabets.
    pub fn inputs(&mut self, alphabet: &Alphabet) -> Result<Vec<Symbol>> {
        let mut out = Vec::with_capacity(alphabet.len());
        for x in alphabet.letters() {
            let name = alphabet.name(x);
            if self.input.iter().any(|&s| self.name(s) == name) {
                return Err(Error::AlphabetCollision(name.to_string()));
            }
            let s = self.both(name);
            self.input.push(s);
            out.push(s);
        }
        for x in alphabet.letters() {
            self.inverse_of.push((out[x], out[alphabet.inverse(x)]));
        }
        Ok(out)
    }

    /// Fresh namespace prefix `stem{n}.` not used by any symbol.
    pub fn fresh_prefix(&self, stem: &str) -> String {
        (0..)
            .map(|n| format!("{stem}{n}."))
            .find(|p| !self.names.iter().any(|s| s.starts_with(p.as_str())))
            .expect("unbounded search")
    }

    pub fn observations(&self) -> Vec<Observation> {
        let mut out = vec![Observation::BOTTOM];
        for &g in &self.push {
            for &d in &self.check {
                out.push(Observation::new(g, d));
            }
        }
        out
    }
}

impl Default for Layout {
    fn default() -> Self {
        Self::new()
    }
}

/// Labelled init automaton over layout symbols, with labels in a program's
/// control type.
#[derive(Clone, Debug)]
pub struct Init<C> {
    pub states: Vec<String>,
    pub start: usize,
    pub edges: Vec<(usize, Symbol, usize)>,
    pub accepting: Vec<(usize, C)>,
}

impl<C> Init<C> {
    pub fn new() -> Self {
        Self { states: Vec::new(), start: 0, edges: Vec::new(), accepting: Vec::new() }
    }

    pub fn state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn edge(&mut self, from: usize, s: Symbol, to: usize) {
        self.edges.push((from, s, to));
    }
}

impl<C> Default for Init<C> {
    fn default() -> Self {
        Self::new()
    }
}

/// A deterministic stage-2 control. Missing moves mean failure.
pub trait ControlProgram {
    type Ctrl: Clone + Eq + Hash + Debug;

    fn kind(&self, c: &Self::Ctrl) -> StateKind;

    fn name(&self, c: &Self::Ctrl) -> String;

    fn role(&self, _c: &Self::Ctrl) -> Option<String> {
        None
    }

    /// Non-reading move.
    fn step(&self, c: &Self::Ctrl, obs: Observation) -> Option<(Self::Ctrl, StackOp)>;

    /// Reading move on input `a`.
    fn read(&self, c: &Self::Ctrl, a: Symbol, obs: Observation) -> Option<(Self::Ctrl, StackOp)>;
}

struct Explored<C> {
    states: Vec<StateDescriptor>,
    used: FxHashSet<String>,
    index: FxHashMap<C, StateId>,
    queue: Vec<C>,
}

impl<C: Clone + Eq + Hash> Explored<C> {
    fn intern<P: ControlProgram<Ctrl = C>>(&mut self, program: &P, c: &C) -> StateId {
        if let Some(&id) = self.index.get(c) {
            return id;
        }
        let base = program.name(c);
        let mut name = base.clone();
        let mut n = 1;
        while self.used.contains(&name) {
            n += 1;
            name = format!("{base}#{n}");
        }
        self.used.insert(name.clone());
        let id = StateId(self.states.len() as u32);
        self.states.push(StateDescriptor { name, kind: program.kind(c), role: program.role(c) });
        self.index.insert(c.clone(), id);
        self.queue.push(c.clone());
        id
    }
}

pub fn compile<P: ControlProgram>(program: &P, layout: &Layout, init: &Init<P::Ctrl>) -> CspdaSpec {
    let states = vec![
        StateDescriptor { name: "init".into(), kind: StateKind::Initial, role: Some("initial".into()) },
        StateDescriptor { name: "fail".into(), kind: StateKind::Fail, role: Some("fail".into()) },
    ];
    let used = states.iter().map(|s| s.name.clone()).collect();
    let mut ex = Explored { states, used, index: FxHashMap::default(), queue: Vec::new() };

    let accepting: Vec<InitAccept> =
        init.accepting.iter().map(|(q, c)| InitAccept { state: *q, entry: ex.intern(program, c) }).collect();

    let observations = layout.observations();
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < ex.queue.len() {
        let c = ex.queue[i].clone();
        let from = ex.index[&c];
        match program.kind(&c) {
            StateKind::Entry | StateKind::AcceptingReading => {
                for &a in &layout.input {
                    for &obs in &observations {
                        if let Some((next, op)) = program.read(&c, a, obs) {
                            let next = ex.intern(program, &next);
                            transitions.push(Transition {
                                from,
                                input: Some(a),
                                observation: obs,
                                action: StepAction { next, op },
                            });
                        }
                    }
                }
            }
            StateKind::NonReading => {
                for &obs in &observations {
                    if let Some((next, op)) = program.step(&c, obs) {
                        let next = ex.intern(program, &next);
                        transitions.push(Transition {
                            from,
                            input: None,
                            observation: obs,
                            action: StepAction { next, op },
                        });
                    }
                }
            }
            StateKind::Initial | StateKind::Fail => {}
        }
        i += 1;
    }

    CspdaSpec {
        symbols: layout.names.clone(),
        input_alphabet: layout.input.clone(),
        inverse_of: layout.inverse_of.clone(),
        check_alphabet: layout.check.clone(),
        push_alphabet: layout.push.clone(),
        pad: layout.pad,
        states: ex.states,
        transitions,
        init: InitAutomaton {
            states: init.states.clone(),
            start: init.start,
            edges: init.edges.iter().map(|&(from, symbol, to)| InitEdge { from, symbol, to }).collect(),
            accepting,
        },
    }
}

/// A validated factor machine embedded in a larger layout, with symbols
/// translated by name.
#[derive(Clone)]
pub struct Inner {
    pub machine: Machine,
    to_outer: Vec<Symbol>,
    to_inner: FxHashMap<Symbol, Symbol>,
}

impl Inner {
    /// Registers the factor's stack symbols in `layout`. Input letters are
    /// left to the caller.
    pub fn embed(spec: &CspdaSpec, layout: &mut Layout) -> Result<Self> {
        let machine = Machine::new(spec.clone())?;
        let mut to_outer = Vec::with_capacity(spec.symbols.len());
        let mut to_inner = FxHashMap::default();
        for (i, name) in spec.symbols.iter().enumerate() {
            let s = Symbol(i as u32);
            let outer = layout.intern(name);
            if spec.check_alphabet.contains(&s) {
                layout.check_symbol(name);
            }
            if spec.push_alphabet.contains(&s) {
                layout.push_symbol(name);
            }
            to_outer.push(outer);
            to_inner.insert(outer, s);
        }
        Ok(Self { machine, to_outer, to_inner })
    }

    pub fn spec(&self) -> &CspdaSpec {
        self.machine.spec()
    }

    pub fn outer(&self, s: Symbol) -> Symbol {
        self.to_outer[s.0 as usize]
    }

    pub fn inner(&self, s: Symbol) -> Option<Symbol> {
        self.to_inner.get(&s).copied()
    }

    pub fn input(&self, outer: Symbol) -> Option<Symbol> {
        self.inner(outer).filter(|s| self.spec().input_alphabet.contains(s))
    }

    /// Translates an observation made inside the factor's region.
    pub fn obs(&self, o: Observation) -> Option<Observation> {
        match (o.push, o.check) {
            (None, None) => Some(Observation::BOTTOM),
            (Some(g), Some(d)) => {
                let (g, d) = (self.inner(g)?, self.inner(d)?);
                let spec = self.spec();
                (spec.push_alphabet.contains(&g) && spec.check_alphabet.contains(&d)).then_some(Observation::new(g, d))
            }
            _ => None,
        }
    }

    pub fn kind(&self, q: StateId) -> StateKind {
        self.machine.kind(q)
    }

    pub fn name(&self, q: StateId) -> &str {
        self.machine.state_name(q)
    }

    /// The factor's move from `q` on inner observation `obs`, with pushes
    /// translated to outer symbols. Moves into the factor's fail state and
    /// pops at the factor's bottom are reported as `None`.
    pub fn step(&self, q: StateId, input: Option<Symbol>, obs: Observation) -> Option<(StateId, StackOp)> {
        let act = self.machine.lookup(q, input, obs)?;
        if self.kind(act.next) == StateKind::Fail {
            return None;
        }
        let op = match act.op {
            StackOp::Push(g) => StackOp::Push(self.outer(g)),
            StackOp::Pop if obs == Observation::BOTTOM => return None,
            other => other,
        };
        Some((act.next, op))
    }

    /// Copies the factor's init automaton into `init`, returning the index
    /// offset of its states.
    pub fn copy_init<C>(&self, init: &mut Init<C>, tag: &str) -> usize {
        let offset = init.states.len();
        let spec = self.spec();
        for s in &spec.init.states {
            init.states.push(format!("{tag}{s}"));
        }
        for e in &spec.init.edges {
            init.edge(e.from + offset, self.outer(e.symbol), e.to + offset);
        }
        offset
    }

    /// Entry labels of the factor's init automaton, per init state.
    pub fn labels(&self) -> Vec<(usize, StateId)> {
        self.spec().init.accepting.iter().map(|a| (a.state, a.entry)).collect()
    }

    pub fn init_start(&self) -> usize {
        self.spec().init.start
    }

    /// Input alphabet of the factor as an [`Alphabet`].
    pub fn alphabet(&self) -> Alphabet {
        spec_alphabet(self.spec())
    }
}

pub fn spec_alphabet(spec: &CspdaSpec) -> Alphabet {
    let mut pairs = Vec::new();
    for &a in &spec.input_alphabet {
        let b = spec.inverse_of.iter().find(|p| p.0 == a).map_or(a, |p| p.1);
        let (na, nb) = (spec.symbol_name(a).to_string(), spec.symbol_name(b).to_string());
        if !pairs.iter().any(|(x, y): &(String, String)| *x == nb && *y == na) {
            pairs.push((na, nb));
        }
    }
    Alphabet::from_pairs(&pairs).expect("validated machine has a consistent involution")
}
