//! The check-stack pushdown automaton model.
//!
//! A machine runs in two stages. Stage 1 writes a word over the check
//! alphabet, drawn from the regular language of an [`InitAutomaton`], and
//! picks an entry state. Stage 2 is deterministic: the head sits at the
//! height of the pushdown stack and observes the top pushdown symbol
//! together with the check symbol in the same cell.

mod exec;
mod file;
mod init;
mod search;

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exec::{Configuration, DivergenceKind, DivergenceWitness, RunOutcome, TraceStep};
pub use file::{MachineFile, StateEntry};

pub use init::InitWord;
pub use search::{AcceptResult, AuditCounterexample, AuditReport, LetterMap, SearchLimits};

/// Name of the reserved bottom marker in machine files.
pub const BOTTOM: &str = "BOT";

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Initial,
    Fail,
    Entry,
    AcceptingReading,
    NonReading,
}

impl StateKind {
    pub fn is_reading(self) -> bool {
        matches!(self, StateKind::Entry | StateKind::AcceptingReading)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateDescriptor {
    pub name: String,
    pub kind: StateKind,
    /// Builder annotation; ignored by the executor.
    pub role: Option<String>,
}

/// What the head sees: the top pushdown symbol and the check symbol in the
/// same cell. `None` is the bottom marker ⊥, seen on both stacks at height 0.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Observation {
    pub push: Option<Symbol>,
    pub check: Option<Symbol>,
}

impl Observation {
    pub const BOTTOM: Observation = Observation { push: None, check: None };

    pub fn new(push: Symbol, check: Symbol) -> Self {
        Self { push: Some(push), check: Some(check) }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum StackOp {
    Push(Symbol),
    Pop,
    /// Finite-control move that leaves both stacks alone.
    Stay,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct StepAction {
    pub next: StateId,
    pub op: StackOp,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub from: StateId,
    /// `Some` for reading moves.
    pub input: Option<Symbol>,
    pub observation: Observation,
    pub action: StepAction,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InitEdge {
    pub from: usize,
    pub symbol: Symbol,
    pub to: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InitAccept {
    pub state: usize,
    pub entry: StateId,
}

/// Nondeterministic finite automaton over the check alphabet whose accepting
/// states are labelled with stage-2 entry states. Words are bottom-to-top.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct InitAutomaton {
    pub states: Vec<String>,
    pub start: usize,
    pub edges: Vec<InitEdge>,
    pub accepting: Vec<InitAccept>,
}

/// Full machine description. Symbols index into `symbols`, the shared
/// universe for input, check and pushdown alphabets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CspdaSpec {
    pub symbols: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    pub inverse_of: Vec<(Symbol, Symbol)>,
    /// Declaration order is the init enumeration order.
    pub check_alphabet: Vec<Symbol>,
    pub push_alphabet: Vec<Symbol>,
    pub pad: Symbol,
    pub states: Vec<StateDescriptor>,
    pub transitions: Vec<Transition>,
    pub init: InitAutomaton,
}

impl CspdaSpec {
    pub fn symbol_name(&self, s: Symbol) -> &str {
        &self.symbols[s.0 as usize]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.symbols.iter().position(|n| n == name).map(|i| Symbol(i as u32))
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(|i| StateId(i as u32))
    }

    pub fn kind(&self, q: StateId) -> StateKind {
        self.states[q.index()].kind
    }

    fn states_of_kind(&self, kind: StateKind) -> Vec<StateId> {
        self.states.iter().enumerate().filter(|(_, s)| s.kind == kind).map(|(i, _)| StateId(i as u32)).collect()
    }

    pub fn initial_state(&self) -> Option<StateId> {
        self.states_of_kind(StateKind::Initial).first().copied()
    }

    pub fn fail_state(&self) -> Option<StateId> {
        self.states_of_kind(StateKind::Fail).first().copied()
    }

    pub fn entry_states(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.init.accepting.iter().map(|a| a.entry).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn format_symbols(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&s| self.symbol_name(s)).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_symbols(&self, text: &str) -> Result<Vec<Symbol>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| self.symbol(s).ok_or_else(|| Error::UnknownSymbol(s.to_string())))
            .collect()
    }
}

/// One finding of [`validate_spec`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: &'static str, detail: impl Into<String>) {
        self.violations.push(Violation { rule, detail: detail.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

pub const MULTIPLE_INITIAL: &str = "multiple initial states";
pub const NO_INITIAL: &str = "missing initial state";
pub const MULTIPLE_FAIL: &str = "multiple fail states";
pub const NO_FAIL: &str = "missing fail state";
pub const FAIL_HAS_MOVES: &str = "fail state has outgoing transitions";
pub const READING_PARTITION: &str = "reading/non-reading partition";
pub const ALPHABET_INCLUSION: &str = "alphabet inclusion";
pub const INVOLUTION: &str = "inverse is not an involution";
pub const NONDETERMINISTIC: &str = "nondeterministic stage 2";
pub const ENTRY_LABEL: &str = "bad entry label";
pub const DANGLING: &str = "dangling reference";

/// Checks the structural invariants and determinism upon input.
pub fn validate_spec(spec: &CspdaSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let nsym = spec.symbols.len() as u32;
    let nstates = spec.states.len() as u32;
    let sym_ok = |s: Symbol| s.0 < nsym;

    let initials = spec.states_of_kind(StateKind::Initial);
    match initials.len() {
        0 => report.push(NO_INITIAL, "no state of kind initial"),
        1 => {}
        n => report.push(MULTIPLE_INITIAL, format!("{n} states of kind initial")),
    }
    let fails = spec.states_of_kind(StateKind::Fail);
    match fails.len() {
        0 => report.push(NO_FAIL, "no state of kind fail"),
        1 => {}
        n => report.push(MULTIPLE_FAIL, format!("{n} states of kind fail")),
    }

    let in_set = |set: &[Symbol], s: Symbol| set.contains(&s);
    for &a in &spec.input_alphabet {
        if !sym_ok(a) {
            report.push(DANGLING, format!("input symbol #{}", a.0));
            continue;
        }
        if !in_set(&spec.check_alphabet, a) {
            report.push(ALPHABET_INCLUSION, format!("input `{}` not in check alphabet", spec.symbol_name(a)));
        }
        if !in_set(&spec.push_alphabet, a) {
            report.push(ALPHABET_INCLUSION, format!("input `{}` not in pushdown alphabet", spec.symbol_name(a)));
        }
    }
    if !sym_ok(spec.pad) {
        report.push(DANGLING, "pad symbol");
    } else {
        if !in_set(&spec.check_alphabet, spec.pad) {
            report.push(ALPHABET_INCLUSION, "pad symbol not in check alphabet");
        }
        if !in_set(&spec.push_alphabet, spec.pad) {
            report.push(ALPHABET_INCLUSION, "pad symbol not in pushdown alphabet");
        }
    }

    let mut inv: FxHashMap<Symbol, Symbol> = FxHashMap::default();
    for &(x, y) in &spec.inverse_of {
        if inv.insert(x, y).is_some_and(|old| old != y) {
            report.push(INVOLUTION, format!("`{}` has two inverses", spec.symbol_name(x)));
        }
        inv.entry(y).or_insert(x);
    }
    for &a in &spec.input_alphabet {
        match inv.get(&a) {
            None => report.push(INVOLUTION, format!("`{}` has no inverse", spec.symbol_name(a))),
            Some(&b) => {
                if !spec.input_alphabet.contains(&b) || inv.get(&b) != Some(&a) {
                    report.push(INVOLUTION, format!("inverse of `{}` is inconsistent", spec.symbol_name(a)));
                }
            }
        }
    }

    let mut seen: FxHashMap<(StateId, Option<Symbol>, Observation), usize> = FxHashMap::default();
    for t in &spec.transitions {
        if t.from.0 >= nstates || t.action.next.0 >= nstates {
            report.push(DANGLING, format!("transition references state #{} or #{}", t.from.0, t.action.next.0));
            continue;
        }
        let kind = spec.kind(t.from);
        match (kind, t.input) {
            (StateKind::Fail, _) => {
                report.push(FAIL_HAS_MOVES, spec.states[t.from.index()].name.clone());
            }
            (StateKind::Initial, _) => report.push(
                READING_PARTITION,
                format!("initial state `{}` has a stage-2 move", spec.states[t.from.index()].name),
            ),
            (StateKind::NonReading, Some(_)) => report.push(
                READING_PARTITION,
                format!("non-reading state `{}` has a reading move", spec.states[t.from.index()].name),
            ),
            (StateKind::Entry | StateKind::AcceptingReading, None) => report.push(
                READING_PARTITION,
                format!("reading state `{}` has a non-reading move", spec.states[t.from.index()].name),
            ),
            _ => {}
        }
        if let Some(a) = t.input {
            if !spec.input_alphabet.contains(&a) {
                report.push(DANGLING, format!("transition reads non-input symbol #{}", a.0));
            }
        }
        let obs_ok = match (t.observation.push, t.observation.check) {
            (None, None) => true,
            (Some(p), Some(c)) => sym_ok(p) && sym_ok(c),
            _ => false,
        };
        if !obs_ok {
            report.push(DANGLING, "observation must be (BOT, BOT) or a symbol pair");
        }
        if let StackOp::Push(g) = t.action.op {
            if !sym_ok(g) || !spec.push_alphabet.contains(&g) {
                report.push(ALPHABET_INCLUSION, format!("push of non-pushdown symbol #{}", g.0));
            }
        }
        if seen.insert((t.from, t.input, t.observation), 1).is_some() {
            report.push(
                NONDETERMINISTIC,
                format!(
                    "state `{}` has two transitions on input {:?} observing {}",
                    spec.states[t.from.index()].name,
                    t.input.map(|a| spec.symbol_name(a).to_string()),
                    format_observation(spec, t.observation)
                ),
            );
        }
    }

    let ninit = spec.init.states.len();
    if spec.init.start >= ninit {
        report.push(DANGLING, "init automaton start state");
    }
    for e in &spec.init.edges {
        if e.from >= ninit || e.to >= ninit {
            report.push(DANGLING, "init automaton edge");
        }
        if !sym_ok(e.symbol) || !spec.check_alphabet.contains(&e.symbol) {
            report.push(ALPHABET_INCLUSION, format!("init edge writes non-check symbol #{}", e.symbol.0));
        }
    }
    for a in &spec.init.accepting {
        if a.state >= ninit || a.entry.0 >= nstates {
            report.push(DANGLING, "init automaton accepting label");
        } else if spec.kind(a.entry) != StateKind::Entry {
            report
                .push(ENTRY_LABEL, format!("init label `{}` is not an entry state", spec.states[a.entry.index()].name));
        }
    }
    report
}

pub fn format_observation(spec: &CspdaSpec, obs: Observation) -> String {
    let f = |s: Option<Symbol>| s.map_or(BOTTOM.to_string(), |s| spec.symbol_name(s).to_string());
    format!("({}, {})", f(obs.push), f(obs.check))
}

type TransitionKey = (u32, u32, u32, u32);

fn key(q: StateId, input: Option<Symbol>, obs: Observation) -> TransitionKey {
    let enc = |s: Option<Symbol>| s.map_or(0, |s| s.0 + 1);
    (q.0, enc(input), enc(obs.push), enc(obs.check))
}

/// A validated machine with its transition index. Cheap to clone.
#[derive(Clone)]
pub struct Machine {
    inner: Arc<MachineInner>,
}

struct MachineInner {
    spec: CspdaSpec,
    table: FxHashMap<TransitionKey, StepAction>,
    kinds: Vec<StateKind>,
    init: init::InitIndex,
    fail: StateId,
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Machine")
            .field("states", &self.inner.spec.states.len())
            .field("transitions", &self.inner.spec.transitions.len())
            .finish()
    }
}

impl Machine {
    /// Validates `spec` and builds the executor index.
    pub fn new(spec: CspdaSpec) -> Result<Self> {
        let report = validate_spec(&spec);
        if !report.is_valid() {
            return Err(Error::Validation(report.to_string()));
        }
        let mut table = FxHashMap::default();
        for t in &spec.transitions {
            table.insert(key(t.from, t.input, t.observation), t.action);
        }
        let kinds = spec.states.iter().map(|s| s.kind).collect();
        let init = init::InitIndex::new(&spec);
        let fail = spec.fail_state().expect("validated");
        Ok(Self { inner: Arc::new(MachineInner { spec, table, kinds, init, fail }) })
    }

    pub fn spec(&self) -> &CspdaSpec {
        &self.inner.spec
    }

    pub fn kind(&self, q: StateId) -> StateKind {
        self.inner.kinds[q.index()]
    }

    pub fn fail_state(&self) -> StateId {
        self.inner.fail
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.inner.spec.states[q.index()].name
    }

    pub fn lookup(&self, q: StateId, input: Option<Symbol>, obs: Observation) -> Option<StepAction> {
        self.inner.table.get(&key(q, input, obs)).copied()
    }

    pub fn input_alphabet(&self) -> &[Symbol] {
        &self.inner.spec.input_alphabet
    }

    pub fn input_symbol(&self, name: &str) -> Result<Symbol> {
        self.inner
            .spec
            .symbol(name)
            .filter(|s| self.inner.spec.input_alphabet.contains(s))
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub(crate) fn init_index(&self) -> &init::InitIndex {
        &self.inner.init
    }

    /// Default step budget for one non-reading run over a check stack of
    /// the given height.
    pub fn default_budget(&self, check_len: usize) -> usize {
        let s = &self.inner.spec;
        s.states.len() * (check_len + 2) * (s.push_alphabet.len() + 1)
    }

    /// Returns a copy of this machine with the check alphabet enumerated in
    /// the given order. Symbols not listed keep their relative order after
    /// the listed ones.
    pub fn with_symbol_order(&self, order: &[String]) -> Result<Self> {
        let mut spec = self.inner.spec.clone();
        let mut listed = Vec::new();
        for name in order {
            let s = spec.symbol(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            if !spec.check_alphabet.contains(&s) {
                return Err(Error::UnknownSymbol(name.clone()));
            }
            listed.push(s);
        }
        let rest: Vec<Symbol> = spec.check_alphabet.iter().copied().filter(|s| !listed.contains(s)).collect();
        listed.extend(rest);
        spec.check_alphabet = listed;
        Machine::new(spec)
    }
}

impl CspdaSpec {
    pub fn to_json(&self) -> String {
        MachineFile::from_spec(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        MachineFile::from_json(text)?.to_spec()
    }
}
