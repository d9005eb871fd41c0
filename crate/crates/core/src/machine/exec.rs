//! Deterministic stage-2 execution.

use std::fmt;

use serde::Serialize;

use super::{Machine, Observation, StackOp, StateId, StateKind, StepAction, Symbol};

/// A stage-2 configuration. The head height is `push.len()`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    pub state: StateId,
    pub check: Vec<Symbol>,
    pub push: Vec<Symbol>,
}

impl Configuration {
    pub fn height(&self) -> usize {
        self.push.len()
    }

    pub fn observation(&self) -> Observation {
        observe(&self.check, &self.push)
    }

    /// Equality used by the trivial-subword property: same state and same
    /// pushdown content.
    pub fn same_as(&self, other: &Configuration) -> bool {
        self.state == other.state && self.push == other.push
    }
}

fn observe(check: &[Symbol], push: &[Symbol]) -> Observation {
    match push.len() {
        0 => Observation::BOTTOM,
        h => Observation { push: Some(push[h - 1]), check: Some(check[h - 1]) },
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    Repetition,
    Budget,
}

/// Evidence of an unbounded run of non-reading moves.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DivergenceWitness {
    pub kind: DivergenceKind,
    pub state: String,
    pub height: usize,
    pub steps: usize,
}

impl fmt::Display for DivergenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let why = match self.kind {
            DivergenceKind::Repetition => "configuration repeated",
            DivergenceKind::Budget => "step budget exhausted",
        };
        write!(f, "{why} at state `{}`, height {}, after {} steps", self.state, self.height, self.steps)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    Reached(Configuration),
    Failed,
    Diverged(DivergenceWitness),
}

impl RunOutcome {
    pub fn reached(&self) -> Option<&Configuration> {
        match self {
            RunOutcome::Reached(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, RunOutcome::Failed)
    }
}

/// One applied transition, for traces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub state: StateId,
    pub input: Option<Symbol>,
    pub observation: Observation,
    pub action: StepAction,
    pub height_after: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum Poll {
    Reached,
    Failed,
    Diverged(DivergenceWitness),
    /// A push needs the check cell just above the known prefix.
    NeedCell,
}

/// Resumable executor over a check stack that may only be partially known.
#[derive(Clone)]
pub(crate) struct Cursor {
    pub cfg: Configuration,
    /// When false, the check stack may continue above `cfg.check`.
    pub complete: bool,
    pub pos: usize,
    budget: usize,
    steps: usize,
    saved: Option<(StateId, Vec<Symbol>)>,
    power: usize,
    lam: usize,
    pub trace: Option<Vec<TraceStep>>,
}

impl Cursor {
    pub fn new(cfg: Configuration, complete: bool, budget: usize) -> Self {
        Self { cfg, complete, pos: 0, budget, steps: 0, saved: None, power: 1, lam: 0, trace: None }
    }

    pub fn extend(&mut self, s: Symbol) {
        self.cfg.check.push(s);
        self.reset_cycle();
    }

    fn reset_cycle(&mut self) {
        self.saved = None;
        self.power = 1;
        self.lam = 0;
        self.steps = 0;
    }

    fn apply(&mut self, input: Option<Symbol>, obs: Observation, act: StepAction) -> Result<(), Poll> {
        let from = self.cfg.state;
        match act.op {
            StackOp::Push(g) => {
                if self.cfg.push.len() == self.cfg.check.len() {
                    return Err(if self.complete { Poll::Failed } else { Poll::NeedCell });
                }
                self.cfg.push.push(g);
            }
            StackOp::Pop => {
                if self.cfg.push.pop().is_none() {
                    return Err(Poll::Failed);
                }
            }
            StackOp::Stay => {}
        }
        self.cfg.state = act.next;
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceStep { state: from, input, observation: obs, action: act, height_after: self.cfg.push.len() });
        }
        Ok(())
    }

    /// Runs until the whole of `word` is consumed and a reading state is
    /// reached, or the run stops for another reason.
    pub fn run(&mut self, m: &Machine, word: &[Symbol]) -> Poll {
        loop {
            let q = self.cfg.state;
            let obs = self.cfg.observation();
            match m.kind(q) {
                StateKind::Fail | StateKind::Initial => return Poll::Failed,
                StateKind::Entry | StateKind::AcceptingReading => {
                    let Some(&a) = word.get(self.pos) else { return Poll::Reached };
                    let Some(act) = m.lookup(q, Some(a), obs) else { return Poll::Failed };
                    if let Err(p) = self.apply(Some(a), obs, act) {
                        return p;
                    }
                    self.pos += 1;
                    self.reset_cycle();
                }
                StateKind::NonReading => {
                    let Some(act) = m.lookup(q, None, obs) else { return Poll::Failed };
                    if let Err(p) = self.apply(None, obs, act) {
                        return p;
                    }
                    self.steps += 1;
                    if let Some(w) = self.check_cycle(m) {
                        return Poll::Diverged(w);
                    }
                }
            }
        }
    }

    fn check_cycle(&mut self, m: &Machine) -> Option<DivergenceWitness> {
        let witness = |kind, cfg: &Configuration, steps| DivergenceWitness {
            kind,
            state: m.state_name(cfg.state).to_string(),
            height: cfg.push.len(),
            steps,
        };
        if let Some((q, push)) = &self.saved {
            if *q == self.cfg.state && *push == self.cfg.push {
                return Some(witness(DivergenceKind::Repetition, &self.cfg, self.steps));
            }
        }
        if self.steps > self.budget {
            return Some(witness(DivergenceKind::Budget, &self.cfg, self.steps));
        }
        self.lam += 1;
        if self.lam == self.power || self.saved.is_none() {
            self.saved = Some((self.cfg.state, self.cfg.push.clone()));
            self.power *= 2;
            self.lam = 0;
        }
        None
    }
}

impl Machine {
    fn finish(&self, cursor: Cursor, poll: Poll) -> RunOutcome {
        match poll {
            Poll::Reached => RunOutcome::Reached(cursor.cfg),
            Poll::Failed | Poll::NeedCell => RunOutcome::Failed,
            Poll::Diverged(w) => RunOutcome::Diverged(w),
        }
    }

    /// Runs non-reading moves from `cfg` until a reading state is entered.
    pub fn advance_to_reading(&self, cfg: Configuration, budget: usize) -> RunOutcome {
        let mut c = Cursor::new(cfg, true, budget);
        let poll = c.run(self, &[]);
        self.finish(c, poll)
    }

    /// Consumes one input letter from a reading configuration.
    pub fn read_letter(&self, cfg: Configuration, a: Symbol) -> RunOutcome {
        self.run_word(cfg, &[a])
    }

    /// Computes C^w from the reading configuration `cfg`.
    pub fn run_word(&self, cfg: Configuration, w: &[Symbol]) -> RunOutcome {
        let budget = self.default_budget(cfg.check.len());
        let mut c = Cursor::new(cfg, true, budget);
        let poll = c.run(self, w);
        self.finish(c, poll)
    }

    /// Like [`Machine::run_word`], also returning every applied transition.
    pub fn trace_word(&self, cfg: Configuration, w: &[Symbol]) -> (Vec<TraceStep>, RunOutcome) {
        let budget = self.default_budget(cfg.check.len());
        let mut c = Cursor::new(cfg, true, budget);
        c.trace = Some(Vec::new());
        let poll = c.run(self, w);
        let steps = c.trace.take().unwrap_or_default();
        (steps, self.finish(c, poll))
    }
}
