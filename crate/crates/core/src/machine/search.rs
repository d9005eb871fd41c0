//! Acceptance over bounded initialisations, and the special-property audits.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::exec::{Cursor, Poll};
use super::init::{InitIndex, Subset};
use super::{Configuration, InitWord, Machine, RunOutcome, StateKind, Symbol};
use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::oracles::GroupOracle;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AcceptResult {
    pub accepted: bool,
    /// First accepting init in enumeration order.
    pub witness: Option<InitWord>,
}

#[derive(Clone, Copy, Debug)]
enum Mode<'a> {
    AtMost(usize),
    Exact { len: usize, table: &'a [Vec<bool>] },
}

struct Probe<'a> {
    m: &'a Machine,
    idx: &'a InitIndex,
    e: usize,
    word: &'a [Symbol],
    mode: Mode<'a>,
}

impl Probe<'_> {
    fn viable(&self, set: &[usize], prefix: usize) -> bool {
        if set.is_empty() {
            return false;
        }
        match self.mode {
            Mode::AtMost(bound) => prefix <= bound && self.idx.distance(self.e, set) <= bound - prefix,
            Mode::Exact { len, table } => prefix <= len && set.iter().any(|&q| table[len - prefix][q]),
        }
    }

    /// Depth-first over check symbols, branching only where the run asks for
    /// a fresh cell. Returns the least accepting init below this node.
    fn dfs(&self, mut cursor: Cursor, set: Subset) -> Result<Option<Vec<Symbol>>> {
        match cursor.run(self.m, self.word) {
            Poll::Reached => {
                if self.m.kind(cursor.cfg.state) != StateKind::AcceptingReading {
                    return Ok(None);
                }
                let mut init = cursor.cfg.check;
                match self.mode {
                    Mode::AtMost(_) => Ok(Some(init)),
                    Mode::Exact { len, table } => {
                        let rest = self.idx.least_completion(table, &set, len - init.len());
                        Ok(rest.map(|r| {
                            init.extend(r);
                            init
                        }))
                    }
                }
            }
            Poll::Failed => Ok(None),
            Poll::Diverged(w) => Err(Error::DivergenceDetected(w)),
            Poll::NeedCell => {
                let prefix = cursor.cfg.check.len() + 1;
                for &s in self.idx.order() {
                    let next = self.idx.step(&set, s);
                    if !self.viable(&next, prefix) {
                        continue;
                    }
                    let mut branch = cursor.clone();
                    branch.extend(s);
                    if let Some(found) = self.dfs(branch, next)? {
                        return Ok(Some(found));
                    }
                }
                Ok(None)
            }
        }
    }
}

impl Machine {
    fn probe(&self, w: &[Symbol], e: usize, mode: Mode<'_>, budget_len: usize) -> Result<Option<Vec<Symbol>>> {
        let idx = self.init_index();
        let probe = Probe { m: self, idx, e, word: w, mode };
        let start = idx.start();
        if !probe.viable(&start, 0) {
            return Ok(None);
        }
        let cfg = Configuration { state: idx.entries[e], check: Vec::new(), push: Vec::new() };
        let cursor = Cursor::new(cfg, false, self.default_budget(budget_len));
        probe.dfs(cursor, start)
    }

    /// Decides acceptance of `w` over all inits of length at most
    /// `init_bound`, exploring only the check cells the runs actually reach.
    pub fn accepts(&self, w: &[Symbol], init_bound: usize) -> Result<AcceptResult> {
        let idx = self.init_index();
        let mut any = false;
        for e in 0..idx.entries.len() {
            if self.probe(w, e, Mode::AtMost(init_bound), init_bound)?.is_some() {
                any = true;
                break;
            }
        }
        if !any {
            return Ok(AcceptResult { accepted: false, witness: None });
        }
        let tables: Vec<Vec<Vec<bool>>> = (0..idx.entries.len()).map(|e| idx.exact_table(e, init_bound)).collect();
        let rank = |s: &Symbol| idx.order().iter().position(|x| x == s).unwrap_or(usize::MAX);
        for len in 0..=init_bound {
            let mut best: Option<InitWord> = None;
            for (e, table) in tables.iter().enumerate() {
                let mode = Mode::Exact { len, table };
                if let Some(word) = self.probe(w, e, mode, init_bound)? {
                    let better = match &best {
                        None => true,
                        Some(b) => word.iter().map(rank).lt(b.word.iter().map(rank)),
                    };
                    if better {
                        best = Some(InitWord { word, entry: idx.entries[e] });
                    }
                }
            }
            if best.is_some() {
                return Ok(AcceptResult { accepted: true, witness: best });
            }
        }
        unreachable!("an init within the bound accepted but none of exact length did")
    }

    /// Reference route: runs `w` from every enumerated init in order.
    pub fn accepts_enumerated(&self, w: &[Symbol], init_bound: usize) -> Result<AcceptResult> {
        let found = self.visit_init_words(init_bound, &mut |init| match self
            .run_word(self.entry_configuration(&init), w)
        {
            RunOutcome::Reached(c) if self.kind(c.state) == StateKind::AcceptingReading => Ok(ControlFlow::Break(init)),
            RunOutcome::Diverged(d) => Err(Error::DivergenceDetected(d)),
            _ => Ok(ControlFlow::Continue(())),
        })?;
        Ok(AcceptResult { accepted: found.is_some(), witness: found })
    }

    /// First init of length at most `init_bound` whose entry configuration
    /// accepts `w` and survives every input word of length at most `n`.
    pub fn find_robust_entry(&self, w: &[Symbol], n: usize, init_bound: usize) -> Result<Option<InitWord>> {
        self.visit_init_words(init_bound, &mut |init| {
            let entry = self.entry_configuration(&init);
            match self.run_word(entry.clone(), w) {
                RunOutcome::Reached(c) if self.kind(c.state) == StateKind::AcceptingReading => {}
                RunOutcome::Diverged(d) => return Err(Error::DivergenceDetected(d)),
                _ => return Ok(ControlFlow::Continue(())),
            }
            Ok(if self.survives_all(entry, n)? { ControlFlow::Break(init) } else { ControlFlow::Continue(()) })
        })
    }

    fn survives_all(&self, cfg: Configuration, depth: usize) -> Result<bool> {
        if depth == 0 {
            return Ok(true);
        }
        for &a in self.input_alphabet() {
            match self.read_letter(cfg.clone(), a) {
                RunOutcome::Reached(next) => {
                    if !self.survives_all(next, depth - 1)? {
                        return Ok(false);
                    }
                }
                RunOutcome::Failed => return Ok(false),
                RunOutcome::Diverged(d) => return Err(Error::DivergenceDetected(d)),
            }
        }
        Ok(true)
    }
}

/// Translation between an oracle's letters and a machine's input symbols,
/// matched by name.
#[derive(Clone, Debug)]
pub struct LetterMap {
    to_symbol: Vec<Symbol>,
}

impl LetterMap {
    pub fn new(machine: &Machine, alphabet: &Alphabet) -> Result<Self> {
        let spec = machine.spec();
        let mut to_symbol = Vec::with_capacity(alphabet.len());
        for x in alphabet.letters() {
            let s = machine
                .input_symbol(alphabet.name(x))
                .map_err(|_| Error::AlphabetMismatch(format!("machine has no input letter `{}`", alphabet.name(x))))?;
            to_symbol.push(s);
        }
        if to_symbol.len() != spec.input_alphabet.len() {
            let extra: Vec<&str> =
                spec.input_alphabet.iter().filter(|s| !to_symbol.contains(s)).map(|&s| spec.symbol_name(s)).collect();
            return Err(Error::AlphabetMismatch(format!("oracle lacks letters {extra:?}")));
        }
        Ok(Self { to_symbol })
    }

    pub fn symbols(&self, w: &[Letter]) -> Vec<Symbol> {
        w.iter().map(|&x| self.to_symbol[x]).collect()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchLimits {
    pub samples: usize,
    pub max_len: usize,
    pub init_bound: usize,
    pub seed: u64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AuditCounterexample {
    pub init: String,
    pub u: String,
    pub v: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub limits: SearchLimits,
    pub trivial_words: usize,
    pub inits: usize,
    pub samples: usize,
    /// Samples where C^u was reached, so the comparison was not vacuous.
    pub effective: usize,
    pub counterexamples: Vec<AuditCounterexample>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl Machine {
    /// Samples (init, u, v) with v trivial and checks that C^{uv} equals C^u
    /// or fails; also checks that a trivial u never moves its entry
    /// configuration to a different reading configuration.
    pub fn audit_property3(&self, oracle: &dyn GroupOracle, limits: SearchLimits) -> Result<AuditReport> {
        let alphabet = oracle.alphabet();
        let map = LetterMap::new(self, alphabet)?;
        let trivial: Vec<Vec<Letter>> = alphabet.words_up_to(limits.max_len).filter(|w| oracle.is_trivial(w)).collect();
        let inits = self.enumerate_init_words(limits.init_bound)?;
        let mut report = AuditReport {
            limits,
            trivial_words: trivial.len(),
            inits: inits.len(),
            samples: 0,
            effective: 0,
            counterexamples: Vec::new(),
        };
        if inits.is_empty() {
            return Ok(report);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
        let fmt = |w: &[Letter]| alphabet.format_word(w);
        let spec = self.spec();
        for _ in 0..limits.samples {
            let init = inits.choose(&mut rng).expect("nonempty");
            let ulen = rng.gen_range(0..=limits.max_len);
            let u: Vec<Letter> = (0..ulen).map(|_| rng.gen_range(0..alphabet.len())).collect();
            let v = trivial.choose(&mut rng).expect("ε is trivial");
            report.samples += 1;
            let entry = self.entry_configuration(init);
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            let cu = self.run_word(entry.clone(), &map.symbols(&u));
            let cuv = self.run_word(entry.clone(), &map.symbols(&uv));
            let ce = |detail: String| AuditCounterexample {
                init: spec.format_symbols(&init.word),
                u: fmt(&u),
                v: fmt(v),
                detail,
            };
            match (&cu, &cuv) {
                (RunOutcome::Diverged(d), _) | (_, RunOutcome::Diverged(d)) => {
                    return Err(Error::DivergenceDetected(d.clone()))
                }
                (RunOutcome::Reached(a), RunOutcome::Reached(b)) => {
                    if !a.same_as(b) {
                        report.counterexamples.push(ce(format!(
                            "C^uv differs from C^u: {} vs {}",
                            self.describe(b),
                            self.describe(a)
                        )));
                    }
                }
                (RunOutcome::Failed, RunOutcome::Reached(_)) => {
                    report.counterexamples.push(ce("C^u fails but C^uv does not".into()))
                }
                _ => {}
            }
            if let RunOutcome::Reached(a) = &cu {
                report.effective += 1;
                if oracle.is_trivial(&u) && !a.same_as(&entry) {
                    let msg = format!("trivial u moves the entry configuration to {}", self.describe(a));
                    report.counterexamples.push(ce(msg));
                }
            }
        }
        Ok(report)
    }

    pub fn describe(&self, cfg: &Configuration) -> String {
        format!("[{} | {}]", self.state_name(cfg.state), self.spec().format_symbols(&cfg.push))
    }
}
