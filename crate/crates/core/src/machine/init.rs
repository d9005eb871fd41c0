//! Stage-1 initialisations: the labelled init automaton and its language.

use std::ops::ControlFlow;

use rustc_hash::FxHashMap;

use super::{Configuration, CspdaSpec, Machine, StateId, Symbol};
use crate::error::{Error, Result};

/// An accepted check-stack word (bottom to top) with its entry label.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InitWord {
    pub word: Vec<Symbol>,
    pub entry: StateId,
}

/// Sorted, deduplicated set of init-automaton states.
pub(crate) type Subset = Vec<usize>;

pub(crate) struct InitIndex {
    start: usize,
    order: Vec<Symbol>,
    edges: FxHashMap<(usize, Symbol), Vec<usize>>,
    labels: Vec<Vec<StateId>>,
    pub entries: Vec<StateId>,
    /// `dist[e][q]`: shortest path from `q` to a state labelled `entries[e]`.
    dist: Vec<Vec<usize>>,
}

impl InitIndex {
    pub fn new(spec: &CspdaSpec) -> Self {
        let n = spec.init.states.len();
        let mut edges: FxHashMap<(usize, Symbol), Vec<usize>> = FxHashMap::default();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &spec.init.edges {
            let v = edges.entry((e.from, e.symbol)).or_default();
            if !v.contains(&e.to) {
                v.push(e.to);
                v.sort_unstable();
            }
            rev[e.to].push(e.from);
        }
        let mut labels = vec![Vec::new(); n];
        for a in &spec.init.accepting {
            if !labels[a.state].contains(&a.entry) {
                labels[a.state].push(a.entry);
            }
        }
        let entries = spec.entry_states();
        let dist = entries
            .iter()
            .map(|&e| {
                let mut d = vec![usize::MAX; n];
                let mut queue = std::collections::VecDeque::new();
                for (q, l) in labels.iter().enumerate() {
                    if l.contains(&e) {
                        d[q] = 0;
                        queue.push_back(q);
                    }
                }
                while let Some(q) = queue.pop_front() {
                    for &p in &rev[q] {
                        if d[p] == usize::MAX {
                            d[p] = d[q] + 1;
                            queue.push_back(p);
                        }
                    }
                }
                d
            })
            .collect();
        Self { start: spec.init.start, order: spec.check_alphabet.clone(), edges, labels, entries, dist }
    }

    pub fn order(&self) -> &[Symbol] {
        &self.order
    }

    pub fn start(&self) -> Subset {
        vec![self.start]
    }

    pub fn step(&self, from: &[usize], s: Symbol) -> Subset {
        let mut out = Vec::new();
        for &q in from {
            if let Some(ts) = self.edges.get(&(q, s)) {
                out.extend_from_slice(ts);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Shortest completion of `set` to a word labelled with entry index `e`.
    pub fn distance(&self, e: usize, set: &[usize]) -> usize {
        set.iter().map(|&q| self.dist[e][q]).min().unwrap_or(usize::MAX)
    }

    fn min_distance(&self, set: &[usize]) -> usize {
        (0..self.entries.len()).map(|e| self.distance(e, set)).min().unwrap_or(usize::MAX)
    }

    pub fn labels_of(&self, set: &[usize]) -> Vec<StateId> {
        let mut out: Vec<StateId> = set.iter().flat_map(|&q| self.labels[q].iter().copied()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// `table[len][q]` is true iff some word of exactly `len` symbols leads
    /// from `q` to a state labelled `entries[e]`.
    pub fn exact_table(&self, e: usize, max_len: usize) -> Vec<Vec<bool>> {
        let n = self.labels.len();
        let target = self.entries[e];
        let mut table = vec![(0..n).map(|q| self.labels[q].contains(&target)).collect::<Vec<_>>()];
        for len in 1..=max_len {
            let prev = &table[len - 1];
            let row = (0..n)
                .map(|q| {
                    self.order.iter().any(|&s| self.edges.get(&(q, s)).is_some_and(|ts| ts.iter().any(|&t| prev[t])))
                })
                .collect();
            table.push(row);
        }
        table
    }

    /// Lexicographically least word of exactly `len` symbols completing
    /// `set` to the entry label `e`, given `table` from [`Self::exact_table`].
    pub fn least_completion(&self, table: &[Vec<bool>], set: &[usize], len: usize) -> Option<Vec<Symbol>> {
        if !set.iter().any(|&q| table[len][q]) {
            return None;
        }
        let mut cur = set.to_vec();
        let mut out = Vec::with_capacity(len);
        for remaining in (1..=len).rev() {
            let (s, next) = self
                .order
                .iter()
                .map(|&s| (s, self.step(&cur, s)))
                .find(|(_, next)| next.iter().any(|&q| table[remaining - 1][q]))?;
            out.push(s);
            cur = next;
        }
        Some(out)
    }
}

impl Machine {
    /// All init words of length at most `max_len`, in length-lexicographic
    /// order of the check alphabet, each with its entry label.
    pub fn enumerate_init_words(&self, max_len: usize) -> Result<Vec<InitWord>> {
        let mut out = Vec::new();
        self.visit_init_words::<()>(max_len, &mut |init| {
            out.push(init);
            Ok(ControlFlow::Continue(()))
        })?;
        Ok(out)
    }

    /// Visits init words in the order of [`Machine::enumerate_init_words`]
    /// until `f` breaks.
    pub fn visit_init_words<T>(
        &self,
        max_len: usize,
        f: &mut dyn FnMut(InitWord) -> Result<ControlFlow<T>>,
    ) -> Result<Option<T>> {
        let idx = self.init_index();
        for len in 0..=max_len {
            let mut word = Vec::with_capacity(len);
            if let ControlFlow::Break(t) = self.visit_rec(idx, idx.start(), len, &mut word, f)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    fn visit_rec<T>(
        &self,
        idx: &InitIndex,
        set: Subset,
        remaining: usize,
        word: &mut Vec<Symbol>,
        f: &mut dyn FnMut(InitWord) -> Result<ControlFlow<T>>,
    ) -> Result<ControlFlow<T>> {
        if set.is_empty() || idx.min_distance(&set) > remaining {
            return Ok(ControlFlow::Continue(()));
        }
        if remaining == 0 {
            let labels = idx.labels_of(&set);
            return match labels.as_slice() {
                [] => Ok(ControlFlow::Continue(())),
                [e] => f(InitWord { word: word.clone(), entry: *e }),
                _ => {
                    let names: Vec<&str> = labels.iter().map(|&q| self.state_name(q)).collect();
                    Err(Error::AmbiguousEntry(format!("{} -> {}", self.spec().format_symbols(word), names.join(", "))))
                }
            };
        }
        for &s in idx.order() {
            let next = idx.step(&set, s);
            word.push(s);
            let flow = self.visit_rec(idx, next, remaining - 1, word, f)?;
            word.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Labels a check-stack word through the init automaton.
    pub fn init_word(&self, word: &[Symbol]) -> Result<InitWord> {
        let idx = self.init_index();
        let set = word.iter().fold(idx.start(), |set, &s| idx.step(&set, s));
        let text = self.spec().format_symbols(word);
        match idx.labels_of(&set).as_slice() {
            [] => Err(Error::Validation(format!("`{text}` is not an init word"))),
            [e] => Ok(InitWord { word: word.to_vec(), entry: *e }),
            labels => {
                let names: Vec<&str> = labels.iter().map(|&q| self.state_name(q)).collect();
                Err(Error::AmbiguousEntry(format!("{text} -> {}", names.join(", "))))
            }
        }
    }

    /// The entry configuration for an accepted init word.
    pub fn entry_configuration(&self, init: &InitWord) -> Configuration {
        Configuration { state: init.entry, check: init.word.clone(), push: Vec::new() }
    }
}
