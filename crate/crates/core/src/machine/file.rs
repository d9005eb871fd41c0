//! JSON machine files.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{
    CspdaSpec, InitAccept, InitAutomaton, InitEdge, Observation, StackOp, StateDescriptor, StateId, StateKind,
    StepAction, Symbol, Transition, BOTTOM,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InputAlphabetEntry {
    pub symbols: Vec<String>,
    pub inverse_of: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StateEntry {
    pub id: String,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OpEntry {
    Push(String),
    #[serde(untagged)]
    Simple(SimpleOp),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SimpleOp {
    Pop,
    Stay,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TransitionEntry {
    pub from: String,
    #[serde(default)]
    pub input: Option<String>,
    pub push_top: String,
    pub check_cell: String,
    pub to: String,
    pub op: OpEntry,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeEntry {
    pub from: String,
    pub symbol: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AcceptEntry {
    pub state: String,
    pub entry_state: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InitEntry {
    pub states: Vec<String>,
    pub start: String,
    pub edges: Vec<EdgeEntry>,
    pub accepting: Vec<AcceptEntry>,
}

/// Serialized machine description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub input_alphabet: InputAlphabetEntry,
    pub check_alphabet: Vec<String>,
    pub push_alphabet: Vec<String>,
    pub pad_symbol: String,
    pub states: Vec<StateEntry>,
    pub transitions: Vec<TransitionEntry>,
    pub init_automaton: InitEntry,
}

impl MachineFile {
    pub fn from_spec(spec: &CspdaSpec) -> Self {
        let name = |s: Symbol| spec.symbol_name(s).to_string();
        let cell = |s: Option<Symbol>| s.map_or(BOTTOM.to_string(), name);
        let state = |q: StateId| spec.states[q.index()].name.clone();
        MachineFile {
            input_alphabet: InputAlphabetEntry {
                symbols: spec.input_alphabet.iter().map(|&s| name(s)).collect(),
                inverse_of: spec.inverse_of.iter().map(|&(a, b)| (name(a), name(b))).collect(),
            },
            check_alphabet: spec.check_alphabet.iter().map(|&s| name(s)).collect(),
            push_alphabet: spec.push_alphabet.iter().map(|&s| name(s)).collect(),
            pad_symbol: name(spec.pad),
            states: spec
                .states
                .iter()
                .map(|s| StateEntry { id: s.name.clone(), kind: s.kind, role: s.role.clone() })
                .collect(),
            transitions: spec
                .transitions
                .iter()
                .map(|t| TransitionEntry {
                    from: state(t.from),
                    input: t.input.map(name),
                    push_top: cell(t.observation.push),
                    check_cell: cell(t.observation.check),
                    to: state(t.action.next),
                    op: match t.action.op {
                        StackOp::Push(g) => OpEntry::Push(name(g)),
                        StackOp::Pop => OpEntry::Simple(SimpleOp::Pop),
                        StackOp::Stay => OpEntry::Simple(SimpleOp::Stay),
                    },
                })
                .collect(),
            init_automaton: InitEntry {
                states: spec.init.states.clone(),
                start: spec.init.states[spec.init.start].clone(),
                edges: spec
                    .init
                    .edges
                    .iter()
                    .map(|e| EdgeEntry {
                        from: spec.init.states[e.from].clone(),
                        symbol: name(e.symbol),
                        to: spec.init.states[e.to].clone(),
                    })
                    .collect(),
                accepting: spec
                    .init
                    .accepting
                    .iter()
                    .map(|a| AcceptEntry { state: spec.init.states[a.state].clone(), entry_state: state(a.entry) })
                    .collect(),
            },
        }
    }

    pub fn to_spec(&self) -> Result<CspdaSpec> {
        let mut symbols: Vec<String> = Vec::new();
        let mut lookup: FxHashMap<String, Symbol> = FxHashMap::default();
        let all = self
            .input_alphabet
            .symbols
            .iter()
            .chain(&self.check_alphabet)
            .chain(&self.push_alphabet)
            .chain(std::iter::once(&self.pad_symbol));
        for s in all {
            if s == BOTTOM {
                return Err(Error::Schema(format!("`{BOTTOM}` is reserved and cannot be an alphabet symbol")));
            }
            if !lookup.contains_key(s) {
                lookup.insert(s.clone(), Symbol(symbols.len() as u32));
                symbols.push(s.clone());
            }
        }
        let sym = |s: &str, field: &str| {
            lookup.get(s).copied().ok_or_else(|| Error::Schema(format!("{field}: unknown symbol `{s}`")))
        };
        let cell = |s: &str, field: &str| if s == BOTTOM { Ok(None) } else { sym(s, field).map(Some) };
        let mut state_ids: FxHashMap<&str, StateId> = FxHashMap::default();
        for (i, s) in self.states.iter().enumerate() {
            if state_ids.insert(&s.id, StateId(i as u32)).is_some() {
                return Err(Error::Schema(format!("states: duplicate id `{}`", s.id)));
            }
        }
        let state = |s: &str, field: &str| {
            state_ids.get(s).copied().ok_or_else(|| Error::Schema(format!("{field}: unknown state `{s}`")))
        };
        let syms = |v: &[String], field: &str| v.iter().map(|s| sym(s, field)).collect::<Result<Vec<_>>>();

        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let op = match &t.op {
                OpEntry::Push(g) => StackOp::Push(sym(g, "transitions.op.push")?),
                OpEntry::Simple(SimpleOp::Pop) => StackOp::Pop,
                OpEntry::Simple(SimpleOp::Stay) => StackOp::Stay,
            };
            transitions.push(Transition {
                from: state(&t.from, "transitions.from")?,
                input: t.input.as_deref().map(|a| sym(a, "transitions.input")).transpose()?,
                observation: Observation {
                    push: cell(&t.push_top, "transitions.push_top")?,
                    check: cell(&t.check_cell, "transitions.check_cell")?,
                },
                action: StepAction { next: state(&t.to, "transitions.to")?, op },
            });
        }

        let ia = &self.init_automaton;
        let init_state = |s: &str, field: &str| {
            ia.states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| Error::Schema(format!("{field}: unknown init state `{s}`")))
        };
        let init = InitAutomaton {
            states: ia.states.clone(),
            start: init_state(&ia.start, "init_automaton.start")?,
            edges: ia
                .edges
                .iter()
                .map(|e| {
                    Ok(InitEdge {
                        from: init_state(&e.from, "init_automaton.edges.from")?,
                        symbol: sym(&e.symbol, "init_automaton.edges.symbol")?,
                        to: init_state(&e.to, "init_automaton.edges.to")?,
                    })
                })
                .collect::<Result<_>>()?,
            accepting: ia
                .accepting
                .iter()
                .map(|a| {
                    Ok(InitAccept {
                        state: init_state(&a.state, "init_automaton.accepting.state")?,
                        entry: state(&a.entry_state, "init_automaton.accepting.entry_state")?,
                    })
                })
                .collect::<Result<_>>()?,
        };

        Ok(CspdaSpec {
            input_alphabet: syms(&self.input_alphabet.symbols, "input_alphabet.symbols")?,
            inverse_of: self
                .input_alphabet
                .inverse_of
                .iter()
                .map(|(a, b)| Ok((sym(a, "input_alphabet.inverse_of")?, sym(b, "input_alphabet.inverse_of")?)))
                .collect::<Result<_>>()?,
            check_alphabet: syms(&self.check_alphabet, "check_alphabet")?,
            push_alphabet: syms(&self.push_alphabet, "push_alphabet")?,
            pad: sym(&self.pad_symbol, "pad_symbol")?,
            states: self
                .states
                .iter()
                .map(|s| StateDescriptor { name: s.id.clone(), kind: s.kind, role: s.role.clone() })
                .collect(),
            transitions,
            init,
            symbols,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("machine files serialize")
    }
}
