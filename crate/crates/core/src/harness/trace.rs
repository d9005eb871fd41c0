use serde::Serialize;

use crate::machine::{format_observation, InitWord, Machine, Observation, RunOutcome, StackOp, StateId, Symbol};

/// One step of a traced run. Event 0 is the entry configuration; event `i`
/// is the configuration after the `i`-th transition. The last event
/// carries the outcome.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: usize,
    /// State after the step.
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub observation: String,
    pub action: String,
    pub height: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
}

pub fn trace_run(machine: &Machine, init: &InitWord, w: &[Symbol]) -> Vec<TraceEvent> {
    let spec = machine.spec();
    let role = |q: StateId| spec.states[q.index()].role.clone();
    let entry = machine.entry_configuration(init);
    let mut events = vec![TraceEvent {
        step: 0,
        state: machine.state_name(entry.state).to_string(),
        input: None,
        observation: format_observation(spec, Observation::BOTTOM),
        action: "enter".into(),
        height: 0,
        annotation: role(entry.state),
        outcome: None,
    }];
    let (steps, outcome) = machine.trace_word(entry, w);
    for (i, s) in steps.iter().enumerate() {
        let action = match s.action.op {
            StackOp::Push(x) => format!("push {}", spec.symbol_name(x)),
            StackOp::Pop => "pop".into(),
            StackOp::Stay => "stay".into(),
        };
        events.push(TraceEvent {
            step: i + 1,
            state: machine.state_name(s.action.next).to_string(),
            input: s.input.map(|x| spec.symbol_name(x).to_string()),
            observation: format_observation(spec, s.observation),
            action,
            height: s.height_after,
            annotation: role(s.action.next),
            outcome: None,
        });
    }
    let last = events.last_mut().expect("entry event");
    last.outcome = Some(match outcome {
        RunOutcome::Reached(c) => format!("reached {:?}", machine.kind(c.state)),
        RunOutcome::Failed => "failed".into(),
        RunOutcome::Diverged(d) => format!("diverged: {d}"),
    });
    events
}
