//! Executable semantics of guarded Moore machines.
//!
//! A machine reacts to input actions (an input event plus a vector of
//! Boolean input values). Each state owns a priority-ordered list of
//! transitions; the first transition whose event matches and whose guard
//! holds is taken. Taking a transition emits the destination state's output
//! event and rewrites every output variable through the destination's
//! algorithm. When nothing fires the machine ignores the action: it stays
//! put, emits ε and leaves the outputs alone.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::scenario::Scenario;

/// Structural errors in alphabets, guards and machines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{kind} name `{name}` is declared twice")]
    DuplicateName { kind: &'static str, name: String },
    #[error("`{0}` is reserved for the empty event and cannot be declared")]
    ReservedName(String),
    #[error("alphabet needs at least one {0}")]
    EmptyCollection(&'static str),
    #[error("guard refers to input variable #{index} but only {count} exist")]
    TerminalOutOfRange { index: usize, count: usize },
    #[error("input vector has length {got}, expected {expected}")]
    InputLength { got: usize, expected: usize },
    #[error("state {state}: transition {index} targets missing state {dest}")]
    MissingState { state: usize, index: usize, dest: usize },
    #[error("state {state}: unknown {kind} event #{event}")]
    UnknownEvent { state: usize, kind: &'static str, event: usize },
    #[error("state {state}: algorithm covers {got} output variables, expected {expected}")]
    AlgorithmWidth { state: usize, got: usize, expected: usize },
    #[error("machine has no states")]
    NoStates,
}

/// Names of input/output events and variables.
///
/// Events are referred to by index everywhere else; ε is `None` on the
/// output side and never appears in these lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub input_events: Vec<String>,
    pub output_events: Vec<String>,
    pub input_vars: Vec<String>,
    pub output_vars: Vec<String>,
}

fn check_names(kind: &'static str, names: &[String]) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for name in names {
        if name.is_empty() || name == "." || name == "ε" || name == "eps" {
            return Err(ModelError::ReservedName(name.clone()));
        }
        if !seen.insert(name.as_str()) {
            return Err(ModelError::DuplicateName { kind, name: name.clone() });
        }
    }
    Ok(())
}

impl Alphabet {
    pub fn new(
        input_events: Vec<String>,
        output_events: Vec<String>,
        input_vars: Vec<String>,
        output_vars: Vec<String>,
    ) -> Result<Self, ModelError> {
        if input_events.is_empty() {
            return Err(ModelError::EmptyCollection("input event"));
        }
        if input_vars.is_empty() {
            return Err(ModelError::EmptyCollection("input variable"));
        }
        check_names("input event", &input_events)?;
        check_names("output event", &output_events)?;
        check_names("input variable", &input_vars)?;
        check_names("output variable", &output_vars)?;
        Ok(Self { input_events, output_events, input_vars, output_vars })
    }

    /// Alphabet with events given by name and variables `x1..xn`, `z1..zm`.
    pub fn with_counts(
        input_events: &[&str],
        output_events: &[&str],
        inputs: usize,
        outputs: usize,
    ) -> Result<Self, ModelError> {
        Self::new(
            input_events.iter().map(|s| s.to_string()).collect(),
            output_events.iter().map(|s| s.to_string()).collect(),
            (1..=inputs).map(|i| format!("x{i}")).collect(),
            (1..=outputs).map(|i| format!("z{i}")).collect(),
        )
    }

    pub fn num_inputs(&self) -> usize {
        self.input_vars.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_vars.len()
    }

    pub fn input_event(&self, name: &str) -> Option<usize> {
        self.input_events.iter().position(|e| e == name)
    }

    pub fn output_event(&self, name: &str) -> Option<usize> {
        self.output_events.iter().position(|e| e == name)
    }

    pub fn output_event_name(&self, event: Option<usize>) -> &str {
        match event {
            Some(e) => &self.output_events[e],
            None => ".",
        }
    }
}

/// An input event together with the values of all input variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputAction {
    pub event: usize,
    pub input: Vec<bool>,
}

impl InputAction {
    pub fn new(event: usize, input: Vec<bool>) -> Self {
        Self { event, input }
    }
}

/// An output event (`None` is ε) together with all output values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutputAction {
    pub event: Option<usize>,
    pub output: Vec<bool>,
}

impl OutputAction {
    pub fn new(event: Option<usize>, output: Vec<bool>) -> Self {
        Self { event, output }
    }

    pub fn silent(width: usize) -> Self {
        Self { event: None, output: vec![false; width] }
    }
}

/// Parse tree of a guard condition. Binary operators are strictly binary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Var(usize),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn var(index: usize) -> Self {
        Guard::Var(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Guard) -> Self {
        Guard::Not(Box::new(inner))
    }

    pub fn and(left: Guard, right: Guard) -> Self {
        Guard::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Guard, right: Guard) -> Self {
        Guard::Or(Box::new(left), Box::new(right))
    }

    /// Right-nested conjunction of `parts`; `None` when empty.
    pub fn and_all(parts: Vec<Guard>) -> Option<Guard> {
        parts.into_iter().rev().reduce(|acc, g| Guard::and(g, acc))
    }

    /// Right-nested disjunction of `parts`; `None` when empty.
    pub fn or_all(parts: Vec<Guard>) -> Option<Guard> {
        parts.into_iter().rev().reduce(|acc, g| Guard::or(g, acc))
    }

    /// Number of parse-tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Guard::Var(_) => 1,
            Guard::Not(g) => 1 + g.size(),
            Guard::And(l, r) | Guard::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            Guard::Var(i) => *i,
            Guard::Not(g) => g.max_var(),
            Guard::And(l, r) | Guard::Or(l, r) => l.max_var().max(r.max_var()),
        }
    }

    pub fn eval(&self, input: &[bool]) -> Result<bool, ModelError> {
        let max = self.max_var();
        if max >= input.len() {
            return Err(ModelError::TerminalOutOfRange { index: max, count: input.len() });
        }
        Ok(self.holds(input))
    }

    /// Evaluation without the range check; callers guarantee the width.
    pub(crate) fn holds(&self, input: &[bool]) -> bool {
        match self {
            Guard::Var(i) => input[*i],
            Guard::Not(g) => !g.holds(input),
            Guard::And(l, r) => l.holds(input) && r.holds(input),
            Guard::Or(l, r) => l.holds(input) || r.holds(input),
        }
    }

    /// Infix rendering with the given variable names (`~`, `&`, `|`).
    pub fn display<'a>(&'a self, names: &'a [String]) -> GuardDisplay<'a> {
        GuardDisplay { guard: self, names }
    }
}

pub struct GuardDisplay<'a> {
    guard: &'a Guard,
    names: &'a [String],
}

impl GuardDisplay<'_> {
    fn write(&self, g: &Guard, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match g {
            Guard::Var(i) => match self.names.get(*i) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "x{}", i + 1),
            },
            Guard::Not(inner) => {
                write!(f, "~")?;
                self.operand(inner, f)
            }
            Guard::And(l, r) | Guard::Or(l, r) => {
                let op = if matches!(g, Guard::And(..)) { " & " } else { " | " };
                // Left operand of the same kind is parenthesized so that
                // re-parsing (right-associative) yields the same tree.
                self.binary_operand(g, l, f, true)?;
                write!(f, "{op}")?;
                self.binary_operand(g, r, f, false)
            }
        }
    }

    fn operand(&self, g: &Guard, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match g {
            Guard::Var(_) | Guard::Not(_) => self.write(g, f),
            _ => {
                write!(f, "(")?;
                self.write(g, f)?;
                write!(f, ")")
            }
        }
    }

    fn binary_operand(&self, parent: &Guard, child: &Guard, f: &mut fmt::Formatter<'_>, left: bool) -> fmt::Result {
        let same = std::mem::discriminant(parent) == std::mem::discriminant(child);
        let needs = match child {
            Guard::Var(_) | Guard::Not(_) => false,
            _ => !same || left,
        };
        if needs {
            write!(f, "(")?;
            self.write(child, f)?;
            write!(f, ")")
        } else {
            self.write(child, f)
        }
    }
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.guard, f)
    }
}

/// Per-variable output update: new value of `z` given its previous value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algorithm {
    pub when_false: Vec<bool>,
    pub when_true: Vec<bool>,
}

impl Algorithm {
    pub fn keep(width: usize) -> Self {
        Self { when_false: vec![false; width], when_true: vec![true; width] }
    }

    pub fn flip(width: usize) -> Self {
        Self { when_false: vec![true; width], when_true: vec![false; width] }
    }

    pub fn constant(width: usize, value: bool) -> Self {
        Self { when_false: vec![value; width], when_true: vec![value; width] }
    }

    pub fn width(&self) -> usize {
        self.when_false.len()
    }

    pub fn apply(&self, outputs: &[bool]) -> Vec<bool> {
        outputs.iter().enumerate().map(|(z, &old)| if old { self.when_true[z] } else { self.when_false[z] }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub dest: usize,
    pub event: usize,
    pub guard: Guard,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    pub output_event: Option<usize>,
    pub algorithm: Algorithm,
    /// Priority order: earlier transitions win.
    pub transitions: Vec<Transition>,
}

/// A guarded Moore machine. State 0 is the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Alphabet,
    states: Vec<State>,
}

impl Automaton {
    pub fn new(alphabet: Alphabet, states: Vec<State>) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        let width = alphabet.num_outputs();
        for (q, state) in states.iter().enumerate() {
            if let Some(e) = state.output_event {
                if e >= alphabet.output_events.len() {
                    return Err(ModelError::UnknownEvent { state: q, kind: "output", event: e });
                }
            }
            let alg = &state.algorithm;
            if alg.when_false.len() != width || alg.when_true.len() != width {
                return Err(ModelError::AlgorithmWidth {
                    state: q,
                    got: alg.when_false.len().min(alg.when_true.len()),
                    expected: width,
                });
            }
            for (k, t) in state.transitions.iter().enumerate() {
                if t.dest >= states.len() {
                    return Err(ModelError::MissingState { state: q, index: k, dest: t.dest });
                }
                if t.event >= alphabet.input_events.len() {
                    return Err(ModelError::UnknownEvent { state: q, kind: "input", event: t.event });
                }
                let max = t.guard.max_var();
                if max >= alphabet.num_inputs() {
                    return Err(ModelError::TerminalOutOfRange { index: max, count: alphabet.num_inputs() });
                }
            }
        }
        Ok(Self { alphabet, states })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Index of the transition of `state` that fires on `action`, if any.
    pub fn fired(&self, state: usize, action: &InputAction) -> Option<usize> {
        self.states[state].transitions.iter().position(|t| t.event == action.event && t.guard.holds(&action.input))
    }

    /// Process one input action.
    pub fn step(
        &self,
        state: usize,
        outputs: &[bool],
        action: &InputAction,
    ) -> Result<(usize, OutputAction), ModelError> {
        if action.input.len() != self.alphabet.num_inputs() {
            return Err(ModelError::InputLength { got: action.input.len(), expected: self.alphabet.num_inputs() });
        }
        Ok(self.step_unchecked(state, outputs, action))
    }

    pub(crate) fn step_unchecked(&self, state: usize, outputs: &[bool], action: &InputAction) -> (usize, OutputAction) {
        match self.fired(state, action) {
            Some(k) => {
                let dest = self.states[state].transitions[k].dest;
                let target = &self.states[dest];
                let output = target.algorithm.apply(outputs);
                (dest, OutputAction { event: target.output_event, output })
            }
            None => (state, OutputAction { event: None, output: outputs.to_vec() }),
        }
    }

    /// Replay from the initial state with all-false outputs. Returns the index
    /// of the first element whose output action differs, or `None` when the
    /// whole scenario is reproduced.
    pub fn first_mismatch(&self, scenario: &Scenario) -> Option<usize> {
        let mut state = 0;
        let mut outputs = vec![false; self.alphabet.num_outputs()];
        for (i, element) in scenario.elements.iter().enumerate() {
            if element.input.input.len() != self.alphabet.num_inputs() {
                return Some(i);
            }
            let (next, out) = self.step_unchecked(state, &outputs, &element.input);
            if out != element.output {
                return Some(i);
            }
            state = next;
            outputs = out.output;
        }
        None
    }

    pub fn satisfies(&self, scenario: &Scenario) -> bool {
        self.first_mismatch(scenario).is_none()
    }

    pub fn satisfies_all(&self, scenarios: &[Scenario]) -> bool {
        scenarios.iter().all(|s| self.satisfies(s))
    }

    /// Total number of parse-tree nodes over all guards (N).
    pub fn guard_complexity(&self) -> usize {
        self.states.iter().flat_map(|s| s.transitions.iter()).map(|t| t.guard.size()).sum()
    }

    /// Number of transitions (T).
    pub fn transition_count(&self) -> usize {
        self.states.iter().map(|s| s.transitions.len()).sum()
    }

    /// Largest single guard (lower bound on the P that can express it).
    pub fn max_guard_size(&self) -> usize {
        self.states.iter().flat_map(|s| s.transitions.iter()).map(|t| t.guard.size()).max().unwrap_or(0)
    }

    /// States reachable from the initial state through transitions.
    pub fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(q) = stack.pop() {
            for t in &self.states[q].transitions {
                if !seen[t.dest] {
                    seen[t.dest] = true;
                    stack.push(t.dest);
                }
            }
        }
        seen
    }
}
