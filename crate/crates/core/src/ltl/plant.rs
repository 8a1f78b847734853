//! Environment models and their closed-loop composition with a controller.

use std::collections::HashMap;

use crate::automaton::{Alphabet, Automaton, InputAction, OutputAction};
use crate::scenario::ScenarioElement;

use super::VerifyError;

/// Which controller outputs a plant rule reacts to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPattern {
    /// `None` matches any event; `Some(None)` matches ε.
    pub event: Option<Option<usize>>,
    /// `None` matches any output values.
    pub output: Option<Vec<bool>>,
}

impl OutputPattern {
    pub const ANY: Self = Self { event: None, output: None };

    pub fn matches(&self, action: &OutputAction) -> bool {
        self.event.is_none_or(|e| e == action.event) && self.output.as_ref().is_none_or(|o| *o == action.output)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantRule {
    pub from: usize,
    pub on: OutputPattern,
    pub to: usize,
    pub emit: InputAction,
}

/// Finite nondeterministic plant given as a rule table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitPlant {
    pub states: Vec<String>,
    pub initial: usize,
    pub rules: Vec<PlantRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plant {
    /// One state that may send any input action at any time.
    Free,
    Explicit(ExplicitPlant),
}

impl Plant {
    pub fn initial(&self) -> usize {
        match self {
            Plant::Free => 0,
            Plant::Explicit(p) => p.initial,
        }
    }

    pub fn num_states(&self) -> usize {
        match self {
            Plant::Free => 1,
            Plant::Explicit(p) => p.states.len(),
        }
    }

    /// Every (next plant state, input action) the plant may produce after
    /// seeing `output` in `state`.
    pub fn responses(
        &self,
        alphabet: &Alphabet,
        state: usize,
        output: &OutputAction,
    ) -> Result<Vec<(usize, InputAction)>, VerifyError> {
        match self {
            Plant::Free => Ok(all_input_actions(alphabet).into_iter().map(|a| (0, a)).collect()),
            Plant::Explicit(p) => {
                let r: Vec<_> = p
                    .rules
                    .iter()
                    .filter(|r| r.from == state && r.on.matches(output))
                    .map(|r| (r.to, r.emit.clone()))
                    .collect();
                if r.is_empty() {
                    return Err(VerifyError::PlantDeadlock {
                        state: p.states[state].clone(),
                        output: format!("{}{:?}", alphabet.output_event_name(output.event), output.output),
                    });
                }
                Ok(r)
            }
        }
    }
}

/// All input actions, per event from the all-true valuation down to the
/// all-false one.
pub fn all_input_actions(alphabet: &Alphabet) -> Vec<InputAction> {
    let n = alphabet.num_inputs();
    let mut out = Vec::with_capacity(alphabet.input_events.len() << n);
    for e in 0..alphabet.input_events.len() {
        for v in (0..1usize << n).rev() {
            out.push(InputAction::new(e, (0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect()));
        }
    }
    out
}

/// Configuration of controller plus plant, tagged with the step that led
/// to it (`None` only before the first step).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub plant: usize,
    pub step: Option<ScenarioElement>,
}

impl Config {
    pub fn outputs<'a>(&'a self, zeros: &'a [bool]) -> &'a [bool] {
        self.step.as_ref().map_or(zeros, |s| &s.output.output)
    }
}

/// Lazily explored composition of a controller with a plant. Configurations
/// are numbered in discovery order; 0 is the initial one.
pub struct ClosedLoop<'a> {
    automaton: &'a Automaton,
    plant: &'a Plant,
    zeros: Vec<bool>,
    configs: Vec<Config>,
    ids: HashMap<Config, usize>,
    successors: Vec<Option<Vec<usize>>>,
}

impl<'a> ClosedLoop<'a> {
    pub fn new(automaton: &'a Automaton, plant: &'a Plant) -> Self {
        let init = Config { state: 0, plant: plant.initial(), step: None };
        Self {
            automaton,
            plant,
            zeros: vec![false; automaton.alphabet().num_outputs()],
            configs: vec![init.clone()],
            ids: HashMap::from([(init, 0)]),
            successors: vec![None],
        }
    }

    pub fn config(&self, id: usize) -> &Config {
        &self.configs[id]
    }

    /// Step taken into configuration `id`; `None` for the initial one.
    pub fn label(&self, id: usize) -> Option<&ScenarioElement> {
        self.configs[id].step.as_ref()
    }

    /// Configurations discovered so far.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn successors(&mut self, id: usize) -> Result<&[usize], VerifyError> {
        if self.successors[id].is_none() {
            let c = self.configs[id].clone();
            let outputs = c.outputs(&self.zeros).to_vec();
            let seen = match &c.step {
                Some(s) => s.output.clone(),
                None => OutputAction::silent(self.zeros.len()),
            };
            let mut next = Vec::new();
            for (plant, input) in self.plant.responses(self.automaton.alphabet(), c.plant, &seen)? {
                let (state, output) = self.automaton.step(c.state, &outputs, &input).map_err(VerifyError::Model)?;
                let cfg = Config { state, plant, step: Some(ScenarioElement::new(input, output)) };
                let id = match self.ids.get(&cfg) {
                    Some(&id) => id,
                    None => {
                        self.configs.push(cfg.clone());
                        self.successors.push(None);
                        self.ids.insert(cfg, self.configs.len() - 1);
                        self.configs.len() - 1
                    }
                };
                if !next.contains(&id) {
                    next.push(id);
                }
            }
            self.successors[id] = Some(next);
        }
        Ok(self.successors[id].as_deref().expect("just filled"))
    }

    /// Explore everything reachable; returns the number of configurations.
    pub fn explore_all(&mut self) -> Result<usize, VerifyError> {
        let mut i = 0;
        while i < self.configs.len() {
            self.successors(i)?;
            i += 1;
        }
        Ok(self.configs.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Algorithm, Guard, State, Transition};

    fn toggler() -> Automaton {
        let a = Alphabet::with_counts(&["R"], &["A"], 1, 1).unwrap();
        let t = |dest| Transition { dest, event: 0, guard: Guard::var(0) };
        let s = |tr| State { output_event: Some(0), algorithm: Algorithm::flip(1), transitions: vec![tr] };
        Automaton::new(a, vec![s(t(1)), s(t(0))]).unwrap()
    }

    #[test]
    fn free_plant_counts() {
        let m = toggler();
        let mut cl = ClosedLoop::new(&m, &Plant::Free);
        assert_eq!(cl.successors(0).unwrap().len(), 2);
        let n = cl.explore_all().unwrap();
        // per (state, outputs) pair at most one config per input label
        assert!(n - 1 <= 2 * 2 * 2, "{n}");
    }

    #[test]
    fn deterministic_plant_gives_a_lasso() {
        let m = toggler();
        let plant = Plant::Explicit(ExplicitPlant {
            states: vec!["p".into()],
            initial: 0,
            rules: vec![PlantRule { from: 0, on: OutputPattern::ANY, to: 0, emit: InputAction::new(0, vec![true]) }],
        });
        let mut cl = ClosedLoop::new(&m, &plant);
        cl.explore_all().unwrap();
        for id in 0..cl.len() {
            assert_eq!(cl.successors(id).unwrap().len(), 1);
        }
    }

    #[test]
    fn plant_without_response_is_reported() {
        let m = toggler();
        let plant = Plant::Explicit(ExplicitPlant { states: vec!["p".into()], initial: 0, rules: vec![] });
        assert!(matches!(ClosedLoop::new(&m, &plant).successors(0), Err(VerifyError::PlantDeadlock { .. })));
    }
}
