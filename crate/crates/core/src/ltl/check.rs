use std::collections::{HashMap, VecDeque};

use crate::automaton::Automaton;
use crate::scenario::{NegativeScenario, Scenario, ScenarioElement};

use super::buchi::Buchi;
use super::formula::{Atom, Formula, RawAtom};
use super::plant::{ClosedLoop, Plant};
use super::{LtlError, VerifyError};

/// A parsed formula bound to an alphabet, keeping its source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtlProperty {
    pub text: String,
    pub formula: Formula<Atom>,
}

impl LtlProperty {
    pub fn parse(text: &str, alphabet: &crate::automaton::Alphabet) -> Result<Self, LtlError> {
        let formula = Formula::<RawAtom>::parse(text)?.bind(alphabet)?;
        Ok(Self { text: text.trim().to_string(), formula })
    }

    /// `ψ` when the property is `G ψ` with propositional `ψ`.
    pub fn invariant(&self) -> Option<&Formula<Atom>> {
        match &self.formula {
            Formula::Globally(p) if p.is_propositional() => Some(p),
            _ => None,
        }
    }
}

/// A behavior of the closed loop that violates one property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Index of the violated property in the list given to the verifier.
    pub property: usize,
    pub trace: Vec<ScenarioElement>,
    /// 1-based; the configuration after the last element equals the one
    /// after this element.
    pub loop_start: Option<usize>,
}

impl Counterexample {
    pub fn is_looping(&self) -> bool {
        self.loop_start.is_some()
    }

    pub fn to_negative(&self) -> NegativeScenario {
        NegativeScenario { scenario: Scenario::new(self.trace.clone()), loop_start: self.loop_start }
    }
}

pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    /// Largest number of product states explored per property.
    pub state_limit: usize,
}

impl Default for Verifier {
    fn default() -> Self {
        Self { state_limit: DEFAULT_STATE_LIMIT }
    }
}

impl Verifier {
    pub fn with_limit(state_limit: usize) -> Self {
        Self { state_limit }
    }

    /// One counterexample per violated property, in property order.
    pub fn verify(
        &self,
        automaton: &Automaton,
        plant: &Plant,
        properties: &[LtlProperty],
    ) -> Result<Vec<Counterexample>, VerifyError> {
        use rayon::prelude::*;
        let found: Result<Vec<_>, _> = properties
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                self.check(automaton, plant, p)
                    .map(|c| c.map(|(trace, loop_start)| Counterexample { property: i, trace, loop_start }))
            })
            .collect();
        Ok(found?.into_iter().flatten().collect())
    }

    /// Counterexample trace for one property, if it is violated.
    pub fn check(
        &self,
        automaton: &Automaton,
        plant: &Plant,
        property: &LtlProperty,
    ) -> Result<Option<(Vec<ScenarioElement>, Option<usize>)>, VerifyError> {
        let mut cl = ClosedLoop::new(automaton, plant);
        if let Some(p) = property.invariant() {
            return Ok(self.reach_violation(&mut cl, p)?.map(|t| (t, None)));
        }
        let buchi = Buchi::from_nnf(&Formula::not(property.formula.clone()).nnf());
        Product::new(&buchi, cl, self.state_limit).find_lasso()
    }

    /// Shortest path to a step where `invariant` fails.
    fn reach_violation(
        &self,
        cl: &mut ClosedLoop<'_>,
        invariant: &Formula<Atom>,
    ) -> Result<Option<Vec<ScenarioElement>>, VerifyError> {
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([0]);
        while let Some(id) = queue.pop_front() {
            if let Some(step) = cl.label(id) {
                if !invariant.eval_prop(&|a: &Atom| a.holds(&step.input, &step.output)) {
                    let mut path = vec![id];
                    let mut at = id;
                    while let Some(&p) = parent.get(&at) {
                        path.push(p);
                        at = p;
                    }
                    path.pop();
                    path.reverse();
                    return Ok(Some(path.iter().map(|&i| cl.label(i).expect("non-initial").clone()).collect()));
                }
            }
            for &next in cl.successors(id)?.to_vec().iter() {
                if next != 0 && !parent.contains_key(&next) {
                    parent.insert(next, id);
                    queue.push_back(next);
                }
            }
            if cl.len() > self.state_limit {
                return Err(VerifyError::StateSpaceExceeded { limit: self.state_limit });
            }
        }
        Ok(None)
    }
}

/// Product of the closed loop with a degeneralized automaton for the
/// negated property. A product state remembers whether the edge into it was
/// accepting.
struct Product<'a, 'b> {
    buchi: &'a Buchi<Atom>,
    closed_loop: ClosedLoop<'b>,
    limit: usize,
    states: Vec<PState>,
    ids: HashMap<PState, usize>,
    successors: Vec<Option<Vec<usize>>>,
    color: Vec<Color>,
    red: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct PState {
    config: usize,
    buchi: usize,
    level: usize,
    accepting: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Cyan,
    Blue,
}

impl<'a, 'b> Product<'a, 'b> {
    fn new(buchi: &'a Buchi<Atom>, closed_loop: ClosedLoop<'b>, limit: usize) -> Self {
        let init = PState { config: 0, buchi: buchi.initial, level: 0, accepting: false };
        Self {
            buchi,
            closed_loop,
            limit,
            states: vec![init],
            ids: HashMap::from([(init, 0)]),
            successors: vec![None],
            color: vec![Color::White],
            red: vec![false],
        }
    }

    fn successors(&mut self, id: usize) -> Result<Vec<usize>, VerifyError> {
        if let Some(s) = &self.successors[id] {
            return Ok(s.clone());
        }
        let s = self.states[id];
        let sets = self.buchi.acceptance_sets;
        let mut out = Vec::new();
        for next in self.closed_loop.successors(s.config)?.to_vec() {
            let step = self.closed_loop.label(next).expect("non-initial").clone();
            for edge in &self.buchi.edges[s.buchi] {
                if !edge.enabled(|a| a.holds(&step.input, &step.output)) {
                    continue;
                }
                let (level, accepting) = if sets == 0 {
                    (0, true)
                } else if edge.accepting[s.level] {
                    ((s.level + 1) % sets, s.level + 1 == sets)
                } else {
                    (s.level, false)
                };
                let t = PState { config: next, buchi: edge.target, level, accepting };
                let id = match self.ids.get(&t) {
                    Some(&id) => id,
                    None => {
                        if self.states.len() >= self.limit {
                            return Err(VerifyError::StateSpaceExceeded { limit: self.limit });
                        }
                        self.states.push(t);
                        self.successors.push(None);
                        self.color.push(Color::White);
                        self.red.push(false);
                        self.ids.insert(t, self.states.len() - 1);
                        self.states.len() - 1
                    }
                };
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        self.successors[id] = Some(out.clone());
        Ok(out)
    }

    /// Nested depth-first search with early cycle detection on the blue
    /// stack. Returns the trace and its 1-based loop start.
    fn find_lasso(&mut self) -> Result<Option<(Vec<ScenarioElement>, Option<usize>)>, VerifyError> {
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        self.color[0] = Color::Cyan;
        let first = self.successors(0)?;
        stack.push((0, first, 0));
        while let Some(frame) = stack.last_mut() {
            let (s, ref succ, ref mut next) = *frame;
            if *next < succ.len() {
                let t = succ[*next];
                *next += 1;
                let accepting = self.states[s].accepting || self.states[t].accepting;
                if self.color[t] == Color::Cyan && accepting {
                    let path: Vec<usize> = stack.iter().map(|f| f.0).collect();
                    return Ok(Some(self.lasso(&path, &[], t)));
                }
                if self.color[t] == Color::White && !self.red[t] {
                    self.color[t] = Color::Cyan;
                    let succ = self.successors(t)?;
                    stack.push((t, succ, 0));
                }
                continue;
            }
            if self.states[s].accepting {
                if let Some((red_path, target)) = self.red_search(s)? {
                    let path: Vec<usize> = stack.iter().map(|f| f.0).collect();
                    return Ok(Some(self.lasso(&path, &red_path, target)));
                }
            }
            self.color[s] = Color::Blue;
            stack.pop();
        }
        Ok(None)
    }

    /// Search from `seed` for a cyan state. Returns the states visited after
    /// the seed (excluding the cyan target) and the target.
    fn red_search(&mut self, seed: usize) -> Result<Option<(Vec<usize>, usize)>, VerifyError> {
        let first = self.successors(seed)?;
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(seed, first, 0)];
        while let Some(frame) = stack.last_mut() {
            let (_, ref succ, ref mut next) = *frame;
            if *next >= succ.len() {
                stack.pop();
                continue;
            }
            let t = succ[*next];
            *next += 1;
            if self.color[t] == Color::Cyan {
                let path = stack.iter().skip(1).map(|f| f.0).collect();
                return Ok(Some((path, t)));
            }
            if !self.red[t] {
                self.red[t] = true;
                let succ = self.successors(t)?;
                stack.push((t, succ, 0));
            }
        }
        Ok(None)
    }

    fn lasso(&self, blue: &[usize], red: &[usize], target: usize) -> (Vec<ScenarioElement>, Option<usize>) {
        let loop_start = blue.iter().position(|&s| s == target).expect("cycle closes on the stack");
        let trace = blue[1..]
            .iter()
            .chain(red)
            .chain(std::iter::once(&target))
            .map(|&s| self.closed_loop.label(self.states[s].config).expect("non-initial").clone())
            .collect();
        (trace, Some(loop_start))
    }
}
