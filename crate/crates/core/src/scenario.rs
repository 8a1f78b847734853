//! Execution scenarios and the prefix trees built from them.
//!
//! Every tree starts with an auxiliary root carrying ⟨ε, 0…0⟩, so all
//! scenarios share a common prefix. Node ids are assigned in insertion order
//! and never change, which lets the encoder allocate SAT variables for new
//! nodes only.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::automaton::{Automaton, InputAction, OutputAction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario {scenario}, element {element}: output {found} conflicts with {existing} recorded for the same input prefix")]
    OutputConflict { scenario: usize, element: usize, existing: String, found: String },
    #[error("scenario {scenario}, element {element}: ε output must keep the previous output values")]
    PassiveOutputChanged { scenario: usize, element: usize },
    #[error("scenario {scenario}, element {element}: action does not match the alphabet ({reason})")]
    Alphabet { scenario: usize, element: usize, reason: String },
    #[error("loop start {start} is outside a scenario of length {len}")]
    LoopStart { start: usize, len: usize },
    #[error("no scenarios given")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScenarioElement {
    pub input: InputAction,
    pub output: OutputAction,
}

impl ScenarioElement {
    pub fn new(input: InputAction, output: OutputAction) -> Self {
        Self { input, output }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Scenario {
    pub elements: Vec<ScenarioElement>,
}

impl Scenario {
    pub fn new(elements: Vec<ScenarioElement>) -> Self {
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// A scenario describing behavior the machine must not have.
///
/// `loop_start` (1-based) marks a lasso: the configuration after the last
/// element equals the one after element `loop_start`, and the elements in
/// between repeat forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NegativeScenario {
    pub scenario: Scenario,
    pub loop_start: Option<usize>,
}

impl NegativeScenario {
    /// Whether `automaton` reproduces this behavior: it emits every recorded
    /// output action and, for a lasso, is back in the same configuration
    /// (state and outputs) at the loop end as right after the loop start.
    pub fn is_exhibited_by(&self, automaton: &Automaton) -> bool {
        let mut state = 0;
        let mut outputs = vec![false; automaton.alphabet().num_outputs()];
        let mut at_loop_start = None;
        for (i, element) in self.scenario.elements.iter().enumerate() {
            let (next, out) = automaton.step_unchecked(state, &outputs, &element.input);
            if out != element.output {
                return false;
            }
            state = next;
            outputs = out.output;
            if self.loop_start == Some(i + 1) {
                at_loop_start = Some((state, outputs.clone()));
            }
        }
        match self.loop_start {
            None => true,
            Some(_) => at_loop_start == Some((state, outputs)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    /// Undefined (`None`) only at the root.
    pub input: Option<InputAction>,
    pub output: OutputAction,
    children: Vec<usize>,
}

impl TreeNode {
    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }

    pub fn is_active(&self) -> bool {
        !self.is_root() && self.output.event.is_some()
    }

    pub fn is_passive(&self) -> bool {
        !self.is_root() && self.output.event.is_none()
    }

    pub fn children(&self) -> &[usize] {
        &self.children
    }
}

/// Prefix tree over input actions; used directly for positive scenarios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTree {
    nodes: Vec<TreeNode>,
    inputs: Vec<Vec<bool>>,
    input_index: HashMap<Vec<bool>, usize>,
    num_inputs: usize,
    num_outputs: usize,
    num_input_events: usize,
    num_output_events: usize,
    /// Allow siblings with equal inputs but different outputs.
    branch_on_output: bool,
}

impl ScenarioTree {
    pub fn new(num_input_events: usize, num_output_events: usize, num_inputs: usize, num_outputs: usize) -> Self {
        let root =
            TreeNode { parent: None, input: None, output: OutputAction::silent(num_outputs), children: Vec::new() };
        Self {
            nodes: vec![root],
            inputs: Vec::new(),
            input_index: HashMap::new(),
            num_inputs,
            num_outputs,
            num_input_events,
            num_output_events,
            branch_on_output: false,
        }
    }

    /// Child of `node` reached by `action`; in a branching tree the first one.
    pub fn child(&self, node: usize, action: &InputAction) -> Option<usize> {
        self.nodes[node].children.iter().copied().find(|&c| self.nodes[c].input.as_ref() == Some(action))
    }

    fn child_exact(&self, node: usize, element: &ScenarioElement) -> Option<usize> {
        self.nodes[node]
            .children
            .iter()
            .copied()
            .find(|&c| self.nodes[c].input.as_ref() == Some(&element.input) && self.nodes[c].output == element.output)
    }

    pub fn for_alphabet(alphabet: &crate::automaton::Alphabet) -> Self {
        Self::new(
            alphabet.input_events.len(),
            alphabet.output_events.len(),
            alphabet.num_inputs(),
            alphabet.num_outputs(),
        )
    }

    /// Merge all scenarios into one positive tree.
    pub fn build(alphabet: &crate::automaton::Alphabet, scenarios: &[Scenario]) -> Result<Self, ScenarioError> {
        if scenarios.is_empty() {
            return Err(ScenarioError::Empty);
        }
        let mut tree = Self::for_alphabet(alphabet);
        for (i, s) in scenarios.iter().enumerate() {
            tree.add_indexed(i, s)?;
        }
        Ok(tree)
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distinct inputs seen on edges, in first-seen order.
    pub fn inputs(&self) -> &[Vec<bool>] {
        &self.inputs
    }

    pub fn input_id(&self, input: &[bool]) -> Option<usize> {
        self.input_index.get(input).copied()
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].is_active())
    }

    pub fn passive_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].is_passive())
    }

    /// Add one scenario; returns the ids of nodes created by it.
    pub fn add(&mut self, scenario: &Scenario) -> Result<Vec<usize>, ScenarioError> {
        self.add_indexed(0, scenario)
    }

    fn check_element(&self, scenario: usize, element: usize, e: &ScenarioElement) -> Result<(), ScenarioError> {
        let bad = |reason: String| ScenarioError::Alphabet { scenario, element, reason };
        if e.input.event >= self.num_input_events {
            return Err(bad(format!("input event #{}", e.input.event)));
        }
        if e.input.input.len() != self.num_inputs {
            return Err(bad(format!("{} input values", e.input.input.len())));
        }
        if let Some(o) = e.output.event {
            if o >= self.num_output_events {
                return Err(bad(format!("output event #{o}")));
            }
        }
        if e.output.output.len() != self.num_outputs {
            return Err(bad(format!("{} output values", e.output.output.len())));
        }
        Ok(())
    }

    fn add_indexed(&mut self, index: usize, scenario: &Scenario) -> Result<Vec<usize>, ScenarioError> {
        // Validate the whole path before touching the tree so a failed merge
        // leaves it unchanged.
        let mut current = 0;
        let mut prev_out = self.nodes[0].output.output.clone();
        let mut existing_depth = 0;
        let mut diverged = false;
        for (i, e) in scenario.elements.iter().enumerate() {
            self.check_element(index, i + 1, e)?;
            if e.output.event.is_none() && e.output.output != prev_out {
                return Err(ScenarioError::PassiveOutputChanged { scenario: index, element: i + 1 });
            }
            prev_out = e.output.output.clone();
            if diverged {
                continue;
            }
            let found =
                if self.branch_on_output { self.child_exact(current, e) } else { self.child(current, &e.input) };
            match found {
                Some(child) => {
                    if self.nodes[child].output != e.output {
                        return Err(ScenarioError::OutputConflict {
                            scenario: index,
                            element: i + 1,
                            existing: format!("{:?}", self.nodes[child].output),
                            found: format!("{:?}", e.output),
                        });
                    }
                    current = child;
                    existing_depth = i + 1;
                }
                None => diverged = true,
            }
        }
        let mut created = Vec::new();
        for e in &scenario.elements[existing_depth..] {
            let id = self.nodes.len();
            self.nodes.push(TreeNode {
                parent: Some(current),
                input: Some(e.input.clone()),
                output: e.output.clone(),
                children: Vec::new(),
            });
            self.nodes[current].children.push(id);
            if !self.input_index.contains_key(&e.input.input) {
                self.input_index.insert(e.input.input.clone(), self.inputs.len());
                self.inputs.push(e.input.input.clone());
            }
            created.push(id);
            current = id;
        }
        Ok(created)
    }

    /// Node reached by following `scenario` from the root, if the whole
    /// path exists with matching outputs.
    pub fn follow(&self, scenario: &Scenario) -> Option<usize> {
        let mut current = 0;
        for e in &scenario.elements {
            current = self.child_exact(current, e)?;
        }
        Some(current)
    }

    /// Every scenario is reconstructible as a root-to-node path.
    pub fn replay_check(&self, scenarios: &[Scenario]) -> bool {
        scenarios.iter().all(|s| self.follow(s).is_some())
    }
}

/// What a call to [`NegativeTree::add`] changed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NegativeUpdate {
    pub new_nodes: Vec<usize>,
    /// (loop end, loop start) pairs not present before.
    pub new_back_edges: Vec<(usize, usize)>,
    pub new_ends: Vec<usize>,
}

impl NegativeUpdate {
    pub fn is_empty(&self) -> bool {
        self.new_nodes.is_empty() && self.new_back_edges.is_empty() && self.new_ends.is_empty()
    }
}

/// Prefix tree of negative scenarios plus lasso back edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeTree {
    tree: ScenarioTree,
    loop_backs: Vec<BTreeSet<usize>>,
    loopless_ends: BTreeSet<usize>,
    scenarios: Vec<NegativeScenario>,
}

impl NegativeTree {
    pub fn for_alphabet(alphabet: &crate::automaton::Alphabet) -> Self {
        let mut tree = ScenarioTree::for_alphabet(alphabet);
        tree.branch_on_output = true;
        Self { tree, loop_backs: vec![BTreeSet::new()], loopless_ends: BTreeSet::new(), scenarios: Vec::new() }
    }

    pub fn tree(&self) -> &ScenarioTree {
        &self.tree
    }

    pub fn loop_backs(&self, node: usize) -> &BTreeSet<usize> {
        &self.loop_backs[node]
    }

    pub fn loopless_ends(&self) -> &BTreeSet<usize> {
        &self.loopless_ends
    }

    pub fn scenarios(&self) -> &[NegativeScenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Merge a negative scenario. `loop_start` is 1-based.
    pub fn add(&mut self, scenario: &Scenario, loop_start: Option<usize>) -> Result<NegativeUpdate, ScenarioError> {
        if scenario.is_empty() {
            return Err(ScenarioError::LoopStart { start: loop_start.unwrap_or(0), len: 0 });
        }
        if let Some(start) = loop_start {
            if start == 0 || start > scenario.len() {
                return Err(ScenarioError::LoopStart { start, len: scenario.len() });
            }
        }
        let index = self.scenarios.len();
        let new_nodes = self.tree.add_indexed(index, scenario)?;
        self.loop_backs.resize(self.tree.len(), BTreeSet::new());

        // Path of node ids for this scenario (element i -> path[i]).
        let mut path = Vec::with_capacity(scenario.len());
        let mut current = 0;
        for e in &scenario.elements {
            current = self.tree.child_exact(current, e).expect("just merged");
            path.push(current);
        }
        let last = *path.last().expect("nonempty");
        let mut update = NegativeUpdate { new_nodes, ..Default::default() };
        match loop_start {
            Some(start) => {
                let target = path[start - 1];
                if self.loop_backs[last].insert(target) {
                    update.new_back_edges.push((last, target));
                }
            }
            None => {
                if self.loopless_ends.insert(last) {
                    update.new_ends.push(last);
                }
            }
        }
        let negative = NegativeScenario { scenario: scenario.clone(), loop_start };
        if !self.scenarios.contains(&negative) {
            self.scenarios.push(negative);
        }
        Ok(update)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Alphabet;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn el(input: &str, event: Option<usize>, out: &str) -> ScenarioElement {
        ScenarioElement::new(InputAction::new(0, bits(input)), OutputAction::new(event, bits(out)))
    }

    const A: Option<usize> = Some(0);
    const B: Option<usize> = Some(1);

    fn three_traces() -> Vec<Scenario> {
        vec![
            Scenario::new(vec![el("00", None, "0"), el("01", B, "1"), el("00", None, "1"), el("01", B, "0")]),
            Scenario::new(vec![el("00", None, "0"), el("10", A, "0"), el("00", None, "0"), el("01", B, "1")]),
            Scenario::new(vec![el("00", None, "0"), el("10", A, "0"), el("10", A, "0")]),
        ]
    }

    fn alphabet() -> Alphabet {
        Alphabet::with_counts(&["R"], &["A", "B"], 2, 1).unwrap()
    }

    #[test]
    fn worked_example_tree_shape() {
        let tree = ScenarioTree::build(&alphabet(), &three_traces()).unwrap();
        assert_eq!(tree.len(), 9);
        assert_eq!(tree.active_nodes().count(), 5);
        assert_eq!(tree.passive_nodes().count(), 3);
        assert_eq!(tree.inputs(), &[bits("00"), bits("01"), bits("10")]);
        assert!(tree.replay_check(&three_traces()));
    }

    #[test]
    fn single_scenario_and_idempotent_merge() {
        let s1 = three_traces()[0].clone();
        let tree = ScenarioTree::build(&alphabet(), &[s1.clone()]).unwrap();
        assert_eq!(tree.len(), s1.len() + 1);
        let twice = ScenarioTree::build(&alphabet(), &[s1.clone(), s1.clone()]).unwrap();
        assert_eq!(tree, twice);
        assert!(!tree.replay_check(&[three_traces()[1].clone()]));
    }

    #[test]
    fn conflicting_outputs_are_rejected() {
        let s = Scenario::new(vec![el("01", B, "1")]);
        let t = Scenario::new(vec![el("01", A, "1")]);
        let err = ScenarioTree::build(&alphabet(), &[s, t]).unwrap_err();
        assert!(matches!(err, ScenarioError::OutputConflict { scenario: 1, element: 1, .. }));
    }

    #[test]
    fn passive_elements_keep_outputs() {
        let s = Scenario::new(vec![el("01", B, "1"), el("00", None, "0")]);
        let err = ScenarioTree::build(&alphabet(), &[s]).unwrap_err();
        assert_eq!(err, ScenarioError::PassiveOutputChanged { scenario: 0, element: 2 });
    }

    fn r(x: &str) -> ScenarioElement {
        ScenarioElement::new(InputAction::new(0, bits(x)), OutputAction::new(A, vec![]))
    }

    #[test]
    fn negative_lasso_back_edge() {
        let alphabet = Alphabet::with_counts(&["R"], &["A", "B"], 1, 0).unwrap();
        let mut neg = NegativeTree::for_alphabet(&alphabet);
        let s2 = Scenario::new(vec![r("1"), r("1"), r("0"), r("1")]);
        let update = neg.add(&s2, Some(1)).unwrap();
        assert_eq!(update.new_nodes, vec![1, 2, 3, 4]);
        // ids are 0-based here: node 4 is the fifth node, node 1 the second
        assert_eq!(neg.loop_backs(4).iter().copied().collect::<Vec<_>>(), vec![1]);
        assert!(neg.add(&s2, Some(1)).unwrap().is_empty());
    }

    #[test]
    fn negative_loopless_end() {
        let alphabet = Alphabet::with_counts(&["R"], &["A", "B"], 1, 0).unwrap();
        let mut neg = NegativeTree::for_alphabet(&alphabet);
        let s1 = Scenario::new(vec![r("1"), r("1"), r("1")]);
        neg.add(&s1, None).unwrap();
        assert_eq!(neg.len(), 4);
        assert_eq!(neg.loopless_ends().iter().copied().collect::<Vec<_>>(), vec![3]);
        assert!(neg.add(&s1, None).unwrap().is_empty());
    }

    #[test]
    fn negative_tree_branches_on_outputs() {
        let mut neg = NegativeTree::for_alphabet(&alphabet());
        neg.add(&Scenario::new(vec![el("01", B, "1")]), None).unwrap();
        let update = neg.add(&Scenario::new(vec![el("01", A, "1")]), None).unwrap();
        assert_eq!(update.new_nodes, vec![2]);
        assert_eq!(neg.tree().node(0).children(), &[1, 2]);
        assert_eq!(neg.loopless_ends().len(), 2);
    }

    #[test]
    fn loop_start_out_of_range() {
        let alphabet = Alphabet::with_counts(&["R"], &["A"], 1, 0).unwrap();
        let mut neg = NegativeTree::for_alphabet(&alphabet);
        let s = Scenario::new(vec![r("1")]);
        assert!(neg.add(&s, Some(2)).is_err());
        assert!(neg.add(&s, Some(0)).is_err());
    }
}
