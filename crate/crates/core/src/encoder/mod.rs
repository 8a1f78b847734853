//! CNF reduction from "a machine with C states satisfying these trees" to SAT.
//!
//! Every finite domain is a family of one-hot literals; index 0 always means
//! "absent" (null destination, ε event, no first-fired transition, unmapped
//! negative node). States are 0-based internally, so destination index
//! `q + 1` denotes state `q`.
//!
//! An [`Encoder`] owns its solver and can grow: new negative scenarios and
//! new tree inputs only add variables and clauses.

mod bfs;
mod cnf;
mod decode;
mod guards;
mod mapping;
mod structure;
pub mod totalizer;

use std::collections::HashMap;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automaton::{Alphabet, Automaton, ModelError};
use crate::sat::{self, Lit, SatSolver, SolveOutcome};
use crate::scenario::{NegativeTree, NegativeUpdate, Scenario, ScenarioError, ScenarioTree};

use cnf::Cnf;
pub use totalizer::Totalizer;

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("invalid encoding parameters: {0}")]
    Params(String),
    #[error("decoded guard of state {state}, transition {transition} disagrees with the model on input {input}")]
    DecodeMismatch { state: usize, transition: usize, input: String },
    #[error("solver gave no verdict: {0}")]
    Unknown(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no clause recording for this encoder")]
    NotRecorded,
}

/// Size and shape of the machine being searched for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingParams {
    /// Number of states.
    pub states: usize,
    /// Outgoing transitions per state; `None` means states × input events.
    pub max_transitions: Option<usize>,
    /// Parse-tree nodes per guard; `None` encodes guards as truth tables
    /// over the tree inputs only.
    pub guard_nodes: Option<usize>,
    pub state_bfs: bool,
    pub tree_bfs: bool,
    /// Log-sized at-most-one constraints instead of pairwise ones.
    pub binary_domains: bool,
    /// Require loopless negative scenario ends to be unreachable.
    pub unmap_loopless_ends: bool,
    /// Keep a copy of every clause for DIMACS dumps.
    pub record: bool,
}

impl EncodingParams {
    pub fn basic(states: usize) -> Self {
        Self {
            states,
            max_transitions: None,
            guard_nodes: None,
            state_bfs: true,
            tree_bfs: true,
            binary_domains: false,
            unmap_loopless_ends: true,
            record: false,
        }
    }

    pub fn extended(states: usize, guard_nodes: usize) -> Self {
        Self { guard_nodes: Some(guard_nodes), ..Self::basic(states) }
    }

    pub fn with_max_transitions(mut self, k: usize) -> Self {
        self.max_transitions = Some(k);
        self
    }

    pub fn with_bfs(mut self, on: bool) -> Self {
        self.state_bfs = on;
        self.tree_bfs = on;
        self
    }

    /// Resolved K for an alphabet.
    pub fn transitions_for(&self, alphabet: &Alphabet) -> usize {
        self.max_transitions.unwrap_or(self.states * alphabet.input_events.len())
    }
}

/// What a cardinality counter sums up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counted {
    /// Typed parse-tree nodes over all guards.
    GuardNodes,
    /// Non-null transitions.
    Transitions,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub calls: usize,
    pub time: Duration,
}

const TERMINAL: usize = 0;
const AND: usize = 1;
const OR: usize = 2;
const NOT: usize = 3;
const NONE: usize = 4;

/// Parse-tree families of one guard; nodes are numbered from 1 and stored at
/// index `node - 1`.
struct GuardTree {
    kind: Vec<[Lit; 5]>,
    /// Domain 0..=|X|; 0 means no variable.
    var: Vec<Vec<Lit>>,
    /// Domain 0..node-1; empty for the root, whose parent is always 0.
    parent: Vec<Vec<Lit>>,
    /// Index 0 means no child, index i ≥ 1 means node `node + i`.
    child: Vec<Vec<Lit>>,
    /// Per tree input.
    value: Vec<Vec<Lit>>,
}

impl GuardTree {
    fn parent_is(&self, node: usize, parent: usize) -> Lit {
        self.parent[node - 1][parent]
    }

    fn child_is(&self, node: usize, child: usize) -> Lit {
        if child == 0 {
            self.child[node - 1][0]
        } else {
            self.child[node - 1][child - node]
        }
    }

    fn nodes(&self) -> usize {
        self.kind.len()
    }
}

pub struct Encoder {
    alphabet: Alphabet,
    params: EncodingParams,
    k: usize,
    cnf: Cnf,
    inputs: Vec<Vec<bool>>,
    input_index: HashMap<Vec<bool>, usize>,

    /// [q][0..=|E^O|]
    output_event: Vec<Vec<Lit>>,
    /// [q][z][old value] = new value
    algorithm: Vec<Vec<[Lit; 2]>>,
    /// [q][k][0..=C]
    dest: Vec<Vec<Vec<Lit>>>,
    /// [q][k][0..=|E^I|]
    event: Vec<Vec<Vec<Lit>>>,
    /// [q][k][u]
    fires: Vec<Vec<Vec<Lit>>>,
    /// [q][k][e][u]: fires and carries event e
    fires_on: Vec<Vec<Vec<Vec<Lit>>>>,
    /// [q][e][u][0..=K]
    first_fired: Vec<Vec<Vec<Vec<Lit>>>>,
    /// [q][e][u][0..=C]
    reaction: Vec<Vec<Vec<Vec<Lit>>>>,
    /// [q][k]
    guards: Vec<Vec<GuardTree>>,

    positive: ScenarioTree,
    /// [v][q]
    positive_map: Vec<Vec<Lit>>,
    negative: NegativeTree,
    /// [v][0..=C]
    negative_map: Vec<Vec<Lit>>,
    output_match: HashMap<(usize, usize, Vec<(bool, bool)>), Lit>,

    counter: Option<(Counted, Totalizer)>,
    stats: SolveStats,
}

impl Encoder {
    /// Encode structure, guards, symmetry breaking, and the positive tree.
    pub fn new(
        alphabet: &Alphabet,
        params: EncodingParams,
        positive: &ScenarioTree,
        solver: Box<dyn SatSolver>,
    ) -> Result<Self, EncodeError> {
        let k = params.transitions_for(alphabet);
        if params.states == 0 {
            return Err(EncodeError::Params("at least one state is required".into()));
        }
        if k == 0 {
            return Err(EncodeError::Params("at least one transition slot is required".into()));
        }
        if params.guard_nodes == Some(0) {
            return Err(EncodeError::Params("parse trees need at least one node".into()));
        }
        let mut enc = Encoder {
            alphabet: alphabet.clone(),
            k,
            cnf: Cnf::new(solver, params.binary_domains, params.record),
            params,
            inputs: Vec::new(),
            input_index: HashMap::new(),
            output_event: Vec::new(),
            algorithm: Vec::new(),
            dest: Vec::new(),
            event: Vec::new(),
            fires: Vec::new(),
            fires_on: Vec::new(),
            first_fired: Vec::new(),
            reaction: Vec::new(),
            guards: Vec::new(),
            positive: ScenarioTree::for_alphabet(alphabet),
            positive_map: Vec::new(),
            negative: NegativeTree::for_alphabet(alphabet),
            negative_map: Vec::new(),
            output_match: HashMap::new(),
            counter: None,
            stats: SolveStats::default(),
        };
        enc.encode_structure();
        if enc.params.guard_nodes.is_some() {
            enc.encode_guard_structure();
        }
        if enc.params.state_bfs {
            enc.encode_state_bfs();
        }
        if enc.params.tree_bfs && enc.params.guard_nodes.is_some() {
            enc.encode_tree_bfs();
        }
        enc.encode_positive(positive);
        enc.encode_negative_root();
        Ok(enc)
    }

    /// Convenience: build the tree from `scenarios` and create a solver from
    /// `backend`.
    pub fn from_scenarios(
        alphabet: &Alphabet,
        params: EncodingParams,
        scenarios: &[Scenario],
        backend: &sat::Backend,
    ) -> Result<Self, EncodeError> {
        let tree = ScenarioTree::build(alphabet, scenarios)?;
        Self::new(alphabet, params, &tree, backend.create())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn params(&self) -> &EncodingParams {
        &self.params
    }

    /// Resolved number of transition slots per state.
    pub fn max_transitions(&self) -> usize {
        self.k
    }

    /// Inputs seen on any tree edge, in registration order.
    pub fn inputs(&self) -> &[Vec<bool>] {
        &self.inputs
    }

    pub fn positive_tree(&self) -> &ScenarioTree {
        &self.positive
    }

    pub fn negative_tree(&self) -> &NegativeTree {
        &self.negative
    }

    pub fn num_vars(&self) -> u32 {
        self.cnf.solver_ref().num_vars()
    }

    pub fn num_clauses(&self) -> usize {
        self.cnf.solver_ref().num_clauses()
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    /// Merge a negative scenario and encode whatever it added.
    pub fn add_negative(
        &mut self,
        scenario: &Scenario,
        loop_start: Option<usize>,
    ) -> Result<NegativeUpdate, EncodeError> {
        let update = self.negative.add(scenario, loop_start)?;
        self.encode_negative_update(&update);
        Ok(update)
    }

    /// Attach a cardinality counter. Only one counter per encoder.
    pub fn add_counter(&mut self, what: Counted) -> Result<&Totalizer, EncodeError> {
        if self.counter.is_some() {
            return Err(EncodeError::Params("a counter is already attached".into()));
        }
        let indicators: Vec<Lit> = match what {
            Counted::GuardNodes => {
                if self.guards.is_empty() {
                    return Err(EncodeError::Params("guard nodes are only counted with parse trees".into()));
                }
                self.guards.iter().flatten().flat_map(|g| g.kind.iter().map(|k| !k[NONE])).collect()
            }
            Counted::Transitions => self.dest.iter().flatten().map(|d| !d[0]).collect(),
        };
        let t = Totalizer::build(&mut self.cnf, &indicators);
        self.counter = Some((what, t));
        Ok(&self.counter.as_ref().expect("just set").1)
    }

    pub fn counter(&self) -> Option<&Totalizer> {
        self.counter.as_ref().map(|(_, t)| t)
    }

    /// Permanently require the counted quantity to be at most `n`.
    pub fn bound(&mut self, n: usize) -> Result<(), EncodeError> {
        if let Some(l) = self.bound_literal(n)? {
            self.cnf.clause(&[l]);
        }
        Ok(())
    }

    /// Literal for "counted quantity ≤ n", for use as an assumption.
    pub fn bound_literal(&self, n: usize) -> Result<Option<Lit>, EncodeError> {
        match &self.counter {
            Some((_, t)) => Ok(t.at_most(n)),
            None => Err(EncodeError::Params("no counter attached".into())),
        }
    }

    pub fn solve(&mut self) -> Result<Option<Automaton>, EncodeError> {
        self.solve_under(&[])
    }

    /// Solve under temporary assumptions and decode a model if there is one.
    pub fn solve_under(&mut self, assumptions: &[Lit]) -> Result<Option<Automaton>, EncodeError> {
        let started = Instant::now();
        let outcome = self.cnf.solver().solve_under(assumptions);
        self.stats.calls += 1;
        self.stats.time += started.elapsed();
        match outcome {
            SolveOutcome::Sat(model) => self.decode(&model).map(Some),
            SolveOutcome::Unsat => Ok(None),
            SolveOutcome::Unknown(reason) => Err(EncodeError::Unknown(reason)),
        }
    }

    /// Raw solver outcome; used by tests that inspect individual literals.
    pub fn solve_raw(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        self.stats.calls += 1;
        self.cnf.solver().solve_under(assumptions)
    }

    /// Write every clause so far as DIMACS, with `c var` comments naming the
    /// family and indices of each variable.
    pub fn write_dimacs<W: Write>(&self, out: &mut W) -> Result<(), EncodeError> {
        let rec = self.cnf.recording().ok_or(EncodeError::NotRecorded)?;
        let comments: Vec<String> = rec.names.iter().map(|(id, name)| format!("var {id} {name}")).collect();
        sat::write_dimacs(out, self.num_vars(), &rec.clauses, &[], &comments)
            .map_err(|e: io::Error| EncodeError::Params(e.to_string()))
    }

    // Literal accessors, 0-based states and transitions.

    /// Destination literal; `to = 0` is the null transition, `q + 1` state q.
    pub fn dest_lit(&self, q: usize, k: usize, to: usize) -> Lit {
        self.dest[q][k][to]
    }

    pub fn fires_lit(&self, q: usize, k: usize, u: usize) -> Lit {
        self.fires[q][k][u]
    }

    pub fn first_fired_lit(&self, q: usize, e: usize, u: usize, k: usize) -> Lit {
        self.first_fired[q][e][u][k]
    }

    pub fn reaction_lit(&self, q: usize, e: usize, u: usize, to: usize) -> Lit {
        self.reaction[q][e][u][to]
    }

    /// Parse-tree node type: 0 terminal, 1 and, 2 or, 3 not, 4 none.
    pub fn node_kind_lit(&self, q: usize, k: usize, node: usize, kind: usize) -> Lit {
        self.guards[q][k].kind[node - 1][kind]
    }

    pub fn node_value_lit(&self, q: usize, k: usize, node: usize, u: usize) -> Lit {
        self.guards[q][k].value[node - 1][u]
    }

    pub fn positive_map_lit(&self, v: usize, q: usize) -> Lit {
        self.positive_map[v][q]
    }

    /// `to = 0` means unmapped.
    pub fn negative_map_lit(&self, v: usize, to: usize) -> Lit {
        self.negative_map[v][to]
    }
}
