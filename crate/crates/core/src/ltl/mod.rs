//! Explicit-state LTL model checking of a controller in closed loop with a
//! plant.
//!
//! Atoms are evaluated on each step: the input action just consumed and the
//! output action it produced. Properties of the form `G ψ` with
//! propositional `ψ` are checked by reachability and give finite
//! counterexamples; everything else goes through a Büchi product and nested
//! depth-first search and gives lassos.

mod buchi;
mod check;
mod formula;
mod plant;

pub use buchi::{Buchi, Edge};
pub use check::{Counterexample, LtlProperty, Verifier, DEFAULT_STATE_LIMIT};
pub use formula::{Atom, Formula, LtlError, Nnf, RawAtom};
pub use plant::{all_input_actions, ClosedLoop, Config, ExplicitPlant, OutputPattern, Plant, PlantRule};

use thiserror::Error;

use crate::automaton::{Automaton, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("product exceeds {limit} states")]
    StateSpaceExceeded { limit: usize },
    #[error("plant has no response in state `{state}` to output {output}")]
    PlantDeadlock { state: String, output: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Check `properties` with default settings.
pub fn verify(
    automaton: &Automaton,
    plant: &Plant,
    properties: &[LtlProperty],
) -> Result<Vec<Counterexample>, VerifyError> {
    Verifier::default().verify(automaton, plant, properties)
}
