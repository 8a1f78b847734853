use super::{EncodeError, Encoder, GuardTree, AND, NOT, OR, TERMINAL};
use crate::automaton::{Algorithm, Automaton, Guard, State, Transition};
use crate::sat::{Lit, Model};

fn which(model: &Model, lits: &[Lit]) -> usize {
    lits.iter().position(|&l| model.value(l)).expect("one-hot family has a true member")
}

fn tree_guard(model: &Model, g: &GuardTree, node: usize) -> Guard {
    let kind = which(model, &g.kind[node - 1]);
    let child = || node + which(model, &g.child[node - 1]);
    match kind {
        TERMINAL => Guard::var(which(model, &g.var[node - 1]) - 1),
        AND => Guard::and(tree_guard(model, g, child()), tree_guard(model, g, child() + 1)),
        OR => Guard::or(tree_guard(model, g, child()), tree_guard(model, g, child() + 1)),
        NOT => Guard::not(tree_guard(model, g, child())),
        _ => unreachable!("typed root of a non-null transition"),
    }
}

/// Disjunction of the minterms of `inputs`; unsatisfiable when empty.
fn dnf(inputs: &[&Vec<bool>], width: usize) -> Guard {
    let minterm = |input: &Vec<bool>| {
        let lits =
            input.iter().enumerate().map(|(x, &b)| if b { Guard::var(x) } else { Guard::not(Guard::var(x)) }).collect();
        Guard::and_all(lits).expect("at least one input variable")
    };
    match Guard::or_all(inputs.iter().map(|i| minterm(i)).collect()) {
        Some(g) => g,
        None => {
            debug_assert!(width > 0);
            Guard::and(Guard::var(0), Guard::not(Guard::var(0)))
        }
    }
}

impl Encoder {
    /// Machine described by `model`. Fails if a decoded guard disagrees with
    /// the firing variables on some tree input.
    pub fn decode(&self, model: &Model) -> Result<Automaton, EncodeError> {
        let c = self.params.states;
        let width = self.alphabet.num_outputs();
        // algorithm bits no positive node depends on are reported as "keep",
        // unless negative constraints might rely on their actual value
        let normalize = self.negative.is_empty();
        let mut used = vec![vec![[false; 2]; width]; c];
        if normalize {
            for v in self.positive.active_nodes() {
                let q = which(model, &self.positive_map[v]);
                let parent = self.positive.node(v).parent.expect("non-root");
                for (z, &b) in self.positive.node(parent).output.output.iter().enumerate() {
                    used[q][z][b as usize] = true;
                }
            }
        }
        let mut states = Vec::with_capacity(c);
        for q in 0..c {
            let output_event = which(model, &self.output_event[q]).checked_sub(1);
            let mut algorithm = Algorithm::keep(width);
            for z in 0..width {
                for b in 0..2 {
                    let bit = model.value(self.algorithm[q][z][b]);
                    let bit = if normalize && !used[q][z][b] { b == 1 } else { bit };
                    if b == 0 {
                        algorithm.when_false[z] = bit;
                    } else {
                        algorithm.when_true[z] = bit;
                    }
                }
            }
            let mut transitions = Vec::new();
            for t in 0..self.k {
                let dest = which(model, &self.dest[q][t]);
                if dest == 0 {
                    break;
                }
                let event = which(model, &self.event[q][t]) - 1;
                let guard = if self.params.guard_nodes.is_some() {
                    tree_guard(model, &self.guards[q][t], 1)
                } else {
                    let firing: Vec<&Vec<bool>> = self
                        .inputs
                        .iter()
                        .enumerate()
                        .filter(|&(u, _)| model.value(self.fires[q][t][u]))
                        .map(|(_, i)| i)
                        .collect();
                    dnf(&firing, self.alphabet.num_inputs())
                };
                for (u, input) in self.inputs.iter().enumerate() {
                    if guard.eval(input)? != model.value(self.fires[q][t][u]) {
                        return Err(EncodeError::DecodeMismatch {
                            state: q,
                            transition: t,
                            input: input.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                        });
                    }
                }
                transitions.push(Transition { dest: dest - 1, event, guard });
            }
            states.push(State { output_event, algorithm, transitions });
        }
        Ok(Automaton::new(self.alphabet.clone(), states)?)
    }
}
