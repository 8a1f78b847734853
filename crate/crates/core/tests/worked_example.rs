//! The three-scenario example in tests/data/three_traces.scn, checked against
//! exhaustive enumeration.

mod common;

use common::*;
use eccsynth::automaton::{Alphabet, Automaton, Guard};
use eccsynth::io::parse_scenarios;
use eccsynth::scenario::Scenario;
use eccsynth::synthesis::{SynthConfig, Synthesizer};

fn example() -> (Alphabet, Vec<Scenario>) {
    let f = parse_scenarios(include_str!("data/three_traces.scn")).unwrap();
    (f.alphabet, f.scenarios)
}

fn replays_all(m: &Automaton, scenarios: &[Scenario]) -> bool {
    scenarios.iter().all(|s| replays(m, s))
}

fn transitions(m: &Automaton) -> usize {
    m.states().iter().map(|s| s.transitions.len()).sum()
}

/// One guard per subset of the inputs that occur in the scenarios
/// (00, 01, 10). Guards only ever see those inputs, so this covers every
/// Boolean function up to behaviour on the example.
fn guards_over_tree_inputs() -> Vec<Guard> {
    all_functions(2).into_iter().filter(|g| !g.eval(&[true, true]).unwrap()).collect()
}

/// Fewest transitions over two-state machines with at most two per state.
/// Exact whenever the answer is at most 3: a machine with fewer total
/// transitions has at most two in every state.
fn brute_min_transitions(a: &Alphabet, scenarios: &[Scenario]) -> Option<usize> {
    let mut best: Option<usize> = None;
    enumerate_machines(a, 2, 2, &guards_over_tree_inputs(), |m| {
        if replays_all(m, scenarios) {
            let t = transitions(m);
            best = Some(best.map_or(t, |b| b.min(t)));
        }
    });
    best
}

#[test]
fn guard_representatives_are_distinct_on_tree_inputs() {
    let inputs = [[false, false], [false, true], [true, false]];
    let tables: std::collections::HashSet<Vec<bool>> =
        guards_over_tree_inputs().iter().map(|g| inputs.iter().map(|u| g.eval(u).unwrap()).collect()).collect();
    assert_eq!(tables.len(), 8);
}

#[test]
fn minimal_state_count() {
    let (a, scenarios) = example();
    let r = Synthesizer::new(&a, &scenarios, SynthConfig::default()).unwrap().basic_min().unwrap();
    assert_eq!(r.states, 2);
    assert!(replays_all(&r.automaton, &scenarios));
}

#[test]
fn minimal_transition_count_matches_enumeration() {
    let (a, scenarios) = example();
    let oracle = brute_min_transitions(&a, &scenarios).expect("a two-state machine exists");
    assert!(oracle <= 3, "enumeration only exact up to 3, got {oracle}");
    assert_eq!(oracle, 3);

    let r = Synthesizer::new(&a, &scenarios, SynthConfig::default()).unwrap().basic_min_star().unwrap();
    assert_eq!((r.states, r.transitions), (2, oracle));
    assert_eq!(transitions(&r.automaton), oracle);
    assert!(replays_all(&r.automaton, &scenarios));
}

#[test]
fn minimal_guard_size_with_single_node_guards() {
    let (a, scenarios) = example();
    let r = Synthesizer::new(&a, &scenarios, SynthConfig::default()).unwrap().extended_min(1).unwrap();
    assert_eq!((r.states, r.guard_size), (2, 3));
    assert_eq!(r.automaton.guard_complexity(), 3);
    assert!(replays_all(&r.automaton, &scenarios));
}

#[test]
fn extended_min_ub_reaches_the_same_size() {
    let (a, scenarios) = example();
    let s = Synthesizer::new(&a, &scenarios, SynthConfig::default()).unwrap();
    for plateau in [Some(0), Some(2), None] {
        let r = s.extended_min_ub(plateau).unwrap();
        assert_eq!(r.guard_size, 3, "plateau {plateau:?}");
        assert!(replays_all(&r.automaton, &scenarios));
    }
}
