//! Smallest machine with full truth-table guards, then the same state count
//! with as few transitions as possible.
//!
//! cargo run --example minimal_machine

use eccsynth::io::{parse_scenarios, write_automaton};
use eccsynth::synthesis::{SynthConfig, Synthesizer};

fn main() {
    let file = parse_scenarios(include_str!("../tests/data/three_traces.scn")).expect("valid scenario file");
    let synth =
        Synthesizer::new(&file.alphabet, &file.scenarios, SynthConfig::default()).expect("consistent scenarios");

    let fewest_states = synth.basic_min().expect("scenarios are realizable");
    println!("C = {}, T = {}", fewest_states.states, fewest_states.transitions);
    for entry in &fewest_states.trail {
        println!("  {entry}");
    }

    let fewest_transitions = synth.basic_min_star().expect("scenarios are realizable");
    println!("after transition minimization: T = {}", fewest_transitions.transitions);
    print!("{}", write_automaton(&fewest_transitions.automaton));
}
