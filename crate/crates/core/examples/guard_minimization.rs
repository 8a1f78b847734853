//! Parse-tree guards: fixed node budget per guard, then a search over the
//! budget that stops on a plateau.
//!
//! cargo run --example guard_minimization

use eccsynth::io::{parse_scenarios, write_automaton};
use eccsynth::synthesis::{SynthConfig, Synthesizer};

fn main() {
    let file = parse_scenarios(include_str!("../tests/data/three_traces.scn")).expect("valid scenario file");
    let synth =
        Synthesizer::new(&file.alphabet, &file.scenarios, SynthConfig::default()).expect("consistent scenarios");

    for p in 1..=3 {
        let r = synth.extended_min(p).expect("realizable with single-variable guards");
        println!("P = {p}: C = {} T = {} N = {}", r.states, r.transitions, r.guard_size);
    }

    let best = synth.extended_min_ub(Some(2)).expect("realizable");
    println!(
        "budget search: P = {} N = {} after {} solver calls",
        best.guard_nodes.expect("parse-tree guards"),
        best.guard_size,
        best.solver_calls
    );
    print!("{}", write_automaton(&best.automaton));
}
