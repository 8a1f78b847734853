//! Learns a machine and renders it for Graphviz.
//!
//! cargo run --example dot_export | dot -Tsvg > machine.svg

use eccsynth::io::{automaton_to_dot, parse_scenarios};
use eccsynth::synthesis::{SynthConfig, Synthesizer};

fn main() {
    let file = parse_scenarios(include_str!("../tests/data/three_traces.scn")).expect("valid scenario file");
    let synth =
        Synthesizer::new(&file.alphabet, &file.scenarios, SynthConfig::default()).expect("consistent scenarios");
    let r = synth.extended_min(2).expect("realizable");
    print!("{}", automaton_to_dot(&r.automaton));
}
