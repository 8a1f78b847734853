//! Builds the prefix tree of a scenario file and prints its nodes.
//!
//! cargo run --example scenario_tree

use eccsynth::io::parse_scenarios;
use eccsynth::scenario::ScenarioTree;

fn main() {
    let file = parse_scenarios(include_str!("../tests/data/three_traces.scn")).expect("valid scenario file");
    let tree = ScenarioTree::build(&file.alphabet, &file.scenarios).expect("consistent scenarios");
    let a = &file.alphabet;
    for (id, node) in tree.nodes().iter().enumerate() {
        let Some(input) = &node.input else {
            println!("{id}: root");
            continue;
        };
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        println!(
            "{id}: parent {} {}[{}] -> {}[{}]{}",
            node.parent.expect("non-root"),
            a.input_events[input.event],
            bits(&input.input),
            a.output_event_name(node.output.event),
            bits(&node.output.output),
            if node.is_passive() { "  (ignored)" } else { "" }
        );
    }
    println!("{} nodes, {} active", tree.len(), tree.active_nodes().count());
}
