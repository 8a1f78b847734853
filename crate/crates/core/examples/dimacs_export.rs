//! Dumps the CNF of one synthesis query in DIMACS, with comments naming each
//! variable, and solves it through an external solver when one is given.
//!
//! cargo run --example dimacs_export -- [solver command]

use eccsynth::encoder::{Encoder, EncodingParams};
use eccsynth::io::{parse_scenarios, write_automaton};
use eccsynth::sat::Backend;

fn main() {
    let file = parse_scenarios(include_str!("../tests/data/three_traces.scn")).expect("valid scenario file");
    let mut params = EncodingParams::extended(2, 1);
    params.record = true;

    let inprocess = Backend::default();
    let enc = Encoder::from_scenarios(&file.alphabet, params.clone(), &file.scenarios, &inprocess).expect("encodes");
    let mut cnf = Vec::new();
    enc.write_dimacs(&mut cnf).expect("recorded");
    let text = String::from_utf8(cnf).expect("ascii");
    let header = text.lines().find(|l| l.starts_with("p cnf")).unwrap_or("");
    println!("{header}");
    for line in text.lines().filter(|l| l.starts_with("c var")).take(5) {
        println!("{line}");
    }

    let solver: Vec<String> = std::env::args().skip(1).collect();
    let backend = if solver.is_empty() { inprocess } else { Backend::from_spec(&solver.join(" "), None) };
    let mut enc = Encoder::from_scenarios(&file.alphabet, params, &file.scenarios, &backend).expect("encodes");
    match enc.solve() {
        Ok(Some(m)) => print!("{}", write_automaton(&m)),
        Ok(None) => println!("UNSAT"),
        Err(e) => println!("solver failed: {e}"),
    }
}
