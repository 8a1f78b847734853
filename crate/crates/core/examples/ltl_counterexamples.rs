//! Model-checks a small machine against a safety and a liveness property
//! and prints the counterexamples as scenarios.
//!
//! cargo run --example ltl_counterexamples

use eccsynth::io::{parse_automaton, parse_ltl, write_scenarios};
use eccsynth::ltl::{Plant, Verifier};
use eccsynth::scenario::Scenario;

const MACHINE: &str = "\
inevents R
outevents A B
invars 1
outvars 0
state 1 out=. alg=
  1: R [x1] -> 2
state 2 out=A alg=
  1: R [x1] -> 4
state 3 out=A alg=
  1: R [x1] -> 2
state 4 out=A alg=
  1: R [~x1] -> 3
  2: R [x1] -> 5
state 5 out=B alg=
";

fn main() {
    let m = parse_automaton(MACHINE).expect("valid machine");
    let props = parse_ltl("G(out!=B)\nF(out=B)\nG(out=B -> X(out=.))\n", m.alphabet()).expect("valid formulas");
    let cexs = Verifier::default().verify(&m, &Plant::Free, &props).expect("small state space");
    for c in &cexs {
        let kind = match c.loop_start {
            Some(l) => format!("lasso, loop from step {l}"),
            None => "finite prefix".to_string(),
        };
        println!("{}: {kind}", props[c.property].text);
        let text = write_scenarios(m.alphabet(), &[Scenario::new(c.trace.clone())]);
        for line in text.lines().skip_while(|l| *l != "scenario").skip(1) {
            println!("  {line}");
        }
    }
    let held = props.len() - cexs.len();
    println!("{held} of {} properties hold", props.len());
}
