//! Counterexample-guided synthesis: scenarios alone admit machines that
//! violate the property; verifier counterexamples rule them out.
//!
//! cargo run --example cegis_synthesis

use eccsynth::cegis::{Cegis, CegisConfig};
use eccsynth::io::{parse_ltl, parse_scenarios, write_automaton};
use eccsynth::ltl::Plant;
use eccsynth::synthesis::SynthConfig;

const SCENARIOS: &str = "\
inevents R
outevents A B
invars 1
outvars 0
scenario
R[1] -> A[]
R[0] -> B[]
";

fn main() {
    let file = parse_scenarios(SCENARIOS).expect("valid scenario file");
    let props = parse_ltl("G(out=A -> F(out=B))\n", &file.alphabet).expect("valid formula");
    let cegis =
        Cegis::new(&file.alphabet, &file.scenarios, props, Plant::Free, SynthConfig::default(), CegisConfig::default())
            .expect("consistent scenarios");

    let r = cegis.complete_star_min_cegis(Some(2)).expect("specification is realizable");
    for (i, it) in r.log.iter().enumerate() {
        println!("{}: {it}", i + 1);
    }
    println!("{} negative scenarios collected", r.negatives.len());
    print!("{}", write_automaton(&r.automaton));
}
