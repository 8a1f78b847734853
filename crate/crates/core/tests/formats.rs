//! Text formats round-trip on generated machines and scenarios.

mod common;

use common::random_machine;
use eccsynth::automaton::Alphabet;
use eccsynth::eval::simulate_scenarios;
use eccsynth::io::{automaton_to_dot, parse_automaton, parse_scenarios, write_automaton, write_scenarios};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn alphabet(inputs: usize, outputs: usize) -> Alphabet {
    Alphabet::with_counts(&["REQ", "TICK"], &["ACK", "CNF"], inputs, outputs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn machine_text_round_trips(seed: u64, inputs in 1usize..4, outputs in 0usize..3, states in 1usize..6) {
        let a = alphabet(inputs, outputs);
        let m = random_machine(&mut ChaCha8Rng::seed_from_u64(seed), &a, states);
        let text = write_automaton(&m);
        let back = parse_automaton(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(write_automaton(&back), text);
    }

    #[test]
    fn scenario_text_round_trips(seed: u64, inputs in 1usize..4, outputs in 0usize..3, count in 1usize..5, length in 1usize..8) {
        let a = alphabet(inputs, outputs);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_machine(&mut rng, &a, 4);
        let scenarios = simulate_scenarios(&m, count, length, &mut rng);
        let text = write_scenarios(&a, &scenarios);
        let back = parse_scenarios(&text).unwrap();
        prop_assert_eq!(&back.alphabet, &a);
        prop_assert_eq!(&back.scenarios, &scenarios);
        prop_assert_eq!(write_scenarios(&back.alphabet, &back.scenarios), text);
    }

    #[test]
    fn dot_has_one_node_per_state(seed: u64, states in 1usize..6) {
        let a = alphabet(2, 1);
        let m = random_machine(&mut ChaCha8Rng::seed_from_u64(seed), &a, states);
        let dot = automaton_to_dot(&m);
        let transitions: usize = m.states().iter().map(|s| s.transitions.len()).sum();
        prop_assert_eq!(dot.matches("label=\"q").count(), m.num_states());
        prop_assert_eq!(dot.matches(" -> ").count(), transitions + 1);
    }
}
