//! Verifier and formula automata against the lasso oracle in `common`.

mod common;

use common::*;
use eccsynth::automaton::{Alphabet, InputAction, OutputAction};
use eccsynth::ltl::{Buchi, Formula, LtlProperty, Plant, Verifier};
use eccsynth::scenario::ScenarioElement;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alphabet(shape: u8) -> Alphabet {
    match shape {
        0 => Alphabet::with_counts(&["R"], &["A", "B"], 1, 1),
        1 => Alphabet::with_counts(&["R", "S"], &["A"], 1, 0),
        _ => Alphabet::with_counts(&["R"], &["A", "B"], 2, 2),
    }
    .unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, a: &Alphabet) -> (Vec<ScenarioElement>, usize) {
    let len = rng.gen_range(1..=6);
    let word = (0..len)
        .map(|_| {
            let input = InputAction::new(
                rng.gen_range(0..a.input_events.len()),
                (0..a.num_inputs()).map(|_| rng.gen()).collect(),
            );
            let event = rng.gen_range(0..=a.output_events.len()).checked_sub(1);
            ScenarioElement::new(input, OutputAction::new(event, (0..a.num_outputs()).map(|_| rng.gen()).collect()))
        })
        .collect();
    (word, rng.gen_range(0..len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn negation_automaton_rejects_exactly_the_models(seed: u64, shape in 0u8..3, depth in 1usize..4) {
        let a = alphabet(shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, &a, depth);
        let positive = Buchi::from_nnf(&f.nnf());
        let negative = Buchi::from_nnf(&Formula::not(f.clone()).nnf());
        for _ in 0..8 {
            let (word, loop_to) = random_word(&mut rng, &a);
            let holds = holds_on_lasso(&f, &word, loop_to);
            prop_assert_eq!(buchi_accepts(&positive, &word, loop_to), holds);
            prop_assert_eq!(buchi_accepts(&negative, &word, loop_to), !holds);
        }
    }

    #[test]
    fn verifier_matches_product_oracle(seed: u64, shape in 0u8..3) {
        let a = alphabet(shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_machine(&mut rng, &a, 3);
        let f = random_formula(&mut rng, &a, 2);
        let prop = LtlProperty { text: String::new(), formula: f.clone() };
        let cex = Verifier::default().verify(&m, &Plant::Free, std::slice::from_ref(&prop)).unwrap();
        let violated = product_nonempty(&m, &Buchi::from_nnf(&Formula::not(f.clone()).nnf()));
        prop_assert_eq!(!cex.is_empty(), violated);
        for c in &cex {
            prop_assert!(exhibits(&m, &c.to_negative()));
            if let Some(l) = c.loop_start {
                prop_assert!(!holds_on_lasso(&f, &c.trace, l));
            }
        }
    }
}

#[test]
fn invariants_get_loopless_counterexamples() {
    let a = alphabet(0);
    let m = eccsynth::io::parse_automaton(
        "inevents R\noutevents A B\ninvars 1\noutvars 1\n\
         state 1 out=. alg=0\n  1: R [x1] -> 2\n\
         state 2 out=B alg=1\n",
    )
    .unwrap();
    let prop = LtlProperty::parse("G(out!=B | z1)", &a).unwrap();
    let cex = Verifier::default().verify(&m, &Plant::Free, &[prop]).unwrap();
    assert!(cex.is_empty());
    let prop = LtlProperty::parse("G(out!=B)", &a).unwrap();
    let cex = Verifier::default().verify(&m, &Plant::Free, &[prop]).unwrap();
    assert_eq!(cex.len(), 1);
    assert_eq!(cex[0].loop_start, None);
    assert_eq!(cex[0].trace.len(), 1);
}
