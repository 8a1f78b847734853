//! Unary counter semantics under arbitrary input assignments.

use eccsynth::encoder::Totalizer;
use eccsynth::sat::{ClauseSink, InProcessSolver, SatSolver, SolveOutcome};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outputs_are_the_sorted_inputs(values in prop::collection::vec(any::<bool>(), 1..40)) {
        let mut solver = InProcessSolver::default();
        let lits: Vec<_> = values.iter().map(|_| solver.new_lit()).collect();
        let t = Totalizer::build(&mut solver, &lits);
        let fixed: Vec<_> = lits.iter().zip(&values).map(|(&l, &v)| if v { l } else { !l }).collect();
        let SolveOutcome::Sat(model) = solver.solve_under(&fixed) else { panic!("fixed inputs UNSAT") };
        let pop = values.iter().filter(|&&v| v).count();
        let unary: Vec<bool> = t.outputs().iter().map(|&l| model.value(l)).collect();
        prop_assert_eq!(unary, (0..values.len()).map(|j| j < pop).collect::<Vec<_>>());
    }

    #[test]
    fn bound_admits_exactly_the_small_counts(len in 1usize..24, k in 0usize..26) {
        // Free inputs: the bound must allow every count up to k and no more.
        let mut solver = InProcessSolver::default();
        let lits: Vec<_> = (0..len).map(|_| solver.new_lit()).collect();
        let t = Totalizer::build(&mut solver, &lits);
        let bound: Vec<_> = t.at_most(k).into_iter().collect();
        let reach = k.min(len);
        let mut at_least = bound.clone();
        at_least.extend(lits[..reach].iter().copied());
        prop_assert!(solver.solve_under(&at_least).is_sat());
        if reach < len {
            let mut over = bound.clone();
            over.extend(lits[..=reach].iter().copied());
            prop_assert!(solver.solve_under(&over).is_unsat());
        }
    }
}
