use std::time::{Duration, Instant};

use cadical::{Callbacks, Solver};

use super::{ClauseSink, Lit, Model, SatSolver, SolveOutcome, Var};

/// Stops the search once a wall-clock budget is spent.
struct Deadline {
    started: Instant,
    limit: Option<Duration>,
}

impl Callbacks for Deadline {
    fn started(&mut self) {
        self.started = Instant::now();
    }

    fn terminate(&mut self) -> bool {
        self.limit.is_some_and(|l| self.started.elapsed() >= l)
    }
}

/// CaDiCaL linked into the process; incremental with assumptions.
pub struct InProcessSolver {
    solver: Solver<Deadline>,
    vars: u32,
    clauses: usize,
    trivially_unsat: bool,
}

impl InProcessSolver {
    pub fn new(timeout: Option<Duration>) -> Self {
        let mut solver = Solver::new();
        solver.set_callbacks(Some(Deadline { started: Instant::now(), limit: timeout }));
        Self { solver, vars: 0, clauses: 0, trivially_unsat: false }
    }
}

impl Default for InProcessSolver {
    fn default() -> Self {
        Self::new(None)
    }
}

impl ClauseSink for InProcessSolver {
    fn new_var(&mut self) -> Var {
        self.vars += 1;
        Var::new(self.vars)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits.iter().all(|l| l.var().id() <= self.vars));
        self.clauses += 1;
        if lits.is_empty() {
            self.trivially_unsat = true;
            return;
        }
        self.solver.add_clause(lits.iter().map(|l| l.to_dimacs()));
    }
}

impl SatSolver for InProcessSolver {
    fn num_vars(&self) -> u32 {
        self.vars
    }

    fn num_clauses(&self) -> usize {
        self.clauses
    }

    fn solve_under(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        if self.trivially_unsat {
            return SolveOutcome::Unsat;
        }
        if self.vars > 0 {
            self.solver.reserve(self.vars as i32);
        }
        match self.solver.solve_with(assumptions.iter().map(|l| l.to_dimacs())) {
            Some(true) => {
                let values = (1..=self.vars as i32).map(|v| self.solver.value(v).unwrap_or(false)).collect();
                SolveOutcome::Sat(Model::new(values))
            }
            Some(false) => SolveOutcome::Unsat,
            None => SolveOutcome::Unknown("in-process solver interrupted (timeout)".into()),
        }
    }
}
