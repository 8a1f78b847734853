//! Incremental SAT interface.
//!
//! Clauses are permanent; assumptions only last for one `solve_under` call.
//! Two backends implement it: CaDiCaL linked in-process and any external
//! DIMACS solver run as a child process.

use std::fmt;
use std::ops::Not;
use std::time::Duration;

mod dimacs;
mod inprocess;

pub use dimacs::{parse_dimacs, parse_solver_output, write_dimacs, DimacsSolver, SolverOutput};
pub use inprocess::InProcessSolver;

/// Positive variable id, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Self {
        assert!(id > 0, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn lit(self) -> Lit {
        Lit(self.0 as i32)
    }
}

/// Variable with polarity, stored DIMACS-style as a signed integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        let v = var.0 as i32;
        Lit(if positive { v } else { -v })
    }

    pub fn from_dimacs(value: i32) -> Self {
        assert!(value != 0, "0 is not a literal");
        Lit(value)
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// `self` if `positive`, else its negation.
    pub fn with_sign(self, positive: bool) -> Self {
        if positive {
            self
        } else {
            !self
        }
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Total assignment over the variables allocated at solve time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// `values[i]` is the value of variable `i + 1`.
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, lit: Lit) -> bool {
        let v = self.values[lit.var().0 as usize - 1];
        if lit.is_positive() {
            v
        } else {
            !v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat)
    }
}

/// Anything that accepts fresh variables and clauses.
pub trait ClauseSink {
    fn new_var(&mut self) -> Var;
    fn add_clause(&mut self, lits: &[Lit]);

    fn new_lit(&mut self) -> Lit {
        self.new_var().lit()
    }
}

pub trait SatSolver: ClauseSink + Send {
    fn num_vars(&self) -> u32;
    fn num_clauses(&self) -> usize;
    /// Decide all clauses plus `assumptions`; the clause store is unchanged.
    fn solve_under(&mut self, assumptions: &[Lit]) -> SolveOutcome;

    fn solve(&mut self) -> SolveOutcome {
        self.solve_under(&[])
    }
}

impl ClauseSink for Box<dyn SatSolver> {
    fn new_var(&mut self) -> Var {
        (**self).new_var()
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        (**self).add_clause(lits)
    }
}

/// Which solver a synthesis run creates for each fresh context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    InProcess { timeout: Option<Duration> },
    Dimacs { command: String, args: Vec<String>, use_stdin: bool, timeout: Option<Duration> },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::InProcess { timeout: None }
    }
}

/// Environment variable naming an external DIMACS solver executable.
pub const SOLVER_ENV: &str = "ECCSYNTH_SOLVER";

impl Backend {
    pub fn dimacs(command: impl Into<String>) -> Self {
        Backend::Dimacs { command: command.into(), args: Vec::new(), use_stdin: false, timeout: None }
    }

    /// `inprocess` (or empty) selects the linked solver, anything else is an
    /// executable path with optional arguments separated by spaces.
    pub fn from_spec(spec: &str, timeout: Option<Duration>) -> Self {
        let spec = spec.trim();
        if spec.is_empty() || spec == "inprocess" || spec == "cadical" {
            return Backend::InProcess { timeout };
        }
        let mut parts = spec.split_whitespace().map(str::to_string);
        let command = parts.next().unwrap_or_default();
        Backend::Dimacs { command, args: parts.collect(), use_stdin: false, timeout }
    }

    pub fn with_timeout(mut self, limit: Option<Duration>) -> Self {
        match &mut self {
            Backend::InProcess { timeout } | Backend::Dimacs { timeout, .. } => *timeout = limit,
        }
        self
    }

    pub fn create(&self) -> Box<dyn SatSolver> {
        match self {
            Backend::InProcess { timeout } => Box::new(InProcessSolver::new(*timeout)),
            Backend::Dimacs { command, args, use_stdin, timeout } => {
                Box::new(DimacsSolver::new(command.clone(), args.clone(), *use_stdin).with_timeout(*timeout))
            }
        }
    }
}
