use crate::sat::{ClauseSink, Lit, SatSolver};

/// Clause sink with helpers for one-of domains and Tseytin gates. Optionally
/// records clauses and variable names for a commented DIMACS dump.
pub(crate) struct Cnf {
    solver: Box<dyn SatSolver>,
    binary_domains: bool,
    record: Option<Recording>,
}

#[derive(Default)]
pub(crate) struct Recording {
    pub names: Vec<(u32, String)>,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(solver: Box<dyn SatSolver>, binary_domains: bool, record: bool) -> Self {
        Self { solver, binary_domains, record: record.then(Recording::default) }
    }

    pub fn solver(&mut self) -> &mut dyn SatSolver {
        self.solver.as_mut()
    }

    pub fn solver_ref(&self) -> &dyn SatSolver {
        self.solver.as_ref()
    }

    pub fn recording(&self) -> Option<&Recording> {
        self.record.as_ref()
    }

    pub fn var(&mut self, name: impl FnOnce() -> String) -> Lit {
        let lit = self.solver.new_lit();
        if let Some(r) = &mut self.record {
            r.names.push((lit.var().id(), name()));
        }
        lit
    }

    pub fn clause(&mut self, lits: &[Lit]) {
        if let Some(r) = &mut self.record {
            r.clauses.push(lits.to_vec());
        }
        self.solver.add_clause(lits);
    }

    /// `premises` all true implies `conclusion`.
    pub fn imply(&mut self, premises: &[Lit], conclusion: Lit) {
        let mut c: Vec<Lit> = premises.iter().map(|&l| !l).collect();
        c.push(conclusion);
        self.clause(&c);
    }

    /// `premises` all true implies at least one of `options`.
    pub fn imply_any(&mut self, premises: &[Lit], options: &[Lit]) {
        let mut c: Vec<Lit> = premises.iter().map(|&l| !l).collect();
        c.extend_from_slice(options);
        self.clause(&c);
    }

    pub fn at_most_one(&mut self, lits: &[Lit]) {
        if lits.len() < 2 {
            return;
        }
        if self.binary_domains && lits.len() > 4 {
            let bits = usize::BITS - (lits.len() - 1).leading_zeros();
            let code: Vec<Lit> = (0..bits).map(|b| self.var(|| format!("amo_bit[{b}]"))).collect();
            for (i, &l) in lits.iter().enumerate() {
                for (b, &c) in code.iter().enumerate() {
                    self.clause(&[!l, c.with_sign(i >> b & 1 == 1)]);
                }
            }
        } else {
            for i in 0..lits.len() {
                for j in i + 1..lits.len() {
                    self.clause(&[!lits[i], !lits[j]]);
                }
            }
        }
    }

    pub fn exactly_one(&mut self, lits: &[Lit]) {
        self.clause(lits);
        self.at_most_one(lits);
    }

    /// Fresh exactly-one family of `size` literals.
    pub fn domain(&mut self, size: usize, name: impl Fn(usize) -> String) -> Vec<Lit> {
        let lits: Vec<Lit> = (0..size).map(|i| self.var(|| name(i))).collect();
        self.exactly_one(&lits);
        lits
    }

    /// Literal equivalent to the conjunction of `lits`.
    pub fn and_gate(&mut self, lits: &[Lit], name: impl FnOnce() -> String) -> Lit {
        match lits {
            [] => self.constant(true),
            [single] => *single,
            _ => {
                let y = self.var(name);
                for &l in lits {
                    self.clause(&[!y, l]);
                }
                let mut c: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                c.push(y);
                self.clause(&c);
                y
            }
        }
    }

    pub fn constant(&mut self, value: bool) -> Lit {
        let t = self.var(|| "const".into());
        self.clause(&[t]);
        t.with_sign(value)
    }
}

impl ClauseSink for Cnf {
    fn new_var(&mut self) -> crate::sat::Var {
        self.var(|| "aux".into()).var()
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.clause(lits)
    }
}
