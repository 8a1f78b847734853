use std::io::{self, BufRead, Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{ClauseSink, Lit, Model, SatSolver, SolveOutcome, Var};

/// Write `p cnf` header, optional comment lines, and zero-terminated clauses.
pub fn write_dimacs<W: Write>(
    out: &mut W,
    num_vars: u32,
    clauses: &[Vec<Lit>],
    extra_units: &[Lit],
    comments: &[String],
) -> io::Result<()> {
    for c in comments {
        writeln!(out, "c {c}")?;
    }
    writeln!(out, "p cnf {} {}", num_vars, clauses.len() + extra_units.len())?;
    let mut line = String::new();
    for clause in clauses {
        line.clear();
        for lit in clause {
            line.push_str(&lit.to_dimacs().to_string());
            line.push(' ');
        }
        line.push('0');
        writeln!(out, "{line}")?;
    }
    for lit in extra_units {
        writeln!(out, "{} 0", lit.to_dimacs())?;
    }
    Ok(())
}

/// Read a DIMACS CNF; returns the declared variable count and the clauses.
pub fn parse_dimacs<R: BufRead>(input: R) -> io::Result<(u32, Vec<Vec<Lit>>)> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut num_vars = 0u32;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(header) = line.strip_prefix('p') {
            let fields: Vec<_> = header.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(bad(format!("malformed header `{line}`")));
            }
            num_vars = fields[1].parse().map_err(|_| bad(format!("bad variable count `{}`", fields[1])))?;
            continue;
        }
        for tok in line.split_whitespace() {
            let value: i32 = tok.parse().map_err(|_| bad(format!("bad literal `{tok}`")))?;
            if value == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                num_vars = num_vars.max(value.unsigned_abs());
                current.push(Lit::from_dimacs(value));
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    Ok((num_vars, clauses))
}

/// Verdict and model printed by a competition-style solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutput {
    Sat(Vec<i32>),
    Unsat,
    Unknown,
}

/// Interpret solver stdout (`s` and `v` lines) and exit status (10 = SAT,
/// 20 = UNSAT). The `s` line wins when both are present.
pub fn parse_solver_output(stdout: &str, exit_code: Option<i32>) -> SolverOutput {
    let mut status = None;
    let mut values = Vec::new();
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                _ => None,
            };
        } else if let Some(rest) = line.strip_prefix('v') {
            values.extend(rest.split_whitespace().filter_map(|t| t.parse::<i32>().ok()).filter(|&v| v != 0));
        } else if line == "SAT" {
            status = Some(true);
        } else if line == "UNSAT" {
            status = Some(false);
        }
    }
    let status = status.or(match exit_code {
        Some(10) => Some(true),
        Some(20) => Some(false),
        _ => None,
    });
    match status {
        Some(true) => SolverOutput::Sat(values),
        Some(false) => SolverOutput::Unsat,
        None => SolverOutput::Unknown,
    }
}

/// External solver run as a child process. The whole CNF is re-dumped on
/// every call; assumptions become unit clauses of that dump only.
pub struct DimacsSolver {
    command: String,
    args: Vec<String>,
    use_stdin: bool,
    timeout: Option<Duration>,
    vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl DimacsSolver {
    pub fn new(command: String, args: Vec<String>, use_stdin: bool) -> Self {
        Self { command, args, use_stdin, timeout: None, vars: 0, clauses: Vec::new() }
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    fn run(&self, cnf: Vec<u8>) -> Result<(String, Option<i32>), String> {
        let mut cmd = Command::new(&self.command);
        cmd.args(&self.args).stdout(Stdio::piped()).stderr(Stdio::null());
        let _file;
        if self.use_stdin {
            cmd.stdin(Stdio::piped());
        } else {
            let mut f = tempfile::Builder::new()
                .suffix(".cnf")
                .tempfile()
                .map_err(|e| format!("cannot create CNF file: {e}"))?;
            f.write_all(&cnf).map_err(|e| format!("cannot write CNF file: {e}"))?;
            f.flush().map_err(|e| e.to_string())?;
            cmd.arg(f.path());
            cmd.stdin(Stdio::null());
            _file = f;
        }
        let mut child = cmd.spawn().map_err(|e| format!("cannot start `{}`: {e}", self.command))?;
        let writer = if self.use_stdin {
            let mut stdin = child.stdin.take().expect("piped");
            Some(thread::spawn(move || {
                let _ = stdin.write_all(&cnf);
            }))
        } else {
            None
        };
        let mut stdout = child.stdout.take().expect("piped");
        let reader = thread::spawn(move || {
            let mut buf = String::new();
            let _ = stdout.read_to_string(&mut buf);
            buf
        });
        let started = Instant::now();
        let status = loop {
            match child.try_wait().map_err(|e| e.to_string())? {
                Some(status) => break status,
                None => {
                    if self.timeout.is_some_and(|t| started.elapsed() >= t) {
                        let _ = child.kill();
                        let _ = child.wait();
                        return Err("external solver timed out".into());
                    }
                    thread::sleep(Duration::from_millis(2));
                }
            }
        };
        if let Some(w) = writer {
            let _ = w.join();
        }
        let out = reader.join().map_err(|_| "output reader panicked".to_string())?;
        Ok((out, status.code()))
    }
}

impl ClauseSink for DimacsSolver {
    fn new_var(&mut self) -> Var {
        self.vars += 1;
        Var::new(self.vars)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.clauses.push(lits.to_vec());
    }
}

impl SatSolver for DimacsSolver {
    fn num_vars(&self) -> u32 {
        self.vars
    }

    fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    fn solve_under(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        if self.clauses.iter().any(|c| c.is_empty()) {
            return SolveOutcome::Unsat;
        }
        let mut cnf = Vec::new();
        write_dimacs(&mut cnf, self.vars, &self.clauses, assumptions, &[]).expect("in-memory write");
        let (stdout, code) = match self.run(cnf) {
            Ok(r) => r,
            Err(reason) => return SolveOutcome::Unknown(reason),
        };
        match parse_solver_output(&stdout, code) {
            SolverOutput::Sat(values) => {
                let mut model = vec![false; self.vars as usize];
                for v in values {
                    let idx = v.unsigned_abs() as usize;
                    if idx >= 1 && idx <= model.len() {
                        model[idx - 1] = v > 0;
                    }
                }
                SolveOutcome::Sat(Model::new(model))
            }
            SolverOutput::Unsat => SolveOutcome::Unsat,
            SolverOutput::Unknown => {
                SolveOutcome::Unknown(format!("no verdict from `{}` (exit {:?})", self.command, code))
            }
        }
    }
}
