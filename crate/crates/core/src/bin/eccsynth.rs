//! Command-line driver. Artifacts go to `--out` (or standard output), logs
//! and diagnostics to standard error.
//!
//! Exit codes: 0 success, 1 no solution, 2 usage or input error,
//! 3 solver or verifier failure.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eccsynth::automaton::{Alphabet, Automaton};
use eccsynth::cegis::{Cegis, CegisConfig, CegisError, CegisResult};
use eccsynth::eval::{self, GeneratorConfig, Method, StudyConfig};
use eccsynth::io::{self as formats, SyntaxError};
use eccsynth::ltl::{LtlProperty, Plant, Verifier, VerifyError};
use eccsynth::sat::{self, Backend};
use eccsynth::scenario::Scenario;
use eccsynth::synthesis::{SynthConfig, SynthError, SynthesisResult, Synthesizer};

#[derive(Parser, Debug)]
#[command(name = "eccsynth", version, about = "Synthesize guarded Moore machines from scenarios and LTL properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a machine from a scenario file.
    Infer(InferArgs),
    /// Model-check a machine against LTL properties.
    Verify(VerifyArgs),
    /// Generate a random machine.
    Randgen(RandgenArgs),
    /// Produce random scenarios from a machine.
    Simulate(SimulateArgs),
    /// Run a random-machine identification study.
    Study(StudyArgs),
    /// Solve a DIMACS file with the bundled solver (exit 10 SAT, 20 UNSAT).
    #[command(hide = true)]
    SolveDimacs { file: Option<PathBuf> },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InferMethod {
    BasicMin,
    ExtendedMin,
    ExtendedMinUb,
    CompleteCegis,
    CompleteMinCegis,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StudyMethod {
    BasicMin,
    ExtendedMin,
    ExtendedMinUb,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Dot,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// `inprocess`, `varisat` (bundled DIMACS solver), or an executable
    /// path with arguments. Defaults to $ECCSYNTH_SOLVER, then `inprocess`.
    #[arg(long)]
    solver: Option<String>,
    /// Pass the CNF to an external solver on standard input instead of a file.
    #[arg(long)]
    solver_stdin: bool,
    /// Per-call solver time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Args, Debug)]
struct InferArgs {
    #[arg(value_enum)]
    method: InferMethod,
    #[arg(long)]
    scenarios: PathBuf,
    /// LTL properties, one per line (required by the CEGIS methods).
    #[arg(long)]
    ltl: Option<PathBuf>,
    /// Plant table; the unrestricted plant when omitted.
    #[arg(long)]
    plant: Option<PathBuf>,
    /// Number of states (searched upward from 1 when omitted).
    #[arg(short = 'C')]
    states: Option<usize>,
    /// Cap on transitions per state (default C times the number of input events).
    #[arg(short = 'K')]
    max_transitions: Option<usize>,
    /// Parse-tree nodes per guard.
    #[arg(short = 'P')]
    guard_nodes: Option<usize>,
    /// Bound on the total guard size.
    #[arg(short = 'N')]
    guard_bound: Option<usize>,
    /// Plateau width for the P search, or `inf` to search until the bound.
    #[arg(short = 'w', default_value = "2")]
    plateau: Plateau,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    solver: SolverArgs,
    /// Disable BFS symmetry breaking.
    #[arg(long)]
    no_symmetry_breaking: bool,
    #[arg(long, default_value_t = 1_000)]
    max_iterations: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    ltl: PathBuf,
    #[arg(long)]
    plant: Option<PathBuf>,
    /// Abort when the product exceeds this many states.
    #[arg(long, default_value_t = eccsynth::ltl::DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RandgenArgs {
    #[arg(short = 'C')]
    states: usize,
    #[arg(long, default_value_t = 4)]
    inputs: usize,
    #[arg(long, default_value_t = 3)]
    outputs: usize,
    /// Upper bound on the total number of transitions (default C squared).
    #[arg(long)]
    max_transitions: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 20)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[arg(value_enum, default_value_t = StudyMethod::ExtendedMin)]
    method: StudyMethod,
    #[arg(short = 'C', default_value_t = 4)]
    states: usize,
    #[arg(long, default_value_t = 4)]
    inputs: usize,
    #[arg(long, default_value_t = 3)]
    outputs: usize,
    #[arg(short = 'P', default_value_t = 3)]
    guard_nodes: usize,
    #[arg(short = 'w', default_value = "2")]
    plateau: Plateau,
    /// Training set as COUNTxLENGTH.
    #[arg(long, default_value = "20x30", value_parser = parse_shape)]
    training: (usize, usize),
    /// Validation set as COUNTxLENGTH.
    #[arg(long, default_value = "100x50", value_parser = parse_shape)]
    validation: (usize, usize),
    #[arg(long, default_value_t = 20)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-repetition CSV; the summary goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock times (makes output nondeterministic).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Plateau width; `inf` disables the plateau stop.
#[derive(Clone, Copy, Debug)]
struct Plateau(Option<usize>);

impl std::str::FromStr for Plateau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" => Ok(Plateau(None)),
            n => n.parse().map(|w| Plateau(Some(w))).map_err(|e| format!("`{n}`: {e}")),
        }
    }
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or_else(|| format!("expected COUNTxLENGTH, found `{s}`"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((n(a)?, n(b)?))
}

/// A failed run, by exit code.
#[derive(Debug)]
enum Failure {
    Unsat(String),
    Violated(String),
    Input(String),
    Backend(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Unsat(_) | Failure::Violated(_) => 1,
            Failure::Input(_) => 2,
            Failure::Backend(_) => 3,
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Unsat { .. } | SynthError::Scenario(_) => Failure::Unsat(e.to_string()),
            e => Failure::Backend(e.to_string()),
        }
    }
}

impl From<CegisError> for Failure {
    fn from(e: CegisError) -> Self {
        match e {
            e if e.is_unsat() => Failure::Unsat(e.to_string()),
            CegisError::IterationCap { .. } | CegisError::NoProgress { .. } => Failure::Unsat(e.to_string()),
            CegisError::Synth(s) => s.into(),
            e => Failure::Backend(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::Backend(e.to_string())
    }
}

impl From<eval::EvalError> for Failure {
    fn from(e: eval::EvalError) -> Self {
        match e {
            eval::EvalError::Config(_) | eval::EvalError::EmptyValidation => Failure::Input(e.to_string()),
            e => Failure::Backend(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn syntax(path: &Path) -> impl Fn(SyntaxError) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Backend(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Backend(e.to_string())),
    }
}

fn backend(args: &SolverArgs) -> Result<Backend, Failure> {
    let timeout = args.timeout.map(Duration::from_secs_f64);
    let spec = args.solver.clone().or_else(|| std::env::var(sat::SOLVER_ENV).ok()).unwrap_or_default();
    let mut backend = if spec.trim() == "varisat" {
        let exe = std::env::current_exe().map_err(|e| Failure::Backend(e.to_string()))?;
        Backend::Dimacs {
            command: exe.to_string_lossy().into_owned(),
            args: vec!["solve-dimacs".into()],
            use_stdin: false,
            timeout,
        }
    } else {
        Backend::from_spec(&spec, timeout)
    };
    if let Backend::Dimacs { use_stdin, .. } = &mut backend {
        *use_stdin = args.solver_stdin;
    }
    log::info!("solver backend: {backend:?}");
    Ok(backend)
}

fn load_plant(path: Option<&Path>, alphabet: &Alphabet) -> Result<Plant, Failure> {
    match path {
        Some(p) => formats::parse_plant(&read(p)?, alphabet).map_err(syntax(p)),
        None => Ok(Plant::Free),
    }
}

fn render(m: &Automaton, format: Format) -> String {
    match format {
        Format::Text => formats::write_automaton(m),
        Format::Dot => formats::automaton_to_dot(m),
    }
}

/// The written machine must re-parse to an equal machine that passes every
/// input scenario.
fn revalidate(m: &Automaton, scenarios: &[Scenario]) -> Result<(), Failure> {
    let again = formats::parse_automaton(&formats::write_automaton(m))
        .map_err(|e| Failure::Backend(format!("exported machine does not re-parse: {e}")))?;
    if again != *m {
        return Err(Failure::Backend("exported machine re-parses to a different machine".into()));
    }
    if let Some(i) = scenarios.iter().position(|s| !again.satisfies(s)) {
        return Err(Failure::Backend(format!("exported machine fails scenario {}", i + 1)));
    }
    Ok(())
}

fn infer(args: InferArgs) -> Result<(), Failure> {
    log::debug!("infer: {args:?}");
    let file = formats::parse_scenarios(&read(&args.scenarios)?).map_err(syntax(&args.scenarios))?;
    let synth = SynthConfig {
        backend: backend(&args.solver)?,
        max_transitions: args.max_transitions,
        symmetry_breaking: !args.no_symmetry_breaking,
        max_states: args.states.unwrap_or(SynthConfig::default().max_states),
        ..SynthConfig::default()
    };
    let plateau = args.plateau.0;
    let guard_nodes = args.guard_nodes.unwrap_or(1);
    let machine = match args.method {
        InferMethod::BasicMin | InferMethod::ExtendedMin | InferMethod::ExtendedMinUb => {
            let s = Synthesizer::new(&file.alphabet, &file.scenarios, synth)?;
            if let (InferMethod::ExtendedMin, Some(c), Some(n)) = (args.method, args.states, args.guard_bound) {
                let m = s
                    .extended(c, guard_nodes, Some(n))?
                    .ok_or_else(|| Failure::Unsat(format!("no machine with C={c} P={guard_nodes} N<={n}")))?;
                log::info!("result: C={c} T={} N={}", m.transition_count(), m.guard_complexity());
                m
            } else {
                let r = match (args.method, args.states) {
                    (InferMethod::BasicMin, _) => s.basic_min()?,
                    (InferMethod::ExtendedMin, Some(c)) => s.extended_min_with_states(c, guard_nodes)?,
                    (InferMethod::ExtendedMin, None) => s.extended_min(guard_nodes)?,
                    _ => s.extended_min_ub(plateau)?,
                };
                log_result(&r);
                r.automaton
            }
        }
        InferMethod::CompleteCegis | InferMethod::CompleteMinCegis => {
            let ltl =
                args.ltl.as_deref().ok_or_else(|| Failure::Input("--ltl is required by the CEGIS methods".into()))?;
            let props = formats::parse_ltl(&read(ltl)?, &file.alphabet).map_err(syntax(ltl))?;
            let plant = load_plant(args.plant.as_deref(), &file.alphabet)?;
            let config = CegisConfig { max_iterations: args.max_iterations, ..CegisConfig::default() };
            let cegis = Cegis::new(&file.alphabet, &file.scenarios, props, plant, synth, config)?;
            let r = match (args.method, args.states, args.guard_nodes) {
                (InferMethod::CompleteCegis, Some(c), Some(p)) => cegis.complete_cegis(c, p, args.guard_bound),
                (InferMethod::CompleteCegis, _, _) => cegis.complete_star_cegis(plateau),
                _ => cegis.complete_star_min_cegis(plateau),
            };
            let r = r?;
            log_cegis(&r);
            r.automaton
        }
    };
    revalidate(&machine, &file.scenarios)?;
    emit(args.out.as_deref(), &render(&machine, args.format))
}

fn log_result(r: &SynthesisResult) {
    for t in &r.trail {
        log::info!("query: {t}");
    }
    log::info!(
        "result: C={} T={} N={} calls={} solve={:.3}s",
        r.states,
        r.transitions,
        r.guard_size,
        r.solver_calls,
        r.solver_time.as_secs_f64()
    );
}

fn log_cegis(r: &CegisResult) {
    log::info!(
        "result: C={} P={} T={} N={} iterations={} negatives={}",
        r.states,
        r.guard_nodes,
        r.automaton.transition_count(),
        r.automaton.guard_complexity(),
        r.iterations(),
        r.negatives.len()
    );
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    log::debug!("verify: {args:?}");
    let m = formats::parse_automaton(&read(&args.machine)?).map_err(syntax(&args.machine))?;
    let props: Vec<LtlProperty> = formats::parse_ltl(&read(&args.ltl)?, m.alphabet()).map_err(syntax(&args.ltl))?;
    let plant = load_plant(args.plant.as_deref(), m.alphabet())?;
    let cexs = Verifier::with_limit(args.state_limit).verify(&m, &plant, &props)?;
    let a = m.alphabet();
    let mut report = String::new();
    for c in &cexs {
        report.push_str(&format!("# violated: {}\n", props[c.property].text));
        match c.loop_start {
            Some(l) => report.push_str(&format!("# loop back to step {l}\n")),
            None => report.push_str("# finite prefix\n"),
        }
        let body = formats::write_scenarios(a, &[Scenario::new(c.trace.clone())]);
        let body = body.lines().skip_while(|l| *l != "scenario").skip(1);
        for l in body {
            report.push_str(l);
            report.push('\n');
        }
    }
    emit(args.out.as_deref(), &report)?;
    if cexs.is_empty() {
        eprintln!("all {} properties hold", props.len());
        Ok(())
    } else {
        Err(Failure::Violated(format!("{} of {} properties", cexs.len(), props.len())))
    }
}

fn randgen(args: RandgenArgs) -> Result<(), Failure> {
    log::debug!("randgen: {args:?}");
    let mut config = GeneratorConfig::new(args.states, args.inputs, args.outputs);
    if let Some(t) = args.max_transitions {
        config.max_transitions = t;
    }
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let m = eval::random_automaton(&config, &mut rng)?;
    emit(args.out.as_deref(), &render(&m, args.format))
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    log::debug!("simulate: {args:?}");
    let m = formats::parse_automaton(&read(&args.machine)?).map_err(syntax(&args.machine))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let scenarios = eval::simulate_scenarios(&m, args.count, args.length, &mut rng);
    emit(args.out.as_deref(), &formats::write_scenarios(m.alphabet(), &scenarios))
}

fn study(args: StudyArgs) -> Result<(), Failure> {
    log::debug!("study: {args:?}");
    let method = match args.method {
        StudyMethod::BasicMin => Method::BasicMin,
        StudyMethod::ExtendedMin => Method::ExtendedMin { guard_nodes: args.guard_nodes },
        StudyMethod::ExtendedMinUb => Method::ExtendedMinUb { plateau: args.plateau.0 },
    };
    let config = StudyConfig {
        generator: GeneratorConfig::new(args.states, args.inputs, args.outputs),
        training: args.training,
        validation: args.validation,
        seed: args.seed,
        repetitions: args.repetitions,
        method,
        synth: SynthConfig { backend: backend(&args.solver)?, ..SynthConfig::default() },
    };
    let report = eval::run_study(&config)?;
    if let Some(path) = &args.out {
        let f = fs::File::create(path).map_err(|e| Failure::Backend(format!("{}: {e}", path.display())))?;
        report.write_csv(f, args.timings)?;
    }
    report.write_summary(io::stdout().lock(), args.timings)?;
    Ok(())
}

fn solve_dimacs(file: Option<PathBuf>) -> Result<u8, Failure> {
    use varisat::ExtendFormula;
    let mut text = Vec::new();
    match &file {
        Some(p) => text = fs::read(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => {
            io::stdin().read_to_end(&mut text).map_err(|e| Failure::Input(e.to_string()))?;
        }
    }
    let (vars, clauses) = sat::parse_dimacs(&text[..]).map_err(|e| Failure::Input(e.to_string()))?;
    let mut solver = varisat::Solver::new();
    for c in &clauses {
        let lits: Vec<varisat::Lit> = c.iter().map(|l| varisat::Lit::from_dimacs(l.to_dimacs() as isize)).collect();
        solver.add_clause(&lits);
    }
    let sat = solver.solve().map_err(|e| Failure::Backend(e.to_string()))?;
    let mut out = io::stdout().lock();
    let w = |e: io::Error| Failure::Backend(e.to_string());
    if !sat {
        writeln!(out, "s UNSATISFIABLE").map_err(w)?;
        return Ok(20);
    }
    let mut values = vec![false; vars as usize + 1];
    for l in solver.model().unwrap_or_default() {
        let v = l.var().to_dimacs() as usize;
        if v < values.len() {
            values[v] = l.is_positive();
        }
    }
    writeln!(out, "s SATISFIABLE").map_err(w)?;
    let lits: Vec<String> =
        (1..values.len()).map(|v| if values[v] { v.to_string() } else { format!("-{v}") }).collect();
    writeln!(out, "v {} 0", lits.join(" ")).map_err(w)?;
    Ok(10)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Infer(a) => infer(a),
        Command::Verify(a) => verify(a),
        Command::Randgen(a) => randgen(a),
        Command::Simulate(a) => simulate(a),
        Command::Study(a) => study(a),
        Command::SolveDimacs { file } => {
            return match solve_dimacs(file) {
                Ok(code) => ExitCode::from(code),
                Err(f) => report(f),
            }
        }
    };
    result.map_or_else(report, |()| ExitCode::SUCCESS)
}

fn report(f: Failure) -> ExitCode {
    match &f {
        Failure::Unsat(m) => eprintln!("UNSAT: {m}"),
        Failure::Violated(m) => eprintln!("violated: {m}"),
        Failure::Input(m) => eprintln!("error: {m}"),
        Failure::Backend(m) => eprintln!("failure: {m}"),
    }
    ExitCode::from(f.code())
}
