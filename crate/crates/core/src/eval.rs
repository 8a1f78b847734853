//! Random-machine studies: generate a machine, simulate random walks on it,
//! infer a machine back from the walks and measure how many fresh walks the
//! inferred machine reproduces.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::{Algorithm, Alphabet, Automaton, Guard, InputAction, State, Transition};
use crate::scenario::{Scenario, ScenarioElement};
use crate::synthesis::{SynthConfig, SynthesisResult, Synthesizer};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid generator settings: {0}")]
    Config(String),
    #[error("no machine met the generator constraints after {0} attempts")]
    GenerationFailed(usize),
    #[error("validation set is empty")]
    EmptyValidation,
    #[error("failed to write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to write report: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub states: usize,
    /// Upper bound on the total number of transitions.
    pub max_transitions: usize,
    pub input_events: usize,
    pub output_events: usize,
    pub inputs: usize,
    pub outputs: usize,
}

impl GeneratorConfig {
    /// `states` states, up to `states²` transitions, one event each way.
    pub fn new(states: usize, inputs: usize, outputs: usize) -> Self {
        Self { states, max_transitions: states * states, input_events: 1, output_events: 1, inputs, outputs }
    }

    pub fn alphabet(&self) -> Alphabet {
        let names = |prefix: &str, n: usize| -> Vec<String> {
            if n == 1 {
                vec![prefix.to_string()]
            } else {
                (1..=n).map(|i| format!("{prefix}{i}")).collect()
            }
        };
        Alphabet::new(
            names("REQ", self.input_events),
            names("CNF", self.output_events),
            (1..=self.inputs).map(|i| format!("x{i}")).collect(),
            (1..=self.outputs).map(|i| format!("z{i}")).collect(),
        )
        .expect("generated names are valid")
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: &str| Err(EvalError::Config(m.to_string()));
        if self.states == 0 || self.input_events == 0 || self.output_events == 0 || self.inputs == 0 {
            return bad("states, events and input variables must be positive");
        }
        if self.max_transitions > self.states * self.states * self.input_events {
            return bad("more transitions than states² × input events");
        }
        if self.max_transitions + 1 < self.states {
            return bad("too few transitions to reach every state");
        }
        if self.inputs > 16 {
            return bad("at most 16 input variables");
        }
        Ok(())
    }
}

const ATTEMPTS: usize = 100;

fn random_guard(rng: &mut impl Rng, inputs: usize) -> Guard {
    let var = |rng: &mut dyn rand::RngCore| Guard::var(rng.gen_range(0..inputs));
    if rng.gen_bool(0.5) {
        return var(rng);
    }
    if inputs < 2 || rng.gen_bool(1.0 / 3.0) {
        return Guard::not(var(rng));
    }
    let a = rng.gen_range(0..inputs);
    let b = (a + rng.gen_range(1..inputs)) % inputs;
    if rng.gen_bool(0.5) {
        Guard::and(Guard::var(a), Guard::var(b))
    } else {
        Guard::or(Guard::var(a), Guard::var(b))
    }
}

fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << n).map(move |v| (0..n).map(|i| v >> i & 1 == 1).collect())
}

fn truth_table(guard: &Guard, inputs: usize) -> Vec<bool> {
    all_inputs(inputs).map(|x| guard.eval(&x).expect("guard in range")).collect()
}

/// Transitions that can never fire because earlier transitions on the same
/// event cover their whole guard.
pub fn shadowed_transitions(automaton: &Automaton) -> usize {
    let n = automaton.alphabet().num_inputs();
    automaton
        .states()
        .iter()
        .map(|s| {
            (0..s.transitions.len())
                .filter(|&k| {
                    all_inputs(n).all(|x| {
                        let action = InputAction::new(s.transitions[k].event, x);
                        s.transitions[k].guard.eval(&action.input).is_ok_and(|fires| !fires)
                            || s.transitions[..k]
                                .iter()
                                .any(|t| t.event == action.event && t.guard.eval(&action.input).unwrap_or(false))
                    })
                })
                .count()
        })
        .sum()
}

/// States reachable from the initial state by transitions that can fire.
fn live_reachable(automaton: &Automaton) -> Vec<bool> {
    let n = automaton.alphabet().num_inputs();
    let events = automaton.alphabet().input_events.len();
    let mut seen = vec![false; automaton.num_states()];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(q) = stack.pop() {
        for e in 0..events {
            for x in all_inputs(n) {
                if let Some(k) = automaton.fired(q, &InputAction::new(e, x)) {
                    let d = automaton.states()[q].transitions[k].dest;
                    if !seen[d] {
                        seen[d] = true;
                        stack.push(d);
                    }
                }
            }
        }
    }
    seen
}

/// Random machine with `config.states` states, all live-reachable.
///
/// Every state other than an initial state that is never re-entered emits
/// an output event. Guards are a single variable half of the time, else a
/// negation or a binary operator over two distinct variables. No state has
/// two transitions on the same event with the same truth table.
pub fn random_automaton(config: &GeneratorConfig, rng: &mut impl Rng) -> Result<Automaton, EvalError> {
    config.validate()?;
    let alphabet = config.alphabet();
    let (c, width) = (config.states, config.outputs);
    let per_state = c * config.input_events;
    for _ in 0..ATTEMPTS {
        let total = rng.gen_range(c - 1..=config.max_transitions);
        let mut counts = vec![0usize; c];
        for _ in 0..total {
            let open: Vec<usize> = (0..c).filter(|&q| counts[q] < per_state).collect();
            counts[open[rng.gen_range(0..open.len())]] += 1;
        }
        let mut states = Vec::with_capacity(c);
        let mut ok = true;
        for &count in &counts {
            let algorithm = Algorithm {
                when_false: (0..width).map(|_| rng.gen()).collect(),
                when_true: (0..width).map(|_| rng.gen()).collect(),
            };
            let mut transitions: Vec<Transition> = Vec::with_capacity(count);
            let mut tables: Vec<(usize, Vec<bool>)> = Vec::new();
            for _ in 0..count {
                let event = rng.gen_range(0..config.input_events);
                let fresh = (0..ATTEMPTS).find_map(|_| {
                    let g = random_guard(rng, config.inputs);
                    let key = (event, truth_table(&g, config.inputs));
                    (!tables.contains(&key)).then_some((g, key))
                });
                let Some((guard, key)) = fresh else {
                    ok = false;
                    break;
                };
                tables.push(key);
                transitions.push(Transition { dest: rng.gen_range(0..c), event, guard });
            }
            let output_event = Some(rng.gen_range(0..config.output_events));
            states.push(State { output_event, algorithm, transitions });
        }
        if !ok {
            continue;
        }
        let mut m = Automaton::new(alphabet.clone(), states.clone()).expect("well-formed");
        for _ in 0..ATTEMPTS {
            let seen = live_reachable(&m);
            let Some(target) = seen.iter().position(|&s| !s) else { break };
            let sources: Vec<(usize, usize)> = (0..c)
                .filter(|&q| seen[q])
                .flat_map(|q| (0..states[q].transitions.len()).map(move |k| (q, k)))
                .collect();
            if sources.is_empty() {
                break;
            }
            let (q, k) = sources[rng.gen_range(0..sources.len())];
            states[q].transitions[k].dest = target;
            m = Automaton::new(alphabet.clone(), states.clone()).expect("well-formed");
        }
        if live_reachable(&m).iter().all(|&s| s) {
            if !states.iter().flat_map(|s| &s.transitions).any(|t| t.dest == 0) {
                states[0].output_event = None;
                m = Automaton::new(alphabet.clone(), states).expect("well-formed");
            }
            return Ok(m);
        }
    }
    Err(EvalError::GenerationFailed(ATTEMPTS))
}

/// `count` random walks of `length` steps from the initial configuration,
/// each step a uniformly random event and input valuation.
pub fn simulate_scenarios(automaton: &Automaton, count: usize, length: usize, rng: &mut impl Rng) -> Vec<Scenario> {
    let a = automaton.alphabet();
    (0..count)
        .map(|_| {
            let mut state = 0;
            let mut outputs = vec![false; a.num_outputs()];
            let elements = (0..length)
                .map(|_| {
                    let action = InputAction::new(
                        rng.gen_range(0..a.input_events.len()),
                        (0..a.num_inputs()).map(|_| rng.gen()).collect(),
                    );
                    let (next, out) = automaton.step(state, &outputs, &action).expect("matching width");
                    state = next;
                    outputs = out.output.clone();
                    ScenarioElement::new(action, out)
                })
                .collect();
            Scenario::new(elements)
        })
        .collect()
}

/// Percentage of `validation` scenarios reproduced in full.
pub fn forward_check(candidate: &Automaton, validation: &[Scenario]) -> Result<f64, EvalError> {
    if validation.is_empty() {
        return Err(EvalError::EmptyValidation);
    }
    let ok = validation.iter().filter(|s| candidate.satisfies(s)).count();
    Ok(100.0 * ok as f64 / validation.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    BasicMin,
    ExtendedMin { guard_nodes: usize },
    ExtendedMinUb { plateau: Option<usize> },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::BasicMin => write!(f, "basic-min"),
            Method::ExtendedMin { guard_nodes } => write!(f, "extended-min P={guard_nodes}"),
            Method::ExtendedMinUb { plateau: Some(w) } => write!(f, "extended-min-ub w={w}"),
            Method::ExtendedMinUb { plateau: None } => write!(f, "extended-min-ub w=inf"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub generator: GeneratorConfig,
    /// (number of scenarios, length of each)
    pub training: (usize, usize),
    pub validation: (usize, usize),
    pub seed: u64,
    pub repetitions: usize,
    pub method: Method,
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub repetition: usize,
    pub true_states: usize,
    pub true_transitions: usize,
    pub shadowed: usize,
    pub states: Option<usize>,
    pub transitions: Option<usize>,
    pub guard_nodes: Option<usize>,
    pub guard_size: Option<usize>,
    pub time: f64,
    /// Forward-check percentage; `None` when synthesis failed.
    pub p: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub seed: u64,
    pub training: (usize, usize),
    pub inputs: usize,
    pub method: Method,
    pub rows: Vec<StudyRow>,
}

/// Aggregates over the rows of a report. Failed rows count as p = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean_time: f64,
    pub std_time: f64,
    pub mean_p: f64,
    pub perfect: usize,
    pub failed: usize,
}

impl StudyReport {
    pub fn summary(&self) -> Summary {
        let n = self.rows.len().max(1) as f64;
        let mean_time = self.rows.iter().map(|r| r.time).sum::<f64>() / n;
        let var = if self.rows.len() > 1 {
            self.rows.iter().map(|r| (r.time - mean_time).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Summary {
            mean_time,
            std_time: var.sqrt(),
            mean_p: self.rows.iter().map(|r| r.p.unwrap_or(0.0)).sum::<f64>() / n,
            perfect: self.rows.iter().filter(|r| r.p == Some(100.0)).count(),
            failed: self.rows.iter().filter(|r| r.error.is_some()).count(),
        }
    }

    /// One CSV record per repetition. Without timings the output depends on
    /// the seed only.
    pub fn write_csv(&self, out: impl Write, timings: bool) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            let mut r = row.clone();
            if !timings {
                r.time = 0.0;
            }
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Text table with the scenario shape, mean time, its deviation, mean
    /// validation percentage and the number of perfect runs.
    pub fn write_summary(&self, mut out: impl Write, timings: bool) -> Result<(), EvalError> {
        let s = self.summary();
        writeln!(out, "# seed={} method={}", self.seed, self.method)?;
        writeln!(out, "# generator: guards are one variable or a 2-3 node tree; unreachable states are reconnected")?;
        writeln!(
            out,
            "{:>5} {:>5} {:>4} {:>9} {:>9} {:>7} {:>7}",
            "|S|", "|s|", "|X|", "t_mean", "t_sd", "p_mean", "100%p"
        )?;
        let (t, sd) = if timings { (s.mean_time, s.std_time) } else { (0.0, 0.0) };
        writeln!(
            out,
            "{:>5} {:>5} {:>4} {:>9.3} {:>9.3} {:>7.2} {:>3}/{:<3}",
            self.training.0,
            self.training.1,
            self.inputs,
            t,
            sd,
            s.mean_p,
            s.perfect,
            self.rows.len()
        )?;
        if s.failed > 0 {
            writeln!(out, "# {} repetitions failed", s.failed)?;
        }
        Ok(())
    }
}

fn synthesize(method: Method, synth: &Synthesizer) -> Result<SynthesisResult, String> {
    let r = match method {
        Method::BasicMin => synth.basic_min(),
        Method::ExtendedMin { guard_nodes } => synth.extended_min(guard_nodes),
        Method::ExtendedMinUb { plateau } => synth.extended_min_ub(plateau),
    };
    r.map_err(|e| e.to_string())
}

/// Generator, training data and validation data for one repetition.
pub fn study_instance(
    config: &StudyConfig,
    repetition: usize,
) -> Result<(Automaton, Vec<Scenario>, Vec<Scenario>), EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(repetition as u64);
    let m = random_automaton(&config.generator, &mut rng)?;
    let training = simulate_scenarios(&m, config.training.0, config.training.1, &mut rng);
    let validation = simulate_scenarios(&m, config.validation.0, config.validation.1, &mut rng);
    Ok((m, training, validation))
}

fn study_row(config: &StudyConfig, repetition: usize) -> Result<StudyRow, EvalError> {
    let (m, training, validation) = study_instance(config, repetition)?;
    let mut row = StudyRow {
        repetition,
        true_states: m.num_states(),
        true_transitions: m.transition_count(),
        shadowed: shadowed_transitions(&m),
        states: None,
        transitions: None,
        guard_nodes: None,
        guard_size: None,
        time: 0.0,
        p: None,
        error: None,
    };
    let started = Instant::now();
    let result = Synthesizer::new(&m.alphabet().clone(), &training, config.synth.clone())
        .map_err(|e| e.to_string())
        .and_then(|s| synthesize(config.method, &s));
    row.time = started.elapsed().as_secs_f64();
    match result {
        Ok(r) => {
            row.states = Some(r.states);
            row.transitions = Some(r.transitions);
            row.guard_nodes = r.guard_nodes;
            row.guard_size = Some(r.guard_size);
            row.p = Some(forward_check(&r.automaton, &validation)?);
        }
        Err(e) => row.error = Some(e),
    }
    Ok(row)
}

/// Run every repetition in parallel; rows come back in repetition order.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport, EvalError> {
    config.generator.validate()?;
    if config.validation.0 == 0 {
        return Err(EvalError::EmptyValidation);
    }
    let rows =
        (0..config.repetitions).into_par_iter().map(|rep| study_row(config, rep)).collect::<Result<Vec<_>, _>>()?;
    Ok(StudyReport {
        seed: config.seed,
        training: config.training,
        inputs: config.generator.inputs,
        method: config.method,
        rows,
    })
}
