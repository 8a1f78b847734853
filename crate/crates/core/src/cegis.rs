//! Counterexample-guided synthesis against an LTL specification.
//!
//! Each round solves for a candidate that reproduces the positive scenarios
//! and none of the collected negative ones, model-checks it in closed loop
//! with the plant, and turns every counterexample into a new negative
//! scenario. Negative scenarios are added to the live encoder, so only the
//! clauses for new tree nodes are generated.

use std::fmt;
use std::time::{Duration, Instant};

use log::info;
use thiserror::Error;

use crate::automaton::{Alphabet, Automaton};
use crate::encoder::{Counted, EncodeError, Encoder};
use crate::ltl::{LtlProperty, Plant, Verifier, VerifyError};
use crate::scenario::{NegativeScenario, Scenario};
use crate::synthesis::{SynthConfig, SynthError, Synthesizer};

#[derive(Debug, Clone)]
pub struct CegisConfig {
    pub max_iterations: usize,
    /// Largest total guard size tried by the bound-raising variant; `None`
    /// uses C·K·P, where every bound is vacuous.
    pub guard_size_ceiling: Option<usize>,
    pub verifier: Verifier,
}

impl Default for CegisConfig {
    fn default() -> Self {
        Self { max_iterations: 1000, guard_size_ceiling: None, verifier: Verifier::default() }
    }
}

/// One candidate and what the verifier said about it.
#[derive(Debug, Clone)]
pub struct Iteration {
    pub candidate: Automaton,
    pub guard_bound: Option<usize>,
    pub counterexamples: usize,
    /// Negative scenarios collected before this candidate was produced.
    pub excluded: usize,
    pub solver_time: Duration,
    pub verify_time: Duration,
}

impl fmt::Display for Iteration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.candidate;
        write!(f, "C={} T={} N={}", m.num_states(), m.transition_count(), m.guard_complexity())?;
        if let Some(n) = self.guard_bound {
            write!(f, " (N<={n})")?;
        }
        write!(
            f,
            " counterexamples={} solve={:.3}s verify={:.3}s",
            self.counterexamples,
            self.solver_time.as_secs_f64(),
            self.verify_time.as_secs_f64()
        )
    }
}

#[derive(Debug, Error)]
pub enum CegisError {
    #[error("no machine with {states} states and {guard_nodes} nodes per guard meets the specification")]
    Unsat { states: usize, guard_nodes: usize, log: Vec<Iteration> },
    #[error("no verified machine with total guard size up to {ceiling}")]
    GuardSizeCeiling { ceiling: usize, log: Vec<Iteration> },
    #[error("no verified machine after {cap} iterations")]
    IterationCap { cap: usize, log: Vec<Iteration> },
    #[error("candidate reproduces an excluded counterexample")]
    NoProgress { log: Vec<Iteration> },
    #[error("solver gave up: {0}")]
    Unknown(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Encode(EncodeError),
}

impl From<EncodeError> for CegisError {
    fn from(e: EncodeError) -> Self {
        match e {
            EncodeError::Unknown(reason) => CegisError::Unknown(reason),
            e => CegisError::Encode(e),
        }
    }
}

impl CegisError {
    /// The specification cannot be met at the searched parameters.
    pub fn is_unsat(&self) -> bool {
        matches!(self, CegisError::Unsat { .. } | CegisError::GuardSizeCeiling { .. })
    }

    pub fn log(&self) -> &[Iteration] {
        match self {
            CegisError::Unsat { log, .. }
            | CegisError::GuardSizeCeiling { log, .. }
            | CegisError::IterationCap { log, .. }
            | CegisError::NoProgress { log } => log,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct CegisResult {
    pub automaton: Automaton,
    pub states: usize,
    pub guard_nodes: usize,
    /// Guard-size bound in force when the machine was found.
    pub guard_bound: Option<usize>,
    pub log: Vec<Iteration>,
    /// Every negative scenario collected, in the order added.
    pub negatives: Vec<NegativeScenario>,
}

impl CegisResult {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }
}

/// One-shot solve with both positive and negative scenarios.
#[allow(clippy::too_many_arguments)]
pub fn complete(
    alphabet: &Alphabet,
    positives: &[Scenario],
    negatives: &[NegativeScenario],
    states: usize,
    guard_nodes: usize,
    guard_bound: Option<usize>,
    config: &SynthConfig,
) -> Result<Option<Automaton>, CegisError> {
    let synth = Synthesizer::new(alphabet, positives, config.clone())?;
    let mut enc = synth.encoder(states, Some(guard_nodes))?;
    if let Some(n) = guard_bound {
        enc.add_counter(Counted::GuardNodes)?;
        enc.bound(n)?;
    }
    for n in negatives {
        enc.add_negative(&n.scenario, n.loop_start)?;
    }
    Ok(enc.solve()?)
}

pub struct Cegis {
    synth: Synthesizer,
    properties: Vec<LtlProperty>,
    plant: Plant,
    config: CegisConfig,
}

/// Mutable state of one run.
struct Run {
    negatives: Vec<NegativeScenario>,
    log: Vec<Iteration>,
}

enum Round {
    Verified(Automaton),
    Unsat,
}

impl Cegis {
    pub fn new(
        alphabet: &Alphabet,
        positives: &[Scenario],
        properties: Vec<LtlProperty>,
        plant: Plant,
        synth: SynthConfig,
        config: CegisConfig,
    ) -> Result<Self, CegisError> {
        Ok(Self { synth: Synthesizer::new(alphabet, positives, synth)?, properties, plant, config })
    }

    pub fn synthesizer(&self) -> &Synthesizer {
        &self.synth
    }

    fn encoder(
        &self,
        states: usize,
        guard_nodes: usize,
        bound: Option<usize>,
        run: &Run,
    ) -> Result<Encoder, CegisError> {
        let mut enc = self.synth.encoder(states, Some(guard_nodes))?;
        if let Some(n) = bound {
            enc.add_counter(Counted::GuardNodes)?;
            enc.bound(n)?;
        }
        for n in &run.negatives {
            enc.add_negative(&n.scenario, n.loop_start)?;
        }
        Ok(enc)
    }

    /// Solve/verify rounds on one encoder until a candidate verifies or the
    /// encoder becomes UNSAT. `first` is checked before any solving.
    fn rounds(
        &self,
        enc: &mut Encoder,
        bound: Option<usize>,
        mut first: Option<Automaton>,
        run: &mut Run,
    ) -> Result<Round, CegisError> {
        loop {
            if run.log.len() >= self.config.max_iterations {
                return Err(CegisError::IterationCap {
                    cap: self.config.max_iterations,
                    log: std::mem::take(&mut run.log),
                });
            }
            let started = Instant::now();
            let candidate = match first.take() {
                Some(m) => m,
                None => match enc.solve()? {
                    Some(m) => m,
                    None => return Ok(Round::Unsat),
                },
            };
            let solver_time = started.elapsed();
            let started = Instant::now();
            let cex = self.config.verifier.verify(&candidate, &self.plant, &self.properties)?;
            let verify_time = started.elapsed();
            let record = Iteration {
                candidate,
                guard_bound: bound,
                counterexamples: cex.len(),
                excluded: run.negatives.len(),
                solver_time,
                verify_time,
            };
            info!("iteration {}: {record}", run.log.len() + 1);
            run.log.push(record);
            if cex.is_empty() {
                let m = run.log.last().expect("just pushed").candidate.clone();
                return Ok(Round::Verified(m));
            }
            let mut grew = false;
            for c in cex {
                let n = c.to_negative();
                let update = enc.add_negative(&n.scenario, n.loop_start)?;
                if !update.is_empty() {
                    grew = true;
                    run.negatives.push(n);
                }
            }
            if !grew {
                return Err(CegisError::NoProgress { log: std::mem::take(&mut run.log) });
            }
        }
    }

    fn result(
        &self,
        automaton: Automaton,
        states: usize,
        guard_nodes: usize,
        bound: Option<usize>,
        run: Run,
    ) -> CegisResult {
        CegisResult { automaton, states, guard_nodes, guard_bound: bound, log: run.log, negatives: run.negatives }
    }

    /// CEGIS at fixed C and P with an optional bound on total guard size.
    pub fn complete_cegis(
        &self,
        states: usize,
        guard_nodes: usize,
        guard_bound: Option<usize>,
    ) -> Result<CegisResult, CegisError> {
        let mut run = Run { negatives: Vec::new(), log: Vec::new() };
        let mut enc = self.encoder(states, guard_nodes, guard_bound, &run)?;
        match self.rounds(&mut enc, guard_bound, None, &mut run)? {
            Round::Verified(m) => Ok(self.result(m, states, guard_nodes, guard_bound, run)),
            Round::Unsat => Err(CegisError::Unsat { states, guard_nodes, log: run.log }),
        }
    }

    /// Estimate C and P from the scenarios alone, then run CEGIS with the
    /// guard size unbounded. The scenario-only machine is checked first.
    pub fn complete_star_cegis(&self, plateau: Option<usize>) -> Result<CegisResult, CegisError> {
        let est = self.synth.extended_min_ub(plateau)?;
        let (c, p) = (est.states, est.guard_nodes.expect("parse-tree guards"));
        let mut run = Run { negatives: Vec::new(), log: Vec::new() };
        let mut enc = self.encoder(c, p, None, &run)?;
        match self.rounds(&mut enc, None, Some(est.automaton), &mut run)? {
            Round::Verified(m) => Ok(self.result(m, c, p, None, run)),
            Round::Unsat => Err(CegisError::Unsat { states: c, guard_nodes: p, log: run.log }),
        }
    }

    /// As [`Self::complete_star_cegis`], but start with the guard size bound
    /// at the scenario-only minimum and raise it by one whenever CEGIS
    /// becomes UNSAT. Each raise rebuilds the encoder from the positive
    /// scenarios and all collected negative ones.
    pub fn complete_star_min_cegis(&self, plateau: Option<usize>) -> Result<CegisResult, CegisError> {
        let est = self.synth.extended_min_ub(plateau)?;
        let (c, p) = (est.states, est.guard_nodes.expect("parse-tree guards"));
        let mut n = est.guard_size;
        let mut run = Run { negatives: Vec::new(), log: Vec::new() };
        let mut enc = self.encoder(c, p, Some(n), &run)?;
        let ceiling = self.config.guard_size_ceiling.unwrap_or(c * enc.max_transitions() * p);
        let mut first = Some(est.automaton);
        loop {
            match self.rounds(&mut enc, Some(n), first.take(), &mut run)? {
                Round::Verified(m) => return Ok(self.result(m, c, p, Some(n), run)),
                Round::Unsat if n >= ceiling => {
                    return Err(CegisError::GuardSizeCeiling { ceiling, log: run.log });
                }
                Round::Unsat => {
                    n += 1;
                    info!("raising guard size bound to {n}");
                    enc = self.encoder(c, p, Some(n), &run)?;
                }
            }
        }
    }
}
