//! Minimization drivers over the encoder: smallest state count, fewest
//! transitions, smallest total guard size.
//!
//! Every reported minimum m comes with an UNSAT verdict at m − 1 in the
//! trail, and every returned machine is replayed against the scenarios
//! before it is handed out.

use std::fmt;
use std::time::{Duration, Instant};

use log::debug;
use thiserror::Error;

use crate::automaton::{Alphabet, Automaton};
use crate::encoder::{Counted, EncodeError, Encoder, EncodingParams};
use crate::sat::Backend;
use crate::scenario::{Scenario, ScenarioError, ScenarioTree};

/// One solver call: the parameters it ran with and what it said.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrailEntry {
    pub states: usize,
    pub guard_nodes: Option<usize>,
    /// Upper bound on the counted quantity, if any.
    pub bound: Option<(Counted, usize)>,
    pub verdict: Verdict,
    pub time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for TrailEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C={}", self.states)?;
        if let Some(p) = self.guard_nodes {
            write!(f, " P={p}")?;
        }
        match self.bound {
            Some((Counted::GuardNodes, n)) => write!(f, " N<={n}")?,
            Some((Counted::Transitions, n)) => write!(f, " T<={n}")?,
            None => {}
        }
        let verdict = match self.verdict {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Unknown => "UNKNOWN",
        };
        write!(f, " {verdict} {:.3}s", self.time.as_secs_f64())
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("no machine within the search limits (last query: {})", last_query(.trail))]
    Unsat { trail: Vec<TrailEntry> },
    #[error("solver gave up: {reason}")]
    Unknown { reason: String, trail: Vec<TrailEntry> },
    #[error("decoded machine fails scenario {scenario}")]
    ScenarioMismatch { scenario: usize },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Encode(EncodeError),
}

fn last_query(trail: &[TrailEntry]) -> String {
    trail.last().map_or_else(|| "none".into(), |t| t.to_string())
}

impl SynthError {
    pub fn trail(&self) -> &[TrailEntry] {
        match self {
            SynthError::Unsat { trail } | SynthError::Unknown { trail, .. } => trail,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub automaton: Automaton,
    pub states: usize,
    pub transitions: usize,
    pub guard_size: usize,
    /// Parse-tree budget the machine was found with; `None` for truth-table
    /// guards.
    pub guard_nodes: Option<usize>,
    pub solver_calls: usize,
    pub solver_time: Duration,
    pub trail: Vec<TrailEntry>,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub backend: Backend,
    /// Cap on transitions per state; K = min(C × |E^I|, cap).
    pub max_transitions: Option<usize>,
    pub symmetry_breaking: bool,
    pub binary_domains: bool,
    /// Largest state count tried before giving up.
    pub max_states: usize,
    /// Largest parse-tree budget tried when searching over P.
    pub max_guard_nodes: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            backend: Backend::default(),
            max_transitions: None,
            symmetry_breaking: true,
            binary_domains: false,
            max_states: 30,
            max_guard_nodes: 30,
        }
    }
}

impl SynthConfig {
    pub fn params(&self, alphabet: &Alphabet, states: usize, guard_nodes: Option<usize>) -> EncodingParams {
        let full = states * alphabet.input_events.len();
        let k = self.max_transitions.map_or(full, |cap| cap.min(full)).max(1);
        let mut p = EncodingParams::basic(states).with_max_transitions(k).with_bfs(self.symmetry_breaking);
        p.guard_nodes = guard_nodes;
        p.binary_domains = self.binary_domains;
        p
    }
}

/// Solver-call bookkeeping shared by the drivers.
#[derive(Default)]
struct Log {
    trail: Vec<TrailEntry>,
    calls: usize,
    time: Duration,
}

impl Log {
    fn solve(&mut self, enc: &mut Encoder, bound: Option<(Counted, usize)>) -> Result<Option<Automaton>, SynthError> {
        let started = Instant::now();
        let result = enc.solve();
        let time = started.elapsed();
        self.calls += 1;
        self.time += time;
        let verdict = match &result {
            Ok(Some(_)) => Verdict::Sat,
            Ok(None) => Verdict::Unsat,
            Err(_) => Verdict::Unknown,
        };
        let entry =
            TrailEntry { states: enc.params().states, guard_nodes: enc.params().guard_nodes, bound, verdict, time };
        debug!("{entry}");
        self.trail.push(entry);
        match result {
            Ok(r) => Ok(r),
            Err(EncodeError::Unknown(reason)) => {
                Err(SynthError::Unknown { reason, trail: std::mem::take(&mut self.trail) })
            }
            Err(e) => Err(SynthError::Encode(e)),
        }
    }

    fn unsat(&mut self) -> SynthError {
        SynthError::Unsat { trail: std::mem::take(&mut self.trail) }
    }
}

/// Scenarios plus search settings; each driver call is independent.
pub struct Synthesizer {
    alphabet: Alphabet,
    scenarios: Vec<Scenario>,
    tree: ScenarioTree,
    config: SynthConfig,
}

impl Synthesizer {
    pub fn new(alphabet: &Alphabet, scenarios: &[Scenario], config: SynthConfig) -> Result<Self, SynthError> {
        let tree = ScenarioTree::build(alphabet, scenarios)?;
        Ok(Self { alphabet: alphabet.clone(), scenarios: scenarios.to_vec(), tree, config })
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub(crate) fn encoder(&self, states: usize, guard_nodes: Option<usize>) -> Result<Encoder, SynthError> {
        let params = self.config.params(&self.alphabet, states, guard_nodes);
        Encoder::new(&self.alphabet, params, &self.tree, self.config.backend.create()).map_err(SynthError::Encode)
    }

    fn finish(
        &self,
        automaton: Automaton,
        guard_nodes: Option<usize>,
        log: Log,
    ) -> Result<SynthesisResult, SynthError> {
        if let Some(i) = self.scenarios.iter().position(|s| !automaton.satisfies(s)) {
            return Err(SynthError::ScenarioMismatch { scenario: i });
        }
        Ok(SynthesisResult {
            states: automaton.num_states(),
            transitions: automaton.transition_count(),
            guard_size: automaton.guard_complexity(),
            automaton,
            guard_nodes,
            solver_calls: log.calls,
            solver_time: log.time,
            trail: log.trail,
        })
    }

    fn min_states(&self, log: &mut Log) -> Result<(usize, Automaton), SynthError> {
        for c in 1..=self.config.max_states {
            let mut enc = self.encoder(c, None)?;
            if let Some(m) = log.solve(&mut enc, None)? {
                return Ok((c, m));
            }
        }
        Err(log.unsat())
    }

    /// Smallest state count, trying C = 1, 2, … with truth-table guards.
    pub fn basic_min(&self) -> Result<SynthesisResult, SynthError> {
        let mut log = Log::default();
        let (_, m) = self.min_states(&mut log)?;
        self.finish(m, None, log)
    }

    /// Smallest state count, then fewest transitions at that count.
    pub fn basic_min_star(&self) -> Result<SynthesisResult, SynthError> {
        let mut log = Log::default();
        let (c, mut best) = self.min_states(&mut log)?;
        let mut enc = self.encoder(c, None)?;
        enc.add_counter(Counted::Transitions).map_err(SynthError::Encode)?;
        while best.transition_count() > 0 {
            let bound = best.transition_count() - 1;
            enc.bound(bound).map_err(SynthError::Encode)?;
            match log.solve(&mut enc, Some((Counted::Transitions, bound)))? {
                Some(m) => best = m,
                None => break,
            }
        }
        self.finish(best, None, log)
    }

    /// One query: C states, P nodes per guard, at most N nodes in total.
    pub fn extended(
        &self,
        states: usize,
        guard_nodes: usize,
        total: Option<usize>,
    ) -> Result<Option<Automaton>, SynthError> {
        let mut log = Log::default();
        let mut enc = self.encoder(states, Some(guard_nodes))?;
        if let Some(n) = total {
            enc.add_counter(Counted::GuardNodes).map_err(SynthError::Encode)?;
            enc.bound(n).map_err(SynthError::Encode)?;
        }
        let m = log.solve(&mut enc, total.map(|n| (Counted::GuardNodes, n)))?;
        match m {
            Some(m) if !self.scenarios.iter().all(|s| m.satisfies(s)) => {
                let i = self.scenarios.iter().position(|s| !m.satisfies(s)).expect("some scenario fails");
                Err(SynthError::ScenarioMismatch { scenario: i })
            }
            m => Ok(m),
        }
    }

    /// Tighten N on one encoder until UNSAT. `None` if nothing fits under
    /// the initial bound.
    fn min_guard_size(
        &self,
        states: usize,
        guard_nodes: usize,
        initial: Option<usize>,
        log: &mut Log,
    ) -> Result<Option<Automaton>, SynthError> {
        let mut enc = self.encoder(states, Some(guard_nodes))?;
        enc.add_counter(Counted::GuardNodes).map_err(SynthError::Encode)?;
        if let Some(n) = initial {
            enc.bound(n).map_err(SynthError::Encode)?;
        }
        let Some(mut best) = log.solve(&mut enc, initial.map(|n| (Counted::GuardNodes, n)))? else {
            return Ok(None);
        };
        while best.guard_complexity() > 0 {
            let bound = best.guard_complexity() - 1;
            enc.bound(bound).map_err(SynthError::Encode)?;
            match log.solve(&mut enc, Some((Counted::GuardNodes, bound)))? {
                Some(m) => best = m,
                None => break,
            }
        }
        Ok(Some(best))
    }

    /// Smallest state count, then smallest total guard size with P nodes per
    /// guard.
    pub fn extended_min(&self, guard_nodes: usize) -> Result<SynthesisResult, SynthError> {
        let mut log = Log::default();
        let (c, _) = self.min_states(&mut log)?;
        self.extended_min_at(c, guard_nodes, log)
    }

    /// As [`Self::extended_min`] with a known state count.
    pub fn extended_min_with_states(&self, states: usize, guard_nodes: usize) -> Result<SynthesisResult, SynthError> {
        self.extended_min_at(states, guard_nodes, Log::default())
    }

    fn extended_min_at(&self, states: usize, guard_nodes: usize, mut log: Log) -> Result<SynthesisResult, SynthError> {
        match self.min_guard_size(states, guard_nodes, None, &mut log)? {
            Some(m) => self.finish(m, Some(guard_nodes), log),
            None => Err(log.unsat()),
        }
    }

    /// Search P = 1, 2, … for the smallest total guard size.
    ///
    /// Stops once P exceeds N_best − T_min (no larger P can beat the best
    /// found so far, assuming T_min transitions survive) or once `plateau`
    /// successive P values brought no improvement. `None` searches up to the
    /// bound.
    pub fn extended_min_ub(&self, plateau: Option<usize>) -> Result<SynthesisResult, SynthError> {
        let star = self.basic_min_star()?;
        let (c, t_min) = (star.states, star.transitions);
        let mut log = Log { trail: star.trail, calls: star.solver_calls, time: star.solver_time };
        let mut best: Option<(Automaton, usize)> = None;
        let mut last_improvement = 0;
        for p in 1..=self.config.max_guard_nodes {
            if let Some((m, _)) = &best {
                if p > m.guard_complexity().saturating_sub(t_min) {
                    break;
                }
            }
            let bound = best.as_ref().map(|(m, _)| m.guard_complexity().saturating_sub(1));
            if let Some(m) = self.min_guard_size(c, p, bound, &mut log)? {
                last_improvement = p;
                best = Some((m, p));
            }
            if best.is_some() && plateau.is_some_and(|w| p - last_improvement >= w) {
                break;
            }
            if best.as_ref().is_some_and(|(m, _)| m.guard_complexity() == 0) {
                break;
            }
        }
        match best {
            Some((m, p)) => self.finish(m, Some(p), log),
            None => Err(log.unsat()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{InputAction, OutputAction};
    use crate::scenario::ScenarioElement;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn el(input: &str, event: Option<usize>, out: &str) -> ScenarioElement {
        ScenarioElement::new(InputAction::new(0, bits(input)), OutputAction::new(event, bits(out)))
    }

    fn alphabet() -> Alphabet {
        Alphabet::with_counts(&["R"], &["A", "B"], 2, 1).unwrap()
    }

    fn three_traces() -> Vec<Scenario> {
        let (a, b) = (Some(0), Some(1));
        vec![
            Scenario::new(vec![el("00", None, "0"), el("01", b, "1"), el("00", None, "1"), el("01", b, "0")]),
            Scenario::new(vec![el("00", None, "0"), el("10", a, "0"), el("00", None, "0"), el("01", b, "1")]),
            Scenario::new(vec![el("00", None, "0"), el("10", a, "0"), el("10", a, "0")]),
        ]
    }

    fn synth(s: &[Scenario]) -> Synthesizer {
        Synthesizer::new(&alphabet(), s, SynthConfig::default()).unwrap()
    }

    #[test]
    fn basic_min_trail_certifies_minimum() {
        let r = synth(&three_traces()).basic_min().unwrap();
        assert_eq!(r.states, 2);
        let verdicts: Vec<_> = r.trail.iter().map(|t| (t.states, t.verdict)).collect();
        assert_eq!(verdicts, vec![(1, Verdict::Unsat), (2, Verdict::Sat)]);
    }

    #[test]
    fn all_passive_scenario_is_trivial() {
        let s = [Scenario::new(vec![el("00", None, "0")])];
        let r = synth(&s).basic_min().unwrap();
        assert_eq!(r.states, 1);
        let star = synth(&s).basic_min_star().unwrap();
        assert_eq!(star.transitions, 0);
        let ext = synth(&s).extended_min(1).unwrap();
        assert_eq!(ext.guard_size, 0);
    }

    #[test]
    fn extended_queries() {
        let s = synth(&three_traces());
        assert!(s.extended(1, 3, None).unwrap().is_none());
        let m = s.extended(2, 1, None).unwrap().unwrap();
        assert!((3..=5).contains(&m.guard_complexity()));
        assert!(s.extended(2, 1, Some(0)).unwrap().is_none());
    }

    #[test]
    fn plateau_zero_stops_at_first_sat() {
        let s = synth(&three_traces());
        let r = s.extended_min_ub(Some(0)).unwrap();
        assert_eq!(r.guard_nodes, Some(1));
        let full = s.extended_min_ub(None).unwrap();
        assert!(full.guard_size <= r.guard_size);
    }

    #[test]
    fn trail_lines_are_readable() {
        let r = synth(&three_traces()).extended_min(1).unwrap();
        let last = r.trail.last().unwrap();
        assert_eq!(last.verdict, Verdict::Unsat);
        assert!(last.to_string().starts_with(&format!("C=2 P=1 N<={} UNSAT", r.guard_size - 1)));
    }
}
