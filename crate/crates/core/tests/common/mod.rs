//! Oracles shared by the integration tests. Nothing here calls the
//! library's own simulation, tree, or emptiness code.

#![allow(dead_code)]

use rand::Rng;

use eccsynth::automaton::{Algorithm, Alphabet, Automaton, Guard, InputAction, OutputAction, State, Transition};
use eccsynth::ltl::{Atom, Buchi, Formula};
use eccsynth::scenario::{NegativeScenario, Scenario, ScenarioElement};

pub const THREE_TRACES: &str = include_str!("../data/three_traces.scn");

fn guard_value(g: &Guard, x: &[bool]) -> bool {
    match g {
        Guard::Var(i) => x[*i],
        Guard::Not(a) => !guard_value(a, x),
        Guard::And(a, b) => guard_value(a, x) && guard_value(b, x),
        Guard::Or(a, b) => guard_value(a, x) || guard_value(b, x),
    }
}

/// One step: the first transition (in list order) whose event matches and
/// whose guard holds is taken; otherwise nothing moves and no event is sent.
pub fn step(m: &Automaton, state: usize, outputs: &[bool], input: &InputAction) -> (usize, OutputAction) {
    let s = &m.states()[state];
    match s.transitions.iter().find(|t| t.event == input.event && guard_value(&t.guard, &input.input)) {
        None => (state, OutputAction::new(None, outputs.to_vec())),
        Some(t) => {
            let d = &m.states()[t.dest];
            let next: Vec<bool> = outputs
                .iter()
                .enumerate()
                .map(|(z, &v)| if v { d.algorithm.when_true[z] } else { d.algorithm.when_false[z] })
                .collect();
            (t.dest, OutputAction::new(d.output_event, next))
        }
    }
}

/// Output actions produced along `inputs` from the initial configuration.
pub fn run(m: &Automaton, inputs: &[InputAction]) -> Vec<OutputAction> {
    let mut state = 0;
    let mut outputs = vec![false; m.alphabet().num_outputs()];
    inputs
        .iter()
        .map(|i| {
            let (q, o) = step(m, state, &outputs, i);
            state = q;
            outputs = o.output.clone();
            o
        })
        .collect()
}

pub fn replays(m: &Automaton, s: &Scenario) -> bool {
    let inputs: Vec<_> = s.elements.iter().map(|e| e.input.clone()).collect();
    run(m, &inputs).iter().zip(&s.elements).all(|(o, e)| *o == e.output)
}

/// A lasso is exhibited when the outputs match and the configuration after
/// the last element equals the one after element `loop_start` (1-based).
pub fn exhibits(m: &Automaton, neg: &NegativeScenario) -> bool {
    let mut state = 0;
    let mut outputs = vec![false; m.alphabet().num_outputs()];
    let mut configs = Vec::new();
    for e in &neg.scenario.elements {
        let (q, o) = step(m, state, &outputs, &e.input);
        if o != e.output {
            return false;
        }
        state = q;
        outputs = o.output;
        configs.push((state, outputs.clone()));
    }
    match neg.loop_start {
        None => true,
        Some(l) => configs[l - 1] == (state, outputs),
    }
}

pub fn atom_holds(a: &Atom, e: &ScenarioElement) -> bool {
    match a {
        Atom::InEvent(i) => e.input.event == *i,
        Atom::OutEvent(o) => e.output.event == *o,
        Atom::Input(i) => e.input.input[*i],
        Atom::Output(z) => e.output.output[*z],
    }
}

/// Truth of `f` at every position of the lasso `word`, where the position
/// after the last one is `loop_to` (0-based). Untils are least fixpoints,
/// releases greatest fixpoints.
pub fn lasso_values(f: &Formula<Atom>, word: &[ScenarioElement], loop_to: usize) -> Vec<bool> {
    let n = word.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_to };
    let fix = |init: bool, update: &dyn Fn(&[bool], usize) -> bool| {
        let mut v = vec![init; n];
        loop {
            let next: Vec<bool> = (0..n).map(|i| update(&v, i)).collect();
            if next == v {
                return v;
            }
            v = next;
        }
    };
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => word.iter().map(|e| atom_holds(a, e)).collect(),
        Formula::Not(a) => lasso_values(a, word, loop_to).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let (x, y) = (lasso_values(a, word, loop_to), lasso_values(b, word, loop_to));
            x.iter()
                .zip(&y)
                .map(|(&p, &q)| match f {
                    Formula::And(..) => p && q,
                    Formula::Or(..) => p || q,
                    _ => !p || q,
                })
                .collect()
        }
        Formula::Next(a) => {
            let x = lasso_values(a, word, loop_to);
            (0..n).map(|i| x[succ(i)]).collect()
        }
        Formula::Finally(a) => {
            let x = lasso_values(a, word, loop_to);
            fix(false, &|v, i| x[i] || v[succ(i)])
        }
        Formula::Globally(a) => {
            let x = lasso_values(a, word, loop_to);
            fix(true, &|v, i| x[i] && v[succ(i)])
        }
        Formula::Until(a, b) => {
            let (x, y) = (lasso_values(a, word, loop_to), lasso_values(b, word, loop_to));
            fix(false, &|v, i| y[i] || (x[i] && v[succ(i)]))
        }
        Formula::Release(a, b) => {
            let (x, y) = (lasso_values(a, word, loop_to), lasso_values(b, word, loop_to));
            fix(true, &|v, i| y[i] && (x[i] || v[succ(i)]))
        }
    }
}

pub fn holds_on_lasso(f: &Formula<Atom>, word: &[ScenarioElement], loop_to: usize) -> bool {
    lasso_values(f, word, loop_to)[0]
}

/// Nodes reachable from node 0 in an edge-labelled graph whose edges carry
/// acceptance membership, and whether some reachable strongly connected
/// component has an internal edge in every acceptance set.
pub fn has_accepting_cycle(succ: &[Vec<(usize, Vec<bool>)>], sets: usize) -> bool {
    let n = succ.len();
    // Tarjan, recursive; graphs here are small.
    struct T<'a> {
        succ: &'a [Vec<(usize, Vec<bool>)>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comp: Vec<usize>,
        comps: usize,
    }
    fn visit(t: &mut T<'_>, v: usize) {
        t.index[v] = Some(t.next);
        t.low[v] = t.next;
        t.next += 1;
        t.stack.push(v);
        t.on[v] = true;
        for &(w, _) in &t.succ[v] {
            match t.index[w] {
                None => {
                    visit(t, w);
                    t.low[v] = t.low[v].min(t.low[w]);
                }
                Some(i) if t.on[w] => t.low[v] = t.low[v].min(i),
                _ => {}
            }
        }
        if Some(t.low[v]) == t.index[v] {
            loop {
                let w = t.stack.pop().expect("non-empty");
                t.on[w] = false;
                t.comp[w] = t.comps;
                if w == v {
                    break;
                }
            }
            t.comps += 1;
        }
    }
    if n == 0 {
        return false;
    }
    let mut t = T {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comp: vec![usize::MAX; n],
        comps: 0,
    };
    visit(&mut t, 0);
    let mut covered = vec![vec![false; sets]; t.comps];
    let mut cyclic = vec![false; t.comps];
    for v in 0..n {
        if t.index[v].is_none() {
            continue;
        }
        for (w, acc) in &succ[v] {
            if t.comp[*w] == t.comp[v] {
                let c = t.comp[v];
                cyclic[c] = true;
                for (s, &a) in acc.iter().enumerate() {
                    covered[c][s] |= a;
                }
            }
        }
    }
    (0..t.comps).any(|c| cyclic[c] && covered[c].iter().all(|&b| b))
}

/// Whether the automaton accepts the lasso word.
pub fn buchi_accepts(b: &Buchi<Atom>, word: &[ScenarioElement], loop_to: usize) -> bool {
    let n = word.len();
    let states = b.edges.len();
    let id = |pos: usize, q: usize| pos * states + q;
    // Node 0 is (position 0, initial state); remap so the initial is first.
    let mut succ = vec![Vec::new(); n * states];
    for pos in 0..n {
        let next = if pos + 1 < n { pos + 1 } else { loop_to };
        for q in 0..states {
            for e in &b.edges[q] {
                if e.enabled(|a| atom_holds(a, &word[pos])) {
                    succ[id(pos, q)].push((id(next, e.target), e.accepting.clone()));
                }
            }
        }
    }
    let start = id(0, b.initial);
    has_accepting_cycle(&reroot(succ, start), b.acceptance_sets)
}

/// Same graph with `start` swapped into index 0.
pub fn reroot(mut succ: Vec<Vec<(usize, Vec<bool>)>>, start: usize) -> Vec<Vec<(usize, Vec<bool>)>> {
    if start == 0 {
        return succ;
    }
    let swap = |v: usize| {
        if v == start {
            0
        } else if v == 0 {
            start
        } else {
            v
        }
    };
    succ.swap(0, start);
    for edges in &mut succ {
        for (w, _) in edges.iter_mut() {
            *w = swap(*w);
        }
    }
    succ
}

/// All input actions, events outermost, input vectors in binary order.
pub fn input_actions(a: &Alphabet) -> Vec<InputAction> {
    let x = a.num_inputs();
    (0..a.input_events.len())
        .flat_map(|e| {
            (0..1usize << x).map(move |bits| InputAction::new(e, (0..x).map(|i| bits >> i & 1 == 1).collect()))
        })
        .collect()
}

/// Product of the machine under an unrestricted environment with `b`, and
/// whether it has an accepting cycle. A product node pairs a machine
/// configuration with an automaton state; the automaton reads the element
/// produced by the step into the configuration.
pub fn product_nonempty(m: &Automaton, b: &Buchi<Atom>) -> bool {
    use std::collections::HashMap;
    type Config = (usize, Vec<bool>, Option<ScenarioElement>);
    let actions = input_actions(m.alphabet());
    let mut ids: HashMap<(Config, usize), usize> = HashMap::new();
    let mut nodes: Vec<(Config, usize)> = Vec::new();
    let mut succ: Vec<Vec<(usize, Vec<bool>)>> = Vec::new();
    let init: Config = (0, vec![false; m.alphabet().num_outputs()], None);
    ids.insert((init.clone(), b.initial), 0);
    nodes.push((init, b.initial));
    succ.push(Vec::new());
    let mut i = 0;
    while i < nodes.len() {
        let ((state, outputs, _), q) = nodes[i].clone();
        for a in &actions {
            let (next, out) = step(m, state, &outputs, a);
            let element = ScenarioElement::new(a.clone(), out.clone());
            for e in &b.edges[q] {
                if !e.enabled(|atom| atom_holds(atom, &element)) {
                    continue;
                }
                let key: (Config, usize) = ((next, out.output.clone(), Some(element.clone())), e.target);
                let j = *ids.entry(key.clone()).or_insert_with(|| {
                    nodes.push(key);
                    succ.push(Vec::new());
                    nodes.len() - 1
                });
                succ[i].push((j, e.accepting.clone()));
            }
        }
        i += 1;
    }
    has_accepting_cycle(&succ, b.acceptance_sets)
}

/// Random machine for checker tests: any state may be silent and any
/// transition may enter a silent state.
pub fn random_machine(rng: &mut impl Rng, alphabet: &Alphabet, max_states: usize) -> Automaton {
    let c = rng.gen_range(1..=max_states);
    let x = alphabet.num_inputs();
    let z = alphabet.num_outputs();
    let events = alphabet.output_events.len();
    let guard = |rng: &mut dyn rand::RngCore| -> Guard {
        let v = Guard::var(rng.gen_range(0..x));
        match rng.gen_range(0..4) {
            0 | 1 => v,
            2 => Guard::not(v),
            _ => Guard::or(v.clone(), Guard::not(v)),
        }
    };
    let states = (0..c)
        .map(|_| {
            let output_event = rng.gen_range(0..=events).checked_sub(1);
            let mut algorithm = Algorithm::keep(z);
            for i in 0..z {
                algorithm.when_false[i] = rng.gen();
                algorithm.when_true[i] = rng.gen();
            }
            let transitions = (0..rng.gen_range(0..=2))
                .map(|_| Transition {
                    dest: rng.gen_range(0..c),
                    event: rng.gen_range(0..alphabet.input_events.len()),
                    guard: guard(rng),
                })
                .collect();
            State { output_event, algorithm, transitions }
        })
        .collect();
    Automaton::new(alphabet.clone(), states).expect("well-formed")
}

/// Random formula of depth at most `depth` over the atoms of `alphabet`.
pub fn random_formula(rng: &mut impl Rng, alphabet: &Alphabet, depth: usize) -> Formula<Atom> {
    if depth == 0 || rng.gen_bool(0.25) {
        let events = alphabet.output_events.len();
        return match rng.gen_range(0..4) {
            0 => Formula::Atom(Atom::OutEvent(rng.gen_range(0..=events).checked_sub(1))),
            1 if alphabet.num_inputs() > 0 => Formula::Atom(Atom::Input(rng.gen_range(0..alphabet.num_inputs()))),
            2 if alphabet.num_outputs() > 0 => Formula::Atom(Atom::Output(rng.gen_range(0..alphabet.num_outputs()))),
            3 => Formula::Atom(Atom::InEvent(rng.gen_range(0..alphabet.input_events.len()))),
            _ => Formula::Atom(Atom::OutEvent(None)),
        };
    }
    let sub = |rng: &mut _| random_formula(rng, alphabet, depth - 1);
    match rng.gen_range(0..10) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::next(sub(rng)),
        5 => Formula::finally(sub(rng)),
        6 => Formula::globally(sub(rng)),
        7 => Formula::until(sub(rng), sub(rng)),
        8 => Formula::release(sub(rng), sub(rng)),
        _ => Formula::globally(Formula::implies(sub(rng), Formula::finally(sub(rng)))),
    }
}

/// Parse-tree size bounded machines over the first scenario file's
/// alphabet, enumerated exhaustively: every state gets an output event
/// (or none), an algorithm, and up to `k` transitions whose guards are
/// drawn from `guards`.
pub fn enumerate_machines(
    alphabet: &Alphabet,
    states: usize,
    k: usize,
    guards: &[Guard],
    mut visit: impl FnMut(&Automaton),
) {
    let z = alphabet.num_outputs();
    let events = alphabet.output_events.len();
    let algorithms: Vec<Algorithm> = (0..1usize << (2 * z))
        .map(|bits| Algorithm {
            when_false: (0..z).map(|i| bits >> (2 * i) & 1 == 1).collect(),
            when_true: (0..z).map(|i| bits >> (2 * i + 1) & 1 == 1).collect(),
        })
        .collect();
    let mut lists: Vec<Vec<Transition>> = vec![Vec::new()];
    let single: Vec<Transition> = (0..states)
        .flat_map(|dest| {
            (0..alphabet.input_events.len())
                .flat_map(move |event| guards.iter().map(move |g| Transition { dest, event, guard: g.clone() }))
        })
        .collect();
    let mut frontier = lists.clone();
    for _ in 0..k {
        let next: Vec<Vec<Transition>> = frontier
            .iter()
            .flat_map(|l| {
                single.iter().map(move |t| {
                    let mut l = l.clone();
                    l.push(t.clone());
                    l
                })
            })
            .collect();
        lists.extend(next.iter().cloned());
        frontier = next;
    }
    let per_state: Vec<State> = (0..=events)
        .flat_map(|e| {
            let algorithms = &algorithms;
            let lists = &lists;
            algorithms.iter().flat_map(move |alg| {
                lists.iter().map(move |ts| State {
                    output_event: e.checked_sub(1),
                    algorithm: alg.clone(),
                    transitions: ts.clone(),
                })
            })
        })
        .collect();
    let mut choice = vec![0usize; states];
    loop {
        let m = Automaton::new(alphabet.clone(), choice.iter().map(|&i| per_state[i].clone()).collect())
            .expect("well-formed");
        visit(&m);
        let mut i = 0;
        loop {
            if i == states {
                return;
            }
            choice[i] += 1;
            if choice[i] < per_state.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Every Boolean function of `n` variables as a guard (for the constant
/// functions, `x1 & ~x1` and `x1 | ~x1`).
pub fn all_functions(n: usize) -> Vec<Guard> {
    let rows = 1usize << n;
    (0..1usize << rows)
        .map(|table| {
            let minterms: Vec<Guard> = (0..rows)
                .filter(|r| table >> r & 1 == 1)
                .map(|r| {
                    Guard::and_all(
                        (0..n)
                            .map(|i| if r >> i & 1 == 1 { Guard::var(i) } else { Guard::not(Guard::var(i)) })
                            .collect(),
                    )
                    .expect("n > 0")
                })
                .collect();
            Guard::or_all(minterms).unwrap_or_else(|| Guard::and(Guard::var(0), Guard::not(Guard::var(0))))
        })
        .collect()
}
