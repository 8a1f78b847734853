use std::fmt::Write as _;

use crate::automaton::{Algorithm, Alphabet, Automaton, Guard, State, Transition};

use super::{content_lines, words, write_header, HeaderBuilder, SyntaxError};

/// Canonical machine text. States and transitions are numbered from 1;
/// transitions are listed in priority order.
///
/// ```text
/// inevents R
/// outevents A B
/// invars 1
/// outvars 1
/// state 1 out=. alg=-
///   1: R [x1] -> 2
/// state 2 out=A alg=1
/// ```
///
/// The `alg` string has one character per output variable: `0` and `1` set
/// the value, `-` keeps it, `~` flips it.
pub fn write_automaton(m: &Automaton) -> String {
    let a = m.alphabet();
    let mut out = String::new();
    write_header(a, &mut out);
    for (q, s) in m.states().iter().enumerate() {
        let _ = writeln!(
            out,
            "state {} out={} alg={}",
            q + 1,
            a.output_event_name(s.output_event),
            algorithm_string(&s.algorithm)
        );
        for (k, t) in s.transitions.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {}: {} [{}] -> {}",
                k + 1,
                a.input_events[t.event],
                t.guard.display(&a.input_vars),
                t.dest + 1
            );
        }
    }
    out
}

fn algorithm_string(alg: &Algorithm) -> String {
    alg.when_false
        .iter()
        .zip(&alg.when_true)
        .map(|(&f, &t)| match (f, t) {
            (false, false) => '0',
            (true, true) => '1',
            (false, true) => '-',
            (true, false) => '~',
        })
        .collect()
}

fn parse_algorithm(text: &str, line: usize, column: usize, width: usize) -> Result<Algorithm, SyntaxError> {
    let mut alg = Algorithm::keep(0);
    for (i, c) in text.chars().enumerate() {
        let (f, t) = match c {
            '0' => (false, false),
            '1' => (true, true),
            '-' => (false, true),
            '~' => (true, false),
            _ => return Err(SyntaxError::new(line, column + i, format!("expected 0, 1, - or ~, found `{c}`"))),
        };
        alg.when_false.push(f);
        alg.when_true.push(t);
    }
    if alg.width() != width {
        return Err(SyntaxError::new(
            line,
            column,
            format!("expected {width} algorithm entries, found {}", alg.width()),
        ));
    }
    Ok(alg)
}

struct PendingTransition {
    line: usize,
    column: usize,
    event: usize,
    guard: Guard,
    dest: usize,
}

pub fn parse_automaton(text: &str) -> Result<Automaton, SyntaxError> {
    let mut header = HeaderBuilder::default();
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Vec<(State, Vec<PendingTransition>)> = Vec::new();
    let mut last_line = 1;
    for (n, line) in content_lines(text) {
        last_line = n;
        if alphabet.is_none() && header.line(n, line)? {
            continue;
        }
        let w = words(line);
        if w[0].1 == "state" {
            if alphabet.is_none() {
                alphabet = Some(std::mem::take(&mut header).finish(n)?);
            }
            let a = alphabet.as_ref().expect("alphabet set above");
            states.push((parse_state_line(a, n, &w, states.len() + 1)?, Vec::new()));
            continue;
        }
        let (Some(a), Some((_, pending))) = (&alphabet, states.last_mut()) else {
            return Err(SyntaxError::new(n, w[0].0, format!("expected a header line or `state`, found `{}`", w[0].1)));
        };
        pending.push(parse_transition_line(a, n, line, pending.len() + 1)?);
    }
    let Some(alphabet) = alphabet else {
        return Err(SyntaxError::new(last_line, 1, "no states"));
    };
    let count = states.len();
    let mut done = Vec::with_capacity(count);
    for (mut state, pending) in states {
        for t in pending {
            if t.dest == 0 || t.dest > count {
                return Err(SyntaxError::new(t.line, t.column, format!("no state {} (machine has {count})", t.dest)));
            }
            state.transitions.push(Transition { dest: t.dest - 1, event: t.event, guard: t.guard });
        }
        done.push(state);
    }
    Automaton::new(alphabet, done).map_err(|e| SyntaxError::new(last_line, 1, e.to_string()))
}

fn parse_state_line(a: &Alphabet, n: usize, w: &[(usize, &str)], expected: usize) -> Result<State, SyntaxError> {
    let [_, (ic, id), (oc, out), (gc, alg)] = w else {
        let col = w.get(4).map_or(w[0].0, |x| x.0);
        return Err(SyntaxError::new(n, col, "expected `state <n> out=<event> alg=<values>`"));
    };
    if id.parse::<usize>().ok() != Some(expected) {
        return Err(SyntaxError::new(n, *ic, format!("expected state number {expected}")));
    }
    let event = out.strip_prefix("out=").ok_or_else(|| SyntaxError::new(n, *oc, "expected `out=`"))?;
    let output_event = match event {
        "." => None,
        name => Some(
            a.output_event(name)
                .ok_or_else(|| SyntaxError::new(n, oc + 4, format!("unknown output event `{name}`")))?,
        ),
    };
    let alg = alg.strip_prefix("alg=").ok_or_else(|| SyntaxError::new(n, *gc, "expected `alg=`"))?;
    let algorithm = parse_algorithm(alg, n, gc + 4, a.num_outputs())?;
    Ok(State { output_event, algorithm, transitions: Vec::new() })
}

fn parse_transition_line(
    a: &Alphabet,
    n: usize,
    line: &str,
    expected: usize,
) -> Result<PendingTransition, SyntaxError> {
    let w = words(line);
    let (kc, k) = w[0];
    if k.strip_suffix(':').and_then(|k| k.parse::<usize>().ok()) != Some(expected) {
        return Err(SyntaxError::new(n, kc, format!("expected `{expected}:`")));
    }
    let Some(&(ec, event)) = w.get(1) else {
        return Err(SyntaxError::new(n, kc + k.len(), "expected an input event"));
    };
    let event_id =
        a.input_event(event).ok_or_else(|| SyntaxError::new(n, ec, format!("unknown input event `{event}`")))?;
    let rest_start = ec - 1 + event.len();
    let rest = &line[rest_start..];
    let open = rest.find('[').filter(|&i| rest[..i].trim().is_empty());
    let close = rest.rfind(']');
    let (Some(open), Some(close)) = (open, close) else {
        return Err(SyntaxError::new(n, rest_start + 1, "expected `[guard]`"));
    };
    let guard_col = rest_start + open + 2;
    let guard = parse_guard_at(&rest[open + 1..close], &a.input_vars, n, guard_col)?;
    let tail = &rest[close + 1..];
    let tail_col = rest_start + close + 2;
    let tw = words(tail);
    let [(_, "->"), (dc, dest)] = tw[..] else {
        let col = tw.first().map_or(tail_col, |x| tail_col + x.0 - 1);
        return Err(SyntaxError::new(n, col, "expected `-> <state>`"));
    };
    let dest_col = tail_col + dc - 1;
    let dest = dest
        .parse::<usize>()
        .map_err(|_| SyntaxError::new(n, dest_col, format!("expected a state number, found `{dest}`")))?;
    Ok(PendingTransition { line: n, column: dest_col, event: event_id, guard, dest })
}

/// Parses a guard written with `~`, `&`, `|` and parentheses. Binary
/// operators are right-associative and `&` binds tighter than `|`.
/// Variables are named by `names`, or as `x<i>` (1-based).
pub fn parse_guard(text: &str, names: &[String]) -> Result<Guard, SyntaxError> {
    parse_guard_at(text, names, 1, 1)
}

fn parse_guard_at(text: &str, names: &[String], line: usize, column: usize) -> Result<Guard, SyntaxError> {
    let mut p = GuardParser { text, pos: 0, names, line, column };
    let g = p.or()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(g)
}

struct GuardParser<'a> {
    text: &'a str,
    pos: usize,
    names: &'a [String],
    line: usize,
    column: usize,
}

impl GuardParser<'_> {
    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let col = self.column + self.text[..self.pos].chars().count();
        SyntaxError::new(self.line, col, message)
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Guard, SyntaxError> {
        let left = self.and()?;
        if self.eat('|') {
            Ok(Guard::or(left, self.or()?))
        } else {
            Ok(left)
        }
    }

    fn and(&mut self) -> Result<Guard, SyntaxError> {
        let left = self.unary()?;
        if self.eat('&') {
            Ok(Guard::and(left, self.and()?))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> Result<Guard, SyntaxError> {
        if self.eat('~') || self.eat('!') {
            return Ok(Guard::not(self.unary()?));
        }
        if self.eat('(') {
            let g = self.or()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(g);
        }
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.')).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a variable"));
        }
        let name = &rest[..len];
        let index = self.names.iter().position(|n| n == name).or_else(|| {
            name.strip_prefix('x')
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|&i| i >= 1 && i <= self.names.len())
                .map(|i| i - 1)
        });
        let Some(index) = index else {
            return Err(self.error(format!("unknown input variable `{name}`")));
        };
        self.pos += len;
        Ok(Guard::var(index))
    }
}

/// Graphviz rendering: nodes show the output event and algorithm, edges
/// show priority, event and guard.
pub fn automaton_to_dot(m: &Automaton) -> String {
    let a = m.alphabet();
    let mut out = String::from(
        "digraph automaton {\n  rankdir=LR;\n  node [shape=box];\n  start [shape=point];\n  start -> q1;\n",
    );
    for (q, s) in m.states().iter().enumerate() {
        let alg = algorithm_string(&s.algorithm);
        let event = a.output_event_name(s.output_event);
        let label =
            if alg.is_empty() { format!("q{}\\n{event}", q + 1) } else { format!("q{}\\n{event}\\n{alg}", q + 1) };
        let _ = writeln!(out, "  q{} [label=\"{label}\"];", q + 1);
    }
    for (q, s) in m.states().iter().enumerate() {
        for (k, t) in s.transitions.iter().enumerate() {
            let _ = writeln!(
                out,
                "  q{} -> q{} [label=\"{}: {} [{}]\"];",
                q + 1,
                t.dest + 1,
                k + 1,
                a.input_events[t.event],
                t.guard.display(&a.input_vars)
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TEXT: &str = "\
inevents R
outevents A B
invars 2
outvars 1
state 1 out=. alg=-
  1: R [x1 & ~x2] -> 2
state 2 out=A alg=1
  1: R [x2] -> 3
  2: R [x1 | x2] -> 1
state 3 out=B alg=~
";

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn canonical_text_round_trips() {
        let m = parse_automaton(TEXT).unwrap();
        assert_eq!(m.num_states(), 3);
        assert_eq!(m.states()[0].transitions[0].guard, Guard::and(Guard::var(0), Guard::not(Guard::var(1))));
        assert_eq!(m.states()[2].algorithm, Algorithm::flip(1));
        assert_eq!(write_automaton(&m), TEXT);
    }

    #[test]
    fn guard_precedence_and_associativity() {
        let n = names(3);
        let g = parse_guard("x1 | x2 & ~x3", &n).unwrap();
        assert_eq!(g, Guard::or(Guard::var(0), Guard::and(Guard::var(1), Guard::not(Guard::var(2)))));
        let g = parse_guard("(x1 & x2) & x3", &n).unwrap();
        assert_eq!(g.display(&n).to_string(), "(x1 & x2) & x3");
        assert_eq!(
            parse_guard("x1 & x2 & x3", &n).unwrap(),
            Guard::and(Guard::var(0), Guard::and(Guard::var(1), Guard::var(2)))
        );
        let e = parse_guard("x1 & x4", &n).unwrap_err();
        assert_eq!(e.column, 6);
        let e = parse_guard("(x1", &n).unwrap_err();
        assert_eq!(e.column, 4);
    }

    #[test]
    fn errors_carry_positions() {
        let pos = |s: &str| {
            let e = parse_automaton(s).unwrap_err();
            (e.line, e.column)
        };
        let head = "inevents R\noutevents A\ninvars 1\noutvars 1\n";
        assert_eq!(pos(&format!("{head}state 2 out=A alg=0\n")), (5, 7));
        assert_eq!(pos(&format!("{head}state 1 out=Q alg=0\n")), (5, 13));
        assert_eq!(pos(&format!("{head}state 1 out=A alg=0x\n")), (5, 20));
        assert_eq!(pos(&format!("{head}state 1 out=A alg=0\n  1: R [y] -> 1\n")), (6, 9));
        assert_eq!(pos(&format!("{head}state 1 out=A alg=0\n  1: R [x1] -> 5\n")), (6, 16));
        assert_eq!(pos(&format!("{head}state 1 out=A alg=0\n  1: R [x1] => 1\n")), (6, 13));
        assert_eq!(pos(""), (1, 1));
    }

    #[test]
    fn dot_labels() {
        let dot = automaton_to_dot(&parse_automaton(TEXT).unwrap());
        assert!(dot.contains("q1 -> q2 [label=\"1: R [x1 & ~x2]\"];"));
        assert!(dot.contains("q3 [label=\"q3\\nB\\n~\"];"));
    }

    fn guard_strategy(vars: usize) -> impl Strategy<Value = Guard> {
        let leaf = (0..vars).prop_map(Guard::var);
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Guard::not),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Guard::and(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Guard::or(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn guard_display_parses_back(g in guard_strategy(3)) {
            let n = names(3);
            let text = g.display(&n).to_string();
            prop_assert_eq!(parse_guard(&text, &n).unwrap(), g);
        }
    }
}
