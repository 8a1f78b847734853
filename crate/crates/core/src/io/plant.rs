use std::fmt::Write as _;

use crate::automaton::{Alphabet, InputAction};
use crate::ltl::{ExplicitPlant, OutputPattern, Plant, PlantRule};

use super::{bit_string, bits, content_lines, split_action, words, SyntaxError};

/// Plant table. Either the single keyword `free`, or:
///
/// ```text
/// states idle busy
/// initial idle
/// idle * -> busy R[01]
/// busy A[1] -> idle R[00]
/// busy . -> busy R[00]
/// ```
///
/// A rule reads `<from> <pattern> -> <to> <EVENT>[bits]`. The pattern
/// matches controller outputs: `*` any, `E` an output event, `.` no event,
/// each optionally followed by `[bits]` to also fix the output values.
pub fn parse_plant(text: &str, alphabet: &Alphabet) -> Result<Plant, SyntaxError> {
    let lines: Vec<_> = content_lines(text).collect();
    let Some(&(first_line, first)) = lines.first() else {
        return Err(SyntaxError::new(1, 1, "empty plant file"));
    };
    let fw = words(first);
    if fw[0].1 == "free" {
        if let Some(&(col, extra)) = fw.get(1) {
            return Err(SyntaxError::new(first_line, col, format!("unexpected `{extra}` after `free`")));
        }
        if let Some(&(n, line)) = lines.get(1) {
            return Err(SyntaxError::new(n, words(line)[0].0, "nothing may follow `free`"));
        }
        return Ok(Plant::Free);
    }

    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<usize> = None;
    let mut pending = Vec::new();
    for &(n, line) in &lines {
        let w = words(line);
        match w[0].1 {
            "states" => {
                if states.is_some() {
                    return Err(SyntaxError::new(n, w[0].0, "`states` given twice"));
                }
                if w.len() < 2 {
                    return Err(SyntaxError::new(n, w[0].0 + 6, "expected at least one state name"));
                }
                let names: Vec<String> = w[1..].iter().map(|(_, s)| s.to_string()).collect();
                for (i, (col, name)) in w[1..].iter().enumerate() {
                    if names[..i].iter().any(|x| x == name) {
                        return Err(SyntaxError::new(n, *col, format!("duplicate state `{name}`")));
                    }
                }
                states = Some(names);
            }
            "initial" => {
                let Some(names) = &states else {
                    return Err(SyntaxError::new(n, w[0].0, "`initial` before `states`"));
                };
                let [_, (col, name)] = w[..] else {
                    return Err(SyntaxError::new(n, w[0].0, "expected `initial <state>`"));
                };
                initial = Some(state_index(names, name, n, col)?);
            }
            _ => {
                let Some(names) = &states else {
                    return Err(SyntaxError::new(n, w[0].0, "rule before `states`"));
                };
                pending.push(parse_rule(alphabet, names, n, &w)?);
            }
        }
    }
    let last = lines.last().map_or(1, |l| l.0);
    let states = states.ok_or_else(|| SyntaxError::new(last, 1, "missing `states` line"))?;
    let initial = initial.ok_or_else(|| SyntaxError::new(last, 1, "missing `initial` line"))?;
    Ok(Plant::Explicit(ExplicitPlant { states, initial, rules: pending }))
}

fn state_index(names: &[String], name: &str, line: usize, column: usize) -> Result<usize, SyntaxError> {
    names
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| SyntaxError::new(line, column, format!("unknown plant state `{name}`")))
}

fn parse_rule(a: &Alphabet, names: &[String], n: usize, w: &[(usize, &str)]) -> Result<PlantRule, SyntaxError> {
    let [(fc, from), (pc, pattern), (ac, arrow), (tc, to), (ec, emit)] = w else {
        let col = w.get(5).map_or(w[0].0, |x| x.0);
        return Err(SyntaxError::new(n, col, "expected `<from> <pattern> -> <to> <EVENT>[bits]`"));
    };
    if *arrow != "->" {
        return Err(SyntaxError::new(n, *ac, "expected `->`"));
    }
    let from = state_index(names, from, n, *fc)?;
    let to = state_index(names, to, n, *tc)?;
    let on = parse_pattern(a, pattern, n, *pc)?;
    let (event, values, vc) = split_action(emit, n, *ec)?;
    let event =
        a.input_event(event).ok_or_else(|| SyntaxError::new(n, *ec, format!("unknown input event `{event}`")))?;
    let emit = InputAction::new(event, bits(values, n, vc, a.num_inputs())?);
    Ok(PlantRule { from, on, to, emit })
}

fn parse_pattern(a: &Alphabet, word: &str, n: usize, col: usize) -> Result<OutputPattern, SyntaxError> {
    let (name, output) = if word.contains('[') {
        let (name, values, vc) = split_action(word, n, col)?;
        (name, Some(bits(values, n, vc, a.num_outputs())?))
    } else {
        (word, None)
    };
    let event = match name {
        "*" => None,
        "." => Some(None),
        e => Some(Some(
            a.output_event(e).ok_or_else(|| SyntaxError::new(n, col, format!("unknown output event `{e}`")))?,
        )),
    };
    Ok(OutputPattern { event, output })
}

/// Canonical text for `plant`.
pub fn write_plant(plant: &Plant, alphabet: &Alphabet) -> String {
    let p = match plant {
        Plant::Free => return "free\n".to_string(),
        Plant::Explicit(p) => p,
    };
    let mut out = format!("states {}\ninitial {}\n", p.states.join(" "), p.states[p.initial]);
    for r in &p.rules {
        let event = match r.on.event {
            None => "*",
            Some(e) => alphabet.output_event_name(e),
        };
        let values = r.on.output.as_ref().map(|o| format!("[{}]", bit_string(o))).unwrap_or_default();
        let _ = writeln!(
            out,
            "{} {event}{values} -> {} {}[{}]",
            p.states[r.from],
            p.states[r.to],
            alphabet.input_events[r.emit.event],
            bit_string(&r.emit.input)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::OutputAction;

    const TEXT: &str = "\
states idle busy
initial idle
idle * -> busy R[01]
busy A[1] -> idle R[00]
busy . -> busy R[10]
busy *[0] -> idle R[11]
";

    fn alphabet() -> Alphabet {
        Alphabet::with_counts(&["R"], &["A", "B"], 2, 1).unwrap()
    }

    #[test]
    fn table_round_trips() {
        let a = alphabet();
        let p = parse_plant(TEXT, &a).unwrap();
        let Plant::Explicit(e) = &p else { panic!("expected explicit plant") };
        assert_eq!(e.rules.len(), 4);
        assert!(e.rules[1].on.matches(&OutputAction::new(Some(0), vec![true])));
        assert!(!e.rules[1].on.matches(&OutputAction::new(Some(0), vec![false])));
        assert!(e.rules[2].on.matches(&OutputAction::new(None, vec![true])));
        assert_eq!(write_plant(&p, &a), TEXT);
    }

    #[test]
    fn free_plant() {
        let a = alphabet();
        assert_eq!(parse_plant("# any input\nfree\n", &a).unwrap(), Plant::Free);
        assert_eq!(write_plant(&Plant::Free, &a), "free\n");
        assert_eq!(parse_plant("free\nstates a\n", &a).unwrap_err().line, 2);
    }

    #[test]
    fn errors_carry_positions() {
        let a = alphabet();
        let pos = |s: &str| {
            let e = parse_plant(s, &a).unwrap_err();
            (e.line, e.column)
        };
        assert_eq!(pos(""), (1, 1));
        assert_eq!(pos("states a\ninitial b\n"), (2, 9));
        assert_eq!(pos("states a\ninitial a\na Q -> a R[00]\n"), (3, 3));
        assert_eq!(pos("states a\ninitial a\na * -> a R[0]\n"), (3, 12));
        assert_eq!(pos("states a\ninitial a\na * => a R[00]\n"), (3, 5));
        assert_eq!(pos("states a\na * -> a R[00]\n"), (2, 1));
    }
}
