use crate::automaton::{Alphabet, InputAction, OutputAction};
use crate::scenario::{Scenario, ScenarioElement};

use super::{bit_string, bits, content_lines, split_action, words, write_header, HeaderBuilder, SyntaxError};

/// Alphabet header followed by scenario blocks:
///
/// ```text
/// inevents R
/// outevents A B
/// invars 2
/// outvars 1
/// scenario
/// R[00] -> .[0]
/// R[01] -> B[1]
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioFile {
    pub alphabet: Alphabet,
    pub scenarios: Vec<Scenario>,
}

pub fn parse_scenarios(text: &str) -> Result<ScenarioFile, SyntaxError> {
    let mut header = HeaderBuilder::default();
    let mut alphabet: Option<Alphabet> = None;
    let mut scenarios: Vec<Scenario> = Vec::new();
    let mut last_line = 1;
    for (n, line) in content_lines(text) {
        last_line = n;
        if alphabet.is_none() && header.line(n, line)? {
            continue;
        }
        let w = words(line);
        if w[0].1 == "scenario" {
            if alphabet.is_none() {
                alphabet = Some(std::mem::take(&mut header).finish(n)?);
            }
            if let Some(&(col, extra)) = w.get(1) {
                return Err(SyntaxError::new(n, col, format!("unexpected `{extra}` after `scenario`")));
            }
            scenarios.push(Scenario::default());
            continue;
        }
        let (Some(a), Some(current)) = (&alphabet, scenarios.last_mut()) else {
            return Err(SyntaxError::new(
                n,
                w[0].0,
                format!("expected a header line or `scenario`, found `{}`", w[0].1),
            ));
        };
        current.elements.push(parse_element(a, n, &w)?);
    }
    if alphabet.is_none() && header.is_started() {
        return Err(SyntaxError::new(last_line, 1, "no scenarios after the header"));
    }
    let Some(alphabet) = alphabet else {
        return Err(SyntaxError::new(last_line, 1, "empty scenario file"));
    };
    Ok(ScenarioFile { alphabet, scenarios })
}

fn parse_element(a: &Alphabet, n: usize, w: &[(usize, &str)]) -> Result<ScenarioElement, SyntaxError> {
    let [(ic, input), (ac, arrow), (oc, output)] = w else {
        let col = w.get(3).map_or(w[0].0, |x| x.0);
        return Err(SyntaxError::new(n, col, "expected `EVENT[bits] -> EVENT[bits]`"));
    };
    if *arrow != "->" {
        return Err(SyntaxError::new(n, *ac, "expected `->`"));
    }
    let (ie, ib, ibc) = split_action(input, n, *ic)?;
    let event = a.input_event(ie).ok_or_else(|| SyntaxError::new(n, *ic, format!("unknown input event `{ie}`")))?;
    let input = bits(ib, n, ibc, a.num_inputs())?;
    let (oe, ob, obc) = split_action(output, n, *oc)?;
    let out_event = match oe {
        "." => None,
        name => Some(
            a.output_event(name).ok_or_else(|| SyntaxError::new(n, *oc, format!("unknown output event `{name}`")))?,
        ),
    };
    let output = bits(ob, n, obc, a.num_outputs())?;
    Ok(ScenarioElement::new(InputAction::new(event, input), OutputAction::new(out_event, output)))
}

/// Canonical text: header, then one block per scenario.
pub fn write_scenarios(alphabet: &Alphabet, scenarios: &[Scenario]) -> String {
    let mut out = String::new();
    write_header(alphabet, &mut out);
    for s in scenarios {
        out.push_str("scenario\n");
        for e in &s.elements {
            out.push_str(&format!(
                "{}[{}] -> {}[{}]\n",
                alphabet.input_events[e.input.event],
                bit_string(&e.input.input),
                alphabet.output_event_name(e.output.event),
                bit_string(&e.output.output)
            ));
        }
    }
    out
}
