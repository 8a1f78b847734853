//! Text formats: scenario files, machine files, LTL lists, plant tables,
//! and DOT export.
//!
//! All formats are line based, `#` starts a comment, and every parse error
//! reports a 1-based line and column.

mod automaton;
mod plant;
mod scenarios;

pub use automaton::{automaton_to_dot, parse_automaton, parse_guard, write_automaton};
pub use plant::{parse_plant, write_plant};
pub use scenarios::{parse_scenarios, write_scenarios, ScenarioFile};

use thiserror::Error;

use crate::automaton::Alphabet;
use crate::ltl::LtlProperty;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, message: message.into() }
    }
}

/// Lines with comments stripped, paired with their 1-based numbers; blank
/// lines are dropped.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        (!l.trim().is_empty()).then_some((i + 1, l))
    })
}

/// Whitespace-separated words with 1-based columns.
pub(crate) fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

/// Parses the `inevents` / `outevents` / `invars` / `outvars` header lines.
/// Returns `false` for lines that are not header lines.
#[derive(Default)]
pub(crate) struct HeaderBuilder {
    input_events: Option<Vec<String>>,
    output_events: Option<Vec<String>>,
    input_vars: Option<Vec<String>>,
    output_vars: Option<Vec<String>>,
}

impl HeaderBuilder {
    pub(crate) fn line(&mut self, n: usize, line: &str) -> Result<bool, SyntaxError> {
        let w = words(line);
        let Some(&(col, key)) = w.first() else { return Ok(false) };
        let names = || w[1..].iter().map(|(_, s)| s.to_string()).collect::<Vec<_>>();
        let vars = |prefix: &str| -> Vec<String> {
            match w[1..] {
                [(_, count)] if count.chars().all(|c| c.is_ascii_digit()) => {
                    let count: usize = count.parse().unwrap_or(0);
                    (1..=count).map(|i| format!("{prefix}{i}")).collect()
                }
                _ => names(),
            }
        };
        let slot = match key {
            "inevents" => (&mut self.input_events, names()),
            "outevents" => (&mut self.output_events, names()),
            "invars" => (&mut self.input_vars, vars("x")),
            "outvars" => (&mut self.output_vars, vars("z")),
            _ => return Ok(false),
        };
        if slot.0.is_some() {
            return Err(SyntaxError::new(n, col, format!("`{key}` given twice")));
        }
        *slot.0 = Some(slot.1);
        Ok(true)
    }

    pub(crate) fn is_started(&self) -> bool {
        self.input_events.is_some()
            || self.output_events.is_some()
            || self.input_vars.is_some()
            || self.output_vars.is_some()
    }

    pub(crate) fn finish(self, line: usize) -> Result<Alphabet, SyntaxError> {
        let missing = |what: &str| SyntaxError::new(line, 1, format!("missing `{what}` header line"));
        let input_events = self.input_events.ok_or_else(|| missing("inevents"))?;
        let input_vars = self.input_vars.ok_or_else(|| missing("invars"))?;
        Alphabet::new(
            input_events,
            self.output_events.unwrap_or_default(),
            input_vars,
            self.output_vars.unwrap_or_default(),
        )
        .map_err(|e| SyntaxError::new(line, 1, e.to_string()))
    }
}

/// Header lines for `alphabet`; variable lists named `x1..` / `z1..` are
/// written as counts.
pub(crate) fn write_header(alphabet: &Alphabet, out: &mut String) {
    let vars = |names: &[String], prefix: &str| {
        let default = names.iter().enumerate().all(|(i, n)| *n == format!("{prefix}{}", i + 1));
        if default {
            names.len().to_string()
        } else {
            names.join(" ")
        }
    };
    let line = |key: &str, rest: String| {
        if rest.is_empty() {
            format!("{key}\n")
        } else {
            format!("{key} {rest}\n")
        }
    };
    out.push_str(&line("inevents", alphabet.input_events.join(" ")));
    out.push_str(&line("outevents", alphabet.output_events.join(" ")));
    out.push_str(&line("invars", vars(&alphabet.input_vars, "x")));
    out.push_str(&line("outvars", vars(&alphabet.output_vars, "z")));
}

/// `0`/`1` string, or an error naming the offending column.
pub(crate) fn bits(text: &str, line: usize, column: usize, width: usize) -> Result<Vec<bool>, SyntaxError> {
    let v: Vec<bool> = text
        .chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(SyntaxError::new(line, column + i, format!("expected 0 or 1, found `{c}`"))),
        })
        .collect::<Result<_, _>>()?;
    if v.len() != width {
        return Err(SyntaxError::new(line, column, format!("expected {width} values, found {}", v.len())));
    }
    Ok(v)
}

pub(crate) fn bit_string(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Splits `NAME[bits]` into the name and the bracket contents, with the
/// column of the contents.
pub(crate) fn split_action(word: &str, line: usize, column: usize) -> Result<(&str, &str, usize), SyntaxError> {
    let open = word
        .find('[')
        .ok_or_else(|| SyntaxError::new(line, column, format!("expected NAME[values], found `{word}`")))?;
    if !word.ends_with(']') {
        return Err(SyntaxError::new(line, column + word.len() - 1, "expected `]`"));
    }
    Ok((&word[..open], &word[open + 1..word.len() - 1], column + open + 1))
}

/// One formula per line; `#` comments and blank lines are skipped.
pub fn parse_ltl(text: &str, alphabet: &Alphabet) -> Result<Vec<LtlProperty>, SyntaxError> {
    content_lines(text)
        .map(|(n, line)| {
            LtlProperty::parse(line, alphabet).map_err(|e| {
                let column = match &e {
                    crate::ltl::LtlError::Syntax { position, .. } => position + 1,
                    _ => 1,
                };
                SyntaxError::new(n, column, e.to_string())
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_have_columns() {
        assert_eq!(words("  ab c "), vec![(3, "ab"), (6, "c")]);
    }

    #[test]
    fn ltl_file_skips_comments() {
        let a = Alphabet::with_counts(&["R"], &["A", "B"], 1, 1).unwrap();
        let props = parse_ltl("# spec\nG(out!=B)\n\nF(out=B) # live\n", &a).unwrap();
        assert_eq!(props.len(), 2);
        assert_eq!(props[1].text, "F(out=B)");
        let err = parse_ltl("G(out!=B)\nF(out=Q)\n", &a).unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_ltl("G(x1 &)\n", &a).unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
    }
}
