//! LTL syntax: parsing, binding atoms to an alphabet, negation normal form.

use std::fmt;

use thiserror::Error;

use crate::automaton::{Alphabet, InputAction, OutputAction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("syntax error at column {}: {message}", .position + 1)]
    Syntax { position: usize, message: String },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

fn syntax(position: usize, message: impl Into<String>) -> LtlError {
    LtlError::Syntax { position, message: message.into() }
}

/// Propositional atom as written in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RawAtom {
    /// `in=E`
    InEvent(String),
    /// `out=E`; `None` for `out=.`
    OutEvent(Option<String>),
    /// Bare variable name, input or output.
    Var(String),
}

/// Atom bound to alphabet indices, evaluated on one step (the input action
/// consumed and the output action produced).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    InEvent(usize),
    OutEvent(Option<usize>),
    Input(usize),
    Output(usize),
}

impl Atom {
    pub fn holds(&self, input: &InputAction, output: &OutputAction) -> bool {
        match *self {
            Atom::InEvent(e) => input.event == e,
            Atom::OutEvent(e) => output.event == e,
            Atom::Input(i) => input.input[i],
            Atom::Output(z) => output.output[z],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Next(Box<Formula<A>>),
    Finally(Box<Formula<A>>),
    Globally(Box<Formula<A>>),
    Until(Box<Formula<A>>, Box<Formula<A>>),
    Release(Box<Formula<A>>, Box<Formula<A>>),
}

use Formula as F;

impl<A: Clone> Formula<A> {
    pub fn not(f: Self) -> Self {
        F::Not(Box::new(f))
    }
    pub fn and(a: Self, b: Self) -> Self {
        F::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Self, b: Self) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Self, b: Self) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }
    pub fn next(f: Self) -> Self {
        F::Next(Box::new(f))
    }
    pub fn finally(f: Self) -> Self {
        F::Finally(Box::new(f))
    }
    pub fn globally(f: Self) -> Self {
        F::Globally(Box::new(f))
    }
    pub fn until(a: Self, b: Self) -> Self {
        F::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Self, b: Self) -> Self {
        F::Release(Box::new(a), Box::new(b))
    }

    /// No temporal operators anywhere.
    pub fn is_propositional(&self) -> bool {
        match self {
            F::True | F::False | F::Atom(_) => true,
            F::Not(a) => a.is_propositional(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    /// Nesting depth of operators; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            F::True | F::False | F::Atom(_) => 0,
            F::Not(a) | F::Next(a) | F::Finally(a) | F::Globally(a) => 1 + a.depth(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Until(a, b) | F::Release(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn map_atoms<B, E>(&self, f: &mut dyn FnMut(&A) -> Result<B, E>) -> Result<Formula<B>, E> {
        let mut un = |a: &Formula<A>| -> Result<Box<Formula<B>>, E> { Ok(Box::new(a.map_atoms(f)?)) };
        Ok(match self {
            F::True => F::True,
            F::False => F::False,
            F::Atom(a) => F::Atom(f(a)?),
            F::Not(a) => F::Not(un(a)?),
            F::Next(a) => F::Next(un(a)?),
            F::Finally(a) => F::Finally(un(a)?),
            F::Globally(a) => F::Globally(un(a)?),
            F::And(a, b) => F::And(un(a)?, un(b)?),
            F::Or(a, b) => F::Or(un(a)?, un(b)?),
            F::Implies(a, b) => F::Implies(un(a)?, un(b)?),
            F::Until(a, b) => F::Until(un(a)?, un(b)?),
            F::Release(a, b) => F::Release(un(a)?, un(b)?),
        })
    }

    /// Truth of a propositional formula under an atom valuation.
    ///
    /// # Panics
    /// On temporal operators.
    pub fn eval_prop(&self, atom: &impl Fn(&A) -> bool) -> bool {
        match self {
            F::True => true,
            F::False => false,
            F::Atom(a) => atom(a),
            F::Not(a) => !a.eval_prop(atom),
            F::And(a, b) => a.eval_prop(atom) && b.eval_prop(atom),
            F::Or(a, b) => a.eval_prop(atom) || b.eval_prop(atom),
            F::Implies(a, b) => !a.eval_prop(atom) || b.eval_prop(atom),
            _ => panic!("temporal operator in a state formula"),
        }
    }
}

impl Formula<RawAtom> {
    pub fn parse(text: &str) -> Result<Self, LtlError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, end: text.len() };
        let f = p.implication()?;
        match p.tokens.get(p.pos) {
            None => Ok(f),
            Some((at, t)) => Err(syntax(*at, format!("unexpected {t}"))),
        }
    }

    /// Resolve names against `alphabet`. A bare name is looked up among the
    /// input variables, then the output variables, then as `x<i>` / `z<i>`
    /// (1-based).
    pub fn bind(&self, alphabet: &Alphabet) -> Result<Formula<Atom>, LtlError> {
        self.map_atoms(&mut |a| bind_atom(a, alphabet))
    }
}

fn bind_atom(atom: &RawAtom, alphabet: &Alphabet) -> Result<Atom, LtlError> {
    let unknown = |kind, name: &str| LtlError::UnknownName { kind, name: name.to_string() };
    match atom {
        RawAtom::InEvent(e) => alphabet.input_event(e).map(Atom::InEvent).ok_or_else(|| unknown("input event", e)),
        RawAtom::OutEvent(None) => Ok(Atom::OutEvent(None)),
        RawAtom::OutEvent(Some(e)) => {
            alphabet.output_event(e).map(|i| Atom::OutEvent(Some(i))).ok_or_else(|| unknown("output event", e))
        }
        RawAtom::Var(name) => {
            if let Some(i) = alphabet.input_vars.iter().position(|v| v == name) {
                return Ok(Atom::Input(i));
            }
            if let Some(i) = alphabet.output_vars.iter().position(|v| v == name) {
                return Ok(Atom::Output(i));
            }
            let indexed = |prefix: char, len: usize| {
                name.strip_prefix(prefix)
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| (1..=len).contains(&i))
                    .map(|i| i - 1)
            };
            indexed('x', alphabet.num_inputs())
                .map(Atom::Input)
                .or_else(|| indexed('z', alphabet.num_outputs()).map(Atom::Output))
                .ok_or_else(|| unknown("variable", name))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(RawAtom),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    Release,
    Open,
    Close,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Atom(a) => return write!(f, "atom `{}`", Formula::Atom(a.clone())),
            Token::True => "`true`",
            Token::False => "`false`",
            Token::Not => "`!`",
            Token::And => "`&`",
            Token::Or => "`|`",
            Token::Implies => "`->`",
            Token::Next => "`X`",
            Token::Finally => "`F`",
            Token::Globally => "`G`",
            Token::Until => "`U`",
            Token::Release => "`R`",
            Token::Open => "`(`",
            Token::Close => "`)`",
        };
        f.write_str(s)
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, LtlError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let rest = |i: usize| &text[i..];
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let symbol = [
            ("->", Token::Implies),
            ("&&", Token::And),
            ("||", Token::Or),
            ("!", Token::Not),
            ("~", Token::Not),
            ("¬", Token::Not),
            ("&", Token::And),
            ("∧", Token::And),
            ("|", Token::Or),
            ("∨", Token::Or),
            ("→", Token::Implies),
            ("(", Token::Open),
            (")", Token::Close),
        ]
        .into_iter()
        .find(|(s, _)| rest(i).starts_with(s));
        if let Some((s, t)) = symbol {
            out.push((i, t));
            for _ in 0..s.chars().count() {
                chars.next();
            }
            continue;
        }
        if !is_name_char(c) {
            return Err(syntax(i, format!("unexpected character `{c}`")));
        }
        let mut end = i;
        while let Some(&(j, c)) = chars.peek() {
            if !is_name_char(c) {
                break;
            }
            end = j + c.len_utf8();
            chars.next();
        }
        let word = &text[i..end];
        let token = match word {
            "true" | "TRUE" => Token::True,
            "false" | "FALSE" => Token::False,
            "X" => Token::Next,
            "F" => Token::Finally,
            "G" => Token::Globally,
            "U" => Token::Until,
            "R" | "V" => Token::Release,
            "in" | "out" => {
                while chars.peek().is_some_and(|&(_, c)| c.is_whitespace()) {
                    chars.next();
                }
                let at = chars.peek().map_or(text.len(), |&(j, _)| j);
                let negated = rest(at).starts_with("!=");
                if !negated && !rest(at).starts_with('=') {
                    return Err(syntax(at, format!("expected `=` or `!=` after `{word}`")));
                }
                for _ in 0..if negated { 2 } else { 1 } {
                    chars.next();
                }
                while chars.peek().is_some_and(|&(_, c)| c.is_whitespace()) {
                    chars.next();
                }
                let start = chars.peek().map_or(text.len(), |&(j, _)| j);
                let mut stop = start;
                while let Some(&(j, c)) = chars.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    stop = j + c.len_utf8();
                    chars.next();
                }
                let name = &text[start..stop];
                if name.is_empty() {
                    return Err(syntax(start, "expected an event name"));
                }
                let atom = match (word, name) {
                    ("in", _) => RawAtom::InEvent(name.to_string()),
                    (_, "." | "eps" | "ε") => RawAtom::OutEvent(None),
                    _ => RawAtom::OutEvent(Some(name.to_string())),
                };
                if negated {
                    out.push((i, Token::Not));
                }
                Token::Atom(atom)
            }
            _ => Token::Atom(RawAtom::Var(word.to_string())),
        };
        out.push((i, token));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(i, _)| *i)
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula<RawAtom>, LtlError> {
        let lhs = self.disjunction()?;
        if self.eat(&Token::Implies) {
            return Ok(F::implies(lhs, self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula<RawAtom>, LtlError> {
        let mut f = self.conjunction()?;
        while self.eat(&Token::Or) {
            f = F::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula<RawAtom>, LtlError> {
        let mut f = self.binary_temporal()?;
        while self.eat(&Token::And) {
            f = F::and(f, self.binary_temporal()?);
        }
        Ok(f)
    }

    fn binary_temporal(&mut self) -> Result<Formula<RawAtom>, LtlError> {
        let lhs = self.unary()?;
        if self.eat(&Token::Until) {
            return Ok(F::until(lhs, self.binary_temporal()?));
        }
        if self.eat(&Token::Release) {
            return Ok(F::release(lhs, self.binary_temporal()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula<RawAtom>, LtlError> {
        let at = self.here();
        let Some(t) = self.peek().cloned() else {
            return Err(syntax(at, "unexpected end of formula"));
        };
        self.pos += 1;
        Ok(match t {
            Token::Not => F::not(self.unary()?),
            Token::Next => F::next(self.unary()?),
            Token::Finally => F::finally(self.unary()?),
            Token::Globally => F::globally(self.unary()?),
            Token::True => F::True,
            Token::False => F::False,
            Token::Atom(a) => F::Atom(a),
            Token::Open => {
                let f = self.implication()?;
                if !self.eat(&Token::Close) {
                    return Err(syntax(self.here(), "expected `)`"));
                }
                f
            }
            other => return Err(syntax(at, format!("unexpected {other}"))),
        })
    }
}

impl fmt::Display for Formula<RawAtom> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::True => f.write_str("true"),
            F::False => f.write_str("false"),
            F::Atom(RawAtom::InEvent(e)) => write!(f, "in={e}"),
            F::Atom(RawAtom::OutEvent(e)) => write!(f, "out={}", e.as_deref().unwrap_or(".")),
            F::Atom(RawAtom::Var(v)) => f.write_str(v),
            F::Not(a) => write!(f, "!{a}"),
            F::Next(a) => write!(f, "X {a}"),
            F::Finally(a) => write!(f, "F {a}"),
            F::Globally(a) => write!(f, "G {a}"),
            F::And(a, b) => write!(f, "({a} & {b})"),
            F::Or(a, b) => write!(f, "({a} | {b})"),
            F::Implies(a, b) => write!(f, "({a} -> {b})"),
            F::Until(a, b) => write!(f, "({a} U {b})"),
            F::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// Negation normal form: negation only on atoms, no F/G/→.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nnf<A> {
    True,
    False,
    Lit(A, bool),
    And(Box<Nnf<A>>, Box<Nnf<A>>),
    Or(Box<Nnf<A>>, Box<Nnf<A>>),
    Next(Box<Nnf<A>>),
    Until(Box<Nnf<A>>, Box<Nnf<A>>),
    Release(Box<Nnf<A>>, Box<Nnf<A>>),
}

impl<A: Clone> Formula<A> {
    pub fn nnf(&self) -> Nnf<A> {
        self.to_nnf(true)
    }

    fn to_nnf(&self, positive: bool) -> Nnf<A> {
        let b = |f: &Formula<A>, p: bool| Box::new(f.to_nnf(p));
        match (self, positive) {
            (F::True, true) | (F::False, false) => Nnf::True,
            (F::True, false) | (F::False, true) => Nnf::False,
            (F::Atom(a), p) => Nnf::Lit(a.clone(), p),
            (F::Not(a), p) => a.to_nnf(!p),
            (F::And(x, y), true) | (F::Or(x, y), false) => Nnf::And(b(x, positive), b(y, positive)),
            (F::Or(x, y), true) | (F::And(x, y), false) => Nnf::Or(b(x, positive), b(y, positive)),
            (F::Implies(x, y), true) => Nnf::Or(b(x, false), b(y, true)),
            (F::Implies(x, y), false) => Nnf::And(b(x, true), b(y, false)),
            (F::Next(x), p) => Nnf::Next(b(x, p)),
            (F::Until(x, y), true) | (F::Release(x, y), false) => Nnf::Until(b(x, positive), b(y, positive)),
            (F::Release(x, y), true) | (F::Until(x, y), false) => Nnf::Release(b(x, positive), b(y, positive)),
            (F::Finally(x), true) | (F::Globally(x), false) => Nnf::Until(Box::new(Nnf::True), b(x, positive)),
            (F::Globally(x), true) | (F::Finally(x), false) => Nnf::Release(Box::new(Nnf::False), b(x, positive)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(s: &str) -> Formula<RawAtom> {
        F::Atom(RawAtom::Var(s.into()))
    }

    fn out(s: &str) -> Formula<RawAtom> {
        F::Atom(RawAtom::OutEvent(Some(s.into())))
    }

    #[test]
    fn parses_safety_and_liveness_shapes() {
        assert_eq!(Formula::parse("G(out!=B)").unwrap(), F::globally(F::not(out("B"))));
        assert_eq!(Formula::parse("F(out=B)").unwrap(), F::finally(out("B")));
        assert_eq!(Formula::parse("G(x1 -> F z1)").unwrap(), F::globally(F::implies(var("x1"), F::finally(var("z1")))));
        assert_eq!(Formula::parse("out = .").unwrap(), F::Atom(RawAtom::OutEvent(None)));
    }

    #[test]
    fn precedence_and_associativity() {
        let (a, b, c) = (var("a"), var("b"), var("c"));
        assert_eq!(Formula::parse("a U b U c").unwrap(), F::until(a.clone(), F::until(b.clone(), c.clone())));
        assert_eq!(Formula::parse("a | b & c").unwrap(), F::or(a.clone(), F::and(b.clone(), c.clone())));
        assert_eq!(Formula::parse("a -> b -> c").unwrap(), F::implies(a.clone(), F::implies(b.clone(), c.clone())));
        assert_eq!(Formula::parse("!a U b").unwrap(), F::until(F::not(a.clone()), b.clone()));
        assert_eq!(Formula::parse("a & b U c").unwrap(), F::and(a, F::until(b, c)));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = |s| match Formula::parse(s) {
            Err(LtlError::Syntax { position, .. }) => position,
            other => panic!("{other:?}"),
        };
        assert_eq!(err("G(a"), 3);
        assert_eq!(err("a & & b"), 4);
        assert_eq!(err("out B"), 4);
        assert_eq!(err("a $ b"), 2);
        assert_eq!(err(""), 0);
    }

    #[test]
    fn display_round_trips() {
        for s in ["G(out!=B)", "F(out=.)", "G(x1 -> F z1)", "a U (b R !c) | X d", "in=R & true"] {
            let f = Formula::parse(s).unwrap();
            assert_eq!(Formula::parse(&f.to_string()).unwrap(), f, "{s}");
        }
    }

    #[test]
    fn binding_resolves_names() {
        let a = Alphabet::new(vec!["REQ".into()], vec!["CNF".into()], vec!["pp1".into()], vec!["vp1".into()]).unwrap();
        let f = Formula::parse("G(pp1 -> F vp1) & in=REQ & out=CNF & x1 & z1").unwrap().bind(&a).unwrap();
        let mut atoms = Vec::new();
        f.map_atoms(&mut |x: &Atom| {
            atoms.push(*x);
            Ok::<_, ()>(())
        })
        .unwrap();
        assert_eq!(
            atoms,
            vec![
                Atom::Input(0),
                Atom::Output(0),
                Atom::InEvent(0),
                Atom::OutEvent(Some(0)),
                Atom::Input(0),
                Atom::Output(0)
            ]
        );
        assert!(matches!(
            Formula::parse("out=Q").unwrap().bind(&a),
            Err(LtlError::UnknownName { kind: "output event", .. })
        ));
        assert!(Formula::parse("x2").unwrap().bind(&a).is_err());
    }

    #[test]
    fn nnf_pushes_negations_inward() {
        let f = Formula::parse("!G(a -> F b)").unwrap().nnf();
        let lit = |s: &str, p| Nnf::Lit(RawAtom::Var(s.into()), p);
        let expected = Nnf::Until(
            Box::new(Nnf::True),
            Box::new(Nnf::And(
                Box::new(lit("a", true)),
                Box::new(Nnf::Release(Box::new(Nnf::False), Box::new(lit("b", false)))),
            )),
        );
        assert_eq!(f, expected);
    }
}
