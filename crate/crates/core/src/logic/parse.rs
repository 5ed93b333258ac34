use thiserror::Error;

use super::{Alphabet, Formula, Sort};

/// Nesting limit for parenthesized input; deeper input is rejected rather
/// than recursing without bound.
pub const MAX_NESTING: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} at byte {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("expected `(`, found `{0}`")]
    ExpectedOpen(String),
    #[error("expected `)`, found `{0}`")]
    ExpectedClose(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{op}` expects {expected} operands")]
    Arity { op: String, expected: &'static str },
    #[error("`{0}` is not a position variable")]
    ExpectedPositionVar(String),
    #[error("`{0}` is not a set variable")]
    ExpectedSetVar(String),
    #[error("`{0}` is not a letter")]
    BadLetter(String),
    #[error("letter {letter} is not in the alphabet {{1..{size}}}")]
    UnknownLetter { letter: u32, size: u32 },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("trailing input `{0}`")]
    TrailingInput(String),
    #[error("nesting deeper than {MAX_NESTING}")]
    TooDeep,
    #[error("free variable declaration `{0}` is not a valid identifier")]
    BadDeclaration(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Option<(usize, Tok<'a>)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return None;
        }
        let start = self.pos;
        match bytes[start] {
            b'(' => {
                self.pos += 1;
                Some((start, Tok::Open))
            }
            b')' => {
                self.pos += 1;
                Some((start, Tok::Close))
            }
            _ => {
                let rest = &self.src[start..];
                let len = rest
                    .char_indices()
                    .find(|&(_, c)| c.is_whitespace() || c == '(' || c == ')')
                    .map(|(i, _)| i)
                    .unwrap_or(rest.len());
                self.pos += len;
                Some((start, Tok::Atom(&rest[..len])))
            }
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    idx: usize,
    end: usize,
    alphabet: Alphabet,
    scope: Vec<String>,
}

fn describe(t: &Tok<'_>) -> String {
    match t {
        Tok::Open => "(".into(),
        Tok::Close => ")".into(),
        Tok::Atom(a) => (*a).to_string(),
    }
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { pos, kind })
    }

    fn peek(&self) -> Option<&(usize, Tok<'a>)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Result<(usize, Tok<'a>), ParseError> {
        match self.toks.get(self.idx) {
            Some(t) => {
                self.idx += 1;
                Ok(t.clone())
            }
            None => self.err(self.end, ParseErrorKind::UnexpectedEof),
        }
    }

    fn atom(&mut self) -> Result<(usize, &'a str), ParseError> {
        match self.bump()? {
            (p, Tok::Atom(a)) => Ok((p, a)),
            (p, t) => self.err(p, ParseErrorKind::BadLetter(describe(&t))),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        match self.bump()? {
            (_, Tok::Close) => Ok(()),
            (p, t) => self.err(p, ParseErrorKind::ExpectedClose(describe(&t))),
        }
    }

    fn var(&mut self, sort: Sort, binding: bool) -> Result<String, ParseError> {
        let (p, name) = match self.bump()? {
            (p, Tok::Atom(a)) => (p, a),
            (p, t) => {
                let kind = match sort {
                    Sort::Position => ParseErrorKind::ExpectedPositionVar(describe(&t)),
                    Sort::Set => ParseErrorKind::ExpectedSetVar(describe(&t)),
                };
                return self.err(p, kind);
            }
        };
        if Sort::of(name) != Some(sort) {
            let kind = match sort {
                Sort::Position => ParseErrorKind::ExpectedPositionVar(name.into()),
                Sort::Set => ParseErrorKind::ExpectedSetVar(name.into()),
            };
            return self.err(p, kind);
        }
        if !binding && !self.scope.iter().any(|s| s == name) {
            return self.err(p, ParseErrorKind::Unbound(name.into()));
        }
        Ok(name.to_string())
    }

    fn formula(&mut self, depth: usize) -> Result<Formula, ParseError> {
        let (open_pos, t) = self.bump()?;
        if t != Tok::Open {
            return self.err(open_pos, ParseErrorKind::ExpectedOpen(describe(&t)));
        }
        if depth >= MAX_NESTING {
            return self.err(open_pos, ParseErrorKind::TooDeep);
        }
        let (op_pos, op) = match self.bump()? {
            (p, Tok::Atom(a)) => (p, a),
            (p, t) => return self.err(p, ParseErrorKind::UnknownOperator(describe(&t))),
        };
        let f = match op {
            "<=" => {
                let x = self.var(Sort::Position, false)?;
                let y = self.var(Sort::Position, false)?;
                Formula::LessEq(x, y)
            }
            "label" => {
                let (lp, lit) = self.atom()?;
                let letter: u32 = lit
                    .parse()
                    .map_err(|_| ParseError { pos: lp, kind: ParseErrorKind::BadLetter(lit.into()) })?;
                if !self.alphabet.contains(letter) {
                    return self.err(
                        lp,
                        ParseErrorKind::UnknownLetter { letter, size: self.alphabet.size() },
                    );
                }
                let x = self.var(Sort::Position, false)?;
                Formula::Label(letter, x)
            }
            "in" => {
                let x = self.var(Sort::Position, false)?;
                let s = self.var(Sort::Set, false)?;
                Formula::In(x, s)
            }
            "not" => Formula::Not(Box::new(self.formula(depth + 1)?)),
            "and" | "or" => {
                let mut args = Vec::new();
                while let Some((_, Tok::Open)) = self.peek() {
                    args.push(self.formula(depth + 1)?);
                }
                if args.len() < 2 {
                    return self.err(
                        op_pos,
                        ParseErrorKind::Arity { op: op.into(), expected: "at least two" },
                    );
                }
                if op == "and" {
                    Formula::And(args)
                } else {
                    Formula::Or(args)
                }
            }
            "implies" => {
                let a = self.formula(depth + 1)?;
                let b = self.formula(depth + 1)?;
                Formula::Implies(Box::new(a), Box::new(b))
            }
            "exists" | "forall" | "existsS" | "forallS" | "U" => {
                let sort = if op == "exists" || op == "forall" { Sort::Position } else { Sort::Set };
                let v = self.var(sort, true)?;
                self.scope.push(v.clone());
                let body = self.formula(depth + 1);
                self.scope.pop();
                let body = Box::new(body?);
                match op {
                    "exists" => Formula::ExistsPos(v, body),
                    "forall" => Formula::ForallPos(v, body),
                    "existsS" => Formula::ExistsSet(v, body),
                    "forallS" => Formula::ForallSet(v, body),
                    _ => Formula::Unbounded(v, body),
                }
            }
            other => return self.err(op_pos, ParseErrorKind::UnknownOperator(other.into())),
        };
        self.close()?;
        Ok(f)
    }
}

/// Parses a closed formula.
pub fn parse_formula(text: &str, alphabet: Alphabet) -> Result<Formula, ParseError> {
    parse_formula_open(text, alphabet, &[])
}

/// Parses a formula whose free variables must be among `free`; the sort of
/// each declared name follows its case.
pub fn parse_formula_open(
    text: &str,
    alphabet: Alphabet,
    free: &[&str],
) -> Result<Formula, ParseError> {
    if let Some(bad) = free.iter().find(|v| Sort::of(v).is_none()) {
        return Err(ParseError { pos: 0, kind: ParseErrorKind::BadDeclaration(bad.to_string()) });
    }
    let mut lexer = Lexer { src: text, pos: 0 };
    let mut toks = Vec::new();
    while let Some(t) = lexer.next() {
        toks.push(t);
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        alphabet,
        scope: free.iter().map(|s| s.to_string()).collect(),
    };
    let f = p.formula(0)?;
    if let Some((pos, t)) = p.peek() {
        return Err(ParseError { pos: *pos, kind: ParseErrorKind::TrailingInput(describe(t)) });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: u32) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    #[test]
    fn exists_label() {
        let f = parse_formula("(exists x (label 3 x))", a(3)).unwrap();
        assert_eq!(f, Formula::ExistsPos("x".into(), Box::new(Formula::Label(3, "x".into()))));
    }

    #[test]
    fn unbounded_quantifier() {
        let f = parse_formula("(U X (forall x (implies (in x X) (label 3 x))))", a(3)).unwrap();
        let expected = Formula::Unbounded(
            "X".into(),
            Box::new(Formula::ForallPos(
                "x".into(),
                Box::new(Formula::Implies(
                    Box::new(Formula::In("x".into(), "X".into())),
                    Box::new(Formula::Label(3, "x".into())),
                )),
            )),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn unknown_letter() {
        let e = parse_formula_open("(label 5 x)", a(3), &["x"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownLetter { letter: 5, size: 3 });
        assert_eq!(e.pos, 7);
    }

    #[test]
    fn unbound_variable() {
        let e = parse_formula("(label 1 x)", a(3)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound("x".into()));
        assert!(parse_formula_open("(label 1 x)", a(3), &["x"]).is_ok());
    }

    #[test]
    fn sort_errors() {
        let e = parse_formula("(exists X (label 1 X))", a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ExpectedPositionVar("X".into()));
        let e = parse_formula("(U x (label 1 x))", a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ExpectedSetVar("x".into()));
        let e = parse_formula_open("(in X x)", a(1), &["x", "X"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ExpectedPositionVar("X".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_formula("(exists x (label 1 x)", a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEof);
        assert_eq!(e.pos, 21);
        let e = parse_formula("(and (exists x (label 1 x)))", a(1)).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { .. }));
        let e = parse_formula("(exists x (label 1 x)) junk", a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::TrailingInput("junk".into()));
        assert_eq!(e.pos, 23);
        let e = parse_formula("(iff x y)", a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownOperator("iff".into()));
        let e = parse_formula("", a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEof);
    }

    #[test]
    fn whitespace_insensitive() {
        let f = parse_formula("(exists x (label 1 x))", a(1)).unwrap();
        let g = parse_formula("  (exists\n\tx(label 1 x )\n)  ", a(1)).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn deep_nesting_is_refused() {
        let mut s = String::new();
        for _ in 0..(MAX_NESTING + 5) {
            s.push_str("(not ");
        }
        let e = parse_formula(&s, a(1)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::TooDeep);
    }

    #[test]
    fn shadowing_binds_innermost() {
        let f = parse_formula("(exists x (forall x (<= x x)))", a(1)).unwrap();
        assert!(matches!(f, Formula::ExistsPos(..)));
    }
}
