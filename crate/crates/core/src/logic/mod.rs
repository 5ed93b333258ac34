//! Abstract syntax of MSO+U over labeled word positions.
//!
//! Two variable sorts are kept apart syntactically: position variables start
//! with a lowercase letter, set variables with an uppercase letter. Structural
//! equality is literal, so alpha-equivalent formulas with different binder
//! names compare unequal.

mod analyze;
pub mod build;
mod parse;
mod render;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use analyze::{analyze, Analysis};
pub use parse::{parse_formula, parse_formula_open, ParseError, ParseErrorKind};
pub use render::{render_formula, render_pretty};

/// Letters of a finite alphabet `{1, ..., n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Alphabet(u32);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("alphabet size must be at least 1")]
pub struct EmptyAlphabet;

impl Alphabet {
    pub fn new(size: u32) -> Result<Self, EmptyAlphabet> {
        if size == 0 {
            Err(EmptyAlphabet)
        } else {
            Ok(Alphabet(size))
        }
    }

    pub fn size(self) -> u32 {
        self.0
    }

    pub fn contains(self, letter: u32) -> bool {
        (1..=self.0).contains(&letter)
    }

    pub fn letters(self) -> impl Iterator<Item = u32> {
        1..=self.0
    }
}

impl TryFrom<u32> for Alphabet {
    type Error = EmptyAlphabet;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        Alphabet::new(value)
    }
}

impl From<Alphabet> for u32 {
    fn from(a: Alphabet) -> u32 {
        a.0
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{1..{}}}", self.0)
    }
}

/// Variable sort, decided by the case of the first character of the name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Position,
    Set,
}

impl Sort {
    /// Sort of a syntactically valid variable name, or `None` if the name is
    /// not a valid identifier.
    pub fn of(name: &str) -> Option<Sort> {
        let mut chars = name.chars();
        let first = chars.next()?;
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            return None;
        }
        if first.is_ascii_lowercase() {
            Some(Sort::Position)
        } else if first.is_ascii_uppercase() {
            Some(Sort::Set)
        } else {
            None
        }
    }
}

/// An MSO+U formula over the word signature.
///
/// `And` and `Or` carry at least two operands when produced by the parser or
/// by the [`build`] helpers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    LessEq(String, String),
    Label(u32, String),
    In(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ExistsPos(String, Box<Formula>),
    ForallPos(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
    /// `U X. phi`: phi holds for arbitrarily large finite sets X.
    Unbounded(String, Box<Formula>),
}

impl Formula {
    /// Immediate subformulas, in syntactic order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::LessEq(..) | Formula::Label(..) | Formula::In(..) => Vec::new(),
            Formula::Not(f)
            | Formula::ExistsPos(_, f)
            | Formula::ForallPos(_, f)
            | Formula::ExistsSet(_, f)
            | Formula::ForallSet(_, f)
            | Formula::Unbounded(_, f) => vec![f],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) => vec![a, b],
        }
    }

    /// The bound variable and its sort, for quantifier nodes.
    pub fn binder(&self) -> Option<(&str, Sort)> {
        match self {
            Formula::ExistsPos(v, _) | Formula::ForallPos(v, _) => Some((v, Sort::Position)),
            Formula::ExistsSet(v, _) | Formula::ForallSet(v, _) | Formula::Unbounded(v, _) => {
                Some((v, Sort::Set))
            }
            _ => None,
        }
    }

    /// True if the formula contains a `U` node anywhere.
    pub fn contains_unbounded(&self) -> bool {
        matches!(self, Formula::Unbounded(..)) || self.children().into_iter().any(|c| c.contains_unbounded())
    }

    /// True if the formula contains a set quantifier or `U` anywhere.
    pub fn contains_set_quantifier(&self) -> bool {
        matches!(self.binder(), Some((_, Sort::Set)))
            || self.children().into_iter().any(|c| c.contains_set_quantifier())
    }

    /// Letters used by `Label` atoms, sorted and deduplicated.
    pub fn letters(&self) -> Vec<u32> {
        fn walk(f: &Formula, out: &mut Vec<u32>) {
            if let Formula::Label(a, _) = f {
                out.push(*a);
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks the well-formedness invariants: sort discipline, letters within
    /// the alphabet, and every free variable listed in `free`.
    pub fn validate(&self, alphabet: Alphabet, free: &[&str]) -> Result<(), ValidationError> {
        let mut scope: Vec<&str> = free.to_vec();
        validate_rec(self, alphabet, &mut scope)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("variable `{0}` used with the wrong sort")]
    Sort(String),
    #[error("letter {0} is outside the alphabet")]
    UnknownLetter(u32),
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("connective with fewer than two operands")]
    Arity,
}

fn validate_rec<'a>(
    f: &'a Formula,
    alphabet: Alphabet,
    scope: &mut Vec<&'a str>,
) -> Result<(), ValidationError> {
    let need = |name: &str, sort: Sort, scope: &Vec<&'a str>| -> Result<(), ValidationError> {
        if Sort::of(name) != Some(sort) {
            return Err(ValidationError::Sort(name.to_string()));
        }
        if !scope.contains(&name) {
            return Err(ValidationError::Unbound(name.to_string()));
        }
        Ok(())
    };
    match f {
        Formula::LessEq(x, y) => {
            need(x, Sort::Position, scope)?;
            need(y, Sort::Position, scope)
        }
        Formula::Label(a, x) => {
            if !alphabet.contains(*a) {
                return Err(ValidationError::UnknownLetter(*a));
            }
            need(x, Sort::Position, scope)
        }
        Formula::In(x, s) => {
            need(x, Sort::Position, scope)?;
            need(s, Sort::Set, scope)
        }
        Formula::Not(g) => validate_rec(g, alphabet, scope),
        Formula::And(gs) | Formula::Or(gs) => {
            if gs.len() < 2 {
                return Err(ValidationError::Arity);
            }
            gs.iter().try_for_each(|g| validate_rec(g, alphabet, scope))
        }
        Formula::Implies(a, b) => {
            validate_rec(a, alphabet, scope)?;
            validate_rec(b, alphabet, scope)
        }
        _ => {
            let (v, sort) = f.binder().expect("quantifier node");
            if Sort::of(v) != Some(sort) {
                return Err(ValidationError::Sort(v.to_string()));
            }
            scope.push(v);
            let body = f.children()[0];
            let r = validate_rec(body, alphabet, scope);
            scope.pop();
            r
        }
    }
}
