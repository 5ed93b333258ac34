//! Small constructors for assembling formulas in code.
//!
//! Bound variable names come from a [`Fresh`] supply so that generated
//! binders never capture caller-supplied free variables and so that the
//! output is reproducible for identical construction order.

use std::collections::BTreeSet;

use super::Formula;

/// Deterministic supply of variable names that avoid a reserved set.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    next: usize,
    reserved: BTreeSet<String>,
}

impl Fresh {
    pub fn new() -> Self {
        Fresh::default()
    }

    /// A supply that never hands out any of `names`.
    pub fn avoiding<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Fresh { next: 0, reserved: names.into_iter().map(Into::into).collect() }
    }

    fn take(&mut self, prefix: &str) -> String {
        loop {
            self.next += 1;
            let name = format!("{prefix}{}", self.next);
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }

    /// Fresh position variable.
    pub fn pos(&mut self) -> String {
        self.take("v")
    }

    /// Fresh set variable.
    pub fn set(&mut self) -> String {
        self.take("V")
    }
}

pub fn le(x: &str, y: &str) -> Formula {
    Formula::LessEq(x.into(), y.into())
}

/// Strict order `x < y`.
pub fn lt(x: &str, y: &str) -> Formula {
    not(le(y, x))
}

pub fn eq(x: &str, y: &str) -> Formula {
    and([le(x, y), le(y, x)])
}

pub fn label(letter: u32, x: &str) -> Formula {
    Formula::Label(letter, x.into())
}

/// Label in `{1, ..., k}`; `k` must be at least 1.
pub fn label_at_most(k: u32, x: &str) -> Formula {
    assert!(k >= 1, "label threshold must be positive");
    or((1..=k).map(|a| label(a, x)))
}

pub fn member(x: &str, set: &str) -> Formula {
    Formula::In(x.into(), set.into())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

/// Conjunction; a single operand is returned unchanged.
pub fn and<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
    let mut v: Vec<Formula> = fs.into_iter().collect();
    assert!(!v.is_empty(), "empty conjunction");
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        Formula::And(v)
    }
}

/// Disjunction; a single operand is returned unchanged.
pub fn or<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
    let mut v: Vec<Formula> = fs.into_iter().collect();
    assert!(!v.is_empty(), "empty disjunction");
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        Formula::Or(v)
    }
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    and([implies(a.clone(), b.clone()), implies(b, a)])
}

pub fn exists(x: &str, f: Formula) -> Formula {
    Formula::ExistsPos(x.into(), Box::new(f))
}

pub fn forall(x: &str, f: Formula) -> Formula {
    Formula::ForallPos(x.into(), Box::new(f))
}

pub fn exists_set(x: &str, f: Formula) -> Formula {
    Formula::ExistsSet(x.into(), Box::new(f))
}

pub fn forall_set(x: &str, f: Formula) -> Formula {
    Formula::ForallSet(x.into(), Box::new(f))
}

pub fn unbounded(x: &str, f: Formula) -> Formula {
    Formula::Unbounded(x.into(), Box::new(f))
}

/// `u` lies strictly between `x` and `y`, in either order.
pub fn strictly_between(x: &str, u: &str, y: &str) -> Formula {
    or([and([lt(x, u), lt(u, y)]), and([lt(y, u), lt(u, x)])])
}
