//! Brute-force evaluation of formulas on finite words.
//!
//! `U X. phi` is read as "some X with at least `u_threshold` elements
//! satisfies phi". This is a finite testing surrogate, not the real
//! semantics of `U`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::WordPrefix;
use crate::logic::{analyze, Alphabet, Formula, Sort};

/// Longest word the evaluator accepts; sets are 64-bit masks.
pub const MAX_POSITIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("free variable `{0}` has no value")]
    Uncovered(String),
    #[error("variable `{var}` = {pos} is outside the word of length {len}")]
    OutOfRange { var: String, pos: usize, len: usize },
}

/// Finite set of word positions.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosSet(pub u64);

impl PosSet {
    pub fn from_positions<I: IntoIterator<Item = usize>>(it: I) -> PosSet {
        PosSet(it.into_iter().fold(0, |m, p| m | (1u64 << p)))
    }

    pub fn contains(self, p: usize) -> bool {
        p < MAX_POSITIONS && self.0 >> p & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn positions(self) -> Vec<usize> {
        (0..MAX_POSITIONS).filter(|&p| self.contains(p)).collect()
    }

    /// All subsets of `self`, starting with the empty set.
    pub fn subsets(self) -> impl Iterator<Item = PosSet> {
        let full = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let out = cur?;
            cur = if out == full { None } else { Some((out.wrapping_sub(full)) & full) };
            Some(PosSet(out))
        })
    }
}

impl fmt::Debug for PosSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.positions()).finish()
    }
}

impl Serialize for PosSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.positions().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PosSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(p) = v.iter().find(|&&p| p >= MAX_POSITIONS) {
            return Err(serde::de::Error::custom(format!("position {p} exceeds {}", MAX_POSITIONS - 1)));
        }
        Ok(PosSet::from_positions(v))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub positions: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, PosSet>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn with_pos(mut self, name: &str, p: usize) -> Self {
        self.positions.insert(name.into(), p);
        self
    }

    pub fn with_set(mut self, name: &str, s: PosSet) -> Self {
        self.sets.insert(name.into(), s);
        self
    }

    pub fn pos(&self, name: &str) -> usize {
        self.positions[name]
    }

    pub fn set(&self, name: &str) -> PosSet {
        self.sets[name]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalBudget {
    pub u_threshold: usize,
    pub max_word_len: usize,
    pub max_set_depth: usize,
}

impl EvalBudget {
    pub fn new(u_threshold: usize) -> Self {
        EvalBudget { u_threshold, max_word_len: 16, max_set_depth: 2 }
    }

    fn admit(&self, f: &Formula, len: usize) -> Result<(), EvalError> {
        if len > self.max_word_len.min(MAX_POSITIONS) {
            return Err(EvalError::BudgetExceeded(format!(
                "word length {len} exceeds {}",
                self.max_word_len.min(MAX_POSITIONS)
            )));
        }
        let depth = analyze(f).set_quantifier_depth;
        if depth > self.max_set_depth {
            return Err(EvalError::BudgetExceeded(format!(
                "set quantifier depth {depth} exceeds {}",
                self.max_set_depth
            )));
        }
        Ok(())
    }
}

enum Node {
    Le(usize, usize),
    Label(u32, usize),
    In(usize, usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    ExistsPos(usize, Box<Node>),
    ForallPos(usize, Box<Node>),
    ExistsSet(usize, Box<Node>),
    ForallSet(usize, Box<Node>),
    Unbounded(usize, Box<Node>),
}

/// A formula with variables resolved to environment slots. The first slots
/// hold the free variables in the order given at compile time.
struct Compiled {
    root: Node,
    slots: usize,
}

fn compile(f: &Formula, free: &[String]) -> Result<Compiled, EvalError> {
    fn go(f: &Formula, scope: &mut Vec<String>, slots: &mut usize) -> Result<Node, EvalError> {
        let look = |v: &str, scope: &Vec<String>| {
            scope.iter().rposition(|s| s == v).ok_or_else(|| EvalError::Uncovered(v.to_string()))
        };
        let bind = |v: &str, body: &Formula, scope: &mut Vec<String>, slots: &mut usize| {
            let slot = scope.len();
            scope.push(v.to_string());
            *slots = (*slots).max(scope.len());
            let b = go(body, scope, slots);
            scope.pop();
            b.map(|b| (slot, Box::new(b)))
        };
        Ok(match f {
            Formula::LessEq(x, y) => Node::Le(look(x, scope)?, look(y, scope)?),
            Formula::Label(a, x) => Node::Label(*a, look(x, scope)?),
            Formula::In(x, s) => Node::In(look(x, scope)?, look(s, scope)?),
            Formula::Not(g) => Node::Not(Box::new(go(g, scope, slots)?)),
            Formula::And(gs) => Node::And(gs.iter().map(|g| go(g, scope, slots)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => Node::Or(gs.iter().map(|g| go(g, scope, slots)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => Node::Implies(Box::new(go(a, scope, slots)?), Box::new(go(b, scope, slots)?)),
            Formula::ExistsPos(v, b) => {
                let (s, b) = bind(v, b, scope, slots)?;
                Node::ExistsPos(s, b)
            }
            Formula::ForallPos(v, b) => {
                let (s, b) = bind(v, b, scope, slots)?;
                Node::ForallPos(s, b)
            }
            Formula::ExistsSet(v, b) => {
                let (s, b) = bind(v, b, scope, slots)?;
                Node::ExistsSet(s, b)
            }
            Formula::ForallSet(v, b) => {
                let (s, b) = bind(v, b, scope, slots)?;
                Node::ForallSet(s, b)
            }
            Formula::Unbounded(v, b) => {
                let (s, b) = bind(v, b, scope, slots)?;
                Node::Unbounded(s, b)
            }
        })
    }
    let mut scope = free.to_vec();
    let mut slots = scope.len();
    let root = go(f, &mut scope, &mut slots)?;
    Ok(Compiled { root, slots })
}

struct Ctx<'a> {
    letters: &'a [u32],
    full: u64,
    u_threshold: usize,
}

impl Ctx<'_> {
    fn eval(&self, n: &Node, env: &mut [u64]) -> bool {
        match n {
            Node::Le(x, y) => env[*x] <= env[*y],
            Node::Label(a, x) => self.letters[env[*x] as usize] == *a,
            Node::In(x, s) => env[*s] >> env[*x] & 1 == 1,
            Node::Not(g) => !self.eval(g, env),
            Node::And(gs) => gs.iter().all(|g| self.eval(g, env)),
            Node::Or(gs) => gs.iter().any(|g| self.eval(g, env)),
            Node::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Node::ExistsPos(s, b) => (0..self.letters.len() as u64).any(|p| {
                env[*s] = p;
                self.eval(b, env)
            }),
            Node::ForallPos(s, b) => (0..self.letters.len() as u64).all(|p| {
                env[*s] = p;
                self.eval(b, env)
            }),
            Node::ExistsSet(s, b) => PosSet(self.full).subsets().any(|m| {
                env[*s] = m.0;
                self.eval(b, env)
            }),
            Node::ForallSet(s, b) => PosSet(self.full).subsets().all(|m| {
                env[*s] = m.0;
                self.eval(b, env)
            }),
            Node::Unbounded(s, b) => PosSet(self.full).subsets().any(|m| {
                env[*s] = m.0;
                m.len() >= self.u_threshold && self.eval(b, env)
            }),
        }
    }
}

fn full_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Evaluates `f` on `w` under `a`, with `U` read at threshold `b.u_threshold`.
pub fn evaluate(f: &Formula, w: &WordPrefix, a: &Assignment, b: &EvalBudget) -> Result<bool, EvalError> {
    b.admit(f, w.len())?;
    let info = analyze(f);
    let free: Vec<String> =
        info.free_position_vars.iter().chain(info.free_set_vars.iter()).cloned().collect();
    let c = compile(f, &free)?;
    let mut env = vec![0u64; c.slots];
    for (i, v) in free.iter().enumerate() {
        env[i] = match Sort::of(v) {
            Some(Sort::Set) => {
                let s = *a.sets.get(v).ok_or_else(|| EvalError::Uncovered(v.clone()))?;
                if s.0 & !full_mask(w.len()) != 0 {
                    let pos = *s.positions().last().expect("nonempty");
                    return Err(EvalError::OutOfRange { var: v.clone(), pos, len: w.len() });
                }
                s.0
            }
            _ => {
                let p = *a.positions.get(v).ok_or_else(|| EvalError::Uncovered(v.clone()))?;
                if p >= w.len() {
                    return Err(EvalError::OutOfRange { var: v.clone(), pos: p, len: w.len() });
                }
                p as u64
            }
        };
    }
    let ctx = Ctx { letters: w.letters(), full: full_mask(w.len()), u_threshold: b.u_threshold };
    Ok(ctx.eval(&c.root, &mut env))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub word: Vec<u32>,
    pub assignment: Assignment,
    /// Value of the direct predicate.
    pub expected: bool,
    /// Value of the formula.
    pub got: bool,
}

/// Per-word candidate values for one set variable: every subset of the
/// returned set is tried.
pub type SetDomain = Box<dyn Fn(&WordPrefix) -> PosSet + Sync>;

pub type WordFilter = Box<dyn Fn(&WordPrefix) -> bool + Sync>;

/// Restrictions on the inputs enumerated by [`exhaustive_check_with`].
#[derive(Default)]
pub struct CheckOptions {
    pub word_filter: Option<WordFilter>,
    pub set_domains: BTreeMap<String, SetDomain>,
}

impl CheckOptions {
    pub fn decodable_only() -> Self {
        CheckOptions { word_filter: Some(Box::new(|w: &WordPrefix| w.is_decodable())), ..Default::default() }
    }

    pub fn domain(mut self, var: &str, d: impl Fn(&WordPrefix) -> PosSet + Sync + 'static) -> Self {
        self.set_domains.insert(var.into(), Box::new(d));
        self
    }
}

/// Every word over `alphabet` of length at most `max_len`, shortest first,
/// lexicographic within a length.
pub fn all_words(alphabet: Alphabet, max_len: usize) -> Vec<WordPrefix> {
    let n = alphabet.size();
    let mut out = Vec::new();
    for len in 0..=max_len {
        let mut cur = vec![1u32; len];
        loop {
            out.push(WordPrefix::new(alphabet, cur.clone()).expect("letters in range"));
            let Some(i) = cur.iter().rposition(|&l| l < n) else { break };
            cur[i] += 1;
            for l in &mut cur[i + 1..] {
                *l = 1;
            }
        }
    }
    out
}

/// Compares `f` with a direct predicate on every word of length at most
/// `max_len` and every assignment of its free variables.
pub fn exhaustive_check<G, P>(
    f: &Formula,
    g: G,
    alphabet: Alphabet,
    max_len: usize,
    b: &EvalBudget,
) -> Result<Vec<Disagreement>, EvalError>
where
    G: Fn(&WordPrefix) -> P + Sync,
    P: Fn(&Assignment) -> bool,
{
    exhaustive_check_with(f, g, alphabet, max_len, b, &CheckOptions::default())
}

/// [`exhaustive_check`] with a word filter and restricted set domains.
/// `g` is called once per word and returns the predicate for that word.
pub fn exhaustive_check_with<G, P>(
    f: &Formula,
    g: G,
    alphabet: Alphabet,
    max_len: usize,
    b: &EvalBudget,
    opts: &CheckOptions,
) -> Result<Vec<Disagreement>, EvalError>
where
    G: Fn(&WordPrefix) -> P + Sync,
    P: Fn(&Assignment) -> bool,
{
    b.admit(f, max_len)?;
    let info = analyze(f);
    let pos_vars: Vec<String> = info.free_position_vars.iter().cloned().collect();
    let set_vars: Vec<String> = info.free_set_vars.iter().cloned().collect();
    let free: Vec<String> = pos_vars.iter().chain(&set_vars).cloned().collect();
    let c = compile(f, &free)?;
    let words: Vec<WordPrefix> = all_words(alphabet, max_len)
        .into_iter()
        .filter(|w| opts.word_filter.as_ref().map(|keep| keep(w)).unwrap_or(true))
        .collect();
    let mut found: Vec<(usize, Vec<Disagreement>)> = words
        .par_iter()
        .enumerate()
        .map(|(wi, w)| {
            let full = full_mask(w.len());
            let domains: Vec<PosSet> = set_vars
                .iter()
                .map(|v| opts.set_domains.get(v).map(|d| PosSet(d(w).0 & full)).unwrap_or(PosSet(full)))
                .collect();
            let pred = g(w);
            let ctx = Ctx { letters: w.letters(), full, u_threshold: b.u_threshold };
            let mut env = vec![0u64; c.slots];
            let mut out = Vec::new();
            let mut visit = |env: &mut Vec<u64>| {
                let got = ctx.eval(&c.root, env);
                let mut a = Assignment::new();
                for (i, v) in pos_vars.iter().enumerate() {
                    a.positions.insert(v.clone(), env[i] as usize);
                }
                for (i, v) in set_vars.iter().enumerate() {
                    a.sets.insert(v.clone(), PosSet(env[pos_vars.len() + i]));
                }
                let expected = pred(&a);
                if expected != got {
                    out.push(Disagreement { word: w.letters().to_vec(), assignment: a, expected, got });
                }
            };
            enumerate_free(0, &pos_vars, &domains, w.len(), &mut env, &mut visit);
            (wi, out)
        })
        .collect();
    found.sort_by_key(|(wi, _)| *wi);
    Ok(found.into_iter().flat_map(|(_, d)| d).collect())
}

fn enumerate_free(
    i: usize,
    pos_vars: &[String],
    domains: &[PosSet],
    len: usize,
    env: &mut Vec<u64>,
    visit: &mut dyn FnMut(&mut Vec<u64>),
) {
    if i == pos_vars.len() + domains.len() {
        visit(env);
    } else if i < pos_vars.len() {
        for p in 0..len as u64 {
            env[i] = p;
            enumerate_free(i + 1, pos_vars, domains, len, env, visit);
        }
    } else {
        for s in domains[i - pos_vars.len()].subsets() {
            env[i] = s.0;
            enumerate_free(i + 1, pos_vars, domains, len, env, visit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula_open;
    use proptest::prelude::*;

    fn word(s: &str) -> WordPrefix {
        WordPrefix::parse(s, None).unwrap()
    }

    fn closed(s: &str, n: u32) -> Formula {
        crate::logic::parse_formula(s, Alphabet::new(n).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let b = EvalBudget::new(1);
        let a = Assignment::new();
        assert!(evaluate(&closed("(exists x (label 3 x))", 3), &word("1 2 3"), &a, &b).unwrap());
        let u = closed("(U X (forall x (implies (in x X) (label 3 x))))", 3);
        let w = word("1 2 3 3");
        assert!(evaluate(&u, &w, &a, &EvalBudget::new(2)).unwrap());
        assert!(!evaluate(&u, &w, &a, &EvalBudget::new(3)).unwrap());
        for s in ["1", "1 2 3", "3 3 1 2"] {
            assert!(evaluate(&closed("(forall x (<= x x))", 3), &word(s), &a, &b).unwrap());
        }
    }

    #[test]
    fn errors() {
        let f = parse_formula_open("(label 1 x)", Alphabet::new(2).unwrap(), &["x"]).unwrap();
        let b = EvalBudget::new(1);
        assert_eq!(evaluate(&f, &word("1 2"), &Assignment::new(), &b), Err(EvalError::Uncovered("x".into())));
        assert!(matches!(
            evaluate(&f, &word("1 2"), &Assignment::new().with_pos("x", 5), &b),
            Err(EvalError::OutOfRange { .. })
        ));
        let long = WordPrefix::new(Alphabet::new(2).unwrap(), vec![1; 17]).unwrap();
        assert!(matches!(
            evaluate(&f, &long, &Assignment::new().with_pos("x", 0), &b),
            Err(EvalError::BudgetExceeded(_))
        ));
        let deep = closed("(existsS X (existsS Y (forallS Z (exists x (in x Z)))))", 2);
        assert!(matches!(evaluate(&deep, &word("1"), &Assignment::new(), &b), Err(EvalError::BudgetExceeded(_))));
    }

    #[test]
    fn subsets_enumerates_all() {
        let s = PosSet::from_positions([1, 3, 4]);
        let all: Vec<PosSet> = s.subsets().collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|t| t.0 & !s.0 == 0));
        assert_eq!(PosSet(0).subsets().count(), 1);
    }

    #[test]
    fn check_label_against_direct() {
        let a = Alphabet::new(2).unwrap();
        let f = parse_formula_open("(label 1 x)", a, &["x"]).unwrap();
        let b = EvalBudget::new(1);
        let direct = |w: &WordPrefix| {
            let l = w.letters().to_vec();
            move |asg: &Assignment| l[asg.pos("x")] == 1
        };
        assert!(exhaustive_check(&f, direct, a, 4, &b).unwrap().is_empty());
        let negated = |w: &WordPrefix| {
            let l = w.letters().to_vec();
            move |asg: &Assignment| l[asg.pos("x")] != 1
        };
        let d = exhaustive_check(&f, negated, a, 4, &b).unwrap();
        assert_eq!(d[0].word, vec![1]);
        assert_eq!(d[0].assignment, Assignment::new().with_pos("x", 0));
        assert!(d[0].got && !d[0].expected);
        assert_eq!(d.len(), (1..=4).map(|l| l * 2usize.pow(l as u32)).sum::<usize>());
    }

    #[test]
    fn check_with_set_domain() {
        let a = Alphabet::new(2).unwrap();
        let f = parse_formula_open("(forall x (implies (in x X) (label 2 x)))", a, &["X"]).unwrap();
        let opts = CheckOptions::default().domain("X", |w: &WordPrefix| {
            PosSet::from_positions(w.letters().iter().enumerate().filter(|(_, &l)| l == 2).map(|(i, _)| i))
        });
        let d = exhaustive_check_with(&f, |_: &WordPrefix| |_: &Assignment| true, a, 5, &EvalBudget::new(1), &opts)
            .unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn first_order_semantics_exhaustive() {
        // "x is the last position labeled 1"
        let a = Alphabet::new(2).unwrap();
        let f = parse_formula_open("(and (label 1 x) (forall y (implies (label 1 y) (<= y x))))", a, &["x"]).unwrap();
        let direct = |w: &WordPrefix| {
            let last = w.letters().iter().rposition(|&l| l == 1);
            move |asg: &Assignment| Some(asg.pos("x")) == last
        };
        assert!(exhaustive_check(&f, direct, a, 8, &EvalBudget { max_word_len: 8, ..EvalBudget::new(1) })
            .unwrap()
            .is_empty());
    }

    #[test]
    fn set_semantics_exhaustive() {
        // "the 2s can be covered by a set not containing consecutive positions"
        // holds iff no two 2s are adjacent.
        let a = Alphabet::new(2).unwrap();
        let f = closed(
            "(existsS X (forall x (and (implies (label 2 x) (in x X)) \
               (forall y (implies (and (in x X) (in y X) (not (<= y x))) \
                 (exists z (and (not (<= z x)) (not (<= y z)))))))))",
            2,
        );
        let direct = |w: &WordPrefix| {
            let ok = !w.letters().windows(2).any(|p| p == [2, 2]);
            move |_: &Assignment| ok
        };
        assert!(exhaustive_check(&f, direct, a, 7, &EvalBudget::new(1)).unwrap().is_empty());
    }

    fn upward_closed(k: u32) -> Formula {
        // Every set containing some position labeled k satisfies the body.
        closed(&format!("(U X (exists x (and (in x X) (label {k} x))))"), 3)
    }

    proptest! {
        #[test]
        fn deterministic(letters in proptest::collection::vec(1u32..=3, 1..8)) {
            let w = WordPrefix::new(Alphabet::new(3).unwrap(), letters).unwrap();
            let f = closed("(U X (forall x (implies (in x X) (not (label 1 x)))))", 3);
            let b = EvalBudget::new(2);
            prop_assert_eq!(evaluate(&f, &w, &Assignment::new(), &b), evaluate(&f, &w, &Assignment::new(), &b));
        }

        #[test]
        fn bounded_u_monotone(letters in proptest::collection::vec(1u32..=3, 1..9), k in 1u32..=3, hi in 1usize..9) {
            let w = WordPrefix::new(Alphabet::new(3).unwrap(), letters).unwrap();
            let f = upward_closed(k);
            if evaluate(&f, &w, &Assignment::new(), &EvalBudget::new(hi)).unwrap() {
                for lo in 0..hi {
                    prop_assert!(evaluate(&f, &w, &Assignment::new(), &EvalBudget::new(lo)).unwrap());
                }
            }
        }
    }
}
