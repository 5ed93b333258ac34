//! Nondeterministic two-counter Minsky machines.
//!
//! Decrement is guarded (blocked on zero) and the zero test is a guard that
//! leaves both counters unchanged.

mod parse;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse_machine;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinskyError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown state `{state}`")]
    UnknownState { line: usize, state: String },
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
    #[error("line {line}: unknown operation `{op}`")]
    UnknownOp { line: usize, op: String },
    #[error("invalid run: {0}")]
    InvalidRun(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Inc1,
    Inc2,
    Dec1,
    Dec2,
    Zero1,
    Zero2,
}

impl Op {
    pub const ALL: [Op; 6] = [Op::Inc1, Op::Inc2, Op::Dec1, Op::Dec2, Op::Zero1, Op::Zero2];

    pub fn name(self) -> &'static str {
        match self {
            Op::Inc1 => "inc1",
            Op::Inc2 => "inc2",
            Op::Dec1 => "dec1",
            Op::Dec2 => "dec2",
            Op::Zero1 => "zero1",
            Op::Zero2 => "zero2",
        }
    }

    pub fn from_name(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == s)
    }

    /// Counter values after the operation, or `None` if it is not enabled.
    pub fn apply(self, c1: u64, c2: u64) -> Option<(u64, u64)> {
        match self {
            Op::Inc1 => Some((c1 + 1, c2)),
            Op::Inc2 => Some((c1, c2 + 1)),
            Op::Dec1 => (c1 > 0).then(|| (c1 - 1, c2)),
            Op::Dec2 => (c2 > 0).then(|| (c1, c2 - 1)),
            Op::Zero1 => (c1 == 0).then_some((c1, c2)),
            Op::Zero2 => (c2 == 0).then_some((c1, c2)),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub op: Op,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinskyMachine {
    states: Vec<String>,
    initial: String,
    final_state: String,
    transitions: Vec<Transition>,
}

impl MinskyMachine {
    pub fn new(
        states: Vec<String>,
        initial: &str,
        final_state: &str,
        transitions: Vec<Transition>,
    ) -> Result<Self, MinskyError> {
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(MinskyError::DuplicateState(s.clone()));
            }
        }
        let known = |s: &str| states.iter().any(|q| q == s);
        for s in [initial, final_state] {
            if !known(s) {
                return Err(MinskyError::UnknownState { line: 0, state: s.into() });
            }
        }
        for t in &transitions {
            for s in [&t.from, &t.to] {
                if !known(s) {
                    return Err(MinskyError::UnknownState { line: 0, state: s.clone() });
                }
            }
        }
        Ok(MinskyMachine { states, initial: initial.into(), final_state: final_state.into(), transitions })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn final_state(&self) -> &str {
        &self.final_state
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    fn state_index(&self, s: &str) -> usize {
        self.states.iter().position(|q| q == s).expect("validated state")
    }

    /// Renders in the line-oriented machine format.
    pub fn to_text(&self) -> String {
        let mut out = format!("states: {}\ninit: {}\nfinal: {}\n", self.states.join(" "), self.initial, self.final_state);
        for t in &self.transitions {
            out.push_str(&format!("trans: {} {} {}\n", t.from, t.op, t.to));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub state: String,
    pub c1: u64,
    pub c2: u64,
}

impl Configuration {
    pub fn new(state: &str, c1: u64, c2: u64) -> Self {
        Configuration { state: state.into(), c1, c2 }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.state, self.c1, self.c2)
    }
}

/// A sequence of configurations and the indices of the transitions taken
/// between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub configurations: Vec<Configuration>,
    pub transitions: Vec<usize>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    /// Checks that consecutive configurations are linked by the recorded
    /// transitions of `m`.
    pub fn validate(&self, m: &MinskyMachine) -> Result<(), MinskyError> {
        if self.configurations.is_empty() {
            return Err(MinskyError::InvalidRun("no configurations".into()));
        }
        if self.transitions.len() + 1 != self.configurations.len() {
            return Err(MinskyError::InvalidRun("transition count does not match".into()));
        }
        for (i, &ti) in self.transitions.iter().enumerate() {
            let t = m.transitions.get(ti).ok_or_else(|| MinskyError::InvalidRun(format!("no transition {ti}")))?;
            let (a, b) = (&self.configurations[i], &self.configurations[i + 1]);
            let ok = t.from == a.state && t.to == b.state && t.op.apply(a.c1, a.c2) == Some((b.c1, b.c2));
            if !ok {
                return Err(MinskyError::InvalidRun(format!("step {i} does not follow transition {ti}")));
            }
        }
        Ok(())
    }

    /// Starts in `(initial, 0, 0)` and ends in the final state.
    pub fn is_accepting(&self, m: &MinskyMachine) -> bool {
        self.validate(m).is_ok()
            && self.configurations[0] == Configuration::new(&m.initial, 0, 0)
            && self.configurations.last().map(|c| c.state == m.final_state).unwrap_or(false)
    }
}

/// Counter pairs of a run, in configuration order, states omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RunDescription(pub Vec<u64>);

impl RunDescription {
    /// Number of configurations described, if the length is even.
    pub fn configurations(&self) -> Option<usize> {
        self.0.len().is_multiple_of(2).then_some(self.0.len() / 2)
    }
}

/// All successors of a configuration, in transition-list order.
pub fn step(m: &MinskyMachine, c: &Configuration) -> Vec<Configuration> {
    successors(m, c).map(|(_, next)| next).collect()
}

fn successors<'a>(
    m: &'a MinskyMachine,
    c: &'a Configuration,
) -> impl Iterator<Item = (usize, Configuration)> + 'a {
    m.transitions.iter().enumerate().filter(move |(_, t)| t.from == c.state).filter_map(move |(i, t)| {
        t.op.apply(c.c1, c.c2).map(|(c1, c2)| (i, Configuration { state: t.to.clone(), c1, c2 }))
    })
}

/// Breadth-first search for a shortest accepting run with at most `max_len`
/// configurations and counters at most `max_counter`. `None` only means that
/// no run exists within these bounds.
pub fn find_accepting_run(m: &MinskyMachine, max_len: usize, max_counter: u64) -> Option<Run> {
    let start = Configuration::new(&m.initial, 0, 0);
    if max_len == 0 {
        return None;
    }
    let mut parent: HashMap<Configuration, Option<(Configuration, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 1usize)]);
    while let Some((c, len)) = queue.pop_front() {
        if c.state == m.final_state {
            let mut configurations = vec![c.clone()];
            let mut transitions = Vec::new();
            let mut cur = c;
            while let Some(Some((prev, t))) = parent.get(&cur).cloned() {
                configurations.push(prev.clone());
                transitions.push(t);
                cur = prev;
            }
            configurations.reverse();
            transitions.reverse();
            return Some(Run { configurations, transitions });
        }
        if len == max_len {
            continue;
        }
        for (t, next) in successors(m, &c) {
            if next.c1 > max_counter || next.c2 > max_counter || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((c.clone(), t)));
            queue.push_back((next, len + 1));
        }
    }
    None
}

pub fn describe_run(r: &Run) -> RunDescription {
    RunDescription(r.configurations.iter().flat_map(|c| [c.c1, c.c2]).collect())
}

/// Whether some assignment of states turns the description into an
/// accepting run of `m`. Dynamic programming over the set of reachable
/// states, with counters fixed by the description.
pub fn validate_description(m: &MinskyMachine, v: &RunDescription) -> bool {
    let Some(k) = v.configurations() else { return false };
    if k == 0 || v.0[0] != 0 || v.0[1] != 0 {
        return false;
    }
    let mut reachable = vec![false; m.states.len()];
    reachable[m.state_index(&m.initial)] = true;
    for i in 1..k {
        let (c1, c2) = (v.0[2 * i - 2], v.0[2 * i - 1]);
        let (d1, d2) = (v.0[2 * i], v.0[2 * i + 1]);
        let mut next = vec![false; m.states.len()];
        for t in &m.transitions {
            if reachable[m.state_index(&t.from)] && t.op.apply(c1, c2) == Some((d1, d2)) {
                next[m.state_index(&t.to)] = true;
            }
        }
        if !next.iter().any(|&b| b) {
            return false;
        }
        reachable = next;
    }
    reachable[m.state_index(&m.final_state)]
}
