use crate::logic::build::*;
use crate::logic::Formula;
use crate::minsky::{MinskyMachine, Op};

use super::builder::{Builder, View};

/// Words over `{1,2,3}` with infinitely many 1s whose depth-2 degrees tend
/// to infinity and whose roots eventually share one degree.
pub fn ruler_formula() -> Formula {
    let mut b = Builder::new(3, &[]);
    let ones = b.infinitely_many_ones();
    let r = b.ruler(&View::plain());
    and([ones, r])
}

/// `X` is a depth-2 selector, over `{1,2,3,4}`.
pub fn selector_formula(x: &str) -> Formula {
    Builder::new(4, &[x]).selector(x)
}

/// Eventually every node of `X` has a single child, over `{1,2,3,4}`.
pub fn zero_formula(x: &str) -> Formula {
    Builder::new(4, &[x]).zero(x)
}

/// Eventually nodes of `Y` have one child more than nodes of `X`.
pub fn increment_formula(x: &str, y: &str) -> Formula {
    Builder::new(4, &[x, y]).increments(x, y)
}

/// Eventually nodes of `X` and `Y` have equal degree.
pub fn same_degree_formula(x: &str, y: &str) -> Formula {
    Builder::new(4, &[x, y]).same_degree(x, y)
}

/// Counter relation between configuration columns `(x, x2)` and the next
/// configuration `(y, y2)`.
fn op_relation(b: &mut Builder, op: Op, x: &str, x2: &str, y: &str, y2: &str) -> Formula {
    match op {
        Op::Inc1 => and([b.increments(x, y), b.same_degree(x2, y2)]),
        Op::Dec1 => and([b.increments(y, x), b.same_degree(x2, y2)]),
        Op::Inc2 => and([b.same_degree(x, y), b.increments(x2, y2)]),
        Op::Dec2 => and([b.same_degree(x, y), b.increments(y2, x2)]),
        Op::Zero1 => and([b.zero(x), b.same_degree(x, y), b.same_degree(x2, y2)]),
        Op::Zero2 => and([b.zero(x2), b.same_degree(x, y), b.same_degree(x2, y2)]),
    }
}

/// Formula over `{1,2,3,4}` satisfiable exactly when `m` has an accepting
/// run. Depth-1 nodes eventually have `2k` children whose degrees minus one
/// list the counters of a `k`-configuration run.
///
/// The run is guessed as sets of odd children: `O` (first counter of each
/// configuration), one set per state, one per transition, and one per
/// operation kind. A constant-size kernel then relates each odd column to
/// the next one through selectors.
pub fn machine_to_formula(m: &MinskyMachine) -> Formula {
    let mut b = Builder::new(4, &[]);
    let ones = b.infinitely_many_ones();
    let deep = b.depth_tends(3);
    let flat = b.ruler(&View::flattening());
    let columns = {
        let x = b.fresh_set();
        let sel = b.selector(&x);
        let constant = b.ruler(&View::under(&x));
        forall_set(&x, implies(sel, constant))
    };
    let run = run_condition(&mut b, m);
    and([ones, deep, flat, columns, run])
}

fn falsum(x: &str) -> Formula {
    not(le(x, x))
}

fn run_condition(b: &mut Builder, m: &MinskyMachine) -> Formula {
    let p = b.fresh_pos();
    let o = b.fresh_set();
    let states: Vec<String> = m.states().iter().map(|_| b.fresh_set()).collect();
    let prefixes: Vec<String> = m.states().iter().map(|_| b.fresh_set()).collect();
    let trans: Vec<String> = m.transitions().iter().map(|_| b.fresh_set()).collect();
    let kinds: Vec<String> = Op::ALL.iter().map(|_| b.fresh_set()).collect();
    let state_set = |name: &str| -> &str {
        let i = m.states().iter().position(|s| s == name).expect("validated state");
        &states[i]
    };
    let kind_set = |op: Op| -> &str { &kinds[Op::ALL.iter().position(|&o| o == op).expect("listed")] };

    let mut parts = vec![b.odd_children(&o, &p)];

    // Exactly one state per odd child, via running unions of the state sets.
    {
        let x = b.fresh_pos();
        let mut each = vec![iff(member(&x, &o), member(&x, prefixes.last().expect("at least one state")))];
        for j in 0..states.len() {
            if j == 0 {
                each.push(iff(member(&x, &prefixes[0]), member(&x, &states[0])));
            } else {
                each.push(iff(
                    member(&x, &prefixes[j]),
                    or([member(&x, &prefixes[j - 1]), member(&x, &states[j])]),
                ));
                each.push(not(and([member(&x, &prefixes[j - 1]), member(&x, &states[j])])));
            }
        }
        parts.push(forall(&x, implies(lt(&p, &x), and(each))));
    }

    // Initial and final states.
    {
        let x = b.fresh_pos();
        let first = and([member(&x, &o), b.first_child(&x)]);
        parts.push(forall(&x, implies(and([lt(&p, &x), first]), member(&x, state_set(m.initial())))));
        let y = b.fresh_pos();
        let last = b.last_odd(&o, &y);
        parts.push(forall(&y, implies(and([lt(&p, &y), last]), member(&y, state_set(m.final_state())))));
    }

    // Each transition set sits on odd children in its source state whose
    // next odd sibling is in its target state, and feeds its operation kind.
    for (t, tr) in m.transitions().iter().enumerate() {
        let (x, y) = (b.fresh_pos(), b.fresh_pos());
        let step = exists(&y, and([b.second_sibling(&x, &y), member(&y, state_set(&tr.to))]));
        let body = and([
            member(&x, &o),
            member(&x, state_set(&tr.from)),
            step,
            member(&x, kind_set(tr.op)),
        ]);
        parts.push(forall(&x, implies(and([lt(&p, &x), member(&x, &trans[t])]), body)));
    }

    // Every odd child that is not last takes some transition.
    {
        let x = b.fresh_pos();
        let has_next = not(b.last_odd(&o, &x));
        let mut options = vec![falsum(&x)];
        options.extend(trans.iter().map(|t| member(&x, t)));
        let covered = implies(and([lt(&p, &x), member(&x, &o), has_next]), or(options));
        parts.push(forall(&x, covered));
    }

    // Uniformity: along any selector the guessed sets settle.
    {
        let x = b.fresh_set();
        let sel = b.selector(&x);
        let mut settle = Vec::new();
        for s in std::iter::once(&o).chain(&states).chain(&trans) {
            let all = b.ev_all(&x, s);
            let none = b.ev_none(&x, s);
            settle.push(or([all, none]));
        }
        parts.push(forall_set(&x, implies(sel, and(settle))));
    }

    // Both counters start at zero.
    {
        let (x, x2) = (b.fresh_set(), b.fresh_set());
        let hyp = and([b.selector(&x), b.first_column(&x), b.shift1(&x, &x2)]);
        let zeros = and([b.zero(&x), b.zero(&x2)]);
        parts.push(forall_set(&x, forall_set(&x2, implies(hyp, zeros))));
    }

    // Kernel: consecutive configurations respect the operation taken.
    {
        let (x, x2, y, y2) = (b.fresh_set(), b.fresh_set(), b.fresh_set(), b.fresh_set());
        let hyp = and([b.selector(&x), b.ev_all(&x, &o), b.shift1(&x, &x2), b.shift2(&x, &y), b.shift1(&y, &y2)]);
        let mut rules = Vec::new();
        for op in Op::ALL {
            let taken = b.ev_all(&x, kind_set(op));
            rules.push(implies(taken, op_relation(b, op, &x, &x2, &y, &y2)));
        }
        let body = implies(hyp, and(rules));
        parts.push(forall_set(&x, forall_set(&x2, forall_set(&y, forall_set(&y2, body)))));
    }

    let mut f = and(parts);
    for k in kinds.iter().rev() {
        f = exists_set(k, f);
    }
    for t in trans.iter().rev() {
        f = exists_set(t, f);
    }
    for (q, pre) in states.iter().zip(&prefixes).rev() {
        f = exists_set(q, exists_set(pre, f));
    }
    exists(&p, exists_set(&o, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{analyze, parse_formula, render_formula, Alphabet};
    use crate::minsky::parse_machine;

    const SAMPLE: &str = "states: q0 q1 q2 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 inc1 q2\ntrans: q2 zero2 qf\n";

    #[test]
    fn ruler_round_trips() {
        let f = ruler_formula();
        let a = analyze(&f);
        assert!(a.free_set_vars.is_empty() && a.free_position_vars.is_empty());
        let text = render_formula(&f);
        assert_eq!(parse_formula(&text, Alphabet::new(3).unwrap()).unwrap(), f);
    }

    #[test]
    fn block_free_variables() {
        assert_eq!(analyze(&selector_formula("X")).free_set_vars.into_iter().collect::<Vec<_>>(), vec!["X"]);
        let z = zero_formula("X");
        assert!(!z.contains_set_quantifier() && !z.contains_unbounded());
        let inc = analyze(&increment_formula("X", "Y"));
        assert_eq!(inc.free_set_vars.len(), 2);
        assert!(inc.free_position_vars.is_empty());
    }

    #[test]
    fn machine_formula_is_closed_and_parses() {
        let m = parse_machine(SAMPLE).unwrap();
        let f = machine_to_formula(&m);
        let a = analyze(&f);
        assert!(a.free_set_vars.is_empty() && a.free_position_vars.is_empty());
        assert!(f.letters().iter().all(|l| (1..=4).contains(l)));
        let text = render_formula(&f);
        assert_eq!(parse_formula(&text, Alphabet::new(4).unwrap()).unwrap(), f);
        assert_eq!(render_formula(&machine_to_formula(&parse_machine(SAMPLE).unwrap())), text);
    }
}
