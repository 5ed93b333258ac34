use std::collections::BTreeSet;

use serde::Serialize;

use super::{Formula, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub free_position_vars: BTreeSet<String>,
    pub free_set_vars: BTreeSet<String>,
    /// Node count.
    pub size: usize,
    /// Maximum nesting of quantifiers of any kind.
    pub quantifier_depth: usize,
    /// Maximum nesting of set quantifiers and `U`.
    pub set_quantifier_depth: usize,
}

pub fn analyze(f: &Formula) -> Analysis {
    let mut a = Analysis {
        free_position_vars: BTreeSet::new(),
        free_set_vars: BTreeSet::new(),
        size: 0,
        quantifier_depth: 0,
        set_quantifier_depth: 0,
    };
    let mut bound = Vec::new();
    let (q, s) = walk(f, &mut bound, &mut a);
    a.quantifier_depth = q;
    a.set_quantifier_depth = s;
    a
}

fn walk<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, a: &mut Analysis) -> (usize, usize) {
    a.size += 1;
    let free = |name: &str, bound: &Vec<&'a str>, a: &mut Analysis| {
        if !bound.contains(&name) {
            match Sort::of(name) {
                Some(Sort::Set) => a.free_set_vars.insert(name.to_string()),
                _ => a.free_position_vars.insert(name.to_string()),
            };
        }
    };
    match f {
        Formula::LessEq(x, y) => {
            free(x, bound, a);
            free(y, bound, a);
            (0, 0)
        }
        Formula::Label(_, x) => {
            free(x, bound, a);
            (0, 0)
        }
        Formula::In(x, s) => {
            free(x, bound, a);
            free(s, bound, a);
            (0, 0)
        }
        _ => {
            if let Some((v, sort)) = f.binder() {
                bound.push(v);
                let (q, s) = walk(f.children()[0], bound, a);
                bound.pop();
                (q + 1, if sort == Sort::Set { s + 1 } else { s })
            } else {
                f.children()
                    .into_iter()
                    .map(|c| walk(c, bound, a))
                    .fold((0, 0), |(q, s), (q2, s2)| (q.max(q2), s.max(s2)))
            }
        }
    }
}
