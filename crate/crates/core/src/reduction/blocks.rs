//! Named first-order and set building blocks paired with direct checkers
//! on decoded trees, for exhaustive comparison on short words.

use crate::codec::{decode_tree_sequence, WordPrefix};
use crate::eval::{exhaustive_check_with, Assignment, CheckOptions, Disagreement, EvalBudget, EvalError, PosSet};
use crate::logic::{Alphabet, Formula};

use super::builder::{Builder, Keep, Level, View};

/// Leaf paths of a decoded word, indexed by word position.
pub struct TreeIndex {
    depth: usize,
    paths: Vec<Option<Vec<usize>>>,
}

impl TreeIndex {
    /// `None` if the word does not decode.
    pub fn new(w: &WordPrefix) -> Option<TreeIndex> {
        let t = decode_tree_sequence(w).ok()?;
        let mut paths = vec![None; w.len()];
        for (pos, path) in t.leaf_positions().expect("decoded").iter().zip(t.leaf_paths()) {
            paths[*pos] = Some(path);
        }
        Some(TreeIndex { depth: t.depth(), paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_leaf(&self, p: usize) -> bool {
        self.paths[p].is_some()
    }

    /// Tree index followed by child indices from depth 2 down.
    pub fn path(&self, p: usize) -> Option<&[usize]> {
        self.paths[p].as_deref()
    }

    pub fn same(&self, k: usize, p: usize, q: usize) -> bool {
        match (&self.paths[p], &self.paths[q]) {
            (Some(a), Some(b)) => a[..k] == b[..k],
            _ => false,
        }
    }

    pub fn leader(&self, k: usize, p: usize) -> bool {
        self.is_leaf(p) && !(0..p).any(|q| self.same(k, q, p))
    }

    pub fn leaves(&self) -> PosSet {
        PosSet::from_positions((0..self.len()).filter(|&p| self.is_leaf(p)))
    }

    pub fn leaders(&self, k: usize) -> PosSet {
        PosSet::from_positions((0..self.len()).filter(|&p| self.leader(k, p)))
    }

    /// Number of children of the depth-`k` node above leaf `p`.
    pub fn degree(&self, k: usize, p: usize) -> usize {
        let mut kids: Vec<&[usize]> = (0..self.len())
            .filter(|&q| self.same(k, p, q))
            .map(|q| &self.paths[q].as_ref().expect("leaf")[..k + 1])
            .collect();
        kids.dedup();
        kids.len()
    }

    fn index_at(&self, p: usize, depth: usize) -> usize {
        self.paths[p].as_ref().expect("leaf")[depth - 1]
    }

    fn next_sibling(&self, x: usize, y: usize) -> bool {
        self.leader(2, x) && self.leader(2, y) && self.same(1, x, y) && self.index_at(y, 2) == self.index_at(x, 2) + 1
    }

    fn second_sibling(&self, x: usize, y: usize) -> bool {
        self.leader(2, x) && self.leader(2, y) && self.same(1, x, y) && self.index_at(y, 2) == self.index_at(x, 2) + 2
    }
}

enum KeepSets {
    All,
    Under(PosSet),
    Prefix(PosSet),
    Increment(PosSet, PosSet),
    Union(PosSet, PosSet),
}

/// A [`View`] with its set variables resolved, read off the tree paths.
struct ViewIndex<'a> {
    idx: &'a TreeIndex,
    a1: usize,
    a2: usize,
    keep: KeepSets,
}

impl<'a> ViewIndex<'a> {
    fn new(idx: &'a TreeIndex, v: &View, a: &Assignment) -> Self {
        let keep = match &v.keep {
            Keep::All => KeepSets::All,
            Keep::Under(x) => KeepSets::Under(a.set(x)),
            Keep::SelectorPrefix(x) => KeepSets::Prefix(a.set(x)),
            Keep::Increment(x, y) => KeepSets::Increment(a.set(x), a.set(y)),
            Keep::Union(x, y) => KeepSets::Union(a.set(x), a.set(y)),
        };
        ViewIndex { idx, a1: v.a1 as usize, a2: v.a2 as usize, keep }
    }

    fn under(&self, s: PosSet, p: usize) -> Option<usize> {
        s.positions().into_iter().find(|&y| y < self.idx.len() && self.idx.leader(2, y) && self.idx.same(2, p, y))
    }

    fn kept(&self, p: usize) -> bool {
        if !self.idx.is_leaf(p) {
            return false;
        }
        match &self.keep {
            KeepSets::All => true,
            KeepSets::Under(s) => self.under(*s, p).is_some(),
            KeepSets::Prefix(s) => s.positions().into_iter().any(|y| {
                y < self.idx.len()
                    && self.idx.leader(2, y)
                    && self.idx.same(1, p, y)
                    && self.idx.index_at(p, 2) <= self.idx.index_at(y, 2)
            }),
            KeepSets::Increment(s, t) => {
                self.under(*s, p).is_some() || (self.under(*t, p).is_some() && self.idx.index_at(p, 3) != 0)
            }
            KeepSets::Union(s, t) => self.under(*s, p).is_some() || self.under(*t, p).is_some(),
        }
    }

    fn threshold(&self, level: Level) -> usize {
        match level {
            Level::Root => self.a1,
            Level::Inner => self.a2,
        }
    }

    fn same(&self, level: Level, p: usize, q: usize) -> bool {
        self.kept(p) && self.kept(q) && self.idx.same(self.threshold(level), p, q)
    }

    fn leader(&self, level: Level, p: usize) -> bool {
        self.kept(p) && !(0..p).any(|q| self.same(level, q, p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Leaves,
    Leaders(usize),
}

type Oracle = Box<dyn Fn(&TreeIndex, &Assignment) -> bool + Sync + Send>;

/// A formula with free variables and its direct checker.
pub struct Block {
    pub name: String,
    pub alphabet: u32,
    pub formula: Formula,
    pub domains: Vec<(String, Domain)>,
    oracle: Oracle,
}

impl Block {
    pub fn oracle(&self, idx: &TreeIndex, a: &Assignment) -> bool {
        (self.oracle)(idx, a)
    }

    /// Compares formula and checker on every decodable word of length at
    /// most `max_len` and every assignment within the declared domains.
    pub fn check(&self, max_len: usize, budget: &EvalBudget) -> Result<Vec<Disagreement>, EvalError> {
        let alphabet = Alphabet::new(self.alphabet).expect("positive");
        let mut opts = CheckOptions::decodable_only();
        for (var, d) in &self.domains {
            let d = *d;
            opts = opts.domain(var, move |w: &WordPrefix| {
                let idx = TreeIndex::new(w).expect("decodable");
                match d {
                    Domain::Leaves => idx.leaves(),
                    Domain::Leaders(k) => idx.leaders(k),
                }
            });
        }
        let oracle = &self.oracle;
        exhaustive_check_with(
            &self.formula,
            |w: &WordPrefix| {
                let idx = TreeIndex::new(w).expect("decodable");
                move |a: &Assignment| oracle(&idx, a)
            },
            alphabet,
            max_len,
            budget,
            &opts,
        )
    }
}

/// The registry of building blocks used by the reduction formulas.
pub struct BlockPredicates {
    blocks: Vec<Block>,
}

impl BlockPredicates {
    pub fn standard() -> BlockPredicates {
        let mut r = BlockPredicates { blocks: Vec::new() };
        for n in [3u32, 4] {
            r.basics(n);
        }
        r.view_blocks(3, "plain", View::plain());
        r.view_blocks(4, "flattening", View::flattening());
        r.view_blocks(4, "under", View::under("X"));
        r.view_blocks(4, "prefix", View::selector_prefix("X"));
        r.view_blocks(4, "increment", View::increment("X", "Y"));
        r.view_blocks(4, "union", View::union("X", "Y"));
        r.ruler_parts(3);
        r.machine_parts();
        r
    }

    pub fn iter(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter()
    }

    pub fn get(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn add(
        &mut self,
        name: String,
        n: u32,
        formula: Formula,
        domains: &[(&str, Domain)],
        oracle: impl Fn(&TreeIndex, &Assignment) -> bool + Sync + Send + 'static,
    ) {
        let domains = domains.iter().map(|(v, d)| (v.to_string(), *d)).collect();
        self.blocks.push(Block { name, alphabet: n, formula, domains, oracle: Box::new(oracle) });
    }

    fn basics(&mut self, n: u32) {
        let reserved = ["x", "y", "X"];
        let b = Builder::new(n, &reserved);
        self.add(format!("leaf/{n}"), n, b.leaf("x"), &[], |i, a| i.is_leaf(a.pos("x")));
        for k in 1..n {
            let ku = k as usize;
            let mut b = Builder::new(n, &reserved);
            self.add(format!("same/{n}/{k}"), n, b.same(k, "x", "y"), &[], move |i, a| {
                i.same(ku, a.pos("x"), a.pos("y"))
            });
            self.add(format!("leader/{n}/{k}"), n, b.leader(k, "x"), &[], move |i, a| i.leader(ku, a.pos("x")));
            self.add(
                format!("within-one-block/{n}/{k}"),
                n,
                b.within_one_block(k, "X"),
                &[("X", Domain::Leaves)],
                move |i, a| {
                    let s = a.set("X").positions();
                    s.iter().all(|&p| s.iter().all(|&q| i.same(ku, p, q)))
                },
            );
        }
        let mut b = Builder::new(n, &reserved);
        self.add(format!("infinite/{n}"), n, b.infinite("X"), &[("X", Domain::Leaves)], |i, _| i.is_empty());
    }

    fn view_blocks(&mut self, n: u32, tag: &str, v: View) {
        let sets: Vec<(&str, Domain)> = match &v.keep {
            Keep::All => vec![],
            Keep::Under(_) | Keep::SelectorPrefix(_) => vec![("X", Domain::Leaders(2))],
            Keep::Increment(..) | Keep::Union(..) => vec![("X", Domain::Leaders(2)), ("Y", Domain::Leaders(2))],
        };
        let reserved = ["x", "y", "X", "Y"];
        let mut b = Builder::new(n, &reserved);
        let vv = v.clone();
        self.add(format!("kept/{tag}"), n, b.kept(&v, "x"), &sets, move |i, a| {
            ViewIndex::new(i, &vv, a).kept(a.pos("x"))
        });
        for (lname, level) in [("root", Level::Root), ("inner", Level::Inner)] {
            let vv = v.clone();
            self.add(format!("same-{lname}/{tag}"), n, b.same_v(&v, level, "x", "y"), &sets, move |i, a| {
                ViewIndex::new(i, &vv, a).same(level, a.pos("x"), a.pos("y"))
            });
            let vv = v.clone();
            self.add(format!("leader-{lname}/{tag}"), n, b.leader_v(&v, level, "x"), &sets, move |i, a| {
                ViewIndex::new(i, &vv, a).leader(level, a.pos("x"))
            });
        }
    }

    fn ruler_parts(&mut self, n: u32) {
        let v = View::plain();
        let reserved = ["x", "y", "X", "Y", "G", "P"];
        let mut b = Builder::new(n, &reserved);
        let vv = v.clone();
        self.add(
            "leaders-only-root".into(),
            n,
            b.leaders_only(&v, Level::Root, "X"),
            &[("X", Domain::Leaves)],
            move |i, a| {
                let w = ViewIndex::new(i, &vv, a);
                a.set("X").positions().iter().all(|&p| w.leader(Level::Root, p))
            },
        );
        let vv = v.clone();
        self.add(
            "under-roots".into(),
            n,
            b.under_roots(&v, "G", "X"),
            &[("G", Domain::Leaves), ("X", Domain::Leaders(1))],
            move |i, a| {
                let w = ViewIndex::new(i, &vv, a);
                let roots = a.set("X").positions();
                a.set("G").positions().iter().all(|&g| roots.iter().any(|&r| w.same(Level::Root, r, g)))
            },
        );
        let vv = v.clone();
        self.add(
            "picks".into(),
            n,
            b.picks(&v, "P", "X"),
            &[("P", Domain::Leaves), ("X", Domain::Leaders(1))],
            move |i, a| {
                let w = ViewIndex::new(i, &vv, a);
                let roots = a.set("X").positions();
                let picked = a.set("P").positions();
                let good = picked.iter().all(|&p| w.leader(Level::Inner, p) && roots.iter().any(|&r| w.same(Level::Root, r, p)));
                good && roots.iter().all(|&r| picked.iter().filter(|&&p| w.same(Level::Root, r, p)).count() == 1)
            },
        );
        self.add(
            "alternating".into(),
            n,
            b.alternating("X", "Y"),
            &[("X", Domain::Leaders(1)), ("Y", Domain::Leaders(1))],
            |_, a| {
                let (x, y) = (a.set("X").positions(), a.set("Y").positions());
                let sep = |s: &[usize], t: &[usize]| s.windows(2).all(|w| t.iter().any(|&c| w[0] < c && c < w[1]));
                sep(&x, &y) && sep(&y, &x)
            },
        );
        self.add(
            "next-in".into(),
            n,
            b.next_in("x", "y", "Y"),
            &[("Y", Domain::Leaders(1))],
            |_, a| {
                let (x, y) = (a.pos("x"), a.pos("y"));
                a.set("Y").positions().into_iter().find(|&c| c > x) == Some(y)
            },
        );
    }

    fn machine_parts(&mut self) {
        let n = 4;
        let reserved = ["x", "y", "p", "X", "Y", "O"];
        let mut b = Builder::new(n, &reserved);
        self.add("next-sibling".into(), n, b.next_sibling("x", "y"), &[], |i, a| {
            i.next_sibling(a.pos("x"), a.pos("y"))
        });
        self.add("second-sibling".into(), n, b.second_sibling("x", "y"), &[], |i, a| {
            i.second_sibling(a.pos("x"), a.pos("y"))
        });
        self.add("first-child".into(), n, b.first_child("x"), &[], |i, a| {
            let x = a.pos("x");
            i.is_leaf(x) && i.index_at(x, 2) == 0 && i.leader(2, x)
        });
        self.add("single-child".into(), n, b.single_child("x"), &[], |i, a| {
            let x = a.pos("x");
            !i.is_leaf(x) || i.degree(2, x) == 1
        });
        self.add("selects-one".into(), n, b.selects_one("X"), &[("X", Domain::Leaves)], |i, a| {
            let s = a.set("X").positions();
            let roots = i.leaders(1).positions();
            s.iter().all(|&x| i.leader(2, x))
                && roots.iter().all(|&r| s.iter().filter(|&&x| i.same(1, r, x)).count() == 1)
        });
        self.add("first-column".into(), n, b.first_column("X"), &[("X", Domain::Leaves)], |i, a| {
            a.set("X").positions().iter().all(|&x| i.leader(2, x) && i.index_at(x, 2) == 0)
        });
        self.add("zero-strict".into(), n, b.zero_strict("X"), &[("X", Domain::Leaders(2))], |i, a| {
            a.set("X").positions().iter().all(|&x| i.degree(2, x) == 1)
        });
        let shifted = |offset: usize| {
            move |i: &TreeIndex, a: &Assignment| {
                let xs = a.set("X").positions();
                (0..i.len()).all(|y| {
                    let want = xs.iter().any(|&x| {
                        i.leader(2, x)
                            && i.leader(2, y)
                            && i.same(1, x, y)
                            && i.index_at(y, 2) == i.index_at(x, 2) + offset
                    });
                    a.set("Y").contains(y) == want
                })
            }
        };
        let both = [("X", Domain::Leaders(2)), ("Y", Domain::Leaders(2))];
        self.add("shift1".into(), n, b.shift1("X", "Y"), &both, shifted(1));
        self.add("shift2".into(), n, b.shift2("X", "Y"), &both, shifted(2));
        self.add("odd-children".into(), n, b.odd_children("O", "p"), &[("O", Domain::Leaves)], |i, a| {
            let p = a.pos("p");
            let o = a.set("O");
            (p + 1..i.len()).all(|x| {
                if o.contains(x) && !i.leader(2, x) {
                    return false;
                }
                if o.contains(x) && i.degree(1, x) <= i.index_at(x, 2) + 1 {
                    return false;
                }
                if !i.leader(2, x) {
                    return true;
                }
                let expect = if i.index_at(x, 2) == 0 {
                    true
                } else {
                    let prev = (0..x).rev().find(|&w| i.leader(2, w)).expect("earlier sibling");
                    !o.contains(prev)
                };
                o.contains(x) == expect
            })
        });
        self.add("last-odd".into(), n, b.last_odd("O", "x"), &[("O", Domain::Leaves)], |i, a| {
            let (x, o) = (a.pos("x"), a.set("O"));
            o.contains(x) && !(x + 1..i.len()).any(|y| o.contains(y) && i.same(1, x, y))
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_on_sample() {
        let w = WordPrefix::parse("1 3 3 2 3 1 3", None).unwrap();
        let i = TreeIndex::new(&w).unwrap();
        assert!(i.is_leaf(1) && !i.is_leaf(3));
        assert!(i.same(2, 1, 2) && !i.same(2, 2, 4) && i.same(1, 2, 4) && !i.same(1, 4, 6));
        assert_eq!(i.leaders(1).positions(), vec![1, 6]);
        assert_eq!(i.leaders(2).positions(), vec![1, 4, 6]);
        assert_eq!(i.degree(1, 1), 2);
        assert_eq!(i.degree(2, 1), 2);
    }

    #[test]
    fn registry_names_unique() {
        let r = BlockPredicates::standard();
        let mut names: Vec<&str> = r.iter().map(|b| b.name.as_str()).collect();
        names.sort();
        let before = names.len();
        names.dedup();
        assert_eq!(names.len(), before);
        assert!(r.iter().all(|b| !b.formula.contains_unbounded()));
    }

    #[test]
    fn short_words_agree() {
        let budget = EvalBudget { u_threshold: 1, max_word_len: 5, max_set_depth: 0 };
        for b in BlockPredicates::standard().iter() {
            let d = b.check(5, &budget).unwrap();
            assert!(d.is_empty(), "{}: {:?}", b.name, d.first());
        }
    }
}
