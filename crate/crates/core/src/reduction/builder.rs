//! Formula builders over words read as tree sequences.
//!
//! A node is named by its leader, the first leaf of its block. Degrees are
//! never counted directly: "large degree" means "arbitrarily large sets of
//! leaves or leaders inside one block", stated with `U`.

use crate::logic::build::*;
use crate::logic::Formula;

/// Which leaves survive in a [`View`]. Set variables range over original
/// depth-2 leaders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Keep {
    All,
    /// Leaves under the depth-2 nodes of `X`.
    Under(String),
    /// Leaves under the depth-2 nodes of `X` and under their left siblings.
    SelectorPrefix(String),
    /// Leaves under `X` nodes, plus leaves under `Y` nodes outside their
    /// first depth-3 child.
    Increment(String, String),
    Union(String, String),
}

/// A depth-3 tree sequence carved out of a word. Roots are separated by
/// labels at most `a1`, depth-2 nodes by labels at most `a2`, and the leaves
/// are the kept positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct View {
    pub a1: u32,
    pub a2: u32,
    pub keep: Keep,
}

impl View {
    /// The word itself over `{1,2,3}`.
    pub fn plain() -> View {
        View { a1: 1, a2: 2, keep: Keep::All }
    }

    /// Depth-3 nodes removed, leaves hung directly on depth-2 nodes.
    pub fn flattening() -> View {
        View { a1: 1, a2: 2, keep: Keep::All }
    }

    /// Each depth-2 node of `X` becomes a root.
    pub fn under(x: &str) -> View {
        View { a1: 2, a2: 3, keep: Keep::Under(x.into()) }
    }

    pub fn selector_prefix(x: &str) -> View {
        View { a1: 1, a2: 2, keep: Keep::SelectorPrefix(x.into()) }
    }

    pub fn increment(x: &str, y: &str) -> View {
        View { a1: 2, a2: 3, keep: Keep::Increment(x.into(), y.into()) }
    }

    pub fn union(x: &str, y: &str) -> View {
        View { a1: 2, a2: 3, keep: Keep::Union(x.into(), y.into()) }
    }

    fn threshold(&self, level: Level) -> u32 {
        match level {
            Level::Root => self.a1,
            Level::Inner => self.a2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Root,
    Inner,
}

/// Formula factory for words over `{1..n}`.
pub struct Builder {
    n: u32,
    fresh: Fresh,
}

impl Builder {
    /// `reserved` lists the caller's free variable names.
    pub fn new(n: u32, reserved: &[&str]) -> Builder {
        assert!(n >= 2, "alphabet too small for trees");
        Builder { n, fresh: Fresh::avoiding(reserved.iter().copied()) }
    }

    pub fn alphabet(&self) -> u32 {
        self.n
    }

    pub fn fresh_pos(&mut self) -> String {
        self.fresh.pos()
    }

    pub fn fresh_set(&mut self) -> String {
        self.fresh.set()
    }

    pub fn leaf(&self, x: &str) -> Formula {
        label(self.n, x)
    }

    /// No label in `{1..k}` strictly between `x` and `y`.
    pub fn no_sep(&mut self, k: u32, x: &str, y: &str) -> Formula {
        let z = self.fresh_pos();
        forall(&z, implies(strictly_between(x, &z, y), not(label_at_most(k, &z))))
    }

    /// Leaves `x` and `y` lie in the same depth-`k` node.
    pub fn same(&mut self, k: u32, x: &str, y: &str) -> Formula {
        and([self.leaf(x), self.leaf(y), self.no_sep(k, x, y)])
    }

    /// `x` is the first leaf of its depth-`k` node.
    pub fn leader(&mut self, k: u32, x: &str) -> Formula {
        let y = self.fresh_pos();
        let before = and([lt(&y, x), self.same(k, &y, x)]);
        and([self.leaf(x), not(exists(&y, before))])
    }

    /// All elements of `s` are leaves of one depth-`k` node.
    pub fn within_one_block(&mut self, k: u32, s: &str) -> Formula {
        let (x, y) = (self.fresh_pos(), self.fresh_pos());
        let body = implies(and([member(&x, s), member(&y, s)]), self.same(k, &x, &y));
        forall(&x, forall(&y, body))
    }

    pub fn infinite(&mut self, s: &str) -> Formula {
        let (p, x) = (self.fresh_pos(), self.fresh_pos());
        forall(&p, exists(&x, and([lt(&p, &x), member(&x, s)])))
    }

    /// Past some position, every element of `x` is in `s`.
    pub fn ev_all(&mut self, x: &str, s: &str) -> Formula {
        let (p, y) = (self.fresh_pos(), self.fresh_pos());
        exists(&p, forall(&y, implies(and([lt(&p, &y), member(&y, x)]), member(&y, s))))
    }

    /// Past some position, no element of `x` is in `s`.
    pub fn ev_none(&mut self, x: &str, s: &str) -> Formula {
        let (p, y) = (self.fresh_pos(), self.fresh_pos());
        exists(&p, forall(&y, implies(and([lt(&p, &y), member(&y, x)]), not(member(&y, s)))))
    }

    fn in_node(&mut self, s: &str, x: &str) -> Formula {
        let y = self.fresh_pos();
        let body = and([member(&y, s), self.leader(2, &y), self.same(2, x, &y)]);
        exists(&y, body)
    }

    pub fn kept(&mut self, v: &View, x: &str) -> Formula {
        match &v.keep {
            Keep::All => self.leaf(x),
            Keep::Under(s) => self.in_node(s, x),
            Keep::SelectorPrefix(s) => {
                let y = self.fresh_pos();
                let at_or_before = or([lt(x, &y), self.same(2, x, &y)]);
                let body = and([member(&y, s), self.leader(2, &y), self.same(1, x, &y), at_or_before]);
                exists(&y, body)
            }
            Keep::Increment(s, t) => {
                let under_s = self.in_node(s, x);
                let y = self.fresh_pos();
                let trimmed = and([member(&y, t), self.leader(2, &y), self.same(2, x, &y), not(self.same(3, x, &y))]);
                or([under_s, exists(&y, trimmed)])
            }
            Keep::Union(s, t) => {
                let a = self.in_node(s, x);
                let b = self.in_node(t, x);
                or([a, b])
            }
        }
    }

    /// Kept leaves `x`, `y` in the same view node at `level`.
    pub fn same_v(&mut self, v: &View, level: Level, x: &str, y: &str) -> Formula {
        let a = v.threshold(level);
        and([self.kept(v, x), self.kept(v, y), self.no_sep(a, x, y)])
    }

    /// `x` is the first kept leaf of its view node at `level`.
    pub fn leader_v(&mut self, v: &View, level: Level, x: &str) -> Formula {
        let a = v.threshold(level);
        let y = self.fresh_pos();
        let before = and([lt(&y, x), self.kept(v, &y), self.no_sep(a, &y, x)]);
        and([self.kept(v, x), not(exists(&y, before))])
    }

    /// Every element of `s` leads a view node at `level`.
    pub fn leaders_only(&mut self, v: &View, level: Level, s: &str) -> Formula {
        let x = self.fresh_pos();
        forall(&x, implies(member(&x, s), self.leader_v(v, level, &x)))
    }

    /// Every element of `g` lies in a root led by an element of `roots`.
    pub fn under_roots(&mut self, v: &View, g: &str, roots: &str) -> Formula {
        let (z, r) = (self.fresh_pos(), self.fresh_pos());
        let inside = exists(&r, and([member(&r, roots), self.same_v(v, Level::Root, &r, &z)]));
        forall(&z, implies(member(&z, g), inside))
    }

    /// `p` holds exactly one depth-2 leader of the view below each root of
    /// `roots`, and nothing else.
    pub fn picks(&mut self, v: &View, p: &str, roots: &str) -> Formula {
        let (z, r) = (self.fresh_pos(), self.fresh_pos());
        let placed = exists(&r, and([member(&r, roots), self.same_v(v, Level::Root, &r, &z)]));
        let only = forall(&z, implies(member(&z, p), and([self.leader_v(v, Level::Inner, &z), placed])));
        let (r2, z2) = (self.fresh_pos(), self.fresh_pos());
        let some = exists(&z2, and([member(&z2, p), self.same_v(v, Level::Root, &r2, &z2)]));
        let covered = forall(&r2, implies(member(&r2, roots), some));
        let (a, b) = (self.fresh_pos(), self.fresh_pos());
        let pair = and([member(&a, p), member(&b, p), self.same_v(v, Level::Root, &a, &b)]);
        let unique = forall(&a, forall(&b, implies(pair, eq(&a, &b))));
        and([only, covered, unique])
    }

    /// Between any two elements of `x` lies an element of `y`.
    pub fn separated_by(&mut self, x: &str, y: &str) -> Formula {
        let (a, b, c) = (self.fresh_pos(), self.fresh_pos(), self.fresh_pos());
        let between = exists(&c, and([member(&c, y), lt(&a, &c), lt(&c, &b)]));
        forall(&a, forall(&b, implies(and([member(&a, x), member(&b, x), lt(&a, &b)]), between)))
    }

    pub fn alternating(&mut self, x: &str, y: &str) -> Formula {
        and([self.separated_by(x, y), self.separated_by(y, x)])
    }

    /// `y` is the first element of `s` after `x`.
    pub fn next_in(&mut self, x: &str, y: &str, s: &str) -> Formula {
        let z = self.fresh_pos();
        let earlier = exists(&z, and([member(&z, s), lt(x, &z), lt(&z, y)]));
        and([member(y, s), lt(x, y), not(earlier)])
    }

    /// Degrees of depth-2 view nodes tend to infinity.
    pub fn tends(&mut self, v: &View) -> Formula {
        let (s, z) = (self.fresh_set(), self.fresh_set());
        let (y, u) = (self.fresh_pos(), self.fresh_pos());
        let hyp = and([self.leaders_only(v, Level::Inner, &s), self.infinite(&s)]);
        let one = forall(&u, implies(member(&u, &z), self.same_v(v, Level::Inner, &y, &u)));
        let large = unbounded(&z, exists(&y, and([member(&y, &s), one])));
        forall_set(&s, implies(hyp, large))
    }

    pub fn infinitely_many_roots(&mut self, v: &View) -> Formula {
        let (p, x) = (self.fresh_pos(), self.fresh_pos());
        forall(&p, exists(&x, and([lt(&p, &x), self.leader_v(v, Level::Root, &x)])))
    }

    /// Roots of the view have bounded degree.
    pub fn bounded_roots(&mut self, v: &View) -> Formula {
        let z = self.fresh_set();
        let (r, u) = (self.fresh_pos(), self.fresh_pos());
        let child = and([self.leader_v(v, Level::Inner, &u), self.same_v(v, Level::Root, &r, &u)]);
        let one = forall(&u, implies(member(&u, &z), child));
        not(unbounded(&z, exists(&r, and([self.leader_v(v, Level::Root, &r), one]))))
    }

    /// `z` is an arbitrarily large set of `g`-leaves inside one depth-2 node
    /// picked by `p` below a root of `i`.
    fn picked_mass(&mut self, v: &View, i: &str, p: &str, g: &str) -> Formula {
        let z = self.fresh_set();
        let (x, q, u) = (self.fresh_pos(), self.fresh_pos(), self.fresh_pos());
        let inside = forall(&u, implies(member(&u, &z), and([member(&u, g), self.same_v(v, Level::Inner, &q, &u)])));
        let body = and([member(&x, i), member(&q, p), self.same_v(v, Level::Root, &x, &q), inside]);
        unbounded(&z, exists(&x, exists(&q, body)))
    }

    /// Like [`Self::picked_mass`], for the root of `ys` following each root of `i`.
    fn paired_mass(&mut self, v: &View, i: &str, ys: &str, q: &str, h: &str) -> Formula {
        let z = self.fresh_set();
        let (x, y, c, u) = (self.fresh_pos(), self.fresh_pos(), self.fresh_pos(), self.fresh_pos());
        let inside = forall(&u, implies(member(&u, &z), and([member(&u, h), self.same_v(v, Level::Inner, &c, &u)])));
        let body = and([member(&x, i), self.next_in(&x, &y, ys), member(&c, q), self.same_v(v, Level::Root, &y, &c), inside]);
        unbounded(&z, exists(&x, exists(&y, exists(&c, body))))
    }

    /// No infinite alternating root sets `X`, `Y` where `X` roots have more
    /// children than the following `Y` roots infinitely often. The
    /// dimension gap is detected as: some `g1 <= f_X` (leaf set `G`) is not
    /// a mix of any `g2 <= f_Y` (leaf set `H`).
    pub fn no_alternating_gap(&mut self, v: &View) -> Formula {
        let (xs, ys, g, h, p, q, i) = (self.fresh_set(), self.fresh_set(), self.fresh_set(), self.fresh_set(), self.fresh_set(), self.fresh_set(), self.fresh_set());
        let sets = and([
            self.leaders_only(v, Level::Root, &xs),
            self.leaders_only(v, Level::Root, &ys),
            self.infinite(&xs),
            self.infinite(&ys),
            self.alternating(&xs, &ys),
        ]);
        let i_sub = {
            let x = self.fresh_pos();
            forall(&x, implies(member(&x, &i), member(&x, &xs)))
        };
        let gm = self.picked_mass(v, &i, &p, &g);
        let hm = self.paired_mass(v, &i, &ys, &q, &h);
        let differ = exists_set(&i, and([i_sub, not(iff(gm, hm))]));
        let inner = forall_set(&q, implies(self.picks(v, &q, &ys), differ));
        let sel = exists_set(&p, and([self.picks(v, &p, &xs), inner]));
        let not_mix = forall_set(&h, implies(self.under_roots(v, &h, &ys), sel));
        let witness = exists_set(&g, and([self.under_roots(v, &g, &xs), not_mix]));
        not(exists_set(&xs, exists_set(&ys, and([sets, witness]))))
    }

    /// Well-formed with almost constant root degree.
    pub fn ruler(&mut self, v: &View) -> Formula {
        and([self.infinitely_many_roots(v), self.tends(v), self.bounded_roots(v), self.no_alternating_gap(v)])
    }

    /// Degrees of original depth-`k` nodes tend to infinity.
    pub fn depth_tends(&mut self, k: u32) -> Formula {
        let (s, z) = (self.fresh_set(), self.fresh_set());
        let (y, u) = (self.fresh_pos(), self.fresh_pos());
        let leaders = {
            let x = self.fresh_pos();
            forall(&x, implies(member(&x, &s), self.leader(k, &x)))
        };
        let hyp = and([leaders, self.infinite(&s)]);
        let child = and([self.leader(k + 1, &u), self.same(k, &y, &u)]);
        let one = forall(&u, implies(member(&u, &z), child));
        forall_set(&s, implies(hyp, unbounded(&z, exists(&y, and([member(&y, &s), one])))))
    }

    pub fn infinitely_many_ones(&mut self) -> Formula {
        let (p, x) = (self.fresh_pos(), self.fresh_pos());
        forall(&p, exists(&x, and([lt(&p, &x), label(1, &x)])))
    }

    /// `x` and `y` lead consecutive depth-2 siblings.
    pub fn next_sibling(&mut self, x: &str, y: &str) -> Formula {
        let z = self.fresh_pos();
        let gap = exists(&z, and([lt(x, &z), lt(&z, y), self.leader(2, &z)]));
        and([self.leader(2, x), self.leader(2, y), self.same(1, x, y), lt(x, y), not(gap)])
    }

    /// `x` leads the first depth-2 child of its root.
    pub fn first_child(&mut self, x: &str) -> Formula {
        let y = self.fresh_pos();
        let before = and([lt(&y, x), self.same(1, &y, x)]);
        and([self.leaf(x), not(exists(&y, before))])
    }

    /// `y` leads the second sibling after `x`.
    pub fn second_sibling(&mut self, x: &str, y: &str) -> Formula {
        let m = self.fresh_pos();
        let via = and([self.next_sibling(x, &m), self.next_sibling(&m, y)]);
        exists(&m, via)
    }

    /// `x` holds exactly the depth-2 leaders, one under every root.
    pub fn selects_one(&mut self, x: &str) -> Formula {
        let a = self.fresh_pos();
        let only = forall(&a, implies(member(&a, x), self.leader(2, &a)));
        let (r, c) = (self.fresh_pos(), self.fresh_pos());
        let some = exists(&c, and([member(&c, x), self.same(1, &r, &c)]));
        let covered = forall(&r, implies(self.leaf(&r), some));
        let (b, d) = (self.fresh_pos(), self.fresh_pos());
        let pair = and([member(&b, x), member(&d, x), self.same(1, &b, &d)]);
        let unique = forall(&b, forall(&d, implies(pair, eq(&b, &d))));
        and([only, covered, unique])
    }

    /// Every node of `x` is a first child.
    pub fn first_column(&mut self, x: &str) -> Formula {
        let a = self.fresh_pos();
        forall(&a, implies(member(&a, x), self.first_child(&a)))
    }

    /// `y` holds exactly the right siblings of the nodes of `x`.
    pub fn shift1(&mut self, x: &str, y: &str) -> Formula {
        let (b, a) = (self.fresh_pos(), self.fresh_pos());
        let from = exists(&a, and([member(&a, x), self.next_sibling(&a, &b)]));
        forall(&b, iff(member(&b, y), from))
    }

    /// `y` holds exactly the second right siblings of the nodes of `x`.
    pub fn shift2(&mut self, x: &str, y: &str) -> Formula {
        let (b, a) = (self.fresh_pos(), self.fresh_pos());
        let from = exists(&a, and([member(&a, x), self.second_sibling(&a, &b)]));
        forall(&b, iff(member(&b, y), from))
    }

    /// The depth-2 node led by `x` has a single child.
    pub fn single_child(&mut self, x: &str) -> Formula {
        let y = self.fresh_pos();
        let body = implies(and([self.leaf(&y), self.same(2, x, &y)]), self.same(3, x, &y));
        forall(&y, body)
    }

    /// Every node of `x` has a single child.
    pub fn zero_strict(&mut self, x: &str) -> Formula {
        let a = self.fresh_pos();
        forall(&a, implies(member(&a, x), self.single_child(&a)))
    }

    /// Past some position, every node of `x` has a single child.
    pub fn zero(&mut self, x: &str) -> Formula {
        let (p, a) = (self.fresh_pos(), self.fresh_pos());
        let body = implies(and([lt(&p, &a), member(&a, x)]), self.single_child(&a));
        exists(&p, forall(&a, body))
    }

    /// `x` is a depth-2 selector.
    pub fn selector(&mut self, x: &str) -> Formula {
        let one = self.selects_one(x);
        let r = self.ruler(&View::selector_prefix(x));
        and([one, r])
    }

    /// Nodes of `y` have eventually one child more than nodes of `x`.
    pub fn increments(&mut self, x: &str, y: &str) -> Formula {
        self.ruler(&View::increment(x, y))
    }

    /// Nodes of `x` and `y` have eventually equal degree.
    pub fn same_degree(&mut self, x: &str, y: &str) -> Formula {
        self.ruler(&View::union(x, y))
    }

    /// Odd children: first children are odd, siblings alternate, and every
    /// odd child has a right sibling. Enforced for nodes after `p`.
    pub fn odd_children(&mut self, o: &str, p: &str) -> Formula {
        let (x, w) = (self.fresh_pos(), self.fresh_pos());
        let prev_even = exists(&w, and([self.next_sibling(&w, &x), not(member(&w, o))]));
        let parity = iff(member(&x, o), or([self.first_child(&x), prev_even]));
        let y = self.fresh_pos();
        let partner = exists(&y, self.next_sibling(&x, &y));
        let body = and([
            implies(member(&x, o), self.leader(2, &x)),
            implies(self.leader(2, &x), parity),
            implies(member(&x, o), partner),
        ]);
        forall(&x, implies(lt(p, &x), body))
    }

    /// `x` is an odd child with no odd sibling to its right.
    pub fn last_odd(&mut self, o: &str, x: &str) -> Formula {
        let y = self.fresh_pos();
        let later = exists(&y, and([lt(x, &y), member(&y, o), self.same(1, x, &y)]));
        and([member(x, o), not(later)])
    }
}
