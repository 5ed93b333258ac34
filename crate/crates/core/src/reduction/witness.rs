use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{Node, TreeSeq};
use crate::minsky::{validate_description, MinskyMachine, RunDescription};

use super::ReductionError;

/// Inputs for [`witness_tree_sequence`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessParams {
    description: RunDescription,
    growth: Vec<usize>,
}

impl WitnessParams {
    /// `trees` trees with depth-3 degrees `g(t) = t + 1`, `t` counted from 1.
    pub fn new(description: RunDescription, trees: usize) -> Result<Self, ReductionError> {
        WitnessParams::with_growth(description, (1..=trees).map(|t| t + 1).collect())
    }

    /// One depth-3 degree per tree, strictly increasing and positive.
    pub fn with_growth(description: RunDescription, growth: Vec<usize>) -> Result<Self, ReductionError> {
        check_description(&description)?;
        if growth.is_empty() {
            return Err(ReductionError::Growth("at least one tree is needed".into()));
        }
        if growth[0] == 0 {
            return Err(ReductionError::Growth("degrees must be positive".into()));
        }
        if growth.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ReductionError::Growth("growth must be strictly increasing".into()));
        }
        Ok(WitnessParams { description, growth })
    }

    pub fn description(&self) -> &RunDescription {
        &self.description
    }

    pub fn trees(&self) -> usize {
        self.growth.len()
    }

    pub fn growth(&self) -> &[usize] {
        &self.growth
    }
}

fn check_description(v: &RunDescription) -> Result<(), ReductionError> {
    if v.0.is_empty() || !v.0.len().is_multiple_of(2) {
        return Err(ReductionError::DescriptionLength(v.0.len()));
    }
    Ok(())
}

pub fn witness_tree_sequence(p: &WitnessParams) -> TreeSeq {
    witness_trees(&p.description, &p.growth).expect("validated parameters")
}

/// Depth-4 trees: every root has one child per description entry, the
/// `i`-th child has `description[i] + 1` children, and every depth-3 node
/// of tree `t` has `degrees[t]` leaves. No monotonicity is required here.
pub fn witness_trees(description: &RunDescription, degrees: &[usize]) -> Result<TreeSeq, ReductionError> {
    check_description(description)?;
    if degrees.contains(&0) {
        return Err(ReductionError::Growth("degrees must be positive".into()));
    }
    let trees = degrees
        .iter()
        .map(|&g| {
            let depth3 = Node::with_children(vec![Node::leaf(); g]);
            let children =
                description.0.iter().map(|&c| Node::with_children(vec![depth3.clone(); c as usize + 1])).collect();
            Node::with_children(children)
        })
        .collect();
    Ok(TreeSeq::new(4, trees).expect("uniform depth"))
}

/// Degrees of one depth-4 tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDegrees {
    pub root: usize,
    pub depth2: Vec<usize>,
    /// Depth-3 degrees grouped by depth-2 parent.
    pub depth3: Vec<Vec<usize>>,
}

impl TreeDegrees {
    pub fn of(root: &Node) -> TreeDegrees {
        TreeDegrees {
            root: root.degree(),
            depth2: root.children.iter().map(Node::degree).collect(),
            depth3: root.children.iter().map(|c| c.children.iter().map(Node::degree).collect()).collect(),
        }
    }

    fn depth3_range(&self) -> Option<(usize, usize)> {
        let all = self.depth3.iter().flatten();
        Some((*all.clone().min()?, *all.max()?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub ignore_prefix: usize,
    pub trees: Vec<TreeDegrees>,
    /// Depth-2 degrees minus one of the first tree after the prefix.
    pub description: RunDescription,
}

impl Report {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d
    }
}

/// Checks the four witness conditions on the trees after `ignore_prefix`.
pub fn check_conditions(t: &TreeSeq, m: &MinskyMachine, ignore_prefix: usize) -> Result<Report, ReductionError> {
    if t.depth() != 4 {
        return Err(ReductionError::Depth(t.depth()));
    }
    if ignore_prefix >= t.trees().len() {
        return Err(ReductionError::Prefix { prefix: ignore_prefix, trees: t.trees().len() });
    }
    let trees: Vec<TreeDegrees> = t.trees().par_iter().map(TreeDegrees::of).collect();
    let window = &trees[ignore_prefix..];

    let ranges: Vec<(usize, usize)> = window.iter().filter_map(TreeDegrees::depth3_range).collect();
    let a = ranges.len() == window.len()
        && ranges.windows(2).all(|w| w[0].1 <= w[1].0)
        && ranges.last().expect("nonempty window").0 > ranges[0].0;

    let b = window.iter().all(|d| d.root == window[0].root);

    let width = window.iter().map(|d| d.depth2.len()).max().unwrap_or(0);
    let c = (0..width).all(|i| {
        let mut col = window.iter().filter_map(|d| d.depth2.get(i));
        let first = col.next();
        col.all(|x| Some(x) == first)
    });

    let description = RunDescription(window[0].depth2.iter().map(|&n| n as u64 - 1).collect());
    let d = validate_description(m, &description);
    Ok(Report { a, b, c, d, ignore_prefix, trees, description })
}

/// Degree of the `i`-th depth-2 child of every root, `None` where a root has
/// fewer children.
pub fn column_degrees(t: &TreeSeq, i: usize) -> Vec<Option<usize>> {
    t.trees().iter().map(|r| r.children.get(i).map(Node::degree)).collect()
}

/// Every `i`-th child in the window has a single child.
pub fn zero_window(t: &TreeSeq, i: usize) -> bool {
    column_degrees(t, i).iter().all(|d| *d == Some(1))
}

/// Column `i` has one constant degree `n` and column `j` the constant `n + 1`.
pub fn increment_window(t: &TreeSeq, i: usize, j: usize) -> bool {
    let (xs, ys) = (column_degrees(t, i), column_degrees(t, j));
    match xs.first() {
        Some(Some(n)) => xs.iter().all(|d| *d == Some(*n)) && ys.iter().all(|d| *d == Some(n + 1)),
        _ => false,
    }
}

/// Columns `i` and `j` share one constant degree.
pub fn same_degree_window(t: &TreeSeq, i: usize, j: usize) -> bool {
    let (xs, ys) = (column_degrees(t, i), column_degrees(t, j));
    match xs.first() {
        Some(Some(n)) => xs.iter().chain(&ys).all(|d| *d == Some(*n)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{decode_tree_sequence, encode_tree_sequence};
    use crate::minsky::{describe_run, find_accepting_run, parse_machine};

    const SAMPLE: &str = "states: q0 q1 q2 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 inc1 q2\ntrans: q2 zero2 qf\n";

    #[test]
    fn two_counter_tree() {
        let p = WitnessParams::with_growth(RunDescription(vec![2, 1]), vec![2]).unwrap();
        let t = witness_tree_sequence(&p);
        let d = TreeDegrees::of(&t.trees()[0]);
        assert_eq!(d.root, 2);
        assert_eq!(d.depth2, vec![3, 2]);
        assert!(d.depth3.iter().flatten().all(|&g| g == 2));
        let w = encode_tree_sequence(&t);
        assert_eq!(w.to_string(), "1 4 4 3 4 4 3 4 4 2 4 4 3 4 4");
        assert_eq!(decode_tree_sequence(&w).unwrap().unpositioned(), t);
    }

    #[test]
    fn growth_per_tree() {
        let t = witness_tree_sequence(&WitnessParams::new(RunDescription(vec![0, 0]), 3).unwrap());
        let mins: Vec<usize> = t.trees().iter().map(|r| TreeDegrees::of(r).depth3_range().unwrap().0).collect();
        assert_eq!(mins, vec![2, 3, 4]);
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(
            WitnessParams::new(RunDescription(vec![1]), 3).unwrap_err(),
            ReductionError::DescriptionLength(1)
        );
        assert!(WitnessParams::with_growth(RunDescription(vec![0, 0]), vec![3, 3]).is_err());
        assert!(WitnessParams::new(RunDescription(vec![0, 0]), 0).is_err());
    }

    #[test]
    fn sample_witness_passes() {
        let m = parse_machine(SAMPLE).unwrap();
        let r = find_accepting_run(&m, 10, 6).unwrap();
        for trees in [5, 10, 20] {
            let t = witness_tree_sequence(&WitnessParams::new(describe_run(&r), trees).unwrap());
            for k in [0, 1] {
                let rep = check_conditions(&t, &m, k).unwrap();
                assert!(rep.all(), "{rep:?}");
                assert_eq!(rep.description, describe_run(&r));
            }
        }
    }

    #[test]
    fn constant_growth_fails_a() {
        let m = parse_machine(SAMPLE).unwrap();
        let v = describe_run(&find_accepting_run(&m, 10, 6).unwrap());
        let t = witness_trees(&v, &[3; 5]).unwrap();
        let rep = check_conditions(&t, &m, 0).unwrap();
        assert!(!rep.a && rep.b && rep.c && rep.d);
    }

    #[test]
    fn corrupt_depth2_fails_c() {
        let m = parse_machine(SAMPLE).unwrap();
        let v = describe_run(&find_accepting_run(&m, 10, 6).unwrap());
        let t = witness_tree_sequence(&WitnessParams::new(v, 5).unwrap());
        let mut trees = t.trees().to_vec();
        let last = trees.last_mut().unwrap();
        let extra = last.children[1].children[0].clone();
        last.children[1].children.push(extra);
        let rep = check_conditions(&TreeSeq::new(4, trees).unwrap(), &m, 0).unwrap();
        assert!(rep.a && rep.b && !rep.c && rep.d);
    }

    #[test]
    fn window_skeletons() {
        let ones = witness_tree_sequence(&WitnessParams::new(RunDescription(vec![0, 0]), 4).unwrap());
        assert!(zero_window(&ones, 0) && zero_window(&ones, 1));
        let twos = witness_tree_sequence(&WitnessParams::new(RunDescription(vec![1, 1]), 4).unwrap());
        assert!(!zero_window(&twos, 0));
        for n in 1..=3u64 {
            let t = witness_tree_sequence(&WitnessParams::new(RunDescription(vec![n - 1, n]), 4).unwrap());
            assert!(increment_window(&t, 0, 1));
            assert!(!increment_window(&t, 1, 0));
            assert!(!same_degree_window(&t, 0, 1));
        }
        assert!(same_degree_window(&twos, 0, 1));
    }

    #[test]
    fn errors() {
        let m = parse_machine(SAMPLE).unwrap();
        let shallow = TreeSeq::new(3, vec![Node::with_children(vec![Node::with_children(vec![Node::leaf()])])]).unwrap();
        assert_eq!(check_conditions(&shallow, &m, 0).unwrap_err(), ReductionError::Depth(3));
        let t = witness_tree_sequence(&WitnessParams::new(RunDescription(vec![0, 0]), 2).unwrap());
        assert!(matches!(check_conditions(&t, &m, 2), Err(ReductionError::Prefix { .. })));
    }
}
