use msou_core::codec::{encode_tree_sequence, WordPrefix};
use msou_core::eval::{evaluate, Assignment, EvalBudget, PosSet};
use msou_core::minsky::RunDescription;
use msou_core::reduction::{witness_tree_sequence, BlockPredicates, TreeIndex, WitnessParams};

fn witness_word(desc: &[u64], growth: &[usize]) -> WordPrefix {
    let p = WitnessParams::with_growth(RunDescription(desc.to_vec()), growth.to_vec()).unwrap();
    encode_tree_sequence(&witness_tree_sequence(&p))
}

/// Depth-2 leaders that are the `i`-th child of their root.
fn column(idx: &TreeIndex, i: usize) -> Vec<usize> {
    (0..idx.len()).filter(|&p| idx.leader(2, p) && idx.path(p).unwrap()[1] == i).collect()
}

fn budget() -> EvalBudget {
    EvalBudget { max_word_len: 64, ..EvalBudget::new(2) }
}

fn holds(block: &str, w: &WordPrefix, x: Vec<usize>) -> bool {
    let blocks = BlockPredicates::standard();
    let f = &blocks.get(block).unwrap().formula;
    let a = Assignment::new().with_set("X", PosSet::from_positions(x));
    evaluate(f, w, &a, &budget()).unwrap()
}

#[test]
fn first_children_select_one() {
    let w = witness_word(&[0, 0], &[1, 2, 3]);
    let idx = TreeIndex::new(&w).unwrap();
    let first = column(&idx, 0);
    assert_eq!(first.len(), 3);
    assert!(holds("selects-one", &w, first.clone()));
    assert!(holds("first-column", &w, first.clone()));

    let mut two = first.clone();
    two.push(column(&idx, 1)[0]);
    assert!(!holds("selects-one", &w, two));
    assert!(!holds("first-column", &w, column(&idx, 1)));
}

#[test]
fn zero_skeleton_on_witness() {
    let ones = witness_word(&[0, 0], &[1, 2]);
    let idx = TreeIndex::new(&ones).unwrap();
    assert!(holds("zero-strict", &ones, column(&idx, 0)));
    assert!(holds("zero-strict", &ones, column(&idx, 1)));

    let twos = witness_word(&[1, 0], &[1, 2]);
    let idx = TreeIndex::new(&twos).unwrap();
    assert!(!holds("zero-strict", &twos, column(&idx, 0)));
    assert!(holds("zero-strict", &twos, column(&idx, 1)));
}

#[test]
fn oracle_agrees_on_witness_words() {
    let blocks = BlockPredicates::standard();
    for (desc, growth) in [(&[0u64, 0][..], &[1usize, 2][..]), (&[1, 0], &[1, 2]), (&[0, 1, 1, 1], &[1])] {
        let w = witness_word(desc, growth);
        let idx = TreeIndex::new(&w).unwrap();
        for name in ["selects-one", "first-column", "zero-strict"] {
            let b = blocks.get(name).unwrap();
            for i in 0..desc.len() {
                let a = Assignment::new().with_set("X", PosSet::from_positions(column(&idx, i)));
                let got = evaluate(&b.formula, &w, &a, &budget()).unwrap();
                assert_eq!(got, b.oracle(&idx, &a), "{name} column {i} on {w}");
            }
        }
    }
}
