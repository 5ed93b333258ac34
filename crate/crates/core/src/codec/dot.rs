use std::fmt::Write;

use super::{Node, TreeSeq};

/// Graphviz rendering: one digraph for the whole sequence, with the tree
/// index and depth of every node as attributes.
pub fn to_dot(t: &TreeSeq) -> String {
    let mut out = String::from("digraph treeseq {\n  node [shape=circle, fontsize=10];\n");
    let mut next_id = 0usize;
    let mut positions = t.leaf_positions().map(|p| p.iter());
    for (ti, tree) in t.trees().iter().enumerate() {
        emit(tree, ti, 1, t.depth(), None, &mut next_id, &mut positions, &mut out);
    }
    out.push_str("}\n");
    out
}

#[allow(clippy::too_many_arguments)]
fn emit(
    n: &Node,
    tree: usize,
    d: usize,
    depth: usize,
    parent: Option<usize>,
    next_id: &mut usize,
    positions: &mut Option<std::slice::Iter<'_, usize>>,
    out: &mut String,
) {
    let id = *next_id;
    *next_id += 1;
    let label = if d == depth {
        positions
            .as_mut()
            .and_then(|p| p.next())
            .map(|p| p.to_string())
            .unwrap_or_default()
    } else {
        String::new()
    };
    let _ = writeln!(out, "  n{id} [label=\"{label}\", tree={tree}, depth={d}];");
    if let Some(p) = parent {
        let _ = writeln!(out, "  n{p} -> n{id};");
    }
    for c in &n.children {
        emit(c, tree, d + 1, depth, Some(id), next_id, positions, out);
    }
}
