//! Words over `{1..n}` viewed as sequences of depth-`n` trees.
//!
//! Leaves are the positions labeled `n`. Two leaves share an ancestor at
//! depth `i` exactly when no position strictly between them carries a label
//! in `{1..i}`; a label `1` in between puts them in different trees.

mod dot;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::Alphabet;

pub use dot::to_dot;
pub use text::{parse_tree_text, render_tree_text};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("letter {letter} at position {pos} is outside {{1..{size}}}")]
    LetterOutOfRange { pos: usize, letter: u32, size: u32 },
    #[error("cannot parse word token `{0}`")]
    BadToken(String),
    #[error("word is empty")]
    EmptyWord,
    #[error("decoding needs an alphabet of size at least 2")]
    AlphabetTooSmall,
    #[error("word must start with letter 1")]
    MissingLeadingOne,
    #[error("word has no leaf (no letter {0})")]
    NoLeaf(u32),
    #[error("depth {depth} out of range 1..{limit}")]
    DepthOutOfRange { depth: usize, limit: usize },
    #[error("unknown leaf {0}")]
    UnknownLeaf(usize),
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("tree text line {line}: {msg}")]
    Text { line: usize, msg: String },
}

/// A finite word over an alphabet. Positions are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordPrefix {
    alphabet: Alphabet,
    letters: Vec<u32>,
}

impl WordPrefix {
    pub fn new(alphabet: Alphabet, letters: Vec<u32>) -> Result<Self, CodecError> {
        if let Some((pos, &letter)) = letters.iter().enumerate().find(|(_, &l)| !alphabet.contains(l)) {
            return Err(CodecError::LetterOutOfRange { pos, letter, size: alphabet.size() });
        }
        Ok(WordPrefix { alphabet, letters })
    }

    /// Parses whitespace-separated letters. Without an explicit alphabet the
    /// largest letter present determines it.
    pub fn parse(text: &str, alphabet: Option<Alphabet>) -> Result<Self, CodecError> {
        let letters = text
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| CodecError::BadToken(t.chars().take(32).collect())))
            .collect::<Result<Vec<_>, _>>()?;
        let alphabet = match alphabet {
            Some(a) => a,
            None => {
                let max = letters.iter().copied().max().ok_or(CodecError::EmptyWord)?;
                Alphabet::new(max).map_err(|_| CodecError::LetterOutOfRange {
                    pos: 0,
                    letter: 0,
                    size: 0,
                })?
            }
        };
        WordPrefix::new(alphabet, letters)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// True if [`decode_tree_sequence`] accepts the word.
    pub fn is_decodable(&self) -> bool {
        let n = self.alphabet.size();
        n >= 2 && self.letters.first() == Some(&1) && self.letters.contains(&n)
    }
}

impl fmt::Display for WordPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// A rooted ordered tree node. Depth is implicit: roots are depth 1 and the
/// nodes at the sequence depth are leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Node {
    pub children: Vec<Node>,
}

impl Node {
    pub fn leaf() -> Node {
        Node { children: Vec::new() }
    }

    pub fn with_children(children: Vec<Node>) -> Node {
        Node { children }
    }

    pub fn degree(&self) -> usize {
        self.children.len()
    }

    /// Single path of `levels` nodes ending in a leaf.
    fn chain(levels: usize) -> Node {
        let mut n = Node::leaf();
        for _ in 1..levels {
            n = Node::with_children(vec![n]);
        }
        n
    }

    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(Node::leaf_count).sum()
        }
    }
}

/// Result of [`lca_depth`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lca {
    DifferentTrees,
    Depth(usize),
}

/// Finite sequence of depth-`n` trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeSeq {
    depth: usize,
    trees: Vec<Node>,
    leaf_positions: Option<Vec<usize>>,
}

impl TreeSeq {
    /// Validates uniform leaf depth and positive degree of internal nodes.
    pub fn new(depth: usize, trees: Vec<Node>) -> Result<Self, CodecError> {
        if depth == 0 {
            return Err(CodecError::Malformed("depth must be at least 1".into()));
        }
        for (i, t) in trees.iter().enumerate() {
            check_shape(t, 1, depth).map_err(|m| CodecError::Malformed(format!("tree {i}: {m}")))?;
        }
        Ok(TreeSeq { depth, trees, leaf_positions: None })
    }

    /// Attaches the word position of each leaf, in leaf order. Positions must
    /// be strictly increasing.
    pub fn with_leaf_positions(mut self, positions: Vec<usize>) -> Result<Self, CodecError> {
        if positions.len() != self.leaf_count() {
            return Err(CodecError::Malformed(format!(
                "{} positions for {} leaves",
                positions.len(),
                self.leaf_count()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CodecError::Malformed("leaf positions must increase".into()));
        }
        self.leaf_positions = Some(positions);
        Ok(self)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn trees(&self) -> &[Node] {
        &self.trees
    }

    pub fn leaf_positions(&self) -> Option<&[usize]> {
        self.leaf_positions.as_deref()
    }

    /// Same shape, positions dropped.
    pub fn unpositioned(&self) -> TreeSeq {
        TreeSeq { depth: self.depth, trees: self.trees.clone(), leaf_positions: None }
    }

    pub fn leaf_count(&self) -> usize {
        self.trees.iter().map(Node::leaf_count).sum()
    }

    /// All trees but the last. A decoded prefix may continue its last tree,
    /// so callers gathering degree statistics drop it.
    pub fn complete_trees(&self) -> TreeSeq {
        let keep = self.trees.len().saturating_sub(1);
        let positions = self.leaf_positions.as_ref().map(|p| {
            let kept: usize = self.trees[..keep].iter().map(Node::leaf_count).sum();
            p[..kept].to_vec()
        });
        TreeSeq { depth: self.depth, trees: self.trees[..keep].to_vec(), leaf_positions: positions }
    }

    /// Trees from index `start` on.
    pub fn suffix(&self, start: usize) -> TreeSeq {
        let start = start.min(self.trees.len());
        let positions = self.leaf_positions.as_ref().map(|p| {
            let skipped: usize = self.trees[..start].iter().map(Node::leaf_count).sum();
            p[skipped..].to_vec()
        });
        TreeSeq { depth: self.depth, trees: self.trees[start..].to_vec(), leaf_positions: positions }
    }

    /// For every leaf, the child indices from its root down: entry 0 is the
    /// tree index, entry `k` the index among the siblings at depth `k + 1`.
    pub fn leaf_paths(&self) -> Vec<Vec<usize>> {
        fn walk(n: &Node, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if n.children.is_empty() {
                out.push(path.clone());
                return;
            }
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                walk(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        for (t, root) in self.trees.iter().enumerate() {
            let mut path = vec![t];
            walk(root, &mut path, &mut out);
        }
        out
    }

    /// Nodes at `depth`, left to right across the whole sequence.
    pub fn nodes_at_depth(&self, depth: usize) -> Vec<&Node> {
        fn walk<'a>(n: &'a Node, d: usize, target: usize, out: &mut Vec<&'a Node>) {
            if d == target {
                out.push(n);
                return;
            }
            for c in &n.children {
                walk(c, d + 1, target, out);
            }
        }
        let mut out = Vec::new();
        for t in &self.trees {
            walk(t, 1, depth, &mut out);
        }
        out
    }
}

fn check_shape(n: &Node, d: usize, depth: usize) -> Result<(), String> {
    if d == depth {
        if n.children.is_empty() {
            Ok(())
        } else {
            Err(format!("node at leaf depth {depth} has children"))
        }
    } else if n.children.is_empty() {
        Err(format!("internal node at depth {d} has no children"))
    } else {
        n.children.iter().try_for_each(|c| check_shape(c, d + 1, depth))
    }
}

/// Decodes a word prefix into its tree sequence, recording leaf positions.
/// Letters after the last leaf do not affect the result.
pub fn decode_tree_sequence(w: &WordPrefix) -> Result<TreeSeq, CodecError> {
    let n = w.alphabet().size();
    if n < 2 {
        return Err(CodecError::AlphabetTooSmall);
    }
    if w.letters().first() != Some(&1) {
        return Err(CodecError::MissingLeadingOne);
    }
    if !w.letters().contains(&n) {
        return Err(CodecError::NoLeaf(n));
    }
    let depth = n as usize;
    let mut trees: Vec<Node> = Vec::new();
    let mut positions = Vec::new();
    // Smallest separator label since the previous leaf; `depth` means none.
    let mut min_sep = depth;
    for (pos, &letter) in w.letters().iter().enumerate() {
        let l = letter as usize;
        if l < depth {
            min_sep = min_sep.min(l);
            continue;
        }
        positions.push(pos);
        if trees.is_empty() || min_sep == 1 {
            trees.push(Node::chain(depth));
        } else {
            // Shares depths 1..min_sep-1 with the previous leaf.
            let branch = min_sep;
            let mut node = trees.last_mut().expect("nonempty");
            for _ in 1..branch - 1 {
                node = node.children.last_mut().expect("uniform depth");
            }
            node.children.push(Node::chain(depth - branch + 1));
        }
        min_sep = depth;
    }
    Ok(TreeSeq { depth, trees, leaf_positions: Some(positions) })
}

/// Canonical word for a tree sequence: one `1` per tree, one separator
/// `i+1` between consecutive children of a depth-`i` node (omitted between
/// leaves), and `n` for each leaf.
pub fn encode_tree_sequence(t: &TreeSeq) -> WordPrefix {
    fn emit(n: &Node, d: usize, depth: usize, out: &mut Vec<u32>) {
        if d == depth {
            out.push(depth as u32);
            return;
        }
        for (i, c) in n.children.iter().enumerate() {
            if i > 0 && d + 1 < depth {
                out.push((d + 1) as u32);
            }
            emit(c, d + 1, depth, out);
        }
    }
    let mut letters = Vec::new();
    for tree in &t.trees {
        letters.push(1);
        if t.depth == 1 {
            continue;
        }
        emit(tree, 1, t.depth, &mut letters);
    }
    let alphabet = Alphabet::new(t.depth as u32).expect("depth >= 1");
    WordPrefix { alphabet, letters }
}

/// Degrees of all depth-`k` nodes in leaf order; `1 <= k < n`.
pub fn degree_sequence(t: &TreeSeq, k: usize) -> Result<Vec<usize>, CodecError> {
    if k == 0 || k >= t.depth {
        return Err(CodecError::DepthOutOfRange { depth: k, limit: t.depth });
    }
    Ok(t.nodes_at_depth(k).into_iter().map(Node::degree).collect())
}

/// Depth of the deepest common ancestor of two leaves, given by leaf index.
pub fn lca_depth(t: &TreeSeq, x: usize, y: usize) -> Result<Lca, CodecError> {
    let paths = t.leaf_paths();
    let px = paths.get(x).ok_or(CodecError::UnknownLeaf(x))?;
    let py = paths.get(y).ok_or(CodecError::UnknownLeaf(y))?;
    if px[0] != py[0] {
        return Ok(Lca::DifferentTrees);
    }
    let shared = px.iter().zip(py).skip(1).take_while(|(a, b)| a == b).count();
    Ok(Lca::Depth(1 + shared))
}

/// Word-level reading of the common-ancestor rule for two leaf positions.
pub fn word_lca_depth(w: &WordPrefix, x: usize, y: usize) -> Lca {
    let n = w.alphabet().size() as usize;
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if lo == hi {
        return Lca::Depth(n);
    }
    let min_between = w.letters()[lo + 1..hi].iter().map(|&l| l as usize).min().unwrap_or(n);
    if min_between <= 1 {
        Lca::DifferentTrees
    } else {
        Lca::Depth((min_between - 1).min(n - 1))
    }
}
