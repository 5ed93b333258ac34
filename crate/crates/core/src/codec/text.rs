//! Indented text form of a tree sequence.
//!
//! ```text
//! depth 3
//! node
//!   node
//!     leaf @1
//!     leaf @2
//!   node
//!     leaf @4
//! ```
//!
//! Each node is one line, indented two spaces per level below the root.
//! Leaves may carry their word position as `@pos`; either all leaves do or
//! none. Blank lines and lines starting with `#` are ignored.

use super::{CodecError, Node, TreeSeq};

pub fn render_tree_text(t: &TreeSeq) -> String {
    fn walk(n: &Node, d: usize, depth: usize, pos: &mut dyn Iterator<Item = usize>, out: &mut String) {
        out.push_str(&"  ".repeat(d - 1));
        if d == depth {
            out.push_str("leaf");
            if let Some(p) = pos.next() {
                out.push_str(&format!(" @{p}"));
            }
            out.push('\n');
            return;
        }
        out.push_str("node\n");
        for c in &n.children {
            walk(c, d + 1, depth, pos, out);
        }
    }
    let mut out = format!("depth {}\n", t.depth());
    let mut positions: Box<dyn Iterator<Item = usize> + '_> = match t.leaf_positions() {
        Some(p) => Box::new(p.iter().copied()),
        None => Box::new(std::iter::empty()),
    };
    for tree in t.trees() {
        walk(tree, 1, t.depth(), positions.as_mut(), &mut out);
    }
    out
}

pub fn parse_tree_text(text: &str) -> Result<TreeSeq, CodecError> {
    let err = |line: usize, msg: &str| CodecError::Text { line, msg: msg.to_string() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing `depth` header"))?;
    let depth: usize = header
        .trim()
        .strip_prefix("depth")
        .and_then(|r| r.trim().parse().ok())
        .filter(|&d| (1..=64).contains(&d))
        .ok_or_else(|| err(hline, "expected `depth <n>` with 1 <= n <= 64"))?;

    // Stack of open nodes; index = depth - 1.
    let mut stack: Vec<Node> = Vec::new();
    let mut trees = Vec::new();
    let mut positions = Vec::new();
    let mut unpositioned = 0usize;

    fn close_to(stack: &mut Vec<Node>, level: usize, trees: &mut Vec<Node>) {
        while stack.len() > level {
            let n = stack.pop().expect("nonempty");
            match stack.last_mut() {
                Some(parent) => parent.children.push(n),
                None => trees.push(n),
            }
        }
    }

    for (lineno, line) in lines {
        let indent = line.len() - line.trim_start_matches(' ').len();
        if line[indent..].starts_with('\t') {
            return Err(err(lineno, "tabs are not allowed in indentation"));
        }
        if indent % 2 != 0 {
            return Err(err(lineno, "indentation must be a multiple of two spaces"));
        }
        let d = indent / 2 + 1;
        if d > depth {
            return Err(err(lineno, "node deeper than the declared depth"));
        }
        if d > stack.len() + 1 {
            return Err(err(lineno, "indentation skips a level"));
        }
        close_to(&mut stack, d - 1, &mut trees);
        let mut words = line.split_whitespace();
        match words.next() {
            Some("node") => {
                if d == depth {
                    return Err(err(lineno, "`node` at leaf depth; use `leaf`"));
                }
                if words.next().is_some() {
                    return Err(err(lineno, "unexpected text after `node`"));
                }
                stack.push(Node::leaf());
            }
            Some("leaf") => {
                if d != depth {
                    return Err(err(lineno, "`leaf` above the declared depth"));
                }
                match words.next() {
                    Some(p) => {
                        let pos = p
                            .strip_prefix('@')
                            .and_then(|s| s.parse::<usize>().ok())
                            .ok_or_else(|| err(lineno, "leaf position must look like `@12`"))?;
                        positions.push(pos);
                    }
                    None => unpositioned += 1,
                }
                if words.next().is_some() {
                    return Err(err(lineno, "unexpected text after leaf"));
                }
                stack.push(Node::leaf());
            }
            _ => return Err(err(lineno, "expected `node` or `leaf`")),
        }
    }
    close_to(&mut stack, 0, &mut trees);

    let seq = TreeSeq::new(depth, trees)?;
    match (positions.is_empty(), unpositioned) {
        (true, _) => Ok(seq),
        (false, 0) => seq.with_leaf_positions(positions),
        _ => Err(err(0, "either all leaves carry positions or none")),
    }
}
