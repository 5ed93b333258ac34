use std::fmt::Write;

use super::Formula;

/// Canonical single-line rendering. Re-parses to an identical formula.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_flat(f, &mut out);
    out
}

fn head(f: &Formula) -> &'static str {
    match f {
        Formula::LessEq(..) => "<=",
        Formula::Label(..) => "label",
        Formula::In(..) => "in",
        Formula::Not(_) => "not",
        Formula::And(_) => "and",
        Formula::Or(_) => "or",
        Formula::Implies(..) => "implies",
        Formula::ExistsPos(..) => "exists",
        Formula::ForallPos(..) => "forall",
        Formula::ExistsSet(..) => "existsS",
        Formula::ForallSet(..) => "forallS",
        Formula::Unbounded(..) => "U",
    }
}

fn write_flat(f: &Formula, out: &mut String) {
    match f {
        Formula::LessEq(x, y) => {
            let _ = write!(out, "(<= {x} {y})");
        }
        Formula::Label(a, x) => {
            let _ = write!(out, "(label {a} {x})");
        }
        Formula::In(x, s) => {
            let _ = write!(out, "(in {x} {s})");
        }
        _ => {
            out.push('(');
            out.push_str(head(f));
            if let Some((v, _)) = f.binder() {
                out.push(' ');
                out.push_str(v);
            }
            for c in f.children() {
                out.push(' ');
                write_flat(c, out);
            }
            out.push(')');
        }
    }
}

/// Indented multi-line rendering for humans. Atoms and short subterms stay
/// on one line.
pub fn render_pretty(f: &Formula) -> String {
    let mut out = String::new();
    write_pretty(f, 0, &mut out);
    out
}

fn write_pretty(f: &Formula, indent: usize, out: &mut String) {
    let flat = render_formula(f);
    if flat.len() + indent <= 80 || f.children().is_empty() {
        out.push_str(&flat);
        return;
    }
    out.push('(');
    out.push_str(head(f));
    if let Some((v, _)) = f.binder() {
        out.push(' ');
        out.push_str(v);
    }
    for c in f.children() {
        out.push('\n');
        out.push_str(&" ".repeat(indent + 2));
        write_pretty(c, indent + 2, out);
    }
    out.push(')');
}
