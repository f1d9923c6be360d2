//! Line-oriented graph format and DOT export.
//!
//! ```text
//! # cusp
//! vertex E1 odd
//! vertex E2 even
//! vertex E3 odd
//! edge E1 E3
//! edge E2 E3
//! branch C1 E3
//! ```
//!
//! Declarations may also be separated by `;`, which gives a one-line form.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{DualGraph, GraphError, Parity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_graph(input: &str) -> Result<DualGraph, ParseError> {
    let mut g = DualGraph::new();
    let statements = input
        .lines()
        .enumerate()
        .flat_map(|(i, raw)| raw.split('#').next().unwrap_or("").split(';').map(move |s| (i, s.trim())));
    for (i, line) in statements {
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ParseError { line: i + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        let result: Result<(), GraphError> = match words.as_slice() {
            ["vertex", id, parity] => parity.parse::<Parity>().and_then(|p| g.add_vertex(id, p).map(|_| ())),
            ["edge", a, b] => g.add_edge(a, b),
            ["branch", id, v] => g.add_branch(id, v),
            ["freebranch", id] => g.add_free_branch(id),
            _ => return Err(err(format!("unrecognized declaration `{line}`"))),
        };
        result.map_err(|e| err(e.to_string()))?;
    }
    Ok(g)
}

/// Orders ids like `v2` before `v10`.
pub(crate) fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, digits) = s.split_at(cut);
        (head, digits.parse().ok())
    }
    let (ha, na) = split(a);
    let (hb, nb) = split(b);
    ha.cmp(hb).then(na.cmp(&nb)).then(a.cmp(b))
}

/// Serializes with declarations sorted; with `renumber` the graph is first
/// replaced by its canonical form, so isomorphic inputs print identically.
pub fn to_text(g: &DualGraph, renumber: bool) -> String {
    let owned;
    let g = if renumber {
        owned = g.canonical_form();
        &owned
    } else {
        g
    };
    let mut out = String::new();
    let mut vs: Vec<_> = g.vertices().iter().collect();
    vs.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for v in vs {
        let _ = writeln!(out, "vertex {} {}", v.id, v.parity);
    }
    let mut es: Vec<(&str, &str)> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (g.vertex_id(a), g.vertex_id(b));
            if natural_cmp(x, y) == Ordering::Greater {
                (y, x)
            } else {
                (x, y)
            }
        })
        .collect();
    es.sort_by(|a, b| natural_cmp(a.0, b.0).then(natural_cmp(a.1, b.1)));
    for (a, b) in es {
        let _ = writeln!(out, "edge {a} {b}");
    }
    let mut bs: Vec<_> = g.branches().iter().collect();
    bs.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for b in bs.iter().filter(|b| b.attach.is_some()) {
        let _ = writeln!(out, "branch {} {}", b.id, g.vertex_id(b.attach.unwrap()));
    }
    for b in bs.iter().filter(|b| b.attach.is_none()) {
        let _ = writeln!(out, "freebranch {}", b.id);
    }
    out
}

/// The declarations of [`to_text`] joined by `; ` on one line.
pub fn to_line(g: &DualGraph, renumber: bool) -> String {
    let text = to_text(g, renumber);
    text.lines().collect::<Vec<_>>().join("; ")
}

/// Graphviz rendering: even curves filled, odd curves hollow, branches as
/// boxes on bold edges.
pub fn to_dot(g: &DualGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{name}\" {{");
    let _ = writeln!(out, "  node [shape=circle, label=\"\", width=0.25];");
    let mut vs: Vec<_> = g.vertices().iter().collect();
    vs.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for v in vs {
        let style = match v.parity {
            Parity::Even => "style=filled, fillcolor=black",
            Parity::Odd => "style=solid",
        };
        let _ = writeln!(out, "  \"{}\" [{style}, xlabel=\"{}\"];", v.id, v.id);
    }
    let text = to_text(g, false);
    for line in text.lines() {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.as_slice() {
            ["edge", a, b] => {
                let _ = writeln!(out, "  \"{a}\" -- \"{b}\";");
            }
            ["branch", id, v] => {
                let _ = writeln!(out, "  \"{id}\" [shape=square, label=\"{id}\"];");
                let _ = writeln!(out, "  \"{v}\" -- \"{id}\" [style=bold];");
            }
            ["freebranch", id] => {
                let _ = writeln!(out, "  \"{id}\" [shape=square, label=\"{id}\"];");
            }
            _ => {}
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUSP: &str = "# cusp\nvertex E1 odd\nvertex E2 even\nvertex E3 odd\n\nedge E1 E3\nedge E2 E3 # trailing\nbranch C1 E3\n";

    #[test]
    fn one_line_form_round_trips() {
        let g = parse_graph(CUSP).unwrap();
        let line = to_line(&g, false);
        assert_eq!(line, "vertex E1 odd; vertex E2 even; vertex E3 odd; edge E1 E3; edge E2 E3; branch C1 E3");
        assert!(parse_graph(&line).unwrap().is_isomorphic(&g, true));
    }

    #[test]
    fn parses_and_sorts() {
        let g = parse_graph(CUSP).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(g.is_valid());
        assert_eq!(
            to_text(&g, false),
            "vertex E1 odd\nvertex E2 even\nvertex E3 odd\nedge E1 E3\nedge E2 E3\nbranch C1 E3\n"
        );
    }

    #[test]
    fn renumbered_output_identical_for_isomorphic_inputs() {
        let other = "vertex z odd\nvertex y odd\nvertex x even\nedge x y\nedge z y\nbranch q y\n";
        let a = parse_graph(CUSP).unwrap();
        let b = parse_graph(other).unwrap();
        assert_eq!(to_text(&a, true), to_text(&b, true));
        assert_eq!(parse_graph(&to_text(&a, true)).unwrap().canonical_code(false), a.canonical_code(false));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_graph("vertex a odd\nedge a b\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_graph("vertex a purple\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_graph("frobnicate\n").is_err());
    }

    #[test]
    fn natural_ordering() {
        assert_eq!(natural_cmp("v2", "v10"), Ordering::Less);
        assert_eq!(natural_cmp("b1", "v1"), Ordering::Less);
    }

    #[test]
    fn dot_marks_parities_and_branches() {
        let g = parse_graph(CUSP).unwrap();
        let dot = to_dot(&g, "cusp");
        assert!(dot.contains("\"E2\" [style=filled, fillcolor=black"));
        assert!(dot.contains("\"E1\" [style=solid"));
        assert!(dot.contains("\"C1\" [shape=square"));
        assert!(dot.contains("\"E3\" -- \"C1\" [style=bold]"));
    }
}
