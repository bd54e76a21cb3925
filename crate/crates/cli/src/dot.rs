//! Graphviz output for wiring diagrams and terms.

use std::fmt::Write as _;

use regcalc::term::Cell;
use regcalc::{GraphicalTerm, Shell, TypeSymbol, WiringDiagram};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn port_node(shell: Shell, index: usize) -> String {
    match shell {
        Shell::Inner(i) => format!("p{}_{}", i + 1, index + 1),
        Shell::Outer => format!("out_{}", index + 1),
    }
}

/// Renders a diagram. `labels` names the inner shells, e.g. by the
/// predicates filling them.
pub fn diagram_dot(name: &str, w: &WiringDiagram, labels: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph {} {{", quote(name));
    s.push_str("  compound=true;\n  node [fontsize=10];\n");
    s.push_str("  subgraph cluster_out {\n    label=\"out\";\n    style=rounded;\n");
    for i in 0..w.inner().len() {
        let label = match labels.get(i) {
            Some(l) => format!("{} {}", i + 1, l),
            None => format!("{}", i + 1),
        };
        let _ = writeln!(s, "    subgraph cluster_{} {{", i + 1);
        let _ = writeln!(s, "      label={};", quote(&label));
        for (j, t) in w.inner()[i].typing().iter().enumerate() {
            let _ = writeln!(
                s,
                "      {} [shape=point, xlabel={}];",
                port_node(Shell::Inner(i), j),
                quote(&format!("{}:{t}", j + 1))
            );
        }
        s.push_str("    }\n");
    }
    for (k, t) in w.dot_types().iter().enumerate() {
        let _ = writeln!(
            s,
            "    d{} [shape=circle, style=filled, fillcolor=black, fontcolor=white, label={}];",
            k + 1,
            quote(t.as_str())
        );
    }
    let white = w.white_labels();
    if !white.is_empty() {
        let names: Vec<&str> = white.iter().map(TypeSymbol::as_str).collect();
        let _ = writeln!(
            s,
            "    white [shape=circle, style=solid, label={}];",
            quote(&format!("{{{}}}", names.join(", ")))
        );
    }
    s.push_str("  }\n");
    for (j, t) in w.outer().typing().iter().enumerate() {
        let _ = writeln!(
            s,
            "  {} [shape=square, label={}];",
            port_node(Shell::Outer, j),
            quote(&format!("{}:{t}", j + 1))
        );
    }
    for p in w.ports() {
        let _ = writeln!(s, "  {} -- d{};", port_node(p.shell, p.index), w.dot_of(p) + 1);
    }
    s.push_str("}\n");
    s
}

/// Renders a term's top-level diagram with its cells as shell labels.
pub fn term_dot(name: &str, t: &GraphicalTerm) -> String {
    let labels: Vec<String> = t
        .cells()
        .iter()
        .map(|c| match c {
            Cell::Pred(p) => p.clone(),
            Cell::Nested(_) => "(nested)".to_string(),
        })
        .collect();
    diagram_dot(name, t.diagram(), &labels)
}
