use std::fmt::Write;

use graph_morse::config_complex::Cell;
use graph_morse::pipeline::Analysis;

/// The input graph after relabelling; deleted edges dashed.
pub fn graph_dot(a: &Analysis) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for v in a.graph.vertices() {
        let _ = writeln!(out, "  {v} [label=\"{v}\\nf={}\"];", a.f1.vertex(v));
    }
    let mut edges = a.graph.edges().to_vec();
    edges.sort();
    for e in edges {
        let style = if a.tree.contains(&e) { "solid" } else { "dashed" };
        let _ = writeln!(
            out,
            "  {} -- {} [label=\"{}\", style={style}];",
            e.lo(),
            e.hi(),
            a.f1.edge(&e)
        );
    }
    out.push_str("}\n");
    out
}

/// 1-skeleton of the two-particle complex. Critical cells are red, arrow
/// heads over 0-cells are bold blue, tails of 2-cells are dashed.
pub fn complex_dot(a: &Analysis) -> String {
    let id = |c: &Cell| format!("\"{c}\"");
    let mut out = String::from("digraph D2 {\n  node [shape=ellipse];\n");
    for p in a.complex.cells(0) {
        let attrs = if a.field.is_critical(p) {
            ", color=red, peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(out, "  {} [label=\"{p}\\n{}\"{attrs}];", id(p), a.f2.value(p));
    }
    for e in a.complex.cells(1) {
        let Cell::Move { fixed, edge } = *e else { continue };
        let from = Cell::point(fixed, edge.lo()).unwrap();
        let to = Cell::point(fixed, edge.hi()).unwrap();
        let style = if a.field.is_critical(e) {
            "color=red, penwidth=2"
        } else if a.field.is_head(e) {
            "color=blue, style=bold"
        } else {
            "style=dashed"
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{e}\\n{}\", {style}];",
            id(&from),
            id(&to),
            a.f2.value(e)
        );
    }
    out.push_str("}\n");
    out
}
