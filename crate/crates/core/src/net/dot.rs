use std::fmt::Write;

use super::Network;

/// Graphviz rendering. Source is a box, must-decode nodes are double
/// circles, shaded interior decoders are filled, and edges carry their
/// 1-based index. Masked pairs are listed in a trailing comment.
pub fn to_dot(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", net.name().replace('"', "'"));
    let _ = writeln!(out, "  rankdir=TB;");
    for v in 0..net.num_nodes() {
        let mut attrs = vec![format!("label=\"{}\"", net.label(v))];
        if v == net.source() {
            attrs.push("shape=box".into());
        } else if net.is_sink(v) {
            attrs.push("shape=doublecircle".into());
        } else {
            attrs.push("shape=circle".into());
        }
        if net.shaded().contains(&v) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=gray80".into());
        }
        let _ = writeln!(out, "  n{v} [{}];", attrs.join(", "));
    }
    for (e, edge) in net.edges().iter().enumerate() {
        let _ = writeln!(out, "  n{} -> n{} [label=\"e{}\"];", edge.tail, edge.head, net.edge_index(e));
    }
    for p in net.zero_mask() {
        let _ = writeln!(out, "  // zero at t=0: e{} -> e{}", net.edge_index(p.e_in), net.edge_index(p.e_out));
    }
    out.push_str("}\n");
    out
}
