use std::fmt::Write;

use super::Input;
use crate::gf::Sym;
use crate::net::{EdgeId, Network, NodeId};

/// Line-oriented run log.
///
/// ```text
/// arcnc-trace v1 network=shuttle q=2 m=2
/// step 0
/// draw x1 e1 1        coefficient k_{x1,e1} at this step
/// sym e1 0            symbol sent on e1 at this step
/// decode r1           r1 passed the decodability test
/// ack r1              r1 acknowledged
/// ```
///
/// Edges use 1-based indices in the breadth-first order; `xj` is the
/// source's j-th input stream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceLog {
    text: String,
}

impl TraceLog {
    pub fn new(net: &Network, q: u32, m: usize) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "arcnc-trace v1 network={} q={q} m={m}", net.name());
        Self { text }
    }

    pub fn step(&mut self, t: usize) {
        let _ = writeln!(self.text, "step {t}");
    }

    pub fn draw(&mut self, net: &Network, input: Input, e_out: EdgeId, value: Sym) {
        let _ = writeln!(self.text, "draw {} e{} {value}", input_label(net, input), net.edge_index(e_out));
    }

    pub fn symbol(&mut self, net: &Network, e: EdgeId, value: Sym) {
        let _ = writeln!(self.text, "sym e{} {value}", net.edge_index(e));
    }

    pub fn decode(&mut self, net: &Network, v: NodeId) {
        let _ = writeln!(self.text, "decode {}", net.label(v));
    }

    pub fn ack(&mut self, net: &Network, v: NodeId) {
        let _ = writeln!(self.text, "ack {}", net.label(v));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub(crate) fn input_label(net: &Network, input: Input) -> String {
    match input {
        Input::Source(j) => format!("x{}", j + 1),
        Input::Edge(e) => format!("e{}", net.edge_index(e)),
    }
}
