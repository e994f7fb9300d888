//! Directed multigraph network model.
//!
//! Edges carry ids and every map is keyed by edge id, so parallel edges
//! are distinct. A [`Network`] is immutable once built; construction
//! validates the source and sinks and fixes the edge index order and the
//! t = 0 zero mask.

mod dot;
mod flow;
mod order;

use std::collections::{BTreeSet, VecDeque};

pub use dot::to_dot;
pub use flow::{min_cut, multicast_rate};
pub use order::{all_zero_fallback, index_edges, simple_cycles, validate_cycle_delay, zero_init_mask};

use crate::error::NetworkError;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
}

/// Incoming edge `e_in` and outgoing edge `e_out` of a common node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacentPair {
    pub e_in: EdgeId,
    pub e_out: EdgeId,
}

#[derive(Clone, Debug)]
pub struct Network {
    name: String,
    num_nodes: usize,
    source: NodeId,
    sinks: Vec<NodeId>,
    shaded: Vec<NodeId>,
    labels: Vec<String>,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
    order: Vec<EdgeId>,
    position: Vec<usize>,
    zero_mask: BTreeSet<AdjacentPair>,
    acyclic: bool,
}

impl Network {
    /// Builds a network. `sinks` is the set of nodes that must decode.
    pub fn new(num_nodes: usize, source: NodeId, sinks: &[NodeId], edges: &[(NodeId, NodeId)]) -> Result<Self, NetworkError> {
        if source >= num_nodes {
            return Err(NetworkError::UnknownNode(source));
        }
        if sinks.is_empty() {
            return Err(NetworkError::NoSinks);
        }
        let mut in_edges = vec![Vec::new(); num_nodes];
        let mut out_edges = vec![Vec::new(); num_nodes];
        let mut list = Vec::with_capacity(edges.len());
        for (id, &(tail, head)) in edges.iter().enumerate() {
            for v in [tail, head] {
                if v >= num_nodes {
                    return Err(NetworkError::UnknownNode(v));
                }
            }
            if head == source {
                return Err(NetworkError::SourceHasInput);
            }
            in_edges[head].push(id);
            out_edges[tail].push(id);
            list.push(Edge { tail, head });
        }
        let mut sink_list: Vec<NodeId> = sinks.to_vec();
        sink_list.sort_unstable();
        sink_list.dedup();
        let mut net = Self {
            name: String::from("network"),
            num_nodes,
            source,
            sinks: sink_list,
            shaded: Vec::new(),
            labels: (0..num_nodes).map(|v| if v == source { "s".into() } else { format!("v{v}") }).collect(),
            edges: list,
            in_edges,
            out_edges,
            order: Vec::new(),
            position: Vec::new(),
            zero_mask: BTreeSet::new(),
            acyclic: true,
        };
        let reach = net.reachable_from(source);
        for &r in &net.sinks {
            if r >= num_nodes {
                return Err(NetworkError::UnknownNode(r));
            }
            if r == source {
                return Err(NetworkError::SourceIsSink);
            }
            if !reach[r] {
                return Err(NetworkError::Unreachable(r));
            }
        }
        net.acyclic = order::is_acyclic(&net);
        net.order = index_edges(&net);
        net.position = vec![0; net.edges.len()];
        for (pos, &e) in net.order.iter().enumerate() {
            net.position[e] = pos;
        }
        net.zero_mask = zero_init_mask(&net, &net.order);
        Ok(net)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.num_nodes);
        self.labels = labels;
        self
    }

    /// Marks interior must-decode nodes for display.
    pub fn with_shaded(mut self, shaded: Vec<NodeId>) -> Self {
        self.shaded = shaded;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sinks(&self) -> &[NodeId] {
        &self.sinks
    }

    pub fn is_sink(&self, v: NodeId) -> bool {
        self.sinks.binary_search(&v).is_ok()
    }

    pub fn shaded(&self) -> &[NodeId] {
        &self.shaded
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    /// Distinct children of `v`, ascending.
    pub fn children(&self, v: NodeId) -> Vec<NodeId> {
        let mut c: Vec<NodeId> = self.out_edges[v].iter().map(|&e| self.edges[e].head).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Distinct parents of `v`, ascending.
    pub fn parents(&self, v: NodeId) -> Vec<NodeId> {
        let mut p: Vec<NodeId> = self.in_edges[v].iter().map(|&e| self.edges[e].tail).collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    /// Edges in index order; the first `|Out(s)|` are the source's.
    pub fn edge_order(&self) -> &[EdgeId] {
        &self.order
    }

    /// 1-based index of an edge in the index order.
    pub fn edge_index(&self, e: EdgeId) -> usize {
        self.position[e] + 1
    }

    /// Pairs whose lag-0 coefficient is forced to zero.
    pub fn zero_mask(&self) -> &BTreeSet<AdjacentPair> {
        &self.zero_mask
    }

    pub fn adjacent_pairs(&self) -> Vec<AdjacentPair> {
        let mut out = Vec::new();
        for v in 0..self.num_nodes {
            for &e_in in &self.in_edges[v] {
                for &e_out in &self.out_edges[v] {
                    out.push(AdjacentPair { e_in, e_out });
                }
            }
        }
        out.sort();
        out
    }

    pub fn reachable_from(&self, start: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v] {
                let h = self.edges[e].head;
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        seen
    }
}
