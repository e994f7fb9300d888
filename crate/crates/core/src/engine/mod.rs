//! Adaptive convolutional coding engine.
//!
//! Every coding node extends each of its local kernels by one random
//! coefficient per time step until the heads of its outgoing edges have
//! acknowledged. Sinks run the decodability test after every step; once
//! all of them pass, kernels freeze and the run is validated by decoding a
//! random source stream end to end.

mod state;
mod trace;

use std::collections::BTreeMap;

use rand::RngCore;

pub use state::{EdgeRole, Engine, StepReport};
pub use trace::TraceLog;

use crate::error::EngineError;
use crate::gf::Sym;
use crate::net::{EdgeId, Network, NodeId};

/// An input stream of a node: one of the source's virtual inputs, or a
/// real incoming edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Input {
    Source(usize),
    Edge(EdgeId),
}

/// How the source's outgoing kernels are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SourceMode {
    /// Drawn and grown like any other coding node.
    #[default]
    Random,
    /// The first `m` outgoing edges (by index) carry unit vectors; any
    /// further outgoing edges are random.
    Identity,
}

/// Which acknowledgements stop a node's kernel growth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AckScope {
    /// Kernels feeding an edge stop once that edge's head has acknowledged.
    #[default]
    PerEdge,
    /// All of a node's kernels stop together, once every child has.
    PerNode,
}

/// When a must-decode node that also forwards to children acknowledges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SinkAck {
    /// Once it decodes and all its children have acknowledged.
    #[default]
    AfterChildren,
    /// As soon as it decodes.
    OnDecode,
}

/// Which adjacent pairs are forced to zero at t = 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MaskMode {
    /// Pairs whose incoming edge is not earlier in the edge order.
    #[default]
    Indexed,
    /// Every pair at every non-source node.
    AllZero,
}

/// Fixed coefficient values that replace random draws.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelScript {
    values: BTreeMap<(Input, EdgeId, usize), Sym>,
}

impl KernelScript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `k_{input, e_out, t}`.
    pub fn set(&mut self, input: Input, e_out: EdgeId, t: usize, value: Sym) -> &mut Self {
        self.values.insert((input, e_out, t), value);
        self
    }

    pub fn get(&self, input: Input, e_out: EdgeId, t: usize) -> Option<Sym> {
        self.values.get(&(input, e_out, t)).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Input, EdgeId, usize, Sym)> + '_ {
        self.values.iter().map(|(&(i, e, t), &v)| (i, e, t, v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub q: u32,
    /// Last time step at which kernels may still grow.
    pub t_max: usize,
    /// Number of source symbols per step; defaults to the multicast rate.
    pub rate: Option<usize>,
    pub source_mode: SourceMode,
    pub ack_scope: AckScope,
    pub sink_ack: SinkAck,
    pub mask: MaskMode,
    /// Seed for the source data stream, kept apart from the coefficient rng.
    pub data_seed: u64,
    /// Extra steps decoded after termination; 0 skips the decode check.
    pub validate_len: usize,
    /// Per-step symbol identity and fixpoint checks.
    pub check_invariants: bool,
    pub trace: bool,
    pub script: KernelScript,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q: 2,
            t_max: 64,
            rate: None,
            source_mode: SourceMode::Random,
            ack_scope: AckScope::PerEdge,
            sink_ack: SinkAck::AfterChildren,
            mask: MaskMode::Indexed,
            data_seed: 0,
            validate_len: 8,
            check_invariants: true,
            trace: false,
            script: KernelScript::new(),
        }
    }
}

impl RunConfig {
    pub fn with_q(q: u32) -> Self {
        Self { q, ..Self::default() }
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceResult {
    pub success: bool,
    /// Global termination time: the last sink's first decoding time.
    pub t_n: Option<usize>,
    /// First decoding time per must-decode node, in sink order.
    pub sink_times: Vec<(NodeId, Option<usize>)>,
    /// Constraint length `L_v` of each node's global kernel matrix at
    /// termination (at the last step run, on failure): the highest power
    /// of z whose coefficient involves a drawn kernel coefficient, whatever
    /// value was drawn.
    pub node_lengths: Vec<usize>,
    /// Degree of each node's global kernel matrix after dropping zero
    /// coefficients, truncated the same way. Zero matrices count as 0.
    pub node_degrees: Vec<usize>,
    /// Nodes newly acknowledged at each step.
    pub ack_log: Vec<Vec<NodeId>>,
    /// Random coefficients drawn during the run.
    pub draws: usize,
    /// Steps executed before the decode check.
    pub steps: usize,
    /// True when every sink recovered the source stream.
    pub decoded: bool,
    pub trace: Option<String>,
}

impl TraceResult {
    pub fn sink_time(&self, r: NodeId) -> Option<usize> {
        self.sink_times.iter().find(|(v, _)| *v == r).and_then(|(_, t)| *t)
    }
}

/// Steps a fresh engine until every sink decodes or `t_max` passes, then
/// validates decoding.
pub fn run<R: RngCore + ?Sized>(net: &Network, cfg: &RunConfig, rng: &mut R) -> Result<TraceResult, EngineError> {
    let mut engine = Engine::new(net, cfg.clone())?;
    engine.run(rng)
}
