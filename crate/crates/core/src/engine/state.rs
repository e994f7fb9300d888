use std::collections::BTreeSet;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trace::{input_label, TraceLog};
use super::{AckScope, Input, MaskMode, RunConfig, SinkAck, SourceMode, TraceResult};
use crate::error::EngineError;
use crate::gf::{Gf, Sym};
use crate::net::{all_zero_fallback, multicast_rate, validate_cycle_delay, AdjacentPair, EdgeId, Network, NodeId};
use crate::poly::{
    conv_step_into, decodability_test, decoder_for, encode_symbol, sequential_decode, ColumnSeries, Mat, PolyMatrix,
    RankCache, SinkDecoder,
};

/// How the kernels feeding an edge are set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRole {
    /// Set once at construction: single-input forwarding, or a unit
    /// vector out of the source in identity mode.
    Fixed,
    /// Grown by one random coefficient per step until stopped.
    Random,
}

/// What happened in one step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepReport {
    pub t: usize,
    pub draws: usize,
    pub decoded: Vec<NodeId>,
    pub acked: Vec<NodeId>,
}

/// Mutable state of one run.
#[derive(Clone, Debug)]
pub struct Engine<'n> {
    net: &'n Network,
    gf: &'static Gf,
    cfg: RunConfig,
    m: usize,
    mask: BTreeSet<AdjacentPair>,
    inputs: Vec<Vec<Input>>,
    roles: Vec<EdgeRole>,
    /// `kernels[e][i]`: coefficients from the i-th input of `tail(e)` to `e`.
    kernels: Vec<Vec<Vec<Sym>>>,
    /// Global kernels and symbols per stream: real edges, then source inputs.
    f: Vec<ColumnSeries>,
    y: Vec<Vec<Sym>>,
    /// `support[s][t]`: whether coefficient t of stream s involves any
    /// kernel coefficient, drawn values of zero included.
    support: Vec<Vec<bool>>,
    x: Vec<Vec<Sym>>,
    data_rng: ChaCha8Rng,
    t: usize,
    sink_slot: Vec<Option<usize>>,
    sink_f: Vec<Vec<Mat>>,
    caches: Vec<RankCache>,
    decode_time: Vec<Option<usize>>,
    decoders: Vec<Option<SinkDecoder>>,
    acked: Vec<bool>,
    ack_log: Vec<Vec<NodeId>>,
    draws: usize,
    log: Option<TraceLog>,
}

impl<'n> Engine<'n> {
    pub fn new(net: &'n Network, cfg: RunConfig) -> Result<Self, EngineError> {
        let gf = Gf::for_q(cfg.q)?;
        let capacity = multicast_rate(net);
        let m = cfg.rate.unwrap_or(capacity);
        if m == 0 || m > capacity {
            return Err(EngineError::RateMismatch { requested: m, capacity });
        }
        let mask = match cfg.mask {
            MaskMode::Indexed => net.zero_mask().clone(),
            MaskMode::AllZero => all_zero_fallback(net),
        };
        if !validate_cycle_delay(net, &mask) {
            return Err(EngineError::CycleWithoutDelay);
        }
        let s = net.source();
        let inputs: Vec<Vec<Input>> = (0..net.num_nodes())
            .map(|v| {
                if v == s {
                    (0..m).map(Input::Source).collect()
                } else {
                    net.in_edges(v).iter().map(|&e| Input::Edge(e)).collect()
                }
            })
            .collect();
        let mut source_out: Vec<EdgeId> = net.out_edges(s).to_vec();
        source_out.sort_by_key(|&e| net.edge_index(e));
        let e_count = net.num_edges();
        let mut roles = vec![EdgeRole::Random; e_count];
        let mut kernels: Vec<Vec<Vec<Sym>>> = Vec::with_capacity(e_count);
        for e in 0..e_count {
            let v = net.edge(e).tail;
            let ins = &inputs[v];
            let mut k = vec![Vec::new(); ins.len()];
            let unit_slot = if v == s && cfg.source_mode == SourceMode::Identity {
                source_out.iter().position(|&x| x == e).filter(|&p| p < m)
            } else {
                None
            };
            if let Some(j) = unit_slot {
                roles[e] = EdgeRole::Fixed;
                k[j] = vec![1];
            } else if ins.len() <= 1 {
                roles[e] = EdgeRole::Fixed;
                if let Some(&input) = ins.first() {
                    k[0] = if is_masked(&mask, input, e) { vec![0, 1] } else { vec![1] };
                }
            }
            kernels.push(k);
        }
        for (input, e_out, t, _) in cfg.script.iter() {
            if e_out >= e_count {
                return Err(EngineError::Script(format!("unknown edge id {e_out}")));
            }
            if !inputs[net.edge(e_out).tail].contains(&input) {
                return Err(EngineError::Script(format!("{input:?} does not enter the tail of edge id {e_out}")));
            }
            if roles[e_out] != EdgeRole::Random {
                return Err(EngineError::Script(format!("edge id {e_out} has a fixed kernel")));
            }
            if t == 0 && is_masked(&mask, input, e_out) {
                return Err(EngineError::Script(format!("pair ({input:?}, {e_out}) is zero at t=0")));
            }
        }
        let mut sink_slot = vec![None; net.num_nodes()];
        for (i, &r) in net.sinks().iter().enumerate() {
            sink_slot[r] = Some(i);
        }
        let d = net.sinks().len();
        let log = cfg.trace.then(|| TraceLog::new(net, cfg.q, m));
        Ok(Self {
            net,
            gf,
            m,
            mask,
            inputs,
            roles,
            kernels,
            f: vec![ColumnSeries::new(m); e_count + m],
            y: vec![Vec::new(); e_count + m],
            support: vec![Vec::new(); e_count + m],
            x: Vec::new(),
            data_rng: ChaCha8Rng::seed_from_u64(cfg.data_seed),
            t: 0,
            sink_slot,
            sink_f: vec![Vec::new(); d],
            caches: vec![RankCache::new(m); d],
            decode_time: vec![None; d],
            decoders: vec![None; d],
            acked: vec![false; net.num_nodes()],
            ack_log: Vec::new(),
            draws: 0,
            log,
            cfg,
        })
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    pub fn field(&self) -> &'static Gf {
        self.gf
    }

    /// Source symbols per step.
    pub fn rate(&self) -> usize {
        self.m
    }

    /// Next time step to run.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn mask(&self) -> &BTreeSet<AdjacentPair> {
        &self.mask
    }

    pub fn inputs(&self, v: NodeId) -> &[Input] {
        &self.inputs[v]
    }

    pub fn role(&self, e: EdgeId) -> EdgeRole {
        self.roles[e]
    }

    /// Edges whose kernels are drawn at random.
    pub fn random_edges(&self) -> Vec<EdgeId> {
        (0..self.net.num_edges()).filter(|&e| self.roles[e] == EdgeRole::Random).collect()
    }

    /// Nodes with at least one randomly coded outgoing edge.
    pub fn coding_nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.random_edges().into_iter().map(|e| self.net.edge(e).tail).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Local kernel coefficients from `input` to `e_out`, without trailing
    /// implicit zeros. Empty when `input` does not enter `tail(e_out)`.
    pub fn kernel(&self, input: Input, e_out: EdgeId) -> &[Sym] {
        let v = self.net.edge(e_out).tail;
        match self.inputs[v].iter().position(|&i| i == input) {
            Some(slot) => &self.kernels[e_out][slot],
            None => &[],
        }
    }

    /// Global kernel coefficients of an edge through the last step run.
    pub fn global_kernel(&self, e: EdgeId) -> &ColumnSeries {
        &self.f[e]
    }

    /// `F_v(z)` through the last step run: the global kernels of the
    /// node's incoming edges, or of its outgoing edges for the source.
    pub fn node_kernel(&self, v: NodeId) -> PolyMatrix {
        let cols: Vec<&ColumnSeries> = self.node_streams(v).iter().map(|&e| &self.f[e]).collect();
        PolyMatrix::from_columns(self.m, &cols).expect("columns share the rate")
    }

    pub fn edge_symbols(&self, e: EdgeId) -> &[Sym] {
        &self.y[e]
    }

    /// Source symbols `x_t`, one vector per step.
    pub fn source_symbols(&self) -> &[Vec<Sym>] {
        &self.x
    }

    pub fn decode_time(&self, r: NodeId) -> Option<usize> {
        self.sink_slot[r].and_then(|i| self.decode_time[i])
    }

    pub fn decoder(&self, r: NodeId) -> Option<&SinkDecoder> {
        self.sink_slot[r].and_then(|i| self.decoders[i].as_ref())
    }

    /// Kernel coefficients `F_{r,0..}` of a must-decode node.
    pub fn sink_coeffs(&self, r: NodeId) -> Option<&[Mat]> {
        self.sink_slot[r].map(|i| self.sink_f[i].as_slice())
    }

    pub fn is_acked(&self, v: NodeId) -> bool {
        self.acked[v]
    }

    pub fn all_decoded(&self) -> bool {
        self.decode_time.iter().all(Option::is_some)
    }

    pub fn trace_text(&self) -> Option<&str> {
        self.log.as_ref().map(TraceLog::as_str)
    }

    fn node_streams(&self, v: NodeId) -> &[EdgeId] {
        if v == self.net.source() {
            self.net.out_edges(v)
        } else {
            self.net.in_edges(v)
        }
    }

    fn stream(&self, input: Input) -> usize {
        match input {
            Input::Edge(e) => e,
            Input::Source(j) => self.net.num_edges() + j,
        }
    }

    /// Whether the kernels into `e` grow at the next step.
    fn edge_drawing(&self, e: EdgeId) -> bool {
        if self.roles[e] != EdgeRole::Random {
            return false;
        }
        if self.t == 0 {
            return true;
        }
        match self.cfg.ack_scope {
            AckScope::PerEdge => !self.acked[self.net.edge(e).head],
            AckScope::PerNode => {
                let v = self.net.edge(e).tail;
                !self.net.out_edges(v).iter().all(|&o| self.acked[self.net.edge(o).head])
            }
        }
    }

    fn structural_support(&self, e: EdgeId, t: usize) -> bool {
        let ins = &self.inputs[self.net.edge(e).tail];
        let random = self.roles[e] == EdgeRole::Random;
        ins.iter().zip(&self.kernels[e]).any(|(&input, k)| {
            let sup = &self.support[self.stream(input)];
            k.iter().enumerate().take(t + 1).any(|(lag, &c)| {
                let present = if random { !(lag == 0 && is_masked(&self.mask, input, e)) } else { c != 0 };
                present && sup[t - lag]
            })
        })
    }

    /// Highest power of z, up to `t`, at which `F_v` involves any kernel
    /// coefficient: its constraint length counting zero-valued draws.
    pub fn node_length_through(&self, v: NodeId, t: usize) -> usize {
        self.node_streams(v)
            .iter()
            .filter_map(|&e| (0..=t.min(self.support[e].len().saturating_sub(1))).rev().find(|&i| self.support[e][i]))
            .max()
            .unwrap_or(0)
    }

    /// Random coefficients the next step will sample.
    pub fn pending_draws(&self) -> usize {
        let t = self.t;
        let mut count = 0;
        for e in 0..self.net.num_edges() {
            if !self.edge_drawing(e) {
                continue;
            }
            let v = self.net.edge(e).tail;
            for &input in &self.inputs[v] {
                let fixed = (t == 0 && is_masked(&self.mask, input, e)) || self.cfg.script.get(input, e, t).is_some();
                if !fixed {
                    count += 1;
                }
            }
        }
        count
    }

    /// Runs one time step: new source symbols, kernel draws, propagation,
    /// decodability tests, and acknowledgements.
    pub fn step<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<StepReport, EngineError> {
        let t = self.t;
        let net = self.net;
        let gf = self.gf;
        let (e_count, m) = (net.num_edges(), self.m);
        if let Some(log) = &mut self.log {
            log.step(t);
        }

        let xt: Vec<Sym> = (0..m).map(|_| gf.sample(&mut self.data_rng)).collect();
        for (j, &sym) in xt.iter().enumerate() {
            let mut unit = vec![0; m];
            if t == 0 {
                unit[j] = 1;
            }
            self.f[e_count + j].push(&unit);
            self.y[e_count + j].push(sym);
            self.support[e_count + j].push(t == 0);
        }
        self.x.push(xt);

        let mut draws = 0;
        for &e in net.edge_order() {
            if !self.edge_drawing(e) {
                continue;
            }
            let v = net.edge(e).tail;
            for slot in 0..self.inputs[v].len() {
                let input = self.inputs[v][slot];
                let value = if t == 0 && is_masked(&self.mask, input, e) {
                    0
                } else if let Some(s) = self.cfg.script.get(input, e, t) {
                    s
                } else {
                    draws += 1;
                    gf.sample(rng)
                };
                let k = &mut self.kernels[e][slot];
                k.resize(t, 0);
                k.push(value);
                if let Some(log) = &mut self.log {
                    log.draw(net, input, e, value);
                }
            }
        }
        self.draws += draws;

        let mut buf = vec![0; m];
        for &e in net.edge_order() {
            let sym = {
                let ins = &self.inputs[net.edge(e).tail];
                let f_in: Vec<&ColumnSeries> = ins.iter().map(|&i| &self.f[self.stream(i)]).collect();
                let y_in: Vec<&[Sym]> = ins.iter().map(|&i| self.y[self.stream(i)].as_slice()).collect();
                let k_in: Vec<&[Sym]> = self.kernels[e].iter().map(Vec::as_slice).collect();
                conv_step_into(gf, &f_in, &k_in, t, &mut buf)?;
                encode_symbol(gf, &y_in, &k_in, t)?
            };
            let live = self.structural_support(e, t);
            self.f[e].push(&buf);
            self.y[e].push(sym);
            self.support[e].push(live);
            if let Some(log) = &mut self.log {
                log.symbol(net, e, sym);
            }
        }
        if self.cfg.check_invariants {
            self.check_step(t)?;
        }

        let mut decoded = Vec::new();
        for (i, &r) in net.sinks().iter().enumerate() {
            let cols: Vec<&[Sym]> =
                net.in_edges(r).iter().map(|&e| self.f[e].coeff(t).expect("pushed this step")).collect();
            self.sink_f[i].push(Mat::from_columns(m, &cols)?);
            if self.decode_time[i].is_none() && decodability_test(gf, &self.sink_f[i], t, &mut self.caches[i])? {
                self.decode_time[i] = Some(t);
                self.decoders[i] = Some(decoder_for(gf, &self.sink_f[i], t)?);
                decoded.push(r);
                if let Some(log) = &mut self.log {
                    log.decode(net, r);
                }
            }
        }

        let ack = self.ack_fixpoint();
        let acked: Vec<NodeId> = (0..net.num_nodes()).filter(|&v| ack[v] && !self.acked[v]).collect();
        if let Some(log) = &mut self.log {
            for &v in &acked {
                log.ack(net, v);
            }
        }
        if let Some(v) = (0..net.num_nodes()).find(|&v| self.acked[v] && !ack[v]) {
            return Err(EngineError::Invariant { t, detail: format!("{} withdrew its acknowledgement", net.label(v)) });
        }
        self.acked = ack;
        self.ack_log.push(acked.clone());
        self.t += 1;
        Ok(StepReport { t, draws, decoded, acked })
    }

    /// Largest consistent acknowledgement set. A node has acknowledged when
    /// it decodes (if it must) and all its children have acknowledged;
    /// under [`SinkAck::OnDecode`] a must-decode node acknowledges on
    /// decoding alone. Starting from all-true makes cycles without sinks,
    /// and childless relays, count as done.
    fn ack_fixpoint(&self) -> Vec<bool> {
        let net = self.net;
        let mut ack = vec![true; net.num_nodes()];
        for (i, &r) in net.sinks().iter().enumerate() {
            ack[r] = self.decode_time[i].is_some();
        }
        loop {
            let mut changed = false;
            for v in 0..net.num_nodes() {
                let settled_on_decode = self.cfg.sink_ack == SinkAck::OnDecode && self.sink_slot[v].is_some();
                if settled_on_decode || !ack[v] {
                    continue;
                }
                if !net.out_edges(v).iter().all(|&e| ack[net.edge(e).head]) {
                    ack[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return ack;
            }
        }
    }

    /// Symbols equal the source stream through each global kernel, and a
    /// second propagation pass reproduces every kernel coefficient.
    fn check_step(&self, t: usize) -> Result<(), EngineError> {
        let gf = self.gf;
        let net = self.net;
        let mut buf = vec![0; self.m];
        for &e in net.edge_order() {
            let mut expect = 0;
            for i in 0..=t {
                expect ^= gf.dot(&self.x[t - i], self.f[e].coeff(i).expect("computed"));
            }
            if expect != self.y[e][t] {
                return Err(EngineError::Invariant {
                    t,
                    detail: format!("symbol on e{} is {} but the kernel predicts {expect}", net.edge_index(e), self.y[e][t]),
                });
            }
            let ins = &self.inputs[net.edge(e).tail];
            let f_in: Vec<&ColumnSeries> = ins.iter().map(|&i| &self.f[self.stream(i)]).collect();
            let k_in: Vec<&[Sym]> = self.kernels[e].iter().map(Vec::as_slice).collect();
            conv_step_into(gf, &f_in, &k_in, t, &mut buf)?;
            if buf.as_slice() != self.f[e].coeff(t).expect("computed") {
                return Err(EngineError::Invariant {
                    t,
                    detail: format!("kernel of e{} changed on a second pass", net.edge_index(e)),
                });
            }
        }
        Ok(())
    }

    /// Degree of `F_v` truncated at `t`; a zero matrix counts as 0.
    pub fn node_degree_through(&self, v: NodeId, t: usize) -> usize {
        self.node_streams(v)
            .iter()
            .filter_map(|&e| (0..=t.min(self.f[e].len().saturating_sub(1))).rev().find(|&i| self.f[e].coeff(i).is_some_and(|c| c.iter().any(|&x| x != 0))))
            .max()
            .unwrap_or(0)
    }

    /// Decodes the whole received stream at every sink and compares it
    /// with the source stream.
    pub fn validate_decoding(&self) -> Result<(), EngineError> {
        let net = self.net;
        for (i, &r) in net.sinks().iter().enumerate() {
            let dec = self.decoders[i].as_ref().ok_or_else(|| EngineError::Validation {
                sink: r,
                detail: "no decoder".into(),
            })?;
            let stream: Vec<Vec<Sym>> =
                (0..self.t).map(|t| net.in_edges(r).iter().map(|&e| self.y[e][t]).collect()).collect();
            let xs = sequential_decode(self.gf, dec, &self.sink_f[i], &stream)?;
            if let Some(k) = (0..xs.len()).find(|&k| xs[k] != self.x[k]) {
                return Err(EngineError::Validation {
                    sink: r,
                    detail: format!("x_{k} decoded as {:?}, sent {:?}", xs[k], self.x[k]),
                });
            }
        }
        Ok(())
    }

    /// Steps until every sink decodes or `t_max` passes; on success runs
    /// `validate_len` frozen steps and checks decoding.
    pub fn run<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<TraceResult, EngineError> {
        let mut success = self.all_decoded() && self.t > 0;
        while !success && self.t <= self.cfg.t_max {
            self.step(rng)?;
            success = self.all_decoded();
        }
        let steps = self.t;
        let t_n = success.then(|| self.decode_time.iter().flatten().copied().max().unwrap_or(0));
        let horizon = t_n.unwrap_or(steps.saturating_sub(1));
        let node_lengths = (0..self.net.num_nodes()).map(|v| self.node_length_through(v, horizon)).collect();
        let node_degrees = (0..self.net.num_nodes()).map(|v| self.node_degree_through(v, horizon)).collect();
        let mut decoded = false;
        if success && self.cfg.validate_len > 0 {
            for _ in 0..self.cfg.validate_len {
                let report = self.step(rng)?;
                if report.draws > 0 {
                    return Err(EngineError::Invariant { t: report.t, detail: "draws after termination".into() });
                }
            }
            self.validate_decoding()?;
            decoded = true;
        }
        Ok(TraceResult {
            success,
            t_n,
            sink_times: self.net.sinks().iter().enumerate().map(|(i, &r)| (r, self.decode_time[i])).collect(),
            node_lengths,
            node_degrees,
            ack_log: self.ack_log.clone(),
            draws: self.draws,
            steps,
            decoded,
            trace: self.log.as_ref().map(|l| l.as_str().to_string()),
        })
    }

    /// Human-readable label of an input stream.
    pub fn input_label(&self, input: Input) -> String {
        input_label(self.net, input)
    }
}

fn is_masked(mask: &BTreeSet<AdjacentPair>, input: Input, e_out: EdgeId) -> bool {
    match input {
        Input::Edge(e_in) => mask.contains(&AdjacentPair { e_in, e_out }),
        Input::Source(_) => false,
    }
}
