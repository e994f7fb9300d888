//! Network families used in the experiments.
//!
//! Deterministic families are pure functions of their parameters; the
//! random geometric family draws from a caller-supplied rng.

use std::fmt;

use rand::Rng;

use crate::error::{ConfigError, NetworkError};
use crate::net::{Network, NodeId};

/// Source, `n` relays, and one sink behind every `m`-subset of relays.
pub fn gen_combination(n: usize, m: usize) -> Result<Network, NetworkError> {
    if m == 0 || m > n {
        return Err(NetworkError::InvalidParams(format!("combination needs 1 <= m <= n, got n={n}, m={m}")));
    }
    let subsets = m_subsets(n, m);
    let num_nodes = 1 + n + subsets.len();
    let mut edges: Vec<(NodeId, NodeId)> = (1..=n).map(|i| (0, i)).collect();
    let mut labels: Vec<String> = std::iter::once("s".to_string()).chain((1..=n).map(|i| format!("u{i}"))).collect();
    let mut sinks = Vec::with_capacity(subsets.len());
    for (k, subset) in subsets.iter().enumerate() {
        let sink = 1 + n + k;
        sinks.push(sink);
        edges.extend(subset.iter().map(|&i| (1 + i, sink)));
        labels.push(format!("r{}", subset.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("_")));
    }
    Ok(Network::new(num_nodes, 0, &sinks, &edges)?.with_name(format!("combination({n},{m})")).with_labels(labels))
}

/// Source, `n` relays in a line, and `n - m + 1` sinks, sink `i` reading
/// relays `i .. i + m - 1`.
pub fn gen_sparsified(n: usize, m: usize) -> Result<Network, NetworkError> {
    if m == 0 || m > n {
        return Err(NetworkError::InvalidParams(format!("sparsified needs 1 <= m <= n, got n={n}, m={m}")));
    }
    let d = n - m + 1;
    let mut edges: Vec<(NodeId, NodeId)> = (1..=n).map(|i| (0, i)).collect();
    let mut labels: Vec<String> = std::iter::once("s".to_string()).chain((1..=n).map(|i| format!("u{i}"))).collect();
    let sinks: Vec<NodeId> = (0..d).map(|i| 1 + n + i).collect();
    for (i, &sink) in sinks.iter().enumerate() {
        edges.extend((0..m).map(|j| (1 + i + j, sink)));
        labels.push(format!("r{}", i + 1));
    }
    Ok(Network::new(1 + n + d, 0, &sinks, &edges)?.with_name(format!("sparsified({n},{m})")).with_labels(labels))
}

/// Node ids of an umbrella network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UmbrellaLayout {
    pub alpha: usize,
    pub beta: usize,
    pub upper: Vec<NodeId>,
    pub lower: Vec<NodeId>,
    /// Per handle layer: the three relays and the three bottom nodes.
    pub handles: Vec<([NodeId; 3], [NodeId; 3])>,
    /// Interior decoders, top first.
    pub shaded: Vec<NodeId>,
}

impl UmbrellaLayout {
    pub fn new(alpha: usize, beta: usize) -> Result<Self, NetworkError> {
        if alpha < 3 || alpha % 2 == 0 || beta < 2 {
            return Err(NetworkError::InvalidParams(format!(
                "umbrella needs odd alpha >= 3 and beta >= 2, got alpha={alpha}, beta={beta}"
            )));
        }
        let upper: Vec<NodeId> = (1..=alpha).collect();
        let lower: Vec<NodeId> = (alpha + 1..=2 * alpha).collect();
        let handles: Vec<([NodeId; 3], [NodeId; 3])> = (0..beta - 1)
            .map(|j| {
                let b = 2 * alpha + 1 + 6 * j;
                ([b, b + 1, b + 2], [b + 3, b + 4, b + 5])
            })
            .collect();
        let mut shaded = vec![lower[alpha / 2]];
        shaded.extend(handles[..beta - 2].iter().map(|(_, bottom)| bottom[1]));
        Ok(Self { alpha, beta, upper, lower, handles, shaded })
    }

    pub fn num_nodes(&self) -> usize {
        1 + 2 * self.alpha + 6 * (self.beta - 1)
    }

    /// Lower ring plus every bottom node: the childless nodes and the
    /// interior decoders together.
    pub fn must_decode(&self) -> Vec<NodeId> {
        let mut out = self.lower.clone();
        for (_, bottom) in &self.handles {
            out.extend_from_slice(bottom);
        }
        out
    }
}

/// Umbrella network: a ring of `alpha` relays over `alpha` two-input
/// nodes, then `beta - 1` stacked three-relay handle layers, each fed by
/// the previous layer's centre node.
pub fn gen_umbrella(alpha: usize, beta: usize) -> Result<Network, NetworkError> {
    let lay = UmbrellaLayout::new(alpha, beta)?;
    let mut edges: Vec<(NodeId, NodeId)> = lay.upper.iter().map(|&u| (0, u)).collect();
    for i in 0..alpha {
        edges.push((lay.upper[i], lay.lower[i]));
        edges.push((lay.upper[(i + 1) % alpha], lay.lower[i]));
    }
    for (j, (relays, bottom)) in lay.handles.iter().enumerate() {
        let feeder = lay.shaded[j];
        edges.extend(relays.iter().map(|&a| (feeder, a)));
        for (b, (x, y)) in bottom.iter().zip([(0, 1), (1, 2), (0, 2)]) {
            edges.push((relays[x], *b));
            edges.push((relays[y], *b));
        }
    }
    let mut labels = vec!["s".to_string()];
    labels.extend((1..=alpha).map(|i| format!("u{i}")));
    labels.extend((1..=alpha).map(|i| format!("w{i}")));
    for j in 0..beta - 1 {
        labels.extend((1..=3).map(|i| format!("a{}_{i}", j + 2)));
        labels.extend((1..=3).map(|i| format!("b{}_{i}", j + 2)));
    }
    Ok(Network::new(lay.num_nodes(), 0, &lay.must_decode(), &edges)?
        .with_name(format!("umbrella({alpha},{beta})"))
        .with_labels(labels)
        .with_shaded(lay.shaded.clone()))
}

/// Node ids of the seven-node shuttle network, in construction order.
pub mod shuttle {
    pub const S: usize = 0;
    pub const R1: usize = 1;
    pub const R2: usize = 2;
    pub const V1: usize = 3;
    pub const V2: usize = 4;
    pub const V3: usize = 5;
    pub const V4: usize = 6;
}

/// Seven nodes, ten edges, three directed cycles. Edge ids 0..10 match
/// the breadth-first indices 1..=10.
pub fn gen_shuttle() -> Network {
    use shuttle::*;
    let edges = [
        (S, R1),
        (S, R2),
        (R1, V4),
        (R2, V2),
        (V4, V1),
        (V2, V3),
        (V1, R1),
        (V1, V2),
        (V3, V4),
        (V3, R2),
    ];
    let labels = ["s", "r1", "r2", "v1", "v2", "v3", "v4"].map(String::from).to_vec();
    Network::new(7, S, &[R1, R2], &edges).expect("fixed shuttle is valid").with_name("shuttle").with_labels(labels)
}

/// Random geometric graph parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RggParams {
    pub num_nodes: usize,
    pub num_sinks: usize,
    pub radius: f64,
    pub cyclic: bool,
    /// Drop probability for low-to-high edges in cyclic mode.
    pub drop_forward: f64,
    /// Drop probability for high-to-low edges in cyclic mode.
    pub drop_backward: f64,
}

impl RggParams {
    pub fn new(num_nodes: usize, num_sinks: usize, radius: f64, cyclic: bool) -> Self {
        Self { num_nodes, num_sinks, radius, cyclic, drop_forward: 0.2, drop_backward: 0.8 }
    }
}

/// A generated graph together with its node positions.
#[derive(Clone, Debug)]
pub struct RggInstance {
    pub network: Network,
    pub positions: Vec<(f64, f64)>,
    /// Attempts used, including the accepted one.
    pub attempts: usize,
}

pub const RGG_MAX_ATTEMPTS: usize = 10_000;

/// Random geometric graph in the unit square. Node 0 is the source and the
/// `num_sinks` highest ids are sinks. Instances with an unreachable sink
/// are redrawn. Edges into the source are never kept.
pub fn gen_rgg<R: Rng + ?Sized>(p: &RggParams, rng: &mut R) -> Result<RggInstance, NetworkError> {
    if p.num_sinks == 0 || p.num_sinks >= p.num_nodes || !(p.radius > 0.0) {
        return Err(NetworkError::InvalidParams(format!(
            "rgg needs 0 < sinks < nodes and radius > 0, got nodes={}, sinks={}, radius={}",
            p.num_nodes, p.num_sinks, p.radius
        )));
    }
    for prob in [p.drop_forward, p.drop_backward] {
        if !(0.0..=1.0).contains(&prob) {
            return Err(NetworkError::InvalidParams(format!("drop probability {prob} outside [0, 1]")));
        }
    }
    let sinks: Vec<NodeId> = (p.num_nodes - p.num_sinks..p.num_nodes).collect();
    let r2 = p.radius * p.radius;
    for attempt in 1..=RGG_MAX_ATTEMPTS {
        let positions: Vec<(f64, f64)> = (0..p.num_nodes).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let mut edges = Vec::new();
        for a in 0..p.num_nodes {
            for b in a + 1..p.num_nodes {
                let (dx, dy) = (positions[a].0 - positions[b].0, positions[a].1 - positions[b].1);
                if dx * dx + dy * dy > r2 {
                    continue;
                }
                if !p.cyclic {
                    edges.push((a, b));
                    continue;
                }
                // draws happen for every in-range pair so the stream does
                // not depend on which edges survive
                let keep_forward = rng.gen::<f64>() >= p.drop_forward;
                let keep_backward = rng.gen::<f64>() >= p.drop_backward;
                if keep_forward {
                    edges.push((a, b));
                }
                if keep_backward && a != 0 {
                    edges.push((b, a));
                }
            }
        }
        match Network::new(p.num_nodes, 0, &sinks, &edges) {
            Ok(net) => {
                let name = format!("rgg_{}({},{},{})", if p.cyclic { "cyclic" } else { "acyclic" }, p.num_nodes, p.num_sinks, p.radius);
                return Ok(RggInstance { network: net.with_name(name), positions, attempts: attempt });
            }
            Err(NetworkError::Unreachable(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(NetworkError::RejectionLimit(RGG_MAX_ATTEMPTS))
}

fn m_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..m).collect();
    loop {
        out.push(c.clone());
        let mut i = m;
        while i > 0 && c[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        c[i - 1] += 1;
        for j in i..m {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// A network family with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum TopologySpec {
    Combination { n: usize, m: usize },
    Sparsified { n: usize, m: usize },
    Umbrella { alpha: usize, beta: usize },
    Shuttle,
    Rgg(RggParams),
}

impl TopologySpec {
    pub fn family(&self) -> &'static str {
        match self {
            Self::Combination { .. } => "combination",
            Self::Sparsified { .. } => "sparsified",
            Self::Umbrella { .. } => "umbrella",
            Self::Shuttle => "shuttle",
            Self::Rgg(p) if p.cyclic => "rgg_cyclic",
            Self::Rgg(_) => "rgg_acyclic",
        }
    }

    /// True when every build draws a fresh graph.
    pub fn is_random(&self) -> bool {
        matches!(self, Self::Rgg(_))
    }

    /// Parameter list as `key=value` pairs, in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            Self::Combination { n, m } | Self::Sparsified { n, m } => vec![("n", n.to_string()), ("m", m.to_string())],
            Self::Umbrella { alpha, beta } => vec![("alpha", alpha.to_string()), ("beta", beta.to_string())],
            Self::Shuttle => Vec::new(),
            Self::Rgg(p) => vec![
                ("nodes", p.num_nodes.to_string()),
                ("sinks", p.num_sinks.to_string()),
                ("radius", p.radius.to_string()),
                ("drop_forward", p.drop_forward.to_string()),
                ("drop_backward", p.drop_backward.to_string()),
            ],
        }
    }

    /// Compact `k=v;k=v` form used in CSV output.
    pub fn params_string(&self) -> String {
        self.params().iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    /// Flat `key=value` lines, starting with `family`.
    pub fn to_kv(&self) -> String {
        let mut out = format!("family={}\n", self.family());
        for (k, v) in self.params() {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    /// Parses the output of [`TopologySpec::to_kv`]. Blank lines and `#`
    /// comments are skipped; missing parameters take their defaults.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(&pairs)
    }

    /// Builds a spec from key-value pairs; `family` is required.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let get = |key: &str| pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let int = |key: &str, default: Option<usize>| -> Result<usize, ConfigError> {
            match get(key) {
                Some(v) => v.parse().map_err(|_| ConfigError::Invalid(format!("{key}: expected an integer, got `{v}`"))),
                None => default.ok_or_else(|| ConfigError::Invalid(format!("missing parameter `{key}`"))),
            }
        };
        let real = |key: &str, default: f64| -> Result<f64, ConfigError> {
            match get(key) {
                Some(v) => v.parse().map_err(|_| ConfigError::Invalid(format!("{key}: expected a number, got `{v}`"))),
                None => Ok(default),
            }
        };
        let family = get("family").ok_or_else(|| ConfigError::Invalid("missing `family`".into()))?;
        let allowed: &[&str] = match family {
            "combination" | "sparsified" => &["n", "m"],
            "umbrella" => &["alpha", "beta"],
            "shuttle" => &[],
            "rgg_acyclic" | "rgg_cyclic" => &["nodes", "sinks", "radius", "drop_forward", "drop_backward"],
            other => return Err(ConfigError::Invalid(format!("unknown family `{other}`"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| k != "family" && !allowed.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        let spec = match family {
            "combination" => Self::Combination { n: int("n", None)?, m: int("m", None)? },
            "sparsified" => Self::Sparsified { n: int("n", None)?, m: int("m", None)? },
            "umbrella" => Self::Umbrella { alpha: int("alpha", None)?, beta: int("beta", None)? },
            "shuttle" => Self::Shuttle,
            _ => {
                let mut p = RggParams::new(int("nodes", Some(25))?, int("sinks", Some(2))?, real("radius", 0.4)?, family == "rgg_cyclic");
                p.drop_forward = real("drop_forward", p.drop_forward)?;
                p.drop_backward = real("drop_backward", p.drop_backward)?;
                Self::Rgg(p)
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks parameters without building a graph.
    pub fn validate(&self) -> Result<(), NetworkError> {
        match self {
            Self::Combination { n, m } | Self::Sparsified { n, m } if *m == 0 || m > n => {
                Err(NetworkError::InvalidParams(format!("need 1 <= m <= n, got n={n}, m={m}")))
            }
            Self::Umbrella { alpha, beta } => UmbrellaLayout::new(*alpha, *beta).map(|_| ()),
            Self::Rgg(p) if p.num_sinks == 0 || p.num_sinks >= p.num_nodes || !(p.radius > 0.0) => {
                Err(NetworkError::InvalidParams("rgg needs 0 < sinks < nodes and radius > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Builds the network. Deterministic families ignore `rng`.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Network, NetworkError> {
        match self {
            Self::Combination { n, m } => gen_combination(*n, *m),
            Self::Sparsified { n, m } => gen_sparsified(*n, *m),
            Self::Umbrella { alpha, beta } => gen_umbrella(*alpha, *beta),
            Self::Shuttle => Ok(gen_shuttle()),
            Self::Rgg(p) => gen_rgg(p, rng).map(|inst| inst.network),
        }
    }

    /// Multicast rate the family is designed for.
    pub fn rate(&self) -> Option<usize> {
        match self {
            Self::Combination { m, .. } | Self::Sparsified { m, .. } => Some(*m),
            Self::Umbrella { .. } | Self::Shuttle => Some(2),
            Self::Rgg(_) => None,
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family(), self.params_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{min_cut, simple_cycles};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn combination_counts_and_cuts() {
        let net = gen_combination(4, 2).unwrap();
        assert_eq!(net.num_nodes(), 11);
        assert_eq!(net.sinks().len(), 6);
        let parents: BTreeSet<Vec<NodeId>> = net.sinks().iter().map(|&r| net.parents(r)).collect();
        assert_eq!(parents.len(), 6);
        for &r in net.sinks() {
            assert_eq!(net.parents(r).len(), 2);
            assert_eq!(min_cut(&net, r).unwrap(), 2);
        }
        assert_eq!(gen_combination(16, 2).unwrap().sinks().len(), 120);
        for (n, m) in [(5, 1), (6, 3), (7, 7)] {
            assert_eq!(gen_combination(n, m).unwrap().sinks().len(), binom(n, m));
        }
        assert!(gen_combination(2, 3).is_err());
    }

    #[test]
    fn sparsified_band() {
        let net = gen_sparsified(5, 2).unwrap();
        assert_eq!(net.sinks().len(), 4);
        let n10 = gen_sparsified(10, 3).unwrap();
        assert_eq!(n10.sinks().len(), 8);
        for u in 1..=10 {
            assert!(n10.out_edges(u).len() <= 3);
        }
        for (n, m) in [(5, 2), (10, 3), (12, 4)] {
            let net = gen_sparsified(n, m).unwrap();
            let sinks = net.sinks();
            for (i, &a) in sinks.iter().enumerate() {
                let pa: BTreeSet<_> = net.parents(a).into_iter().collect();
                let related: Vec<usize> = sinks
                    .iter()
                    .enumerate()
                    .filter(|&(j, &b)| j != i && net.parents(b).iter().any(|p| pa.contains(p)))
                    .map(|(j, _)| j)
                    .collect();
                assert!(related.len() <= 2 * (m - 1));
                assert!(related.iter().all(|&j| j.abs_diff(i) < m));
                if i >= m - 1 && i + m - 1 < sinks.len() {
                    assert_eq!(related.len(), 2 * (m - 1));
                }
            }
        }
        let single = gen_sparsified(3, 3).unwrap();
        assert_eq!(single.sinks().len(), 1);
        assert_eq!(min_cut(&single, single.sinks()[0]).unwrap(), 3);
    }

    #[test]
    fn umbrella_structure() {
        for (alpha, beta) in [(3, 2), (5, 3), (9, 3), (5, 10), (29, 3)] {
            let net = gen_umbrella(alpha, beta).unwrap();
            assert_eq!(net.num_nodes(), 2 * alpha + 6 * beta - 5);
            for &r in net.sinks() {
                assert_eq!(min_cut(&net, r).unwrap(), 2, "alpha={alpha} beta={beta} node {r}");
            }
            let interior: Vec<NodeId> =
                (0..net.num_nodes()).filter(|&v| net.parents(v).len() >= 2 && !net.children(v).is_empty()).collect();
            assert_eq!(interior, net.shaded());
            let childless: BTreeSet<NodeId> = (1..net.num_nodes()).filter(|&v| net.children(v).is_empty()).collect();
            let want: BTreeSet<NodeId> = childless.iter().chain(net.shaded()).copied().collect();
            assert_eq!(want, net.sinks().iter().copied().collect());
            assert_eq!(childless.len(), alpha + 2 * beta - 2);
            assert_eq!(net.sinks().len(), alpha + 3 * (beta - 1));
        }
        assert_eq!(gen_umbrella(9, 3).unwrap().num_nodes(), 31);
        assert!(gen_umbrella(4, 3).is_err());
        assert!(gen_umbrella(1, 3).is_err());
        assert!(gen_umbrella(5, 1).is_err());
    }

    #[test]
    fn umbrella_coding_nodes_are_source_and_shaded() {
        let net = gen_umbrella(5, 3).unwrap();
        let coders: Vec<NodeId> = (0..net.num_nodes())
            .filter(|&v| !net.out_edges(v).is_empty() && (v == net.source() || net.in_edges(v).len() >= 2))
            .collect();
        let mut want = vec![0];
        want.extend_from_slice(net.shaded());
        assert_eq!(coders, want);
    }

    #[test]
    fn umbrella_ring_defeats_routing() {
        // each upper relay forwards one of the two source symbols; a lower
        // node needs both, which is a 2-colouring of an odd ring
        for alpha in [3, 5, 7] {
            let lay = UmbrellaLayout::new(alpha, 2).unwrap();
            let net = gen_umbrella(alpha, 2).unwrap();
            let feasible = (0u32..1 << alpha).any(|choice| {
                lay.lower.iter().all(|&w| {
                    let symbols: BTreeSet<u32> = net.parents(w).iter().map(|&u| choice >> (u - 1) & 1).collect();
                    symbols.len() == 2
                })
            });
            assert!(!feasible, "alpha={alpha}");
        }
    }

    #[test]
    fn shuttle_matches_reference_labelling() {
        let net = gen_shuttle();
        assert_eq!(net.num_edges(), 10);
        assert_eq!(net.edge_order(), &(0..10).collect::<Vec<_>>()[..]);
        let mut cycles = simple_cycles(&net);
        for c in &mut cycles {
            c.sort_unstable();
        }
        cycles.sort();
        assert_eq!(cycles, vec![vec![2, 4, 6], vec![3, 5, 9], vec![4, 5, 7, 8]]);
        for &r in net.sinks() {
            assert_eq!(min_cut(&net, r).unwrap(), 2);
        }
        let mask: Vec<(usize, usize)> = net.zero_mask().iter().map(|p| (p.e_in + 1, p.e_out + 1)).collect();
        assert_eq!(mask, vec![(7, 3), (8, 6), (9, 5), (10, 4)]);
    }

    #[test]
    fn rgg_acyclic_is_acyclic_and_reproducible() {
        let p = RggParams::new(25, 4, 0.4, false);
        for seed in 0..20 {
            let a = gen_rgg(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let b = gen_rgg(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(a.network.edges(), b.network.edges());
            assert!(a.network.is_acyclic());
            assert!(simple_cycles(&a.network).is_empty());
            assert!(a.network.edges().iter().all(|e| e.tail < e.head));
            assert_eq!(a.network.sinks(), &[21, 22, 23, 24]);
        }
    }

    #[test]
    fn rgg_cyclic_keeps_about_a_fifth_of_back_edges() {
        let p = RggParams::new(25, 2, 0.4, true);
        let mut total = 0.0;
        let runs = 500;
        for seed in 0..runs {
            let inst = gen_rgg(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let mut candidates = 0usize;
            for a in 1..25 {
                for b in a + 1..25 {
                    let (x, y) = (inst.positions[a], inst.positions[b]);
                    if (x.0 - y.0).powi(2) + (x.1 - y.1).powi(2) <= 0.16 {
                        candidates += 1;
                    }
                }
            }
            let kept = inst.network.edges().iter().filter(|e| e.tail > e.head).count();
            total += kept as f64 / candidates as f64;
        }
        let mean = total / runs as f64;
        assert!((mean - 0.2).abs() < 0.03, "mean back-edge fraction {mean}");
    }

    #[test]
    fn rgg_gives_up_eventually() {
        let p = RggParams::new(10, 3, 1e-6, false);
        let err = gen_rgg(&p, &mut ChaCha8Rng::seed_from_u64(1)).unwrap_err();
        assert_eq!(err, NetworkError::RejectionLimit(RGG_MAX_ATTEMPTS));
    }

    #[test]
    fn spec_round_trips() {
        let specs = [
            TopologySpec::Combination { n: 16, m: 2 },
            TopologySpec::Sparsified { n: 10, m: 3 },
            TopologySpec::Umbrella { alpha: 5, beta: 10 },
            TopologySpec::Shuttle,
            TopologySpec::Rgg(RggParams::new(25, 6, 0.4, true)),
            TopologySpec::Rgg(RggParams::new(30, 2, 0.35, false)),
        ];
        for s in specs {
            assert_eq!(TopologySpec::from_kv(&s.to_kv()).unwrap(), s);
        }
        assert!(matches!(TopologySpec::from_kv("family=shuttle\nn=3"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(TopologySpec::from_kv("family=umbrella\nalpha=4\nbeta=2"), Err(ConfigError::Network(_))));
        assert!(matches!(TopologySpec::from_kv("family=combination\nn 3"), Err(ConfigError::Syntax { line: 2, .. })));
    }
}
