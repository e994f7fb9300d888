use std::collections::VecDeque;

use super::{EdgeId, Network, NodeId};
use crate::error::NetworkError;

/// Maximum number of edge-disjoint source-to-`sink` paths, by repeated
/// breadth-first augmenting paths on unit capacities.
pub fn min_cut(net: &Network, sink: NodeId) -> Result<usize, NetworkError> {
    if sink >= net.num_nodes() {
        return Err(NetworkError::UnknownNode(sink));
    }
    let s = net.source();
    if !net.reachable_from(s)[sink] {
        return Err(NetworkError::Unreachable(sink));
    }
    let mut flow = vec![false; net.num_edges()];
    let mut value = 0;
    // (edge, forward?) used to reach each node
    let mut via: Vec<Option<(EdgeId, bool)>> = vec![None; net.num_nodes()];
    loop {
        via.iter_mut().for_each(|x| *x = None);
        let mut seen = vec![false; net.num_nodes()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(v) = queue.pop_front() {
            for &e in net.out_edges(v) {
                let h = net.edge(e).head;
                if !flow[e] && !seen[h] {
                    seen[h] = true;
                    via[h] = Some((e, true));
                    if h == sink {
                        break 'bfs;
                    }
                    queue.push_back(h);
                }
            }
            for &e in net.in_edges(v) {
                let t = net.edge(e).tail;
                if flow[e] && !seen[t] {
                    seen[t] = true;
                    via[t] = Some((e, false));
                    queue.push_back(t);
                }
            }
        }
        if !seen[sink] {
            return Ok(value);
        }
        let mut v = sink;
        while v != s {
            let (e, forward) = via[v].expect("path recorded");
            flow[e] = forward;
            v = if forward { net.edge(e).tail } else { net.edge(e).head };
        }
        value += 1;
    }
}

/// Smallest min-cut over all sinks: the rate at which the source can
/// multicast.
pub fn multicast_rate(net: &Network) -> usize {
    net.sinks()
        .iter()
        .map(|&r| min_cut(net, r).expect("sinks are reachable by construction"))
        .min()
        .unwrap_or(0)
}
