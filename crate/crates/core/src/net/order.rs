//! Edge indexing and the t = 0 delay mask for networks with cycles.

use std::collections::{BTreeSet, VecDeque};

use super::{AdjacentPair, EdgeId, Network, NodeId};

pub(super) fn is_acyclic(net: &Network) -> bool {
    let mut indeg: Vec<usize> = (0..net.num_nodes()).map(|v| net.in_edges(v).len()).collect();
    let mut queue: VecDeque<NodeId> = (0..net.num_nodes()).filter(|&v| indeg[v] == 0).collect();
    let mut done = 0;
    while let Some(v) = queue.pop_front() {
        done += 1;
        for &e in net.out_edges(v) {
            let h = net.edge(e).head;
            indeg[h] -= 1;
            if indeg[h] == 0 {
                queue.push_back(h);
            }
        }
    }
    done == net.num_nodes()
}

/// Breadth-first edge order from the source.
///
/// When a node is dequeued its out-edges take the next indices in edge-id
/// order; nodes reached by the same dequeue join the queue in ascending id
/// order. On a cyclic network a node is enqueued as soon as one incoming
/// edge is indexed, and edges never reached from the source follow in
/// edge-id order. On an acyclic network a node waits until all of its
/// incoming edges are indexed, which makes the order topological (plain
/// first-visit order is not, when a node has a parent deeper in the search
/// than itself); nodes outside the source's reach are fed in by ascending
/// id whenever the queue runs dry.
pub fn index_edges(net: &Network) -> Vec<EdgeId> {
    let n = net.num_nodes();
    let wait_for_all = is_acyclic(net);
    let mut pending: Vec<usize> = (0..n).map(|v| net.in_edges(v).len()).collect();
    let mut queued = vec![false; n];
    let mut order = Vec::with_capacity(net.num_edges());
    let mut assigned = vec![false; net.num_edges()];
    let mut queue = VecDeque::from([net.source()]);
    queued[net.source()] = true;
    loop {
        while let Some(v) = queue.pop_front() {
            let mut fresh = Vec::new();
            for &e in net.out_edges(v) {
                order.push(e);
                assigned[e] = true;
                let h = net.edge(e).head;
                pending[h] -= 1;
                let ready = !wait_for_all || pending[h] == 0;
                if ready && !queued[h] {
                    queued[h] = true;
                    fresh.push(h);
                }
            }
            fresh.sort_unstable();
            queue.extend(fresh);
        }
        if !wait_for_all {
            break;
        }
        match (0..n).find(|&v| !queued[v] && pending[v] == 0) {
            Some(v) => {
                queued[v] = true;
                queue.push_back(v);
            }
            None => break,
        }
    }
    order.extend((0..net.num_edges()).filter(|&e| !assigned[e]));
    order
}

/// Adjacent pairs `(e', e)` with `index(e') >= index(e)`.
pub fn zero_init_mask(net: &Network, order: &[EdgeId]) -> BTreeSet<AdjacentPair> {
    let mut pos = vec![0; net.num_edges()];
    for (i, &e) in order.iter().enumerate() {
        pos[e] = i;
    }
    net.adjacent_pairs().into_iter().filter(|p| pos[p.e_in] >= pos[p.e_out]).collect()
}

/// Every adjacent pair at a non-source node: a unit delay on every hop.
pub fn all_zero_fallback(net: &Network) -> BTreeSet<AdjacentPair> {
    net.adjacent_pairs().into_iter().filter(|p| net.edge(p.e_in).head != net.source()).collect()
}

/// True iff every directed cycle passes through a masked pair, checked as
/// acyclicity of the line graph restricted to unmasked pairs.
pub fn validate_cycle_delay(net: &Network, mask: &BTreeSet<AdjacentPair>) -> bool {
    let m = net.num_edges();
    let mut succ = vec![Vec::new(); m];
    let mut indeg = vec![0usize; m];
    for p in net.adjacent_pairs() {
        if !mask.contains(&p) {
            succ[p.e_in].push(p.e_out);
            indeg[p.e_out] += 1;
        }
    }
    let mut queue: VecDeque<EdgeId> = (0..m).filter(|&e| indeg[e] == 0).collect();
    let mut done = 0;
    while let Some(e) = queue.pop_front() {
        done += 1;
        for &f in &succ[e] {
            indeg[f] -= 1;
            if indeg[f] == 0 {
                queue.push_back(f);
            }
        }
    }
    done == m
}

/// All simple directed cycles as edge lists, each starting at its
/// smallest edge id. Exponential; meant for small networks.
pub fn simple_cycles(net: &Network) -> Vec<Vec<EdgeId>> {
    fn extend(net: &Network, start: EdgeId, path: &mut Vec<EdgeId>, on: &mut Vec<bool>, out: &mut Vec<Vec<EdgeId>>) {
        let last = *path.last().expect("nonempty");
        let v = net.edge(last).head;
        for &e in net.out_edges(v) {
            if e == start {
                out.push(path.clone());
            } else if e > start && !on[net.edge(e).head] {
                on[net.edge(e).head] = true;
                path.push(e);
                extend(net, start, path, on, out);
                path.pop();
                on[net.edge(e).head] = false;
            }
        }
    }
    let mut out = Vec::new();
    for start in 0..net.num_edges() {
        let mut on = vec![false; net.num_nodes()];
        on[net.edge(start).head] = true;
        // a cycle returns to the start edge's tail through its in-edge
        if net.edge(start).head == net.edge(start).tail {
            out.push(vec![start]);
            continue;
        }
        let mut path = vec![start];
        extend(net, start, &mut path, &mut on, &mut out);
    }
    out
}
