use std::collections::BTreeSet;

use super::{connected, GraphError, MetricGraph};

/// Ids of the cut-edges (bridges) of the underlying multigraph.
///
/// Lowpoint DFS that skips the tree edge by id rather than by parent vertex,
/// so parallel edges correctly protect each other. Loops are never bridges.
pub fn cut_edges(graph: &MetricGraph) -> Result<BTreeSet<String>, GraphError> {
    let topo = graph.topology()?;
    let n = graph.vertices().len();
    let mut order = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut bridges = BTreeSet::new();
    let mut next = 0;

    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        order[root] = next;
        low[root] = next;
        next += 1;
        // (vertex, edge used to enter it, cursor into its incidence list)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        while let Some(&mut (v, via, ref mut cursor)) = stack.last_mut() {
            if let Some(&e) = topo.incident[v].get(*cursor) {
                *cursor += 1;
                if Some(e) == via {
                    continue;
                }
                let (a, b) = topo.ends[e];
                if a == b {
                    continue;
                }
                let w = if a == v { b } else { a };
                if order[w] == usize::MAX {
                    order[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push((w, Some(e), 0));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if let (Some(e), Some(&(parent, _, _))) = (via, stack.last()) {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > order[parent] {
                        bridges.insert(graph.edges()[e].id.clone());
                    }
                }
            }
        }
    }
    Ok(bridges)
}

/// Reference implementation: remove each edge and test connectivity.
pub fn cut_edges_brute_force(graph: &MetricGraph) -> Result<BTreeSet<String>, GraphError> {
    let topo = graph.topology()?;
    let n = graph.vertices().len();
    Ok((0..topo.ends.len())
        .filter(|&k| !connected(n, &topo.ends, Some(k)))
        .map(|k| graph.edges()[k].id.clone())
        .collect())
}
