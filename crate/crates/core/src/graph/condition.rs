use serde::Serialize;

use super::{components, cut_edges, GraphError, MetricGraph};

/// Outcome of the no-bottleneck test: after removing any edge, every
/// connected component still contains a vertex at infinity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionH {
    Holds,
    /// No vertex at infinity at all.
    Compact,
    /// `edge` is a cut-edge leaving `component` without any vertex at infinity.
    Violated { edge: String, component: Vec<String> },
}

impl ConditionH {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionH::Holds)
    }
}

pub fn check_condition_h(graph: &MetricGraph) -> Result<ConditionH, GraphError> {
    let bridges = cut_edges(graph)?;
    if graph.infinity_count() == 0 {
        return Ok(ConditionH::Compact);
    }
    let topo = graph.topology_unchecked();
    let n = graph.vertices().len();
    for (k, edge) in graph.edges().iter().enumerate() {
        if !bridges.contains(&edge.id) {
            continue;
        }
        let label = components(n, &topo.ends, Some(k));
        let groups = label.iter().copied().max().map_or(0, |m| m + 1);
        let mut has_infinity = vec![false; groups];
        for (v, &c) in label.iter().enumerate() {
            has_infinity[c] |= graph.vertices()[v].at_infinity;
        }
        if let Some(bad) = has_infinity.iter().position(|&x| !x) {
            let component = label
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c == bad)
                .map(|(v, _)| graph.vertices()[v].id.clone())
                .collect();
            return Ok(ConditionH::Violated { edge: edge.id.clone(), component });
        }
    }
    Ok(ConditionH::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::*;

    #[test]
    fn double_bridge_holds() {
        assert_eq!(check_condition_h(&double_bridge(1.0, 2.0)).unwrap(), ConditionH::Holds);
    }

    #[test]
    fn pendant_fails_with_pendant_witness() {
        match check_condition_h(&pendant(1.0)).unwrap() {
            ConditionH::Violated { edge, component } => {
                assert_eq!(edge, "pendant");
                assert_eq!(component, vec!["tip".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fig2_holds() {
        assert!(check_condition_h(&fig2()).unwrap().holds());
    }

    #[test]
    fn compact_graph_is_tagged() {
        assert_eq!(check_condition_h(&triangle(1.0, 1.0, 1.0)).unwrap(), ConditionH::Compact);
    }

    #[test]
    fn single_half_line_fails() {
        assert!(matches!(check_condition_h(&half_line()).unwrap(), ConditionH::Violated { .. }));
    }
}
