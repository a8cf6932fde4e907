use std::collections::HashSet;

use serde::Serialize;

use super::{check_condition_h, GraphError, MetricGraph, LENGTH_EQ_RTOL};

/// The graphs obtained from the real line by gluing symmetric point pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "n", rename_all = "snake_case")]
pub enum Example1Class {
    Line,
    SingleBubble,
    BubbleTower(usize),
    None,
}

/// Classification plus the isometry with the glued line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Match {
    pub class: Example1Class,
    /// Glue points `a_1 < ... < a_n` (empty for the line).
    pub glue_points: Vec<f64>,
    /// Vertex where the two half-lines meet (`x_n`).
    pub junction: Option<String>,
    /// The loop at the top of the tower (`x_1`), whose midpoint is the soliton centre.
    pub loop_edge: Option<String>,
}

impl Example1Match {
    fn none() -> Self {
        Example1Match { class: Example1Class::None, glue_points: vec![], junction: None, loop_edge: None }
    }
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= LENGTH_EQ_RTOL * a.abs().max(b.abs())
}

/// Recognise the line, the single bubble and the bubble towers.
///
/// Requires a valid graph satisfying the no-bottleneck condition.
pub fn recognize_example1(graph: &MetricGraph) -> Result<Example1Match, GraphError> {
    if !check_condition_h(graph)?.holds() {
        return Err(GraphError::ConditionHFails);
    }
    let topo = graph.topology_unchecked();
    let edges = graph.edges();

    let half_lines: Vec<usize> = (0..edges.len()).filter(|&k| edges[k].length.is_infinite()).collect();
    if half_lines.len() != 2 || topo.ends[half_lines[0]].0 != topo.ends[half_lines[1]].0 {
        return Ok(Example1Match::none());
    }
    let junction = topo.ends[half_lines[0]].0;
    let bounded_total = edges.len() - 2;

    let mut used: HashSet<usize> = HashSet::new();
    let mut visited: HashSet<usize> = HashSet::from([junction]);
    let mut pair_lengths = Vec::new();
    let mut current = junction;
    let loop_edge = loop {
        let remaining: Vec<usize> = topo.incident[current]
            .iter()
            .copied()
            .filter(|&k| !edges[k].length.is_infinite() && !used.contains(&k))
            .collect();
        match remaining.as_slice() {
            [] if current == junction && bounded_total == 0 => {
                return Ok(Example1Match {
                    class: Example1Class::Line,
                    glue_points: vec![],
                    junction: Some(graph.vertices()[junction].id.clone()),
                    loop_edge: None,
                });
            }
            &[k] if edges[k].is_loop() => {
                used.insert(k);
                break k;
            }
            &[k1, k2] => {
                let (a1, b1) = topo.ends[k1];
                let (a2, b2) = topo.ends[k2];
                let other1 = if a1 == current { b1 } else { a1 };
                let other2 = if a2 == current { b2 } else { a2 };
                let (l1, l2) = (edges[k1].length.finite(), edges[k2].length.finite());
                let parallel = a1 != b1 && a2 != b2 && other1 == other2 && !visited.contains(&other1);
                match (l1, l2) {
                    (Some(l1), Some(l2)) if parallel && same_length(l1, l2) => {
                        used.insert(k1);
                        used.insert(k2);
                        visited.insert(other1);
                        pair_lengths.push(0.5 * (l1 + l2));
                        current = other1;
                    }
                    _ => return Ok(Example1Match::none()),
                }
            }
            _ => return Ok(Example1Match::none()),
        }
    };
    if used.len() != bounded_total || visited.len() + 2 != graph.vertices().len() {
        return Ok(Example1Match::none());
    }

    let mut glue_points = vec![0.5 * edges[loop_edge].length.finite().unwrap_or(0.0)];
    for d in pair_lengths.iter().rev() {
        let last = *glue_points.last().unwrap();
        glue_points.push(last + d);
    }
    let class = match glue_points.len() {
        1 => Example1Class::SingleBubble,
        n => Example1Class::BubbleTower(n),
    };
    Ok(Example1Match {
        class,
        glue_points,
        junction: Some(graph.vertices()[junction].id.clone()),
        loop_edge: Some(edges[loop_edge].id.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::*;
    use crate::graph::{Edge, Vertex};

    #[test]
    fn tadpole_is_single_bubble() {
        let m = recognize_example1(&tadpole(2.0)).unwrap();
        assert_eq!(m.class, Example1Class::SingleBubble);
        assert_eq!(m.glue_points, vec![1.0]);
    }

    #[test]
    fn double_bridge_is_not_in_the_family() {
        assert_eq!(recognize_example1(&double_bridge(1.0, 1.0)).unwrap().class, Example1Class::None);
    }

    #[test]
    fn line_is_line() {
        assert_eq!(recognize_example1(&line()).unwrap().class, Example1Class::Line);
    }

    #[test]
    fn tower_reconstructs_glue_points() {
        let m = recognize_example1(&bubble_tower(&[1.0, 2.0, 3.5])).unwrap();
        assert_eq!(m.class, Example1Class::BubbleTower(3));
        assert_eq!(m.glue_points, vec![1.0, 2.0, 3.5]);
        assert_eq!(m.junction.as_deref(), Some("x3"));
    }

    #[test]
    fn unequal_pair_is_rejected() {
        let mut g = bubble_tower(&[1.0, 2.0]);
        let edges: Vec<Edge> = g
            .edges()
            .iter()
            .cloned()
            .map(|mut e| {
                if e.id == "p2a" {
                    e.length = crate::graph::EdgeLength::Finite(1.5);
                }
                e
            })
            .collect();
        g = MetricGraph::new(g.vertices().to_vec(), edges);
        assert_eq!(recognize_example1(&g).unwrap().class, Example1Class::None);
    }

    #[test]
    fn star_with_three_half_lines_is_none() {
        assert_eq!(recognize_example1(&star(3)).unwrap().class, Example1Class::None);
    }

    #[test]
    fn loop_away_from_junction_on_a_single_edge_is_none() {
        // x-y is a cut-edge whose far side has no vertex at infinity.
        let g = MetricGraph::new(
            vec![Vertex::finite("x"), Vertex::finite("y"), Vertex::infinity("i1"), Vertex::infinity("i2")],
            vec![
                Edge::half_line("h1", "x", "i1"),
                Edge::half_line("h2", "x", "i2"),
                Edge::new("s", "x", "y", 1.0),
                Edge::new("l", "y", "y", 1.0),
            ],
        );
        assert_eq!(recognize_example1(&g), Err(GraphError::ConditionHFails));
    }

    #[test]
    fn pendant_violates_precondition() {
        assert_eq!(recognize_example1(&pendant(1.0)), Err(GraphError::ConditionHFails));
    }
}
