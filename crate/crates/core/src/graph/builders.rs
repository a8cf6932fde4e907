//! Constructors for the named graphs used throughout the crate.

use super::{Edge, MetricGraph, Vertex};

/// Two half-lines joined at `x1`: the real line.
pub fn line() -> MetricGraph {
    MetricGraph::new(
        vec![Vertex::finite("x1"), Vertex::infinity("inf_left"), Vertex::infinity("inf_right")],
        vec![Edge::half_line("left", "x1", "inf_left"), Edge::half_line("right", "x1", "inf_right")],
    )
}

/// Two half-lines and a self-loop of length `loop_length`, all at `x1`.
pub fn tadpole(loop_length: f64) -> MetricGraph {
    let mut g = line();
    g.edges.push(Edge::new("loop", "x1", "x1", loop_length));
    g
}

/// The line with the points `±a_j` glued pairwise, for `0 < a_1 < ... < a_n`.
///
/// Half-lines sit at `x_n`; consecutive `x_j`, `x_{j-1}` are joined by two
/// edges of length `a_j - a_{j-1}`; `x_1` carries a loop of length `2 a_1`.
pub fn bubble_tower(glue_points: &[f64]) -> MetricGraph {
    assert!(!glue_points.is_empty(), "bubble tower needs at least one glue point");
    let n = glue_points.len();
    let mut vertices: Vec<Vertex> = (1..=n).map(|j| Vertex::finite(format!("x{j}"))).collect();
    vertices.push(Vertex::infinity("inf_left"));
    vertices.push(Vertex::infinity("inf_right"));
    let top = format!("x{n}");
    let mut edges = vec![Edge::half_line("left", &top, "inf_left"), Edge::half_line("right", &top, "inf_right")];
    for j in (2..=n).rev() {
        let len = glue_points[j - 1] - glue_points[j - 2];
        for side in ["a", "b"] {
            edges.push(Edge::new(format!("p{j}{side}"), format!("x{j}"), format!("x{}", j - 1), len));
        }
    }
    edges.push(Edge::new("loop", "x1", "x1", 2.0 * glue_points[0]));
    MetricGraph::new(vertices, edges)
}

/// Two half-lines with two parallel bridges of the given lengths in between.
pub fn double_bridge(first: f64, second: f64) -> MetricGraph {
    MetricGraph::new(
        vec![
            Vertex::finite("v1"),
            Vertex::finite("v2"),
            Vertex::infinity("inf_left"),
            Vertex::infinity("inf_right"),
        ],
        vec![
            Edge::half_line("left", "v1", "inf_left"),
            Edge::new("bridge1", "v1", "v2", first),
            Edge::new("bridge2", "v1", "v2", second),
            Edge::half_line("right", "v2", "inf_right"),
        ],
    )
}

/// The line with a pendant of length `ell` at the origin. The pendant runs
/// from the junction `o` (coordinate 0) to the free tip.
pub fn pendant(ell: f64) -> MetricGraph {
    MetricGraph::new(
        vec![
            Vertex::finite("o"),
            Vertex::finite("tip"),
            Vertex::infinity("inf_left"),
            Vertex::infinity("inf_right"),
        ],
        vec![
            Edge::half_line("left", "o", "inf_left"),
            Edge::half_line("right", "o", "inf_right"),
            Edge::new("pendant", "o", "tip", ell),
        ],
    )
}

/// Five half-lines and thirteen unit-length bounded edges, one of them a
/// self-loop: the general-network example.
pub fn fig2() -> MetricGraph {
    let finite = ["n1", "n3", "n4", "n6", "n7", "n8", "n9"];
    let infinite = ["n2", "n5", "n10", "n11", "n12"];
    let mut vertices: Vec<Vertex> = finite.iter().map(|v| Vertex::finite(*v)).collect();
    vertices.extend(infinite.iter().map(|v| Vertex::infinity(*v)));
    let bounded = [
        ("e1_3", "n1", "n3"),
        ("e1_4", "n1", "n4"),
        ("e3_4", "n3", "n4"),
        ("e3_6", "n3", "n6"),
        ("e6_7a", "n6", "n7"),
        ("e6_7b", "n6", "n7"),
        ("e6_7c", "n6", "n7"),
        ("loop3", "n3", "n3"),
        ("e6_8a", "n6", "n8"),
        ("e6_8b", "n6", "n8"),
        ("e7_8", "n7", "n8"),
        ("e8_9", "n8", "n9"),
        ("e7_9", "n7", "n9"),
    ];
    let mut edges: Vec<Edge> = bounded.iter().map(|(id, a, b)| Edge::new(*id, *a, *b, 1.0)).collect();
    for (id, a, b) in [
        ("h1", "n1", "n2"),
        ("h4", "n4", "n5"),
        ("h9", "n9", "n12"),
        ("h7a", "n7", "n10"),
        ("h7b", "n7", "n11"),
    ] {
        edges.push(Edge::half_line(id, a, b));
    }
    MetricGraph::new(vertices, edges)
}

/// Compact triangle with the given side lengths.
pub fn triangle(a: f64, b: f64, c: f64) -> MetricGraph {
    MetricGraph::new(
        vec![Vertex::finite("a"), Vertex::finite("b"), Vertex::finite("c")],
        vec![Edge::new("ab", "a", "b", a), Edge::new("bc", "b", "c", b), Edge::new("ca", "c", "a", c)],
    )
}

/// Star with `k` half-lines at one vertex.
pub fn star(k: usize) -> MetricGraph {
    let mut vertices = vec![Vertex::finite("o")];
    let mut edges = Vec::new();
    for i in 0..k {
        vertices.push(Vertex::infinity(format!("inf{i}")));
        edges.push(Edge::half_line(format!("h{i}"), "o", format!("inf{i}")));
    }
    MetricGraph::new(vertices, edges)
}

/// A single bounded segment `[0, length]`.
pub fn segment(length: f64) -> MetricGraph {
    MetricGraph::new(vec![Vertex::finite("a"), Vertex::finite("b")], vec![Edge::new("e", "a", "b", length)])
}

/// A single half-line `[0, +inf)` starting at `o`.
pub fn half_line() -> MetricGraph {
    MetricGraph::new(vec![Vertex::finite("o"), Vertex::infinity("inf")], vec![Edge::half_line("h", "o", "inf")])
}
