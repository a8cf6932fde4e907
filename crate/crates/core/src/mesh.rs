//! P1 meshes on metric graphs with half-lines truncated to `[0, L]`.
//!
//! Node numbering: one node per finite vertex, then the interior nodes of
//! each edge in a contiguous run, then one fixed far node per half-line.
//! Far nodes carry the homogeneous Dirichlet value.

use thiserror::Error;

use crate::graph::{EdgeLength, GraphError, MetricGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("mesh width must be positive, got {0}")]
    BadWidth(f64),
    #[error("truncation length must be positive, got {0}")]
    BadTruncation(f64),
    #[error("edge '{edge}': {message}")]
    BadCoordinates { edge: String, message: String },
}

/// Mesh of a single edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMesh {
    /// Node abscissae, `0 = x_0 < ... < x_n = length` (or `L` for half-lines).
    pub coords: Vec<f64>,
    pub start_node: usize,
    pub end_node: usize,
    /// Global index of `coords[1]`; interior nodes are consecutive.
    pub first_interior: usize,
    pub half_line: bool,
}

impl EdgeMesh {
    pub fn intervals(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn interior_count(&self) -> usize {
        self.coords.len() - 2
    }

    /// Global node of the `i`-th abscissa.
    pub fn node(&self, i: usize) -> usize {
        if i == 0 {
            self.start_node
        } else if i + 1 == self.coords.len() {
            self.end_node
        } else {
            self.first_interior + i - 1
        }
    }

    pub fn length(&self) -> f64 {
        *self.coords.last().unwrap()
    }
}

/// One mesh interval: nodes `a`, `b` and width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: usize,
    pub b: usize,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMesh {
    graph: MetricGraph,
    truncation: f64,
    h: f64,
    edges: Vec<EdgeMesh>,
    vertex_node: Vec<Option<usize>>,
    vertex_count: usize,
    free: usize,
    total: usize,
    intervals: Vec<Interval>,
}

impl TruncatedMesh {
    /// Uniform mesh: each edge gets `max(ceil(len/h), 2)` equal intervals.
    pub fn uniform(graph: &MetricGraph, h: f64, truncation: f64) -> Result<Self, MeshError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(MeshError::BadWidth(h));
        }
        let coords = graph
            .edges()
            .iter()
            .map(|e| {
                let len = e.length.finite().unwrap_or(truncation);
                let n = ((len / h) * (1.0 - 1e-12)).ceil().max(2.0) as usize;
                (0..=n).map(|i| if i == n { len } else { len * i as f64 / n as f64 }).collect()
            })
            .collect();
        Self::from_coordinates(graph, truncation, coords)
    }

    /// Mesh from explicit per-edge abscissae, in edge order.
    pub fn from_coordinates(graph: &MetricGraph, truncation: f64, coords: Vec<Vec<f64>>) -> Result<Self, MeshError> {
        let topo = graph.topology()?;
        if graph.half_line_count() > 0 && !(truncation > 0.0 && truncation.is_finite()) {
            return Err(MeshError::BadTruncation(truncation));
        }
        if coords.len() != graph.edges().len() {
            return Err(MeshError::BadCoordinates {
                edge: String::new(),
                message: format!("expected {} coordinate lists, got {}", graph.edges().len(), coords.len()),
            });
        }

        let mut vertex_node = vec![None; graph.vertices().len()];
        let mut next = 0;
        for (v, vertex) in graph.vertices().iter().enumerate() {
            if !vertex.at_infinity {
                vertex_node[v] = Some(next);
                next += 1;
            }
        }
        let vertex_count = next;

        let mut edges = Vec::with_capacity(coords.len());
        let mut h: f64 = 0.0;
        for ((edge, &(from, to)), mut xs) in graph.edges().iter().zip(&topo.ends).zip(coords) {
            let bad = |message: String| MeshError::BadCoordinates { edge: edge.id.clone(), message };
            let len = match edge.length {
                EdgeLength::Finite(l) => l,
                EdgeLength::Infinite => truncation,
            };
            if xs.len() < 2 {
                return Err(bad("needs at least two nodes".into()));
            }
            if xs[0].abs() > 1e-9 * len {
                return Err(bad(format!("first abscissa {} is not 0", xs[0])));
            }
            let last = *xs.last().unwrap();
            if (last - len).abs() > 1e-9 * len {
                return Err(bad(format!("last abscissa {last} does not match length {len}")));
            }
            xs[0] = 0.0;
            *xs.last_mut().unwrap() = len;
            if edge.is_loop() && xs.len() < 3 {
                return Err(bad("a loop needs an interior node".into()));
            }
            for w in xs.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(bad("abscissae must be strictly increasing".into()));
                }
                h = h.max(w[1] - w[0]);
            }
            let interior = xs.len() - 2;
            edges.push(EdgeMesh {
                coords: xs,
                start_node: vertex_node[from].expect("half-lines start at a finite vertex"),
                end_node: vertex_node[to].unwrap_or(usize::MAX),
                first_interior: next,
                half_line: edge.length.is_infinite(),
            });
            next += interior;
        }
        let free = next;
        for e in edges.iter_mut().filter(|e| e.half_line) {
            e.end_node = next;
            next += 1;
        }

        let intervals = edges
            .iter()
            .flat_map(|e| {
                (0..e.intervals()).map(move |i| Interval {
                    a: e.node(i),
                    b: e.node(i + 1),
                    width: e.coords[i + 1] - e.coords[i],
                })
            })
            .collect();

        Ok(TruncatedMesh {
            graph: graph.clone(),
            truncation,
            h,
            edges,
            vertex_node,
            vertex_count,
            free,
            total: next,
            intervals,
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Largest interval width.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn edges(&self) -> &[EdgeMesh] {
        &self.edges
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Node of a finite vertex, by vertex index.
    pub fn vertex_node(&self, vertex: usize) -> Option<usize> {
        self.vertex_node[vertex]
    }

    /// Number of finite vertices, which occupy nodes `0..vertex_count`.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Nodes `0..free_count` are unknowns; the rest are fixed at zero.
    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn node_count(&self) -> usize {
        self.total
    }

    /// Length of the truncated graph.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(EdgeMesh::length).sum()
    }

    /// Diagonal of the lumped mass matrix.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.total];
        for iv in &self.intervals {
            m[iv.a] += 0.5 * iv.width;
            m[iv.b] += 0.5 * iv.width;
        }
        m
    }

    /// Product with the consistent mass matrix.
    pub fn mass_apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.total];
        for iv in &self.intervals {
            let (x, y) = (u[iv.a], u[iv.b]);
            out[iv.a] += iv.width / 6.0 * (2.0 * x + y);
            out[iv.b] += iv.width / 6.0 * (x + 2.0 * y);
        }
        out
    }

    /// Product with the stiffness matrix.
    pub fn stiffness_apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.total];
        for iv in &self.intervals {
            let d = (u[iv.b] - u[iv.a]) / iv.width;
            out[iv.a] -= d;
            out[iv.b] += d;
        }
        out
    }

    /// Nodal graph distance from a set of seeds `(node, initial distance)`.
    pub fn distances(&self, seeds: &[(usize, f64)]) -> Vec<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        #[derive(PartialEq, PartialOrd)]
        struct Key(f64);
        impl Eq for Key {}
        impl Ord for Key {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&other.0)
            }
        }

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.total];
        for iv in &self.intervals {
            adjacency[iv.a].push((iv.b, iv.width));
            adjacency[iv.b].push((iv.a, iv.width));
        }
        let mut dist = vec![f64::INFINITY; self.total];
        let mut heap = BinaryHeap::new();
        for &(n, d) in seeds {
            if d < dist[n] {
                dist[n] = d;
                heap.push(Reverse((Key(d), n)));
            }
        }
        while let Some(Reverse((Key(d), n))) = heap.pop() {
            if d > dist[n] {
                continue;
            }
            for &(m, w) in &adjacency[n] {
                if d + w < dist[m] {
                    dist[m] = d + w;
                    heap.push(Reverse((Key(d + w), m)));
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders;

    #[test]
    fn line_numbering() {
        let m = TruncatedMesh::uniform(&builders::line(), 0.5, 2.0).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.free_count(), 1 + 3 + 3);
        assert_eq!(m.node_count(), 9);
        let e = &m.edges()[0];
        assert_eq!(e.node(0), 0);
        assert_eq!(e.node(1), 1);
        assert_eq!(e.node(4), 7);
        assert_eq!(m.edges()[1].node(4), 8);
        assert_eq!(m.total_length(), 4.0);
    }

    #[test]
    fn short_edges_get_two_intervals() {
        let m = TruncatedMesh::uniform(&builders::tadpole(0.01), 0.1, 1.0).unwrap();
        let lp = m.edges().iter().find(|e| !e.half_line).unwrap();
        assert_eq!(lp.intervals(), 2);
        assert_eq!(lp.start_node, lp.end_node);
    }

    #[test]
    fn width_never_exceeds_h() {
        let m = TruncatedMesh::uniform(&builders::fig2(), 0.3, 5.0).unwrap();
        assert!(m.h() <= 0.3);
        assert!(m.intervals().iter().all(|iv| iv.width <= 0.3 + 1e-15));
    }

    #[test]
    fn rejects_bad_coordinates() {
        let g = builders::segment(1.0);
        assert!(TruncatedMesh::from_coordinates(&g, 1.0, vec![vec![0.0, 0.7, 0.5, 1.0]]).is_err());
        assert!(TruncatedMesh::from_coordinates(&g, 1.0, vec![vec![0.0, 0.9]]).is_err());
        assert!(TruncatedMesh::uniform(&g, 0.0, 1.0).is_err());
    }

    #[test]
    fn distances_on_a_star() {
        let m = TruncatedMesh::uniform(&builders::star(3), 1.0, 4.0).unwrap();
        let d = m.distances(&[(m.edges()[0].node(2), 0.0)]);
        assert_eq!(d[m.edges()[1].node(3)], 5.0);
        assert_eq!(d[0], 2.0);
    }

    #[test]
    fn mass_matrix_integrates_constants() {
        let m = TruncatedMesh::uniform(&builders::triangle(1.0, 2.0, 3.0), 0.4, 1.0).unwrap();
        let ones = vec![1.0; m.node_count()];
        let total: f64 = m.mass_apply(&ones).iter().sum();
        assert!((total - 6.0).abs() < 1e-12);
        assert!(m.stiffness_apply(&ones).iter().all(|x| x.abs() < 1e-12));
    }
}
