//! Metric graphs: a finite connected multigraph whose edges are bounded
//! intervals or half-lines, together with the topological queries used to
//! decide whether ground states can exist.

mod bridges;
pub mod builders;
mod condition;
mod example1;
mod json;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bridges::{cut_edges, cut_edges_brute_force};
pub use condition::{check_condition_h, ConditionH};
pub use example1::{recognize_example1, Example1Class, Example1Match};
pub use json::GraphParseError;

/// Relative tolerance under which two user-specified edge lengths count as equal.
pub const LENGTH_EQ_RTOL: f64 = 1e-12;

/// Length of an edge: a bounded interval `[0, l]` or a half-line `[0, +inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeLength {
    Finite(f64),
    Infinite,
}

impl EdgeLength {
    pub fn is_infinite(self) -> bool {
        matches!(self, EdgeLength::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            EdgeLength::Finite(l) => Some(l),
            EdgeLength::Infinite => None,
        }
    }
}

impl fmt::Display for EdgeLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLength::Finite(l) => write!(f, "{l}"),
            EdgeLength::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    pub at_infinity: bool,
}

impl Vertex {
    pub fn finite(id: impl Into<String>) -> Self {
        Vertex { id: id.into(), at_infinity: false }
    }

    pub fn infinity(id: impl Into<String>) -> Self {
        Vertex { id: id.into(), at_infinity: true }
    }
}

/// An edge with coordinate `x = 0` at `from` and `x = length` at `to`.
/// Half-lines attach at `from`; `to` is their vertex at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: EdgeLength,
}

impl Edge {
    pub fn new(id: impl Into<String>, from: impl Into<String>, to: impl Into<String>, length: f64) -> Self {
        Edge { id: id.into(), from: from.into(), to: to.into(), length: EdgeLength::Finite(length) }
    }

    pub fn half_line(id: impl Into<String>, from: impl Into<String>, to: impl Into<String>) -> Self {
        Edge { id: id.into(), from: from.into(), to: to.into(), length: EdgeLength::Infinite }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

/// The rule a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    NoEdges,
    DuplicateVertexId,
    DuplicateEdgeId,
    UnknownEndpoint,
    NonPositiveLength,
    HalfLineEndpoints,
    FiniteEdgeAtInfinity,
    InfinityDegree,
    Disconnected,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Rule::NoEdges => "a metric graph needs at least one edge",
            Rule::DuplicateVertexId => "vertex ids must be unique",
            Rule::DuplicateEdgeId => "edge ids must be unique",
            Rule::UnknownEndpoint => "edge endpoints must name existing vertices",
            Rule::NonPositiveLength => "finite edge lengths must be positive",
            Rule::HalfLineEndpoints => {
                "a half-line starts at an ordinary vertex and ends (at x = +inf) at a vertex at infinity"
            }
            Rule::FiniteEdgeAtInfinity => "a bounded edge cannot touch a vertex at infinity",
            Rule::InfinityDegree => "every vertex at infinity has degree one",
            Rule::Disconnected => "the graph must be connected",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// Id of the offending vertex or edge (empty for graph-wide rules).
    pub subject: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.subject.is_empty() {
            write!(f, "{}", self.rule)
        } else {
            write!(f, "'{}': {}", self.subject, self.rule)
        }
    }
}

/// List of violated invariants; empty means the graph is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: Rule, subject: &str) {
        self.violations.push(Violation { rule, subject: subject.to_string() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("graph does not satisfy the no-bottleneck condition")]
    ConditionHFails,
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("unknown edge '{0}'")]
    UnknownEdge(String),
    #[error("{0}")]
    Construction(String),
}

/// Total length of a graph: finite sum, or infinite when a half-line is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TotalLength {
    Finite(f64),
    Infinite,
}

/// A metric graph. Construction does not validate; use [`MetricGraph::validate`]
/// or any operation that requires validity.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Index-resolved view of a valid graph.
#[derive(Debug, Clone)]
pub(crate) struct Topology {
    pub ends: Vec<(usize, usize)>,
    pub incident: Vec<Vec<usize>>,
}

impl MetricGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        MetricGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn half_line_count(&self) -> usize {
        self.edges.iter().filter(|e| e.length.is_infinite()).count()
    }

    pub fn infinity_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.at_infinity).count()
    }

    pub fn is_compact(&self) -> bool {
        self.half_line_count() == 0
    }

    /// Degree of a vertex, counting a self-loop twice.
    pub fn degree(&self, id: &str) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.from == id) + usize::from(e.to == id))
            .sum()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.edges.is_empty() {
            report.push(Rule::NoEdges, "");
        }

        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id.as_str(), i).is_some() {
                report.push(Rule::DuplicateVertexId, &v.id);
            }
        }
        let mut seen_edges: HashMap<&str, ()> = HashMap::new();
        let mut degree = vec![0usize; self.vertices.len()];
        let mut resolved = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if seen_edges.insert(e.id.as_str(), ()).is_some() {
                report.push(Rule::DuplicateEdgeId, &e.id);
            }
            let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) else {
                report.push(Rule::UnknownEndpoint, &e.id);
                continue;
            };
            degree[a] += 1;
            degree[b] += 1;
            resolved.push((a, b));
            let (from_inf, to_inf) = (self.vertices[a].at_infinity, self.vertices[b].at_infinity);
            match e.length {
                EdgeLength::Finite(l) => {
                    if !(l > 0.0) || !l.is_finite() {
                        report.push(Rule::NonPositiveLength, &e.id);
                    }
                    if from_inf || to_inf {
                        report.push(Rule::FiniteEdgeAtInfinity, &e.id);
                    }
                }
                EdgeLength::Infinite => {
                    if from_inf || !to_inf {
                        report.push(Rule::HalfLineEndpoints, &e.id);
                    }
                }
            }
        }
        for (v, &d) in self.vertices.iter().zip(&degree) {
            if v.at_infinity && d != 1 {
                report.push(Rule::InfinityDegree, &v.id);
            }
        }
        if !self.vertices.is_empty() && !connected(self.vertices.len(), &resolved, None) {
            report.push(Rule::Disconnected, "");
        }
        report
    }

    pub(crate) fn topology(&self) -> Result<Topology, GraphError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(GraphError::Invalid(report));
        }
        Ok(self.topology_unchecked())
    }

    /// Index view; only meaningful when endpoints resolve.
    pub(crate) fn topology_unchecked(&self) -> Topology {
        let index: HashMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let ends: Vec<(usize, usize)> =
            self.edges.iter().map(|e| (index[e.from.as_str()], index[e.to.as_str()])).collect();
        let mut incident = vec![Vec::new(); self.vertices.len()];
        for (k, &(a, b)) in ends.iter().enumerate() {
            incident[a].push(k);
            if b != a {
                incident[b].push(k);
            }
        }
        Topology { ends, incident }
    }

    /// Sum of the bounded edge lengths, or infinite when a half-line is present.
    pub fn total_length(&self) -> TotalLength {
        if self.edges.iter().any(|e| e.length.is_infinite()) {
            return TotalLength::Infinite;
        }
        TotalLength::Finite(self.edges.iter().filter_map(|e| e.length.finite()).sum())
    }

    /// Short stable digest of the graph's canonical JSON form.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Connectivity of a multigraph given as resolved endpoint pairs, optionally
/// ignoring one edge.
pub(crate) fn connected(n: usize, ends: &[(usize, usize)], skip: Option<usize>) -> bool {
    components(n, ends, skip).iter().all(|&c| c == 0)
}

/// Component label per vertex.
pub(crate) fn components(n: usize, ends: &[(usize, usize)], skip: Option<usize>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (k, &(a, b)) in ends.iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[v] = label[r];
    }
    out
}
