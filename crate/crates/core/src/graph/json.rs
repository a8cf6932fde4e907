//! Graph description files. See `docs/graph-format.md` for the grammar.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Edge, EdgeLength, MetricGraph, Vertex};

/// Syntax or schema error with a 1-based position in the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct GraphParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for GraphParseError {
    fn from(err: serde_json::Error) -> Self {
        let message = err.to_string();
        // serde_json appends " at line X column Y"; keep only the description
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        GraphParseError { line: err.line(), column: err.column(), message }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
    #[serde(default)]
    infinity: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    id: String,
    from: String,
    to: String,
    #[serde(serialize_with = "write_length", deserialize_with = "read_length")]
    length: EdgeLength,
}

fn write_length<S: Serializer>(length: &EdgeLength, s: S) -> Result<S::Ok, S::Error> {
    match length {
        EdgeLength::Finite(l) => s.serialize_f64(*l),
        EdgeLength::Infinite => s.serialize_str("inf"),
    }
}

fn read_length<'de, D: Deserializer<'de>>(d: D) -> Result<EdgeLength, D::Error> {
    struct LengthVisitor;

    impl Visitor<'_> for LengthVisitor {
        type Value = EdgeLength;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number or the string \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<EdgeLength, E> {
            Ok(EdgeLength::Finite(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<EdgeLength, E> {
            Ok(EdgeLength::Finite(v as f64))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<EdgeLength, E> {
            Ok(EdgeLength::Finite(v as f64))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<EdgeLength, E> {
            if v == "inf" {
                Ok(EdgeLength::Infinite)
            } else {
                Err(E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
    }

    d.deserialize_any(LengthVisitor)
}

impl MetricGraph {
    /// Parse a graph description. Only syntax and schema are checked here;
    /// call [`MetricGraph::validate`] for the graph invariants.
    pub fn from_json(text: &str) -> Result<MetricGraph, GraphParseError> {
        let file: GraphFile = serde_json::from_str(text)?;
        let vertices = file.vertices.into_iter().map(|v| Vertex { id: v.id, at_infinity: v.infinity }).collect();
        let edges = file
            .edges
            .into_iter()
            .map(|e| Edge { id: e.id, from: e.from, to: e.to, length: e.length })
            .collect();
        Ok(MetricGraph::new(vertices, edges))
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self
                .vertices()
                .iter()
                .map(|v| VertexRecord { id: v.id.clone(), infinity: v.at_infinity })
                .collect(),
            edges: self
                .edges()
                .iter()
                .map(|e| EdgeRecord { id: e.id.clone(), from: e.from.clone(), to: e.to.clone(), length: e.length })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialisation cannot fail")
    }
}
