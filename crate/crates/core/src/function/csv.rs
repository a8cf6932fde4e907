//! CSV dump of a graph function: one block of `edge_id,x,u` rows per edge,
//! preceded by a `#` comment line of `key=value` metadata.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use thiserror::Error;

use super::GraphFunction;
use crate::graph::MetricGraph;
use crate::mesh::{MeshError, TruncatedMesh};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("metadata: {0}")]
    Meta(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("edge '{0}' has no rows")]
    MissingEdge(String),
    #[error("unknown edge '{0}'")]
    UnknownEdge(String),
    #[error("values disagree at vertex '{0}'")]
    Discontinuous(String),
    #[error("half-line '{0}' does not vanish at its far end")]
    NonzeroFarEnd(String),
    #[error("file was written for graph {file}, not {graph}")]
    GraphMismatch { file: String, graph: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Header metadata. Absent keys are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvMeta {
    pub graph_hash: Option<String>,
    pub h: Option<f64>,
    pub truncation: Option<f64>,
    pub p: Option<f64>,
    pub mu: Option<f64>,
    pub energy: Option<f64>,
}

fn parse_meta(text: &str) -> Result<CsvMeta, CsvError> {
    let mut meta = CsvMeta::default();
    for line in text.lines().filter_map(|l| l.trim_start().strip_prefix('#')) {
        for pair in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| CsvError::Meta(format!("expected key=value, got '{pair}'")))?;
            let number = || value.trim().parse::<f64>().map_err(|_| CsvError::Meta(format!("bad number for {key}: '{value}'")));
            match key.trim() {
                "graph_hash" => meta.graph_hash = Some(value.trim().to_string()),
                "h" => meta.h = Some(number()?),
                "L" => meta.truncation = Some(number()?),
                "p" => meta.p = Some(number()?),
                "mu" => meta.mu = Some(number()?),
                "energy" => meta.energy = Some(number()?),
                _ => {}
            }
        }
    }
    Ok(meta)
}

impl GraphFunction {
    /// Write the function with a metadata line recording `p`, `mu` and the energy.
    pub fn write_csv<W: Write>(&self, mut out: W, p: f64, mu: f64) -> Result<(), CsvError> {
        let mesh = self.mesh();
        writeln!(
            out,
            "# graph_hash={},h={},L={},p={},mu={},energy={}",
            mesh.graph().content_hash(),
            mesh.h(),
            mesh.truncation(),
            p,
            mu,
            self.energy(p)
        )?;
        let mut w = ::csv::Writer::from_writer(out);
        w.write_record(["edge_id", "x", "u"])?;
        for (k, edge) in mesh.graph().edges().iter().enumerate() {
            for (x, u) in self.edge_samples(k) {
                w.write_record([edge.id.as_str(), &format!("{x:e}"), &format!("{u:e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Parse a dump back onto `graph`. The mesh is rebuilt from the abscissae.
    pub fn read_csv(graph: &MetricGraph, text: &str) -> Result<(GraphFunction, CsvMeta), CsvError> {
        let meta = parse_meta(text)?;
        if let Some(hash) = &meta.graph_hash {
            let own = graph.content_hash();
            if *hash != own {
                return Err(CsvError::GraphMismatch { file: hash.clone(), graph: own });
            }
        }
        let mut reader = ::csv::ReaderBuilder::new().comment(Some(b'#')).trim(::csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["edge_id", "x", "u"] {
            return Err(CsvError::Row { row: 1, message: "expected columns edge_id,x,u".into() });
        }

        let mut samples: Vec<Vec<(f64, f64)>> = vec![Vec::new(); graph.edges().len()];
        let index: HashMap<&str, usize> = graph.edges().iter().enumerate().map(|(k, e)| (e.id.as_str(), k)).collect();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let bad = |message: String| CsvError::Row { row: row + 2, message };
            if record.len() != 3 {
                return Err(bad(format!("expected 3 fields, got {}", record.len())));
            }
            let k = *index.get(&record[0]).ok_or_else(|| CsvError::UnknownEdge(record[0].to_string()))?;
            let x: f64 = record[1].parse().map_err(|_| bad(format!("bad abscissa '{}'", &record[1])))?;
            let u: f64 = record[2].parse().map_err(|_| bad(format!("bad value '{}'", &record[2])))?;
            if !x.is_finite() || !u.is_finite() {
                return Err(bad("non-finite entry".into()));
            }
            samples[k].push((x, u));
        }
        for (k, s) in samples.iter().enumerate() {
            if s.is_empty() {
                return Err(CsvError::MissingEdge(graph.edges()[k].id.clone()));
            }
        }

        let truncation = match meta.truncation {
            Some(l) => l,
            None => graph
                .edges()
                .iter()
                .zip(&samples)
                .filter(|(e, _)| e.length.is_infinite())
                .map(|(_, s)| s.last().unwrap().0)
                .fold(0.0, f64::max),
        };
        let coords = samples.iter().map(|s| s.iter().map(|p| p.0).collect()).collect();
        let mesh = Arc::new(TruncatedMesh::from_coordinates(graph, truncation, coords)?);

        let scale = samples.iter().flatten().fold(0.0f64, |m, p| m.max(p.1.abs()));
        let tol = 1e-9 * scale + 1e-300;
        let mut values = vec![f64::NAN; mesh.node_count()];
        for (k, (e, s)) in mesh.edges().iter().zip(&samples).enumerate() {
            for (i, &(_, u)) in s.iter().enumerate() {
                let n = e.node(i);
                if n >= mesh.free_count() {
                    if u.abs() > tol {
                        return Err(CsvError::NonzeroFarEnd(graph.edges()[k].id.clone()));
                    }
                    continue;
                }
                if values[n].is_nan() {
                    values[n] = u;
                } else if (values[n] - u).abs() > tol {
                    let edge = &graph.edges()[k];
                    let vertex = if i == 0 { &edge.from } else { &edge.to };
                    return Err(CsvError::Discontinuous(vertex.clone()));
                }
            }
        }
        values.iter_mut().filter(|v| v.is_nan()).for_each(|v| *v = 0.0);
        let f = GraphFunction::from_values(mesh, values).expect("length matches mesh");
        Ok((f, meta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders;

    #[test]
    fn round_trip() {
        let g = builders::pendant(1.0);
        let mesh = Arc::new(TruncatedMesh::uniform(&g, 0.1, 3.0).unwrap());
        let u = GraphFunction::from_fn(mesh, |k, x| (k as f64 + 1.0) * (3.0 - x).max(0.0) * 0.1 + 0.3);
        let mut buf = Vec::new();
        u.write_csv(&mut buf, 4.0, 1.0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (back, meta) = GraphFunction::read_csv(&g, &text).unwrap();
        assert_eq!(back.values(), u.values());
        assert_eq!(meta.truncation, Some(3.0));
        assert_eq!(meta.p, Some(4.0));
        assert_eq!(meta.energy, Some(u.energy(4.0)));
    }

    #[test]
    fn discontinuity_is_reported() {
        let g = builders::segment(1.0);
        let text = "edge_id,x,u\ne,0,1\ne,1,2\n";
        assert!(GraphFunction::read_csv(&g, text).is_ok());
        let g = builders::line();
        let text = "edge_id,x,u\nleft,0,1\nleft,2,0\nright,0,0.5\nright,2,0\n";
        assert!(matches!(GraphFunction::read_csv(&g, text), Err(CsvError::Discontinuous(_))));
    }

    #[test]
    fn wrong_graph_is_rejected() {
        let text = format!("# graph_hash={}\nedge_id,x,u\ne,0,1\ne,1,2\n", builders::line().content_hash());
        assert!(matches!(GraphFunction::read_csv(&builders::segment(1.0), &text), Err(CsvError::GraphMismatch { .. })));
    }

    #[test]
    fn missing_edge_and_garbage() {
        let g = builders::line();
        assert!(matches!(GraphFunction::read_csv(&g, "edge_id,x,u\nleft,0,1\nleft,2,0\n"), Err(CsvError::MissingEdge(_))));
        assert!(GraphFunction::read_csv(&g, "edge_id,x,u\nleft,zero,1\n").is_err());
        assert!(GraphFunction::read_csv(&g, "a,b\n1,2\n").is_err());
    }
}
