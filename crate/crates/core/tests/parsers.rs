use std::sync::Arc;

use nls_graphs::experiment::{builtin_experiment, ExperimentSpec};
use nls_graphs::function::GraphFunction;
use nls_graphs::graph::{builders, MetricGraph};
use nls_graphs::mesh::TruncatedMesh;
use proptest::prelude::*;

fn graph_seed() -> String {
    builders::fig2().to_json()
}

fn csv_seed() -> String {
    let g = builders::pendant(1.0);
    let mesh = Arc::new(TruncatedMesh::uniform(&g, 0.25, 2.0).unwrap());
    let u = GraphFunction::from_fn(mesh, |_, x| (-x).exp());
    let mut out = Vec::new();
    u.write_csv(&mut out, 4.0, 1.0).unwrap();
    String::from_utf8(out).unwrap()
}

fn spec_seed() -> String {
    serde_json::to_string(&builtin_experiment("escape_curve").unwrap()).unwrap()
}

/// Replace a byte range of `seed` with `insert`.
fn splice(seed: &str, at: usize, len: usize, insert: &str) -> String {
    let bytes = seed.as_bytes();
    let at = at % (bytes.len() + 1);
    let end = (at + len).min(bytes.len());
    let mut out = bytes[..at].to_vec();
    out.extend_from_slice(insert.as_bytes());
    out.extend_from_slice(&bytes[end..]);
    String::from_utf8_lossy(&out).into_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn graph_parser_never_panics(text in "\\PC*", at in 0usize..4000, len in 0usize..12, insert in "[\\[\\]{}\",:0-9a-z. -]{0,8}") {
        let _ = MetricGraph::from_json(&text).map(|g| g.validate());
        if let Ok(g) = MetricGraph::from_json(&splice(&graph_seed(), at, len, &insert)) {
            let _ = g.validate();
            let _ = nls_graphs::graph::check_condition_h(&g);
        }
    }

    #[test]
    fn csv_reader_never_panics(text in "\\PC*", at in 0usize..4000, len in 0usize..12, insert in "[#=,.0-9a-z\\n-]{0,8}") {
        let g = builders::pendant(1.0);
        let _ = GraphFunction::read_csv(&g, &text);
        let _ = GraphFunction::read_csv(&g, &splice(&csv_seed(), at, len, &insert));
    }

    #[test]
    fn spec_parser_never_panics(text in "\\PC*", at in 0usize..2000, len in 0usize..12, insert in "[\\[\\]{}\",:0-9a-z_. -]{0,8}") {
        let _ = ExperimentSpec::from_json(&text);
        if let Ok(spec) = ExperimentSpec::from_json(&splice(&spec_seed(), at, len, &insert)) {
            if spec.graph.file.is_none() {
                let _ = spec.graph.resolve(None);
            }
        }
    }
}

#[test]
fn seeds_parse() {
    assert_eq!(MetricGraph::from_json(&graph_seed()).unwrap(), builders::fig2());
    assert!(GraphFunction::read_csv(&builders::pendant(1.0), &csv_seed()).is_ok());
    assert!(ExperimentSpec::from_json(&spec_seed()).is_ok());
}

fn fuzz_seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), std::fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn fuzz_corpus_seeds_parse() {
    for (name, bytes) in fuzz_seeds("graph_json") {
        MetricGraph::from_json(std::str::from_utf8(&bytes).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in fuzz_seeds("function_csv") {
        let g = match bytes[0] % 3 {
            0 => builders::pendant(1.0),
            1 => builders::tadpole(2.0),
            _ => builders::fig2(),
        };
        GraphFunction::read_csv(&g, std::str::from_utf8(&bytes[1..]).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in fuzz_seeds("experiment_spec") {
        ExperimentSpec::from_json(std::str::from_utf8(&bytes).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
