use super::*;
use crate::graph::Example1Class;

fn small(mut spec: ExperimentSpec) -> ExperimentSpec {
    spec.grid.h = vec![0.05];
    if spec.kind == ExperimentKind::Minimize {
        spec.grid.truncation = spec.grid.truncation.iter().map(|l| l.min(20.0)).collect();
    }
    spec
}

#[test]
fn minimal_spec_takes_defaults() {
    let s = ExperimentSpec::from_json(r#"{"name": "t", "graph": {"builtin": "tadpole"}}"#).unwrap();
    assert_eq!(s.kind, ExperimentKind::Minimize);
    assert_eq!(s.grid, Grid::default());
    assert_eq!(s.graph.resolve(None).unwrap(), builders::tadpole(2.0));
}

#[test]
fn spec_round_trips() {
    for name in BUILTIN_EXPERIMENTS {
        let s = builtin_experiment(name).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(ExperimentSpec::from_json(&text).unwrap(), s, "{name}");
    }
    assert!(builtin_experiment("nothing").is_none());
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        r#"{"name": "t", "graph": {"builtin": "tadpole"}, "extra": 1}"#,
        r#"{"name": "", "graph": {"builtin": "line"}}"#,
        r#"{"name": "a b", "graph": {"builtin": "line"}}"#,
        r#"{"name": "t", "graph": {}}"#,
        r#"{"name": "t", "graph": {"builtin": "line", "file": "g.json"}}"#,
        r#"{"name": "t", "graph": {"builtin": "line", "lengths": [1]}}"#,
        r#"{"name": "t", "graph": {"builtin": "double_bridge", "lengths": [1]}}"#,
        r#"{"name": "t", "graph": {"builtin": "bubble_tower", "lengths": [2, 1]}}"#,
        r#"{"name": "t", "graph": {"builtin": "tadpole", "lengths": [-1]}}"#,
        r#"{"name": "t", "graph": {"builtin": "heptagon"}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"p": [6]}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"h": []}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"L": [0]}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"seeds": []}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"ell": [1]}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"shifts": [1]}}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "kind": "escape_curve"}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "perturbation": -1}"#,
        r#"{"name": "t", "graph": {"builtin": "line"}, "max_iterations": 0}"#,
        "[1, 2",
    ];
    for text in bad {
        assert!(ExperimentSpec::from_json(text).is_err(), "{text}");
    }
}

#[test]
fn grid_order_varies_truncation_fastest() {
    let s = ExperimentSpec::from_json(r#"{"name": "t", "graph": {"builtin": "line"}, "grid": {"mu": [1, 2], "L": [10, 20]}}"#).unwrap();
    let pts = s.points();
    let got: Vec<(f64, f64)> = pts.iter().map(|r| (r.mu, r.truncation)).collect();
    assert_eq!(got, [(1.0, 10.0), (1.0, 20.0), (2.0, 10.0), (2.0, 20.0)]);
}

#[test]
fn continuation_chains_by_truncation() {
    let mut s = builtin_experiment("double_bridge_sweep").unwrap();
    s.grid.truncation = vec![40.0, 20.0];
    s.grid.seeds = vec![0, 1];
    let pts = s.points();
    assert_eq!(chains(&s, &pts), vec![vec![1, 0], vec![3, 2]]);
    s.continuation = false;
    assert_eq!(chains(&s, &pts).len(), 4);
}

#[test]
fn corpus_entries_validate_and_round_trip() {
    let c = corpus();
    for e in &c {
        assert!(e.graph.validate().is_valid(), "{}", e.name);
        assert_eq!(MetricGraph::from_json(&e.graph.to_json()).unwrap(), e.graph, "{}", e.name);
    }
    let fig2 = &c.iter().find(|e| e.name == "fig2").unwrap().graph;
    assert_eq!(fig2.half_line_count(), 5);
    assert_eq!(fig2.edges().len() - 5, 13);
    assert_eq!(fig2.edges().iter().filter(|e| e.is_loop()).count(), 1);
    let pendant = &c.iter().find(|e| e.name == "pendant").unwrap().graph;
    assert!(crate::rearrangement::pendant_layout(pendant).is_some());
    let tower = &c.iter().find(|e| e.name == "bubble_tower").unwrap().graph;
    assert_eq!(crate::graph::recognize_example1(tower).unwrap().class, Example1Class::BubbleTower(2));
}

#[test]
fn pendant_sweep_decreases_in_length() {
    let spec = small(builtin_experiment("pendant_sweep").unwrap());
    let r = run_experiment(&spec).unwrap();
    let e: Vec<f64> = r.energies().into_iter().map(Option::unwrap).collect();
    assert_eq!(e.len(), 3);
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    assert_eq!(r.tables.energy_vs_ell.len(), 3);
    assert!(r.tables.energy_vs_truncation.is_empty());
    for run in &r.runs {
        assert_eq!(run.graph_hash.as_deref(), Some(builders::pendant(run.params.ell.unwrap()).content_hash().as_str()));
        assert_eq!(run.outcome.verdict(), Some(Verdict::Attained));
    }
}

#[test]
fn records_are_reproducible_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small(builtin_experiment("tadpole").unwrap());
    spec.perturbation = 0.05;
    spec.grid.seeds = vec![3, 4];
    spec.max_iterations = Some(50);
    spec.output_dir = Some(dir.path().to_path_buf());
    let a = run_experiment(&spec).unwrap();
    let first = fs::read_to_string(dir.path().join("tadpole.json")).unwrap();
    let b = run_experiment(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(first, fs::read_to_string(dir.path().join("tadpole.json")).unwrap());
    assert!(first.contains(env!("CARGO_PKG_VERSION")));
    assert_ne!(a.runs[0].outcome, a.runs[1].outcome);
    let csv = a.runs[0].csv.as_ref().unwrap();
    let text = fs::read_to_string(dir.path().join(csv)).unwrap();
    let (u, meta) = GraphFunction::read_csv(&builders::tadpole(2.0), &text).unwrap();
    assert_eq!(meta.graph_hash.as_deref(), a.runs[0].graph_hash.as_deref());
    assert!((u.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn escape_curve_tables_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = builtin_experiment("escape_curve").unwrap();
    spec.grid.h = vec![0.02];
    spec.output_dir = Some(dir.path().to_path_buf());
    let r = run_experiment(&spec).unwrap();
    assert_eq!(r.tables.energy_vs_shift.len(), spec.grid.shifts.len());
    let e: Vec<f64> = r.tables.energy_vs_shift.iter().map(|t| t.energy).collect();
    assert!(e[0] > *e.last().unwrap());
    assert!(dir.path().join("escape_curve-energy_vs_shift.csv").exists());
    assert!(r.runs.iter().all(|run| run.csv.is_none()));
}

#[test]
fn run_failures_are_recorded() {
    let mut spec = ExperimentSpec::from_json(r#"{"name": "t", "graph": {"file": "/nonexistent/graph.json"}, "grid": {"h": [0.1], "L": [5]}}"#).unwrap();
    let r = run_experiment(&spec).unwrap();
    assert!(matches!(r.runs[0].outcome, RunOutcome::Failed { .. }));
    spec.kind = ExperimentKind::EscapeCurve;
    spec.graph = GraphSource::builtin(BuiltinGraph::Line, &[]);
    spec.grid.shifts = vec![1.0, 4.5];
    let r = run_experiment(&spec).unwrap();
    // the second shift leaves no room for the default cutoff
    assert!(matches!(r.runs[0].outcome, RunOutcome::EscapeEnergy { .. }));
    assert!(matches!(r.runs[1].outcome, RunOutcome::Failed { .. }));
}

#[test]
fn graph_files_resolve_relative_to_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.json"), builders::pendant(1.5).to_json()).unwrap();
    let spec_path = dir.path().join("spec.json");
    fs::write(&spec_path, r#"{"name": "t", "graph": {"file": "g.json"}}"#).unwrap();
    let spec = ExperimentSpec::load(&spec_path).unwrap();
    assert_eq!(spec.graph.resolve(None).unwrap(), builders::pendant(1.5));
}
