use super::{BuiltinGraph, ExperimentKind, ExperimentSpec, GraphSource, Grid};

pub const BUILTIN_EXPERIMENTS: &[&str] = &["pendant_sweep", "double_bridge_sweep", "tadpole", "bubble_tower", "line", "escape_curve"];

fn spec(name: &str, graph: GraphSource, grid: Grid) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        graph,
        kind: ExperimentKind::Minimize,
        grid,
        hybrid: false,
        perturbation: 0.0,
        continuation: false,
        cutoff_width: None,
        max_iterations: None,
        output_dir: None,
    }
}

/// The reference experiments at `p = 4`, `mu = 1`, `h = 1e-3`.
pub fn builtin_experiment(name: &str) -> Option<ExperimentSpec> {
    let grid = Grid::default();
    let s = match name {
        "pendant_sweep" => {
            let mut s = spec(name, GraphSource::builtin(BuiltinGraph::Pendant, &[]), Grid { ell: vec![0.5, 1.0, 2.0], ..grid });
            s.hybrid = true;
            s
        }
        "double_bridge_sweep" => {
            let mut s = spec(
                name,
                GraphSource::builtin(BuiltinGraph::DoubleBridge, &[1.0, 1.0]),
                Grid { truncation: vec![20.0, 40.0, 80.0], ..grid },
            );
            s.continuation = true;
            s
        }
        "tadpole" => spec(name, GraphSource::builtin(BuiltinGraph::Tadpole, &[2.0]), grid),
        "bubble_tower" => spec(name, GraphSource::builtin(BuiltinGraph::BubbleTower, &[1.0, 2.0]), grid),
        "line" => spec(name, GraphSource::builtin(BuiltinGraph::Line, &[]), grid),
        "escape_curve" => {
            let mut s = spec(
                name,
                GraphSource::builtin(BuiltinGraph::DoubleBridge, &[1.0, 1.0]),
                Grid { truncation: vec![80.0], shifts: vec![0.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0], ..grid },
            );
            s.kind = ExperimentKind::EscapeCurve;
            s.cutoff_width = Some(30.0);
            s
        }
        _ => return None,
    };
    Some(s)
}
