//! Parameter sweeps over the minimizer and the escaping sequence.
//!
//! An [`ExperimentSpec`] names a graph and a parameter grid; [`run_experiment`]
//! executes every grid point (concurrently unless warm-start continuation
//! chains them) and returns an [`ExperimentRecord`]. With an output directory
//! the record is written as JSON next to one CSV per minimizer and one CSV per
//! derived table.

mod builtins;
mod corpus;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::function::{GraphFunction, OptimalityResiduals};
use crate::graph::{builders, MetricGraph};
use crate::minimizer::{
    escaping_sequence_energy, minimize_from, verify_bounds, Bounds, DoublingCheck, GroundStateReport, MinimizerConfig, Verdict,
};
use crate::soliton::ProblemParams;

pub use builtins::{builtin_experiment, BUILTIN_EXPERIMENTS};
pub use corpus::{corpus, CorpusEntry};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment spec: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("graph file {path}: {message}")]
    GraphFile { path: PathBuf, message: String },
    #[error("unknown builtin experiment {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinGraph {
    Line,
    Tadpole,
    BubbleTower,
    DoubleBridge,
    Pendant,
    Fig2,
}

/// Either a builtin with its lengths or a graph description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<BuiltinGraph>,
    /// Loop length (tadpole), glue points (bubble tower) or bridge lengths
    /// (double bridge). Pendant lengths come from the grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl GraphSource {
    pub fn builtin(kind: BuiltinGraph, lengths: &[f64]) -> Self {
        GraphSource { builtin: Some(kind), lengths: lengths.to_vec(), file: None }
    }

    fn is_pendant(&self) -> bool {
        self.builtin == Some(BuiltinGraph::Pendant)
    }

    fn check(&self) -> Result<(), ExperimentError> {
        let invalid = |m: String| Err(ExperimentError::Invalid(m));
        let kind = match (self.builtin, &self.file) {
            (Some(k), None) => k,
            (None, Some(_)) if self.lengths.is_empty() => return Ok(()),
            (None, Some(_)) => return invalid("lengths apply to builtin graphs only".into()),
            _ => return invalid("graph needs exactly one of `builtin` and `file`".into()),
        };
        if self.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return invalid("graph lengths must be positive and finite".into());
        }
        let n = self.lengths.len();
        match kind {
            BuiltinGraph::Line | BuiltinGraph::Pendant | BuiltinGraph::Fig2 if n > 0 => invalid(format!("{kind:?} takes no lengths")),
            BuiltinGraph::Tadpole if n > 1 => invalid("tadpole takes one loop length".into()),
            BuiltinGraph::DoubleBridge if n != 0 && n != 2 => invalid("double_bridge takes two bridge lengths".into()),
            BuiltinGraph::BubbleTower if self.lengths.windows(2).any(|w| w[1] <= w[0]) => {
                invalid("bubble_tower glue points must increase".into())
            }
            _ => Ok(()),
        }
    }

    /// Build the graph; `ell` is the pendant length.
    pub fn resolve(&self, ell: Option<f64>) -> Result<MetricGraph, ExperimentError> {
        self.check()?;
        let l = &self.lengths;
        let graph = match (self.builtin, &self.file) {
            (Some(BuiltinGraph::Line), _) => builders::line(),
            (Some(BuiltinGraph::Tadpole), _) => builders::tadpole(l.first().copied().unwrap_or(2.0)),
            (Some(BuiltinGraph::BubbleTower), _) => builders::bubble_tower(if l.is_empty() { &[1.0, 2.0] } else { l }),
            (Some(BuiltinGraph::DoubleBridge), _) => {
                let (a, b) = if l.is_empty() { (1.0, 1.0) } else { (l[0], l[1]) };
                builders::double_bridge(a, b)
            }
            (Some(BuiltinGraph::Pendant), _) => builders::pendant(ell.unwrap_or(1.0)),
            (Some(BuiltinGraph::Fig2), _) => builders::fig2(),
            (None, Some(path)) => {
                let fail = |message: String| ExperimentError::GraphFile { path: path.clone(), message };
                let text = fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
                MetricGraph::from_json(&text).map_err(|e| fail(e.to_string()))?
            }
            (None, None) => unreachable!("checked above"),
        };
        let report = graph.validate();
        if !report.is_valid() {
            return Err(ExperimentError::Invalid(format!("graph does not validate: {report:?}")));
        }
        Ok(graph)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Minimize at every grid point.
    #[default]
    Minimize,
    /// Energy of the escaping sequence at every shift.
    EscapeCurve,
}

fn default_p() -> Vec<f64> {
    vec![4.0]
}

fn default_mu() -> Vec<f64> {
    vec![1.0]
}

fn default_h() -> Vec<f64> {
    vec![1e-3]
}

fn default_truncation() -> Vec<f64> {
    vec![40.0]
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_mu")]
    pub mu: Vec<f64>,
    /// Pendant lengths (pendant graphs only; defaults to 1).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ell: Vec<f64>,
    #[serde(default = "default_h")]
    pub h: Vec<f64>,
    #[serde(rename = "L", default = "default_truncation")]
    pub truncation: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Escape-curve shifts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            p: default_p(),
            mu: default_mu(),
            ell: Vec::new(),
            h: default_h(),
            truncation: default_truncation(),
            seeds: default_seeds(),
            shifts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub graph: GraphSource,
    #[serde(default)]
    pub kind: ExperimentKind,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub hybrid: bool,
    /// Relative amplitude of the seeded initial perturbation.
    #[serde(default)]
    pub perturbation: f64,
    /// Warm-start each run from the previous truncation length.
    #[serde(default)]
    pub continuation: bool,
    /// Cutoff radius of the escaping sequence (escape curves; default `L/4`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Parse and validate.
    pub fn from_json(text: &str) -> Result<ExperimentSpec, ExperimentError> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Read a spec file; a relative graph file is taken relative to the spec.
    pub fn load(path: &Path) -> Result<ExperimentSpec, ExperimentError> {
        let mut spec = ExperimentSpec::from_json(&fs::read_to_string(path)?)?;
        if let (Some(file), Some(dir)) = (&spec.graph.file, path.parent()) {
            if file.is_relative() {
                spec.graph.file = Some(dir.join(file));
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let invalid = |m: &str| Err(ExperimentError::Invalid(m.to_string()));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return invalid("name must be a non-empty identifier of letters, digits, '_' and '-'");
        }
        self.graph.check()?;
        let g = &self.grid;
        let positive = |v: &[f64]| !v.is_empty() && v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !positive(&g.mu) || !positive(&g.h) || !positive(&g.truncation) || g.seeds.is_empty() {
            return invalid("grid needs non-empty positive mu, h and L, and at least one seed");
        }
        if g.p.is_empty() || g.p.iter().any(|&p| !(p > 2.0 && p < 6.0)) {
            return invalid("grid p values must lie in (2, 6)");
        }
        if !g.ell.is_empty() && (!self.graph.is_pendant() || !positive(&g.ell)) {
            return invalid("ell applies to the pendant builtin and must be positive");
        }
        match self.kind {
            ExperimentKind::Minimize if !g.shifts.is_empty() || self.cutoff_width.is_some() => {
                invalid("shifts and cutoff_width apply to escape curves only")
            }
            ExperimentKind::EscapeCurve if g.shifts.is_empty() || g.shifts.iter().any(|s| !(s.is_finite() && *s >= 0.0)) => {
                invalid("escape curves need non-negative shifts")
            }
            _ if !(self.perturbation.is_finite() && self.perturbation >= 0.0) => invalid("perturbation must be non-negative"),
            _ if self.cutoff_width.is_some_and(|w| !(w.is_finite() && w > 0.0)) => invalid("cutoff_width must be positive"),
            _ if self.max_iterations == Some(0) => invalid("max_iterations must be at least 1"),
            _ => {
                if let Some(kind) = self.graph.builtin {
                    if kind != BuiltinGraph::Pendant {
                        self.graph.resolve(None)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// Grid points in a fixed order (L varies fastest before shifts).
    fn points(&self) -> Vec<RunParams> {
        let g = &self.grid;
        let ells: Vec<Option<f64>> = if self.graph.is_pendant() {
            if g.ell.is_empty() {
                vec![Some(1.0)]
            } else {
                g.ell.iter().map(|&l| Some(l)).collect()
            }
        } else {
            vec![None]
        };
        let shifts: Vec<Option<f64>> = if g.shifts.is_empty() { vec![None] } else { g.shifts.iter().map(|&s| Some(s)).collect() };
        let mut out = Vec::new();
        for &p in &g.p {
            for &mu in &g.mu {
                for &ell in &ells {
                    for &h in &g.h {
                        for &seed in &g.seeds {
                            for &truncation in &g.truncation {
                                for &shift in &shifts {
                                    out.push(RunParams { p, mu, ell, h, truncation, seed, shift });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn config(&self, r: &RunParams) -> Result<MinimizerConfig, String> {
        let problem = ProblemParams::new(r.p, r.mu).map_err(|e| e.to_string())?;
        let mut cfg = MinimizerConfig::new(problem, r.h, r.truncation);
        cfg.use_hybrid_rearrangement = self.hybrid;
        cfg.seed = r.seed;
        cfg.perturbation = self.perturbation;
        if let Some(n) = self.max_iterations {
            cfg.max_iterations = n;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunParams {
    pub p: f64,
    pub mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    pub h: f64,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
}

/// Everything in a [`GroundStateReport`] except the function and the history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub energy: f64,
    pub mass: f64,
    pub lambda: f64,
    pub residuals: OptimalityResiduals,
    pub bounds: Bounds,
    pub bounds_hold: bool,
    pub escape_fraction: f64,
    pub peak_offset: f64,
    pub escape_probe_adopted: bool,
    pub doubling: Option<DoublingCheck>,
    pub verdict: Verdict,
    pub converged: bool,
    pub iterations: usize,
    pub projected_gradient: f64,
    pub hybrid_steps: usize,
    pub hybrid_accepted: usize,
}

impl From<&GroundStateReport> for ReportSummary {
    fn from(r: &GroundStateReport) -> Self {
        ReportSummary {
            energy: r.energy,
            mass: r.mass,
            lambda: r.lambda,
            residuals: r.residuals,
            bounds: r.bounds,
            bounds_hold: verify_bounds(r),
            escape_fraction: r.escape_fraction,
            peak_offset: r.peak_offset,
            escape_probe_adopted: r.escape_probe_adopted,
            doubling: r.doubling,
            verdict: r.verdict,
            converged: r.converged,
            iterations: r.iterations,
            projected_gradient: r.projected_gradient,
            hybrid_steps: r.hybrid_steps,
            hybrid_accepted: r.hybrid_accepted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunOutcome {
    Minimized(ReportSummary),
    EscapeEnergy { width: f64, energy: f64 },
    Failed { error: String },
}

impl RunOutcome {
    pub fn energy(&self) -> Option<f64> {
        match self {
            RunOutcome::Minimized(s) => Some(s.energy),
            RunOutcome::EscapeEnergy { energy, .. } => Some(*energy),
            RunOutcome::Failed { .. } => None,
        }
    }

    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            RunOutcome::Minimized(s) => Some(s.verdict),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub index: usize,
    pub params: RunParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<MinimizerConfig>,
    pub outcome: RunOutcome,
    /// Minimizer CSV, relative to the output directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub x: f64,
    pub energy: f64,
    pub run: usize,
}

/// Energies against each grid dimension that takes more than one value.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tables {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub energy_vs_ell: Vec<TableRow>,
    #[serde(rename = "energy_vs_L", skip_serializing_if = "Vec::is_empty")]
    pub energy_vs_truncation: Vec<TableRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub energy_vs_shift: Vec<TableRow>,
}

impl Tables {
    fn named(&self) -> [(&'static str, &Vec<TableRow>); 3] {
        [("energy_vs_ell", &self.energy_vs_ell), ("energy_vs_L", &self.energy_vs_truncation), ("energy_vs_shift", &self.energy_vs_shift)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub spec: ExperimentSpec,
    pub code_version: String,
    pub runs: Vec<RunRecord>,
    pub tables: Tables,
}

impl ExperimentRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    /// Energies of the successful runs in grid order.
    pub fn energies(&self) -> Vec<Option<f64>> {
        self.runs.iter().map(|r| r.outcome.energy()).collect()
    }
}

struct Finished {
    record: RunRecord,
    minimizer: Option<GraphFunction>,
}

fn failed(index: usize, params: RunParams, hash: Option<String>, config: Option<MinimizerConfig>, error: String) -> Finished {
    Finished { record: RunRecord { index, params, graph_hash: hash, config, outcome: RunOutcome::Failed { error }, csv: None }, minimizer: None }
}

fn run_point(spec: &ExperimentSpec, index: usize, params: RunParams, warm: Option<&GraphFunction>) -> Finished {
    let graph = match spec.graph.resolve(params.ell) {
        Ok(g) => g,
        Err(e) => return failed(index, params, None, None, e.to_string()),
    };
    let hash = Some(graph.content_hash());
    let config = match spec.config(&params) {
        Ok(c) => c,
        Err(e) => return failed(index, params, hash, None, e),
    };
    match spec.kind {
        ExperimentKind::Minimize => {
            let warm = warm.filter(|w| w.mesh().graph() == &graph);
            match minimize_from(&graph, &config, warm) {
                Ok(report) => Finished {
                    record: RunRecord {
                        index,
                        params,
                        graph_hash: hash,
                        config: Some(config),
                        outcome: RunOutcome::Minimized(ReportSummary::from(&report)),
                        csv: None,
                    },
                    minimizer: Some(report.u),
                },
                Err(e) => failed(index, params, hash, Some(config), e.to_string()),
            }
        }
        ExperimentKind::EscapeCurve => {
            let width = spec.cutoff_width.unwrap_or(0.25 * params.truncation);
            let shift = params.shift.expect("escape curves have shifts");
            match escaping_sequence_energy(&graph, shift, width, &config) {
                Ok(energy) => Finished {
                    record: RunRecord {
                        index,
                        params,
                        graph_hash: hash,
                        config: Some(config),
                        outcome: RunOutcome::EscapeEnergy { width, energy },
                        csv: None,
                    },
                    minimizer: None,
                },
                Err(e) => failed(index, params, hash, Some(config), e.to_string()),
            }
        }
    }
}

/// Chains of grid indices: one per point, or with continuation one per
/// grid point modulo `L`, ordered by increasing `L`.
fn chains(spec: &ExperimentSpec, points: &[RunParams]) -> Vec<Vec<usize>> {
    if !spec.continuation || spec.kind != ExperimentKind::Minimize {
        return (0..points.len()).map(|i| vec![i]).collect();
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, r) in points.iter().enumerate() {
        let key = |q: &RunParams| (q.p, q.mu, q.ell, q.h, q.seed);
        match out.iter_mut().find(|c| key(&points[c[0]]) == key(r)) {
            Some(c) => c.push(i),
            None => out.push(vec![i]),
        }
    }
    for c in &mut out {
        c.sort_by(|&a, &b| points[a].truncation.total_cmp(&points[b].truncation).then(a.cmp(&b)));
    }
    out
}

fn tables(spec: &ExperimentSpec, runs: &[RunRecord]) -> Tables {
    let g = &spec.grid;
    let collect = |on: bool, x: &dyn Fn(&RunParams) -> Option<f64>| -> Vec<TableRow> {
        if !on {
            return Vec::new();
        }
        let mut rows: Vec<TableRow> = runs
            .iter()
            .filter_map(|r| Some(TableRow { x: x(&r.params)?, energy: r.outcome.energy()?, run: r.index }))
            .collect();
        rows.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.run.cmp(&b.run)));
        rows
    };
    Tables {
        energy_vs_ell: collect(g.ell.len() > 1, &|r| r.ell),
        energy_vs_truncation: collect(g.truncation.len() > 1, &|r| Some(r.truncation)),
        energy_vs_shift: collect(g.shifts.len() > 1, &|r| r.shift),
    }
}

/// Execute the grid. Per-run failures are recorded in the runs; only an
/// invalid spec or an output error is fatal.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRecord, ExperimentError> {
    spec.validate()?;
    let points = spec.points();
    let mut finished: Vec<Finished> = chains(spec, &points)
        .into_par_iter()
        .flat_map_iter(|chain| {
            let mut out: Vec<Finished> = Vec::with_capacity(chain.len());
            for i in chain {
                let warm = out.last().and_then(|f| f.minimizer.as_ref());
                let f = run_point(spec, i, points[i], warm);
                out.push(f);
            }
            out
        })
        .collect();
    finished.sort_by_key(|f| f.record.index);

    if let Some(dir) = &spec.output_dir {
        fs::create_dir_all(dir)?;
        for f in &mut finished {
            if let Some(u) = &f.minimizer {
                let name = format!("{}-run{:03}.csv", spec.name, f.record.index);
                let file = fs::File::create(dir.join(&name))?;
                u.write_csv(file, f.record.params.p, f.record.params.mu).map_err(|e| std::io::Error::other(format!("{name}: {e}")))?;
                f.record.csv = Some(name);
            }
        }
    }
    let runs: Vec<RunRecord> = finished.into_iter().map(|f| f.record).collect();
    let record = ExperimentRecord { spec: spec.clone(), code_version: env!("CARGO_PKG_VERSION").to_string(), tables: tables(spec, &runs), runs };
    if let Some(dir) = &spec.output_dir {
        fs::write(dir.join(format!("{}.json", spec.name)), record.to_json() + "\n")?;
        for (table, rows) in record.tables.named() {
            if rows.is_empty() {
                continue;
            }
            let mut w = csv::Writer::from_path(dir.join(format!("{}-{table}.csv", spec.name)))?;
            w.write_record(["x", "energy", "run"])?;
            for r in rows {
                w.write_record([format!("{:e}", r.x), format!("{:e}", r.energy), r.run.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests;
