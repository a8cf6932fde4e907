//! Mass-constrained minimization of the NLS energy on a truncated graph.
//!
//! Descent directions are gradients in the `H^1` inner product
//! `<u, v> = int u'v' + sigma int uv` projected onto the tangent space of the
//! mass sphere; each step is renormalized to the exact mass and accepted by
//! Armijo backtracking.

mod checks;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::function::{FunctionError, GraphFunction, OptimalityResiduals};
use crate::graph::{GraphError, MetricGraph};
use crate::mesh::{MeshError, TruncatedMesh};
use crate::rearrangement::{hybrid_rearrangement, pendant_layout};
use crate::solver::ShiftedStiffness;
use crate::soliton::{ProblemParams, SolitonError, SolitonParams};

pub use checks::{
    escaping_sequence_energy, example1_exactness_check, pendant_structure_check, soliton_wrap, ExactnessReport, PendantStructure,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinimizerError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("initial guess lives on a different graph")]
    InitialMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerConfig {
    pub problem: ProblemParams,
    pub h: f64,
    pub truncation: f64,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the energy by less than this...
    pub energy_tol: f64,
    /// ...and the projected gradient norm is below this.
    pub gradient_tol: f64,
    pub use_hybrid_rearrangement: bool,
    /// Iterations between hybrid steps.
    pub hybrid_every: usize,
    pub seed: u64,
    /// Relative amplitude of the random initial perturbation.
    pub perturbation: f64,
    /// Centre of the initial soliton; defaults to a finite vertex of highest degree.
    pub start_vertex: Option<String>,
    /// Escape when more than this fraction of the mass sits in the outer
    /// fifth of the half-lines.
    pub escape_fraction_threshold: f64,
    /// When a run on a graph with half-lines ends above the soliton energy,
    /// also descend from a soliton placed halfway down each half-line (if it
    /// starts lower) and keep the lower state; an adopted probe means escape.
    pub escape_probe: bool,
    /// Repeat the run on `2L` to detect escape.
    pub check_doubling: bool,
    /// Escape when doubling `L` lowers the energy by more than this plus twice
    /// the expected truncation gain.
    pub doubling_energy_tol: f64,
    /// Escape when doubling `L` moves the peak outward by more than this many mesh widths.
    pub doubling_drift_widths: f64,
}

impl MinimizerConfig {
    pub fn new(problem: ProblemParams, h: f64, truncation: f64) -> Self {
        MinimizerConfig {
            problem,
            h,
            truncation,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            max_iterations: 4000,
            energy_tol: 1e-13,
            gradient_tol: 1e-7,
            use_hybrid_rearrangement: false,
            hybrid_every: 25,
            seed: 0,
            perturbation: 0.0,
            start_vertex: None,
            escape_fraction_threshold: 0.2,
            escape_probe: true,
            check_doubling: true,
            doubling_energy_tol: 1e-8,
            doubling_drift_widths: 4.0,
        }
    }

    fn check(&self) -> Result<(), MinimizerError> {
        let bad = |m: &str| Err(MinimizerError::Config(m.to_string()));
        if !(self.h > 0.0) || !(self.truncation > 0.0) {
            return bad("mesh width and truncation length must be positive");
        }
        if !(self.energy_tol > 0.0 && self.gradient_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("backtracking factor and Armijo constant must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0) || self.hybrid_every == 0 || self.perturbation < 0.0 {
            return bad("step, hybrid period and perturbation must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Attained,
    Escaping,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    /// `E(phi_2mu, R) / 2`.
    pub lower: f64,
    /// `E(phi_mu, R)`.
    pub upper: f64,
}

impl Bounds {
    pub fn for_problem(params: &SolitonParams, mu: f64) -> Self {
        Bounds { lower: 0.5 * params.energy(2.0 * mu), upper: params.energy(mu) }
    }
}

/// Result of the run on the doubled truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingCheck {
    pub truncation: f64,
    pub energy: f64,
    pub peak_offset: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateReport {
    #[serde(skip)]
    pub u: GraphFunction,
    pub graph_hash: String,
    pub p: f64,
    pub mu: f64,
    pub h: f64,
    pub truncation: f64,
    pub energy: f64,
    pub mass: f64,
    pub lambda: f64,
    pub residuals: OptimalityResiduals,
    pub bounds: Bounds,
    pub escape_fraction: f64,
    /// Distance of the maximum from the core, along its half-line (0 in the core).
    pub peak_offset: f64,
    /// The escape probe beat the descent from the initial guess.
    pub escape_probe_adopted: bool,
    pub doubling: Option<DoublingCheck>,
    pub verdict: Verdict,
    pub converged: bool,
    pub iterations: usize,
    pub projected_gradient: f64,
    pub hybrid_steps: usize,
    pub hybrid_accepted: usize,
    /// Accepted energies, one per iteration.
    pub energy_history: Vec<f64>,
}

/// `lower - 10 h^2 <= energy <= upper + 10 h^2`.
pub fn verify_bounds(report: &GroundStateReport) -> bool {
    let slack = 10.0 * report.h * report.h;
    report.bounds.lower - slack <= report.energy && report.energy <= report.bounds.upper + slack
}

fn dot(a: &[f64], b: &[f64], n: usize) -> f64 {
    a[..n].iter().zip(&b[..n]).map(|(x, y)| x * y).sum()
}

struct Descent {
    iterations: usize,
    converged: bool,
    projected_gradient: f64,
    history: Vec<f64>,
    hybrid_steps: usize,
    hybrid_accepted: usize,
}

fn normalize(u: &mut GraphFunction, mu: f64) {
    let m = u.mass();
    let s = (mu / m).sqrt();
    u.values_mut().iter_mut().for_each(|v| *v *= s);
}

fn descend(u: &mut GraphFunction, config: &MinimizerConfig, sigma: f64, hybrid: bool) -> Descent {
    let p = config.problem.p;
    let mu = config.problem.mu;
    let mesh = u.mesh().clone();
    let free = mesh.free_count();
    let solver = ShiftedStiffness::new(&mesh, sigma);

    normalize(u, mu);
    let mut energy = u.energy(p);
    let mut history = vec![energy];
    let mut step = config.initial_step;
    let mut last_decrease = f64::INFINITY;
    let mut out = Descent { iterations: 0, converged: false, projected_gradient: f64::INFINITY, history: Vec::new(), hybrid_steps: 0, hybrid_accepted: 0 };

    for it in 0..config.max_iterations {
        let g = u.gradient_values(p);
        let w = mesh.mass_apply(u.values());
        let a = solver.solve(&g);
        let b = solver.solve(&w);
        let ratio = dot(&w, &a, free) / dot(&w, &b, free);
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - ratio * y).collect();
        let gd = dot(&g, &d, free).max(0.0);
        out.projected_gradient = gd.sqrt();
        out.iterations = it;
        if out.projected_gradient < config.gradient_tol && last_decrease < config.energy_tol {
            out.converged = true;
            break;
        }

        let mut accepted = None;
        while step > 1e-14 {
            let values: Vec<f64> = u.values().iter().zip(&d).map(|(x, y)| x - step * y).collect();
            let mut trial = u.with_values(values);
            normalize(&mut trial, mu);
            let e = trial.energy(p);
            if e <= energy - config.armijo * step * gd {
                accepted = Some((trial, e));
                break;
            }
            step *= config.backtrack;
        }
        let Some((trial, e)) = accepted else {
            // no representable decrease left along the projected gradient
            out.converged = out.projected_gradient < 10.0 * config.gradient_tol;
            break;
        };
        debug_assert!(e <= energy);
        last_decrease = energy - e;
        energy = e;
        *u = trial;
        history.push(energy);
        step = (step * 2.0).min(config.initial_step * 4.0);
        out.iterations = it + 1;

        if hybrid && (it + 1) % config.hybrid_every == 0 {
            out.hybrid_steps += 1;
            let positive = u.abs();
            if let Ok(r) = hybrid_rearrangement(&positive) {
                debug_assert!(r.output.energy(p) <= positive.energy(p) + 1e-10, "{} {} {:?} {:?}", r.output.energy(p), positive.energy(p), r.audit, r.tau);
                if let Ok(mut v) = r.output.resample_onto(mesh.clone()) {
                    normalize(&mut v, mu);
                    let ev = v.energy(p);
                    if ev < energy {
                        out.hybrid_accepted += 1;
                        last_decrease = energy - ev;
                        energy = ev;
                        *u = v;
                        history.push(energy);
                    }
                }
            }
        }
    }
    out.history = history;
    out
}

/// Fraction of the mass carried by the outer fifth of the half-lines.
fn escape_fraction(u: &GraphFunction) -> f64 {
    let mesh = u.mesh();
    let total = u.mass();
    if total == 0.0 {
        return 0.0;
    }
    let cut = 0.8 * mesh.truncation();
    let vals = u.values();
    let mut outer = 0.0;
    for e in mesh.edges().iter().filter(|e| e.half_line) {
        for i in 0..e.intervals() {
            let (x0, x1) = (e.coords[i], e.coords[i + 1]);
            if x1 <= cut {
                continue;
            }
            let (mut a, b) = (vals[e.node(i)], vals[e.node(i + 1)]);
            let mut w = x1 - x0;
            if x0 < cut {
                a += (b - a) * (cut - x0) / w;
                w = x1 - cut;
            }
            outer += w / 3.0 * (a * a + a * b + b * b);
        }
    }
    (outer / total).clamp(0.0, 1.0)
}

/// Abscissa of the maximum along its half-line, or 0 when it sits elsewhere.
fn peak_offset(u: &GraphFunction) -> f64 {
    let vals = u.values();
    let (mut best, mut best_value) = (0.0, f64::NEG_INFINITY);
    for e in u.mesh().edges() {
        for (i, &x) in e.coords.iter().enumerate() {
            let v = vals[e.node(i)].abs();
            if v > best_value {
                best_value = v;
                best = if e.half_line && i > 0 { x } else { 0.0 };
            }
        }
    }
    best
}

/// Soliton centred at `start`, at the graph distance.
fn initial_guess(mesh: &Arc<TruncatedMesh>, config: &MinimizerConfig, params: &SolitonParams) -> Result<GraphFunction, MinimizerError> {
    let graph = mesh.graph();
    let start = match &config.start_vertex {
        Some(id) => graph.vertex_index(id).ok_or_else(|| GraphError::UnknownVertex(id.clone()))?,
        None => {
            let mut best = None;
            for (i, v) in graph.vertices().iter().enumerate() {
                if v.at_infinity {
                    continue;
                }
                let d = graph.degree(&v.id);
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((i, d));
                }
            }
            best.expect("a valid graph has a finite vertex").0
        }
    };
    let node = mesh.vertex_node(start).ok_or_else(|| MinimizerError::Precondition("start vertex is at infinity".into()))?;
    let dist = mesh.distances(&[(node, 0.0)]);
    let mu = config.problem.mu;
    let mut values: Vec<f64> = dist.iter().map(|&r| params.value(mu, r)).collect();
    if config.perturbation > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for v in values.iter_mut() {
            *v *= 1.0 + config.perturbation * rng.random_range(-1.0..1.0);
        }
    }
    Ok(GraphFunction::from_values(mesh.clone(), values)?)
}

/// Energy a soliton centred at the core still gains when the half-lines are
/// extended from `l` to infinity: the boundary slope of the Dirichlet problem
/// is about twice the soliton slope, which gives `2 lambda` times the tail mass.
fn truncation_gain(params: &SolitonParams, mu: f64, l: f64, half_lines: usize) -> f64 {
    let tail = mu.powf(2.0 * params.alpha - params.beta) * params.unit_tail_mass(mu.powf(params.beta) * l);
    half_lines as f64 * 2.0 * params.lambda_of(mu) * tail
}

struct Run {
    u: GraphFunction,
    descent: Descent,
    probe_adopted: bool,
}

/// Descend from `u`, then from the escape probes when the result lies above
/// the soliton energy; keep the lowest state.
fn run(mut u: GraphFunction, config: &MinimizerConfig, params: &SolitonParams, hybrid: bool) -> Result<Run, MinimizerError> {
    let (p, mu) = (config.problem.p, config.problem.mu);
    let sigma = params.lambda_of(mu);
    let mesh = u.mesh().clone();
    let mut descent = descend(&mut u, config, sigma, hybrid);
    if u.max() <= 0.0 {
        u = u.abs();
    }
    let mut probe_adopted = false;
    let above = u.energy(p) > params.energy(mu) - 10.0 * mesh.h() * mesh.h();
    if config.escape_probe && mesh.graph().half_line_count() > 0 && above {
        let mut best = u.energy(p);
        let half = 0.5 * config.truncation;
        for k in (0..mesh.edges().len()).filter(|&k| mesh.edges()[k].half_line) {
            let mut v = checks::escaping_start(&mesh, k, half, half, params, mu)?;
            if v.energy(p) >= best {
                continue;
            }
            let d = descend(&mut v, config, sigma, hybrid);
            if v.max() <= 0.0 {
                v = v.abs();
            }
            let e = v.energy(p);
            if e < best - config.doubling_energy_tol {
                (best, u, descent, probe_adopted) = (e, v, d, true);
            }
        }
    }
    Ok(Run { u, descent, probe_adopted })
}

/// Minimize from the default initial guess.
pub fn minimize(graph: &MetricGraph, config: &MinimizerConfig) -> Result<GroundStateReport, MinimizerError> {
    minimize_from(graph, config, None)
}

/// Minimize, optionally warm-starting from a function on the same graph
/// (it is interpolated onto the configured mesh).
pub fn minimize_from(graph: &MetricGraph, config: &MinimizerConfig, initial: Option<&GraphFunction>) -> Result<GroundStateReport, MinimizerError> {
    config.check()?;
    let report = graph.validate();
    if !report.is_valid() {
        return Err(GraphError::Invalid(report).into());
    }
    let params = SolitonParams::new(config.problem.p)?;
    let mesh = Arc::new(TruncatedMesh::uniform(graph, config.h, config.truncation)?);
    let u = match initial {
        Some(init) => {
            if init.mesh().graph() != graph {
                return Err(MinimizerError::InitialMismatch);
            }
            GraphFunction::from_fn(mesh.clone(), |k, x| init.value_at(k, x))
        }
        None => initial_guess(&mesh, config, &params)?,
    };
    let hybrid = config.use_hybrid_rearrangement && pendant_layout(graph).is_some();
    let Run { u, descent, probe_adopted } = run(u, config, &params, hybrid)?;
    let p = config.problem.p;
    let energy = u.energy(p);
    let residuals = u.optimality_residuals(p)?;
    let escape = escape_fraction(&u);
    let offset = peak_offset(&u);

    let doubling = if config.check_doubling && graph.half_line_count() > 0 {
        let mut cfg = config.clone();
        cfg.truncation *= 2.0;
        let mesh2 = Arc::new(TruncatedMesh::uniform(graph, cfg.h, cfg.truncation)?);
        let warm = GraphFunction::from_fn(mesh2, |k, x| u.value_at(k, x));
        let r = run(warm, &cfg, &params, hybrid)?;
        Some(DoublingCheck {
            truncation: cfg.truncation,
            energy: r.u.energy(p),
            peak_offset: peak_offset(&r.u),
            iterations: r.descent.iterations,
        })
    } else {
        None
    };

    let allowance = config.doubling_energy_tol + 2.0 * truncation_gain(&params, config.problem.mu, config.truncation, graph.half_line_count());
    let escaping = probe_adopted
        || escape > config.escape_fraction_threshold
        || doubling.is_some_and(|d| energy - d.energy > allowance || d.peak_offset > offset + config.doubling_drift_widths * mesh.h());
    let verdict = if escaping {
        Verdict::Escaping
    } else if descent.converged {
        Verdict::Attained
    } else {
        Verdict::Inconclusive
    };

    Ok(GroundStateReport {
        graph_hash: graph.content_hash(),
        p,
        mu: config.problem.mu,
        h: mesh.h(),
        truncation: config.truncation,
        energy,
        mass: u.mass(),
        lambda: residuals.lambda,
        residuals,
        bounds: Bounds::for_problem(&params, config.problem.mu),
        escape_fraction: escape,
        peak_offset: offset,
        escape_probe_adopted: probe_adopted,
        doubling,
        verdict,
        converged: descent.converged,
        iterations: descent.iterations,
        projected_gradient: descent.projected_gradient,
        hybrid_steps: descent.hybrid_steps,
        hybrid_accepted: descent.hybrid_accepted,
        energy_history: descent.history,
        u,
    })
}
