use std::sync::Arc;

use serde::Serialize;

use super::{minimize, GroundStateReport, MinimizerConfig, MinimizerError, Verdict};
use crate::function::GraphFunction;
use crate::graph::{recognize_example1, Example1Class, MetricGraph};
use crate::mesh::TruncatedMesh;
use crate::rearrangement::pendant_layout;
use crate::soliton::{solve_half_line, SolitonParams};

/// Energy of the soliton cut off at radius `width`, centred `shift` down the
/// first half-line, and renormalized to mass `mu`.
pub fn escaping_sequence_energy(graph: &MetricGraph, shift: f64, width: f64, config: &MinimizerConfig) -> Result<f64, MinimizerError> {
    Ok(escaping_sequence(graph, shift, width, config)?.energy(config.problem.p))
}

fn escaping_sequence(graph: &MetricGraph, shift: f64, width: f64, config: &MinimizerConfig) -> Result<GraphFunction, MinimizerError> {
    if !(width > 0.0) {
        return Err(MinimizerError::Config("cutoff width must be positive".into()));
    }
    if !(shift >= 0.0) || shift > config.truncation - width {
        return Err(MinimizerError::Config(format!(
            "shift {shift} must lie in [0, {}] for cutoff width {width}",
            config.truncation - width
        )));
    }
    let params = SolitonParams::new(config.problem.p)?;
    let mesh = Arc::new(TruncatedMesh::uniform(graph, config.h, config.truncation)?);
    let k = mesh
        .edges()
        .iter()
        .position(|e| e.half_line)
        .ok_or_else(|| MinimizerError::Precondition("graph has no half-line".into()))?;
    escaping_start(&mesh, k, shift, width, &params, config.problem.mu)
}

/// The cut-off soliton centred `shift` down half-line `k` of the mesh.
pub(super) fn escaping_start(
    mesh: &Arc<TruncatedMesh>,
    k: usize,
    shift: f64,
    width: f64,
    params: &SolitonParams,
    mu: f64,
) -> Result<GraphFunction, MinimizerError> {
    let e = &mesh.edges()[k];
    let seeds: Vec<(usize, f64)> = e.coords.iter().enumerate().map(|(i, &x)| (e.node(i), (x - shift).abs())).collect();
    let dist = mesh.distances(&seeds);
    let floor = params.value(mu, width);
    let values = dist.iter().map(|&r| (params.value(mu, r) - floor).max(0.0)).collect();
    let mut u = GraphFunction::from_values(mesh.clone(), values)?;
    super::normalize(&mut u, mu);
    Ok(u)
}

/// Structure of a pendant-graph minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PendantStructure {
    /// Strictly increasing from the junction to the tip.
    pub pendant_monotone: bool,
    /// Largest nodal difference between the two half-lines.
    pub symmetry_error: f64,
    /// Root-mean-square misfit of `x -> phi_M(x + y)` on a half-line.
    pub fit_rms: f64,
    pub fitted_mass: f64,
    pub fitted_shift: f64,
    /// Outgoing derivatives at the junction.
    pub half_line_slopes: [f64; 2],
    pub pendant_slope: f64,
    pub kirchhoff_sum: f64,
    pub passed: bool,
}

fn outgoing_slope(samples: &[(f64, f64)]) -> f64 {
    let (x0, u0) = samples[0];
    let (x1, u1) = samples[1];
    let (x2, u2) = samples[2];
    let (d1, d2) = (x1 - x0, x2 - x1);
    -u0 * (2.0 * d1 + d2) / (d1 * (d1 + d2)) + u1 * (d1 + d2) / (d1 * d2) - u2 * d1 / (d2 * (d1 + d2))
}

/// Fit `x -> phi_M(x + y)` to the samples by Gauss-Newton from `(m, y)`.
fn fit_soliton(params: &SolitonParams, samples: &[(f64, f64)], mut m: f64, mut y: f64) -> (f64, f64, f64) {
    let residual = |m: f64, y: f64| -> f64 {
        let s: f64 = samples.iter().map(|&(x, u)| (params.value(m, x + y) - u).powi(2)).sum();
        (s / samples.len() as f64).sqrt()
    };
    let mut rms = residual(m, y);
    for _ in 0..50 {
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(x, u) in samples {
            let s = x + y;
            let r = params.value(m, s) - u;
            let dy = params.derivative(m, s);
            let z = m.powf(params.beta) * s;
            let dm = params.alpha * m.powf(params.alpha - 1.0) * params.unit(z)
                + m.powf(params.alpha) * params.unit_derivative(z) * params.beta * m.powf(params.beta - 1.0) * s;
            let j = [dm, dy];
            for a in 0..2 {
                jtr[a] += j[a] * r;
                for b in 0..2 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step_m = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let step_y = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-6 {
            let (m2, y2) = (m - t * step_m, y - t * step_y);
            if m2 > 0.0 {
                let r2 = residual(m2, y2);
                if r2 < rms {
                    (m, y, rms) = (m2, y2, r2);
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved || (step_m.abs() < 1e-14 * m && step_y.abs() < 1e-14) {
            break;
        }
    }
    (m, y, rms)
}

/// Structure checks for a minimizer on a pendant graph.
pub fn pendant_structure_check(report: &GroundStateReport) -> Result<PendantStructure, MinimizerError> {
    if report.verdict != Verdict::Attained {
        return Err(MinimizerError::Precondition(format!("verdict is {:?}, not ATTAINED", report.verdict)));
    }
    let u = &report.u;
    let graph = u.mesh().graph();
    let layout = pendant_layout(graph).ok_or_else(|| MinimizerError::Precondition("not a pendant graph".into()))?;
    let params = SolitonParams::new(report.p)?;

    let mut pendant = u.edge_samples(layout.pendant);
    if !layout.outward {
        pendant = pendant.iter().rev().map(|&(x, v)| (layout.length - x, v)).collect();
    }
    let pendant_monotone = pendant.windows(2).all(|w| w[1].1 > w[0].1);

    let left = u.edge_samples(layout.half_lines[0]);
    let right = u.edge_samples(layout.half_lines[1]);
    let symmetry_error = left.iter().zip(&right).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max);

    let a = left[0].1;
    let half_mass: f64 = left.windows(2).map(|w| (w[1].0 - w[0].0) / 3.0 * (w[0].1 * w[0].1 + w[0].1 * w[1].1 + w[1].1 * w[1].1)).sum();
    let start = solve_half_line(&params, a, 2.0 * half_mass)?;
    let (fitted_mass, fitted_shift, fit_rms) = fit_soliton(&params, &left, start.big_m, start.y);

    let half_line_slopes = [outgoing_slope(&left), outgoing_slope(&right)];
    let pendant_slope = outgoing_slope(&pendant);
    let kirchhoff_sum = half_line_slopes[0] + half_line_slopes[1] + pendant_slope;

    let passed = pendant_monotone
        && symmetry_error <= 1e-6
        && fit_rms <= 1e-3
        && fitted_mass > report.mu
        && fitted_shift > 0.0
        && half_line_slopes.iter().all(|&s| s < 0.0)
        && pendant_slope > 0.0
        && kirchhoff_sum.abs() <= 1e-3;
    Ok(PendantStructure {
        pendant_monotone,
        symmetry_error,
        fit_rms,
        fitted_mass,
        fitted_shift,
        half_line_slopes,
        pendant_slope,
        kirchhoff_sum,
        passed,
    })
}

/// The soliton transported onto a graph of the glued-line family: its value
/// at a point is `phi_mu` of the distance to the loop midpoint (or to the
/// junction for the line).
pub fn soliton_wrap(graph: &MetricGraph, mesh: Arc<TruncatedMesh>, params: &SolitonParams, mu: f64) -> Result<GraphFunction, MinimizerError> {
    let m = recognize_example1(graph)?;
    let seeds: Vec<(usize, f64)> = match (&m.class, &m.loop_edge, &m.junction) {
        (Example1Class::None, _, _) => return Err(MinimizerError::Precondition("graph is not in the glued-line family".into())),
        (_, Some(loop_id), _) => {
            let k = graph.edge_index(loop_id).expect("recognized loop exists");
            let e = &mesh.edges()[k];
            let mid = m.glue_points[0];
            e.coords.iter().enumerate().map(|(i, &x)| (e.node(i), (x - mid).abs())).collect()
        }
        (_, None, Some(junction)) => {
            let v = graph.vertex_index(junction).expect("recognized junction exists");
            vec![(mesh.vertex_node(v).expect("junction is finite"), 0.0)]
        }
        _ => return Err(MinimizerError::Precondition("graph is not in the glued-line family".into())),
    };
    let dist = mesh.distances(&seeds);
    Ok(GraphFunction::from_values(mesh, dist.iter().map(|&r| params.value(mu, r)).collect())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactnessReport {
    pub class: Example1Class,
    pub glue_points: Vec<f64>,
    /// `|E(u) - E(phi_mu, R)|`.
    pub energy_deviation: f64,
    /// Largest nodal deviation from the wrapped soliton.
    pub wrap_deviation: f64,
    pub report: GroundStateReport,
}

/// Minimize on a glued-line graph and compare with the wrapped soliton.
pub fn example1_exactness_check(graph: &MetricGraph, config: &MinimizerConfig) -> Result<ExactnessReport, MinimizerError> {
    let m = recognize_example1(graph)?;
    if m.class == Example1Class::None {
        return Err(MinimizerError::Precondition("graph is not in the glued-line family".into()));
    }
    let report = minimize(graph, config)?;
    let params = SolitonParams::new(config.problem.p)?;
    let mu = config.problem.mu;
    let wrap = soliton_wrap(graph, report.u.mesh().clone(), &params, mu)?;
    let wrap_deviation = report.u.values().iter().zip(wrap.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ExactnessReport {
        class: m.class,
        glue_points: m.glue_points,
        energy_deviation: (report.energy - params.energy(mu)).abs(),
        wrap_deviation,
        report,
    })
}
