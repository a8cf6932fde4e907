//! Decreasing, symmetric and pendant (hybrid) rearrangements of nonnegative
//! graph functions.
//!
//! Outputs are piecewise linear on the breakpoints of the exact distribution
//! function, so they are equimeasurable with the input up to rounding.

mod profile;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::function::GraphFunction;
use crate::graph::{builders, Edge, MetricGraph, Vertex};
use crate::mesh::{MeshError, TruncatedMesh};

use self::profile::{interpolate, Profile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RearrangementError {
    #[error("function takes negative values")]
    Negative,
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("no level has superlevel measure {target} (range {low}..{high})")]
    ThresholdNotFound { target: f64, low: f64, high: f64 },
    #[error("graph is not two half-lines with a pendant at their common vertex")]
    NotPendantGraph,
    #[error("functions live on different graphs")]
    GraphMismatch,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Audit figures for input and output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Audit {
    pub input_mass: f64,
    pub output_mass: f64,
    pub input_dirichlet: f64,
    pub output_dirichlet: f64,
    pub input_sup: f64,
    pub output_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementResult {
    pub output: GraphFunction,
    /// Threshold with `meas{u > tau} = l` (hybrid only).
    pub tau: Option<f64>,
    pub audit: Audit,
    /// `N(t) >= 2` for a.e. `t` between the extreme values of the input.
    pub two_preimages: bool,
    input: GraphFunction,
}

impl RearrangementResult {
    pub fn input(&self) -> &GraphFunction {
        &self.input
    }

    /// `(int |u|^p, int |output|^p)`.
    pub fn lp_pair(&self, p: f64) -> (f64, f64) {
        (self.input.lp_norm_p(p), self.output.lp_norm_p(p))
    }

    fn new(input: &GraphFunction, output: GraphFunction, tau: Option<f64>, profile: &Profile) -> Self {
        let audit = Audit {
            input_mass: input.mass(),
            output_mass: output.mass(),
            input_dirichlet: input.dirichlet(),
            output_dirichlet: output.dirichlet(),
            input_sup: input.max(),
            output_sup: output.max(),
        };
        RearrangementResult { output, tau, audit, two_preimages: profile.crossings_at_least(2), input: input.clone() }
    }
}

fn checked_profile(u: &GraphFunction) -> Result<Profile, RearrangementError> {
    if u.values().iter().any(|&v| v < 0.0 || v.is_nan()) {
        return Err(RearrangementError::Negative);
    }
    if u.values().iter().all(|&v| v == 0.0) {
        return Err(RearrangementError::ZeroFunction);
    }
    Ok(Profile::new(u))
}

fn build(graph: &MetricGraph, truncation: f64, coords: Vec<Vec<f64>>, values: &[Vec<f64>]) -> Result<GraphFunction, RearrangementError> {
    let mesh = Arc::new(TruncatedMesh::from_coordinates(graph, truncation, coords)?);
    let mut nodal = vec![0.0; mesh.node_count()];
    for (e, vals) in mesh.edges().iter().zip(values) {
        for (i, &v) in vals.iter().enumerate() {
            nodal[e.node(i)] = v;
        }
    }
    Ok(GraphFunction::from_values(mesh, nodal).expect("length matches mesh"))
}

fn split(pts: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    pts.iter().copied().unzip()
}

/// `u*` on `[0, omega)`: a single half-line when the input has half-lines,
/// otherwise a segment.
pub fn decreasing_rearrangement(u: &GraphFunction) -> Result<RearrangementResult, RearrangementError> {
    let profile = checked_profile(u)?;
    let pts = profile.breakpoints();
    let omega = pts.last().unwrap().0;
    let (xs, ts) = split(&pts);
    let output = if u.mesh().graph().half_line_count() > 0 {
        build(&builders::half_line(), omega, vec![xs], &[ts])?
    } else {
        build(&builders::segment(omega), omega, vec![xs], &[ts])?
    };
    Ok(RearrangementResult::new(u, output, None, &profile))
}

/// `u^(x) = u*(2|x|)` on `(-omega/2, omega/2)`: the line when the input has
/// half-lines, otherwise a symmetric segment with a midpoint vertex.
pub fn symmetric_rearrangement(u: &GraphFunction) -> Result<RearrangementResult, RearrangementError> {
    let profile = checked_profile(u)?;
    let pts = profile.breakpoints();
    let half = 0.5 * pts.last().unwrap().0;
    let (xs, ts) = split(&pts);
    let xs: Vec<f64> = xs.iter().map(|x| 0.5 * x).collect();
    let graph = if u.mesh().graph().half_line_count() > 0 {
        builders::line()
    } else {
        MetricGraph::new(
            vec![Vertex::finite("o"), Vertex::finite("l"), Vertex::finite("r")],
            vec![Edge::new("left", "o", "l", half), Edge::new("right", "o", "r", half)],
        )
    };
    let output = build(&graph, half, vec![xs.clone(), xs], &[ts.clone(), ts])?;
    Ok(RearrangementResult::new(u, output, None, &profile))
}

/// `tau` with `meas{u > tau} = target` to relative `1e-10`.
pub fn find_threshold(u: &GraphFunction, target: f64) -> Result<f64, RearrangementError> {
    let profile = checked_profile(u)?;
    threshold_on(u, &profile.breakpoints(), target, false)
}

/// Abscissae closer than this (relative) are the same breakpoint.
const SNAP: f64 = 1e-12;

/// Inverse of the piecewise-linear distribution function, read off the
/// breakpoint table. With `allow_plateau`, a plateau level whose superlevel
/// measures straddle `target` is accepted.
fn threshold_on(u: &GraphFunction, pts: &[(f64, f64)], target: f64, allow_plateau: bool) -> Result<f64, RearrangementError> {
    let support = u.distribution_function(0.0).expect("zero is a valid level");
    let not_found = || RearrangementError::ThresholdNotFound { target, low: 0.0, high: support };
    if !(target > 0.0 && target < support) {
        return Err(not_found());
    }
    let eps = SNAP * target;
    let i = pts.partition_point(|p| p.0 < target).max(1);
    let ((x0, t0), (x1, t1)) = (pts[i - 1], pts[i]);
    let tau = if target - x0 <= eps {
        t0
    } else if x1 - target <= eps {
        t1
    } else if t0 == t1 {
        if !allow_plateau {
            return Err(not_found());
        }
        t0
    } else {
        t0 + (t1 - t0) * (target - x0) / (x1 - x0)
    };
    if !allow_plateau && (u.distribution_function(tau).expect("levels are nonnegative") - target).abs() > 1e-10 * target {
        return Err(not_found());
    }
    Ok(tau)
}

/// Layout of a pendant graph: the pendant edge, its orientation, the two half-lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendantLayout {
    pub pendant: usize,
    /// Pendant edge runs from the junction to the tip.
    pub outward: bool,
    pub half_lines: [usize; 2],
    pub length: f64,
}

pub fn pendant_layout(graph: &MetricGraph) -> Option<PendantLayout> {
    if graph.edges().len() != 3 || graph.half_line_count() != 2 || !graph.validate().is_valid() {
        return None;
    }
    let edges = graph.edges();
    let half: Vec<usize> = (0..3).filter(|&k| edges[k].length.is_infinite()).collect();
    let pendant = (0..3).find(|&k| !edges[k].length.is_infinite())?;
    let junction = &edges[half[0]].from;
    if edges[half[1]].from != *junction || edges[pendant].is_loop() {
        return None;
    }
    let e = &edges[pendant];
    let outward = if e.from == *junction {
        true
    } else if e.to == *junction {
        false
    } else {
        return None;
    };
    Some(PendantLayout { pendant, outward, half_lines: [half[0], half[1]], length: e.length.finite()? })
}

/// The pendant rearrangement: high values increasing along the pendant,
/// low values symmetric and decreasing on the line, glued at `tau`.
pub fn hybrid_rearrangement(u: &GraphFunction) -> Result<RearrangementResult, RearrangementError> {
    let graph = u.mesh().graph();
    let layout = pendant_layout(graph).ok_or(RearrangementError::NotPendantGraph)?;
    let profile = checked_profile(u)?;
    let ell = layout.length;
    let pts = profile.breakpoints();
    let tau = threshold_on(u, &pts, ell, true)?;

    // breakpoints within SNAP of ell merge into the junction point (ell, tau)
    let eps = SNAP * ell;
    let mut upper: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.0 < ell - eps).collect();
    upper.push((ell, tau));
    let mut lower: Vec<(f64, f64)> = vec![(0.0, tau)];
    lower.extend(pts.iter().filter(|p| p.0 > ell + eps).map(|&(x, t)| (0.5 * (x - ell), t)));
    let truncation = u.mesh().truncation();
    // the far end sits exactly at the truncation length
    lower.retain(|p| p.0 < truncation);
    lower.push((truncation, 0.0));

    let pendant: Vec<(f64, f64)> = if layout.outward {
        upper.iter().rev().map(|&(x, t)| (ell - x, t)).collect()
    } else {
        upper
    };
    let mut coords = vec![Vec::new(); 3];
    let mut values = vec![Vec::new(); 3];
    (coords[layout.pendant], values[layout.pendant]) = split(&pendant);
    for k in layout.half_lines {
        (coords[k], values[k]) = split(&lower);
    }
    let output = build(graph, truncation, coords, &values)?;
    Ok(RearrangementResult::new(u, output, Some(tau), &profile))
}

impl GraphFunction {
    /// Interpolate onto another mesh of the same graph.
    pub fn resample_onto(&self, mesh: Arc<TruncatedMesh>) -> Result<GraphFunction, RearrangementError> {
        if mesh.graph() != self.mesh().graph() {
            return Err(RearrangementError::GraphMismatch);
        }
        Ok(GraphFunction::from_fn(mesh, |k, x| self.value_at(k, x)))
    }
}

/// `N(t) >= 2` for a.e. `t` between the extreme values of `u`.
pub fn has_two_preimages(u: &GraphFunction) -> bool {
    Profile::new(u).crossings_at_least(2)
}

/// Value of the decreasing rearrangement at `x`, for tests and diagnostics.
pub fn decreasing_value(u: &GraphFunction, x: f64) -> Result<f64, RearrangementError> {
    Ok(interpolate(&checked_profile(u)?.breakpoints(), x))
}
