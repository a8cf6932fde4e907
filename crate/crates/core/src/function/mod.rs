//! Continuous piecewise-linear functions on a truncated metric graph.

mod csv;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::mesh::TruncatedMesh;

pub use self::csv::{CsvError, CsvMeta};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("expected {expected} nodal values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("level {0} is a nodal value; perturb it")]
    AmbiguousLevel(f64),
    #[error("function takes negative values")]
    Negative,
    #[error("functions live on different meshes")]
    MeshMismatch,
    #[error("level {0} must be nonnegative")]
    NegativeLevel(f64),
}

/// Gauss-Legendre points on `[0, 1]` and their weights.
const GAUSS: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// `|u|^p`.
#[inline]
pub(crate) fn abs_pow(u: f64, p: f64) -> f64 {
    if p == 4.0 {
        let s = u * u;
        s * s
    } else if p == 3.0 {
        (u * u * u).abs()
    } else {
        u.abs().powf(p)
    }
}

/// `|u|^(p-2) u`.
#[inline]
fn signed_pow(u: f64, p: f64) -> f64 {
    if p == 4.0 {
        u * u * u
    } else if p == 3.0 {
        u * u.abs()
    } else if u == 0.0 {
        0.0
    } else {
        u.abs().powf(p - 2.0) * u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityResiduals {
    pub lambda: f64,
    /// Strong-form residual of `u'' + |u|^(p-2) u = lambda u`, in L2 per unit length.
    pub el_residual: f64,
    /// Largest Kirchhoff sum of outgoing derivatives over the finite vertices.
    pub kirchhoff_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    mesh: Arc<TruncatedMesh>,
    values: Vec<f64>,
}

impl GraphFunction {
    pub fn zeros(mesh: Arc<TruncatedMesh>) -> Self {
        let n = mesh.node_count();
        GraphFunction { mesh, values: vec![0.0; n] }
    }

    /// Wrap nodal values; the far nodes are forced to zero.
    pub fn from_values(mesh: Arc<TruncatedMesh>, mut values: Vec<f64>) -> Result<Self, FunctionError> {
        if values.len() != mesh.node_count() {
            return Err(FunctionError::WrongLength { expected: mesh.node_count(), got: values.len() });
        }
        values[mesh.free_count()..].iter_mut().for_each(|v| *v = 0.0);
        Ok(GraphFunction { mesh, values })
    }

    /// Sample `f(edge index, abscissa)` at the nodes. A vertex takes the value
    /// from the first incident edge that reaches it.
    pub fn from_fn(mesh: Arc<TruncatedMesh>, f: impl Fn(usize, f64) -> f64) -> Self {
        let mut values = vec![f64::NAN; mesh.node_count()];
        for (k, e) in mesh.edges().iter().enumerate() {
            for (i, &x) in e.coords.iter().enumerate() {
                let n = e.node(i);
                if values[n].is_nan() {
                    values[n] = f(k, x);
                }
            }
        }
        let free = mesh.free_count();
        values[free..].iter_mut().for_each(|v| *v = 0.0);
        GraphFunction { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<TruncatedMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same mesh, new values.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> GraphFunction {
        debug_assert_eq!(values.len(), self.values.len());
        GraphFunction { mesh: self.mesh.clone(), values }
    }

    pub fn abs(&self) -> GraphFunction {
        self.with_values(self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation at abscissa `x` of edge `edge`.
    pub fn value_at(&self, edge: usize, x: f64) -> f64 {
        let e = &self.mesh.edges()[edge];
        let c = &e.coords;
        if x <= 0.0 {
            return self.values[e.node(0)];
        }
        if x >= e.length() {
            return self.values[e.node(c.len() - 1)];
        }
        let i = c.partition_point(|&xi| xi <= x).min(c.len() - 1).max(1);
        let t = (x - c[i - 1]) / (c[i] - c[i - 1]);
        (1.0 - t) * self.values[e.node(i - 1)] + t * self.values[e.node(i)]
    }

    /// `(abscissa, value)` pairs along an edge.
    pub fn edge_samples(&self, edge: usize) -> Vec<(f64, f64)> {
        let e = &self.mesh.edges()[edge];
        e.coords.iter().enumerate().map(|(i, &x)| (x, self.values[e.node(i)])).collect()
    }

    /// `int u^2`, exact.
    pub fn mass(&self) -> f64 {
        self.mesh
            .intervals()
            .iter()
            .map(|iv| {
                let (a, b) = (self.values[iv.a], self.values[iv.b]);
                iv.width / 3.0 * (a * a + a * b + b * b)
            })
            .sum()
    }

    /// `int |u|^p`, three-point Gauss per interval.
    pub fn lp_norm_p(&self, p: f64) -> f64 {
        self.mesh
            .intervals()
            .iter()
            .map(|iv| {
                let (a, b) = (self.values[iv.a], self.values[iv.b]);
                iv.width * GAUSS.iter().map(|&(s, w)| w * abs_pow(a + s * (b - a), p)).sum::<f64>()
            })
            .sum()
    }

    /// `int |u'|^2`, exact.
    pub fn dirichlet(&self) -> f64 {
        self.mesh
            .intervals()
            .iter()
            .map(|iv| {
                let d = self.values[iv.b] - self.values[iv.a];
                d * d / iv.width
            })
            .sum()
    }

    pub fn energy(&self, p: f64) -> f64 {
        0.5 * self.dirichlet() - self.lp_norm_p(p) / p
    }

    /// Nodal gradient of [`GraphFunction::energy`]; zero at the far nodes.
    pub fn energy_gradient(&self, p: f64) -> GraphFunction {
        self.with_values(self.gradient_values(p))
    }

    pub(crate) fn gradient_values(&self, p: f64) -> Vec<f64> {
        let mut g = self.mesh.stiffness_apply(&self.values);
        for iv in self.mesh.intervals() {
            let (a, b) = (self.values[iv.a], self.values[iv.b]);
            let (mut ga, mut gb) = (0.0, 0.0);
            for &(s, w) in &GAUSS {
                let f = w * signed_pow(a + s * (b - a), p);
                ga += f * (1.0 - s);
                gb += f * s;
            }
            g[iv.a] -= iv.width * ga;
            g[iv.b] -= iv.width * gb;
        }
        let free = self.mesh.free_count();
        g[free..].iter_mut().for_each(|v| *v = 0.0);
        g
    }

    /// `meas{u > t}`, exact for piecewise-linear `u`.
    pub fn distribution_function(&self, t: f64) -> Result<f64, FunctionError> {
        if t < 0.0 {
            return Err(FunctionError::NegativeLevel(t));
        }
        Ok(self
            .mesh
            .intervals()
            .iter()
            .map(|iv| superlevel_fraction(self.values[iv.a], self.values[iv.b], t) * iv.width)
            .sum())
    }

    /// Number of points where `u = t`.
    pub fn count_preimages(&self, t: f64) -> Result<usize, FunctionError> {
        if self.values.iter().any(|&v| v == t) {
            return Err(FunctionError::AmbiguousLevel(t));
        }
        Ok(self
            .mesh
            .intervals()
            .iter()
            .filter(|iv| (self.values[iv.a] - t) * (self.values[iv.b] - t) < 0.0)
            .count())
    }

    /// Multiplier and residuals of the Euler-Lagrange system.
    pub fn optimality_residuals(&self, p: f64) -> Result<OptimalityResiduals, FunctionError> {
        if self.values.iter().all(|&v| v == 0.0) {
            return Err(FunctionError::ZeroFunction);
        }
        let mesh = &*self.mesh;
        let g = self.gradient_values(p);
        let mu = mesh.mass_apply(&self.values);
        let lumped = mesh.lumped_mass();
        let free = mesh.free_count();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..free {
            num += g[i] * mu[i] / lumped[i];
            den += mu[i] * mu[i] / lumped[i];
        }
        let lambda = -num / den;
        let sq: f64 = (mesh.vertex_count()..free)
            .map(|i| {
                let r = g[i] + lambda * mu[i];
                r * r / lumped[i]
            })
            .sum();
        let el_residual = (sq / mesh.total_length()).sqrt();

        let mut sums = vec![0.0; mesh.vertex_count()];
        for e in mesh.edges() {
            let n = e.coords.len();
            let forward: Vec<(f64, f64)> = (0..n.min(3)).map(|i| (e.coords[i], self.values[e.node(i)])).collect();
            sums[e.start_node] += one_sided_derivative(&forward);
            if !e.half_line {
                let backward: Vec<(f64, f64)> =
                    (0..n.min(3)).map(|i| (e.length() - e.coords[n - 1 - i], self.values[e.node(n - 1 - i)])).collect();
                sums[e.end_node] += one_sided_derivative(&backward);
            }
        }
        let kirchhoff_residual = sums.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        Ok(OptimalityResiduals { lambda, el_residual, kirchhoff_residual })
    }
}

/// Fraction of an interval with end values `a`, `b` where the interpolant exceeds `t`.
#[inline]
pub(crate) fn superlevel_fraction(a: f64, b: f64, t: f64) -> f64 {
    match (a > t, b > t) {
        (true, true) => 1.0,
        (false, false) => 0.0,
        (true, false) => (a - t) / (a - b),
        (false, true) => (b - t) / (b - a),
    }
}

/// Derivative at the first point of a quadratic (or line) through the samples.
fn one_sided_derivative(s: &[(f64, f64)]) -> f64 {
    if s.len() < 3 {
        return (s[1].1 - s[0].1) / (s[1].0 - s[0].0);
    }
    let d1 = s[1].0 - s[0].0;
    let d2 = s[2].0 - s[1].0;
    -s[0].1 * (2.0 * d1 + d2) / (d1 * (d1 + d2)) + s[1].1 * (d1 + d2) / (d1 * d2) - s[2].1 * d1 / (d2 * (d1 + d2))
}
