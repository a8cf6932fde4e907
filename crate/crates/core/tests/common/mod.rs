//! Oracles shared by the integration tests.
#![allow(dead_code)]

use nls_graphs::graph::{Edge, MetricGraph, Vertex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite five-point Gauss-Legendre with `panels` equal panels.
pub fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * w;
            0.5 * w * GL5.iter().map(|&(x, c)| c * f(mid + 0.5 * w * x)).sum::<f64>()
        })
        .sum()
}

/// Components of the graph without edge `skip`, as one label per vertex.
pub fn labels(g: &MetricGraph, skip: usize) -> Vec<usize> {
    let n = g.vertices().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (k, e) in g.edges().iter().enumerate() {
        if k == skip {
            continue;
        }
        let a = find(&mut parent, g.vertex_index(&e.from).unwrap());
        let b = find(&mut parent, g.vertex_index(&e.to).unwrap());
        parent[a] = b;
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Condition (H) by removing every edge in turn; `None` for compact graphs.
pub fn condition_h_brute_force(g: &MetricGraph) -> Option<bool> {
    if g.vertices().iter().all(|v| !v.at_infinity) {
        return None;
    }
    Some((0..g.edges().len()).all(|k| {
        let label = labels(g, k);
        label.iter().all(|&c| label.iter().enumerate().any(|(v, &d)| d == c && g.vertices()[v].at_infinity))
    }))
}

/// Connected multigraph with at most eight edges: a random spanning tree on the
/// finite vertices, extra edges and loops, then half-lines.
pub fn random_graph(rng: &mut ChaCha8Rng) -> MetricGraph {
    let n = rng.random_range(1..=4);
    let mut vertices: Vec<Vertex> = (0..n).map(|i| Vertex::finite(format!("v{i}"))).collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push(Edge::new(format!("t{i}"), format!("v{i}"), format!("v{j}"), rng.random_range(0.5..2.0)));
    }
    let halves = rng.random_range(0..=3.min(8 - edges.len()));
    let extra = rng.random_range(0..=(8 - edges.len() - halves));
    for k in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        edges.push(Edge::new(format!("e{k}"), format!("v{a}"), format!("v{b}"), rng.random_range(0.5..2.0)));
    }
    for k in 0..halves {
        let a = rng.random_range(0..n);
        vertices.push(Vertex::infinity(format!("inf{k}")));
        edges.push(Edge::half_line(format!("h{k}"), format!("v{a}"), format!("inf{k}")));
    }
    MetricGraph::new(vertices, edges)
}

/// Exact ground state of the cubic problem (`p = 4`, mass 1) on two
/// half-lines with a pendant of length `ell`, from the first integral.
///
/// With `F(u) = lambda u^2 - u^4 / 2`, the half-lines satisfy `u'^2 = F(u)`
/// and the pendant `u'^2 = F(u) - F(b)` with tip value `b`. Kirchhoff at the
/// junction value `a` gives `F(a) = -F(b) / 3`; the root with `a^2 >= lambda`
/// is the one continuing the soliton as the pendant shrinks.
#[derive(Debug, Clone, Copy)]
pub struct PendantState {
    pub lambda: f64,
    /// Junction value.
    pub a: f64,
    /// Tip value.
    pub b: f64,
    pub mass: f64,
    pub energy: f64,
}

fn f(u: f64, lambda: f64) -> f64 {
    lambda * u * u - 0.5 * u.powi(4)
}

const PANELS: usize = 400;

/// `int_a^b g(u) / sqrt(F(u) - F(b)) du` with `u = b - w^2`, using
/// `F(u) - F(b) = w^2 (u + b) ((u^2 + b^2)/2 - lambda)`.
fn pendant_integral(g: impl Fn(f64) -> f64, lambda: f64, a: f64, b: f64) -> f64 {
    gauss(
        |w| {
            let u = b - w * w;
            2.0 * g(u) / ((u + b) * (0.5 * (u * u + b * b) - lambda)).sqrt()
        },
        0.0,
        (b - a).sqrt(),
        PANELS,
    )
}

fn junction(lambda: f64, b: f64) -> f64 {
    let c = -f(b, lambda) / 3.0;
    (lambda + (lambda * lambda - 2.0 * c).max(0.0).sqrt()).sqrt()
}

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn state_at(lambda: f64, ell: f64) -> PendantState {
    // b^2 runs over (2 lambda, 3 lambda]; the pendant length grows from 0
    let length = |b: f64| pendant_integral(|_| 1.0, lambda, junction(lambda, b), b);
    let (lo, hi) = ((2.0 * lambda).sqrt() * (1.0 + 1e-12), (3.0 * lambda).sqrt());
    let b = if length(hi) <= ell { hi } else { bisect(lo, hi, |b| length(b) - ell) };
    let a = junction(lambda, b);
    let fb = f(b, lambda);
    let pend_mass = pendant_integral(|u| u * u, lambda, a, b);
    let pend_quartic = pendant_integral(|u| u.powi(4), lambda, a, b);
    let pend_dirichlet = pendant_integral(|u| f(u, lambda) - fb, lambda, a, b);
    // a half-line carries c sech(k (x + y)) with c^2 = 2 lambda, k^2 = lambda;
    // t = tanh(k y) at the junction
    let (c, k) = ((2.0 * lambda).sqrt(), lambda.sqrt());
    let t = (1.0 - a * a / (c * c)).max(0.0).sqrt();
    let half_mass = c * c / k * (1.0 - t);
    let half_dirichlet = c * c * k * (1.0 - t.powi(3)) / 3.0;
    let half_quartic = c.powi(4) / k * ((1.0 - t) - (1.0 - t.powi(3)) / 3.0);
    let mass = pend_mass + 2.0 * half_mass;
    let energy = 0.5 * (pend_dirichlet + 2.0 * half_dirichlet) - 0.25 * (pend_quartic + 2.0 * half_quartic);
    PendantState { lambda, a, b, mass, energy }
}

pub fn pendant_ground_state(ell: f64) -> PendantState {
    // the soliton multiplier 1/16 lies inside the bracket for every ell
    let lambda = bisect(0.01, 0.5, |l| state_at(l, ell).mass - 1.0);
    state_at(lambda, ell)
}
