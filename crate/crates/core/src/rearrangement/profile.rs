//! Exact distribution function of a nonnegative piecewise-linear function.

use crate::function::GraphFunction;

/// `rho` sampled at the distinct nodal values, with left limits.
pub(crate) struct Profile {
    /// Distinct nodal values, increasing.
    pub levels: Vec<f64>,
    /// `rho(levels[k])`.
    pub rho: Vec<f64>,
    /// `lim_{t -> levels[k]-} rho(t)`; exceeds `rho` only across plateaus.
    pub rho_left: Vec<f64>,
    /// Number of transversal crossings for `t` strictly between `levels[k]` and `levels[k+1]`.
    pub crossings: Vec<usize>,
}

impl Profile {
    pub(crate) fn new(u: &GraphFunction) -> Profile {
        let values = u.values();
        let mut levels: Vec<f64> = values.to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let n = levels.len();
        let index = |v: f64| levels.binary_search_by(|x| x.total_cmp(&v)).expect("nodal value is a level");

        let mut below = vec![0.0; n + 1];
        let mut active = vec![0.0; n];
        let mut plateau = vec![0.0; n];
        let mut crossing_diff = vec![0i64; n + 1];
        for iv in u.mesh().intervals() {
            let (a, b) = (values[iv.a], values[iv.b]);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (i, j) = (index(lo), index(hi));
            // levels strictly below lo see the whole interval
            below[i] += iv.width;
            if i == j {
                plateau[i] += iv.width;
                continue;
            }
            let span = hi - lo;
            for k in i..j {
                active[k] += iv.width * (hi - levels[k]) / span;
            }
            crossing_diff[i] += 1;
            crossing_diff[j] -= 1;
        }
        // suffix sum: rho(t_k) collects intervals whose low end exceeds t_k
        let mut rho = vec![0.0; n];
        let mut acc = 0.0;
        for k in (0..n).rev() {
            rho[k] = acc + active[k];
            acc += below[k];
        }
        let rho_left = (0..n).map(|k| rho[k] + plateau[k]).collect();
        let mut crossings = Vec::with_capacity(n.saturating_sub(1));
        let mut c = 0i64;
        for d in crossing_diff.iter().take(n.saturating_sub(1)) {
            c += d;
            crossings.push(c as usize);
        }
        Profile { levels, rho, rho_left, crossings }
    }

    /// Breakpoints `(x, t)` of the decreasing rearrangement, `x` increasing
    /// from 0 to the total length.
    pub(crate) fn breakpoints(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * self.levels.len());
        for k in (0..self.levels.len()).rev() {
            let t = self.levels[k];
            for x in [self.rho[k], self.rho_left[k]] {
                let x = pts.last().map_or(x, |&(px, _)| x.max(px));
                match pts.last_mut() {
                    // generalized inverse: at a repeated abscissa keep the smaller level
                    Some(last) if last.0 == x => last.1 = t,
                    _ => pts.push((x, t)),
                }
            }
        }
        if let Some(first) = pts.first_mut() {
            first.0 = 0.0;
        }
        pts
    }

    /// `N(t) >= min_count` for every `t` strictly between the smallest and largest value.
    pub(crate) fn crossings_at_least(&self, min_count: usize) -> bool {
        self.crossings.iter().all(|&c| c >= min_count)
    }
}

/// Linear interpolation on increasing abscissae.
pub(crate) fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    if x <= pts[0].0 {
        return pts[0].1;
    }
    let last = pts[pts.len() - 1];
    if x >= last.0 {
        return last.1;
    }
    let i = pts.partition_point(|p| p.0 <= x);
    let (x0, t0) = pts[i - 1];
    let (x1, t1) = pts[i];
    t0 + (t1 - t0) * (x - x0) / (x1 - x0)
}
