//! Solves `(K + sigma M) x = r` on the free nodes of a mesh.
//!
//! Edge interiors are tridiagonal and are eliminated onto the vertex nodes;
//! the remaining dense vertex system is factored once by Cholesky.

use crate::mesh::TruncatedMesh;

struct EdgeBlock {
    first: usize,
    start: usize,
    end: Option<usize>,
    /// Coupling of the start vertex with the first interior node.
    c_start: f64,
    /// Coupling of the end vertex with the last interior node.
    c_end: f64,
    off: Vec<f64>,
    /// Thomas sweep factors.
    forward: Vec<f64>,
    inv_pivot: Vec<f64>,
    /// `T^-1 e_first` and `T^-1 e_last`.
    z_first: Vec<f64>,
    z_last: Vec<f64>,
}

impl EdgeBlock {
    fn interior(&self) -> usize {
        self.inv_pivot.len()
    }

    fn thomas(&self, rhs: &mut [f64]) {
        let m = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..m {
            rhs[i] = (rhs[i] - self.off[i - 1] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..m - 1).rev() {
            rhs[i] -= self.forward[i] * rhs[i + 1];
        }
    }
}

pub(crate) struct ShiftedStiffness {
    blocks: Vec<EdgeBlock>,
    vertices: usize,
    free: usize,
    total: usize,
    /// Lower Cholesky factor of the vertex Schur complement, row-major.
    factor: Vec<f64>,
}

impl ShiftedStiffness {
    pub(crate) fn new(mesh: &TruncatedMesh, sigma: f64) -> Self {
        let nv = mesh.vertex_count();
        let free = mesh.free_count();
        let mut schur = vec![0.0; nv * nv];
        let mut blocks = Vec::new();

        for e in mesh.edges() {
            let n = e.intervals();
            let m = e.interior_count();
            let end = (e.end_node < free).then_some(e.end_node);
            let mut diag = vec![0.0; m];
            let mut off = vec![0.0; m.saturating_sub(1)];
            let (mut c_start, mut c_end) = (0.0, 0.0);
            for i in 0..n {
                let w = e.coords[i + 1] - e.coords[i];
                let d = 1.0 / w + sigma * w / 3.0;
                let o = -1.0 / w + sigma * w / 6.0;
                if i == 0 {
                    schur[e.start_node * nv + e.start_node] += d;
                } else {
                    diag[i - 1] += d;
                }
                if i + 1 == n {
                    if let Some(v) = end {
                        schur[v * nv + v] += d;
                    }
                } else {
                    diag[i] += d;
                }
                match (i == 0, i + 1 == n) {
                    (false, false) => off[i - 1] += o,
                    (true, false) => c_start = o,
                    (false, true) => c_end = o,
                    (true, true) => {
                        if let Some(v) = end {
                            schur[e.start_node * nv + v] += o;
                            schur[v * nv + e.start_node] += o;
                        }
                    }
                }
            }
            if m == 0 {
                continue;
            }

            let mut forward = vec![0.0; m];
            let mut inv_pivot = vec![0.0; m];
            let mut prev = 0.0;
            for i in 0..m {
                let pivot = diag[i] - if i > 0 { off[i - 1] * prev } else { 0.0 };
                inv_pivot[i] = 1.0 / pivot;
                prev = if i + 1 < m { off[i] / pivot } else { 0.0 };
                forward[i] = prev;
            }
            let mut block = EdgeBlock {
                first: e.first_interior,
                start: e.start_node,
                end,
                c_start,
                c_end,
                off,
                forward,
                inv_pivot,
                z_first: Vec::new(),
                z_last: Vec::new(),
            };
            let mut z = vec![0.0; m];
            z[0] = 1.0;
            block.thomas(&mut z);
            block.z_first = z;
            let mut z = vec![0.0; m];
            z[m - 1] = 1.0;
            block.thomas(&mut z);
            block.z_last = z;

            let s = block.start;
            schur[s * nv + s] -= c_start * c_start * block.z_first[0];
            if let Some(v) = end {
                schur[s * nv + v] -= c_start * c_end * block.z_last[0];
                schur[v * nv + s] -= c_end * c_start * block.z_first[m - 1];
                schur[v * nv + v] -= c_end * c_end * block.z_last[m - 1];
            }
            blocks.push(block);
        }

        let factor = cholesky(schur, nv);
        ShiftedStiffness { blocks, vertices: nv, free, total: mesh.node_count(), factor }
    }

    /// Solution on the free nodes; fixed nodes are returned as zero.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let nv = self.vertices;
        let mut x = vec![0.0; self.total];
        x[..self.free].copy_from_slice(&rhs[..self.free]);

        for b in &self.blocks {
            let m = b.interior();
            let y = &mut x[b.first..b.first + m];
            b.thomas(y);
        }
        let mut xv: Vec<f64> = x[..nv].to_vec();
        for b in &self.blocks {
            let m = b.interior();
            xv[b.start] -= b.c_start * x[b.first];
            if let Some(v) = b.end {
                xv[v] -= b.c_end * x[b.first + m - 1];
            }
        }
        cholesky_solve(&self.factor, nv, &mut xv);
        x[..nv].copy_from_slice(&xv);
        for b in &self.blocks {
            let m = b.interior();
            let a = b.c_start * xv[b.start];
            let c = b.end.map_or(0.0, |v| b.c_end * xv[v]);
            for i in 0..m {
                x[b.first + i] -= a * b.z_first[i] + c * b.z_last[i];
            }
        }
        x
    }
}

fn cholesky(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        assert!(d > 0.0, "vertex system is not positive definite");
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    a
}

fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}
