//! Coupling between coarse pressure and fine velocity.

use crate::exec;
use crate::mesh::FineSource;

use super::{Discretization, VectorField};

/// Coarse piecewise-linear function evaluated at every fine node.
pub fn interpolate_to_fine(disc: &Discretization, p: &[f64]) -> Vec<f64> {
    let src = &disc.mesh.fine_source;
    exec::map_range(src.len(), |f| match src[f] {
        FineSource::Coarse(c) => p[c],
        FineSource::Midpoint(a, b) => 0.5 * (p[a] + p[b]),
    })
}

/// Transpose of [`interpolate_to_fine`]: weights of fine nodal values summed
/// onto the coarse nodes.
pub fn restrict_to_coarse(disc: &Discretization, f: &[f64]) -> Vec<f64> {
    exec::map_range(disc.coarse_nodes(), |c| {
        disc.restriction[c].iter().fold(0.0, |s, &(n, w)| s + w * f[n])
    })
}

/// `b_{m,i} = \int p \, \partial w_m / \partial x_i` for the coarse pressure
/// `p`, one vector per component. On each fine element the integral of the
/// interpolated pressure is its vertex mean times the volume, which is exact.
pub fn pressure_gradient_rhs(disc: &Discretization, p: &[f64]) -> VectorField {
    let pf = interpolate_to_fine(disc, p);
    let ne = disc.fine_elements();
    let means: Vec<f64> = exec::map_range(ne, |t| {
        let v = disc.fine_values(t, &pf);
        0.25 * (v[0] + v[1] + v[2] + v[3]) * disc.fine_geom[t].volume
    });
    let mut local = vec![[0.0; 4]; ne];
    let mut out = VectorField::zeros(disc.fine_nodes());
    for (c, comp) in out.0.iter_mut().enumerate() {
        exec::fill(&mut local, |t| disc.fine_geom[t].grads.map(|g| means[t] * g[c]));
        disc.gather_fine(local.as_flattened(), comp);
    }
    out
}

/// `r_k = \int q_k \, div u` for every coarse basis function `q_k`.
///
/// The divergence is constant on each fine element and `q_k` is linear
/// there, so the fine element contributes `div u * V/4` times the value of
/// `q_k` at each of its vertices; these weights are the interpolation
/// weights summed by [`restrict_to_coarse`].
pub fn divergence_residual(disc: &Discretization, u: &VectorField) -> Vec<f64> {
    let ne = disc.fine_elements();
    let local: Vec<[f64; 4]> = exec::map_range(ne, |t| {
        let g = &disc.fine_geom[t];
        let n = disc.mesh.fine_tets[t].nodes;
        [0.25 * g.volume * g.divergence(n.map(|k| u.at(k))); 4]
    });
    let mut fine = vec![0.0; disc.fine_nodes()];
    disc.gather_fine(local.as_flattened(), &mut fine);
    restrict_to_coarse(disc, &fine)
}


/// Sparse form of the pressure gradient `G` and divergence `D = G^T`.
///
/// Row `m` of `G` holds `\int q_k grad w_m` for every coarse node `k`
/// sharing an element with fine node `m`; the transpose is stored separately
/// so both products are row-parallel and deterministic.
#[derive(Debug, Clone)]
pub struct MixedOperator {
    row_start: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<[f64; 3]>,
    col_start: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<[f64; 3]>,
}

impl MixedOperator {
    pub fn new(disc: &Discretization) -> Self {
        let mesh = &disc.mesh;
        let nf = disc.fine_nodes();
        let mut rows: Vec<Vec<(usize, [f64; 3])>> = vec![Vec::new(); nf];
        for (t, tet) in mesh.fine_tets.iter().enumerate() {
            let parent = mesh.coarse_tets[tet.parent.expect("fine element has a parent")].nodes;
            let g = &disc.fine_geom[t];
            for &k in &parent {
                let mean = 0.25
                    * tet
                        .nodes
                        .iter()
                        .map(|&v| match mesh.fine_source[v] {
                            FineSource::Coarse(c) if c == k => 1.0,
                            FineSource::Midpoint(a, b) if a == k || b == k => 0.5,
                            _ => 0.0,
                        })
                        .sum::<f64>();
                if mean == 0.0 {
                    continue;
                }
                for (a, &m) in tet.nodes.iter().enumerate() {
                    let v = g.grads[a].map(|x| g.volume * mean * x);
                    match rows[m].iter_mut().find(|e| e.0 == k) {
                        Some(e) => (0..3).for_each(|d| e.1[d] += v[d]),
                        None => rows[m].push((k, v)),
                    }
                }
            }
        }
        let mut row_start = vec![0];
        let mut row_cols = Vec::new();
        let mut row_vals = Vec::new();
        let mut cols: Vec<Vec<(usize, [f64; 3])>> = vec![Vec::new(); disc.coarse_nodes()];
        for (m, mut r) in rows.into_iter().enumerate() {
            r.sort_by_key(|e| e.0);
            for (k, v) in r {
                row_cols.push(k as u32);
                row_vals.push(v);
                cols[k].push((m, v));
            }
            row_start.push(row_cols.len());
        }
        let mut col_start = vec![0];
        let mut col_rows = Vec::new();
        let mut col_vals = Vec::new();
        for c in cols {
            for (m, v) in c {
                col_rows.push(m as u32);
                col_vals.push(v);
            }
            col_start.push(col_rows.len());
        }
        Self {
            row_start,
            row_cols,
            row_vals,
            col_start,
            col_rows,
            col_vals,
        }
    }

    pub fn nonzeros(&self) -> usize {
        self.row_cols.len()
    }

    /// `out = G p`, component by component, at every fine node.
    pub fn gradient(&self, p: &[f64], out: &mut VectorField) {
        let rows: Vec<[f64; 3]> = exec::map_range(self.row_start.len() - 1, |m| {
            let mut s = [0.0; 3];
            for e in self.row_start[m]..self.row_start[m + 1] {
                let q = p[self.row_cols[e] as usize];
                let v = &self.row_vals[e];
                s[0] += v[0] * q;
                s[1] += v[1] * q;
                s[2] += v[2] * q;
            }
            s
        });
        for (c, comp) in out.0.iter_mut().enumerate() {
            exec::fill(comp, |m| rows[m][c]);
        }
    }

    /// `out = G^T u`, the weak divergence against every coarse basis
    /// function.
    pub fn divergence(&self, u: &VectorField, out: &mut [f64]) {
        exec::fill(out, |k| {
            let mut s = 0.0;
            for e in self.col_start[k]..self.col_start[k + 1] {
                let m = self.col_rows[e] as usize;
                let v = &self.col_vals[e];
                s += v[0] * u.0[0][m] + v[1] * u.0[1][m] + v[2] * u.0[2][m];
            }
            s
        });
    }
}
