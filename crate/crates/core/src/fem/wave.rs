//! Operators of the wave-equation form of pure advection.
//!
//! Advection `f_t + u . grad f = 0` with a frozen field `u` implies
//! `f_tt = div((u u^T) grad f)`; with vertex quadrature for `u u^T` the
//! weak form of the right-hand side is `-W f` with
//! `(W f)_m = \sum_T grad w_m . K_T grad f_T`, `K_T = V/4 \sum_q u_q u_q^T`.

use crate::exec;

use super::geometry::dot;
use super::{Discretization, VectorField};

/// Per-element `K_T` in the order `xx, xy, xz, yy, yz, zz`.
#[derive(Debug, Clone)]
pub struct WaveCoefficients {
    k: Vec<[f64; 6]>,
}

impl WaveCoefficients {
    pub fn new(disc: &Discretization, u: &VectorField) -> Self {
        let k = exec::map_range(disc.fine_elements(), |t| {
            let mut k = [0.0; 6];
            for &n in &disc.mesh.fine_tets[t].nodes {
                let [a, b, c] = u.at(n);
                k[0] += a * a;
                k[1] += a * b;
                k[2] += a * c;
                k[3] += b * b;
                k[4] += b * c;
                k[5] += c * c;
            }
            k.map(|v| 0.25 * disc.fine_geom[t].volume * v)
        });
        Self { k }
    }

    /// `out = W f`. `scratch` is resized as needed and may be reused.
    pub fn apply(&self, disc: &Discretization, f: &[f64], scratch: &mut Vec<[f64; 4]>, out: &mut [f64]) {
        scratch.resize(disc.fine_elements(), [0.0; 4]);
        exec::fill(scratch, |t| {
            let g = &disc.fine_geom[t];
            let d = g.gradient(disc.fine_values(t, f));
            let k = &self.k[t];
            let kd = [
                k[0] * d[0] + k[1] * d[1] + k[2] * d[2],
                k[1] * d[0] + k[3] * d[1] + k[4] * d[2],
                k[2] * d[0] + k[4] * d[1] + k[5] * d[2],
            ];
            g.grads.map(|ga| dot(ga, kd))
        });
        disc.gather_fine(scratch.as_flattened(), out);
    }
}

/// `W f` for the advecting field `u`.
pub fn apply_wave_operator(disc: &Discretization, u: &VectorField, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; disc.fine_nodes()];
    WaveCoefficients::new(disc, u).apply(disc, f, &mut Vec::new(), &mut out);
    out
}

/// `(C f)_m = \int (u . grad f) w_m` with vertex quadrature, written into
/// `out`.
pub fn apply_advection_into(
    disc: &Discretization,
    u: &VectorField,
    f: &[f64],
    scratch: &mut Vec<[f64; 4]>,
    out: &mut [f64],
) {
    scratch.resize(disc.fine_elements(), [0.0; 4]);
    exec::fill(scratch, |t| {
        let g = &disc.fine_geom[t];
        let d = g.gradient(disc.fine_values(t, f));
        let q = 0.25 * g.volume;
        disc.mesh.fine_tets[t].nodes.map(|n| q * dot(u.at(n), d))
    });
    disc.gather_fine(scratch.as_flattened(), out);
}

pub fn apply_advection(disc: &Discretization, u: &VectorField, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; disc.fine_nodes()];
    apply_advection_into(disc, u, f, &mut Vec::new(), &mut out);
    out
}
