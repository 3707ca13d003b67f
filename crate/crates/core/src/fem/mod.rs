//! P1 finite elements on the two-level mesh.
//!
//! All `\int f g` integrals use vertex quadrature (weight `V/4` per vertex),
//! which makes the mass matrix diagonal. Element loops write per-element
//! contributions into a buffer of `4 * n_tets` slots and each node then
//! sums its slots in element order, so the result does not depend on the
//! thread count.

mod assembly;
mod banded;
mod dirichlet;
mod geometry;
mod mixed;
mod spaces;
mod wave;

pub use assembly::{assemble_coarse_stiffness, assemble_stiffness, lumped_mass};
pub use banded::{lattice_offsets, LowerBandMatrix, SymBandedMatrix};
pub use dirichlet::{apply_dirichlet_rhs, apply_dirichlet_symmetric};
pub use geometry::ElementGeometry;
pub use mixed::{divergence_residual, interpolate_to_fine, pressure_gradient_rhs, restrict_to_coarse, MixedOperator};
pub use spaces::{FunctionSpace, SpaceKind, VectorField};
pub use wave::{apply_advection, apply_advection_into, apply_wave_operator, WaveCoefficients};

use thiserror::Error;

use crate::exec;
use crate::mesh::{FineSource, Lattice, Tetra, TwoLevelMesh};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("matrix structure: {0}")]
    Structure(String),
    #[error("element with non-positive volume {0}")]
    Degenerate(f64),
}

/// Compressed node -> element-slot incidence.
#[derive(Debug, Clone)]
struct Incidence {
    start: Vec<usize>,
    /// `4 * element + local vertex`, ascending per node.
    slots: Vec<u32>,
}

impl Incidence {
    fn new(nodes: usize, tets: &[Tetra]) -> Self {
        let mut count = vec![0usize; nodes + 1];
        for t in tets {
            for &n in &t.nodes {
                count[n + 1] += 1;
            }
        }
        for i in 0..nodes {
            count[i + 1] += count[i];
        }
        let start = count.clone();
        let mut fill = count;
        let mut slots = vec![0u32; start[nodes]];
        for (e, t) in tets.iter().enumerate() {
            for (a, &n) in t.nodes.iter().enumerate() {
                slots[fill[n]] = (4 * e + a) as u32;
                fill[n] += 1;
            }
        }
        Self { start, slots }
    }

    #[inline]
    fn gather_into(&self, local: &[f64], out: &mut [f64]) {
        exec::fill(out, |n| {
            self.slots[self.start[n]..self.start[n + 1]]
                .iter()
                .fold(0.0, |s, &k| s + local[k as usize])
        });
    }
}

/// Mesh plus everything precomputed from it.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: TwoLevelMesh,
    pub fine_geom: Vec<ElementGeometry>,
    pub coarse_geom: Vec<ElementGeometry>,
    /// Lumped (vertex-quadrature) mass of every fine node.
    pub fine_mass: Vec<f64>,
    /// Lumped mass of every coarse node.
    pub coarse_mass: Vec<f64>,
    /// Fine nodes not on the boundary.
    pub interior: Vec<bool>,
    fine_incidence: Incidence,
    /// Coarse node -> (fine node, interpolation weight).
    restriction: Vec<Vec<(usize, f64)>>,
}

impl Discretization {
    pub fn new(mesh: TwoLevelMesh) -> Result<Self, FemError> {
        let fine_geom = geometries(&mesh.fine, &mesh.fine_tets)?;
        let coarse_geom = geometries(&mesh.coarse, &mesh.coarse_tets)?;
        let fine_incidence = Incidence::new(mesh.fine.len(), &mesh.fine_tets);
        let mut restriction = vec![Vec::new(); mesh.coarse.len()];
        for (f, s) in mesh.fine_source.iter().enumerate() {
            match *s {
                FineSource::Coarse(c) => restriction[c].push((f, 1.0)),
                FineSource::Midpoint(a, b) => {
                    restriction[a].push((f, 0.5));
                    restriction[b].push((f, 0.5));
                }
            }
        }
        let fine_mass = lumped_mass(mesh.fine.len(), &mesh.fine_tets, &fine_geom);
        let coarse_mass = lumped_mass(mesh.coarse.len(), &mesh.coarse_tets, &coarse_geom);
        let interior = mesh.fine_tags.iter().map(|t| !t.is_boundary()).collect();
        Ok(Self {
            mesh,
            fine_geom,
            coarse_geom,
            fine_mass,
            coarse_mass,
            interior,
            fine_incidence,
            restriction,
        })
    }

    pub fn fine_nodes(&self) -> usize {
        self.mesh.fine.len()
    }

    pub fn coarse_nodes(&self) -> usize {
        self.mesh.coarse.len()
    }

    pub fn fine_elements(&self) -> usize {
        self.mesh.fine_tets.len()
    }

    pub fn volume(&self) -> f64 {
        self.mesh.box_volume()
    }

    /// Sums per-element-vertex contributions (`4 * n_tets` slots) into fine
    /// nodal values.
    pub fn gather_fine(&self, local: &[f64], out: &mut [f64]) {
        debug_assert_eq!(local.len(), 4 * self.fine_elements());
        self.fine_incidence.gather_into(local, out);
    }

    /// Values of the four vertices of fine element `t`.
    #[inline]
    pub fn fine_values(&self, t: usize, f: &[f64]) -> [f64; 4] {
        self.mesh.fine_tets[t].nodes.map(|n| f[n])
    }

    /// Discrete mean `\int f / |Omega|` of a coarse nodal function.
    pub fn coarse_mean(&self, p: &[f64]) -> f64 {
        exec::dot(&self.coarse_mass, p) / self.volume()
    }
}

fn geometries(lat: &Lattice, tets: &[Tetra]) -> Result<Vec<ElementGeometry>, FemError> {
    exec::map_range(tets.len(), |t| {
        ElementGeometry::new(&tets[t].nodes.map(|n| lat.coord(n)))
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_sums_incident_slots() {
        let d = Discretization::new(TwoLevelMesh::unit_cube(1).unwrap()).unwrap();
        let ones = vec![1.0; 4 * d.fine_elements()];
        let mut deg = vec![0.0; d.fine_nodes()];
        d.gather_fine(&ones, &mut deg);
        assert_eq!(deg.iter().sum::<f64>(), (4 * d.fine_elements()) as f64);
        // the centre is corner A/G of two fine bricks (1 tet each), B/H of
        // two (5 each) and C/D/E/F of four (3 each)
        let centre = d.mesh.fine.index(1, 1, 1);
        assert_eq!(deg[centre], 24.0);
    }
}
