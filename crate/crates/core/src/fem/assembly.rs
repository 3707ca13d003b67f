use crate::mesh::Tetra;

use super::{Discretization, ElementGeometry, FemError, LowerBandMatrix, SymBandedMatrix};

/// Vertex-quadrature mass: every element gives `V/4` to each vertex.
pub fn lumped_mass(nodes: usize, tets: &[Tetra], geom: &[ElementGeometry]) -> Vec<f64> {
    let mut m = vec![0.0; nodes];
    for (t, g) in tets.iter().zip(geom) {
        for &n in &t.nodes {
            m[n] += 0.25 * g.volume;
        }
    }
    m
}

/// `K_ij = coeff * \int grad w_i . grad w_j` on the fine mesh.
pub fn assemble_stiffness(disc: &Discretization, coeff: f64) -> Result<SymBandedMatrix, FemError> {
    let mut k = SymBandedMatrix::for_lattice(&disc.mesh.fine);
    for (t, g) in disc.mesh.fine_tets.iter().zip(&disc.fine_geom) {
        for a in 0..4 {
            for b in a..4 {
                let v = coeff * g.volume * super::geometry::dot(g.grads[a], g.grads[b]);
                k.add(t.nodes[a], t.nodes[b], v)?;
            }
        }
    }
    Ok(k)
}

/// Stiffness matrix of the coarse (pressure) mesh in lower band storage.
pub fn assemble_coarse_stiffness(disc: &Discretization) -> LowerBandMatrix {
    let tets = &disc.mesh.coarse_tets;
    let bw = tets
        .iter()
        .flat_map(|t| {
            let n = t.nodes;
            (0..4).flat_map(move |a| (0..4).map(move |b| n[a].abs_diff(n[b])))
        })
        .max()
        .unwrap_or(0);
    let mut k = LowerBandMatrix::zeros(disc.coarse_nodes(), bw);
    for (t, g) in tets.iter().zip(&disc.coarse_geom) {
        for a in 0..4 {
            for b in a..4 {
                let v = g.volume * super::geometry::dot(g.grads[a], g.grads[b]);
                k.add(t.nodes[a], t.nodes[b], v)
                    .expect("bandwidth covers every element");
            }
        }
    }
    k
}
