//! Two-level tetrahedral discretisation of a rectangular box.
//!
//! The box is cut into brick macros on the coarse lattice, every brick into
//! six pressure tetrahedra, and every pressure tetrahedron into eight
//! velocity/temperature tetrahedra by midpoint subdivision. The fine nodes
//! form the lattice obtained by bisecting every coarse interval, so both node
//! sets are numbered lexicographically by `(z, y, x)` index.

mod boundary;
mod brick;
mod io;
mod partition;
mod validate;

pub use boundary::{classify_boundary, classify_point, BoundaryTag};
pub use brick::{
    classify_lattice_tet, midpoint_children, signed_volume, split_brick, BrickMacro, BrickTet, ConstructionOrder,
    Corner, GenericShape, EDGE_DIRECTIONS,
};
pub use io::{read_mesh, write_mesh, write_mesh_with_fields, MeshFields, MeshFile, NodeRecord, TetRecord};
pub use partition::{refine_coordinates, AxisPartition};
pub use validate::{validate_mesh, MeshFailure, MeshReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid axis partition: {0}")]
    Partition(String),
    #[error("degenerate brick with extents {0:?}")]
    DegenerateBrick([f64; 3]),
    #[error("no octahedron diagonal along a lattice edge direction")]
    NoLatticeDiagonal,
    #[error("refined element is not similar to a generic tetrahedron")]
    UnknownShape,
    #[error("mesh file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tensor-product node lattice with `x` running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
}

impl Lattice {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, zs: Vec<f64>) -> Self {
        Self { xs, ys, zs }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.xs.len(), self.ys.len(), self.zs.len()]
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len() * self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.xs.len() * (j + self.ys.len() * k)
    }

    #[inline]
    pub fn ijk(&self, id: usize) -> [usize; 3] {
        let nx = self.xs.len();
        let ny = self.ys.len();
        [id % nx, (id / nx) % ny, id / (nx * ny)]
    }

    #[inline]
    pub fn coord(&self, id: usize) -> [f64; 3] {
        let [i, j, k] = self.ijk(id);
        [self.xs[i], self.ys[j], self.zs[k]]
    }

    /// Box extents `(A_x, A_y, A_z)`.
    pub fn extents(&self) -> [f64; 3] {
        [
            *self.xs.last().unwrap(),
            *self.ys.last().unwrap(),
            *self.zs.last().unwrap(),
        ]
    }

    /// Index strides of the three axes.
    pub fn strides(&self) -> [usize; 3] {
        [1, self.xs.len(), self.xs.len() * self.ys.len()]
    }

    /// Smallest gridline spacing over all axes.
    pub fn min_spacing(&self) -> f64 {
        [&self.xs, &self.ys, &self.zs]
            .iter()
            .flat_map(|c| c.windows(2).map(|w| w[1] - w[0]))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Coarse,
    Fine,
}

/// A tetrahedron. Coarse elements index the coarse lattice, fine elements
/// the fine lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tetra {
    /// Vertices, ordered so the signed volume is positive.
    pub nodes: [usize; 4],
    pub shape: GenericShape,
    /// Enclosing coarse element, fine elements only.
    pub parent: Option<usize>,
}

/// How a fine node inherits a coarse piecewise-linear function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FineSource {
    /// Coincides with this coarse node.
    Coarse(usize),
    /// Midpoint of the coarse edge joining the two nodes.
    Midpoint(usize, usize),
}

#[derive(Debug, Clone)]
pub struct TwoLevelMesh {
    pub coarse: Lattice,
    pub fine: Lattice,
    pub coarse_tets: Vec<Tetra>,
    pub fine_tets: Vec<Tetra>,
    /// Fine elements of each coarse element.
    pub children: Vec<[usize; 8]>,
    /// Fine node index of every coarse node.
    pub coarse_to_fine: Vec<usize>,
    /// Coarse parentage of every fine node.
    pub fine_source: Vec<FineSource>,
    pub fine_tags: Vec<BoundaryTag>,
    pub coarse_tags: Vec<BoundaryTag>,
}

impl TwoLevelMesh {
    /// Builds the mesh of `[0,A_x] x [0,A_y] x [0,A_z]` from one partition per
    /// axis.
    pub fn build(partitions: &[AxisPartition; 3]) -> Result<Self, MeshError> {
        let coarse = Lattice::new(
            partitions[0].coordinates(),
            partitions[1].coordinates(),
            partitions[2].coordinates(),
        );
        let coarse_tets = coarse_elements(&coarse)?;
        let fine = Lattice::new(
            refine_coordinates(&coarse.xs),
            refine_coordinates(&coarse.ys),
            refine_coordinates(&coarse.zs),
        );
        let (fine_tets, children, fine_source) = refine_to_fine(&coarse, &coarse_tets, &fine)?;
        let coarse_to_fine = (0..coarse.len())
            .map(|c| {
                let [i, j, k] = coarse.ijk(c);
                fine.index(2 * i, 2 * j, 2 * k)
            })
            .collect();
        let fine_tags = classify_boundary(&fine);
        let coarse_tags = classify_boundary(&coarse);
        Ok(Self {
            coarse,
            fine,
            coarse_tets,
            fine_tets,
            children,
            coarse_to_fine,
            fine_source,
            fine_tags,
            coarse_tags,
        })
    }

    /// Uniform mesh with `n` coarse cells per axis on the unit cube.
    pub fn unit_cube(n: usize) -> Result<Self, MeshError> {
        let p = AxisPartition::uniform(1.0, n)?;
        Self::build(&[p.clone(), p.clone(), p])
    }

    pub fn fine_vertices(&self, t: usize) -> [[f64; 3]; 4] {
        self.fine_tets[t].nodes.map(|n| self.fine.coord(n))
    }

    pub fn coarse_vertices(&self, t: usize) -> [[f64; 3]; 4] {
        self.coarse_tets[t].nodes.map(|n| self.coarse.coord(n))
    }

    pub fn box_volume(&self) -> f64 {
        let e = self.fine.extents();
        e[0] * e[1] * e[2]
    }
}

/// Six tetrahedra per coarse brick, bricks in lexicographic order.
fn coarse_elements(coarse: &Lattice) -> Result<Vec<Tetra>, MeshError> {
    let [nx, ny, nz] = coarse.dims();
    let mut tets = Vec::with_capacity(6 * (nx - 1) * (ny - 1) * (nz - 1));
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let brick = BrickMacro::new(
                    [coarse.xs[i], coarse.ys[j], coarse.zs[k]],
                    [
                        coarse.xs[i + 1] - coarse.xs[i],
                        coarse.ys[j + 1] - coarse.ys[j],
                        coarse.zs[k + 1] - coarse.zs[k],
                    ],
                )?;
                for bt in split_brick(&brick, ConstructionOrder::TopVertexFirst)? {
                    let nodes = bt.corners.map(|c| {
                        let o = c.offset();
                        coarse.index(i + o[0], j + o[1], k + o[2])
                    });
                    let shape = bt.shape.ok_or(MeshError::UnknownShape)?;
                    tets.push(orient(coarse, nodes, shape, None));
                }
            }
        }
    }
    Ok(tets)
}

fn orient(lat: &Lattice, mut nodes: [usize; 4], shape: GenericShape, parent: Option<usize>) -> Tetra {
    if signed_volume(&nodes.map(|n| lat.coord(n))) < 0.0 {
        nodes.swap(2, 3);
    }
    Tetra { nodes, shape, parent }
}

/// Fine elements, parent-to-children map and per-node interpolation sources.
pub type Refinement = (Vec<Tetra>, Vec<[usize; 8]>, Vec<FineSource>);

/// Midpoint subdivision of every coarse element into eight fine elements.
///
/// Returns the fine elements, the parent-to-children map and the
/// coarse-to-fine interpolation source of every fine node.
pub fn refine_to_fine(coarse: &Lattice, coarse_tets: &[Tetra], fine: &Lattice) -> Result<Refinement, MeshError> {
    let mut fine_tets = Vec::with_capacity(8 * coarse_tets.len());
    let mut children = Vec::with_capacity(coarse_tets.len());
    let mut source: Vec<Option<FineSource>> = vec![None; fine.len()];
    let to_fine = |p: [i64; 3]| fine.index(p[0] as usize, p[1] as usize, p[2] as usize);

    for (ct, tet) in coarse_tets.iter().enumerate() {
        let v = tet.nodes.map(|n| {
            let [i, j, k] = coarse.ijk(n);
            [2 * i as i64, 2 * j as i64, 2 * k as i64]
        });
        for a in 0..4 {
            source[to_fine(v[a])] = Some(FineSource::Coarse(tet.nodes[a]));
            for b in a + 1..4 {
                let m: [i64; 3] = std::array::from_fn(|d| (v[a][d] + v[b][d]) / 2);
                let (lo, hi) = (tet.nodes[a].min(tet.nodes[b]), tet.nodes[a].max(tet.nodes[b]));
                source[to_fine(m)] = Some(FineSource::Midpoint(lo, hi));
            }
        }
        let mut kids = [0usize; 8];
        for (slot, child) in kids.iter_mut().zip(midpoint_children(v)?) {
            let shape = classify_lattice_tet(&child).ok_or(MeshError::UnknownShape)?;
            *slot = fine_tets.len();
            fine_tets.push(orient(fine, child.map(to_fine), shape, Some(ct)));
        }
        children.push(kids);
    }
    let source = source
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| MeshError::Format("fine node not covered by any coarse element".into()))?;
    Ok((fine_tets, children, source))
}
