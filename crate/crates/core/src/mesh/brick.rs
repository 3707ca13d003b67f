//! Brick macros, the six generic tetrahedra and the eight-child refinement.
//!
//! Corner labels follow the usual brick picture: the back face (`z = z0`)
//! carries A, B, C, D counter-clockwise from the lower left, the front face
//! (`z = z0 + dz`) carries E, F, G, H in the same order, so that
//!
//! ```text
//!   A (0,0,0)  B (1,0,0)  C (1,1,0)  D (0,1,0)
//!   E (0,0,1)  F (1,0,1)  G (1,1,1)  H (0,1,1)
//! ```
//!
//! in brick-local unit coordinates, with `y` pointing up against gravity.

use std::fmt;

use super::MeshError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Corner {
    pub const ALL: [Corner; 8] = [
        Corner::A,
        Corner::B,
        Corner::C,
        Corner::D,
        Corner::E,
        Corner::F,
        Corner::G,
        Corner::H,
    ];

    /// Unit offset of the corner inside its brick.
    pub fn offset(self) -> [usize; 3] {
        match self {
            Corner::A => [0, 0, 0],
            Corner::B => [1, 0, 0],
            Corner::C => [1, 1, 0],
            Corner::D => [0, 1, 0],
            Corner::E => [0, 0, 1],
            Corner::F => [1, 0, 1],
            Corner::G => [1, 1, 1],
            Corner::H => [0, 1, 1],
        }
    }

    pub fn from_offset(o: [usize; 3]) -> Option<Corner> {
        Corner::ALL.into_iter().find(|c| c.offset() == o)
    }
}

/// The six tetrahedron shapes produced by the brick split. Every coarse and
/// fine element of the mesh is a scaled copy of one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenericShape {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl GenericShape {
    pub const ALL: [GenericShape; 6] = [
        GenericShape::I,
        GenericShape::II,
        GenericShape::III,
        GenericShape::IV,
        GenericShape::V,
        GenericShape::VI,
    ];

    pub fn corners(self) -> [Corner; 4] {
        use Corner::*;
        match self {
            GenericShape::I => [B, C, D, H],
            GenericShape::II => [D, A, B, E],
            GenericShape::III => [E, B, H, D],
            GenericShape::IV => [F, C, B, H],
            GenericShape::V => [H, G, F, C],
            GenericShape::VI => [E, F, B, H],
        }
    }

    /// Shapes I-III fill the prism HEBCDA, IV-VI the prism HEFBCG.
    pub fn prism(self) -> usize {
        match self {
            GenericShape::I | GenericShape::II | GenericShape::III => 0,
            _ => 1,
        }
    }

    pub fn roman(self) -> &'static str {
        match self {
            GenericShape::I => "I",
            GenericShape::II => "II",
            GenericShape::III => "III",
            GenericShape::IV => "IV",
            GenericShape::V => "V",
            GenericShape::VI => "VI",
        }
    }

    pub fn from_roman(s: &str) -> Option<GenericShape> {
        GenericShape::ALL.into_iter().find(|g| g.roman() == s)
    }

    /// Identifies the shape of a tetrahedron given by its four corners in
    /// one brick, in any order.
    pub fn classify(corners: &[Corner; 4]) -> Option<GenericShape> {
        let mut key = *corners;
        key.sort_by_key(|c| *c as u8);
        GenericShape::ALL.into_iter().find(|g| {
            let mut k = g.corners();
            k.sort_by_key(|c| *c as u8);
            k == key
        })
    }
}

impl fmt::Display for GenericShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

/// Order in which the two prisms are cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstructionOrder {
    /// First prism through DE, DB, HB; second through FH, FC, HB.
    #[default]
    TopVertexFirst,
    /// First prism through AH, AC, HB; second through GE, GB, HB.
    BottomEdgeFirst,
}

/// An axis-aligned brick macro with corner A at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrickMacro {
    pub origin: [f64; 3],
    pub extent: [f64; 3],
}

impl BrickMacro {
    pub fn new(origin: [f64; 3], extent: [f64; 3]) -> Result<Self, MeshError> {
        if extent.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(MeshError::DegenerateBrick(extent));
        }
        Ok(Self { origin, extent })
    }

    pub fn corner(&self, c: Corner) -> [f64; 3] {
        let o = c.offset();
        std::array::from_fn(|a| self.origin[a] + o[a] as f64 * self.extent[a])
    }

    pub fn volume(&self) -> f64 {
        self.extent[0] * self.extent[1] * self.extent[2]
    }
}

/// A tetrahedron of a single brick, by corner labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrickTet {
    pub corners: [Corner; 4],
    /// `None` for the alternative construction order, whose elements are
    /// mirror images of the generic set.
    pub shape: Option<GenericShape>,
}

impl BrickTet {
    pub fn vertices(&self, brick: &BrickMacro) -> [[f64; 3]; 4] {
        self.corners.map(|c| brick.corner(c))
    }
}

/// Splits a brick into two prisms along the vertical diagonal plane through
/// HC and EB, then each prism into three tetrahedra.
pub fn split_brick(brick: &BrickMacro, order: ConstructionOrder) -> Result<[BrickTet; 6], MeshError> {
    BrickMacro::new(brick.origin, brick.extent)?;
    use Corner::*;
    Ok(match order {
        ConstructionOrder::TopVertexFirst => GenericShape::ALL.map(|g| BrickTet {
            corners: g.corners(),
            shape: Some(g),
        }),
        ConstructionOrder::BottomEdgeFirst => [
            [A, D, H, C],
            [A, E, B, H],
            [A, B, C, H],
            [G, E, F, B],
            [G, E, B, H],
            [G, B, C, H],
        ]
        .map(|corners| BrickTet { corners, shape: None }),
    })
}

/// Signed volume of a tetrahedron.
pub fn signed_volume(v: &[[f64; 3]; 4]) -> f64 {
    let a = sub(v[1], v[0]);
    let b = sub(v[2], v[0]);
    let c = sub(v[3], v[0]);
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])) / 6.0
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Edge directions of the brick split in lattice units, one per upper band
/// diagonal of the assembled matrices.
pub const EDGE_DIRECTIONS: [[i64; 3]; 7] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, -1, 0],
    [1, 0, -1],
    [0, 1, -1],
    [1, -1, -1],
];

pub fn is_edge_direction(d: [i64; 3]) -> bool {
    EDGE_DIRECTIONS.iter().any(|e| *e == d || [-e[0], -e[1], -e[2]] == d)
}

/// Midpoint subdivision of a tetrahedron given by integer lattice points
/// with even coordinates.
///
/// Returns four corner children followed by the four children cutting the
/// inner octahedron. The octahedron is split along the diagonal joining the
/// midpoints of the opposite edge pair whose direction is an edge direction
/// of the brick split, so every child coincides with a generic tetrahedron
/// of the half-size lattice.
pub fn midpoint_children(v: [[i64; 3]; 4]) -> Result<[[[i64; 3]; 4]; 8], MeshError> {
    let mid = |a: usize, b: usize| -> [i64; 3] { std::array::from_fn(|k| (v[a][k] + v[b][k]) / 2) };
    const PAIRS: [((usize, usize), (usize, usize)); 3] = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    let (e1, e2) = PAIRS
        .into_iter()
        .find(|&((a, b), (c, d))| {
            let p = mid(a, b);
            let q = mid(c, d);
            is_edge_direction(std::array::from_fn(|k| q[k] - p[k]))
        })
        .ok_or(MeshError::NoLatticeDiagonal)?;
    let p = mid(e1.0, e1.1);
    let q = mid(e2.0, e2.1);
    // remaining four edges, ordered around the octahedron's equator
    let (a, b) = e1;
    let (c, d) = e2;
    let ring = [mid(a, c), mid(c, b), mid(b, d), mid(d, a)];

    let corner = |i: usize| -> [[i64; 3]; 4] {
        let mut t = [v[i]; 4];
        let mut k = 1;
        for j in 0..4 {
            if j != i {
                t[k] = mid(i, j);
                k += 1;
            }
        }
        t
    };
    Ok([
        corner(0),
        corner(1),
        corner(2),
        corner(3),
        [p, q, ring[0], ring[1]],
        [p, q, ring[1], ring[2]],
        [p, q, ring[2], ring[3]],
        [p, q, ring[3], ring[0]],
    ])
}

/// Classifies a tetrahedron of unit-lattice points as a generic element of
/// the brick whose lowest corner is the componentwise minimum.
pub fn classify_lattice_tet(v: &[[i64; 3]; 4]) -> Option<GenericShape> {
    let lo: [i64; 3] = std::array::from_fn(|k| v.iter().map(|p| p[k]).min().unwrap());
    let mut corners = [Corner::A; 4];
    for (slot, p) in corners.iter_mut().zip(v) {
        let o: [usize; 3] = std::array::from_fn(|k| (p[k] - lo[k]) as usize);
        if o.iter().any(|&x| x > 1) {
            return None;
        }
        *slot = Corner::from_offset(o)?;
    }
    GenericShape::classify(&corners)
}
