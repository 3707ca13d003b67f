use std::fmt;

use super::Lattice;

/// Which part of the boundary a node lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Hot wall `x = 0`.
    Left,
    /// Cold wall `x = A_x`.
    Right,
    /// One of the four insulated walls.
    Other,
    Interior,
}

impl BoundaryTag {
    pub fn is_boundary(self) -> bool {
        self != BoundaryTag::Interior
    }

    /// Carries a temperature Dirichlet value.
    pub fn is_isothermal(self) -> bool {
        matches!(self, BoundaryTag::Left | BoundaryTag::Right)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Left => "left",
            BoundaryTag::Right => "right",
            BoundaryTag::Other => "wall",
            BoundaryTag::Interior => "interior",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            BoundaryTag::Left,
            BoundaryTag::Right,
            BoundaryTag::Other,
            BoundaryTag::Interior,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tags a point of the box `[0,A_x] x [0,A_y] x [0,A_z]`.
///
/// Walls are matched with tolerance `1e-12 * A_axis`. Nodes shared by an
/// isothermal and an insulated wall belong to the isothermal one.
pub fn classify_point(p: [f64; 3], extents: [f64; 3]) -> BoundaryTag {
    let on = |v: f64, wall: f64, len: f64| (v - wall).abs() <= 1e-12 * len;
    if on(p[0], 0.0, extents[0]) {
        BoundaryTag::Left
    } else if on(p[0], extents[0], extents[0]) {
        BoundaryTag::Right
    } else if (1..3).any(|a| on(p[a], 0.0, extents[a]) || on(p[a], extents[a], extents[a])) {
        BoundaryTag::Other
    } else {
        BoundaryTag::Interior
    }
}

pub fn classify_boundary(lattice: &Lattice) -> Vec<BoundaryTag> {
    let ext = lattice.extents();
    (0..lattice.len())
        .map(|n| classify_point(lattice.coord(n), ext))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_examples() {
        let e = [1.0; 3];
        assert_eq!(classify_point([0.0, 0.5, 0.5], e), BoundaryTag::Left);
        assert_eq!(classify_point([1.0, 1.0, 1.0], e), BoundaryTag::Right);
        assert_eq!(classify_point([0.0, 0.0, 1.0], e), BoundaryTag::Left);
        assert_eq!(classify_point([0.5, 0.5, 0.5], e), BoundaryTag::Interior);
        assert_eq!(classify_point([0.5, 0.0, 0.5], e), BoundaryTag::Other);
        assert_eq!(classify_point([0.5, 0.5, 1.0 - 1e-13], e), BoundaryTag::Other);
    }

    #[test]
    fn three_cubed_lattice_has_one_interior_node() {
        let c = vec![0.0, 0.5, 1.0];
        let lat = Lattice::new(c.clone(), c.clone(), c);
        let tags = classify_boundary(&lat);
        assert_eq!(tags.iter().filter(|t| **t == BoundaryTag::Interior).count(), 1);
        assert_eq!(tags[lat.index(1, 1, 1)], BoundaryTag::Interior);
        assert_eq!(tags.iter().filter(|t| **t == BoundaryTag::Left).count(), 9);
        assert_eq!(tags.iter().filter(|t| **t == BoundaryTag::Right).count(), 9);
    }
}
