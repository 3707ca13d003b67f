use crate::mesh::{Level, TwoLevelMesh};

/// The discrete piecewise-linear spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// Fine-mesh functions, unconstrained.
    Vh,
    /// Fine-mesh functions vanishing on the whole boundary (velocity).
    V0h,
    /// Fine-mesh functions vanishing on the isothermal walls (temperature).
    Pi0h,
    /// Coarse-mesh functions with zero mean (pressure).
    Ph,
}

#[derive(Debug, Clone)]
pub struct FunctionSpace {
    pub kind: SpaceKind,
    pub level: Level,
    /// Nodes carrying a Dirichlet value.
    pub constrained: Vec<bool>,
    /// Functions are normalised to zero mean.
    pub zero_mean: bool,
}

impl FunctionSpace {
    pub fn new(mesh: &TwoLevelMesh, kind: SpaceKind) -> Self {
        let (level, constrained, zero_mean) = match kind {
            SpaceKind::Vh => (Level::Fine, vec![false; mesh.fine.len()], false),
            SpaceKind::V0h => (
                Level::Fine,
                mesh.fine_tags.iter().map(|t| t.is_boundary()).collect(),
                false,
            ),
            SpaceKind::Pi0h => (
                Level::Fine,
                mesh.fine_tags.iter().map(|t| t.is_isothermal()).collect(),
                false,
            ),
            SpaceKind::Ph => (Level::Coarse, vec![false; mesh.coarse.len()], true),
        };
        Self {
            kind,
            level,
            constrained,
            zero_mean,
        }
    }

    pub fn dim(&self) -> usize {
        self.constrained.len()
    }

    pub fn free_count(&self) -> usize {
        self.constrained.iter().filter(|c| !**c).count()
    }
}

/// Three fine nodal fields, one per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField(pub [Vec<f64>; 3]);

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        Self([vec![0.0; n], vec![0.0; n], vec![0.0; n]])
    }

    pub fn len(&self) -> usize {
        self.0[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, n: usize) -> [f64; 3] {
        [self.0[0][n], self.0[1][n], self.0[2][n]]
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.0[c]
    }

    /// Largest nodal speed.
    pub fn max_norm(&self) -> f64 {
        (0..self.len())
            .map(|n| {
                let v = self.at(n);
                (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Sets the components to zero where `mask` is true.
    pub fn zero_where(&mut self, mask: &[bool]) {
        for c in &mut self.0 {
            c.iter_mut().zip(mask).filter(|(_, m)| **m).for_each(|(v, _)| *v = 0.0);
        }
    }
}
