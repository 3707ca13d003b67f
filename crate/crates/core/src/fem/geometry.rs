use super::FemError;

/// Volume and constant barycentric gradients of a linear tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub volume: f64,
    pub grads: [[f64; 3]; 4],
}

impl ElementGeometry {
    pub fn new(v: &[[f64; 3]; 4]) -> Result<Self, FemError> {
        let e = [sub(v[1], v[0]), sub(v[2], v[0]), sub(v[3], v[0])];
        // rows of the inverse Jacobian are the gradients of lambda_1..3
        let c0 = cross(e[1], e[2]);
        let c1 = cross(e[2], e[0]);
        let c2 = cross(e[0], e[1]);
        let det = dot(e[0], c0);
        if !(det > 0.0) {
            return Err(FemError::Degenerate(det / 6.0));
        }
        let g1 = c0.map(|x| x / det);
        let g2 = c1.map(|x| x / det);
        let g3 = c2.map(|x| x / det);
        let g0 = std::array::from_fn(|k| -(g1[k] + g2[k] + g3[k]));
        Ok(Self {
            volume: det / 6.0,
            grads: [g0, g1, g2, g3],
        })
    }

    /// Gradient of the linear interpolant of the four vertex values.
    #[inline]
    pub fn gradient(&self, f: [f64; 4]) -> [f64; 3] {
        let g = &self.grads;
        std::array::from_fn(|k| f[0] * g[0][k] + f[1] * g[1][k] + f[2] * g[2][k] + f[3] * g[3][k])
    }

    /// Divergence of the linear interpolant of a vertex vector field.
    #[inline]
    pub fn divergence(&self, u: [[f64; 3]; 4]) -> f64 {
        (0..4).map(|a| dot(u[a], self.grads[a])).sum()
    }
}

#[inline]
pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
