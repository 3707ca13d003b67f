use crate::fem::LowerBandMatrix;

use super::{CholeskyFactor, SolverError};

/// Solves the pure Neumann problem `K phi = r` for a singular stiffness `K`
/// whose kernel is the constants, returning the solution of zero
/// mass-weighted mean.
///
/// The last unknown is pinned to zero, the reduced matrix is factored once,
/// and the mean is removed afterwards.
#[derive(Debug, Clone)]
pub struct NeumannSolver {
    factor: CholeskyFactor,
    mass: Vec<f64>,
    total_mass: f64,
    /// Compatibility tolerance on `|sum r|` relative to `sum |r|`.
    compat_eps: f64,
}

impl NeumannSolver {
    pub fn new(k: &LowerBandMatrix, mass: Vec<f64>, compat_eps: f64) -> Result<Self, SolverError> {
        if k.dim() != mass.len() || k.dim() < 2 {
            return Err(SolverError::Dimension(format!(
                "stiffness of order {} with {} masses",
                k.dim(),
                mass.len()
            )));
        }
        let factor = CholeskyFactor::new(&k.without(k.dim() - 1))?;
        let total_mass = mass.iter().sum();
        Ok(Self {
            factor,
            mass,
            total_mass,
            compat_eps,
        })
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Zero-mean solution of `K phi = r`; `r` must sum to (nearly) zero.
    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>, SolverError> {
        let sum: f64 = r.iter().sum();
        let abs: f64 = r.iter().map(|v| v.abs()).sum();
        let tol = self.compat_eps * abs.max(f64::MIN_POSITIVE);
        if sum.abs() > tol {
            return Err(SolverError::Incompatible { sum, tol });
        }
        let n = self.dim();
        let mut phi = r.to_vec();
        self.factor.solve_in_place(&mut phi[..n - 1]);
        phi[n - 1] = 0.0;
        self.remove_mean(&mut phi);
        Ok(phi)
    }

    /// Subtracts the mass-weighted mean.
    pub fn remove_mean(&self, phi: &mut [f64]) {
        let mean = phi.iter().zip(&self.mass).map(|(p, m)| p * m).sum::<f64>() / self.total_mass;
        phi.iter_mut().for_each(|p| *p -= mean);
    }

    /// Removes the part of `r` that makes it incompatible, spreading `sum r`
    /// in proportion to the masses.
    pub fn make_compatible(&self, r: &mut [f64]) {
        let sum: f64 = r.iter().sum();
        r.iter_mut()
            .zip(&self.mass)
            .for_each(|(v, m)| *v -= sum * m / self.total_mass);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> LowerBandMatrix {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n - 1 {
            a[i][i] += 1.0;
            a[i + 1][i + 1] += 1.0;
            a[i][i + 1] -= 1.0;
            a[i + 1][i] -= 1.0;
        }
        LowerBandMatrix::from_dense(&a)
    }

    #[test]
    fn zero_mean_solution_of_compatible_data() {
        let k = path_laplacian(6);
        let s = NeumannSolver::new(&k, vec![1.0; 6], 1e-10).unwrap();
        let r = [1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        let phi = s.solve(&r).unwrap();
        assert!(phi.iter().sum::<f64>().abs() < 1e-13);
        let mut kp = vec![0.0; 6];
        k.matvec(&phi, &mut kp);
        for (a, b) in kp.iter().zip(&r) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn incompatible_data_is_rejected() {
        let s = NeumannSolver::new(&path_laplacian(4), vec![1.0; 4], 1e-10).unwrap();
        assert!(matches!(
            s.solve(&[1.0, 0.0, 0.0, 0.0]),
            Err(SolverError::Incompatible { .. })
        ));
        let mut r = [1.0, 0.0, 0.0, 0.0];
        s.make_compatible(&mut r);
        assert!(s.solve(&r).is_ok());
    }
}
