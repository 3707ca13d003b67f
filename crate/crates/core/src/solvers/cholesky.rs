use crate::fem::LowerBandMatrix;

use super::SolverError;

/// `A = L L^T` for a symmetric positive definite band matrix; `L` keeps the
/// half bandwidth of `A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: LowerBandMatrix,
}

impl CholeskyFactor {
    pub fn new(a: &LowerBandMatrix) -> Result<Self, SolverError> {
        let n = a.dim();
        let bw = a.bandwidth();
        let mut l = a.clone();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                // l_ij = (a_ij - sum_k l_ik l_jk) / l_jj over the shared band
                let jlo = j.saturating_sub(bw).max(lo);
                let mut s = l.get(i, j);
                {
                    let ri = l.row(i);
                    let rj = l.row(j);
                    let (oi, oj) = (i.saturating_sub(bw), j.saturating_sub(bw));
                    for k in jlo..j {
                        s -= ri[k - oi] * rj[k - oj];
                    }
                }
                let v = if j == i {
                    if !(s > 0.0) {
                        return Err(SolverError::NotPositiveDefinite { row: i, pivot: s });
                    }
                    s.sqrt()
                } else {
                    s / l.get(j, j)
                };
                l.row_mut(i)[j - lo] = v;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.l.dim();
        let bw = self.l.bandwidth();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = self.l.row(i);
            let mut s = x[i];
            for k in lo..i {
                s -= row[k - lo] * x[k];
            }
            x[i] = s / row[i - lo];
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(bw);
            let row = self.l.row(i);
            x[i] /= row[i - lo];
            let xi = x[i];
            for k in lo..i {
                x[k] -= row[k - lo] * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_small_band() {
        let n = 9;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 4.0 + i as f64 * 0.1;
            if i >= 1 {
                a[i][i - 1] = -1.0;
                a[i - 1][i] = -1.0;
            }
            if i >= 3 {
                a[i][i - 3] = -0.5;
                a[i - 3][i] = -0.5;
            }
        }
        let f = CholeskyFactor::new(&LowerBandMatrix::from_dense(&a)).unwrap();
        let xe: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * xe[j]).sum()).collect();
        let x = f.solve(&b);
        for (u, v) in x.iter().zip(&xe) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(matches!(
            CholeskyFactor::new(&LowerBandMatrix::from_dense(&a)),
            Err(SolverError::NotPositiveDefinite { row: 1, .. })
        ));
    }
}
