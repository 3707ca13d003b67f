//! Symmetric band storage.

use crate::exec;
use crate::mesh::{Lattice, EDGE_DIRECTIONS};

use super::FemError;

/// Symmetric matrix stored as its main diagonal plus a few upper diagonals
/// at fixed offsets. On the structured two-level meshes the seven mesh edge
/// directions give seven upper diagonals, fifteen nonzero diagonals in all.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandedMatrix {
    n: usize,
    /// `offsets[0] == 0`, then strictly increasing.
    offsets: Vec<usize>,
    /// `diags[d][i] = A[i][i + offsets[d]]`, zero past the end.
    diags: Vec<Vec<f64>>,
}

impl SymBandedMatrix {
    pub fn new(n: usize, upper_offsets: &[usize]) -> Result<Self, FemError> {
        if upper_offsets.windows(2).any(|w| w[1] <= w[0]) || upper_offsets.first() == Some(&0) {
            return Err(FemError::Structure(format!(
                "band offsets must be positive and strictly increasing: {upper_offsets:?}"
            )));
        }
        let mut offsets = vec![0];
        offsets.extend_from_slice(upper_offsets);
        let diags = offsets.iter().map(|_| vec![0.0; n]).collect();
        Ok(Self { n, offsets, diags })
    }

    /// Band layout of a lattice numbered `x`-fastest.
    pub fn for_lattice(lattice: &Lattice) -> Self {
        let mut off = lattice_offsets(lattice);
        off.retain(|&o| o > 0);
        Self::new(lattice.len(), &off).expect("lattice offsets are sorted")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, &[]).unwrap();
        m.diags[0].fill(1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diags[0]
    }

    /// Storage of the diagonal at `offsets[d]`.
    pub fn band(&self, d: usize) -> &[f64] {
        &self.diags[d]
    }

    pub(crate) fn band_mut(&mut self, d: usize) -> &mut [f64] {
        &mut self.diags[d]
    }

    fn slot(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let off = c - r;
        self.offsets.binary_search(&off).ok().map(|d| (d, r))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |(d, r)| self.diags[d][r])
    }

    /// Adds `v` to `A[i][j]` (and so to `A[j][i]`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<(), FemError> {
        let (d, r) = self.slot(i, j).ok_or_else(|| {
            FemError::Structure(format!("entry ({i}, {j}) falls outside the band {:?}", self.offsets))
        })?;
        self.diags[d][r] += v;
        Ok(())
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<(), FemError> {
        let (d, r) = self
            .slot(i, j)
            .ok_or_else(|| FemError::Structure(format!("entry ({i}, {j}) falls outside the band")))?;
        self.diags[d][r] = v;
        Ok(())
    }

    /// `y = A x`, touching stored diagonals only.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        exec::for_each_mut(y, |i, yi| {
            let mut s = self.diags[0][i] * x[i];
            for d in 1..self.offsets.len() {
                let o = self.offsets[d];
                if i + o < n {
                    s += self.diags[d][i] * x[i + o];
                }
                if i >= o {
                    s += self.diags[d][i - o] * x[i - o];
                }
            }
            *yi = s;
        });
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Scales every entry.
    pub fn scale(&mut self, c: f64) {
        for d in &mut self.diags {
            d.iter_mut().for_each(|v| *v *= c);
        }
    }

    /// `self += c * other`; both must share the band layout.
    pub fn add_scaled(&mut self, c: f64, other: &SymBandedMatrix) -> Result<(), FemError> {
        if self.offsets != other.offsets || self.n != other.n {
            return Err(FemError::Structure("band layouts differ".into()));
        }
        for (a, b) in self.diags.iter_mut().zip(&other.diags) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
        }
        Ok(())
    }

    /// Adds a diagonal matrix.
    pub fn add_diagonal(&mut self, c: f64, diag: &[f64]) {
        self.diags[0].iter_mut().zip(diag).for_each(|(a, d)| *a += c * d);
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (d, &o) in self.offsets.iter().enumerate() {
            for i in 0..self.n.saturating_sub(o) {
                a[i][i + o] = self.diags[d][i];
                a[i + o][i] = self.diags[d][i];
            }
        }
        a
    }
}

/// Index offsets of the seven edge directions on a lattice, sorted, without
/// duplicates. Small lattices can map two directions to one offset.
pub fn lattice_offsets(lattice: &Lattice) -> Vec<usize> {
    let [sx, sy, sz] = lattice.strides().map(|s| s as i64);
    let mut off: Vec<usize> = EDGE_DIRECTIONS
        .iter()
        .map(|d| (d[0] * sx + d[1] * sy + d[2] * sz).unsigned_abs() as usize)
        .collect();
    off.sort_unstable();
    off.dedup();
    off
}

/// Symmetric matrix in lower band storage with a fixed half bandwidth; the
/// layout a banded Cholesky factorisation works in.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBandMatrix {
    n: usize,
    bw: usize,
    /// Row `i` keeps columns `i - bw ..= i` at `data[i * (bw + 1) + (j + bw - i)]`.
    data: Vec<f64>,
}

impl LowerBandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let bw = (0..n)
            .flat_map(|i| (0..i).filter(move |&j| a[i][j] != 0.0).map(move |j| i - j))
            .max()
            .unwrap_or(0);
        let mut m = Self::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                m.data[i * (bw + 1) + (j + bw - i)] = a[i][j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn pos(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bw).then(|| i * (self.bw + 1) + (j + self.bw - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pos(i, j).map_or(0.0, |p| self.data[p])
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<(), FemError> {
        let p = self
            .pos(i, j)
            .ok_or_else(|| FemError::Structure(format!("entry ({i}, {j}) outside half bandwidth {}", self.bw)))?;
        self.data[p] += v;
        Ok(())
    }

    /// Row `i` restricted to columns `lo ..= i`, `lo = i.saturating_sub(bw)`.
    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[f64] {
        let start = i * (self.bw + 1);
        let skip = self.bw.saturating_sub(i);
        &self.data[start + skip..start + self.bw + 1]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let start = i * (self.bw + 1);
        let skip = self.bw.saturating_sub(i);
        &mut self.data[start + skip..start + self.bw + 1]
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = self.row(i);
            for (k, &a) in row.iter().enumerate() {
                let j = lo + k;
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
    }

    /// Drops row and column `r`.
    pub fn without(&self, r: usize) -> Self {
        let mut m = Self::zeros(self.n - 1, self.bw);
        let map = |i: usize| if i < r { i } else { i + 1 };
        for i in 0..self.n - 1 {
            for j in i.saturating_sub(self.bw)..=i {
                let v = self.get(map(i), map(j));
                if v != 0.0 {
                    m.add(i, j, v).expect("band shrinks");
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}
