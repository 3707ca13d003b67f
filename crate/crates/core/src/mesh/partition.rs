use super::MeshError;

/// Piecewise-uniform subdivision of one box axis `[0, A]`.
///
/// `breakpoints` splits the axis into sub-intervals; sub-interval `s` is cut
/// into `divisions[s]` equal coarse cells.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisPartition {
    breakpoints: Vec<f64>,
    divisions: Vec<usize>,
}

impl AxisPartition {
    pub fn new(breakpoints: Vec<f64>, divisions: Vec<usize>) -> Result<Self, MeshError> {
        if breakpoints.len() < 2 || divisions.len() + 1 != breakpoints.len() {
            return Err(MeshError::Partition(format!(
                "{} breakpoints need {} division counts, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                divisions.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(MeshError::Partition(format!(
                "first breakpoint must be 0, got {}",
                breakpoints[0]
            )));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(MeshError::Partition(format!(
                "breakpoints must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(MeshError::Partition("non-finite breakpoint".into()));
        }
        if divisions.contains(&0) {
            return Err(MeshError::Partition("division counts must be at least 1".into()));
        }
        Ok(Self { breakpoints, divisions })
    }

    /// `[0, length]` cut into `n` equal cells.
    pub fn uniform(length: f64, n: usize) -> Result<Self, MeshError> {
        Self::new(vec![0.0, length], vec![n])
    }

    /// The graded construction used for thin boundary layers: five cells on
    /// `[0, 3/16]`, twelve on `[3/16, 13/16]`, five on `[13/16, 1]`.
    pub fn boundary_layer_graded() -> Self {
        Self::new(vec![0.0, 3.0 / 16.0, 13.0 / 16.0, 1.0], vec![5, 12, 5]).expect("static partition is valid")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn divisions(&self) -> &[usize] {
        &self.divisions
    }

    /// Aspect ratio of this axis (its right end).
    pub fn length(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn cells(&self) -> usize {
        self.divisions.iter().sum()
    }

    /// Coarse gridline coordinates, `1 + cells()` of them.
    pub fn coordinates(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.cells() + 1);
        out.push(self.breakpoints[0]);
        for (s, &n) in self.divisions.iter().enumerate() {
            let (a, b) = (self.breakpoints[s], self.breakpoints[s + 1]);
            for k in 1..n {
                out.push(a + (b - a) * (k as f64) / (n as f64));
            }
            // land exactly on the breakpoint
            out.push(b);
        }
        out
    }
}

/// Inserts the midpoint of every interval: the fine gridlines.
pub fn refine_coordinates(coarse: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * coarse.len() - 1);
    for w in coarse.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*coarse.last().unwrap());
    out
}
